"""Poisson count sampling on a counter-based random source.

Hot path of the Monte-Carlo oracle.  Every uniform is a pure function of
(seed, stream, trial, draw), so trials are order-independent and the same
seed reproduces the same counts on any platform.  Sampling uses the
multiplication method below mean 30 and transformed rejection above it; the
rejection test evaluates the log-pmf through a cancellation-free form so
means up to ~1e18 stay usable.

Two backends implement the identical draw-for-draw discipline: a numba
kernel (scalar loops, JIT-compiled) and a vectorized numpy fallback.  The
numba backend is used when importable; set ETPASENS_NO_NUMBA=1 to force the
fallback.
"""

from __future__ import annotations

import math
import os

import numpy as np

LAM_MAX = 1e18  # counts lose integer resolution long before this matters
_INVERSION_CUTOFF = 30.0
_MAX_INVERSION_ROUNDS = 3000  # P(Poisson(30) > 3000) is astronomically small

# splitmix64 finalizer constants; all arithmetic wraps modulo 2^64
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_CTRIAL = np.uint64(0xD6E8FEB86659FD93)
_CDRAW = np.uint64(0xA3B195354A39B70D)
_ONE = np.uint64(1)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53

# exact log(k!) for the small-k branch of the rejection test
_LGAMMA_TABLE = np.array([math.lgamma(k + 1.0) for k in range(31)])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class KernelError(RuntimeError):
    """Raised for Poisson means the sampler cannot handle."""


_DISABLED = os.environ.get("ETPASENS_NO_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


def backend() -> str:
    """Active sampling backend: "numba" or "numpy"."""
    return "numba" if (_HAVE_NUMBA and not _DISABLED) else "numpy"


# ---------------------------------------------------------------------------
# shared key derivation (scalar, numpy semantics)
# ---------------------------------------------------------------------------


def _u64(value: int) -> np.uint64:
    return np.uint64(value & 0xFFFFFFFFFFFFFFFF)


def _mix_scalar(z: np.uint64) -> np.uint64:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _MUL1
        z = (z ^ (z >> _S27)) * _MUL2
        return z ^ (z >> _S31)


def stream_key(seed: int, stream: int) -> np.uint64:
    """Root key of one (seed, stream) sub-stream."""
    with np.errstate(over="ignore"):
        z = _mix_scalar(_u64(seed) ^ _GOLD)
        return _mix_scalar(z ^ ((_u64(stream) + _ONE) * _CTRIAL))


# ---------------------------------------------------------------------------
# numpy backend (vectorized over trials; draw index advances in rounds)
# ---------------------------------------------------------------------------


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _MUL1
    z = (z ^ (z >> _S27)) * _MUL2
    return z ^ (z >> _S31)


def _trial_bases_np(key: np.uint64, n: int) -> np.ndarray:
    t = np.arange(n, dtype=np.uint64)
    return _mix_np(key ^ ((t + _ONE) * _CTRIAL))


def _uniforms_np(bases: np.ndarray, draw: int) -> np.ndarray:
    h = _mix_np(bases ^ ((np.uint64(draw) + _ONE) * _CDRAW))
    return (h >> _S11).astype(np.float64) * _INV53


def _logpmf_np(k: np.ndarray, lam: float, loglam: float) -> np.ndarray:
    """log(lam^k e^-lam / k!) without large-argument cancellation."""
    small = k <= 30.0
    idx = np.minimum(k, 30.0).astype(np.int64)
    exact = k * loglam - lam - _LGAMMA_TABLE[idx]
    ks = np.maximum(k, 31.0)
    d = ks - lam
    stirling = (
        d
        - ks * np.log1p(d / lam)
        - (_HALF_LOG_2PI + 0.5 * np.log(ks))
        - 1.0 / (12.0 * ks)
        + 1.0 / (360.0 * ks**3)
    )
    return np.where(small, exact, stirling)


def _poisson_small_np(bases: np.ndarray, lam: float) -> np.ndarray:
    """Multiplication method: count uniforms until their product drops
    below exp(-lam)."""
    n = bases.shape[0]
    enlam = math.exp(-lam)
    counts = np.zeros(n, dtype=np.int64)
    prod = np.ones(n, dtype=np.float64)
    alive = np.arange(n)
    draw = 0
    while alive.size:
        u = _uniforms_np(bases[alive], draw)
        prod[alive] *= u
        keep = prod[alive] > enlam
        counts[alive[keep]] += 1
        alive = alive[keep]
        draw += 1
        if draw > _MAX_INVERSION_ROUNDS:  # pragma: no cover - unreachable
            raise KernelError(f"inversion sampler failed to terminate (lam={lam})")
    return counts


def _poisson_ptrs_np(bases: np.ndarray, lam: float) -> np.ndarray:
    """Transformed rejection with squeeze for lam >= 30."""
    n = bases.shape[0]
    loglam = math.log(lam)
    b = 0.931 + 2.53 * math.sqrt(lam)
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    counts = np.zeros(n, dtype=np.int64)
    alive = np.arange(n)
    rnd = 0
    while alive.size:
        sub = bases[alive]
        u = _uniforms_np(sub, 2 * rnd) - 0.5
        v = _uniforms_np(sub, 2 * rnd + 1)
        us = 0.5 - np.abs(u)
        k = np.floor((2.0 * a / us + b) * u + lam + 0.43)
        accept = (us >= 0.07) & (v <= vr)
        reject = (k < 0.0) | ((us < 0.013) & (v > us))
        rest = ~(accept | reject)
        if rest.any():
            with np.errstate(divide="ignore"):
                lhs = np.log(v[rest]) + math.log(invalpha) - np.log(a / us[rest] ** 2 + b)
            accept[rest] = lhs <= _logpmf_np(k[rest], lam, loglam)
        counts[alive[accept]] = k[accept].astype(np.int64)
        alive = alive[~accept]
        rnd += 1
        if rnd > 10000:  # pragma: no cover - acceptance rate is ~0.9
            raise KernelError(f"rejection sampler failed to terminate (lam={lam})")
    return counts


def poisson_counts_numpy(seed: int, stream: int, lam: float, n: int) -> np.ndarray:
    """Vectorized fallback sampler; same stream discipline as the numba path."""
    _check_lam(lam)
    counts = np.zeros(int(n), dtype=np.int64)
    if lam == 0.0 or n == 0:
        return counts
    with np.errstate(over="ignore"):
        bases = _trial_bases_np(stream_key(seed, stream), int(n))
        if lam < _INVERSION_CUTOFF:
            return _poisson_small_np(bases, float(lam))
        return _poisson_ptrs_np(bases, float(lam))


# ---------------------------------------------------------------------------
# numba backend (scalar loop per trial)
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @_njit(cache=True)
    def _mix_nb(z):
        z = (z ^ (z >> _S30)) * _MUL1
        z = (z ^ (z >> _S27)) * _MUL2
        return z ^ (z >> _S31)

    @_njit(cache=True)
    def _uniform_nb(base, draw):
        h = _mix_nb(base ^ ((np.uint64(draw) + _ONE) * _CDRAW))
        return np.float64(h >> _S11) * _INV53

    @_njit(cache=True)
    def _logpmf_nb(k, lam, loglam, table):
        if k <= 30.0:
            return k * loglam - lam - table[np.int64(k)]
        d = k - lam
        return (
            d
            - k * math.log1p(d / lam)
            - (_HALF_LOG_2PI + 0.5 * math.log(k))
            - 1.0 / (12.0 * k)
            + 1.0 / (360.0 * k**3)
        )

    @_njit(cache=True)
    def _poisson_one_nb(base, lam, enlam, small, b, a, invalpha, vr, loglam, table):
        if small:
            count = 0
            prod = 1.0
            draw = 0
            while True:
                prod *= _uniform_nb(base, draw)
                draw += 1
                if prod > enlam:
                    count += 1
                else:
                    return count
        rnd = 0
        while True:
            u = _uniform_nb(base, 2 * rnd) - 0.5
            v = _uniform_nb(base, 2 * rnd + 1)
            rnd += 1
            us = 0.5 - abs(u)
            k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
            if us >= 0.07 and v <= vr:
                return np.int64(k)
            if k < 0.0 or (us < 0.013 and v > us):
                continue
            lhs = math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
            if lhs <= _logpmf_nb(k, lam, loglam, table):
                return np.int64(k)

    @_njit(cache=True)
    def _poisson_stream_nb(key, lam, n, table):
        out = np.zeros(n, dtype=np.int64)
        if lam == 0.0:
            return out
        small = lam < _INVERSION_CUTOFF
        enlam = math.exp(-lam) if small else 0.0
        if small:
            b = a = invalpha = vr = loglam = 0.0
        else:
            loglam = math.log(lam)
            b = 0.931 + 2.53 * math.sqrt(lam)
            a = -0.059 + 0.02483 * b
            invalpha = 1.1239 + 1.1328 / (b - 3.4)
            vr = 0.9277 - 3.6224 / (b - 2.0)
        for t in range(n):
            base = _mix_nb(key ^ ((np.uint64(t) + _ONE) * _CTRIAL))
            out[t] = _poisson_one_nb(
                base, lam, enlam, small, b, a, invalpha, vr, loglam, table
            )
        return out

    def poisson_counts_numba(seed: int, stream: int, lam: float, n: int) -> np.ndarray:
        """JIT-compiled sampler; bit-identical to the numpy fallback."""
        _check_lam(lam)
        return _poisson_stream_nb(
            stream_key(seed, stream), float(lam), int(n), _LGAMMA_TABLE
        )

else:  # pragma: no cover - exercised only without numba
    poisson_counts_numba = None


def _check_lam(lam: float) -> None:
    if not (0.0 <= lam <= LAM_MAX) or not math.isfinite(lam):
        raise KernelError(f"Poisson mean {lam!r} outside sampler range [0, {LAM_MAX:g}]")


def poisson_counts(seed: int, stream: int, lam: float, n: int) -> np.ndarray:
    """Sample ``n`` Poisson counts on sub-stream (seed, stream)."""
    if backend() == "numba":
        return poisson_counts_numba(seed, stream, lam, n)
    return poisson_counts_numpy(seed, stream, lam, n)
