"""Minimum detectable cross-section bounds for the three measurement schemes.

The closed forms are the exact positive root of the quadratic obtained by
squaring the detection criterion S - B = n_sigma (sqrt(S) + sqrt(B)); a
scheme-agnostic bisection solver working directly on the count expressions
serves as an independent oracle.  Bounds are returned in GM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import GM_IN_CM4S, ExperimentConfig
from .rates import coefficients, quantum_advantage
from .schemes import (
    ATTENUATION,
    PROBABILISTIC,
    ROLE_BACKGROUND,
    ROLE_SIGNAL,
    SEPARATION,
    SchemeSpec,
    detectable,
    expected_counts,
)

ETA_CLIP = 1e-6  # search domain for the attenuation optimum: [clip, 1 - clip]

NOISE_DARK = "dark"
NOISE_HBA = "hba"
NOISE_SHOT = "shot_ctpa"
NOISE_CONSTANT = "constant"
NOISE_MIXED = "mixed"


class SolverError(RuntimeError):
    """Raised when the numeric bound solver cannot bracket a threshold."""


@dataclass(frozen=True)
class SensitivityResult:
    """Minimum detectable cross-section of one scheme, with diagnostics."""

    sigma_c_gm: float
    scheme: str
    eta_used: float | None
    dominant_noise: str
    meets_target: bool | None
    target_gm: float | None


@dataclass(frozen=True)
class EtaOptimum:
    eta_opt: float
    sigma_c_gm: float
    at_lower_clip: bool  # argmin pinned at the clip: the eta -> 0 regime


@dataclass(frozen=True)
class _BoundTerms:
    """Shared pieces of the closed-form bounds.

    ``prefactor`` carries the units (cm^4 s); ``k`` is the quantum advantage
    per pair, and ``hba``/``dark`` are the noise groups of the radicand in
    their attenuation-free form.
    """

    prefactor: float
    k: float
    hba: float
    dark: float


def _terms(config: ExperimentConfig) -> _BoundTerms | None:
    """None signals an infinite bound (no pairs or no pair enhancement)."""
    q = quantum_advantage(config)
    if config.N_P == 0.0 or q == 0.0:
        return None
    per_pulse = config.T_int * config.f_rep * config.T
    trans = config.eta_s * config.eta_i * config.eta_d
    if trans == 0.0:
        return None
    pref = (
        config.n_sigma**2
        * (config.A * config.T / q) ** 2
        / (per_pulse * trans * config.N_t)
    )
    eps_h = config.N_t * config.sigma_h / (config.A * config.T)
    scale = q * q * config.T_int / config.n_sigma**2
    hba = (
        scale
        * (config.f_rep * config.T / config.N_P)
        * config.eta_d
        * (config.eta_s + config.eta_i)
        * eps_h
    )
    dark = scale * config.f_dark / config.N_P**2
    return _BoundTerms(prefactor=pref, k=q / config.N_P, hba=hba, dark=dark)


def bound_separation(config: ExperimentConfig) -> float:
    """Smallest detectable cross-section [GM], deterministic separation.

    The background is taken with fully decorrelated pairs, so the difference
    signal is the pair-driven count alone.
    """
    t = _terms(config)
    if t is None:
        return math.inf
    radicand = 1.0 + t.k + t.hba + t.dark
    return t.prefactor * (2.0 + t.k + 2.0 * math.sqrt(radicand)) / GM_IN_CM4S


def bound_separation_highflux(config: ExperimentConfig) -> float:
    """Infinite-pair-flux limit of the separation bound [GM]."""
    t = _terms(config)
    if t is None:
        return math.inf
    return 4.0 * t.prefactor / GM_IN_CM4S


def bound_probabilistic(config: ExperimentConfig) -> float:
    """Smallest detectable cross-section [GM], probabilistic separation.

    Half of the pair-driven count survives in the background, which costs a
    factor that approaches 4 over the deterministic scheme at high flux.
    """
    t = _terms(config)
    if t is None:
        return math.inf
    radicand = 4.0 + 6.0 * t.k + 2.0 * t.k * t.k + t.hba + t.dark
    return (
        2.0
        * t.prefactor
        * (4.0 + 3.0 * t.k + 2.0 * math.sqrt(radicand))
        / GM_IN_CM4S
    )


def bound_attenuation(config: ExperimentConfig, eta: float) -> float:
    """Smallest detectable cross-section [GM], attenuation scheme.

    ``eta`` is the attenuator transmittance.  The bound diverges as
    1/(eta-1)^2 at eta = 1, where signal and background coincide; that case
    returns +inf rather than raising so sweeps can include the endpoint.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0,1], got {eta!r}")
    if eta == 1.0:
        return math.inf
    t = _terms(config)
    if t is None:
        return math.inf
    one_m = 1.0 - eta
    shot = (eta + 1.0) / eta * t.k
    radicand = (
        1.0
        + shot
        + t.k * t.k / eta
        + one_m * one_m * (t.hba / eta + t.dark / (eta * eta))
    )
    return (
        t.prefactor
        / (one_m * one_m)
        * (2.0 + shot + 2.0 * math.sqrt(radicand))
        / GM_IN_CM4S
    )


def bound(config: ExperimentConfig, scheme: str, eta: float | None = None) -> float:
    """Closed-form bound for any scheme name, in GM."""
    if scheme == SEPARATION:
        return bound_separation(config)
    if scheme == PROBABILISTIC:
        return bound_probabilistic(config)
    if scheme == ATTENUATION:
        if eta is None:
            raise ValueError("attenuation scheme requires eta")
        return bound_attenuation(config, eta)
    raise ValueError(f"unknown scheme {scheme!r}")


def _margin(config: ExperimentConfig, scheme: str, eta, sigma_cm4s: float) -> float:
    s = expected_counts(config, SchemeSpec(scheme, ROLE_SIGNAL, eta), sigma_cm4s)
    b = expected_counts(config, SchemeSpec(scheme, ROLE_BACKGROUND, eta), sigma_cm4s)
    return detectable(s, b, config.n_sigma).margin


def solve_bound_numeric(
    config: ExperimentConfig,
    scheme: str,
    eta: float | None = None,
    rel_tol: float = 1e-9,
) -> float:
    """Bound from bisection on the detection margin, in GM.

    Independent of the closed forms: brackets the sign change of
    S(sigma) - B(sigma) - n_sigma (sqrt(S) + sqrt(B)) on a geometric grid and
    bisects in log space.  The margin is convex in sigma with at most one
    upward crossing; a downward sign change on the grid indicates a model
    inconsistency and is reported.
    """
    if scheme == ATTENUATION and eta is None:
        raise ValueError("attenuation scheme requires eta")
    lo_gm, hi_gm = 1e-40, 1e40
    grid: list[float] = []
    x = lo_gm
    while x <= hi_gm * 1.0001:
        grid.append(x)
        x *= 1e4
    margins = [_margin(config, scheme, eta, g * GM_IN_CM4S) for g in grid]
    first_pos = next((i for i, m in enumerate(margins) if m >= 0.0), None)
    if first_pos is None or first_pos == 0:
        raise SolverError(
            f"no sign change of the detection margin in [{grid[0]:g}, {grid[-1]:g}] GM "
            f"(scheme={scheme}, margins {margins[0]:.3g} .. {margins[-1]:.3g})"
        )
    if any(m < 0.0 for m in margins[first_pos:]):
        raise SolverError(
            "detection margin is not single-crossing in sigma_c; model inconsistency"
        )
    lo, hi = math.log(grid[first_pos - 1]), math.log(grid[first_pos])
    while hi - lo > rel_tol:
        mid = 0.5 * (lo + hi)
        if _margin(config, scheme, eta, math.exp(mid) * GM_IN_CM4S) < 0.0:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section minimum of a unimodal function on [lo, hi]."""
    c = hi - (hi - lo) * _INV_GOLDEN
    d = lo + (hi - lo) * _INV_GOLDEN
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - (hi - lo) * _INV_GOLDEN
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + (hi - lo) * _INV_GOLDEN
            fd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def optimize_eta(config: ExperimentConfig, tol: float = 1e-6) -> EtaOptimum:
    """Attenuation value minimizing the attenuation-scheme bound.

    The bound is log-convex in eta on (0,1), so a golden-section refinement
    around the best point of a log-spaced seed grid finds the global
    minimum.  The domain is clipped to [1e-6, 1 - 1e-6]; an argmin at the
    lower clip reports the eta -> 0 limiting regime.
    """
    f = lambda e: bound_attenuation(config, e)
    seeds = [ETA_CLIP]
    x = ETA_CLIP
    while x < 0.05:
        x *= 2.0
        seeds.append(x)
    step = 0.05
    while x < 1.0 - ETA_CLIP - step:
        x += step
        seeds.append(x)
    seeds.append(1.0 - ETA_CLIP)
    values = [f(e) for e in seeds]
    i = min(range(len(seeds)), key=values.__getitem__)
    lo = seeds[max(i - 1, 0)]
    hi = seeds[min(i + 1, len(seeds) - 1)]
    eta_opt, best = _golden_min(f, lo, hi, tol)
    if values[i] < best:
        eta_opt, best = seeds[i], values[i]
    at_clip = eta_opt <= ETA_CLIP * (1.0 + 1e-3) or abs(eta_opt - ETA_CLIP) < tol
    return EtaOptimum(eta_opt=eta_opt, sigma_c_gm=best, at_lower_clip=at_clip)


def _noise_groups(config: ExperimentConfig, eta: float | None) -> dict[str, float]:
    """Additive groups of the bound radicand, largest one names the noise."""
    t = _terms(config)
    if t is None:
        return {NOISE_CONSTANT: 1.0, NOISE_SHOT: 0.0, NOISE_HBA: 0.0, NOISE_DARK: 0.0}
    if eta is None:
        return {
            NOISE_CONSTANT: 1.0,
            NOISE_SHOT: t.k,
            NOISE_HBA: t.hba,
            NOISE_DARK: t.dark,
        }
    one_m2 = (1.0 - eta) ** 2
    return {
        NOISE_CONSTANT: 1.0,
        NOISE_SHOT: (eta + 1.0) / eta * t.k + t.k * t.k / eta,
        NOISE_HBA: one_m2 * t.hba / eta,
        NOISE_DARK: one_m2 * t.dark / (eta * eta),
    }


def classify_noise(config: ExperimentConfig, eta: float | None = None) -> str:
    """Dominant noise source of the bound at attenuation ``eta``.

    With ``eta = None`` the separation-scheme groups are compared instead.
    Returns ``"mixed"`` when the two largest groups are within a factor of
    two of each other.
    """
    if eta is not None and not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0,1), got {eta!r}")
    groups = _noise_groups(config, eta)
    ranked = sorted(groups.items(), key=lambda kv: kv[1], reverse=True)
    (top_name, top), (_, second) = ranked[0], ranked[1]
    if top <= 2.0 * second:
        return NOISE_MIXED
    return top_name


def evaluate(
    config: ExperimentConfig, scheme: str, eta: float | None = None
) -> SensitivityResult:
    """Bound plus noise classification and target check for one scheme."""
    value = bound(config, scheme, eta)
    noise = classify_noise(config, eta if scheme == ATTENUATION and eta != 1.0 else None)
    target = config.target_gm
    meets = None if target is None else bool(value <= target)
    return SensitivityResult(
        sigma_c_gm=value,
        scheme=scheme,
        eta_used=eta if scheme == ATTENUATION else None,
        dominant_noise=noise,
        meets_target=meets,
        target_gm=target,
    )
