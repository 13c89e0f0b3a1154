"""Expected event counts for the three measurement schemes.

Counts are expectation values over one integration, decomposed by excitation
pathway.  The background of the deterministic separation scheme lacks the
pair-driven term entirely, the probabilistic variant retains half of it, and
the attenuation scheme trades a linear pair reduction in the signal role
against a quadratic one in the background role.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ExperimentConfig
from .rates import coefficients

SEPARATION = "separation"
PROBABILISTIC = "probabilistic"
ATTENUATION = "attenuation"
SCHEMES = (SEPARATION, PROBABILISTIC, ATTENUATION)

ROLE_SIGNAL = "signal"
ROLE_BACKGROUND = "background"


@dataclass(frozen=True)
class SchemeSpec:
    """One measurement arm: which scheme, which role, and the attenuation
    value when the scheme needs one."""

    scheme: str
    role: str
    eta: float | None = None

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r} (expected one of {SCHEMES})")
        if self.role not in (ROLE_SIGNAL, ROLE_BACKGROUND):
            raise ValueError(f"unknown role {self.role!r}")
        if self.scheme == ATTENUATION:
            if self.eta is None or not (0.0 < self.eta <= 1.0):
                raise ValueError(
                    f"attenuation scheme requires eta in (0,1], got {self.eta!r}"
                )
        elif self.eta is not None:
            raise ValueError(f"scheme {self.scheme!r} takes no attenuation value")


@dataclass(frozen=True)
class ExpectedCounts:
    """Expected events of one integration, split by excitation pathway."""

    etpa: float
    ctpa: float
    hba: float
    dark: float

    @property
    def total(self) -> float:
        return self.etpa + self.ctpa + self.hba + self.dark


@dataclass(frozen=True)
class Detection:
    detectable: bool
    margin: float


def expected_counts(
    config: ExperimentConfig, spec: SchemeSpec, sigma_c: float
) -> ExpectedCounts:
    """Expected counts for one scheme/role at cross-section ``sigma_c`` [cm^4 s].

    Detection efficiency applies to every fluorescence pathway; dark counts
    arise inside the detector and are never scaled by it.
    """
    co = coefficients(config, sigma_c)
    base = config.T_int * config.f_rep * config.T
    pair_trans = config.eta_s * config.eta_i * config.eta_d
    etpa = base * pair_trans * config.N_P * co.epsilon_e
    ctpa = base * pair_trans * config.N_P**2 * co.epsilon_c
    hba = base * config.N_P * config.eta_d * (config.eta_s + config.eta_i) * co.epsilon_h
    dark = config.T_int * config.f_dark

    if spec.scheme == SEPARATION:
        if spec.role == ROLE_BACKGROUND:
            etpa = 0.0
    elif spec.scheme == PROBABILISTIC:
        if spec.role == ROLE_BACKGROUND:
            etpa *= 0.5
    else:  # attenuation
        eta = spec.eta
        if spec.role == ROLE_SIGNAL:
            etpa *= eta
        else:
            etpa *= eta * eta
        ctpa *= eta * eta
        hba *= eta
    return ExpectedCounts(etpa=etpa, ctpa=ctpa, hba=hba, dark=dark)


def uncertainty(counts: float, n_sigma: float) -> float:
    """Shot-noise uncertainty of a Poissonian count."""
    if counts < 0:
        raise ValueError(f"counts must be >= 0, got {counts}")
    return n_sigma * math.sqrt(counts)


def _total(value) -> float:
    return value.total if isinstance(value, ExpectedCounts) else float(value)


def detectable(signal, background, n_sigma: float) -> Detection:
    """Apply the detection criterion S - B >= n_sigma (sqrt(S) + sqrt(B)).

    Accepts :class:`ExpectedCounts` or plain totals.  The boundary counts as
    detectable: a margin of exactly zero passes.
    """
    s = _total(signal)
    b = _total(background)
    margin = (s - b) - (uncertainty(s, n_sigma) + uncertainty(b, n_sigma))
    return Detection(detectable=margin >= 0.0, margin=margin)
