"""Per-pulse photon fluxes, absorption coefficients and absorption rates.

Everything here is a pure function of an immutable config, evaluated per
pump pulse and before detection efficiency; the measurement schemes apply
the detector model on top.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import ExperimentConfig


@dataclass(frozen=True)
class AbsorptionCoefficients:
    """Absorber/geometry coefficients linking cross-sections to rates.

    ``epsilon_c`` drives uncorrelated (classical) two-photon absorption,
    ``epsilon_e`` pair-driven absorption (including any extra enhancement
    factor), ``epsilon_h`` single-photon hot-band absorption.
    """

    epsilon_c: float
    epsilon_e: float
    epsilon_h: float


@dataclass(frozen=True)
class PerPulseRates:
    """Fluorescence-producing absorption events per pump pulse."""

    f_c: float  # uncorrelated two-photon events, scales as N_P^2
    f_ent: float  # pair-driven two-photon events, scales as N_P
    f_h: float  # hot-band events, scales as N_P


def single_photon_flux(config: ExperimentConfig, arm: str = "signal") -> float:
    """Single-photon flux of one arm at the absorber [photons / (cm^2 s)]."""
    if arm == "signal":
        eta = config.eta_s
    elif arm == "idler":
        eta = config.eta_i
    else:
        raise ValueError(f"arm must be 'signal' or 'idler', got {arm!r}")
    return eta * config.N_P / (config.A * config.T)


def pair_flux(config: ExperimentConfig) -> float:
    """Correlated pair flux at the absorber [pairs / (cm^2 s) per mode volume]."""
    return (
        config.eta_s
        * config.eta_i
        * config.N_P
        / (config.A * config.A_e * config.T * config.T_e)
    )


def quantum_advantage(config: ExperimentConfig) -> float:
    """Enhancement of pair-driven over uncorrelated two-photon absorption.

    (A T) / (A_e T_e) times the optional extra enhancement factor; equals
    epsilon_e / epsilon_c whenever the classical coefficient is nonzero.
    """
    return (
        (config.A * config.T)
        / (config.A_e * config.T_e)
        * config.extra_enhancement
    )


def coefficients(config: ExperimentConfig, sigma_c: float) -> AbsorptionCoefficients:
    """Absorption coefficients for a TPA cross-section ``sigma_c`` [cm^4 s]."""
    if sigma_c < 0:
        raise ValueError(f"sigma_c must be >= 0, got {sigma_c}")
    area_time = config.A * config.T
    eps_c = config.N_t * sigma_c / area_time**2
    eps_e = (
        config.N_t
        * sigma_c
        / (area_time * config.A_e * config.T_e)
        * config.extra_enhancement
    )
    eps_h = config.N_t * config.sigma_h / area_time
    return AbsorptionCoefficients(epsilon_c=eps_c, epsilon_e=eps_e, epsilon_h=eps_h)


def per_pulse_rates(config: ExperimentConfig, sigma_c: float) -> PerPulseRates:
    """Absorption events per pump pulse, before detection efficiency."""
    co = coefficients(config, sigma_c)
    pair_trans = config.eta_s * config.eta_i
    return PerPulseRates(
        f_c=co.epsilon_c * pair_trans * config.N_P**2,
        f_ent=co.epsilon_e * pair_trans * config.N_P,
        f_h=co.epsilon_h * (config.eta_s + config.eta_i) * config.N_P,
    )
