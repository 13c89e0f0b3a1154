"""Time-gated detection: gated dark rate, gated detection efficiency and
gate-width optimization.

Gating a window of relative width ``g`` after each pump pulse cuts dark
counts linearly while the collected fluorescence falls off with the decay
integral.  For pulses much shorter than the fluorescence lifetime the
efficiency has a closed form; otherwise the pump pulse shape is integrated
numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import CONTINUOUS_WAVE, DEFAULT_TAU, ExperimentConfig, evolve
from .schemes import SEPARATION
from . import sensitivity

PULSE_DELTA = "delta"
PULSE_GAUSSIAN = "gaussian"
PULSE_SQUARE = "square"
_SHAPES = (PULSE_DELTA, PULSE_GAUSSIAN, PULSE_SQUARE)

# intensity FWHM -> standard deviation for gaussian pulses
_FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


class GatingError(RuntimeError):
    """Raised for gate models the detector model cannot evaluate."""


@dataclass(frozen=True)
class GateModel:
    """A detection gate: relative width, decay time, excitation pulse shape."""

    g: float
    tau: float
    pulse_shape: str = PULSE_DELTA

    def __post_init__(self) -> None:
        if not 0.0 < self.g <= 1.0:
            raise ValueError(f"relative gate width must lie in (0,1], got {self.g!r}")
        if not (math.isfinite(self.tau) and self.tau > 0.0):
            raise ValueError(f"decay time must be positive, got {self.tau!r}")
        if self.pulse_shape not in _SHAPES:
            raise ValueError(f"unknown pulse shape {self.pulse_shape!r}")


@dataclass(frozen=True)
class GateOptimum:
    g_opt: float
    sigma_c_gm: float
    config_gated: ExperimentConfig
    tau: float
    tau_assumed: bool  # True when the default lifetime stood in for a measured one


def gated_dark_rate(f_dark: float, g: float) -> float:
    """Dark count rate inside a gate of relative width ``g``."""
    if not 0.0 < g <= 1.0:
        raise ValueError(f"relative gate width must lie in (0,1], got {g!r}")
    return g * f_dark


def gated_efficiency_analytic(eta_d: float, g: float, f_rep: float, tau: float) -> float:
    """Detection efficiency inside the gate for delta-like excitation.

    Valid when the pulse is much shorter than the decay time; the collected
    fraction is (1 - exp(-g/(f_rep tau))) / (1 - exp(-1/(f_rep tau))), which
    reduces to g when the decay outlives many repetition periods and to 1 at
    g = 1.
    """
    if not 0.0 < g <= 1.0:
        raise ValueError(f"relative gate width must lie in (0,1], got {g!r}")
    if f_rep <= 0.0 or tau <= 0.0:
        raise ValueError("f_rep and tau must be positive")
    x = 1.0 / (f_rep * tau)
    return eta_d * math.expm1(-g * x) / math.expm1(-x)


def _collected_fraction(phase: np.ndarray, period: float, g: float, tau: float) -> np.ndarray:
    """Fraction of an exponential decay starting at phase ``phase`` of the
    repetition period that lands inside any later gate window.

    The window occupies [0, g*period) of every period.  All windows after
    the emission time form a geometric series, summed in closed form; the
    window containing the emission time (if any) adds its remaining part.
    """
    gp = g * period
    denominator = -math.expm1(-period / tau)
    if denominator <= 0.0:
        raise GatingError(
            f"gate spill-over series does not converge (period/tau = {period / tau:g})"
        )
    tail = (-math.expm1(-gp / tau)) * np.exp(-(period - phase) / tau) / denominator
    inside = phase < gp
    own = -np.expm1(-(gp - phase) / tau)
    return tail + np.where(inside, own, 0.0)


def gated_efficiency_numeric(
    eta_d: float,
    gate: GateModel,
    T: float,
    f_rep: float,
    rel_step: float = 1.0 / 16000.0,
) -> float:
    """Gated detection efficiency for a finite-duration excitation pulse.

    Convolves the pulse intensity profile with the exponential decay and
    integrates the emission-time distribution over the gate window of every
    repetition period (trapezoid rule over the pulse, closed-form geometric
    sum over periods).  ``T`` is the pulse duration: full width of a square
    pulse, intensity FWHM of a gaussian one.  The gate opens when the pulse
    begins, so for pulses much shorter than both the decay time and the
    window the delta-pulse closed form is recovered.
    """
    if gate.pulse_shape == PULSE_DELTA:
        raise ValueError("delta pulses have a closed form; use gated_efficiency_analytic")
    if T <= 0.0 or f_rep <= 0.0:
        raise ValueError("T and f_rep must be positive")
    period = 1.0 / f_rep
    tau = gate.tau
    step = min(T, tau) * rel_step
    if gate.pulse_shape == PULSE_SQUARE:
        n = max(int(math.ceil(T / step)), 8)
        u = np.linspace(0.0, T, n + 1)
        intensity = np.ones_like(u)
    else:
        s = T * _FWHM_TO_SIGMA
        n = max(int(math.ceil(14.0 * s / step)), 8)
        u = np.linspace(0.0, 14.0 * s, n + 1)
        intensity = np.exp(-0.5 * ((u - 7.0 * s) / s) ** 2)
    phase = u - np.floor(u / period) * period
    collected = _collected_fraction(phase, period, gate.g, tau)
    return eta_d * float(
        np.trapezoid(intensity * collected, u) / np.trapezoid(intensity, u)
    )


def apply_gate(config: ExperimentConfig, g: float, tau: float) -> ExperimentConfig:
    """Config with detection efficiency and dark rate modified by the gate."""
    eta_gated = gated_efficiency_analytic(config.eta_d, g, config.f_rep, tau)
    return evolve(config, eta_d=eta_gated, f_dark=gated_dark_rate(config.f_dark, g))


def optimize_gate(
    config: ExperimentConfig,
    gate: GateModel | None = None,
    scheme: str = SEPARATION,
    eta: float | None = None,
    tol: float = 1e-6,
) -> GateOptimum:
    """Gate width minimizing the chosen scheme's sensitivity bound.

    Only meaningful for pulsed pumps; gating a continuous-wave beam trades
    away acquisition time one-for-one and is refused.  When no gate model is
    supplied, the config's fluorescence lifetime is used, falling back to
    the documented default of 4 ns (flagged via ``tau_assumed``).
    """
    if config.pump_mode == CONTINUOUS_WAVE:
        raise GatingError(
            "time gating requires a pulsed pump; for continuous-wave beams the "
            "lost acquisition time cancels the dark-count reduction"
        )
    if gate is not None:
        tau, assumed = gate.tau, False
    elif config.tau is not None:
        tau, assumed = config.tau, False
    else:
        tau, assumed = DEFAULT_TAU, True

    def objective(g: float) -> float:
        return sensitivity.bound(apply_gate(config, g, tau), scheme, eta)

    seeds = list(np.geomspace(1e-6, 1.0, 121))
    seeds[-1] = 1.0
    values = [objective(g) for g in seeds]
    i = min(range(len(seeds)), key=values.__getitem__)
    lo = seeds[max(i - 1, 0)]
    hi = seeds[min(i + 1, len(seeds) - 1)]
    g_opt, best = sensitivity._golden_min(objective, lo, hi, tol)
    if values[i] < best:
        g_opt, best = seeds[i], values[i]
    return GateOptimum(
        g_opt=g_opt,
        sigma_c_gm=best,
        config_gated=apply_gate(config, g_opt, tau),
        tau=tau,
        tau_assumed=assumed,
    )
