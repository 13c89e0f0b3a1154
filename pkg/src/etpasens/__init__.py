"""Sensitivity modeling for entangled two-photon absorption measurements.

Computes the minimum detectable two-photon cross-section of a specified
experiment under three measurement schemes, optimizes the free experimental
parameters, and validates the closed-form bounds against a numeric solver
and a Poisson Monte-Carlo oracle.
"""

from .config import (
    AVOGADRO,
    CONTINUOUS_WAVE,
    GM_IN_CM4S,
    PULSED,
    ConfigError,
    ExperimentConfig,
    ReferenceInfo,
    builtin,
    builtin_table,
    evolve,
    load_config,
    parse_config,
    to_text,
)
from .rates import (
    AbsorptionCoefficients,
    PerPulseRates,
    coefficients,
    pair_flux,
    per_pulse_rates,
    quantum_advantage,
    single_photon_flux,
)
from .schemes import (
    ATTENUATION,
    PROBABILISTIC,
    SEPARATION,
    Detection,
    ExpectedCounts,
    SchemeSpec,
    detectable,
    expected_counts,
    uncertainty,
)
from .sensitivity import (
    EtaOptimum,
    SensitivityResult,
    SolverError,
    bound,
    bound_attenuation,
    bound_probabilistic,
    bound_separation,
    bound_separation_highflux,
    classify_noise,
    evaluate,
    optimize_eta,
    solve_bound_numeric,
)
from .gating import (
    GateModel,
    GateOptimum,
    GatingError,
    apply_gate,
    gated_dark_rate,
    gated_efficiency_analytic,
    gated_efficiency_numeric,
    optimize_gate,
)
from .ladder import LadderStep, SchemeState, apply_step, run_ladder
from .montecarlo import CurvePoint, SimulationReport, detection_curve, simulate
from .tables import TableRow, table_report
from ._kernels import KernelError, backend

__version__ = "0.1.0"
