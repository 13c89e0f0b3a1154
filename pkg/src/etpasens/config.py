"""Experiment parameter model: unit-aware parsing, validation and the
bundled set of published experiment configurations.

All quantities are normalized to an internal cm/s unit system on ingest, so
that two-photon cross-sections in cm^4 s map to Goeppert-Mayer units by a
pure power of ten.  Configurations are immutable after construction and safe
to share between threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, replace
from importlib import resources

AVOGADRO = 6.02214076e23
GM_IN_CM4S = 1e-50  # 1 Goeppert-Mayer = 1e-50 cm^4 s per photon

PULSED = "pulsed"
CONTINUOUS_WAVE = "continuous_wave"

DEFAULT_TAU = 4e-9  # assumed fluorescence lifetime [s] when none is given


class ConfigError(ValueError):
    """Raised for unparsable, incomplete or invalid experiment parameters."""


# unit token -> (dimension, factor to internal units).  Internal units:
# seconds, cm^2, Hz, mol; cross-sections are kept in GM.
_UNITS: dict[str, tuple[str, float]] = {
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "us": ("time", 1e-6),
    "ns": ("time", 1e-9),
    "ps": ("time", 1e-12),
    "fs": ("time", 1e-15),
    "min": ("time", 60.0),
    "h": ("time", 3600.0),
    "cm2": ("area", 1.0),
    "mm2": ("area", 1e-2),
    "um2": ("area", 1e-8),
    "nm2": ("area", 1e-14),
    "m2": ("area", 1e4),
    "Hz": ("rate", 1.0),
    "kHz": ("rate", 1e3),
    "MHz": ("rate", 1e6),
    "GHz": ("rate", 1e9),
    "mol": ("amount", 1.0),
    "mmol": ("amount", 1e-3),
    "umol": ("amount", 1e-6),
    "GM": ("xsection", 1.0),
    "cm4s": ("xsection", 1e50),
    "": ("dimensionless", 1.0),
    "%": ("dimensionless", 1e-2),
    "PpP": ("dimensionless", 1.0),
}

# numeric config keys -> (dimension, required)
_NUMERIC_KEYS: dict[str, tuple[str, bool]] = {
    "T_int": ("time", True),
    "eta_s": ("dimensionless", True),
    "eta_i": ("dimensionless", True),
    "eta_d": ("dimensionless", True),
    "A": ("area", True),
    "T": ("time", True),
    "A_e": ("area", True),
    "T_e": ("time", True),
    "T_e_min": ("time", False),
    "N_P": ("dimensionless", True),
    "f_rep": ("rate", False),  # required for pulsed pumps, derived for CW
    "f_dark": ("rate", True),
    "sigma_h": ("area", True),
    "N_t": ("amount", True),
    "n_sigma": ("dimensionless", False),
    "tau": ("time", False),
    "extra_enhancement": ("dimensionless", False),
    # optional published reference values
    "eta": ("dimensionless", False),
    "sigma_c_att": ("xsection", False),
    "sigma_c_split": ("xsection", False),
    "sigma_c_target": ("xsection", False),
}

_TEXT_KEYS = ("label", "pump_mode")

_BUILTIN_ORDER = (
    "geneva",
    "oregon",
    "oregon_cw",
    "oregon_sq",
    "boulder_fs",
    "boulder_fibre",
    "this_work",
)


@dataclass(frozen=True)
class ReferenceInfo:
    """Published per-experiment reference values.

    Cross-sections are in GM.  The raw value strings keep the precision the
    numbers were published with (one or two significant figures), which the
    table-reproduction report needs for a fair comparison.
    """

    eta: float | None = None
    sigma_att_gm: float | None = None
    sigma_split_gm: float | None = None
    target_gm: float | None = None
    sigma_att_str: str | None = field(default=None, compare=False)
    sigma_split_str: str | None = field(default=None, compare=False)

    def any_set(self) -> bool:
        return any(
            v is not None
            for v in (self.eta, self.sigma_att_gm, self.sigma_split_gm, self.target_gm)
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """All physical parameters of one ETPA experiment, unit-normalized.

    Times are seconds, areas cm^2, rates Hz.  ``N_t_raw`` is the illuminated
    amount of absorber in mol as usually quoted; the molecule count used by
    the rate formulas is exposed as :attr:`N_t`.
    """

    label: str
    T_int: float  # integration time [s]
    eta_s: float  # signal-arm transmission
    eta_i: float  # idler-arm transmission
    eta_d: float  # detection efficiency
    A: float  # beam area at the absorber [cm^2]
    T: float  # pulse duration; for CW pumps the pump coherence time [s]
    A_e: float  # entanglement area [cm^2]
    T_e: float  # entanglement time [s]
    N_P: float  # photon pairs per pump pulse
    f_rep: float  # pump repetition rate [Hz]
    f_dark: float  # detector dark count rate [Hz]
    sigma_h: float  # hot-band absorption cross-section [cm^2]
    N_t_raw: float  # illuminated amount of absorber [mol]
    pump_mode: str  # "pulsed" | "continuous_wave"
    n_sigma: float = 1.0  # detection accuracy in standard deviations
    T_e_min: float | None = None  # Fourier-limited entanglement time [s]
    tau: float | None = None  # fluorescence lifetime [s]
    extra_enhancement: float = 1.0  # extra factor on the pair-absorption coefficient
    reference: ReferenceInfo | None = None

    def __post_init__(self) -> None:
        _validate(self)

    @property
    def N_t(self) -> float:
        """Number of illuminated molecules."""
        return self.N_t_raw * AVOGADRO

    @property
    def target_gm(self) -> float | None:
        """Published target cross-section in GM, when known."""
        return self.reference.target_gm if self.reference else None


def _fail(key: str, value, message: str) -> None:
    raise ConfigError(f"{message} (key '{key}' = {value!r})")


def _validate(c: ExperimentConfig) -> None:
    positives = (
        ("T_int", c.T_int, "integration_time"),
        ("A", c.A, "beam_area"),
        ("T", c.T, "pulse_duration"),
        ("A_e", c.A_e, "entanglement_area"),
        ("T_e", c.T_e, "entanglement_time"),
        ("f_rep", c.f_rep, "repetition_rate"),
        ("N_t", c.N_t_raw, "illuminated_amount"),
        ("n_sigma", c.n_sigma, "accuracy"),
    )
    for key, value, name in positives:
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            _fail(key, value, f"{name} must be a finite positive number")
    fractions = (
        ("eta_s", c.eta_s, "arm_transmission"),
        ("eta_i", c.eta_i, "arm_transmission"),
        ("eta_d", c.eta_d, "detection_efficiency"),
    )
    for key, value, name in fractions:
        if not (math.isfinite(value) and 0.0 <= value <= 1.0):
            _fail(key, value, f"{name} out of [0,1]")
    nonneg = (
        ("N_P", c.N_P, "pairs_per_pulse"),
        ("f_dark", c.f_dark, "dark_count_rate"),
        ("sigma_h", c.sigma_h, "hba_cross_section"),
        ("extra_enhancement", c.extra_enhancement, "extra_enhancement"),
    )
    for key, value, name in nonneg:
        if not (math.isfinite(value) and value >= 0.0):
            _fail(key, value, f"{name} must be finite and >= 0")
    for key, value, name in (
        ("T_e_min", c.T_e_min, "fourier_limited_entanglement_time"),
        ("tau", c.tau, "fluorescence_lifetime"),
    ):
        if value is not None and not (math.isfinite(value) and value > 0):
            _fail(key, value, f"{name} must be a finite positive number")
    if c.pump_mode not in (PULSED, CONTINUOUS_WAVE):
        _fail("pump_mode", c.pump_mode, "pump_mode must be 'pulsed' or 'continuous_wave'")
    if c.pump_mode == CONTINUOUS_WAVE and abs(c.f_rep * c.T - 1.0) > 1e-12:
        _fail(
            "f_rep",
            c.f_rep,
            "continuous_wave pumps require f_rep = 1/T (coherence-time convention)",
        )
    if c.reference is not None and c.reference.eta is not None:
        if not 0.0 < c.reference.eta <= 1.0:
            _fail("eta", c.reference.eta, "attenuation value out of (0,1]")


def _exact_inverse(t: float) -> float:
    """The float closest to 1/t whose product with t rounds to exactly 1."""
    f = 1.0 / t
    if f * t == 1.0:
        return f
    for cand in (math.nextafter(f, math.inf), math.nextafter(f, 0.0)):
        if cand * t == 1.0:
            return cand
    return f


def evolve(config: ExperimentConfig, **changes) -> ExperimentConfig:
    """Copy a config with fields replaced, keeping the CW pump convention.

    Changing ``T`` on a continuous-wave config re-derives ``f_rep`` unless a
    new repetition rate is supplied explicitly.
    """
    if (
        config.pump_mode == CONTINUOUS_WAVE
        and "T" in changes
        and "f_rep" not in changes
        and changes.get("pump_mode", CONTINUOUS_WAVE) == CONTINUOUS_WAVE
    ):
        changes["f_rep"] = _exact_inverse(changes["T"])
    return replace(config, **changes)


_LINE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")
_NUMBER_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(\S*)$")


def _parse_numeric(key: str, raw: str) -> tuple[float, str]:
    m = _NUMBER_RE.match(raw)
    if not m:
        raise ConfigError(f"unparsable number (key '{key}' = {raw!r})")
    text, unit = m.group(1), m.group(2)
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"unparsable number (key '{key}' = {raw!r})") from None
    dim, _ = _NUMERIC_KEYS[key]
    if unit not in _UNITS:
        raise ConfigError(f"unknown unit '{unit}' (key '{key}')")
    unit_dim, factor = _UNITS[unit]
    if unit_dim != dim:
        raise ConfigError(f"unit '{unit}' invalid for key '{key}' (expected {dim})")
    return value * factor, text


def parse_config(text: str) -> ExperimentConfig:
    """Parse a ``key = value unit`` document into an ExperimentConfig.

    Lines are independent; ``#`` starts a comment.  Every key must be known,
    appear at most once, and carry a unit of the right dimension.  For
    continuous-wave pumps ``f_rep`` may be omitted and is set to ``1/T``.
    """
    values: dict[str, float] = {}
    raw_strings: dict[str, str] = {}
    texts: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise ConfigError(f"malformed line {lineno}: {line.strip()!r}")
        key, raw = m.group(1), m.group(2)
        if key in texts or key in values:
            raise ConfigError(f"duplicate key '{key}' (line {lineno})")
        if key in _TEXT_KEYS:
            texts[key] = raw.strip()
        elif key in _NUMERIC_KEYS:
            values[key], raw_strings[key] = _parse_numeric(key, raw)
        else:
            raise ConfigError(f"unknown key '{key}' (line {lineno})")

    if "pump_mode" not in texts:
        raise ConfigError("missing key 'pump_mode'")
    pump_mode = texts["pump_mode"]
    if pump_mode not in (PULSED, CONTINUOUS_WAVE):
        _fail("pump_mode", pump_mode, "pump_mode must be 'pulsed' or 'continuous_wave'")

    for key, (_, required) in _NUMERIC_KEYS.items():
        if required and key not in values:
            raise ConfigError(f"missing key '{key}'")

    if "f_rep" not in values:
        if pump_mode == PULSED:
            raise ConfigError("missing key 'f_rep' (required for pulsed pumps)")
        values["f_rep"] = _exact_inverse(values["T"])
    elif pump_mode == CONTINUOUS_WAVE:
        if abs(values["f_rep"] * values["T"] - 1.0) > 1e-6:
            _fail(
                "f_rep",
                values["f_rep"],
                "continuous_wave pumps require f_rep = 1/T (coherence-time convention)",
            )
        values["f_rep"] = _exact_inverse(values["T"])

    ref = ReferenceInfo(
        eta=values.get("eta"),
        sigma_att_gm=values.get("sigma_c_att"),
        sigma_split_gm=values.get("sigma_c_split"),
        target_gm=values.get("sigma_c_target"),
        sigma_att_str=raw_strings.get("sigma_c_att"),
        sigma_split_str=raw_strings.get("sigma_c_split"),
    )
    return ExperimentConfig(
        label=texts.get("label", "unnamed"),
        T_int=values["T_int"],
        eta_s=values["eta_s"],
        eta_i=values["eta_i"],
        eta_d=values["eta_d"],
        A=values["A"],
        T=values["T"],
        A_e=values["A_e"],
        T_e=values["T_e"],
        N_P=values["N_P"],
        f_rep=values["f_rep"],
        f_dark=values["f_dark"],
        sigma_h=values["sigma_h"],
        N_t_raw=values["N_t"],
        pump_mode=pump_mode,
        n_sigma=values.get("n_sigma", 1.0),
        T_e_min=values.get("T_e_min"),
        tau=values.get("tau"),
        extra_enhancement=values.get("extra_enhancement", 1.0),
        reference=ref if ref.any_set() else None,
    )


def load_config(path) -> ExperimentConfig:
    """Read and parse a config file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def to_text(config: ExperimentConfig) -> str:
    """Serialize a config in internal units; re-parsing is value-exact."""
    lines = [
        f"label = {config.label}",
        f"pump_mode = {config.pump_mode}",
        f"T_int = {config.T_int!r} s",
        f"eta_s = {config.eta_s!r}",
        f"eta_i = {config.eta_i!r}",
        f"eta_d = {config.eta_d!r}",
        f"A = {config.A!r} cm2",
        f"T = {config.T!r} s",
        f"A_e = {config.A_e!r} cm2",
        f"T_e = {config.T_e!r} s",
        f"N_P = {config.N_P!r}",
        f"f_rep = {config.f_rep!r} Hz",
        f"f_dark = {config.f_dark!r} Hz",
        f"sigma_h = {config.sigma_h!r} cm2",
        f"N_t = {config.N_t_raw!r} mol",
        f"n_sigma = {config.n_sigma!r}",
        f"extra_enhancement = {config.extra_enhancement!r}",
    ]
    if config.T_e_min is not None:
        lines.append(f"T_e_min = {config.T_e_min!r} s")
    if config.tau is not None:
        lines.append(f"tau = {config.tau!r} s")
    ref = config.reference
    if ref is not None:
        if ref.eta is not None:
            lines.append(f"eta = {ref.eta!r}")
        if ref.sigma_att_gm is not None:
            lines.append(f"sigma_c_att = {ref.sigma_att_gm!r} GM")
        if ref.sigma_split_gm is not None:
            lines.append(f"sigma_c_split = {ref.sigma_split_gm!r} GM")
        if ref.target_gm is not None:
            lines.append(f"sigma_c_target = {ref.target_gm!r} GM")
    return "\n".join(lines) + "\n"


def _builtin_text(name: str) -> str:
    return resources.files("etpasens").joinpath(f"data/{name}.cfg").read_text("utf-8")


def builtin_table() -> list[ExperimentConfig]:
    """The seven bundled experiment configurations, in publication order."""
    return [parse_config(_builtin_text(name)) for name in _BUILTIN_ORDER]


def builtin(label: str) -> ExperimentConfig:
    """Look up one bundled configuration by label or file name.

    Matching ignores case and treats ``-``/``_`` as spaces, so ``"Boulder FS"``,
    ``"boulder_fs"`` and ``"BOULDER-FS"`` are all accepted.
    """
    wanted = label.strip().lower().replace("-", " ").replace("_", " ")
    for name in _BUILTIN_ORDER:
        cfg = parse_config(_builtin_text(name))
        if wanted in (name.replace("_", " "), cfg.label.lower()):
            return cfg
    known = ", ".join(_BUILTIN_ORDER)
    raise ConfigError(f"no builtin config matches {label!r} (known: {known})")
