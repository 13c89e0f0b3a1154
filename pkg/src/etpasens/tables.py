"""Reproduction of the published sensitivity table from the bundled configs.

The published cross-sections carry one or two significant figures, so a cell
counts as consistent when the computed value is within the tolerance of the
published one, or when it rounds to the published figure at the published
precision (which is the only fair test against a one-significant-figure
entry).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ExperimentConfig, builtin_table
from .sensitivity import bound_attenuation, bound_separation

DEFAULT_TOLERANCE = 0.15


def sigfigs_of(number_text: str) -> int:
    """Significant figures of a decimal literal like '3.2e3', '318' or '79'."""
    mantissa = number_text.strip().split("e")[0].split("E")[0].lstrip("+-")
    digits = mantissa.replace(".", "")
    if "." in mantissa:
        digits = digits.lstrip("0")
        return max(len(digits), 1)
    return max(len(digits.lstrip("0").rstrip("0")), 1)


def round_sigfigs(value: float, figures: int) -> float:
    """Round to ``figures`` significant figures."""
    if value == 0.0 or not math.isfinite(value):
        return value
    exponent = math.floor(math.log10(abs(value)))
    return round(value, figures - 1 - exponent)


def cell_consistent(
    computed: float, published: float, published_text: str | None, tolerance: float
) -> bool:
    """Whether a computed value reproduces a published one.

    Within ``tolerance`` relative, or equal after rounding the computed value
    to the published precision.
    """
    if abs(computed - published) <= tolerance * abs(published):
        return True
    if published_text is None:
        return False
    return round_sigfigs(computed, sigfigs_of(published_text)) == published


@dataclass(frozen=True)
class TableRow:
    label: str
    n_p: float
    eta: float
    computed_att_gm: float
    published_att_gm: float
    deviation_att: float
    consistent_att: bool
    computed_split_gm: float
    published_split_gm: float
    deviation_split: float
    consistent_split: bool
    target_gm: float | None


def table_report(
    configs: list[ExperimentConfig] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[TableRow]:
    """Computed vs published bounds for every config carrying reference data."""
    rows = []
    for cfg in configs if configs is not None else builtin_table():
        ref = cfg.reference
        if ref is None or ref.eta is None or ref.sigma_att_gm is None:
            continue
        att = bound_attenuation(cfg, ref.eta)
        split = bound_separation(cfg)
        rows.append(
            TableRow(
                label=cfg.label,
                n_p=cfg.N_P,
                eta=ref.eta,
                computed_att_gm=att,
                published_att_gm=ref.sigma_att_gm,
                deviation_att=abs(att - ref.sigma_att_gm) / ref.sigma_att_gm,
                consistent_att=cell_consistent(
                    att, ref.sigma_att_gm, ref.sigma_att_str, tolerance
                ),
                computed_split_gm=split,
                published_split_gm=ref.sigma_split_gm,
                deviation_split=abs(split - ref.sigma_split_gm) / ref.sigma_split_gm,
                consistent_split=cell_consistent(
                    split, ref.sigma_split_gm, ref.sigma_split_str, tolerance
                ),
                target_gm=ref.target_gm,
            )
        )
    return rows
