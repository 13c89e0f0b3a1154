"""Figure renderers: method comparison over pair flux, improvement ladder.

Output is SVG by default, written deterministically (fixed hash salt, no
date metadata) so identical inputs give byte-identical images.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .csvdata import FigureDataError, as_float, read_rows

_STEP_COLORS = {
    "baseline": "black",
    "best_method": "tab:blue",
    "time_gating": "gold",
    "fourier_limit": "tab:green",
    "zero_dark": "tab:red",
}


@dataclass(frozen=True)
class RenderSummary:
    output: str
    curves: int
    markers: int
    rows_used: int


def _save(fig, output: str) -> None:
    plt.rcParams["svg.hashsalt"] = "etpasens-figs"
    fig.savefig(output, metadata={"Date": None})
    plt.close(fig)


def render_method_comparison(
    sweep_csv: str,
    output: str,
    markers_csv: str | None = None,
    target_gm: float | None = None,
) -> RenderSummary:
    """Log-log sensitivity curves per measurement variant over the swept
    parameter, an optional shaded detectable region below the target, and
    optional published-experiment markers."""
    rows = read_rows(sweep_csv, ("parameter", "value", "variant", "sigma_c_gm"))
    if target_gm is not None and target_gm <= 0:
        raise FigureDataError(f"target must be positive, got {target_gm}")

    curves: dict[str, tuple[list[float], list[float]]] = {}
    for row in rows:
        xs, ys = curves.setdefault(row["variant"], ([], []))
        xs.append(as_float(row, "value", sweep_csv))
        ys.append(as_float(row, "sigma_c_gm", sweep_csv))

    marker_rows = []
    if markers_csv is not None:
        marker_rows = read_rows(markers_csv, ("label", "n_p", "computed_att_gm"))

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for variant in sorted(curves):
        xs, ys = curves[variant]
        ax.loglog(xs, ys, label=variant)
    for row in marker_rows:
        ax.plot(
            as_float(row, "n_p", markers_csv),
            as_float(row, "computed_att_gm", markers_csv),
            "k*",
            markersize=10,
        )
        ax.annotate(
            row["label"],
            (as_float(row, "n_p", markers_csv), as_float(row, "computed_att_gm", markers_csv)),
            textcoords="offset points",
            xytext=(4, 4),
            fontsize=7,
        )
    if target_gm is not None:
        ax.axhspan(ax.get_ylim()[0], target_gm, color="tab:green", alpha=0.15)
        ax.axhline(target_gm, color="tab:green", linewidth=0.8)

    parameter = rows[0]["parameter"]
    ax.set_xlabel(f"{parameter}")
    ax.set_ylabel("minimum detectable cross-section [GM]")
    ax.legend(fontsize=8)
    ax.set_title("measurement scheme comparison")
    fig.tight_layout()
    _save(fig, output)
    return RenderSummary(
        output=output,
        curves=len(curves),
        markers=len(marker_rows),
        rows_used=len(rows) + len(marker_rows),
    )


def render_ladder(ladder_csv: str, output: str) -> RenderSummary:
    """Per-experiment marker columns for each improvement step, with the
    per-experiment target band shaded."""
    rows = read_rows(
        ladder_csv, ("label", "step", "kind", "applied", "bound_gm", "target_gm")
    )
    labels: list[str] = []
    for row in rows:
        if row["label"] not in labels:
            labels.append(row["label"])
    position = {label: i for i, label in enumerate(labels)}

    fig, ax = plt.subplots(figsize=(1.4 + 1.1 * len(labels), 5.0))
    ax.set_yscale("log")
    markers = 0
    seen_kinds: set[str] = set()
    y_min = min(as_float(r, "bound_gm", ladder_csv) for r in rows)
    y_min = min(y_min, min(as_float(r, "target_gm", ladder_csv) for r in rows)) / 10
    for row in rows:
        x = position[row["label"]]
        y = as_float(row, "bound_gm", ladder_csv)
        kind = row["kind"]
        applied = row["applied"] == "true"
        ax.plot(
            x,
            y,
            marker="o",
            markerfacecolor=_STEP_COLORS.get(kind, "gray") if applied else "none",
            markeredgecolor=_STEP_COLORS.get(kind, "gray"),
            linestyle="none",
            markersize=9,
            label=kind if kind not in seen_kinds else None,
        )
        seen_kinds.add(kind)
        markers += 1
    for label in labels:
        target = next(
            as_float(r, "target_gm", ladder_csv) for r in rows if r["label"] == label
        )
        x = position[label]
        ax.fill_between(
            [x - 0.35, x + 0.35], [y_min, y_min], [target, target],
            color="tab:green", alpha=0.15,
        )
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.set_xlim(-0.6, len(labels) - 0.4)
    ax.set_ylabel("minimum detectable cross-section [GM]")
    ax.set_title("improvement ladder (shaded: detection target)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, output)
    return RenderSummary(
        output=output, curves=len(labels), markers=markers, rows_used=len(rows)
    )
