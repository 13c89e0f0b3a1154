"""Command-line surface: sensitivity reports, table reproduction, parameter
sweeps, optimizations, improvement ladders and Monte-Carlo runs.

Every command emits a row-oriented report in one of three formats (human,
csv, json-lines); CSV always carries a header row and numbers keep at least
twelve significant digits so downstream plotting loses nothing.  Exit codes:
0 success, 1 input error, 2 computation error, 3 tolerance failure (table).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from ._kernels import KernelError
from .config import (
    ConfigError,
    ExperimentConfig,
    builtin,
    builtin_table,
    evolve,
    load_config,
)
from .gating import GateModel, GatingError, optimize_gate
from .ladder import LadderError, run_ladder
from .montecarlo import detection_curve, simulate
from .schemes import ATTENUATION, PROBABILISTIC, SEPARATION
from .sensitivity import SolverError, evaluate, optimize_eta, solve_bound_numeric
from .tables import DEFAULT_TOLERANCE, table_report

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_COMPUTE = 2
EXIT_TOLERANCE = 3

_FORMATS = ("human", "csv", "json-lines")

# numeric config fields a sweep may vary
_SWEEPABLE = (
    "T_int",
    "eta_s",
    "eta_i",
    "eta_d",
    "A",
    "T",
    "A_e",
    "T_e",
    "T_e_min",
    "N_P",
    "f_rep",
    "f_dark",
    "sigma_h",
    "N_t_raw",
    "n_sigma",
    "tau",
    "extra_enhancement",
)


class CliInputError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _emit(args, columns: list[str], rows: list[dict], human: str) -> None:
    if args.format == "human":
        text = human
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
        text = buf.getvalue()
    else:  # json-lines
        text = "".join(
            json.dumps({c: row.get(c) for c in columns}, allow_nan=True) + "\n"
            for row in rows
        )
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> ExperimentConfig:
    if getattr(args, "builtin", None):
        return builtin(args.builtin)
    return load_config(args.config)


def _parse_scheme(token: str) -> tuple[str, float | None, str]:
    """'separation' | 'probabilistic' | 'attenuation[:eta|:opt]' -> (scheme, eta, variant)."""
    name, _, arg = token.partition(":")
    if name in (SEPARATION, PROBABILISTIC):
        if arg:
            raise CliInputError(f"scheme {name!r} takes no argument (got {token!r})")
        return name, None, name
    if name == ATTENUATION:
        if not arg:
            return name, None, name
        if arg == "opt":
            return name, "opt", f"{name}:opt"
        try:
            eta = float(arg)
        except ValueError:
            raise CliInputError(f"bad attenuation value in {token!r}") from None
        return name, eta, f"{name}:{arg}"
    raise CliInputError(
        f"unknown scheme {token!r} (expected separation, probabilistic or attenuation[:eta|:opt])"
    )


def _resolve_eta(config: ExperimentConfig, scheme: str, eta) -> float | None:
    """Pick the attenuation value: explicit, 'opt', config reference, or optimum."""
    if scheme != ATTENUATION:
        return None
    if eta == "opt" or eta is None:
        if eta is None and config.reference and config.reference.eta:
            return config.reference.eta
        return optimize_eta(config).eta_opt
    return float(eta)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_sensitivity(args) -> int:
    config = _load(args)
    tokens = args.scheme or [SEPARATION, ATTENUATION, PROBABILISTIC]
    columns = [
        "label",
        "scheme",
        "eta",
        "sigma_c_gm",
        "dominant_noise",
        "target_gm",
        "meets_target",
    ]
    rows = []
    lines = []
    for token in tokens:
        scheme, eta, variant = _parse_scheme(token)
        if scheme == ATTENUATION and eta is None and args.eta is not None:
            eta = args.eta
        eta = _resolve_eta(config, scheme, eta)
        result = evaluate(config, scheme, eta)
        rows.append(
            {
                "label": config.label,
                "scheme": variant,
                "eta": eta,
                "sigma_c_gm": result.sigma_c_gm,
                "dominant_noise": result.dominant_noise,
                "target_gm": result.target_gm,
                "meets_target": result.meets_target,
            }
        )
        eta_txt = f" (eta={eta:.4g})" if eta is not None else ""
        target_txt = ""
        if result.target_gm is not None:
            verdict = "meets" if result.meets_target else "misses"
            target_txt = f"  [{verdict} target {result.target_gm:g} GM]"
        lines.append(
            f"{config.label}: {variant}{eta_txt}: sigma_c >= {result.sigma_c_gm:.4g} GM"
            f"  noise={result.dominant_noise}{target_txt}"
        )
    _emit(args, columns, rows, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_table(args) -> int:
    rows_data = table_report(tolerance=args.tolerance)
    columns = [
        "label",
        "n_p",
        "eta",
        "computed_att_gm",
        "published_att_gm",
        "deviation_att",
        "consistent_att",
        "computed_split_gm",
        "published_split_gm",
        "deviation_split",
        "consistent_split",
        "target_gm",
    ]
    rows = [vars(r).copy() for r in rows_data]
    width = max(len(r.label) for r in rows_data)
    lines = [
        f"{'experiment':{width}s}  {'att comp':>11s} {'att pub':>9s} {'dev':>6s}"
        f"  {'split comp':>11s} {'split pub':>9s} {'dev':>6s}"
    ]
    failed = False
    for r in rows_data:
        flags = ""
        if not (r.consistent_att and r.consistent_split):
            failed = True
            flags = "  <-- outside tolerance"
        lines.append(
            f"{r.label:{width}s}  {r.computed_att_gm:11.4g} {r.published_att_gm:9.3g}"
            f" {r.deviation_att:6.1%}  {r.computed_split_gm:11.4g}"
            f" {r.published_split_gm:9.3g} {r.deviation_split:6.1%}{flags}"
        )
    _emit(args, columns, rows, "\n".join(lines) + "\n")
    if failed:
        print(
            f"table reproduction outside tolerance {args.tolerance:.2%}",
            file=sys.stderr,
        )
        return EXIT_TOLERANCE
    return EXIT_OK


def _sweep_values(args) -> list[float]:
    if args.values:
        try:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise CliInputError(f"bad --values list {args.values!r}") from None
        if not values:
            raise CliInputError("--values is empty")
        return values
    if args.from_ is None or args.to is None:
        raise CliInputError("sweep needs --values or both --from and --to")
    if args.points < 2:
        raise CliInputError("log ranges need --points >= 2")
    if args.from_ <= 0 or args.to <= 0:
        raise CliInputError("log ranges need positive endpoints")
    lo, hi = math.log(args.from_), math.log(args.to)
    return [math.exp(lo + (hi - lo) * i / (args.points - 1)) for i in range(args.points)]


def _cmd_sweep(args) -> int:
    config = _load(args)
    if args.parameter not in _SWEEPABLE:
        raise CliInputError(
            f"unknown sweep parameter {args.parameter!r} (numeric fields: {', '.join(_SWEEPABLE)})"
        )
    values = _sweep_values(args)
    tokens = args.scheme or [SEPARATION]
    specs = [_parse_scheme(t) for t in tokens]

    def evaluate_point(value: float) -> list[dict]:
        cfg = evolve(config, **{args.parameter: value})
        out = []
        for scheme, eta, variant in specs:
            eta_used = _resolve_eta(cfg, scheme, eta)
            result = evaluate(cfg, scheme, eta_used)
            out.append(
                {
                    "parameter": args.parameter,
                    "value": value,
                    "scheme": scheme,
                    "variant": variant,
                    "eta": eta_used,
                    "sigma_c_gm": result.sigma_c_gm,
                }
            )
        return out

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        rows = [row for batch in pool.map(evaluate_point, values) for row in batch]
    columns = ["parameter", "value", "scheme", "variant", "eta", "sigma_c_gm"]
    lines = [
        f"{r['parameter']} = {r['value']:.6g}: {r['variant']}: {r['sigma_c_gm']:.6g} GM"
        for r in rows
    ]
    _emit(args, columns, rows, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_ladder(args) -> int:
    configs: list[ExperimentConfig] = []
    for path in args.config or []:
        configs.append(load_config(path))
    for name in args.builtin or []:
        if name.lower() == "all":
            configs.extend(builtin_table())
        else:
            configs.append(builtin(name))
    if not configs:
        raise CliInputError("ladder needs --config or --builtin")
    columns = [
        "label",
        "step",
        "kind",
        "applied",
        "bound_gm",
        "target_gm",
        "meets_target",
        "notes",
    ]
    rows = []
    lines = []
    for cfg in configs:
        steps = run_ladder(cfg, tau=args.tau)
        target = cfg.target_gm
        lines.append(f"{cfg.label} (target {target:g} GM):" if target else f"{cfg.label}:")
        for i, step in enumerate(steps):
            rows.append(
                {
                    "label": cfg.label,
                    "step": i,
                    "kind": step.kind,
                    "applied": step.applied,
                    "bound_gm": step.bound_gm,
                    "target_gm": target,
                    "meets_target": step.meets_target,
                    "notes": step.notes,
                }
            )
            mark = ""
            if step.meets_target is not None:
                mark = "  meets target" if step.meets_target else ""
            skip = "" if step.applied else "  (not applied)"
            lines.append(
                f"  {step.kind:14s} {step.bound_gm:12.5g} GM{mark}{skip}  {step.notes}"
            )
    _emit(args, columns, rows, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_optimize(args) -> int:
    config = _load(args)
    if args.what == "eta":
        opt = optimize_eta(config)
        from .sensitivity import classify_noise

        noise = classify_noise(config, min(opt.eta_opt, 1.0 - 1e-9))
        columns = ["label", "eta_opt", "sigma_c_gm", "at_lower_clip", "dominant_noise"]
        rows = [
            {
                "label": config.label,
                "eta_opt": opt.eta_opt,
                "sigma_c_gm": opt.sigma_c_gm,
                "at_lower_clip": opt.at_lower_clip,
                "dominant_noise": noise,
            }
        ]
        clip = "  (at lower clip: eta_opt -> 0 regime)" if opt.at_lower_clip else ""
        human = (
            f"{config.label}: eta_opt = {opt.eta_opt:.6g} -> sigma_c >= "
            f"{opt.sigma_c_gm:.6g} GM  noise={noise}{clip}\n"
        )
        _emit(args, columns, rows, human)
        return EXIT_OK

    scheme, eta, _ = _parse_scheme(args.scheme or SEPARATION)
    eta = _resolve_eta(config, scheme, eta)
    gate = GateModel(1.0, args.tau) if args.tau else None
    opt = optimize_gate(config, gate=gate, scheme=scheme, eta=eta)
    columns = ["label", "scheme", "g_opt", "sigma_c_gm", "tau_s", "tau_assumed"]
    rows = [
        {
            "label": config.label,
            "scheme": scheme,
            "g_opt": opt.g_opt,
            "sigma_c_gm": opt.sigma_c_gm,
            "tau_s": opt.tau,
            "tau_assumed": opt.tau_assumed,
        }
    ]
    assumed = "  (assumed default lifetime)" if opt.tau_assumed else ""
    human = (
        f"{config.label}: gate width g_opt = {opt.g_opt:.6g} -> sigma_c >= "
        f"{opt.sigma_c_gm:.6g} GM  tau={opt.tau:g} s{assumed}\n"
    )
    _emit(args, columns, rows, human)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = _load(args)
    scheme, eta, variant = _parse_scheme(args.scheme)
    eta = _resolve_eta(config, scheme, eta)
    if args.grid:
        try:
            lo_s, hi_s, pts_s = args.grid.split(",")
            lo, hi, pts = float(lo_s), float(hi_s), int(pts_s)
        except ValueError:
            raise CliInputError(f"bad --grid {args.grid!r} (expected LO,HI,POINTS)") from None
        if pts < 2 or lo <= 0 or hi <= lo:
            raise CliInputError("--grid needs 0 < LO < HI and POINTS >= 2")
        grid = [
            math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * i / (pts - 1))
            for i in range(pts)
        ]
        points = detection_curve(config, scheme, grid, args.trials, args.seed, eta=eta)
        columns = ["label", "scheme", "eta", "sigma_c_gm", "trials", "seed", "detect_fraction"]
        rows = [
            {
                "label": config.label,
                "scheme": variant,
                "eta": eta,
                "sigma_c_gm": p.sigma_c_gm,
                "trials": args.trials,
                "seed": args.seed,
                "detect_fraction": p.detect_fraction,
            }
            for p in points
        ]
        human = "\n".join(
            f"sigma_c = {p.sigma_c_gm:.6g} GM: detected in {p.detect_fraction:.4f} of trials"
            for p in points
        )
        _emit(args, columns, rows, human + "\n")
        return EXIT_OK

    report = simulate(config, scheme, args.sigma_c, args.trials, args.seed, eta=eta)
    columns = [
        "label",
        "scheme",
        "eta",
        "sigma_c_gm",
        "trials",
        "seed",
        "analytic_s",
        "analytic_b",
        "mean_s",
        "mean_b",
        "detect_fraction",
    ]
    rows = [
        {
            "label": config.label,
            "scheme": variant,
            "eta": eta,
            "sigma_c_gm": args.sigma_c,
            "trials": report.trials,
            "seed": report.seed,
            "analytic_s": report.analytic_s,
            "analytic_b": report.analytic_b,
            "mean_s": report.mean_s,
            "mean_b": report.mean_b,
            "detect_fraction": report.detect_fraction,
        }
    ]
    human = (
        f"{config.label}: {variant} at sigma_c = {args.sigma_c:g} GM, "
        f"{report.trials} trials (seed {report.seed}):\n"
        f"  signal     mean {report.mean_s:.6g}  (expected {report.analytic_s:.6g})\n"
        f"  background mean {report.mean_b:.6g}  (expected {report.analytic_b:.6g})\n"
        f"  detected in {report.detect_fraction:.4f} of trials\n"
    )
    _emit(args, columns, rows, human)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_config_arg(p: argparse.ArgumentParser, repeatable: bool = False) -> None:
    if repeatable:
        p.add_argument("--config", action="append", help="config file path (repeatable)")
        p.add_argument(
            "--builtin",
            action="append",
            help="bundled config by label, or 'all' (repeatable)",
        )
    else:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--config", help="config file path")
        group.add_argument("--builtin", help="bundled config by label")


def _add_io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=_FORMATS, default="human")
    p.add_argument("--output", help="write the report here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etpasens",
        description="Sensitivity modeling for entangled two-photon absorption measurements.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sensitivity", help="minimum detectable cross-section per scheme")
    _add_config_arg(p)
    p.add_argument(
        "--scheme",
        action="append",
        help="separation | probabilistic | attenuation[:eta|:opt] (repeatable; default all)",
    )
    p.add_argument("--eta", type=float, help="attenuation value for bare 'attenuation'")
    _add_io_args(p)
    p.set_defaults(func=_cmd_sensitivity)

    p = sub.add_parser("table", help="computed vs published sensitivity table")
    p.add_argument(
        "--tolerance",
        type=float,
        default=DEFAULT_TOLERANCE,
        help="relative tolerance per cell (default 0.15)",
    )
    _add_io_args(p)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("sweep", help="bound vs one config parameter, per scheme")
    _add_config_arg(p)
    p.add_argument("--parameter", required=True, help="numeric config field to vary")
    p.add_argument("--values", help="explicit comma-separated values")
    p.add_argument("--from", dest="from_", type=float, help="log-range start")
    p.add_argument("--to", type=float, help="log-range end")
    p.add_argument("--points", type=int, default=50, help="log-range points (default 50)")
    p.add_argument(
        "--scheme",
        action="append",
        help="scheme token as in 'sensitivity' (repeatable; default separation)",
    )
    p.add_argument("--jobs", type=int, default=4, help="parallel evaluations (default 4)")
    _add_io_args(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ladder", help="improvement ladder per experiment")
    _add_config_arg(p, repeatable=True)
    p.add_argument("--tau", type=float, help="fluorescence lifetime override [s]")
    _add_io_args(p)
    p.set_defaults(func=_cmd_ladder)

    p = sub.add_parser("optimize", help="optimize attenuation value or gate width")
    p.add_argument("what", choices=("eta", "gate"))
    _add_config_arg(p)
    p.add_argument("--scheme", help="scheme for gate optimization (default separation)")
    p.add_argument("--tau", type=float, help="fluorescence lifetime [s] for gating")
    _add_io_args(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("simulate", help="Poisson Monte-Carlo of the detection criterion")
    _add_config_arg(p)
    p.add_argument("--scheme", default=SEPARATION, help="scheme token as in 'sensitivity'")
    p.add_argument("--sigma-c", type=float, default=0.0, help="cross-section [GM]")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", help="LO,HI,POINTS: detection curve over a log grid [GM]")
    _add_io_args(p)
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, GatingError, KernelError, LadderError, OverflowError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
