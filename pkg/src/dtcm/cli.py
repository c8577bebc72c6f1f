"""Command-line front end emitting CSV/JSON tables.

Commands

  prob    symbolic monomial and numeric value of one state-to-state transition
  dist    exact distribution with approximation overlays, per coupling
  mean    boson-yield sweep over a grid of squared couplings
  sweep   alias of mean (same code path, same output)
  oracle  integrated dynamics vs exact probabilities at small size
  figure  named parameter presets routed through dist/mean

Outputs are deterministic for fixed flags: floats are printed with their
shortest round-trip representation, metadata records the flags and package
version only.  Exit codes: 0 success, 2 flag or domain error, 3 numerical
failure in the oracle.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import asymptotics, exact, oracle

FLOAT_NA = ""


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _parse_spin(value: str) -> int:
    """Total spin S as decimal ('7.5') or fraction ('15/2'); returns 2S."""
    two_s = 2 * Fraction(value)
    if two_s.denominator != 1 or two_s <= 0:
        raise argparse.ArgumentTypeError(f"total spin must be a positive half-integer, got {value}")
    return int(two_s)


def _parse_g_list(value: str) -> list:
    try:
        gs = [float(v) for v in value.split(",") if v != ""]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad coupling list {value!r}") from err
    if not gs or any(g < 0 for g in gs):
        raise argparse.ArgumentTypeError(f"couplings must be >= 0, got {value!r}")
    return gs


def _parse_grid(value: str) -> list:
    """Inclusive a:b:step grid of squared couplings."""
    parts = value.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:step, got {value!r}")
    a, b, step = (float(p) for p in parts)
    if step <= 0 or b < a or a < 0:
        raise argparse.ArgumentTypeError(f"grid must be increasing with positive step, got {value!r}")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(count)]


def _parse_t_schedule(value: str) -> list:
    ts = [float(v) for v in value.split(",") if v != ""]
    if not ts or any(b <= a for a, b in zip(ts, ts[1:])) or ts[0] <= 0:
        raise argparse.ArgumentTypeError(f"window schedule must be positive increasing, got {value!r}")
    return ts


def _parse_epsilons(value: str) -> list:
    try:
        eps = [float(v) for v in value.split(",") if v != ""]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad splitting list {value!r}") from err
    if not eps or any(b >= a for a, b in zip(eps, eps[1:])):
        raise argparse.ArgumentTypeError(f"splittings must be strictly decreasing, got {value!r}")
    return eps


def _jsonable(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _meta_line(args, command: str) -> str:
    skip = {"func", "out", "format"}
    entries = [f"command={command}"]
    for key in sorted(vars(args)):
        if key in skip or key == "command":
            continue
        value = getattr(args, key)
        if value is None:
            continue
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        entries.append(f"{key}={value}")
    return f"# dtcm v{__version__} " + " ".join(entries)


def _emit(args, command, header, rows, footer_comments=(), meta_extra=None):
    """Write one table as CSV (with # metadata/footer comments) or JSON."""
    if args.format == "csv":
        lines = [_meta_line(args, command), ",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        lines.extend(footer_comments)
        text = "\n".join(lines) + "\n"
    else:
        meta = {"tool": "dtcm", "version": __version__, "command": command}
        for key in sorted(vars(args)):
            if key in ("func", "out", "format", "command"):
                continue
            value = getattr(args, key)
            if value is not None:
                meta[key] = value
        if meta_extra:
            meta.update(meta_extra)
        payload = {
            "meta": meta,
            "rows": [
                {h: (None if isinstance(v, str) and v == FLOAT_NA else _jsonable(v)) for h, v in zip(header, row)}
                for row in rows
            ],
        }
        text = json.dumps(payload, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


def _model(args, g: float) -> exact.ModelParams:
    return exact.ModelParams(g=g, nb=args.nb, ns=args.ns)


# ---------------------------------------------------------------------------
# prob
# ---------------------------------------------------------------------------


def cmd_prob(args) -> int:
    initial = exact.SpinConfig.from_string(args.i)
    final = exact.SpinConfig.from_string(args.f)
    params = _model(args, args.g)
    monomial = exact.transition_monomial(initial, final, params)
    value = monomial.value(params)
    if args.format == "json":
        text = json.dumps(
            {
                "meta": {"tool": "dtcm", "version": __version__, "command": "prob"},
                "monomial": str(monomial),
                "value": value,
            },
            indent=2,
        ) + "\n"
    else:
        text = f"{monomial} = {_fmt(value)}\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


# ---------------------------------------------------------------------------
# dist
# ---------------------------------------------------------------------------


def _approximation_columns(params, process):
    """Per-nu approximation values; empty strings where out of domain."""
    two_s = params.two_s
    blank = [FLOAT_NA] * (two_s + 1)
    continuous = gaussian = largeg = blank
    if params.nb != 0 or params.g == 0.0:
        return continuous, gaussian, largeg
    nu = np.arange(two_s + 1, dtype=float)
    if process == "forward":
        continuous = list(asymptotics.forward_continuous_curve(params).grid())
        gaussian = list(asymptotics.forward_gaussian(params).density(nu))
        largeg = list(asymptotics.forward_largeg_euler(params).probabilities())
    else:
        try:
            continuous = list(asymptotics.inverse_continuous_curve(params).grid())
        except ValueError:
            continuous = blank
        gaussian = list(asymptotics.inverse_gaussian(params).density(nu))
        largeg = [asymptotics.inverse_largeg(params, int(v)) for v in range(two_s + 1)]
    return continuous, gaussian, largeg


def cmd_dist(args) -> int:
    header = ["g", "nu", "exact", "continuous", "gaussian", "largeg"]
    rows = []
    footers = []
    sums_meta = []
    for g in args.g:
        params = _model(args, g)
        dist = (
            exact.forward_distribution(params)
            if args.process == "forward"
            else exact.inverse_distribution(params)
        )
        exact_vals = dist.probabilities()
        continuous, gaussian, largeg = _approximation_columns(params, args.process)
        for nu in range(params.two_s + 1):
            rows.append([g, nu, exact_vals[nu], continuous[nu], gaussian[nu], largeg[nu]])
        sums = {"g": g, "exact": float(np.sum(exact_vals))}
        for name, col in (("continuous", continuous), ("gaussian", gaussian), ("largeg", largeg)):
            numeric = [v for v in col if v != FLOAT_NA]
            sums[name] = float(np.sum(numeric)) if numeric else None
        sums_meta.append(sums)
        parts = [f"{k}={_fmt(v)}" for k, v in sums.items() if k != "g" and v is not None]
        footers.append(f"# sums g={_fmt(g)}: " + " ".join(parts))
    _emit(args, "dist", header, rows, footers, {"sums": sums_meta})
    return 0


# ---------------------------------------------------------------------------
# mean / sweep
# ---------------------------------------------------------------------------


def cmd_mean(args) -> int:
    forward = args.process == "forward"
    header = ["g2", "g", "nb_exact"]
    if forward:
        header += ["nb_euler", "nb_itin", "nb_altland"]
    else:
        header += ["nb_gaussian", "nb_linear"]
    rows = []
    for g2 in args.g2_grid:
        g = math.sqrt(g2)
        params = _model(args, g)
        dist = exact.forward_distribution(params) if forward else exact.inverse_distribution(params)
        row = [g2, g, dist.mean()]
        if params.nb != 0 or g == 0.0:
            row += [FLOAT_NA] * (3 if forward else 2)
        elif forward:
            row += [
                asymptotics.forward_largeg_mean(params),
                asymptotics.comparison_itin_forward(params),
                asymptotics.comparison_altland_forward(params),
            ]
        else:
            row += [
                asymptotics.inverse_gaussian(params).mean,
                asymptotics.comparison_inverse_linear(params),
            ]
        rows.append(row)
    _emit(args, "mean", header, rows)
    return 0


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def cmd_oracle(args) -> int:
    params = _model(args, args.g)
    epsilons = args.epsilons if args.epsilons else None
    basis = oracle.SectorBasis.for_params(params, epsilons)
    initial = (
        exact.SpinConfig.from_string(args.i) if args.i else exact.SpinConfig.all_up(args.ns)
    )
    config = oracle.EvolutionConfig.symmetric(args.t_schedule[0], rtol=args.tol)
    report = oracle.converge_window(basis, params, initial, args.t_schedule, config)
    exact_probs = {
        conf.bits: exact.transition_probability(initial, conf, params) for conf in basis.states
    }
    header = (
        ["final", "nu", "exact"]
        + [f"p_T{t:g}" for t in report.t_values]
        + ["richardson", "best", "abs_error"]
    )
    rows = []
    for j, conf in enumerate(basis.states):
        ex = exact_probs[conf.bits]
        best = report.best[j]
        rows.append(
            [str(conf), conf.nu, ex]
            + [report.table[i][j] for i in range(len(report.t_values))]
            + [report.richardson[j], best, abs(best - ex)]
        )
    footer = [f"# converged={report.converged}"]
    _emit(args, "oracle", header, rows, footer, {"converged": report.converged})
    return 0


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

FIGURE_PRESETS = {
    # distribution overlays
    "forward-dist-small": dict(kind="dist", process="forward", s="15/2", g="0.1,0.2,0.3"),
    "forward-dist-large": dict(kind="dist", process="forward", s="75", g="0.05,0.1,0.2"),
    "inverse-dist-moderate": dict(kind="dist", process="inverse", s="200", g="0.05,0.1"),
    "inverse-dist-strong": dict(kind="dist", process="inverse", s="200", g="0.15,0.2,0.3"),
    # boson-yield sweeps
    "forward-mean-sweep": dict(kind="mean", process="forward", s="200", g2_grid="0.0:1.0:0.01"),
    "inverse-mean-sweep": dict(kind="mean", process="inverse", s="200", g2_grid="0.0:1.0:0.01"),
}


def cmd_figure(args) -> int:
    preset = FIGURE_PRESETS[args.name]
    forwarded = argparse.Namespace(
        ns=_parse_spin(preset["s"]),
        nb=0,
        process=preset["process"],
        out=args.out,
        format=args.format,
    )
    if preset["kind"] == "dist":
        forwarded.g = _parse_g_list(preset["g"])
        return cmd_dist(forwarded)
    forwarded.g2_grid = _parse_grid(preset["g2_grid"])
    return cmd_mean(forwarded)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(parser, need_g=True):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--ns", type=int, help="number of spins (2S)")
    group.add_argument("--s", type=_parse_spin, dest="ns_from_s", metavar="S",
                       help="total spin S (decimal or fraction), sets ns = 2S")
    parser.add_argument("--nb", type=int, default=0, help="bosons in the all-up state")
    if need_g:
        parser.add_argument("--g", type=float, required=True, help="spin-boson coupling")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtcm",
        description="Transition probabilities of a linearly chirped spin-boson sweep",
    )
    parser.add_argument("--version", action="version", version=f"dtcm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="one state-to-state transition")
    _add_common(p)
    p.add_argument("--i", required=True, help="initial spin bit-string, leftmost = largest splitting")
    p.add_argument("--f", required=True, help="final spin bit-string")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("dist", help="polarized-state distribution with overlays")
    _add_common(p, need_g=False)
    p.add_argument("--g", type=_parse_g_list, required=True,
                   help="coupling or comma-separated list of couplings")
    p.add_argument("--process", choices=("forward", "inverse"), required=True)
    p.set_defaults(func=cmd_dist)

    for name in ("mean", "sweep"):
        p = sub.add_parser(name, help="boson-yield sweep over squared couplings")
        _add_common(p, need_g=False)
        p.add_argument("--g2-grid", dest="g2_grid", type=_parse_grid, required=True,
                       metavar="A:B:STEP", help="inclusive grid of g**2 values")
        p.add_argument("--process", choices=("forward", "inverse"), required=True)
        p.set_defaults(func=cmd_mean)

    p = sub.add_parser("oracle", help="integrated dynamics vs exact probabilities")
    _add_common(p)
    p.add_argument("--i", default=None, help="initial bit-string (default all up)")
    p.add_argument("--T-schedule", dest="t_schedule", type=_parse_t_schedule, default=[25.0, 50.0],
                   metavar="T1,T2,...", help="increasing half-window schedule")
    p.add_argument("--epsilons", type=_parse_epsilons, default=None,
                   help="comma-separated level splittings, decreasing")
    p.add_argument("--tol", type=float, default=3e-11, help="integrator relative tolerance")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("figure", help="named dataset presets (single code path with dist/mean)")
    p.add_argument("--name", required=True, choices=sorted(FIGURE_PRESETS))
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "ns_from_s", None) is not None:
        args.ns = args.ns_from_s
    if hasattr(args, "ns_from_s"):
        del args.ns_from_s
    try:
        return args.func(args)
    except oracle.OracleIntegrationError as err:
        print(f"dtcm: numerical failure: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"dtcm: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
