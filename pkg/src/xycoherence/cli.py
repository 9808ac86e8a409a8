"""Command-line front end.

Examples::

    xycoherence scan --gamma 0.5 --T 0 --measure lqc-x --target pair --lambda 0.8:1.4:0.001 -o scan.csv
    xycoherence point --gamma 1 --T 0 --lambda 1
    xycoherence estimate-cp --gamma 0.5 --T 0.05 --measure lqc-x-lower --target single --lambda 0.8:1.2:0.001
    xycoherence estimate-fp --gamma 0.5 --T 0.01 --measure lqc-x --lambda 1.05:1.3:0.001
    xycoherence oracle-check --gamma 1 --T 0.2 --lambda 0.5

Exit status is 0 on success, 1 on invalid input and 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys

from . import __version__
from .correlators import INFINITE, MAX_DISTANCE, ModelParams, QuadratureError, correlator_set
from .critical import EstimationError, estimate_cp, estimate_fp
from .hermitian import EigenError
from .measures import MeasureError, MeasureKind, Target, evaluate, lqu
from .oracle import FiniteChainSpec, brute_force_lqu, finite_chain_correlators
from .states import StateError, single_spin_state, two_spin_state
from .sweep import SweepError, SweepGrid, detect_features, sweep

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
NUMERICAL_ERRORS = (QuadratureError, EigenError, EstimationError, SweepError, MeasureError, StateError)

ALL_MEASURES = {
    Target.SINGLE_SPIN: ["lqc-x", "lqc-y", "lqc-z", "lqc-x-lower", "lqc-y-lower", "lqc-z-lower"],
    Target.TWO_SPIN: ["lqc-x", "lqc-y", "lqc-z", "lqc-x-lower", "lqc-y-lower", "lqc-z-lower", "lqu"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; 2 is reserved for numerical failure here
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return "%.17g" % x


def _number(flag: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{flag} expects a number, got {text!r}") from None


def _temperature(text: str) -> float:
    T = _number("--T", text)
    if not (math.isfinite(T) and T >= 0):
        raise UsageError(f"--T must be a finite temperature >= 0, got {text!r}")
    return T


def _gamma(text: str) -> float:
    g = _number("--gamma", text)
    if not 0 < g <= 1:
        raise UsageError(f"--gamma must lie in (0, 1], got {text!r}")
    return g


def _grid(text: str) -> SweepGrid:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--lambda expects start:stop:step, got {text!r}")
    try:
        a, b, h = map(float, parts)
    except ValueError:
        raise UsageError(f"--lambda has a non-numeric field in {text!r}") from None
    if not h > 0:
        raise UsageError(f"--lambda step must be positive, got {parts[2]!r}")
    try:
        return SweepGrid(a, b, h)
    except ValueError as exc:
        raise UsageError(f"--lambda: {exc}") from None


def _single_lambda(text: str) -> float:
    lam = _number("--lambda", text)
    if not (math.isfinite(lam) and lam >= 0):
        raise UsageError(f"--lambda must be finite and >= 0, got {text!r}")
    return lam


def _measure(name: str, target: str) -> MeasureKind:
    try:
        return MeasureKind.parse(name, target)
    except ValueError as exc:
        raise UsageError(f"--measure: {exc}") from None


def _beta(T: float) -> float:
    return INFINITE if T == 0 else 1.0 / T


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="xycoherence", description="Local quantum coherence of the anisotropic XY chain.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, lambda_help, measure=True):
        p.add_argument("--gamma", required=True, help="anisotropy in (0, 1]")
        p.add_argument("--T", required=True, help="temperature; 0 selects the exact ground state")
        p.add_argument("--lambda", dest="lam", required=True, help=lambda_help)
        p.add_argument("--r", type=int, default=1, help="spin separation (default 1)")
        if measure:
            p.add_argument("--measure", required=True, help="lqu, lqc-<x|y|z> or lqc-<x|y|z>-lower")
            p.add_argument("--target", choices=[t.value for t in Target], default=Target.TWO_SPIN.value)
        p.add_argument("-o", "--output", help="output file (default stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")

    p = sub.add_parser("scan", help="sweep a measure over lambda")
    common(p, lambda_help="start:stop:step")
    p.add_argument("--features", action="store_true",
                   help="also run a half-step sweep and report divergences, jumps and direction switches")
    p = sub.add_parser("estimate-cp", help="critical point at T > 0")
    common(p, lambda_help="search window start:stop:step")
    p = sub.add_parser("estimate-fp", help="factorization point at T > 0")
    common(p, lambda_help="search window start:stop:step")
    p = sub.add_parser("point", help="everything at one (lambda, gamma, T)")
    common(p, lambda_help="a single value", measure=False)
    p = sub.add_parser("oracle-check", help="compare against exact diagonalization and brute-force LQU")
    common(p, lambda_help="a single value", measure=False)
    p.add_argument("--sites", type=int, default=10, help="ring size for exact diagonalization (default 10)")
    return ap


def _unknown_flags(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    # argparse reports missing required flags before unrecognized ones; a typo
    # in a flag name is the more useful message
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    known = set(parser._option_string_actions)
    for token in argv:
        if token in subparsers.choices:
            known |= set(subparsers.choices[token]._option_string_actions)
            break
    unknown = []
    for token in argv:
        if token.startswith("-") and not _is_number(token) and token.split("=", 1)[0] not in known:
            unknown.append(token)
    return unknown


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _config(args, **resolved) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("output", "verbose", "workers")}
    cfg.update(resolved)
    return cfg


def _header(cfg: dict) -> str:
    return f"# xycoherence {__version__} config={json.dumps(cfg, sort_keys=True)}\n"


def _dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _check_common(args):
    gamma = _gamma(args.gamma)
    T = _temperature(args.T)
    if not 1 <= args.r <= MAX_DISTANCE:
        raise UsageError(f"--r must be in [1, {MAX_DISTANCE}], got {args.r}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    return gamma, T


def _feature_lines(report) -> list[str]:
    lines = [f"# divergence lambda={_fmt(d.lam)} growth={_fmt(d.growth_ratio)}" for d in report.divergences]
    lines += [f"# jump lambda={_fmt(j.lam)} size={_fmt(j.jump_size)}" for j in report.jumps]
    lines += [f"# direction_switch lambda={_fmt(s.lam)} {s.from_axis}->{s.to_axis}"
              for s in report.direction_switches]
    return lines


def cmd_scan(args) -> str:
    gamma, T = _check_common(args)
    grid = _grid(args.lam)
    kind = _measure(args.measure, args.target)
    beta = _beta(T)
    series = sweep(kind, grid, gamma, beta, r=args.r, workers=args.workers)
    cfg = _config(args, gamma=gamma, T=T, measure=kind.label, window=[grid.lambda_min, grid.lambda_max],
                  step=grid.step)
    report = None
    if args.features:
        refined = sweep(kind, grid.refined(), gamma, beta, r=args.r, workers=args.workers)
        report = detect_features(series, refined)
    cols = zip(series.lambdas, series.values, series.d1, series.d2)
    if args.format == "json":
        out = {"config": cfg, "version": __version__,
               "rows": [[float(v) for v in row] for row in cols]}
        if report is not None:
            out["features"] = {
                "divergences": [[d.lam, d.growth_ratio] for d in report.divergences],
                "jumps": [[j.lam, j.jump_size] for j in report.jumps],
                "direction_switches": [[s.lam, s.from_axis, s.to_axis] for s in report.direction_switches],
            }
        return _dump_json(out)
    buf = io.StringIO()
    buf.write(_header(cfg))
    if report is not None:
        buf.writelines(line + "\n" for line in _feature_lines(report))
    buf.write("lambda,value,d1,d2\n")
    for row in cols:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _estimate(args, which: str) -> str:
    gamma, T = _check_common(args)
    if T == 0:
        raise UsageError("--T must be positive for estimation")
    grid = _grid(args.lam)
    kind = _measure(args.measure, args.target)
    if args.r != 1:
        raise UsageError("--r: estimators use nearest neighbours only")
    try:
        fn = estimate_cp if which == "CP" else estimate_fp
        res = fn(kind, gamma, T, grid, workers=args.workers)
    except ValueError as exc:
        if isinstance(exc, NUMERICAL_ERRORS):
            raise
        raise UsageError(f"--lambda/--measure: {exc}") from None
    window = [grid.lambda_min, grid.lambda_max]
    return _dump_json({
        "lambda_hat": res.lambda_hat,
        "temperature": res.temperature,
        "kind": res.kind,
        "measure": kind.label,
        "window": window,
        "step": grid.step,
        "config": _config(args, gamma=gamma, T=T, measure=kind.label, window=window, step=grid.step),
        "version": __version__,
    })


def _point_data(lam: float, gamma: float, T: float, r: int) -> dict:
    c = correlator_set(ModelParams(lam=lam, gamma=gamma, beta=_beta(T), r=r))
    rho_a, rho_ab = single_spin_state(c), two_spin_state(c)
    measures = {}
    for target, names in ALL_MEASURES.items():
        for name in names:
            kind = MeasureKind.parse(name, target)
            value, direction = evaluate(kind, c)
            measures[kind.label] = value
            if direction is not None:
                measures[kind.label + " direction"] = [float(x) for x in direction]
    return {
        "m": c.m, "cxx": c.cxx, "cyy": c.cyy, "czz": c.czz,
        "single_spin_eigenvalues": [float(x) for x in rho_a.eigenvalues],
        "two_spin_eigenvalues": [float(x) for x in rho_ab.eigenvalues],
        "measures": measures,
    }


def cmd_point(args) -> str:
    gamma, T = _check_common(args)
    lam = _single_lambda(args.lam)
    data = _point_data(lam, gamma, T, args.r)
    if args.format == "json":
        data["config"] = _config(args, gamma=gamma, T=T, lam=lam)
        data["version"] = __version__
        return _dump_json(data)
    lines = [_header(_config(args, gamma=gamma, T=T, lam=lam)).rstrip("\n")]
    for key in ("m", "cxx", "cyy", "czz"):
        lines.append(f"{key} = {_fmt(data[key])}")
    lines.append("single-spin eigenvalues = " + " ".join(_fmt(x) for x in data["single_spin_eigenvalues"]))
    lines.append("two-spin eigenvalues = " + " ".join(_fmt(x) for x in data["two_spin_eigenvalues"]))
    for key, value in data["measures"].items():
        text = " ".join(_fmt(x) for x in value) if isinstance(value, list) else _fmt(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def cmd_oracle_check(args) -> str:
    gamma, T = _check_common(args)
    if T == 0:
        raise UsageError("--T must be positive: the finite chain needs a finite beta")
    lam = _single_lambda(args.lam)
    params = ModelParams(lam=lam, gamma=gamma, beta=1.0 / T, r=args.r)
    try:
        spec = FiniteChainSpec(n_sites=args.sites, params=params)
    except ValueError as exc:
        raise UsageError(f"--sites: {exc}") from None
    exact = finite_chain_correlators(spec)
    limit = correlator_set(params)
    deviations = {k: abs(getattr(exact, k) - getattr(limit, k)) for k in ("m", "cxx", "cyy", "czz")}
    rho = two_spin_state(limit)
    closed = lqu(rho).value
    brute, _ = brute_force_lqu(rho)
    report = {
        "correlator_deviation": deviations,
        "max_correlator_deviation": max(deviations.values()),
        "lqu_closed_form": closed,
        "lqu_brute_force": brute,
        "lqu_deviation": abs(closed - brute),
        "sites": args.sites,
    }
    if args.format == "json":
        report["config"] = _config(args, gamma=gamma, T=T, lam=lam)
        report["version"] = __version__
        return _dump_json(report)
    lines = [_header(_config(args, gamma=gamma, T=T, lam=lam)).rstrip("\n")]
    lines += [f"|d{k}| = {_fmt(v)}" for k, v in deviations.items()]
    lines.append(f"max correlator deviation = {_fmt(report['max_correlator_deviation'])}")
    lines.append(f"lqu closed form = {_fmt(closed)}  brute force = {_fmt(brute)}  "
                 f"deviation = {_fmt(report['lqu_deviation'])}")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "scan": cmd_scan,
    "estimate-cp": lambda a: _estimate(a, "CP"),
    "estimate-fp": lambda a: _estimate(a, "FP"),
    "point": cmd_point,
    "oracle-check": cmd_oracle_check,
}


def run(argv: list[str] | None = None, stdout=None) -> int:
    """Parse ``argv``, run the command and return the exit status."""
    stdout = stdout or sys.stdout
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser = build_parser()
        unknown = _unknown_flags(parser, argv)
        if unknown:
            raise UsageError(f"unrecognized arguments: {' '.join(unknown)}")
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.format is None:
            args.format = "json" if args.command.startswith("estimate") else "csv"
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"xycoherence: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        print(f"xycoherence: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"xycoherence: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    # written once, after everything has been computed
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    raise SystemExit(main())
