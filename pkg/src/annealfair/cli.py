"""Command-line interface.

Subcommands: gen, info, solve, sweep, scale, ingest, plot. Exit codes:
0 success, 1 usage error, 2 input data error, 3 numerical failure.
All randomness is seed-controlled, and outputs are identical across
reruns and across --threads values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .dynamics import AnnealRun, DynamicsError, evolve, ground_state_probabilities
from .fairness import DEFAULT_VALIDITY_THRESHOLD, FairnessRecord
from .generator import GenSpec, GenerationExhausted, emit_instances
from .ingest import SampleFormatError, degauge, empirical_fairness, parse_samples
from .model import GbpInstance, autoscale, compose_lambda, compose_mu, encode_constraint, encode_objective
from .oracle import analyze
from .pipeline import (
    DEFAULT_LAMBDA_GRID,
    DEFAULT_MU_PLUS_GRID,
    DEFAULT_SCALING_T,
    DEFAULT_TIME_GRID,
    SweepPlan,
    emit_scaling_outputs,
    emit_sweep_outputs,
    run_scaling,
    run_sweep,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(ValueError):
    pass


def _default_out_root() -> Path:
    return Path(os.environ.get("ANNEAL_FAIR_OUT", "out"))


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="base RNG seed")
    sub.add_argument("--threads", type=int, default=0, help="worker cap (0 = all cores)")
    sub.add_argument("--out", type=Path, default=None, help="output directory")
    sub.add_argument("--format", choices=("csv", "json"), default="csv", help="stdout format")
    sub.add_argument("--rel-tol", type=float, default=1e-8, help="integrator relative tolerance")
    sub.add_argument("--abs-tol", type=float, default=1e-10, help="integrator absolute tolerance")
    sub.add_argument(
        "--validity-threshold",
        type=float,
        default=DEFAULT_VALIDITY_THRESHOLD,
        help="ground-state probability treated as effectively 1",
    )
    sub.add_argument("--errors-json", action="store_true", help="machine-parsable errors on stderr")
    sub.add_argument("--no-autoscale", action="store_true", help="skip range normalization")


def _load_instance(path) -> GbpInstance:
    try:
        return GbpInstance.load(path)
    except FileNotFoundError:
        raise
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot parse instance file {path}: {exc}") from exc


def _plan_from_args(args, control_kind, control_grid, t_grid) -> SweepPlan:
    return SweepPlan(
        control_kind=control_kind,
        control_grid=tuple(sorted(control_grid)),
        t_grid=tuple(sorted(t_grid)),
        use_autoscale=not args.no_autoscale,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        validity_threshold=args.validity_threshold,
        threads=args.threads,
    )


def cmd_gen(args) -> int:
    if args.n <= 0 or args.n % 2 != 0:
        raise UsageError(f"vertex count must be a positive even integer, got {args.n}")
    spec = GenSpec(
        n=args.n,
        edge_prob=args.edge_prob,
        weight_range=(args.weight_lo, args.weight_hi if args.weight_hi else args.n),
        target_flip_classes=args.flip_classes,
        seed=args.seed,
        max_attempts=args.max_attempts,
    )
    outdir = args.out or (_default_out_root() / "instances")
    paths = emit_instances(spec, args.count, outdir)
    for p in paths:
        print(p)
    print(outdir / "manifest.csv")
    return EXIT_OK


def cmd_info(args) -> int:
    inst = _load_instance(args.instance)
    report = analyze(inst)
    print(json.dumps(report.to_json(), sort_keys=True, indent=2))
    return EXIT_OK


def cmd_solve(args) -> int:
    if (args.lam is None) == (args.mu_plus is None):
        raise UsageError("exactly one of --lambda or --mu-plus is required")
    inst = _load_instance(args.instance)
    report = analyze(inst)
    obj, cons = encode_objective(inst), encode_constraint(inst.n)
    if args.lam is not None:
        kind, control = "lambda", args.lam
        model = compose_lambda(obj, cons, control)
    else:
        kind, control = "mu_plus", args.mu_plus
        model = compose_mu(obj, cons, report.mu_threshold + control)
    if not args.no_autoscale:
        model, _ = autoscale(model)
    state = evolve(model, AnnealRun(T=args.T, rel_tol=args.rel_tol, abs_tol=args.abs_tol))
    _, p_per_state = ground_state_probabilities(state, report.optimal_configs)
    record = FairnessRecord.from_probabilities(
        kind, control, args.T, p_per_state, args.validity_threshold
    )
    if args.dump_state:
        payload = [[float(a.real), float(a.imag)] for a in state.amplitudes]
        Path(args.dump_state).write_text(json.dumps(payload) + "\n")
    if args.format == "json":
        print(json.dumps(record.to_json(), sort_keys=True))
    else:
        print(FairnessRecord.csv_header(report.degeneracy))
        print(record.to_csv_row())
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.lambdas is not None and args.mu_plus is not None:
        raise UsageError("choose one of --lambdas or --mu-plus")
    inst = _load_instance(args.instance)
    report = analyze(inst)
    if args.mu_plus is not None:
        plan = _plan_from_args(args, "mu_plus", args.mu_plus, args.times or DEFAULT_TIME_GRID)
    else:
        plan = _plan_from_args(
            args, "lambda", args.lambdas or DEFAULT_LAMBDA_GRID, args.times or (DEFAULT_SCALING_T,)
        )
    records = run_sweep(inst, plan, report)
    outdir = args.out or (_default_out_root() / "sweep")
    files = emit_sweep_outputs(outdir, inst, report, plan, records)
    for name in sorted(files):
        print(files[name])
    return EXIT_OK


def cmd_scale(args) -> int:
    if any(n <= 0 or n % 2 for n in args.Ns):
        raise UsageError("every N must be a positive even integer")
    plan = _plan_from_args(args, "lambda", args.lambdas or DEFAULT_LAMBDA_GRID, (args.T,))
    result = run_scaling(args.Ns, args.count, plan, seed=args.seed)
    outdir = args.out or (_default_out_root() / "scale")
    files = emit_scaling_outputs(outdir, plan, result, seed=args.seed)
    sys.stdout.write((outdir / "scaling.md").read_text())
    for name in sorted(files):
        print(files[name], file=sys.stderr)
    return EXIT_OK


def cmd_ingest(args) -> int:
    samples = parse_samples(args.samples, format=args.samples_format)
    if not args.keep_gauge:
        samples = degauge(samples)
    inst = _load_instance(args.instance)
    result = empirical_fairness(samples, inst)
    text = json.dumps(result.to_json(), sort_keys=True, indent=2)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n")
        print(args.out)
    else:
        print(text)
    return EXIT_OK


def cmd_plot(args) -> int:
    from . import plots
    from .pipeline import read_records_csv

    groups = read_records_csv(args.records)
    outdir = args.out or (_default_out_root() / "plots")
    outdir.mkdir(parents=True, exist_ok=True)
    kinds = {rec.control_kind for recs in groups.values() for rec in recs}
    label = "λ" if kinds == {"lambda"} else "μ+"
    written = [plots.plot_entropy_vs_control(groups, outdir / "entropy_vs_control.svg", label)]
    t_values = {rec.T for recs in groups.values() for rec in recs}
    if len(t_values) > 1:
        flat = [rec for recs in groups.values() for rec in recs]
        written.append(plots.plot_time_sweep(flat, outdir / "pgs_entropy_vs_time.svg", label))
    for p in written:
        print(p)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="annealfair", description=__doc__)
    parser.add_argument("--version", action="version", version=f"annealfair {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="generate degeneracy-filtered random instances")
    p.add_argument("-n", type=int, required=True, help="vertex count (even)")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--weight-lo", type=int, default=1)
    p.add_argument("--weight-hi", type=int, default=0, help="0 means n")
    p.add_argument("--flip-classes", type=int, default=2, help="ground-state pairs (2 = D of 4)")
    p.add_argument("--max-attempts", type=int, default=1_000_000)
    _common_flags(p)
    p.set_defaults(fn=cmd_gen)

    p = subs.add_parser("info", help="oracle report for an instance file")
    p.add_argument("instance", type=Path)
    _common_flags(p)
    p.set_defaults(fn=cmd_info)

    p = subs.add_parser("solve", help="one anneal, one fairness record")
    p.add_argument("instance", type=Path)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--mu-plus", dest="mu_plus", type=float, default=None)
    p.add_argument("-T", type=float, default=DEFAULT_SCALING_T, help="anneal time")
    p.add_argument("--dump-state", type=Path, default=None, help="debug: write final amplitudes")
    _common_flags(p)
    p.set_defaults(fn=cmd_solve)

    p = subs.add_parser("sweep", help="sweep the penalty control and anneal time")
    p.add_argument("instance", type=Path)
    p.add_argument("--lambdas", type=_float_list, default=None)
    p.add_argument("--mu-plus", dest="mu_plus", type=_float_list, default=None)
    p.add_argument("--times", type=_float_list, default=None)
    _common_flags(p)
    p.set_defaults(fn=cmd_sweep)

    p = subs.add_parser("scale", help="multi-size scaling analysis")
    p.add_argument("--Ns", type=_int_list, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--lambdas", type=_float_list, default=None)
    p.add_argument("-T", type=float, default=DEFAULT_SCALING_T)
    _common_flags(p)
    p.set_defaults(fn=cmd_scale)

    p = subs.add_parser("ingest", help="classify external samples against an instance")
    p.add_argument("samples", type=Path)
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--samples-format", choices=("csv", "json"), default=None)
    p.add_argument("--keep-gauge", action="store_true", help="do not undo batch gauges")
    _common_flags(p)
    p.set_defaults(fn=cmd_ingest)

    p = subs.add_parser("plot", help="render SVG charts from an existing records CSV")
    p.add_argument("--records", type=Path, required=True)
    _common_flags(p)
    p.set_defaults(fn=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        _report(args, "usage", exc)
        return EXIT_USAGE
    except (FileNotFoundError, SampleFormatError, ValueError, KeyError) as exc:
        _report(args, "input", exc)
        return EXIT_DATA
    except (DynamicsError, GenerationExhausted, RuntimeError) as exc:
        _report(args, "numerical", exc)
        return EXIT_NUMERICAL


def _report(args, kind: str, exc: Exception) -> None:
    if getattr(args, "errors_json", False):
        doc = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
        print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    else:
        print(f"annealfair: {kind} error: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
