"""Experiment orchestration: penalty sweeps, time sweeps, scaling runs.

Work is a flat task list over (instance, control, T) indices executed on a
thread pool (the integrator kernel releases the GIL); results land in a
pre-sized table by index, so output never depends on worker count or
completion order. All run outputs (CSV, JSON manifest, SVG plots) are
byte-stable across reruns with the same plan and seed.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .dynamics import AnnealRun, DynamicsError, evolve, ground_state_probabilities
from .fairness import (
    DEFAULT_MONOTONE_SLACK,
    DEFAULT_VALIDITY_THRESHOLD,
    FairnessRecord,
    monotone_nondecreasing,
    monotonic_increase_rate,
)
from .generator import GenSpec, generate_filtered, stream_seed
from .model import (
    DEFAULT_H_RANGE,
    DEFAULT_J_RANGE,
    GbpInstance,
    autoscale,
    compose_lambda,
    compose_mu,
    encode_constraint,
    encode_objective,
)
from .oracle import OracleReport, analyze

DEFAULT_LAMBDA_GRID = tuple(i / 10 for i in range(11))
DEFAULT_MU_PLUS_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_TIME_GRID = (1e2, 1e3, 1e4)
DEFAULT_SCALING_T = 1e5


@dataclass(frozen=True)
class SweepPlan:
    """Grids and knobs for one experiment."""

    control_kind: str = "lambda"
    control_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    t_grid: tuple[float, ...] = (DEFAULT_SCALING_T,)
    use_autoscale: bool = True
    h_range: tuple[float, float] = DEFAULT_H_RANGE
    j_range: tuple[float, float] = DEFAULT_J_RANGE
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD
    monotone_slack: float = DEFAULT_MONOTONE_SLACK
    threads: int = 0  # 0 means use available parallelism

    def __post_init__(self):
        if self.control_kind not in ("lambda", "mu_plus"):
            raise ValueError(f"unknown control kind {self.control_kind!r}")
        if not self.control_grid or not self.t_grid:
            raise ValueError("control and T grids must be nonempty")
        if list(self.control_grid) != sorted(self.control_grid):
            raise ValueError("control grid must be sorted ascending")
        if list(self.t_grid) != sorted(self.t_grid):
            raise ValueError("T grid must be sorted ascending")
        if self.control_kind == "lambda":
            if any(not 0.0 <= v <= 1.0 for v in self.control_grid):
                raise ValueError("lambda grid must lie in [0, 1]")
        elif any(v < 0.0 for v in self.control_grid):
            raise ValueError("mu_plus grid must be nonnegative")
        if any(t <= 0 for t in self.t_grid):
            raise ValueError("anneal times must be positive")

    def worker_count(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def to_json(self) -> dict:
        return {
            "control_kind": self.control_kind,
            "control_grid": list(self.control_grid),
            "t_grid": list(self.t_grid),
            "use_autoscale": self.use_autoscale,
            "h_range": list(self.h_range),
            "j_range": list(self.j_range),
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "validity_threshold": self.validity_threshold,
            "monotone_slack": self.monotone_slack,
        }


def _composed_model(inst: GbpInstance, report: OracleReport, plan: SweepPlan, control: float):
    obj = encode_objective(inst)
    cons = encode_constraint(inst.n)
    if plan.control_kind == "lambda":
        model = compose_lambda(obj, cons, control)
    else:
        model = compose_mu(obj, cons, report.mu_threshold + control)
    if plan.use_autoscale:
        model, _ = autoscale(model, plan.h_range, plan.j_range)
    return model


def _one_point(inst, report, plan, control, T) -> FairnessRecord:
    model = _composed_model(inst, report, plan, control)
    run = AnnealRun(T=T, rel_tol=plan.rel_tol, abs_tol=plan.abs_tol)
    try:
        state = evolve(model, run)
    except DynamicsError:
        return FairnessRecord.failed(plan.control_kind, control, T, report.degeneracy)
    _, p_per_state = ground_state_probabilities(state, report.optimal_configs)
    return FairnessRecord.from_probabilities(
        plan.control_kind, control, T, p_per_state, plan.validity_threshold
    )


def _parallel_table(tasks, fn, threads: int):
    """Evaluate fn over tasks, returning results in task order."""
    if threads <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def _cache_key(inst: GbpInstance, plan: SweepPlan) -> str:
    import hashlib

    blob = json.dumps(
        {"schema": "records-v1", "version": __version__, "plan": plan.to_json(),
         "instance": inst.fingerprint()},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def run_sweep(
    inst: GbpInstance,
    plan: SweepPlan,
    report: OracleReport | None = None,
    cache_dir=None,
) -> list[FairnessRecord]:
    """All (control, T) grid points for one instance, ordered by (control, T).

    A point whose evolution fails is recorded as an invalid NaN record
    rather than aborting the sweep. With cache_dir set, finished sweeps
    are stored keyed by (plan, instance, version) and reloaded on rerun,
    making long multi-instance experiments resumable; determinism makes a
    cache hit indistinguishable from recomputation.
    """
    if report is None:
        report = analyze(inst)
    cache_path = None
    if cache_dir is not None:
        cache_path = Path(cache_dir) / f"{_cache_key(inst, plan)}.json"
        if cache_path.exists():
            doc = json.loads(cache_path.read_text())
            return [FairnessRecord.from_json(r) for r in doc["records"]]
    tasks = [(inst, report, plan, c, t) for c in plan.control_grid for t in plan.t_grid]
    records = _parallel_table(tasks, _one_point, plan.worker_count())
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        doc = {"instance": inst.to_json(), "records": [r.to_json() for r in records]}
        tmp = cache_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True))
        tmp.replace(cache_path)
    return records


def run_lambda_sweep(inst: GbpInstance, plan: SweepPlan, report=None) -> list[FairnessRecord]:
    if plan.control_kind != "lambda":
        raise ValueError("plan does not use the lambda parameterization")
    return run_sweep(inst, plan, report)


def run_mu_time_sweep(inst: GbpInstance, plan: SweepPlan, report=None) -> list[FairnessRecord]:
    """Full (mu_plus, T) grid; the control value 0 runs exactly at the
    oracle threshold, where the tightest infeasible state still ties."""
    if plan.control_kind != "mu_plus":
        raise ValueError("plan does not use the mu_plus parameterization")
    return run_sweep(inst, plan, report)


@dataclass(frozen=True)
class InstanceResult:
    """One instance inside a scaling run; flag None means indeterminate."""

    n: int
    index: int
    seed: int
    fingerprint: str
    degeneracy: int
    records: tuple[FairnessRecord, ...]
    n_valid: int
    monotone: bool | None


@dataclass(frozen=True)
class ScalingRow:
    n: int
    count: int
    indeterminate: int
    rate: float


@dataclass(frozen=True)
class ScalingResult:
    rows: tuple[ScalingRow, ...]
    instances: tuple[InstanceResult, ...]


def _classify_instance(records, plan) -> tuple[int, bool | None]:
    if any(r.p_gs != r.p_gs for r in records):  # NaN marks a failed point
        return 0, None
    valid = [r for r in records if r.valid]
    if not valid:
        return 0, None
    flag = monotone_nondecreasing([r.entropy for r in valid], plan.monotone_slack)
    return len(valid), flag


def run_scaling(
    Ns, count: int, plan: SweepPlan, seed: int = 0, cache_dir=None, progress=None
) -> ScalingResult:
    """Generate `count` degeneracy-filtered instances per N and sweep each.

    Instances for size N come from the split stream stream_seed(seed, N),
    then instance k within that size splits again by k, so any subset of
    the work can be reproduced independently. Instances whose sweep had a
    failed point, or no valid point at all, are excluded from the rate as
    indeterminate (with a count in the output).
    """
    rows = []
    all_instances = []
    for n in Ns:
        gen = GenSpec(n=n, seed=stream_seed(seed, n))
        flags = []
        indeterminate = 0
        for k in range(count):
            sub = replace(gen, seed=stream_seed(gen.seed, k))
            inst, report, _ = generate_filtered(sub)
            records = run_sweep(inst, plan, report, cache_dir=cache_dir)
            if progress is not None:
                progress(n, k, count)
            n_valid, flag = _classify_instance(records, plan)
            if flag is None:
                indeterminate += 1
            else:
                flags.append(flag)
            all_instances.append(
                InstanceResult(
                    n=n,
                    index=k,
                    seed=sub.seed,
                    fingerprint=inst.fingerprint(),
                    degeneracy=report.degeneracy,
                    records=tuple(records),
                    n_valid=n_valid,
                    monotone=flag,
                )
            )
        rate = monotonic_increase_rate(flags) if flags else float("nan")
        rows.append(ScalingRow(n=n, count=count, indeterminate=indeterminate, rate=rate))
    return ScalingResult(rows=tuple(rows), instances=tuple(all_instances))


def write_records_csv(path, records, degeneracy: int, prefix_cols=None) -> None:
    """Fixed-schema CSV; optional leading columns identify the instance."""
    prefix_cols = prefix_cols or []
    lines = []
    header = FairnessRecord.csv_header(degeneracy)
    if prefix_cols:
        header = ",".join(name for name, _ in prefix_cols[0]) + "," + header
    lines.append(header)
    for i, rec in enumerate(records):
        row = rec.to_csv_row()
        if prefix_cols:
            row = ",".join(str(v) for _, v in prefix_cols[i]) + "," + row
        lines.append(row)
    Path(path).write_text("\n".join(lines) + "\n")


def write_empty_records_csv(path) -> None:
    Path(path).write_text(FairnessRecord.csv_header(0) + "\n")


def read_records_csv(path) -> dict[tuple, list[FairnessRecord]]:
    """Inverse of write_records_csv, grouped by any leading id columns."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path} is empty")
    header = lines[0].split(",")
    try:
        start = header.index("control_kind")
    except ValueError as exc:
        raise ValueError(f"{path} lacks the fixed record schema") from exc
    groups: dict[tuple, list[FairnessRecord]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) < start + 6:
            raise ValueError(f"{path} line {lineno}: truncated row")
        key = tuple(cells[:start])
        rec = FairnessRecord(
            control_kind=cells[start],
            control=float(cells[start + 1]),
            T=float(cells[start + 2]),
            p_gs=float(cells[start + 3]),
            entropy=float(cells[start + 4]),
            valid=cells[start + 5] == "true",
            p_per_state=tuple(float(v) for v in cells[start + 6 :]),
        )
        groups.setdefault(key, []).append(rec)
    return groups


def write_manifest(path, plan: SweepPlan, **extra) -> None:
    doc = {"software": "annealfair", "version": __version__, "plan": plan.to_json()}
    doc.update(extra)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def scaling_markdown(result: ScalingResult) -> str:
    lines = [
        "| N | instances | indeterminate | monotonic increase rate |",
        "|---|-----------|---------------|-------------------------|",
    ]
    for row in result.rows:
        rate = "n/a" if row.rate != row.rate else f"{row.rate:.2f}"
        lines.append(f"| {row.n} | {row.count} | {row.indeterminate} | {rate} |")
    return "\n".join(lines) + "\n"


def emit_sweep_outputs(out_dir, inst, report, plan, records) -> dict:
    """records.csv + manifest.json + SVG charts for one instance sweep."""
    from . import plots

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    plot_dir = out_dir / "plots"
    plot_dir.mkdir(exist_ok=True)
    if records:
        write_records_csv(out_dir / "records.csv", records, report.degeneracy)
    else:
        write_empty_records_csv(out_dir / "records.csv")
    write_manifest(
        out_dir / "manifest.json",
        plan,
        instance=inst.to_json(),
        instance_fingerprint=inst.fingerprint(),
        oracle=report.to_json(),
    )
    files = {"records": out_dir / "records.csv", "manifest": out_dir / "manifest.json"}
    if records:
        label = "λ" if plan.control_kind == "lambda" else "μ+"
        if len(plan.t_grid) > 1:
            files["time_sweep"] = plots.plot_time_sweep(
                records, plot_dir / "pgs_entropy_vs_time.svg", label
            )
        files["entropy"] = plots.plot_entropy_vs_control(
            {0: records}, plot_dir / "entropy_vs_control.svg", label
        )
    return files


def emit_scaling_outputs(out_dir, plan, result: ScalingResult, seed: int) -> dict:
    """records.csv (with instance id columns), scaling.md, manifest, plots."""
    from . import plots

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    plot_dir = out_dir / "plots"
    plot_dir.mkdir(exist_ok=True)

    records = []
    prefix = []
    degeneracy = max((ir.degeneracy for ir in result.instances), default=0)
    for ir in result.instances:
        for rec in ir.records:
            records.append(rec)
            prefix.append([("n", ir.n), ("instance", ir.index)])
    if records:
        write_records_csv(out_dir / "records.csv", records, degeneracy, prefix)
    else:
        write_empty_records_csv(out_dir / "records.csv")

    (out_dir / "scaling.md").write_text(scaling_markdown(result))
    write_manifest(
        out_dir / "manifest.json",
        plan,
        seed=seed,
        rows=[
            {"n": r.n, "count": r.count, "indeterminate": r.indeterminate, "rate": r.rate}
            for r in result.rows
        ],
        instances=[
            {
                "n": ir.n,
                "index": ir.index,
                "seed": ir.seed,
                "fingerprint": ir.fingerprint,
                "degeneracy": ir.degeneracy,
                "n_valid": ir.n_valid,
                "monotone": ir.monotone,
            }
            for ir in result.instances
        ],
    )
    files = {
        "records": out_dir / "records.csv",
        "scaling": out_dir / "scaling.md",
        "manifest": out_dir / "manifest.json",
    }
    if result.instances:
        files["entropy"] = plots.plot_scaling_entropy(
            result, plot_dir / "entropy_vs_lambda.svg"
        )
    return files
