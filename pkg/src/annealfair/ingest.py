"""Ingestion of externally produced sample files (e.g. hardware annealers).

Sample files carry (configuration, count) rows, optionally grouped into
batches that were collected under a spin-reversal gauge. Configurations
are +/- strings (vertex 0 first) or 0/1 strings with 0 = up = +1; see
bits.py for the bitmask convention they map onto.

CSV format: rows `config,count`; a row `gauge,<+/- string>` starts a new
batch collected under that gauge; an optional literal `config,count`
header is skipped. JSON mirrors the SampleSet structure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .bits import config_from_string, config_to_string, popcount_array
from .model import GaugeVector, GbpInstance, apply_gauge_config
from .oracle import analyze

import numpy as np


@dataclass(frozen=True)
class SampleBatch:
    entries: tuple[tuple[int, int], ...]  # (configuration bitmask, count)
    gauge: GaugeVector | None = None


@dataclass(frozen=True)
class SampleSet:
    """Multiset of sampled configurations, grouped by acquisition batch."""

    n: int
    batches: tuple[SampleBatch, ...]

    def __post_init__(self):
        total = 0
        for batch in self.batches:
            if batch.gauge is not None and len(batch.gauge) != self.n:
                raise ValueError("batch gauge width does not match sample width")
            for config, count in batch.entries:
                if not 0 <= config < (1 << self.n):
                    raise ValueError(f"configuration {config} out of range for {self.n} spins")
                if count <= 0:
                    raise ValueError(f"sample count must be positive, got {count}")
                total += count
        if total == 0:
            raise ValueError("sample set is empty")

    def total_count(self) -> int:
        return sum(c for b in self.batches for _, c in b.entries)

    def counts_by_config(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for batch in self.batches:
            for config, count in batch.entries:
                out[config] = out.get(config, 0) + count
        return out


class SampleFormatError(ValueError):
    pass


def _parse_config(text: str, n: int | None, lineno: int) -> int:
    if n is not None and len(text) != n:
        raise SampleFormatError(f"line {lineno}: configuration width {len(text)} != {n}")
    try:
        return config_from_string(text)
    except ValueError as exc:
        raise SampleFormatError(f"line {lineno}: {exc}") from exc


def _parse_csv(text: str) -> SampleSet:
    n: int | None = None
    batches: list[SampleBatch] = []
    entries: list[tuple[int, int]] = []
    gauge: GaugeVector | None = None

    def close_batch():
        nonlocal entries, gauge
        if entries:
            batches.append(SampleBatch(entries=tuple(entries), gauge=gauge))
        entries = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "config,count":
            continue
        parts = line.split(",")
        if parts[0] == "gauge":
            if len(parts) != 2:
                raise SampleFormatError(f"line {lineno}: gauge row must be `gauge,<string>`")
            close_batch()
            g = _parse_config(parts[1], n, lineno)
            if n is None:
                n = len(parts[1])
            gauge = GaugeVector(tuple(-1 if (g >> i) & 1 else 1 for i in range(n)))
            continue
        if len(parts) != 2:
            raise SampleFormatError(f"line {lineno}: expected `config,count`, got {line!r}")
        config = _parse_config(parts[0], n, lineno)
        if n is None:
            n = len(parts[0])
        try:
            count = int(parts[1])
        except ValueError as exc:
            raise SampleFormatError(f"line {lineno}: count is not an integer") from exc
        if count <= 0:
            raise SampleFormatError(f"line {lineno}: count must be positive, got {count}")
        entries.append((config, count))
    close_batch()
    if n is None:
        raise SampleFormatError("no sample rows found")
    return SampleSet(n=n, batches=tuple(batches))


def _parse_json(text: str) -> SampleSet:
    try:
        doc = json.loads(text)
        n = int(doc["n"])
        batches = []
        for b in doc["batches"]:
            gauge = None
            if b.get("gauge") is not None:
                g = config_from_string(b["gauge"])
                gauge = GaugeVector(tuple(-1 if (g >> i) & 1 else 1 for i in range(n)))
            entries = tuple(
                (config_from_string(cfg), int(count)) for cfg, count in b["entries"]
            )
            batches.append(SampleBatch(entries=entries, gauge=gauge))
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise SampleFormatError(f"malformed sample JSON: {exc}") from exc
    return SampleSet(n=n, batches=tuple(batches))


def parse_samples(path, format: str | None = None) -> SampleSet:
    """Load a sample file; format inferred from the extension when omitted."""
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format not in ("csv", "json"):
        raise ValueError(f"unknown sample format {format!r}")
    text = path.read_text()
    return _parse_csv(text) if format == "csv" else _parse_json(text)


def write_samples(samples: SampleSet, path, format: str | None = None) -> None:
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format == "csv":
        lines = ["config,count"]
        for batch in samples.batches:
            if batch.gauge is not None:
                gmask = sum(1 << i for i, v in enumerate(batch.gauge.g) if v == -1)
                lines.append(f"gauge,{config_to_string(gmask, samples.n)}")
            for config, count in batch.entries:
                lines.append(f"{config_to_string(config, samples.n)},{count}")
        path.write_text("\n".join(lines) + "\n")
    elif format == "json":
        doc = {
            "n": samples.n,
            "batches": [
                {
                    "gauge": None
                    if b.gauge is None
                    else config_to_string(
                        sum(1 << i for i, v in enumerate(b.gauge.g) if v == -1), samples.n
                    ),
                    "entries": [[config_to_string(c, samples.n), cnt] for c, cnt in b.entries],
                }
                for b in samples.batches
            ],
        }
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        raise ValueError(f"unknown sample format {format!r}")


def degauge(samples: SampleSet) -> SampleSet:
    """Undo each batch's spin-reversal gauge; counts are untouched.

    Batches without a gauge pass through unchanged.
    """
    batches = []
    for batch in samples.batches:
        if batch.gauge is None:
            batches.append(batch)
            continue
        entries = tuple(
            (apply_gauge_config(config, batch.gauge), count) for config, count in batch.entries
        )
        batches.append(SampleBatch(entries=entries, gauge=None))
    return SampleSet(n=samples.n, batches=tuple(batches))


def _cut_weight(inst: GbpInstance, config: int) -> int:
    return sum(w for i, j, w in inst.edges if ((config >> i) ^ (config >> j)) & 1)


@dataclass(frozen=True)
class EmpiricalFairness:
    """Sampled fairness of one instance: classification plus entropy.

    Per-state probabilities follow the oracle's optimal-config order and
    carry binomial standard errors sqrt(p(1-p)/total).
    """

    n: int
    total: int
    ground_counts: tuple[int, ...]
    feasible_suboptimal: int
    infeasible: int
    p_gs: float
    se_p_gs: float
    p_per_state: tuple[float, ...]
    se_per_state: tuple[float, ...]
    entropy: float
    instance_fingerprint: str

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "total": self.total,
            "counts": {
                "ground_states": list(self.ground_counts),
                "feasible_suboptimal": self.feasible_suboptimal,
                "infeasible": self.infeasible,
            },
            "p_gs": self.p_gs,
            "se_p_gs": self.se_p_gs,
            "p_per_state": list(self.p_per_state),
            "se_per_state": list(self.se_per_state),
            "entropy": self.entropy,
            "instance_fingerprint": self.instance_fingerprint,
        }


def empirical_fairness(samples: SampleSet, inst: GbpInstance) -> EmpiricalFairness:
    """Classify every sample against the exact optima and measure fairness.

    Classification is exact: objective values are integers, so a sample is
    a ground state iff it is balanced and its cut weight equals the
    optimum. Gauged sets should be passed through degauge first; gauges
    present here are ignored deliberately (the samples are taken as-is).
    """
    if samples.n != inst.n:
        raise ValueError(f"sample width {samples.n} does not match instance n={inst.n}")
    report = analyze(inst)
    e_opt = round(report.e_opt)
    index_of = {c: i for i, c in enumerate(report.optimal_configs)}
    ground_counts = [0] * report.degeneracy
    feasible_suboptimal = 0
    infeasible = 0
    counts = samples.counts_by_config()
    for config, count in counts.items():
        if int(popcount_array(np.array([config]))[0]) != inst.n // 2:
            infeasible += count
        elif _cut_weight(inst, config) == e_opt:
            ground_counts[index_of[config]] += count
        else:
            feasible_suboptimal += count
    total = samples.total_count()
    p = [c / total for c in ground_counts]
    se = [math.sqrt(q * (1.0 - q) / total) for q in p]
    p_gs = sum(p)
    try:
        from .fairness import entropy as shannon

        s = shannon(p)
    except ValueError:
        s = float("nan")
    return EmpiricalFairness(
        n=inst.n,
        total=total,
        ground_counts=tuple(ground_counts),
        feasible_suboptimal=feasible_suboptimal,
        infeasible=infeasible,
        p_gs=p_gs,
        se_p_gs=math.sqrt(p_gs * (1.0 - p_gs) / total),
        p_per_state=tuple(p),
        se_per_state=tuple(se),
        entropy=s,
        instance_fingerprint=inst.fingerprint(),
    )
