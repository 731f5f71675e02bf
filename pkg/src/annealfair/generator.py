"""Random instance generation with connectivity and degeneracy filtering.

Graphs are Erdos-Renyi: every vertex pair is included independently with
edge_prob, included edges get a uniform integer weight. Draws come from
numpy's PCG64; instance index k of a batch uses the documented stream
split  stream_seed(seed, k) = seed XOR splitmix64(k),  so parallel and
sequential generation agree bit for bit.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .model import GbpInstance
from .oracle import OracleReport, analyze

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the splitmix64 mixer (Steele et al. constants)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def stream_seed(seed: int, k: int) -> int:
    """Seed for the k-th independent instance stream."""
    return (seed & _MASK64) ^ splitmix64(k)


class GenerationExhausted(RuntimeError):
    def __init__(self, attempts: int):
        super().__init__(f"no acceptable instance within {attempts} attempts")
        self.attempts = attempts


@dataclass(frozen=True)
class GenSpec:
    """Parameters of the instance distribution.

    weight_range defaults to [1, n] inclusive; target_flip_classes counts
    ground-state pairs under global spin flip, so the default 2 asks for
    degeneracy 4.
    """

    n: int
    edge_prob: float = 0.5
    weight_range: tuple[int, int] | None = None
    target_flip_classes: int = 2
    seed: int = 0
    max_attempts: int = 1_000_000

    def __post_init__(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ValueError(f"vertex count must be positive and even, got {self.n}")
        if not 0.0 < self.edge_prob <= 1.0:
            raise ValueError(f"edge probability must be in (0, 1], got {self.edge_prob}")
        wr = self.weight_range if self.weight_range is not None else (1, self.n)
        lo, hi = int(wr[0]), int(wr[1])
        if not 1 <= lo <= hi:
            raise ValueError(f"weight range must be a nonempty positive interval, got {wr}")
        if self.target_flip_classes < 1:
            raise ValueError("target_flip_classes must be positive")
        object.__setattr__(self, "weight_range", (lo, hi))


def is_connected(inst: GbpInstance) -> bool:
    """Breadth-first reachability of every vertex from vertex 0."""
    adj: list[list[int]] = [[] for _ in range(inst.n)]
    for i, j, _ in inst.edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * inst.n
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if not seen[u]:
                seen[u] = True
                queue.append(u)
    return all(seen)


def random_graph(spec: GenSpec, rng: np.random.Generator) -> GbpInstance | None:
    """One draw from the edge distribution; None if it came out disconnected.

    Pairs are visited in lexicographic order; each included pair draws its
    weight immediately, which fixes the stream layout for reproducibility.
    """
    lo, hi = spec.weight_range
    edges = []
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            if rng.random() < spec.edge_prob:
                w = int(rng.integers(lo, hi + 1))
                edges.append((i, j, w))
    inst = GbpInstance(n=spec.n, edges=tuple(edges))
    return inst if is_connected(inst) else None


def generate_filtered(spec: GenSpec) -> tuple[GbpInstance, OracleReport, int]:
    """Redraw until the oracle confirms the requested ground-state degeneracy.

    Returns (instance, report, attempts). Fully determined by spec.seed.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed & _MASK64))
    want = 2 * spec.target_flip_classes
    for attempt in range(1, spec.max_attempts + 1):
        inst = random_graph(spec, rng)
        if inst is None:
            continue
        report = analyze(inst)
        if report.degeneracy == want:
            return inst, report, attempt
    raise GenerationExhausted(spec.max_attempts)


def generate_batch(spec: GenSpec, count: int):
    """Instances 0..count-1, each from its own split stream of spec.seed."""
    out = []
    for k in range(count):
        sub = replace(spec, seed=stream_seed(spec.seed, k))
        inst, report, attempts = generate_filtered(sub)
        out.append((inst, report, attempts))
    return out


def emit_instances(spec: GenSpec, count: int, outdir) -> list[Path]:
    """Write instance JSON files plus a manifest CSV; returns the file paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    rows = []
    for k, (inst, report, attempts) in enumerate(generate_batch(spec, count)):
        path = outdir / f"gbp_n{spec.n}_seed{spec.seed}_k{k}.json"
        inst.save(path)
        paths.append(path)
        rows.append(
            {
                "index": k,
                "seed": stream_seed(spec.seed, k),
                "attempts": attempts,
                "D": report.degeneracy,
                "e_opt": report.e_opt,
                "mu_threshold": report.mu_threshold,
            }
        )
    with open(outdir / "manifest.csv", "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["index", "seed", "attempts", "D", "e_opt", "mu_threshold"]
        )
        writer.writeheader()
        writer.writerows(rows)
    return paths
