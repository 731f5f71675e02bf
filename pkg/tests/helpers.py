"""Independent reference implementations used as test oracles.

Everything here deliberately avoids the library's own code paths:
cut weights walk the edge list directly, balanced optima enumerate vertex
subsets with itertools, and the evolution reference steps dense matrix
exponentials. Agreement between these and the package is the point of
the tests, so keep them separate.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.linalg import expm

from annealfair.model import GbpInstance, IsingModel


def cut_weight(inst: GbpInstance, config: int) -> int:
    """Total weight of edges whose endpoints fall on opposite sides."""
    total = 0
    for i, j, w in inst.edges:
        if ((config >> i) & 1) != ((config >> j) & 1):
            total += w
    return total


def brute_force_balanced_optimum(inst: GbpInstance) -> tuple[int, set[int]]:
    """Minimum cut over equal halves, via subset enumeration (not bitmask scans)."""
    best = None
    best_configs: set[int] = set()
    for down in itertools.combinations(range(inst.n), inst.n // 2):
        config = sum(1 << i for i in down)
        value = cut_weight(inst, config)
        if best is None or value < best:
            best = value
            best_configs = {config}
        elif value == best:
            best_configs.add(config)
    return best, best_configs


def model_energy_by_definition(model: IsingModel, config: int) -> float:
    """Direct sum of the energy convention, one term at a time."""
    spins = [1 if not (config >> i) & 1 else -1 for i in range(model.n)]
    e = model.offset
    for i, hi in enumerate(model.h):
        e -= hi * spins[i]
    for i, j, v in model.J:
        e -= v * spins[i] * spins[j]
    return e


def dense_hamiltonian(model: IsingModel, s: float, drop_offset: bool = True) -> np.ndarray:
    """s * H_p + (1 - s) * H_q as an explicit matrix."""
    n = model.n
    dim = 1 << n
    diag = np.array(
        [model_energy_by_definition(model, x) for x in range(dim)], dtype=float
    )
    if drop_offset:
        diag -= model.offset
    ham = np.diag(diag) * s
    x = np.arange(dim)
    for i in range(n):
        ham[x, x ^ (1 << i)] = -(1.0 - s)
    return ham


def expm_evolution(model: IsingModel, T: float, slices: int = 1000) -> np.ndarray:
    """Piecewise-constant midpoint stepping with dense matrix exponentials."""
    dim = 1 << model.n
    psi = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    dt = T / slices
    for k in range(slices):
        s = (k + 0.5) * dt / T
        psi = expm(-1j * dt * dense_hamiltonian(model, s)) @ psi
    return psi


def shannon_bits(probabilities) -> float:
    """Textbook normalized Shannon entropy, no clamping tricks."""
    total = sum(probabilities)
    s = 0.0
    for p in probabilities:
        if p > 0:
            q = p / total
            s -= q * math.log2(q)
    return s


def random_model(n: int, rng: np.random.Generator, density: float = 0.7) -> IsingModel:
    """A small dense-ish test model with fields and couplings."""
    h = tuple(float(v) for v in rng.normal(size=n))
    J = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                J.append((i, j, float(rng.normal())))
    return IsingModel(n=n, offset=float(rng.normal()), h=h, J=tuple(J))


def random_instance(n: int, rng: np.random.Generator, edge_prob: float = 0.5) -> GbpInstance:
    """Random weighted graph; may be disconnected, which is fine for tests."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.append((i, j, int(rng.integers(1, n + 1))))
    if not edges:
        edges.append((0, 1, 1))
    return GbpInstance(n=n, edges=tuple(edges))
