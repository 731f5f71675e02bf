"""Exact brute-force reference over all 2^n spin configurations.

Configurations are bitmasks (bit i set = spin i down, see bits.py).
Everything here enumerates, so sizes are capped at desk scale; the point
is to be unarguably correct, not fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import complement, config_to_string, popcount_array
from .model import GbpInstance, IsingModel, compose_mu, encode_constraint, encode_objective

ENUM_MAX_SPINS = 24
SPECTRUM_MAX_SPINS = 16
DENSE_GAP_MAX_SPINS = 10

_CHUNK = 1 << 18


def _check_enum_size(n: int, cap: int) -> None:
    if n > cap:
        raise ValueError(f"{n} spins exceeds the enumeration cap of {cap}")


def all_config_energies(model: IsingModel, include_offset: bool = True) -> np.ndarray:
    """Classical energy of every configuration, indexed by bitmask."""
    _check_enum_size(model.n, ENUM_MAX_SPINS)
    n = model.n
    dim = 1 << n
    base = model.offset if include_offset else 0.0
    h = np.asarray(model.h)
    have_h = bool(h.any())
    energies = np.empty(dim)
    for start in range(0, dim, _CHUNK):
        stop = min(start + _CHUNK, dim)
        x = np.arange(start, stop, dtype=np.uint64)
        s = np.empty((n, stop - start))
        for i in range(n):
            s[i] = 1.0 - 2.0 * ((x >> np.uint64(i)) & np.uint64(1)).astype(np.float64)
        acc = np.full(stop - start, base)
        if have_h:
            acc -= h @ s
        for i, j, v in model.J:
            acc -= v * s[i] * s[j]
        energies[start:stop] = acc
    return energies


def _default_tol(e_min: float) -> float:
    return 1e-9 * max(1.0, abs(e_min))


def feasible_optimum(inst: GbpInstance) -> tuple[float, list[int]]:
    """Minimum cut weight over all balanced partitions, with every minimizer.

    Returns (e_opt, configs); configs are in ascending bitmask order and
    always come in global-spin-flip pairs.
    """
    _check_enum_size(inst.n, ENUM_MAX_SPINS)
    energies = all_config_energies(encode_objective(inst))
    x = np.arange(1 << inst.n, dtype=np.uint64)
    balanced = popcount_array(x) == inst.n // 2
    feasible = energies[balanced]
    e_opt = float(feasible.min())
    mask = balanced & (energies <= e_opt + _default_tol(e_opt))
    return e_opt, [int(c) for c in np.flatnonzero(mask)]


def ground_states(model: IsingModel, tol: float | None = None) -> tuple[float, list[int]]:
    """All configurations within tol of the minimum classical energy."""
    energies = all_config_energies(model)
    e_min = float(energies.min())
    if tol is None:
        tol = _default_tol(e_min)
    configs = np.flatnonzero(energies <= e_min + tol)
    return e_min, [int(c) for c in configs]


def mu_threshold(inst: GbpInstance) -> float:
    """Smallest penalty coefficient whose ground states are feasible optima.

    Computed as the supremum ratio (e_opt - E_obj(x)) / E_const(x) over
    infeasible x, floored at 0. At exactly this value the tightest
    infeasible state ties the feasible optimum; callers wanting strictly
    feasible ground states must use a coefficient strictly above it.
    """
    _check_enum_size(inst.n, ENUM_MAX_SPINS)
    e_opt, _ = feasible_optimum(inst)
    energies = all_config_energies(encode_objective(inst))
    x = np.arange(1 << inst.n, dtype=np.uint64)
    imbalance = inst.n - 2 * popcount_array(x)
    infeasible = imbalance != 0
    penalty = imbalance[infeasible].astype(np.float64) ** 2
    ratio = (e_opt - energies[infeasible]) / penalty
    return max(0.0, float(ratio.max()))


def full_spectrum(model: IsingModel) -> list[tuple[float, int]]:
    """Every (energy, config) pair, ascending by energy, ties by bitmask."""
    _check_enum_size(model.n, SPECTRUM_MAX_SPINS)
    energies = all_config_energies(model)
    order = np.argsort(energies, kind="stable")
    return [(float(energies[i]), int(i)) for i in order]


@dataclass(frozen=True)
class OracleReport:
    """Everything the brute-force reference knows about one instance."""

    n: int
    e_opt: float
    optimal_configs: tuple[int, ...]
    degeneracy: int
    spin_flip_classes: tuple[tuple[int, int], ...]
    mu_threshold: float
    feasible_count: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "e_opt": self.e_opt,
            "degeneracy": self.degeneracy,
            "optimal_configs": [config_to_string(c, self.n) for c in self.optimal_configs],
            "spin_flip_classes": [
                [config_to_string(a, self.n), config_to_string(b, self.n)]
                for a, b in self.spin_flip_classes
            ],
            "mu_threshold": self.mu_threshold,
            "feasible_count": self.feasible_count,
        }


def analyze(inst: GbpInstance) -> OracleReport:
    """Full report: optima, degeneracy, spin-flip pairing, penalty threshold."""
    e_opt, configs = feasible_optimum(inst)
    config_set = set(configs)
    classes = []
    for c in configs:
        partner = complement(c, inst.n)
        if partner not in config_set:
            raise AssertionError(f"optimum {c:#x} lacks its global spin-flip partner")
        if c < partner:
            classes.append((c, partner))
    return OracleReport(
        n=inst.n,
        e_opt=e_opt,
        optimal_configs=tuple(configs),
        degeneracy=len(configs),
        spin_flip_classes=tuple(classes),
        mu_threshold=mu_threshold(inst),
        feasible_count=math.comb(inst.n, inst.n // 2),
    )


def penalized_ground_states(inst: GbpInstance, mu: float) -> tuple[float, list[int]]:
    """Ground states of the mu-penalized Hamiltonian; cross-oracle helper."""
    model = compose_mu(encode_objective(inst), encode_constraint(inst.n), mu)
    return ground_states(model)


def _dense_hamiltonian(diag: np.ndarray, n: int, s: float) -> np.ndarray:
    dim = 1 << n
    ham = np.diag(s * diag).astype(np.float64)
    x = np.arange(dim)
    for i in range(n):
        ham[x, x ^ (1 << i)] = -(1.0 - s)
    return ham


def quantum_gap(
    model: IsingModel,
    s_grid,
    method: str = "auto",
    tol: float = 1e-8,
    maxiter: int = 100_000,
) -> list[tuple[float, float]]:
    """Gap between the two lowest eigenvalues of s*H_p + (1-s)*H_q.

    H_p is the diagonal classical energy (offset included; it shifts both
    eigenvalues equally) and H_q the transverse-field driver. Dense
    diagonalization up to DENSE_GAP_MAX_SPINS, a matrix-free iterative
    eigensolver beyond; non-convergence raises instead of returning junk.
    """
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "dense" if model.n <= DENSE_GAP_MAX_SPINS else "iterative"
    diag = all_config_energies(model)
    out = []
    for s in s_grid:
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"schedule point must be in [0, 1], got {s}")
        if method == "dense":
            evals = np.linalg.eigvalsh(_dense_hamiltonian(diag, model.n, s))
            low = evals[:2]
        else:
            low = _iterative_lowest_two(diag, model.n, s, tol, maxiter)
        out.append((s, float(low[1] - low[0])))
    return out


def _iterative_lowest_two(diag, n, s, tol, maxiter):
    from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

    from .dynamics import apply_hamiltonian

    dim = 1 << n

    def matvec(v):
        return apply_hamiltonian(diag, s, v.astype(np.complex128)).real

    op = LinearOperator((dim, dim), matvec=matvec, dtype=np.float64)
    try:
        evals = eigsh(op, k=2, which="SA", tol=tol, maxiter=maxiter, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise RuntimeError(
            f"iterative eigensolver failed to converge at s={s} within {maxiter} iterations"
        ) from exc
    return np.sort(evals)
