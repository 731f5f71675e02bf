"""Balanced graph-partitioning instances and their Ising encodings.

Energy convention: a model with fields h, couplings J and constant offset
assigns configuration sigma in {-1,+1}^n the classical energy

    E(sigma) = offset - sum_i h_i sigma_i - sum_{i<j} J_ij sigma_i sigma_j.

External tools sometimes use the opposite sign on h and J; convert at the
boundary when importing models from elsewhere.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .bits import spins_from_config

Edge = tuple[int, int, int]


@dataclass(frozen=True)
class GbpInstance:
    """A weighted undirected graph whose vertices are to be split in half.

    Parameters
    ----------
    n : int
        Vertex count; must be even so a balanced partition exists.
    edges : tuple of (i, j, w)
        Undirected edges with 0 <= i < j < n and positive integer weight w,
        each unordered pair at most once.
    """

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ValueError(f"vertex count must be a positive even integer, got {self.n}")
        seen = set()
        norm = []
        for e in self.edges:
            if len(e) != 3:
                raise ValueError(f"edge must be (i, j, w), got {e!r}")
            i, j, w = e
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge endpoints out of range or unordered: {(i, j)}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge {(i, j)}")
            if not (isinstance(w, (int, np.integer)) and w > 0):
                raise ValueError(f"edge weight must be a positive integer, got {w!r}")
            seen.add((i, j))
            norm.append((int(i), int(j), int(w)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "GbpInstance":
        try:
            n = data["n"]
            edges = tuple(tuple(e) for e in data["edges"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed instance document: {exc}") from exc
        return cls(n=n, edges=edges)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "GbpInstance":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON form; stable instance identity."""
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class IsingModel:
    """Fields h, couplings J and a constant offset in the sign convention above.

    J stores each unordered pair once with i < j. Treat instances as
    immutable; they are shared read-only across worker threads.
    """

    n: int
    offset: float = 0.0
    h: tuple[float, ...] = ()
    J: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        h = tuple(float(v) for v in (self.h or [0.0] * self.n))
        if len(h) != self.n:
            raise ValueError(f"h has length {len(h)}, expected {self.n}")
        seen = set()
        J = []
        for i, j, v in self.J:
            if not (0 <= i < j < self.n):
                raise ValueError(f"coupling pair out of range or unordered: {(i, j)}")
            if (i, j) in seen:
                raise ValueError(f"duplicate coupling {(i, j)}")
            seen.add((i, j))
            J.append((int(i), int(j), float(v)))
        J.sort()
        values = [self.offset, *h, *(v for _, _, v in J)]
        if not np.all(np.isfinite(values)):
            raise ValueError("model entries must be finite")
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", tuple(J))

    def j_dict(self) -> dict[tuple[int, int], float]:
        return {(i, j): v for i, j, v in self.J}

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "offset": self.offset,
            "h": list(self.h),
            "J": [[i, j, v] for i, j, v in self.J],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IsingModel":
        return cls(
            n=data["n"],
            offset=data.get("offset", 0.0),
            h=tuple(data.get("h", [])),
            J=tuple(tuple(t) for t in data.get("J", [])),
        )


@dataclass(frozen=True)
class GaugeVector:
    """Per-spin signs used by the spin-reversal transform."""

    g: tuple[int, ...]

    def __post_init__(self):
        g = tuple(int(v) for v in self.g)
        if any(v not in (-1, 1) for v in g):
            raise ValueError("gauge entries must be exactly +1 or -1")
        object.__setattr__(self, "g", g)

    def __len__(self) -> int:
        return len(self.g)


def encode_objective(inst: GbpInstance) -> IsingModel:
    """Cut-weight objective: E(sigma) = sum over edges of w_ij (1 - sigma_i sigma_j)/2.

    Equal-partition encoding carries offset sum(w)/2 and J_ij = w_ij/2, so
    severed edges cost their full weight and uncut edges cost nothing.
    """
    offset = sum(w for _, _, w in inst.edges) / 2.0
    J = tuple((i, j, w / 2.0) for i, j, w in inst.edges)
    return IsingModel(n=inst.n, offset=offset, J=J)


def encode_constraint(n: int) -> IsingModel:
    """Equal-partition penalty: E(sigma) = (sum_i sigma_i)^2, zero iff balanced."""
    if n < 2:
        raise ValueError("constraint needs at least two spins")
    J = tuple((i, j, -2.0) for i in range(n) for j in range(i + 1, n))
    return IsingModel(n=n, offset=float(n), J=J)


def _compose(a: IsingModel, b: IsingModel, ca: float, cb: float) -> IsingModel:
    if a.n != b.n:
        raise ValueError(f"spin counts differ: {a.n} vs {b.n}")
    h = tuple(ca * x + cb * y for x, y in zip(a.h, b.h))
    J = dict()
    for i, j, v in a.J:
        J[(i, j)] = ca * v
    for i, j, v in b.J:
        J[(i, j)] = J.get((i, j), 0.0) + cb * v
    return IsingModel(
        n=a.n,
        offset=ca * a.offset + cb * b.offset,
        h=h,
        # a coupling that came out exactly zero is no coupling at all
        J=tuple((i, j, v) for (i, j), v in J.items() if v != 0.0),
    )


def compose_mu(obj: IsingModel, cons: IsingModel, mu: float) -> IsingModel:
    """Penalized Hamiltonian obj + mu * cons, composed term-wise."""
    if mu < 0:
        raise ValueError(f"penalty coefficient must be nonnegative, got {mu}")
    return _compose(obj, cons, 1.0, mu)


def compose_lambda(obj: IsingModel, cons: IsingModel, lam: float) -> IsingModel:
    """Normalized penalty mix (1-lam)*obj + lam*cons.

    For lam < 1 this equals (1-lam) times compose_mu with mu = lam/(1-lam),
    so the ground-state set matches that parameterization while the energy
    scale stays bounded as mu -> infinity.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return _compose(obj, cons, 1.0 - lam, lam)


def classical_energy(model: IsingModel, config: int) -> float:
    """Energy of one bitmask configuration (bit set = spin down)."""
    s = spins_from_config(config, model.n)
    e = model.offset
    for i, hi in enumerate(model.h):
        e -= hi * s[i]
    for i, j, v in model.J:
        e -= v * s[i] * s[j]
    return float(e)


def apply_gauge(model: IsingModel, gauge: GaugeVector) -> IsingModel:
    """Spin-reversal transform: h_i -> g_i h_i, J_ij -> g_i g_j J_ij.

    Energies are covariant: the transformed model evaluated on the
    gauge-flipped configuration reproduces the original energy exactly.
    """
    g = gauge.g
    if len(g) != model.n:
        raise ValueError(f"gauge length {len(g)} does not match {model.n} spins")
    h = tuple(g[i] * v for i, v in enumerate(model.h))
    J = tuple((i, j, g[i] * g[j] * v) for i, j, v in model.J)
    return IsingModel(n=model.n, offset=model.offset, h=h, J=J)


def apply_gauge_config(config: int, gauge: GaugeVector) -> int:
    """Flip the bits of config where the gauge is -1."""
    mask = 0
    for i, v in enumerate(gauge.g):
        if v == -1:
            mask |= 1 << i
    return config ^ mask


DEFAULT_H_RANGE = (-4.0, 4.0)
DEFAULT_J_RANGE = (-1.0, 1.0)


def autoscale(
    model: IsingModel,
    h_range: tuple[float, float] = DEFAULT_H_RANGE,
    j_range: tuple[float, float] = DEFAULT_J_RANGE,
) -> tuple[IsingModel, float]:
    """Rescale h, J and offset to fill hardware bias/coupling ranges.

    The factor is the largest ratio of any term to the range bound of its
    sign; dividing by it puts the most extreme term exactly on its bound.
    No clamp is applied at 1, so weak models are scaled up as real
    annealers do. An all-zero model is returned unchanged with factor 1.
    Defaults mirror a current-generation annealer: h in (-4, 4), J in (-1, 1).
    """
    h_lo, h_hi = h_range
    j_lo, j_hi = j_range
    if not (h_lo < 0.0 < h_hi):
        raise ValueError(f"h_range must straddle zero, got {h_range}")
    if not (j_lo < 0.0 < j_hi):
        raise ValueError(f"j_range must straddle zero, got {j_range}")

    ratios = []
    if model.h:
        ratios.append(max(model.h) / h_hi)
        ratios.append(min(model.h) / h_lo)
    if model.J:
        values = [v for _, _, v in model.J]
        ratios.append(max(values) / j_hi)
        ratios.append(min(values) / j_lo)
    factor = max(ratios, default=0.0)
    if factor <= 0.0:
        return model, 1.0
    scaled = IsingModel(
        n=model.n,
        offset=model.offset / factor,
        h=tuple(v / factor for v in model.h),
        J=tuple((i, j, v / factor) for i, j, v in model.J),
    )
    return scaled, factor
