"""Fairness metrics for distributions over degenerate ground states."""

from __future__ import annotations

import math
from dataclasses import dataclass

PROB_FLOOR = 1e-15  # probabilities below this are integrator noise, treat as 0
DEFAULT_VALIDITY_THRESHOLD = 0.999
DEFAULT_MONOTONE_SLACK = 1e-6


def entropy(p_per_state) -> float:
    """Shannon entropy in bits of the normalized distribution.

    Entries are normalized by their sum, so any common positive scale
    (e.g. a total ground-state probability below 1) drops out. Zero
    entries contribute nothing; an all-zero input has no distribution to
    speak of and raises.
    """
    p = [0.0 if v < PROB_FLOOR else float(v) for v in p_per_state]
    total = sum(p)
    if total <= 0.0:
        raise ValueError("entropy undefined: all probabilities are zero")
    s = 0.0
    for v in p:
        if v > 0.0:
            q = v / total
            s -= q * math.log2(q)
    return s


def validity(p_gs: float, threshold: float = DEFAULT_VALIDITY_THRESHOLD) -> bool:
    """Whether the total ground-state probability is effectively one."""
    return p_gs >= threshold


def monotone_nondecreasing(entropies, slack: float = DEFAULT_MONOTONE_SLACK) -> bool:
    """True iff each entry is at least its predecessor minus slack.

    The slack absorbs integrator noise; pass 0 for exact-mode audits.
    """
    entropies = list(entropies)
    if not entropies:
        raise ValueError("monotonicity of an empty series is undefined")
    return all(b >= a - slack for a, b in zip(entropies, entropies[1:]))


def monotonic_increase_rate(flags) -> float:
    """Fraction of instances whose entropy series was non-decreasing."""
    flags = list(flags)
    if not flags:
        raise ValueError("rate of an empty collection is undefined")
    return sum(bool(f) for f in flags) / len(flags)


@dataclass(frozen=True)
class FairnessRecord:
    """Outcome of one evolution measured against the degenerate optima.

    control is the penalty parameter that produced the run; control_kind
    says which parameterization it lives in ("lambda" or "mu_plus").
    entropy is NaN when no ground-state weight was observed at all.
    """

    control_kind: str
    control: float
    T: float
    p_gs: float
    p_per_state: tuple[float, ...]
    entropy: float
    valid: bool

    def __post_init__(self):
        if self.control_kind not in ("lambda", "mu_plus"):
            raise ValueError(f"unknown control kind {self.control_kind!r}")
        if math.isnan(self.p_gs):
            return  # failed evolution, kept as an explicit invalid record
        if not -1e-9 <= self.p_gs <= 1.0 + 1e-9:
            raise ValueError(f"total ground-state probability out of range: {self.p_gs}")
        if abs(sum(self.p_per_state) - self.p_gs) > 1e-9:
            raise ValueError("per-state probabilities do not sum to the total")

    @staticmethod
    def failed(control_kind: str, control: float, T: float, degeneracy: int) -> "FairnessRecord":
        """Placeholder for an evolution that raised; always invalid."""
        nan = float("nan")
        return FairnessRecord(
            control_kind=control_kind,
            control=float(control),
            T=float(T),
            p_gs=nan,
            p_per_state=(nan,) * degeneracy,
            entropy=nan,
            valid=False,
        )

    @staticmethod
    def from_probabilities(
        control_kind: str,
        control: float,
        T: float,
        p_per_state,
        threshold: float = DEFAULT_VALIDITY_THRESHOLD,
    ) -> "FairnessRecord":
        p = tuple(float(v) for v in p_per_state)
        p_gs = sum(p)
        try:
            s = entropy(p)
        except ValueError:
            s = float("nan")
        return FairnessRecord(
            control_kind=control_kind,
            control=float(control),
            T=float(T),
            p_gs=p_gs,
            p_per_state=p,
            entropy=s,
            valid=validity(p_gs, threshold),
        )

    @staticmethod
    def csv_header(degeneracy: int) -> str:
        cols = ["control_kind", "control", "T", "p_gs", "entropy", "valid"]
        cols += [f"p_{i + 1}" for i in range(degeneracy)]
        return ",".join(cols)

    def to_csv_row(self) -> str:
        cells = [
            self.control_kind,
            repr(self.control),
            repr(self.T),
            repr(self.p_gs),
            repr(self.entropy),
            "true" if self.valid else "false",
        ]
        cells += [repr(v) for v in self.p_per_state]
        return ",".join(cells)

    def to_json(self) -> dict:
        return {
            "control_kind": self.control_kind,
            "control": self.control,
            "T": self.T,
            "p_gs": self.p_gs,
            "entropy": self.entropy,
            "valid": self.valid,
            "p_per_state": list(self.p_per_state),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FairnessRecord":
        return cls(
            control_kind=data["control_kind"],
            control=float(data["control"]),
            T=float(data["T"]),
            p_gs=float(data["p_gs"]),
            p_per_state=tuple(float(v) for v in data["p_per_state"]),
            entropy=float(data["entropy"]),
            valid=bool(data["valid"]),
        )
