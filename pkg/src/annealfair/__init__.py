"""Quantum annealing at desk scale: penalized Ising encodings of balanced
graph partitioning, exact enumeration oracles, Schroedinger-equation
evolution, and fairness metrics over degenerate optima."""

__version__ = "0.1.0"

from .model import (
    GaugeVector,
    GbpInstance,
    IsingModel,
    apply_gauge,
    apply_gauge_config,
    autoscale,
    classical_energy,
    compose_lambda,
    compose_mu,
    encode_constraint,
    encode_objective,
)
from .oracle import (
    OracleReport,
    analyze,
    feasible_optimum,
    full_spectrum,
    ground_states,
    mu_threshold,
    quantum_gap,
)
from .dynamics import (
    AnnealRun,
    QuantumState,
    apply_hamiltonian,
    evolve,
    ground_state_probabilities,
    initial_state,
)
from .fairness import (
    FairnessRecord,
    entropy,
    monotone_nondecreasing,
    monotonic_increase_rate,
    validity,
)
from .generator import GenSpec, generate_filtered, is_connected, random_graph

__all__ = [
    "AnnealRun",
    "FairnessRecord",
    "GaugeVector",
    "GbpInstance",
    "GenSpec",
    "IsingModel",
    "OracleReport",
    "QuantumState",
    "analyze",
    "apply_gauge",
    "apply_gauge_config",
    "apply_hamiltonian",
    "autoscale",
    "classical_energy",
    "compose_lambda",
    "compose_mu",
    "encode_constraint",
    "encode_objective",
    "entropy",
    "evolve",
    "feasible_optimum",
    "full_spectrum",
    "generate_filtered",
    "ground_state_probabilities",
    "ground_states",
    "initial_state",
    "is_connected",
    "monotone_nondecreasing",
    "monotonic_increase_rate",
    "mu_threshold",
    "quantum_gap",
    "random_graph",
    "validity",
]
