"""Evolution correctness: Hermiticity, adiabatic limits, cross-method checks."""

import numpy as np
import pytest

import helpers
from annealfair.dynamics import (
    AnnealRun,
    MAX_SPINS,
    QuantumState,
    apply_hamiltonian,
    evolve,
    ground_state_probabilities,
    initial_state,
)
from annealfair.model import (
    GaugeVector,
    GbpInstance,
    IsingModel,
    apply_gauge,
    apply_gauge_config,
    autoscale,
    compose_lambda,
    compose_mu,
    encode_constraint,
    encode_objective,
)
from annealfair.oracle import analyze


def probabilities(state: QuantumState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


class TestInitialState:
    def test_single_spin(self):
        state = initial_state(1)
        assert state.amplitudes == pytest.approx(np.full(2, 1 / np.sqrt(2)))

    def test_two_spins_quarter_amplitudes(self):
        state = initial_state(2)
        assert state.amplitudes == pytest.approx(np.full(4, 0.5))

    @pytest.mark.parametrize("n", range(1, 15))
    def test_normalized(self, n):
        assert initial_state(n).norm_sq() == pytest.approx(1.0, abs=1e-14)

    def test_range_check(self):
        with pytest.raises(ValueError):
            initial_state(0)
        with pytest.raises(ValueError):
            initial_state(MAX_SPINS + 1)


class TestApplyHamiltonian:
    def test_pure_diagonal_at_s_one(self):
        diag = np.array([1.0, 2.0, 3.0, 4.0])
        vec = np.array([1.0, 1.0, 1.0, 1.0], dtype=complex)
        out = apply_hamiltonian(diag, 1.0, vec)
        assert out == pytest.approx(diag.astype(complex))

    def test_pure_driver_single_spin(self):
        out = apply_hamiltonian(np.zeros(2), 0.0, np.array([1.0, 0.0], dtype=complex))
        assert out == pytest.approx(np.array([0.0, -1.0], dtype=complex))

    def test_hermitian_on_random_vectors(self):
        rng = np.random.default_rng(0)
        model = helpers.random_model(4, rng)
        diag = np.array(
            [helpers.model_energy_by_definition(model, x) for x in range(16)]
        )
        for s in (0.0, 0.3, 0.7, 1.0):
            phi = rng.normal(size=16) + 1j * rng.normal(size=16)
            psi = rng.normal(size=16) + 1j * rng.normal(size=16)
            lhs = np.vdot(phi, apply_hamiltonian(diag, s, psi))
            rhs = np.conj(np.vdot(psi, apply_hamiltonian(diag, s, phi)))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_matches_dense_matrix(self):
        rng = np.random.default_rng(1)
        model = helpers.random_model(3, rng)
        diag = np.array(
            [helpers.model_energy_by_definition(model, x) - model.offset for x in range(8)]
        )
        vec = rng.normal(size=8) + 1j * rng.normal(size=8)
        for s in (0.2, 0.9):
            dense = helpers.dense_hamiltonian(model, s) @ vec
            assert apply_hamiltonian(diag, s, vec) == pytest.approx(dense)

    def test_wraps_quantum_state(self):
        state = initial_state(2)
        out = apply_hamiltonian(np.zeros(4), 0.0, state)
        assert isinstance(out, QuantumState)


class TestEvolve:
    def test_single_spin_adiabatic(self):
        # nondegenerate two-level system, slow anneal: lands in sigma^z up
        model = IsingModel(n=1, h=(1.0,))
        state = evolve(model, AnnealRun(T=1e4))
        assert probabilities(state)[0] >= 0.999

    def test_two_spin_constraint_symmetry(self):
        model = encode_constraint(2)
        state = evolve(model, AnnealRun(T=100.0))
        p = probabilities(state)
        assert p[0b01] == pytest.approx(p[0b10], abs=1e-12)
        assert p[0b01] + p[0b10] >= 0.999

    def test_n4_degenerate_instance_fair_at_long_time(self):
        inst = GbpInstance(n=4, edges=((0, 3, 4), (1, 3, 4), (2, 3, 1)))
        report = analyze(inst)
        assert report.degeneracy == 4
        # stay above the feasibility threshold (mu* = 1, i.e. lambda* = 0.5)
        model, _ = autoscale(
            compose_lambda(encode_objective(inst), encode_constraint(4), 0.7)
        )
        state = evolve(model, AnnealRun(T=1e5))
        p_total, p_each = ground_state_probabilities(state, report.optimal_configs)
        assert p_total >= 0.999
        from annealfair.fairness import entropy

        assert entropy(p_each) == pytest.approx(2.0, abs=1e-3)

    def test_norm_drift_within_budget(self):
        rng = np.random.default_rng(3)
        inst = helpers.random_instance(6, rng)
        model, _ = autoscale(
            compose_mu(encode_objective(inst), encode_constraint(6), 1.0)
        )
        state, stats = evolve(model, AnnealRun(T=1000.0), return_stats=True)
        assert stats.norm_drift <= 1e-6
        assert state.norm_sq() == pytest.approx(1.0, abs=1e-6)

    def test_offset_only_changes_global_phase(self):
        inst = GbpInstance(n=2, edges=((0, 1, 2),))
        model = compose_mu(encode_objective(inst), encode_constraint(2), 1.0)
        with_offset = evolve(model, AnnealRun(T=50.0, drop_offset=False))
        without = evolve(model, AnnealRun(T=50.0, drop_offset=True))
        assert probabilities(with_offset) == pytest.approx(probabilities(without), abs=1e-9)

    def test_spin_cap(self):
        with pytest.raises(ValueError):
            evolve(IsingModel(n=MAX_SPINS + 1), AnnealRun(T=1.0))

    def test_run_validation(self):
        with pytest.raises(ValueError):
            AnnealRun(T=0.0)
        with pytest.raises(ValueError):
            AnnealRun(T=1.0, rel_tol=0.0)


class TestCrossMethod:
    """evolve vs piecewise-constant dense matrix exponentials at T=100."""

    def expm_probabilities(self, model, slices=1000):
        return np.abs(helpers.expm_evolution(model, 100.0, slices=slices)) ** 2

    def test_reference_self_converged(self):
        # the reference must stand on its own before it can judge evolve
        inst = GbpInstance(n=2, edges=((0, 1, 2),))
        model = compose_mu(encode_objective(inst), encode_constraint(2), 1.0)
        coarse = self.expm_probabilities(model, slices=1000)
        fine = self.expm_probabilities(model, slices=2000)
        assert np.max(np.abs(coarse - fine)) <= 2e-6

    def test_single_spin(self):
        model = IsingModel(n=1, h=(1.0,))
        state = evolve(model, AnnealRun(T=100.0))
        assert np.max(np.abs(probabilities(state) - self.expm_probabilities(model))) <= 1e-4

    def test_two_spin_composed(self):
        inst = GbpInstance(n=2, edges=((0, 1, 2),))
        model = compose_mu(encode_objective(inst), encode_constraint(2), 1.0)
        state = evolve(model, AnnealRun(T=100.0))
        assert np.max(np.abs(probabilities(state) - self.expm_probabilities(model))) <= 1e-4

    def test_four_spin_autoscaled(self):
        rng = np.random.default_rng(3)
        inst = helpers.random_instance(4, rng)
        model, _ = autoscale(
            compose_lambda(encode_objective(inst), encode_constraint(4), 0.5)
        )
        state = evolve(model, AnnealRun(T=100.0))
        assert np.max(np.abs(probabilities(state) - self.expm_probabilities(model))) <= 1e-4

    def test_four_spin_with_fields(self):
        rng = np.random.default_rng(4)
        model = helpers.random_model(4, rng)
        model, _ = autoscale(model)
        state = evolve(model, AnnealRun(T=100.0))
        assert np.max(np.abs(probabilities(state) - self.expm_probabilities(model))) <= 1e-4


class TestConvergence:
    @pytest.mark.parametrize(
        "n,T", [(4, 1e4), (6, 100.0)], ids=["n4_T1e4", "n6_T100"]
    )
    def test_tolerance_halving_stability(self, n, T):
        rng = np.random.default_rng(n)
        inst = helpers.random_instance(n, rng)
        model, _ = autoscale(
            compose_mu(encode_objective(inst), encode_constraint(n), 1.0)
        )
        base = evolve(model, AnnealRun(T=T))
        tight = evolve(model, AnnealRun(T=T, rel_tol=0.5e-8, abs_tol=0.5e-10))
        assert np.max(np.abs(probabilities(base) - probabilities(tight))) <= 1e-6


class TestSymmetries:
    def test_dynamics_gauge_equivariance_composed(self):
        rng = np.random.default_rng(5)
        inst = helpers.random_instance(6, rng)
        model, _ = autoscale(
            compose_mu(encode_objective(inst), encode_constraint(6), 1.0)
        )
        gauge = GaugeVector(tuple(rng.choice([-1, 1]) for _ in range(6)))
        p = probabilities(evolve(model, AnnealRun(T=50.0)))
        p_gauged = probabilities(evolve(apply_gauge(model, gauge), AnnealRun(T=50.0)))
        for x in range(64):
            assert p_gauged[apply_gauge_config(x, gauge)] == pytest.approx(p[x], abs=1e-6)

    def test_dynamics_gauge_equivariance_with_fields(self):
        rng = np.random.default_rng(6)
        model, _ = autoscale(helpers.random_model(4, rng))
        gauge = GaugeVector(tuple(rng.choice([-1, 1]) for _ in range(4)))
        p = probabilities(evolve(model, AnnealRun(T=50.0)))
        p_gauged = probabilities(evolve(apply_gauge(model, gauge), AnnealRun(T=50.0)))
        for x in range(16):
            assert p_gauged[apply_gauge_config(x, gauge)] == pytest.approx(p[x], abs=1e-6)

    @pytest.mark.parametrize("seed", range(3))
    def test_global_flip_probability_symmetry(self, seed):
        # all composed balanced-partition models have zero fields
        rng = np.random.default_rng(seed)
        inst = helpers.random_instance(6, rng)
        model, _ = autoscale(
            compose_lambda(encode_objective(inst), encode_constraint(6), 0.4)
        )
        p = probabilities(evolve(model, AnnealRun(T=50.0)))
        full = (1 << 6) - 1
        for x in range(64):
            assert p[x] == pytest.approx(p[x ^ full], abs=1e-6)


class TestGroundStateProbabilities:
    def test_uniform_state_two_configs(self):
        state = initial_state(2)
        total, per_state = ground_state_probabilities(state, [0b01, 0b10])
        assert per_state == pytest.approx([0.25, 0.25])
        assert total == pytest.approx(0.5)

    def test_basis_state_in_set(self):
        amp = np.zeros(4, dtype=complex)
        amp[2] = 1.0
        state = QuantumState(amplitudes=amp, n=2)
        total, _ = ground_state_probabilities(state, [2])
        assert total == 1.0

    def test_all_configs_sum_to_one(self):
        state = initial_state(3)
        total, _ = ground_state_probabilities(state, list(range(8)))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_out_of_range_config(self):
        with pytest.raises(ValueError):
            ground_state_probabilities(initial_state(2), [4])
