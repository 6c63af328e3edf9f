import math

import numpy as np
import pytest
from conftest import kron_pauli_sum, random_state_array

from easym.analytic import early_time_cv
from easym.evolution import (
    KrylovConfig,
    build_spectral,
    evolve_krylov,
    evolve_spectral,
    trajectory,
)
from easym.exceptions import ConvergenceError
from easym.observables import ProbeRequest
from easym.pauli import (
    HamiltonianParams,
    build_hamiltonian,
    expectation_value,
    materialize_dense,
)
from easym.states import (
    ANTIFERROMAGNETIC,
    DOMAIN_WALL,
    FERROMAGNETIC,
    ProductStateSpec,
    Region,
    StateVector,
    build_initial_state,
)


def chain(L, gamma, delta1=0.4, delta2=0.0):
    return build_hamiltonian(HamiltonianParams(L=L, gamma=gamma, delta1=delta1, delta2=delta2))


class TestBuildSpectral:
    def test_diagonal_matrix(self):
        prop = build_spectral(np.diag([1.0, -1.0]).astype(complex))
        assert np.allclose(prop.eigenvalues, [-1.0, 1.0])
        assert np.allclose(np.abs(prop.eigenvectors), [[0, 1], [1, 0]])

    def test_reconstruction(self):
        dense = materialize_dense(chain(6, 0.5))
        prop = build_spectral(dense)
        v = prop.eigenvectors
        rebuilt = (v * prop.eigenvalues) @ v.conj().T
        assert np.abs(rebuilt - dense).max() < 1e-8
        assert np.abs(v.conj().T @ v - np.eye(64)).max() < 1e-10

    def test_trace_equals_eigenvalue_sum(self):
        dense = materialize_dense(chain(5, 0.7, 0.4, 0.05))
        prop = build_spectral(dense)
        assert np.trace(dense).real == pytest.approx(float(np.sum(prop.eigenvalues)), abs=1e-8)

    def test_real_symmetric_fast_path(self):
        dense = materialize_dense(chain(4, 0.5))
        prop = build_spectral(dense)
        assert not np.iscomplexobj(prop.eigenvectors)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            build_spectral(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestEvolveSpectral:
    def test_t0_is_identity(self):
        rng = np.random.default_rng(2)
        prop = build_spectral(materialize_dense(chain(4, 0.3)))
        state = StateVector(4, random_state_array(4, rng))
        out = evolve_spectral(prop, state, 0.0)
        assert np.abs(out.amplitudes - state.amplitudes).max() < 1e-14

    def test_group_property(self):
        rng = np.random.default_rng(4)
        prop = build_spectral(materialize_dense(chain(5, 0.6)))
        state = StateVector(5, random_state_array(5, rng))
        a = evolve_spectral(prop, evolve_spectral(prop, state, 1.3), 2.4)
        b = evolve_spectral(prop, state, 3.7)
        assert np.abs(a.amplitudes - b.amplitudes).max() < 1e-10

    def test_single_qubit_closed_form(self):
        prop = build_spectral(np.diag([1.0, -1.0]).astype(complex))
        plus = StateVector(1, np.array([1.0, 1.0]) / math.sqrt(2))
        out = evolve_spectral(prop, plus, math.pi / 4)
        expected = np.array([np.exp(-1j * math.pi / 4), np.exp(1j * math.pi / 4)]) / math.sqrt(2)
        assert np.abs(out.amplitudes - expected).max() < 1e-12

    def test_norm_preserved_at_long_times(self):
        prop = build_spectral(materialize_dense(chain(6, 0.4)))
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 6)
        out = evolve_spectral(prop, state, 4.0e4)
        assert out.norm() == pytest.approx(1.0, abs=1e-10)


class TestEvolveKrylov:
    def test_t0_is_identity(self):
        state = build_initial_state(ProductStateSpec(ANTIFERROMAGNETIC, 0.0), 6)
        out = evolve_krylov(chain(6, 0.5), state, 0.0)
        assert np.abs(out.amplitudes - state.amplitudes).max() < 1e-14

    def test_matches_spectral_backend(self):
        h = chain(6, 0.5)
        prop = build_spectral(materialize_dense(h))
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 6)
        krylov = evolve_krylov(h, state, 2.0)
        spectral = evolve_spectral(prop, state, 2.0)
        assert np.linalg.norm(krylov.amplitudes - spectral.amplitudes) < 1e-8

    def test_matches_spectral_on_random_states(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            L = int(rng.integers(2, 8))
            gamma = float(rng.uniform(0, 1))
            delta2 = float(rng.choice([0.0, 0.05]))
            t = float(rng.uniform(0, 8))
            h = chain(L, gamma, 0.4, delta2)
            prop = build_spectral(materialize_dense(h))
            state = StateVector(L, random_state_array(L, rng))
            krylov = evolve_krylov(h, state, t)
            spectral = evolve_spectral(prop, state, t)
            assert np.linalg.norm(krylov.amplitudes - spectral.amplitudes) < 1e-8

    def test_energy_conserved(self):
        h = chain(6, 0.3, 0.4, 0.05)
        state = build_initial_state(ProductStateSpec(DOMAIN_WALL, 0.2), 6)
        e0 = expectation_value(h, state)
        out = evolve_krylov(h, state, 5.0)
        assert expectation_value(h, out) == pytest.approx(e0, abs=1e-8)
        assert out.norm() == pytest.approx(1.0, abs=1e-9)

    def test_eigenstate_short_circuits(self):
        # the all-up state is an eigenstate at gamma=1: Lanczos hits an
        # invariant subspace immediately and must stay exact
        h = chain(4, 1.0, 0.4)
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 4)
        out = evolve_krylov(h, state, 3.0)
        phase = out.amplitudes[0]
        assert abs(abs(phase) - 1.0) < 1e-12
        assert np.abs(out.amplitudes - phase * state.amplitudes).max() < 1e-12

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            evolve_krylov(chain(4, 0.5), build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 4), -1.0)

    def test_unreachable_tolerance_raises(self):
        h = chain(5, 0.2)
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.3), 5)
        with pytest.raises(ConvergenceError, match="local error"):
            evolve_krylov(h, state, 1.0, KrylovConfig(subspace_dim=2, dt=1.0, tol=1e-300))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            KrylovConfig(subspace_dim=1)
        with pytest.raises(ValueError):
            KrylovConfig(dt=0.0)
        with pytest.raises(ValueError):
            KrylovConfig(tol=0.0)


class TestTrajectory:
    def test_symmetric_evolution_keeps_ea_zero(self):
        h = chain(6, 1.0, 0.4)
        prop = build_spectral(materialize_dense(h))
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 6)
        times = np.arange(0.0, 10.0, 0.5)
        probes = [ProbeRequest("ea_u1", Region((0, 1)))]
        result = trajectory(prop, state, times, probes)
        assert np.abs(result["ea_u1"].values).max() < 1e-10

    def test_domain_wall_charge_mean_stays_zero(self):
        h = chain(6, 0.7, 0.4)
        prop = build_spectral(materialize_dense(h))
        state = build_initial_state(ProductStateSpec(DOMAIN_WALL, 0.0), 6)
        times = np.arange(0.0, 5.0, 0.25)
        result = trajectory(prop, state, times, [ProbeRequest("qmean")])
        assert np.abs(result["qmean"].values).max() < 1e-10

    def test_charge_variance_matches_short_time_expansion(self):
        L, gamma, theta = 8, 0.7, 0.2 * math.pi
        prop = build_spectral(materialize_dense(chain(L, gamma)))
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, theta), L)
        times = np.arange(0.0, 0.301, 0.05)
        result = trajectory(prop, state, times, [ProbeRequest("cv")])
        for t, got in zip(result["cv"].times, result["cv"].values):
            want = early_time_cv(theta, gamma, 0.4, L, float(t))
            assert got == pytest.approx(want, rel=0.02)

    def test_spectral_and_krylov_paths_agree(self):
        h = chain(6, 0.5, 0.4, 0.05)
        prop = build_spectral(materialize_dense(h))
        state = build_initial_state(ProductStateSpec(ANTIFERROMAGNETIC, 0.3), 6)
        times = np.array([0.0, 0.7, 1.9, 4.0])
        probes = [ProbeRequest("ea_u1", Region((1, 2))), ProbeRequest("cv")]
        spectral = trajectory(prop, state, times, probes)
        krylov = trajectory(h, state, times, probes)
        for name in spectral:
            assert np.abs(spectral[name].values - krylov[name].values).max() < 1e-7

    def test_energy_constant_along_trajectory(self):
        h = chain(6, 0.4)
        prop = build_spectral(materialize_dense(h))
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.4), 6)
        e0 = expectation_value(h, state)
        times = np.linspace(0.0, 20.0, 41)
        from easym.evolution import _evolve_spectral_batch

        for _, amps in _evolve_spectral_batch(prop, state.amplitudes, times):
            evolved = StateVector(6, amps)
            assert expectation_value(h, evolved) == pytest.approx(e0, abs=1e-8)
            assert evolved.norm() == pytest.approx(1.0, abs=1e-9)

    def test_time_grid_validation(self):
        h = chain(4, 0.5)
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 4)
        with pytest.raises(ValueError):
            trajectory(h, state, np.array([0.0, 0.0, 1.0]), [ProbeRequest("cv")])
        with pytest.raises(ValueError):
            trajectory(h, state, np.array([-1.0, 1.0]), [ProbeRequest("cv")])
        with pytest.raises(ValueError):
            trajectory(h, state, np.array([0.0, 1.0]), [])
