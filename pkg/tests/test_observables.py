import math

import numpy as np
import pytest
from conftest import random_state_array

from easym.observables import (
    U1,
    Z2,
    DensityMatrix,
    ProbeRequest,
    SymmetryProbe,
    charge_distribution,
    charge_moments,
    entanglement_asymmetry,
    evaluate_probes,
    reduced_density_matrix,
    sector_project,
    von_neumann_entropy,
)
from easym.states import (
    FERROMAGNETIC,
    ProductStateSpec,
    Region,
    StateVector,
    basis_state,
    build_initial_state,
)

LN2 = math.log(2.0)


def brute_force_rdm(amps: np.ndarray, L: int, sites: tuple[int, ...]) -> np.ndarray:
    """Partial trace straight from the definition, summing over complement indices."""
    n = len(sites)
    rest = [s for s in range(L) if s not in sites]
    rho = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for x in range(1 << n):
        for y in range(1 << n):
            acc = 0.0 + 0.0j
            for z in range(1 << len(rest)):
                base = 0
                for m, site in enumerate(rest):
                    base |= ((z >> m) & 1) << site
                xi = base
                yi = base
                for m, site in enumerate(sites):
                    xi |= ((x >> m) & 1) << site
                    yi |= ((y >> m) & 1) << site
                acc += amps[xi] * np.conj(amps[yi])
            rho[x, y] = acc
    return rho


class TestReducedDensityMatrix:
    def test_bell_state_single_site(self):
        bell = StateVector(2, np.array([1, 0, 0, 1]) / math.sqrt(2))
        rho = reduced_density_matrix(bell, Region((0,)))
        assert np.allclose(rho.entries, np.eye(2) / 2, atol=1e-12)

    def test_product_state_is_pure(self):
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.4), 6)
        for sites in ((0,), (1, 3), (0, 2, 5)):
            rho = reduced_density_matrix(state, Region(sites)).entries
            assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-10)

    def test_matches_brute_force_summation(self):
        rng = np.random.default_rng(17)
        state = StateVector(6, random_state_array(6, rng))
        for sites in ((1, 3), (0,), (2, 4, 5), (0, 1, 2, 3, 4, 5)):
            got = reduced_density_matrix(state, Region(sites)).entries
            want = brute_force_rdm(state.amplitudes, 6, sites)
            assert np.abs(got - want).max() < 1e-12

    def test_full_region_gives_projector(self):
        rng = np.random.default_rng(19)
        state = StateVector(3, random_state_array(3, rng))
        rho = reduced_density_matrix(state, Region((0, 1, 2))).entries
        assert np.allclose(rho, np.outer(state.amplitudes, state.amplitudes.conj()), atol=1e-14)

    def test_invariants_hold(self):
        rng = np.random.default_rng(23)
        state = StateVector(5, random_state_array(5, rng))
        rho = reduced_density_matrix(state, Region((1, 2, 4))).entries
        assert np.abs(rho - rho.conj().T).max() < 1e-10
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.eigvalsh(rho)[0] > -1e-10


class TestVonNeumannEntropy:
    def test_pure_state(self):
        rho = DensityMatrix(1, np.diag([1.0, 0.0]))
        assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-10)

    def test_maximally_mixed_qubit(self):
        assert von_neumann_entropy(DensityMatrix(1, np.eye(2) / 2)) == pytest.approx(
            LN2, abs=1e-12
        )

    def test_maximally_mixed_two_qubits(self):
        assert von_neumann_entropy(DensityMatrix(2, np.eye(4) / 4)) == pytest.approx(
            2 * LN2, abs=1e-12
        )

    def test_negative_eigenvalue_raises(self):
        rho = DensityMatrix(1, np.diag([1.1, -0.1]))
        with pytest.raises(ValueError, match="eigenvalue"):
            von_neumann_entropy(rho)


class TestSectorProject:
    def test_diagonal_unchanged(self):
        rho = DensityMatrix(2, np.diag([0.4, 0.3, 0.2, 0.1]))
        for probe in (U1, Z2):
            assert np.array_equal(sector_project(rho, probe).entries, rho.entries)

    def test_same_sector_coherence_kept(self):
        # |01><10| + h.c. connects equal-weight states
        entries = np.zeros((4, 4), dtype=complex)
        entries[1, 2] = entries[2, 1] = 0.5
        entries[1, 1] = entries[2, 2] = 0.5
        rho = DensityMatrix(2, entries)
        for probe in (U1, Z2):
            assert np.array_equal(sector_project(rho, probe).entries, entries)

    def test_cross_sector_coherence_discriminates(self):
        # |00><11| has weights 0 vs 2: removed by U(1), kept by Z2 (same parity)
        entries = np.eye(4, dtype=complex) / 4
        entries[0, 3] = entries[3, 0] = 0.2
        rho = DensityMatrix(2, entries)
        u1 = sector_project(rho, U1).entries
        z2 = sector_project(rho, Z2).entries
        assert u1[0, 3] == 0.0
        assert z2[0, 3] == 0.2

    def test_trace_and_hermiticity_preserved(self):
        rng = np.random.default_rng(29)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = m @ m.conj().T
        rho = DensityMatrix(3, rho / np.trace(rho))
        for probe in (U1, Z2):
            projected = sector_project(rho, probe).entries
            assert np.trace(projected) == np.trace(rho.entries)
            assert np.abs(projected - projected.conj().T).max() < 1e-14

    def test_idempotence_is_exact(self):
        rng = np.random.default_rng(31)
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        rho = DensityMatrix(3, m @ m.conj().T / np.trace(m @ m.conj().T).real)
        for probe in (U1, Z2):
            once = sector_project(rho, probe)
            twice = sector_project(once, probe)
            assert np.array_equal(once.entries, twice.entries)

    def test_probe_kind_validation(self):
        with pytest.raises(ValueError):
            SymmetryProbe("su2")


class TestEntanglementAsymmetry:
    def test_charge_eigenstate_is_exactly_zero(self):
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 6)
        for sites in ((0,), (1, 2), (0, 3, 5)):
            assert entanglement_asymmetry(state, Region(sites), U1) == 0.0

    def test_single_tilted_site_gives_ln2(self):
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, math.pi / 2), 4)
        assert entanglement_asymmetry(state, Region((1,)), U1) == pytest.approx(LN2, abs=1e-12)

    def test_two_tilted_sites_give_three_halves_ln2(self):
        # binomial(2, 1/2) sector weights {1/4, 1/2, 1/4}; the region is pure
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, math.pi / 2), 5)
        expected = 1.5 * LN2
        assert entanglement_asymmetry(state, Region((1, 2)), U1) == pytest.approx(
            expected, abs=1e-12
        )

    def test_nonnegative_on_random_states(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            L = int(rng.integers(2, 7))
            state = StateVector(L, random_state_array(L, rng))
            n = int(rng.integers(1, L + 1))
            sites = tuple(sorted(rng.choice(L, size=n, replace=False).tolist()))
            for probe in (U1, Z2):
                assert entanglement_asymmetry(state, Region(sites), probe) >= 0.0

    def test_dephasing_cannot_lower_entropy(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            state = StateVector(5, random_state_array(5, rng))
            rho = reduced_density_matrix(state, Region((0, 2, 3)))
            for probe in (U1, Z2):
                assert (
                    von_neumann_entropy(sector_project(rho, probe))
                    >= von_neumann_entropy(rho) - 1e-9
                )

    def test_z2_refined_by_u1(self):
        # U(1) projection of the Z2 projection equals the U(1) projection,
        # hence Z2 asymmetry never exceeds U(1) asymmetry
        rng = np.random.default_rng(43)
        for _ in range(30):
            state = StateVector(5, random_state_array(5, rng))
            region = Region((1, 2, 4))
            rho = reduced_density_matrix(state, region)
            via_z2 = sector_project(sector_project(rho, Z2), U1)
            direct = sector_project(rho, U1)
            assert np.array_equal(via_z2.entries, direct.entries)
            assert entanglement_asymmetry(state, region, Z2) <= (
                entanglement_asymmetry(state, region, U1) + 1e-9
            )


class TestChargeMoments:
    def test_ferro_full_chain(self):
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 12)
        mean, var = charge_moments(state, Region(tuple(range(12))))
        assert mean == pytest.approx(12.0, abs=1e-12)
        assert var == pytest.approx(0.0, abs=1e-12)

    def test_tilted_ferro_variance_is_L_sin_squared(self):
        for L, theta in ((4, 0.3), (6, 1.1), (5, math.pi / 2)):
            state = build_initial_state(ProductStateSpec(FERROMAGNETIC, theta), L)
            _, var = charge_moments(state, Region(tuple(range(L))))
            assert var == pytest.approx(L * math.sin(theta) ** 2, abs=1e-10)

    def test_uniform_superposition_variance_counts_sites(self):
        # independent unbiased sites: variance of the region charge equals
        # the region size
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, math.pi / 2), 4)
        _, var = charge_moments(state, Region((0, 1, 2, 3)))
        assert var == pytest.approx(4.0, abs=1e-10)

    def test_mean_matches_distribution(self):
        rng = np.random.default_rng(47)
        state = StateVector(6, random_state_array(6, rng))
        mean, _ = charge_moments(state, Region(tuple(range(6))))
        dist = charge_distribution(state)
        assert mean == pytest.approx(sum(q * p for q, p in dist.items()), abs=1e-10)


class TestChargeDistribution:
    def test_ferro_concentrates_at_plus_L(self):
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.0), 5)
        dist = charge_distribution(state)
        assert dist[5] == pytest.approx(1.0, abs=1e-14)
        assert all(p == 0.0 for q, p in dist.items() if q != 5)

    def test_binomial_law_for_tilted_ferro(self):
        L, theta = 6, 0.7
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, theta), L)
        dist = charge_distribution(state)
        # independent oracle: sum |amplitude|^2 over fixed Hamming weight
        p = np.abs(state.amplitudes) ** 2
        for k in range(L + 1):
            direct = sum(p[x] for x in range(1 << L) if bin(x).count("1") == k)
            binom = (
                math.comb(L, k)
                * math.cos(theta / 2) ** (2 * (L - k))
                * math.sin(theta / 2) ** (2 * k)
            )
            assert dist[L - 2 * k] == pytest.approx(direct, abs=1e-12)
            assert dist[L - 2 * k] == pytest.approx(binom, abs=1e-12)

    def test_normalization(self):
        rng = np.random.default_rng(53)
        state = StateVector(7, random_state_array(7, rng))
        assert sum(charge_distribution(state).values()) == pytest.approx(1.0, abs=1e-10)

    def test_sector_keys(self):
        state = basis_state(3, 0)
        assert list(charge_distribution(state).keys()) == [-3, -1, 1, 3]


class TestProbeRequests:
    def test_region_probe_needs_region(self):
        with pytest.raises(ValueError):
            ProbeRequest("ea_u1")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ProbeRequest("purity")

    def test_channels(self):
        state = build_initial_state(ProductStateSpec(FERROMAGNETIC, 0.5), 4)
        region = Region((0, 1))
        probes = [
            ProbeRequest("ea_u1", region),
            ProbeRequest("ea_z2", region),
            ProbeRequest("ee", region),
            ProbeRequest("eeq", region),
            ProbeRequest("cv"),
            ProbeRequest("qmean"),
            ProbeRequest("pq"),
        ]
        values = evaluate_probes(state, probes)
        assert set(values) == {
            "ea_u1",
            "ea_z2",
            "ee",
            "eeq",
            "cv",
            "qmean",
            "pq:q=-4",
            "pq:q=-2",
            "pq:q=+0",
            "pq:q=+2",
            "pq:q=+4",
        }
        assert values["ea_u1"] == pytest.approx(
            entanglement_asymmetry(state, region, U1), abs=1e-14
        )
        assert values["eeq"] - values["ee"] == pytest.approx(values["ea_u1"], abs=1e-12)
        mean, var = charge_moments(state, Region((0, 1, 2, 3)))
        assert values["cv"] == pytest.approx(var, abs=1e-14)
        assert values["qmean"] == pytest.approx(mean, abs=1e-14)
