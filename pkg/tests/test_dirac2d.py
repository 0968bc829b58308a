import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracjc import dirac2d as d2
from diracjc import propagator as prop
from diracjc.fockspace import (
    DOWN,
    FockSpace,
    ModeLayout,
    SpinorState,
    TailTooLarge,
    build_ladder,
    chiral_number_state,
    interior_indices,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def interior(space):
    idx = interior_indices(space)
    return np.ix_(idx, idx)


def doublet_start(space, n_l):
    return SpinorState.product(chiral_number_state(space, n_l - 1), DOWN, space)


class TestPhysParams:
    def test_derived(self):
        p = d2.PhysParams(m=2.0, c=3.0, omega=0.5, hbar=1.5)
        assert p.xi == pytest.approx(1.5 * 0.5 / 18)
        assert p.delta_width == pytest.approx(math.sqrt(1.5 / 1.0))
        assert p.coupling == pytest.approx(2j * 18 * math.sqrt(p.xi) / 1.5)

    def test_from_xi_round_trip(self):
        assert d2.PhysParams.from_xi(0.37, m=2, c=0.5, hbar=3).xi == pytest.approx(0.37, rel=1e-14)

    def test_free_limit_allowed(self):
        p = d2.PhysParams(omega=0.0)
        assert p.xi == 0 and math.isinf(p.delta_width)

    @pytest.mark.parametrize("kw", [dict(m=0), dict(c=-1), dict(omega=-0.1), dict(hbar=0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            d2.PhysParams(**kw)


class TestCartesian:
    def test_free_dirac_with_explicit_width(self):
        space = FockSpace(4)
        params = d2.PhysParams(m=1.3, c=0.7, omega=0.0)
        h = d2.build_hamiltonian_cartesian(params, space, width=0.8).entries
        a, a_dag = build_ladder(4)
        eye = np.eye(5)
        p = 1j * (a_dag.entries - a.entries) / (math.sqrt(2) * 0.8)
        px, py = np.kron(p, eye), np.kron(eye, p)
        expected = 0.7 * (np.kron(SX, px) + np.kron(SY, py)) + 1.3 * 0.49 * np.kron(SZ, np.eye(25))
        np.testing.assert_allclose(h, expected, atol=1e-14)

    def test_free_dirac_default_width_is_rest_energy(self):
        space = FockSpace(3)
        h = d2.build_hamiltonian_cartesian(d2.PhysParams(), space).entries
        np.testing.assert_allclose(h, np.kron(SZ, np.eye(space.dim)), atol=0)

    def test_hermitian(self):
        h = d2.build_hamiltonian_cartesian(d2.PhysParams(omega=0.5), FockSpace(8)).entries
        assert np.max(np.abs(h - h.conj().T)) < 1e-12

    def test_lowest_doublet_in_spectrum(self):
        params = d2.PhysParams(omega=0.5)
        evals = np.linalg.eigvalsh(d2.build_hamiltonian_cartesian(params, FockSpace(8)).entries)
        e = math.sqrt(1 + 4 * 0.5)
        for target in (e, -e):
            assert np.min(np.abs(evals - target)) < 1e-9

    def test_rejects_single_mode(self):
        with pytest.raises(ValueError):
            d2.build_hamiltonian_cartesian(d2.PhysParams(), FockSpace(4, ModeLayout.SINGLE_CHIRAL_LEFT))

    def test_components_match_coupled_equations(self):
        # upper-lower block is c[(p_x + i m w x) - i(p_y + i m w y)]
        space = FockSpace(5)
        params = d2.PhysParams(m=1.1, c=0.9, omega=0.6)
        h = d2.build_hamiltonian_cartesian(params, space).entries
        a, a_dag = build_ladder(5)
        w = params.delta_width
        r = w * (a.entries + a_dag.entries) / math.sqrt(2)
        p = 1j * (a_dag.entries - a.entries) / (math.sqrt(2) * w)
        eye = np.eye(6)
        x, y, px, py = np.kron(r, eye), np.kron(eye, r), np.kron(p, eye), np.kron(eye, p)
        mw = params.m * params.omega
        block = params.c * ((px + 1j * mw * x) - 1j * (py + 1j * mw * y))
        np.testing.assert_allclose(h[:space.dim, space.dim:], block, atol=1e-13)


class TestChiralForms:
    def test_jc_zero_coupling(self):
        space = FockSpace(3, ModeLayout.SINGLE_CHIRAL_LEFT)
        h = d2.build_hamiltonian_jc(d2.PhysParams(m=2.0, c=1.5), space).entries
        np.testing.assert_array_equal(h, 4.5 * np.kron(SZ, np.eye(4)))

    def test_ajc_zero_coupling(self):
        space = FockSpace(3)
        h = d2.build_hamiltonian_ajc(d2.PhysParams(), space).entries
        np.testing.assert_array_equal(h, np.kron(SZ, np.eye(space.dim)))

    def test_jc_exact_square_spectrum(self):
        space = FockSpace(6, ModeLayout.SINGLE_CHIRAL_LEFT)
        evals = np.linalg.eigvalsh(d2.build_hamiltonian_jc(d2.PhysParams.from_xi(2), space).entries)
        assert np.min(np.abs(evals - 3)) < 1e-12
        assert np.min(np.abs(evals + 3)) < 1e-12

    def test_jc_coupling_pairs_doublet(self):
        space = FockSpace(5, ModeLayout.SINGLE_CHIRAL_LEFT)
        params = d2.PhysParams.from_xi(0.3)
        h = d2.build_hamiltonian_jc(params, space).entries
        n = 3
        up, down = space.index(n, spin=0), space.index(n - 1, spin=1)
        assert h[up, down] == pytest.approx(params.hbar * params.coupling * math.sqrt(n))

    @pytest.mark.parametrize("omega", [0.0, 0.3, 1.0])
    def test_cartesian_equals_jc_on_interior(self, omega):
        space = FockSpace(8)
        params = d2.PhysParams(omega=omega)
        cart = d2.build_hamiltonian_cartesian(params, space).entries
        jc = d2.build_hamiltonian_jc(params, space).entries
        assert np.max(np.abs((cart - jc)[interior(space)])) < 1e-10

    @pytest.mark.parametrize("omega", [0.0, 0.3, 1.0])
    def test_chiral_basis_change(self, omega):
        space = FockSpace(8)
        params = d2.PhysParams(omega=omega)
        in_chiral, labels = d2.to_chiral_basis(d2.build_hamiltonian_cartesian(params, space))
        single = d2.build_hamiltonian_jc(params, FockSpace(8, ModeLayout.SINGLE_CHIRAL_LEFT))
        assert np.max(np.abs(in_chiral - d2.lift_single_chiral(single, labels))) < 1e-10

    def test_ajc_is_negated_omega_partner(self):
        space = FockSpace(8)
        params = d2.PhysParams(omega=0.3)
        partner = d2.build_hamiltonian_cartesian(params, space, partner=True)
        ajc = d2.build_hamiltonian_ajc(params, space).entries
        assert np.max(np.abs((partner.entries - ajc)[interior(space)])) < 1e-10
        in_chiral, labels = d2.to_chiral_basis(partner)
        single = d2.build_hamiltonian_ajc(params, FockSpace(8, ModeLayout.SINGLE_CHIRAL_RIGHT))
        assert np.max(np.abs(in_chiral - d2.lift_single_chiral(single, labels))) < 1e-10

    def test_ajc_spectrum_mirrors_jc(self):
        params = d2.PhysParams.from_xi(0.7)
        space = FockSpace(6, ModeLayout.SINGLE_CHIRAL_RIGHT)
        evals = np.linalg.eigvalsh(d2.build_hamiltonian_ajc(params, space).entries)
        for n_r in range(1, 6):
            e = math.sqrt(1 + 4 * 0.7 * n_r)
            assert np.min(np.abs(evals - e)) < 1e-12
            assert np.min(np.abs(evals + e)) < 1e-12


class TestSpectrum:
    def test_free_limit(self):
        for n_l in (1, 4):
            s = d2.spectrum(d2.PhysParams(m=2, c=1), n_l)
            assert (s.energy_plus, s.energy_minus, s.alpha, s.beta) == (2.0, -2.0, 1.0, 0.0)

    def test_exact_square(self):
        s = d2.spectrum(d2.PhysParams.from_xi(2), 1)
        assert s.energy_plus == pytest.approx(3, abs=1e-15)
        assert s.alpha == pytest.approx(math.sqrt(2 / 3), abs=1e-15)
        assert s.beta == pytest.approx(math.sqrt(1 / 3), abs=1e-15)

    def test_sqrt3_and_diagonalization(self):
        params = d2.PhysParams.from_xi(0.25)
        assert d2.spectrum(params, 2).energy_plus == pytest.approx(1.7320508, abs=1e-7)
        evals = np.linalg.eigvalsh(d2.build_hamiltonian_jc(params, FockSpace(5)).entries)
        assert np.min(np.abs(evals - math.sqrt(3))) < 1e-12

    def test_rejects_n_l_zero(self):
        with pytest.raises(ValueError):
            d2.spectrum(d2.PhysParams(), 0)

    @given(st.floats(0, 50), st.integers(1, 200))
    def test_invariants(self, xi, n_l):
        s = d2.spectrum(d2.PhysParams.from_xi(xi), n_l)
        assert s.alpha ** 2 + s.beta ** 2 == pytest.approx(1, abs=1e-12)
        assert s.alpha >= s.beta >= 0
        assert s.energy_plus == -s.energy_minus

    @pytest.mark.parametrize("xi", [0.05, 0.5, 2.0])
    def test_eigenstates(self, xi):
        space = FockSpace(8)
        params = d2.PhysParams.from_xi(xi)
        h = d2.build_hamiltonian_jc(params, space).entries
        for n_l in range(1, 7):
            e = d2.spectrum(params, n_l).energy_plus
            for sign in (1, -1):
                v = d2.eigenstate(params, space, n_l, sign).amplitudes
                assert np.max(np.abs(h @ v - sign * e * v)) < 1e-10

    def test_initial_state_decomposition(self):
        # |n_l-1>|down> = i beta |+E> - i alpha |-E>
        space = FockSpace(4, ModeLayout.SINGLE_CHIRAL_LEFT)
        params = d2.PhysParams.from_xi(0.8)
        s = d2.spectrum(params, 2)
        combo = (1j * s.beta * d2.eigenstate(params, space, 2, 1).amplitudes
                 - 1j * s.alpha * d2.eigenstate(params, space, 2, -1).amplitudes)
        np.testing.assert_allclose(combo, doublet_start(space, 2).amplitudes, atol=1e-15)


class TestClosedFormDynamics:
    def test_initial_condition(self):
        space = FockSpace(4, ModeLayout.SINGLE_CHIRAL_LEFT)
        psi = d2.evolve_closed_form(d2.PhysParams.from_xi(1.3), 3, 0.0, space)
        np.testing.assert_array_equal(psi.amplitudes, doublet_start(space, 3).amplitudes)

    def test_norm_random_times(self):
        rng = np.random.default_rng(3)
        params = d2.PhysParams.from_xi(0.9)
        for t in rng.uniform(-100, 100, size=100):
            assert d2.evolve_closed_form(params, 2, t).norm() == pytest.approx(1, abs=1e-12)

    def test_quarter_period_amplitude(self):
        params = d2.PhysParams.from_xi(2)
        c_down, c_up = d2.doublet_amplitudes(params, 1, math.pi / 6)
        assert c_up == pytest.approx(math.sqrt(8 / 9), abs=1e-12)
        assert abs(c_down) == pytest.approx(1 / 3, abs=1e-12)

    def test_matches_propagator_random_triples(self):
        rng = np.random.default_rng(11)
        space = FockSpace(8)
        for _ in range(50):
            xi, n_l, t = rng.uniform(0.01, 3), int(rng.integers(1, 7)), rng.uniform(0, 20)
            params = d2.PhysParams.from_xi(xi)
            decomp = prop.diagonalize(d2.build_hamiltonian_jc(params, space))
            numeric = prop.evolve(decomp, doublet_start(space, n_l), t).amplitudes
            exact = d2.evolve_closed_form(params, n_l, t, space).amplitudes
            assert np.linalg.norm(numeric - exact) < 1e-9

    def test_rejects_n_l_zero(self):
        with pytest.raises(ValueError):
            d2.evolve_closed_form(d2.PhysParams(), 0, 1.0)


class TestZitterbewegung:
    def test_t0(self):
        tr = d2.zitterbewegung_trace(d2.PhysParams.from_xi(0.4, hbar=2.0), 3, [0.0])
        assert (tr.lz[0], tr.sz[0], tr.jz[0]) == (-4.0, -1.0, 2.0 * (0.5 - 3))

    def test_peak(self):
        tr = d2.zitterbewegung_trace(d2.PhysParams.from_xi(2), 1, [math.pi / 6])
        assert tr.sz[0] == pytest.approx(7 / 18, abs=1e-12)

    def test_jz_constant(self):
        tr = d2.zitterbewegung_trace(d2.PhysParams.from_xi(0.7), 4, np.linspace(0, 30, 400))
        assert np.ptp(tr.jz) < 1e-12
        np.testing.assert_allclose(tr.lz + tr.sz, tr.jz, atol=1e-12)

    def test_empty_times_rejected(self):
        with pytest.raises(ValueError):
            d2.zitterbewegung_trace(d2.PhysParams(), 1, [])


class TestNonrelativistic:
    def test_free_limit_zero(self):
        assert d2.nonrelativistic_residual(d2.PhysParams(), 1, 3.7) == 0.0

    @staticmethod
    def max_residual(xi, n_l=1):
        params = d2.PhysParams.from_xi(xi)
        w = float(d2.zitterbewegung_frequency(params, n_l))
        return float(np.max(d2.nonrelativistic_residual(params, n_l, np.linspace(0, 2 * math.pi / w, 4001))))

    def test_quadratic_scaling(self):
        ratio = self.max_residual(0.02) / self.max_residual(0.01)
        assert 3.5 <= ratio <= 4.5

    def test_quadratic_scaling_fixed_phase(self):
        def at_phase(xi):
            params = d2.PhysParams.from_xi(xi)
            t = (math.pi / 2) / float(d2.zitterbewegung_frequency(params, 1))
            return d2.nonrelativistic_residual(params, 1, t)
        assert 3.5 <= at_phase(0.02) / at_phase(0.01) <= 4.5

    def test_bound(self):
        assert self.max_residual(0.01) < 4 * 0.01 ** 2 * 10

    def test_warns_outside_regime(self):
        with pytest.warns(d2.ExpansionRegimeWarning):
            d2.nonrelativistic_residual(d2.PhysParams.from_xi(0.5), 1, 1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            d2.nonrelativistic_residual(d2.PhysParams.from_xi(0.1), 1, 1.0)


class TestCollapseRevival:
    def test_t0(self):
        tr = d2.collapse_revival_trace(d2.PhysParams.from_xi(0.1), 1.5j, [0.0])
        assert tr.sz[0] == -0.5
        assert tr.lz[0] == pytest.approx(-2.25, abs=1e-15)

    def test_vacuum_reduces_to_single_frequency(self):
        xi = 0.3
        params = d2.PhysParams.from_xi(xi)
        times = np.linspace(0, 20, 300)
        tr = d2.collapse_revival_trace(params, 0, times)
        expected = -0.5 + 4 * xi / (1 + 4 * xi) * np.sin(math.sqrt(1 + 4 * xi) * times) ** 2
        np.testing.assert_array_equal(tr.sz, expected)

    def test_sum_rule_and_bounds(self):
        tr = d2.collapse_revival_trace(d2.PhysParams.from_xi(0.1), 2, np.linspace(0, 50, 200))
        assert np.max(np.abs(tr.lz + tr.sz + 4.5)) < 1e-10
        assert np.all(tr.sz >= -0.5) and np.all(tr.sz <= 0.5)

    def test_series_length_from_tail(self):
        n = d2.revival_terms(2.0)
        from scipy.stats import poisson
        assert poisson.sf(n - 1, 4.0) < 1e-12
        assert poisson.sf(n - 2, 4.0) >= 1e-12

    def test_explicit_short_series_rejected(self):
        with pytest.raises(TailTooLarge):
            d2.collapse_revival_trace(d2.PhysParams.from_xi(0.1), 2, [0.0], n_terms=5)

    def test_matches_propagator(self):
        params = d2.PhysParams.from_xi(0.2)
        space = FockSpace(25, ModeLayout.SINGLE_CHIRAL_LEFT)
        from diracjc.fockspace import coherent_state
        psi0 = SpinorState.product(coherent_state(1.2, space), DOWN, space)
        times = np.linspace(0, 30, 150)
        numeric = prop.angular_momentum_trajectory(
            prop.diagonalize(d2.build_hamiltonian_jc(params, space)), psi0,
            d2.orbital_lz(space), d2.spin_sz(space), times)
        series = d2.collapse_revival_trace(params, 1.2, times)
        assert np.max(np.abs(numeric.sz - series.sz)) < 1e-7
        assert np.max(np.abs(numeric.lz - series.lz)) < 1e-7
