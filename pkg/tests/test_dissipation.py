import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import newton

from cfqed.boundary import BoundaryProblem, solve_dressed
from cfqed.constants import R_Q
from cfqed.dissipation import (
    InterModeCoupling,
    LossyMode,
    contour_residue,
    design_bounds,
    gamma1_over_delta,
    modal_decay,
    multimode_gamma,
    phi_from_residue,
    phi_sq_from_alpha,
    purcell_from_admittance,
    purcell_single,
    spin_boson_alpha,
    suppression_zeros,
    x_dephasing_rate,
)
from cfqed.errors import NoZeroFound, RegimeWarning
from cfqed.netfunc import FosterForm
from cfqed.spectra import RabiParams, dressed_matrix_elements, rabi_spectrum


def _heff_gamma(omega_q, modes, couplings):
    """``-2 Im`` of the qubit-like eigenvalue of the dense non-Hermitian Hamiltonian."""
    m = len(modes)
    h = np.zeros((m + 1, m + 1), dtype=complex)
    h[0, 0] = omega_q
    for k, mode in enumerate(modes):
        h[0, k + 1] = mode.g_k * np.exp(1j * mode.phi_k)
        h[k + 1, 0] = np.conj(h[0, k + 1])
        h[k + 1, k + 1] = mode.omega_k - 0.5j * mode.kappa_k
    for (k, l), c in couplings.items():
        h[k + 1, l + 1] = c.j_kl * np.exp(1j * c.theta_kl)
        h[l + 1, k + 1] = c.j_kl * np.exp(-1j * c.theta_kl)
    e = np.linalg.eigvals(h)
    return -2.0 * e[np.argmin(np.abs(e - omega_q))].imag


class TestModalDecay:
    def test_values(self):
        assert modal_decay(0.0, 1e-13) == 0.0
        assert modal_decay(1e-6, 100e-15) == pytest.approx(1e7, rel=1e-14)
        np.testing.assert_allclose(modal_decay([1e-6, 2e-6], [1e-13, 1e-13]), [1e7, 2e7])

    def test_invalid(self):
        with pytest.raises(ValueError):
            modal_decay(1e-6, 0.0)

    @pytest.mark.parametrize("g_shunt", [2e-7, 1e-6])
    def test_vs_complex_root(self, g_shunt):
        # lossless dressed mode, then the complex root of s Y(s) + 1/L_J with a shunt G
        c_inf, c_k, w_k, l_j = 80e-15, 8e-15, 2 * math.pi * 7e9, 10e-9
        dm = solve_dressed(BoundaryProblem(FosterForm(c_inf, ((c_k, w_k),)), l_j))
        w = dm.omega[dm.qubit_index]
        kappa = modal_decay(g_shunt, dm.c_eff[dm.qubit_index])
        assert w * dm.c_eff[dm.qubit_index] / g_shunt > 100

        def f(s):
            return s * c_inf + c_k * s * w_k ** 2 / (s * s + w_k ** 2) + g_shunt + 1.0 / (s * l_j)

        s = newton(f, 1j * w, tol=1e-6, maxiter=100)
        assert -2.0 * s.real == pytest.approx(kappa, rel=0.05)


class TestPurcellSingle:
    def test_zero_coupling(self):
        assert purcell_single(0.0, 1.0, 0.01) == 0.0

    def test_dispersive_limit(self):
        g, d, k = 0.05, 1.0, 1e-3
        assert purcell_single(g, d, k) / k == pytest.approx((g / d) ** 2, rel=1e-4)

    def test_warns_inside_linewidth(self):
        with pytest.warns(RegimeWarning):
            purcell_single(0.01, 0.001, 0.01)

    def test_vs_admittance(self):
        # junction node with a series-RLC branch; g from the lossless dispersive shift
        c_inf, l_j, p = 80e-15, 10e-9, 0.01
        w_p = 1 / math.sqrt(l_j * c_inf)
        w_k = 2 * math.pi * 6.2e9
        c_k = p * c_inf
        l_k = 1 / (c_k * w_k ** 2)
        r = 2.0
        dm = solve_dressed(BoundaryProblem(FosterForm(c_inf, ((c_k, w_k),)), l_j))
        i = dm.qubit_index
        w = dm.omega[i]
        g = math.sqrt((w - w_p) * (w_p - w_k))
        cond = (1 / (r + 1j * w * l_k + 1 / (1j * w * c_k))).real
        gamma_adm = purcell_from_admittance(cond, dm.c_eff[i])

        def f(s):
            return s * c_inf + 1 / (r + s * l_k + 1 / (s * c_k)) + 1 / (s * l_j)

        root = newton(f, 1j * w, tol=1e-3, maxiter=200)
        assert gamma_adm == pytest.approx(-2 * root.real, rel=1e-6)
        assert gamma_adm == pytest.approx(purcell_single(g, w - w_k, r / l_k), rel=0.1)

    def test_admittance_scaling(self):
        assert purcell_from_admittance(0.0, 1e-13) == 0.0
        assert purcell_from_admittance(1e-6, 2e-13) == pytest.approx(0.5 * purcell_from_admittance(1e-6, 1e-13))


class TestMultimode:
    modes = (LossyMode(0.8, 0.01, 0.01, 0.3), LossyMode(1.3, 0.03, 0.01, -0.4))

    def test_uncoupled_is_incoherent_sum(self):
        r = multimode_gamma(1.0, self.modes)
        ref = sum(purcell_single(m.g_k, 1.0 - m.omega_k, m.kappa_k) for m in self.modes)
        assert r["gamma_eff"] == r["gamma_0"] == pytest.approx(ref, rel=1e-15)
        r0 = multimode_gamma(1.0, self.modes, {(0, 1): InterModeCoupling(0.0, 0.7)})
        assert r0["gamma_eff"] == r["gamma_0"]

    def test_additivity(self):
        full = multimode_gamma(1.0, self.modes)["gamma_0"]
        one = multimode_gamma(1.0, self.modes[:1])["gamma_0"]
        assert full - one == pytest.approx(multimode_gamma(1.0, self.modes)["gamma_direct"][1], rel=1e-13)

    def test_lossless_gives_zero(self):
        modes = [LossyMode(m.omega_k, 0.0, m.g_k, m.phi_k) for m in self.modes]
        r = multimode_gamma(1.0, modes, {(0, 1): InterModeCoupling(0.01, 0.2)})
        assert r["gamma_eff"] == 0.0

    @pytest.mark.parametrize("theta", [0.0, 0.4, 2.0])
    def test_phase_flip(self, theta):
        a = multimode_gamma(1.0, self.modes, {(0, 1): InterModeCoupling(0.01, theta)})
        b = multimode_gamma(1.0, self.modes, {(0, 1): InterModeCoupling(0.01, theta + math.pi)})
        assert b["gamma_interference"][(0, 1)] == pytest.approx(-a["gamma_interference"][(0, 1)], rel=1e-12)

    def test_reversed_key(self):
        a = multimode_gamma(1.0, self.modes, {(0, 1): InterModeCoupling(0.01, 0.4)})
        b = multimode_gamma(1.0, self.modes, {(1, 0): InterModeCoupling(0.01, -0.4)})
        assert a["gamma_eff"] == pytest.approx(b["gamma_eff"], rel=1e-15)

    def test_destructive_pair(self):
        # qubit between the modes, wider lower mode, cos(Phi) > 0
        modes = [LossyMode(0.9, 0.05, 0.01), LossyMode(1.1, 0.005, 0.01)]
        r = multimode_gamma(1.0, modes, {(0, 1): InterModeCoupling(0.01, 0.0)})
        assert r["gamma_interference"][(0, 1)] < 0.0
        assert r["gamma_eff"] < r["gamma_0"]

    def test_warns_strong_coupling(self):
        with pytest.warns(RegimeWarning):
            multimode_gamma(1.0, self.modes, {(0, 1): InterModeCoupling(0.2)})

    def test_self_coupling_rejected(self):
        with pytest.raises(ValueError):
            multimode_gamma(1.0, self.modes, {(1, 1): InterModeCoupling(0.01)})

    @pytest.mark.parametrize("kappas", [(0.01, 0.03), (0.05, 0.01), (0.02, 0.02)])
    def test_vs_heff_oracle(self, kappas):
        wq, d = 1.0, 0.2
        modes = [LossyMode(wq - d, kappas[0], 0.05 * d, 0.3), LossyMode(wq + 1.5 * d, kappas[1], 0.05 * d, -0.4)]
        c = {(0, 1): InterModeCoupling(0.02 * d, 0.5)}
        r = multimode_gamma(wq, modes, c)
        exact = _heff_gamma(wq, modes, c)
        assert r["gamma_eff"] == pytest.approx(exact, rel=0.15)
        # the interference part alone, with the O(g^4) background removed
        exact_int = exact - _heff_gamma(wq, modes, {(0, 1): InterModeCoupling(0.0)})
        assert r["gamma_interference"][(0, 1)] == pytest.approx(exact_int, rel=0.15)


class TestSuppressionZeros:
    modes = (LossyMode(0.9, 0.05, 0.01), LossyMode(1.1, 0.005, 0.01))

    def test_no_coupling(self):
        with pytest.raises(NoZeroFound):
            suppression_zeros(self.modes, None, (0.92, 1.08))
        with pytest.raises(NoZeroFound):
            suppression_zeros(self.modes, {(0, 1): InterModeCoupling(0.0)}, (0.92, 1.08))

    def test_engineered_zero(self):
        c = {(0, 1): InterModeCoupling(0.08, 0.0)}
        zeros = suppression_zeros(self.modes, c, (0.92, 1.08))
        assert zeros.size >= 1
        for w in zeros:
            r = multimode_gamma(w, self.modes, c, warn=False)
            assert abs(r["gamma_eff"]) < 1e-3 * r["gamma_0"]

    def test_zero_moves_monotonically(self):
        locs = [suppression_zeros(self.modes, {(0, 1): InterModeCoupling(0.1, th)}, (0.92, 1.08))[0]
                for th in (0.0, 0.05, 0.1, 0.15)]
        assert np.all(np.diff(locs) < 0)

    def test_weak_coupling_has_no_zero(self):
        with pytest.raises(NoZeroFound):
            suppression_zeros(self.modes, {(0, 1): InterModeCoupling(0.005)}, (0.92, 1.08))

    def test_bad_range(self):
        with pytest.raises(ValueError):
            suppression_zeros(self.modes, {(0, 1): InterModeCoupling(0.1)}, (1.0, 0.9))


class TestSpinBoson:
    def test_zero(self):
        assert spin_boson_alpha(0.0, 50.0) == 0.0
        assert gamma1_over_delta(0.0) == 0.0

    def test_device_a_inversion(self):
        assert phi_sq_from_alpha(0.034, 50.0) == pytest.approx(0.010, abs=5e-4)

    def test_unit_alpha_target(self):
        assert phi_sq_from_alpha(1.0, 50.0) == pytest.approx(0.31, abs=5e-3)

    @pytest.mark.parametrize("alpha,printed", [(0.034, 0.21), (0.045, 0.28), (0.056, 0.35)])
    def test_printed_ratios(self, alpha, printed):
        assert round(gamma1_over_delta(alpha), 2) == printed

    def test_resistance_quantum(self):
        assert R_Q == pytest.approx(6453.2, rel=1e-4)

    @given(st.floats(min_value=0.0, max_value=10.0), st.floats(min_value=1.0, max_value=500.0))
    def test_round_trip(self, alpha, z0):
        assert spin_boson_alpha(phi_sq_from_alpha(alpha, z0), z0) == pytest.approx(alpha, rel=1e-14, abs=1e-300)

    def test_invalid(self):
        with pytest.raises(ValueError):
            spin_boson_alpha(0.1, 0.0)
        with pytest.raises(ValueError):
            gamma1_over_delta(-0.1)


class TestResidue:
    c_q, l_q, z0 = 50e-15, 10e-9, 50.0

    def _y(self, l_b):
        c_q, l_q, z0 = self.c_q, self.l_q, self.z0
        return lambda s: s * c_q * (s * s * l_b + z0 * s + 1 / c_q) / ((s * s * l_q * c_q + 1) * (s * l_b + z0))

    def _analytic(self, l_b):
        w = 1 / math.sqrt(self.l_q * self.c_q)
        s = 1j * w
        return s * self.c_q * (s * s * l_b + self.z0 * s + 1 / self.c_q) / (self.l_q * self.c_q * 2 * s * (s * l_b + self.z0))

    @pytest.mark.parametrize("l_b", [50e-12, 200e-12])
    def test_contour_vs_analytic(self, l_b):
        w = 1 / math.sqrt(self.l_q * self.c_q)
        r = contour_residue(self._y(l_b), 1j * w, 0.05 * w)
        assert r == pytest.approx(self._analytic(l_b), rel=1e-6)

    def test_linear_in_residue(self):
        a = phi_from_residue(1e18, 2 * math.pi * 5e9, 50.0)
        assert phi_from_residue(2e18, 2 * math.pi * 5e9, 50.0) == pytest.approx(2 * a, rel=1e-15)
        assert a == pytest.approx(4 * math.pi ** 2 * 50.0 / R_Q * 1e18 / (4 * math.pi * 5e9), rel=1e-15)

    def test_invalid(self):
        with pytest.raises(ValueError):
            phi_from_residue(0.0, 1.0, 50.0)


class TestDesignBounds:
    def test_printed_example(self):
        # the printed bounds follow from Delta = 5e9 entered in cycles per second
        b = design_bounds(1e-6, 5e9, 50.0)
        assert b["alpha_max"] == pytest.approx(3e-5, rel=0.1)
        assert b["phi_sq_max"] == pytest.approx(9e-6, rel=0.1)

    def test_angular_frequency(self):
        b = design_bounds(1e-6, 2 * math.pi * 5e9, 50.0)
        assert b["alpha_max"] == pytest.approx(1 / (4 * math.pi ** 2 * 5e9 * 1e-6), rel=1e-14)

    def test_linearity(self):
        a = design_bounds(1e-6, 1e10, 50.0)
        b = design_bounds(1e-5, 1e10, 50.0)
        assert b["alpha_max"] == pytest.approx(a["alpha_max"] / 10, rel=1e-14)
        assert b["phi_sq_max"] == pytest.approx(a["phi_sq_max"] / 10, rel=1e-14)

    def test_consistent_with_gamma(self):
        d, t1 = 1e10, 2e-6
        a = design_bounds(t1, d, 50.0)["alpha_max"]
        assert gamma1_over_delta(a) * d * t1 == pytest.approx(1.0, rel=1e-14)

    def test_invalid(self):
        with pytest.raises(ValueError):
            design_bounds(0.0, 1e10, 50.0)


@pytest.mark.parametrize("g", [0.1, 0.5, 1.0, 1.2])
def test_x_dephasing_protected(g):
    s = rabi_spectrum(RabiParams(1.0, 1.0, g, 60), 2)
    x00 = dressed_matrix_elements(s, "X", 0, 0)
    x11 = dressed_matrix_elements(s, "X", 1, 1)
    s_x0 = 1.0
    assert x_dephasing_rate(x00, x11, s_x0) < 1e-18 * s_x0
