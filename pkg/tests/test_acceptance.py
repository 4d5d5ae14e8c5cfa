"""Acceptance criteria at their stated tolerances.

Each test carries ``@pytest.mark.acceptance(number, title)``; the conftest
prints one PASS/FAIL line per criterion after the run.
"""

import math
import time
import warnings

import numpy as np
import pytest
import scipy.linalg

from cfqed import jacobi
from cfqed.boundary import BoundaryProblem, boundary_residual, single_mode_exact, solve_dressed, spatial_modes
from cfqed.dissipation import InterModeCoupling, LossyMode, gamma1_over_delta, multimode_gamma, purcell_single
from cfqed.errors import NearDegenerateWarning
from cfqed.jacobi import JacobiMatrix
from cfqed.mcf import BlockTridiagonal, TwoModeParams, block_g00, mcf_eigenvalues, perturbative_cross_kerr
from cfqed.mcf import twomode_observables
from cfqed.netfunc import FosterForm, TLineEnvironment
from cfqed.quantize import (TruncationScheme, build_hamiltonian, cosine_matrix_element, lowest_eigenpairs,
                            multimode_cosine, prefactor_distributed, uv_scaling_fit)
from cfqed.spectra import (RabiParams, TransmonParams, dressed_matrix_elements, koch_design_g01, rabi_ground_photons,
                           rabi_spectrum, transmon_observables)
from cfqed.synthesis import CauerLadder, cauer_to_jacobi, foster_to_cauer_to_foster, jacobi_to_cauer
from conftest import random_foster

pytestmark = pytest.mark.acceptance
L_J = 10e-9


def acceptance(num, title):
    return pytest.mark.acceptance(num, title)


@acceptance(1, "transmon reference spectrum")
def test_01_transmon_reference():
    # the timing excludes one-off kernel compilation
    transmon_observables(TransmonParams(15.0, 0.25, 0.0, 10))
    t0 = time.perf_counter()
    o = transmon_observables(TransmonParams(15.0, 0.25, 0.0, 40))
    assert o["omega01"] == pytest.approx(5.214, abs=1e-3)
    assert o["alpha"] == pytest.approx(-0.283, abs=1e-3)
    assert o["n01"] == pytest.approx(1.14, abs=0.01)
    assert o["n_ratio"] == pytest.approx(1.37, abs=0.01)
    assert time.perf_counter() - t0 < 1.0


RABI_REFERENCE = [(0.1, 0.90, 0.76), (0.3, 0.70, 0.90), (0.5, 0.51, 1.09),
            (0.8, 0.26, 1.51), (1.0, 0.14, 1.89), (1.2, 0.06, 2.33)]


@acceptance(2, "Rabi reference table")
def test_02_rabi_reference():
    t0 = time.perf_counter()
    for g, eps, x01 in RABI_REFERENCE:
        s = rabi_spectrum(RabiParams(1.0, 1.0, g, 50), 6)
        assert s.parity_expectation(0) == pytest.approx(-1.0, abs=1e-12)
        assert s.parity_expectation(1) == pytest.approx(1.0, abs=1e-12)
        assert abs(dressed_matrix_elements(s, "X", 0, 0)) < 1e-12
        assert abs(dressed_matrix_elements(s, "X", 1, 1)) < 1e-12
        assert s.energies[1] - s.energies[0] == pytest.approx(eps, abs=0.01)
        assert abs(dressed_matrix_elements(s, "X", 0, 1)) == pytest.approx(x01, abs=0.03)
    assert time.perf_counter() - t0 < 5.0


@acceptance(3, "Rabi ground-state photons")
def test_03_ground_photons():
    assert rabi_ground_photons(RabiParams(1.0, 1.0, 1.0, 60)) == pytest.approx(0.68, abs=0.02)
    g = 0.02
    assert rabi_ground_photons(RabiParams(1.0, 1.0, g)) == pytest.approx(g ** 2 / 2.0 ** 2, rel=0.05)


REFERENCE_FIT = TwoModeParams(12.42, 10.93, 0.470, 0.148, 12)


@pytest.fixture(scope="module")
def two_mode_reference():
    t0 = time.perf_counter()
    o = twomode_observables(REFERENCE_FIT)
    return o, time.perf_counter() - t0


@acceptance(4, "two-mode transmon reference fit")
def test_04_anharmonicities_and_cross_kerr(two_mode_reference):
    o, elapsed = two_mode_reference
    assert o["alpha_d"] == pytest.approx(-0.379, abs=0.003)
    assert o["alpha_q"] == pytest.approx(-0.342, abs=0.003)
    assert o["eta"] == pytest.approx(-0.500, abs=0.005)
    assert perturbative_cross_kerr(0.380, 0.340) == pytest.approx(0.719, abs=0.002)
    assert elapsed < 60.0


@acceptance(4, "two-mode transmon reference fit")
def test_04_mode_frequencies(two_mode_reference):
    # These parameters give 5.568 and 6.621 GHz; see README "Known deviation".
    o, _ = two_mode_reference
    assert o["omega_d"] == pytest.approx(5.54, abs=0.010)
    assert o["omega_q"] == pytest.approx(6.68, abs=0.010)


@acceptance(5, "spin-boson decay ratios")
def test_05_spin_boson_ratios():
    for a, ref, printed in ((0.034, 0.214, 0.21), (0.045, 0.283, 0.28), (0.056, 0.352, 0.35)):
        g = gamma1_over_delta(a)
        assert g == pytest.approx(2 * math.pi * a, rel=1e-15)
        assert g == pytest.approx(ref, abs=5e-4)
        assert round(g, 2) == printed


@acceptance(6, "dispersive design example")
def test_06_dispersive_design():
    assert koch_design_g01(60.0, 5.2, 7.0, 0.5e-3)["g01"] == pytest.approx(0.070, abs=0.002)


@acceptance(7, "interlacing and root count (500 problems)")
def test_07_interlacing():
    rng = np.random.default_rng(7)
    for _ in range(500):
        n = int(rng.integers(0, 9))
        y = random_foster(rng, n)
        p = BoundaryProblem(y, L_J)
        w = solve_dressed(p).omega
        assert len(w) == n + 1
        assert np.all(w[:-1] < y.omega_k) and np.all(y.omega_k < w[1:])
        assert np.max(np.abs(boundary_residual(p, w))) < 1e-10


@acceptance(8, "Foster/Cauer/Jacobi round trips (200 instances)")
def test_08_round_trips():
    rng = np.random.default_rng(8)
    for _ in range(200):
        y = random_foster(rng, int(rng.integers(1, 7)))
        with warnings.catch_warnings():
            warnings.simplefilter("error", NearDegenerateWarning)
            back = foster_to_cauer_to_foster(y)
        np.testing.assert_allclose(back.omega_k, y.omega_k, rtol=1e-8)
        np.testing.assert_allclose(back.c_k, y.c_k, rtol=1e-8)
        assert back.c_inf == pytest.approx(y.c_inf, rel=1e-8)

        secs = tuple((rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0)) for _ in range(int(rng.integers(1, 9))))
        j = cauer_to_jacobi(CauerLadder("TypeI", secs))
        lad = jacobi_to_cauer(j, c1=secs[0][1])
        np.testing.assert_allclose(np.array(lad.sections), np.array(secs), rtol=1e-8)
        j2 = cauer_to_jacobi(lad)
        np.testing.assert_allclose(j2.diag, j.diag, rtol=1e-8)
        np.testing.assert_allclose(j2.offdiag, j.offdiag, rtol=1e-8)


def _random_blocks(rng, n_blocks, size):
    a = [m + m.T for m in rng.standard_normal((n_blocks, size, size))]
    b = list(rng.standard_normal((n_blocks - 1, size, size)))
    return BlockTridiagonal(tuple(a), tuple(b))


@acceptance(9, "continued fractions vs dense oracles")
def test_09_scalar_cf_oracle():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = int(rng.integers(1, 31))
        scale = 10.0 ** rng.uniform(-3, 3)
        j = JacobiMatrix(scale * rng.uniform(-1, 1, n), scale * rng.uniform(0.01, 1, n - 1))
        tol = 1e-10 * j.norm()
        e_ref, v_ref = scipy.linalg.eigh_tridiagonal(j.diag, j.offdiag)
        e = jacobi.eigenvalues(j)
        np.testing.assert_allclose(e, e_ref, atol=tol)
        np.testing.assert_allclose(jacobi.residues(j, e), v_ref[0] ** 2, atol=1e-10)
        z = scale * (0.3 + 0.9j)
        ref = np.linalg.inv(z * np.eye(n) - j.dense())[0, 0]
        assert abs(jacobi.resolvent_g00(j, z) - ref) <= 1e-10 * abs(ref) + 1e-10 / scale


@acceptance(9, "continued fractions vs dense oracles")
@pytest.mark.parametrize("n_blocks,size", [(20, 20), (40, 10), (100, 4), (400, 1)])
def test_09_matrix_cf_oracle(n_blocks, size):
    h = _random_blocks(np.random.default_rng(n_blocks), n_blocks, size)
    ref = np.linalg.eigvalsh(h.dense())
    scale = np.abs(ref).max()
    got = mcf_eigenvalues(h, h.gershgorin(), center=n_blocks // 2, warn=False)
    np.testing.assert_allclose(got, ref, atol=1e-9 * scale)


@acceptance(9, "continued fractions vs dense oracles")
def test_09_scalar_reduction():
    rng = np.random.default_rng(99)
    for n in (1, 5, 30):
        a, b = rng.uniform(-1, 3, n), rng.uniform(0.2, 1.5, n - 1)
        h = BlockTridiagonal(tuple(np.array([[x]]) for x in a), tuple(np.array([[x]]) for x in b))
        j = JacobiMatrix(a, b)
        for e in (-3.1, 0.37, 4.2):
            assert block_g00(h, e)[0, 0] == pytest.approx(jacobi.resolvent_g00(j, e).real, rel=1e-13)


def _x_operator(size):
    a = np.diag(np.sqrt(np.arange(1, size)), 1)
    return a + a.T


@acceptance(10, "cosine matrix elements vs exponential oracle")
@pytest.mark.parametrize("lam", [0.3, 0.8, 1.5])
def test_10_cosine_oracle(lam):
    x = _x_operator(120)
    ref = (scipy.linalg.expm(1j * lam * x) + scipy.linalg.expm(-1j * lam * x)).real / 2.0
    for n in range(31):
        for m in range(31):
            c = cosine_matrix_element(n, m, lam)
            if (n - m) % 2:
                assert c == 0.0
            else:
                assert abs(c - ref[n, m]) < 1e-8


@acceptance(10, "cosine matrix elements vs exponential oracle")
def test_10_multimode_non_factorization():
    size = 60
    x = _x_operator(size)
    eye = np.eye(size)
    w, v = np.linalg.eigh(0.4 * np.kron(x, eye) + 0.3 * np.kron(eye, x))
    ref = (v * np.cos(w)) @ v.T
    c = multimode_cosine((0.4, 0.3), 20)
    np.testing.assert_allclose(c[:21, :21], ref[:21, :21], atol=1e-8)
    product = cosine_matrix_element(1, 0, 0.4) * cosine_matrix_element(1, 0, 0.3)
    assert abs(c[22, 0] - ref[size + 1, 0]) < 1e-8
    assert abs(c[22, 0] - product) > 1e-2


@acceptance(11, "ultraviolet scaling of participation")
def test_11_uv_scaling():
    v, length = 1.2e8, 0.01
    c_r = length / (50.0 * v)
    env = TLineEnvironment(50.0, length, v, length, c_j=c_r / 10.0)
    dm = spatial_modes(env, L_J, 201)
    fit = uv_scaling_fit(dm, dm.omega[20])
    assert fit.exponent == pytest.approx(-1.0, abs=0.05)
    ref = prefactor_distributed(c_r, v, c_r / 10.0, length)
    assert dm.participation_sq[100] * dm.omega[100] ** 2 == pytest.approx(ref, rel=0.05)


@acceptance(12, "Fock truncation monotonicity")
@pytest.mark.parametrize("lam", [0.2, 0.8])
def test_12_truncation_monotonicity(lam):
    prev = None
    for n in range(10, 19):
        h = build_hamiltonian([lam, 0.5 * lam], 2.0, TruncationScheme(n, 4), "even", hbar=1.0, omegas=[1.0, 1.4])
        e = lowest_eigenpairs(h, 6)[0]
        if prev is not None:
            assert np.all(e <= prev + 1e-12)
        prev = e


@acceptance(13, "multimode Purcell interference")
def test_13_purcell():
    modes = [LossyMode(0.8, 0.02, 0.03, 0.3), LossyMode(1.3, 0.04, 0.05, -0.2)]
    r = multimode_gamma(1.0, modes, {(0, 1): InterModeCoupling(0.0, 0.7)})
    ref = sum(purcell_single(m.g_k, 1.0 - m.omega_k, m.kappa_k) for m in modes)
    assert r["gamma_eff"] == r["gamma_0"] == pytest.approx(ref, rel=1e-15)
    for theta in (0.0, 0.4, 2.0):
        a = multimode_gamma(1.0, modes, {(0, 1): InterModeCoupling(0.01, theta)})
        b = multimode_gamma(1.0, modes, {(0, 1): InterModeCoupling(0.01, theta + math.pi)})
        assert b["gamma_interference"][(0, 1)] == pytest.approx(-a["gamma_interference"][(0, 1)], rel=1e-12)
    pair = [LossyMode(0.9, 0.05, 0.01), LossyMode(1.1, 0.005, 0.01)]
    d = multimode_gamma(1.0, pair, {(0, 1): InterModeCoupling(0.01, 0.0)})
    assert d["gamma_eff"] < d["gamma_0"]


@acceptance(14, "single-mode closed form vs boundary solver (100 triples)")
def test_14_single_mode_closed_form():
    rng = np.random.default_rng(14)
    for _ in range(100):
        w_p = 2 * math.pi * rng.uniform(3e9, 9e9)
        w_r = 2 * math.pi * rng.uniform(3e9, 9e9)
        p = rng.uniform(0.0, 0.3)
        c_inf = 1.0 / (L_J * w_p ** 2)
        dm = solve_dressed(BoundaryProblem(FosterForm(c_inf, ((p * c_inf, w_r),)), L_J))
        np.testing.assert_allclose(dm.omega, single_mode_exact(w_p, w_r, p), rtol=1e-12)
