import math
import warnings

import mpmath
import scipy.linalg
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfqed import jacobi
from cfqed.errors import NearDegenerateError, NearDegenerateWarning, NegativeElement, NonRealizable, VariantMismatch
from cfqed.netfunc import FosterForm, eval_foster
from cfqed.synthesis import (
    CauerLadder,
    cauer_eval,
    cauer_eval_lentz,
    cauer_expand,
    cauer_to_foster,
    cauer_to_jacobi,
    foster_to_cauer_to_foster,
    jacobi_to_cauer,
    ladder_resolvent,
)

from conftest import random_foster


def _grid_off_poles(y, n=60):
    top = 2.0 * (y.omega_k[-1] if y.n_branches else 1e10)
    g = np.linspace(top / n, top, n)
    if y.n_branches:
        g = g[np.min(np.abs(g[:, None] - y.omega_k[None, :]) / y.omega_k[None, :], axis=1) > 1e-4]
    return g


class TestCauerExpand:
    def test_capacitor_only(self):
        lad = cauer_expand(FosterForm(3e-14), "TypeII")
        assert lad.leading_c0 == pytest.approx(3e-14)
        assert lad.sections == ()

    def test_single_branch(self):
        y = FosterForm(5e-14, ((2e-14, 4e10),))
        lad = cauer_expand(y)
        # lim Y/s over the high-frequency expansion is the direct capacitance
        assert lad.leading_c0 == pytest.approx(5e-14)
        assert len(lad.sections) == 1
        for w in (1e10, 3e10, 7e10):
            assert cauer_eval(lad, w) == pytest.approx(eval_foster(y, w), rel=1e-12)

    def test_four_branch_eval(self, rng):
        y = random_foster(rng, 4)
        lad = cauer_expand(y)
        g = _grid_off_poles(y)
        np.testing.assert_allclose(cauer_eval(lad, g), eval_foster(y, g), rtol=1e-9)

    def test_type_i(self):
        y = FosterForm(0.0, ((2e-14, 4e10), (1e-14, 9e10)))
        lad = cauer_expand(y, "TypeI")
        assert lad.variant == "TypeI"
        g = _grid_off_poles(y)
        np.testing.assert_allclose(cauer_eval(lad, g), eval_foster(y, g), rtol=1e-10)

    def test_dc_path_gives_terminal_inductor(self):
        y = FosterForm(5e-14, ((2e-14, 4e10),), l0=2e-9)
        lad = cauer_expand(y)
        assert lad.l_tail is not None
        g = _grid_off_poles(y)
        np.testing.assert_allclose(cauer_eval(lad, g), eval_foster(y, g), rtol=1e-10)

    @pytest.mark.parametrize("y,variant", [
        (FosterForm(0.0, ((1e-14, 1e10),)), "TypeII"),
        (FosterForm(1e-14, ((1e-14, 1e10),)), "TypeI"),
    ])
    def test_variant_mismatch(self, y, variant):
        with pytest.raises(VariantMismatch):
            cauer_expand(y, variant)

    def test_non_pr_input(self):
        with pytest.raises(NegativeElement):
            cauer_expand(FosterForm.unchecked(1e-14, ((-1e-14, 1e10),)))

    def test_near_degenerate_warns(self):
        y = FosterForm(5e-14, ((1e-14, 4e10), (1e-14, 4.0004e10)))
        with pytest.warns(NearDegenerateWarning):
            foster_to_cauer_to_foster(y)

    def test_coincident_poles_raise(self):
        y = FosterForm(5e-14, ((1e-14, 4e10), (1e-14, 4e10 * (1 + 1e-12))))
        with pytest.raises(NearDegenerateError):
            cauer_expand(y)


class TestCauerEval:
    def test_empty_type_ii(self):
        lad = CauerLadder("TypeII", (), 2e-14)
        assert cauer_eval(lad, 1e10) == pytest.approx(1j * 1e10 * 2e-14)

    def test_single_section_type_i(self):
        lad = CauerLadder("TypeI", ((2e-9, 3e-14),))
        w = 1.3e10
        ref = 1.0 / (1j * w * 2e-9 + 1.0 / (1j * w * 3e-14))
        assert cauer_eval(lad, w) == pytest.approx(ref, rel=1e-14)

    def test_five_sections_vs_mpmath(self, rng):
        secs = tuple((rng.uniform(0.5, 5) * 1e-9, rng.uniform(5, 50) * 1e-15) for _ in range(5))
        lad = CauerLadder("TypeII", secs, 4e-14)
        mpmath.mp.dps = 50
        for w in np.geomspace(1e9, 3e11, 50):
            s = mpmath.mpc(0, w)
            y = mpmath.mpc(0)
            for l, c in reversed(secs):
                y = 1 / (s * l + 1 / (s * c + y))
            ref = complex(s * 4e-14 + y)
            assert cauer_eval(lad, w) == pytest.approx(ref, rel=1e-12)
            assert cauer_eval_lentz(lad, w) == pytest.approx(ref, rel=1e-12)


class TestJacobiMapping:
    def test_uniform_ladder(self):
        lad = CauerLadder("TypeI", ((1.0, 1.0),) * 3)
        j = cauer_to_jacobi(lad)
        np.testing.assert_allclose(j.diag, [1.0, 2.0, 2.0])
        np.testing.assert_allclose(j.offdiag, [1.0, 1.0])

    def test_uniform_ladder_with_tail_is_tight_binding(self):
        # a terminal inductor closes the last loop; the open-port chain gives a = 2, b = 1 throughout
        lad = CauerLadder("TypeI", ((1.0, 0.5),) + ((1.0, 1.0),) * 2)
        j = cauer_to_jacobi(lad)
        np.testing.assert_allclose(j.diag, [2.0, 3.0, 2.0])

    def test_single_section(self):
        lad = CauerLadder("TypeI", ((2e-9, 3e-14),))
        j = cauer_to_jacobi(lad)
        assert j.size == 1
        assert jacobi.eigenvalues(j)[0] == pytest.approx(1.0 / (2e-9 * 3e-14), rel=1e-14)

    def test_eigenvalues_are_ladder_poles(self, rng):
        secs = tuple((rng.uniform(0.5, 5) * 1e-9, rng.uniform(5, 50) * 1e-15) for _ in range(4))
        lad = CauerLadder("TypeII", secs, 4e-14)
        e = jacobi.eigenvalues(cauer_to_jacobi(lad))
        # admittance poles are the resonances with the port grounded: nodal pencil of the ladder
        n = len(secs)
        cm = np.diag([c for _, c in secs])
        km = np.zeros((n, n))
        for i, (l, _) in enumerate(secs):
            km[i, i] += 1.0 / l
            if i > 0:
                km[i - 1, i - 1] += 1.0 / l
                km[i - 1, i] -= 1.0 / l
                km[i, i - 1] -= 1.0 / l
        ref = scipy.linalg.eigh(km, cm, eigvals_only=True)
        np.testing.assert_allclose(e, ref, rtol=1e-8)

    def test_one_by_one_inverse(self):
        lad = jacobi_to_cauer(jacobi.JacobiMatrix([4.0], []))
        assert lad.sections[0] == pytest.approx((0.25, 1.0))

    def test_uniform_inverse(self):
        w0 = 3.0
        j = jacobi.JacobiMatrix([w0 ** 2] + [2 * w0 ** 2] * 3, [w0 ** 2] * 3)
        lad = jacobi_to_cauer(j)
        for l, c in lad.sections:
            assert l * c == pytest.approx(1.0 / w0 ** 2, rel=1e-14)

    def test_non_realizable(self):
        with pytest.raises(NonRealizable):
            jacobi_to_cauer(jacobi.JacobiMatrix([1.0, 0.5], [2.0]))

    def test_resolvent_identity(self, rng):
        y = random_foster(rng, 3)
        lad = cauer_expand(y)
        j = cauer_to_jacobi(lad)
        w = 0.37 * y.omega_k[0]
        assert ladder_resolvent(lad, w) == pytest.approx(jacobi.resolvent_g00(j, w * w).real, rel=1e-10)


@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**31))
def test_foster_cauer_foster_round_trip(n, seed):
    y = random_foster(np.random.default_rng(seed), n)
    with warnings.catch_warnings():
        warnings.simplefilter("error", NearDegenerateWarning)
        back = foster_to_cauer_to_foster(y)
    assert back.c_inf == pytest.approx(y.c_inf, rel=1e-8)
    np.testing.assert_allclose(back.omega_k, y.omega_k, rtol=1e-8)
    np.testing.assert_allclose(back.c_k, y.c_k, rtol=1e-8)


@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**31))
def test_cauer_jacobi_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    secs = tuple((rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0)) for _ in range(n))
    lad = CauerLadder("TypeI", secs)
    j = cauer_to_jacobi(lad)
    back = jacobi_to_cauer(j, c1=secs[0][1])
    np.testing.assert_allclose(np.array(back.sections), np.array(secs), rtol=1e-8)
    j2 = cauer_to_jacobi(back)
    np.testing.assert_allclose(j2.diag, j.diag, rtol=1e-8)
    np.testing.assert_allclose(j2.offdiag, j.offdiag, rtol=1e-8)


def test_single_branch_round_trip_identical():
    y = FosterForm(5e-14, ((2e-14, 4e10),))
    back = cauer_to_foster(cauer_expand(y))
    assert back.branches[0] == pytest.approx(y.branches[0], rel=1e-12)


def test_round_trip_with_dc_inductor(rng):
    y = random_foster(rng, 3)
    y = FosterForm(y.c_inf, y.branches, l0=1.5e-9)
    back = foster_to_cauer_to_foster(y)
    assert back.l0 == pytest.approx(1.5e-9, rel=1e-8)
    np.testing.assert_allclose(back.omega_k, y.omega_k, rtol=1e-8)
    assert math.isclose(back.c_inf, y.c_inf, rel_tol=1e-8)
