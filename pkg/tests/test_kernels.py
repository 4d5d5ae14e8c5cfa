"""Compiled and pure-NumPy kernels must agree; the environment switch must work."""

import os
import subprocess
import sys

import numpy as np
import pytest

from cfqed import _kernels as K

pytestmark = pytest.mark.skipif(not K.NUMBA_AVAILABLE, reason="numba not installed")


@pytest.fixture
def chain(rng):
    n = 30
    return rng.uniform(-1, 3, n), rng.uniform(0.2, 1.5, n - 1)


def test_backward_recurrence(chain):
    a, b = chain
    z = 0.4 + 0.3j
    d1, s1 = K.cf_backward_numba(a.astype(complex), (b * b).astype(complex), z)
    d2, s2 = K.cf_backward_numpy(a.astype(complex), (b * b).astype(complex), z)
    assert s1 == s2 == 0
    assert d1 == pytest.approx(d2, rel=1e-13)


def test_derivative_and_count(chain):
    a, b = chain
    for x in np.linspace(-1.5, 3.5, 17):
        assert K.cf_d0_deriv_numba(a, b * b, x, 0) == pytest.approx(K.cf_d0_deriv_numpy(a, b * b, x, 0), rel=1e-12)
        assert K.cf_count_numba(a, b * b, x, 3) == K.cf_count_numpy(a, b * b, x, 3)


def test_lentz(chain):
    a, b = chain
    z = 5.0 + 0.1j
    assert K.lentz_numba(a.astype(complex), (b * b).astype(complex), z) == pytest.approx(
        K.lentz_numpy(a.astype(complex), (b * b).astype(complex), z), rel=1e-13)


def test_interlacing_eigs(chain):
    a, b = chain
    lo, hi = -5.0, 7.0
    e1, s1 = K.interlace_eigs_numba(a, b * b, 10, lo, hi, 1e-14 * 7)
    e2, s2 = K.interlace_eigs_numpy(a, b * b, 10, lo, hi, 1e-14 * 7)
    assert s1 == s2 == 0
    np.testing.assert_allclose(e1, e2, atol=1e-13)
    dense = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
    np.testing.assert_allclose(e1, np.linalg.eigvalsh(dense)[:10], atol=1e-13)


def test_eigvec(chain):
    a, b = chain
    e = np.linalg.eigvalsh(np.diag(a) + np.diag(b, 1) + np.diag(b, -1))[4]
    np.testing.assert_allclose(K.cf_eigvec_numba(a, b, e), K.cf_eigvec_numpy(a, b, e), atol=1e-12)


def test_boundary_roots():
    p = np.array([0.05, 0.1, 0.02])
    r2 = np.array([0.5, 1.7, 4.0])
    t_hi = 1.5 * max(2 * r2[-1], 1 + 2 * float(np.sum(p * r2)))
    t1, s1 = K.boundary_roots_numba(p, r2, 1.0, t_hi, 1e-12)
    t2, s2 = K.boundary_roots_numpy(p, r2, 1.0, t_hi, 1e-12)
    assert s1 == s2 == 0
    np.testing.assert_allclose(t1, t2, rtol=1e-14)


@pytest.mark.parametrize("amp", [0.0, 0.3, 1.5])
def test_laguerre_table(amp):
    np.testing.assert_allclose(K.laguerre_table_numba(25, amp), K.laguerre_table_numpy(25, amp), atol=1e-14)


def test_disable_switch():
    env = dict(os.environ, CFQED_DISABLE_NUMBA="1")
    code = (
        "import cfqed, cfqed._kernels as K; "
        "from cfqed.spectra import TransmonParams, transmon_observables; "
        "print(cfqed.BACKEND, K.cf_count is K.cf_count_numpy, "
        "repr(float(transmon_observables(TransmonParams(15.0, 0.25))['omega01'])))"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, same, w01 = out.stdout.split()
    assert backend == "numpy"
    assert same == "True"
    from cfqed.spectra import TransmonParams, transmon_observables

    assert float(w01) == pytest.approx(transmon_observables(TransmonParams(15.0, 0.25))["omega01"], rel=1e-12)


def test_default_backend():
    if os.environ.get("CFQED_DISABLE_NUMBA"):
        pytest.skip("numba disabled in this environment")
    assert K.BACKEND == "numba"
