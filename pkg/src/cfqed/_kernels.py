"""Hot loops: continued-fraction recurrences, bracketed root search, Laguerre tables.

Every kernel exists in two forms: ``<name>_numpy`` (plain Python/NumPy) and
``<name>_numba`` (the same algorithm compiled with :func:`numba.njit`).  The
public alias ``<name>`` points at the compiled form unless numba is missing
or the environment variable ``CFQED_DISABLE_NUMBA`` is set to a true value
(``1``, ``true``, ``yes``).  Both forms return identical results up to
floating-point reassociation.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return decorator


def _flag_disabled() -> bool:
    return os.environ.get("CFQED_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}


USE_NUMBA = NUMBA_AVAILABLE and not _flag_disabled()

EPS = 2.220446049250313e-16
BREAKDOWN_FLOOR = 1e-300
LENTZ_TINY = 1e-30
MAXITER = 200

# status codes returned by root kernels
OK = 0
NO_CONVERGENCE = 1


# ---------------------------------------------------------------------------
# scalar continued-fraction recurrences
# ---------------------------------------------------------------------------

def _cf_backward(diag, offsq, z):
    """Return (D_0(z), status) for the backward recurrence; status = index+1 on breakdown."""
    n = diag.shape[0]
    d = z - diag[n - 1]
    for i in range(n - 2, -1, -1):
        if abs(d) < BREAKDOWN_FLOOR:
            return d, i + 2
        d = z - diag[i] - offsq[i] / d
    if abs(d) < BREAKDOWN_FLOOR:
        return d, 1
    return d, 0


def _cf_d0_deriv(diag, offsq, x, m):
    """D_m(x) and dD_m/dx for the trailing block starting at index m."""
    n = diag.shape[0]
    d = x - diag[n - 1]
    dp = 1.0
    for i in range(n - 2, m - 1, -1):
        if d == 0.0:
            d = BREAKDOWN_FLOOR
        q = offsq[i] / d
        dp = 1.0 + q * dp / d
        d = x - diag[i] - q
    return d, dp


def _cf_d(diag, offsq, x, m):
    n = diag.shape[0]
    d = x - diag[n - 1]
    for i in range(n - 2, m - 1, -1):
        if d == 0.0:
            d = BREAKDOWN_FLOOR
        d = x - diag[i] - offsq[i] / d
    return d


def _cf_count(diag, offsq, x, m):
    """Number of eigenvalues of the trailing block J[m:, m:] strictly below x."""
    n = diag.shape[0]
    d = x - diag[n - 1]
    c = 0
    if d > 0.0:
        c += 1
    for i in range(n - 2, m - 1, -1):
        if d == 0.0:
            d = BREAKDOWN_FLOOR
        d = x - diag[i] - offsq[i] / d
        if d > 0.0:
            c += 1
    return c


def _lentz(diag, offsq, z):
    """Modified Lentz evaluation of 1/(z - a0 - b1^2/(z - a1 - ...))."""
    n = diag.shape[0]
    f = z - diag[0]
    if abs(f) < LENTZ_TINY:
        f = LENTZ_TINY + 0j
    c = f
    d = 0.0 + 0j
    for j in range(1, n):
        beta = z - diag[j]
        alpha = -offsq[j - 1]
        d = beta + alpha * d
        if abs(d) < LENTZ_TINY:
            d = LENTZ_TINY + 0j
        c = beta + alpha / c
        if abs(c) < LENTZ_TINY:
            c = LENTZ_TINY + 0j
        d = 1.0 / d
        f = f * c * d
    return 1.0 / f


def _cf_eigvec(diag, offdiag, e):
    """Eigenvector at eigenvalue e from continued-fraction ratios.

    Backward ratios psi_n/psi_{n-1} = b_n / D_n(e) are accurate where the
    vector decays toward the tail; forward ratios are accurate toward the
    head.  The two are joined at the twist index r minimising
    |F_r + D_r - (e - a_r)|, which is where the vector is largest.
    """
    n = diag.shape[0]
    dvals = np.empty(n)
    fvals = np.empty(n)
    d = e - diag[n - 1]
    dvals[n - 1] = d
    for i in range(n - 2, -1, -1):
        if d == 0.0:
            d = BREAKDOWN_FLOOR
        d = e - diag[i] - offdiag[i] * offdiag[i] / d
        dvals[i] = d
    f = e - diag[0]
    fvals[0] = f
    for i in range(1, n):
        if f == 0.0:
            f = BREAKDOWN_FLOOR
        f = e - diag[i] - offdiag[i - 1] * offdiag[i - 1] / f
        fvals[i] = f
    r = 0
    best = math.inf
    for i in range(n):
        g = abs(fvals[i] + dvals[i] - (e - diag[i]))
        if g < best:
            best = g
            r = i
    psi = np.zeros(n)
    psi[r] = 1.0
    for i in range(r - 1, -1, -1):
        fi = fvals[i]
        if fi == 0.0:
            fi = BREAKDOWN_FLOOR
        psi[i] = psi[i + 1] * offdiag[i] / fi
    for i in range(r + 1, n):
        di = dvals[i]
        if di == 0.0:
            di = BREAKDOWN_FLOOR
        psi[i] = psi[i - 1] * offdiag[i - 1] / di
    s = 0.0
    for i in range(n):
        s += psi[i] * psi[i]
    s = math.sqrt(s)
    for i in range(n):
        psi[i] /= s
    # fix the sign by the first clearly nonzero component
    for i in range(n):
        if abs(psi[i]) > 1e-8:
            if psi[i] < 0.0:
                for j in range(n):
                    psi[j] = -psi[j]
            break
    return psi


# ---------------------------------------------------------------------------
# Brent root search on monotone functions
# ---------------------------------------------------------------------------

def _feval(kind, x, a1, a2, s1, m):
    if kind == 0:
        return _cf_d(a1, a2, x, m)
    # kind 1: increasing boundary function in t = u^2
    acc = x - s1
    for k in range(a1.shape[0]):
        acc += a1[k] * a2[k] * x / (a2[k] - x)
    return acc


def _brent(kind, a, b, fa, fb, a1, a2, s1, m, tol):
    """Brent's method; returns (root, iterations, status)."""
    c = b
    fc = fb
    d = b - a
    e = d
    for it in range(MAXITER):
        if (fb > 0.0 and fc > 0.0) or (fb < 0.0 and fc < 0.0):
            c = a
            fc = fa
            d = b - a
            e = d
        if abs(fc) < abs(fb):
            a = b
            b = c
            c = a
            fa = fb
            fb = fc
            fc = fa
        tol1 = 2.0 * EPS * abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b, it, OK
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            min1 = 3.0 * xm * q - abs(tol1 * q)
            min2 = abs(e * q)
            if 2.0 * p < (min1 if min1 < min2 else min2):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a = b
        fa = fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if xm > 0.0 else -tol1
        fb = _feval(kind, b, a1, a2, s1, m)
    return b, MAXITER, NO_CONVERGENCE


def _bisect_count(diag, offsq, m, idx, lo, hi, tol):
    """Bisection on the Sturm count for eigenvalue number idx of J[m:, m:]."""
    for it in range(4 * MAXITER):
        if hi - lo <= tol + 2.0 * EPS * max(abs(lo), abs(hi)):
            return 0.5 * (lo + hi), OK
        mid = 0.5 * (lo + hi)
        if _cf_count(diag, offsq, mid, m) > idx:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), NO_CONVERGENCE


def _interlace_eigs(diag, offsq, k, lo_bound, hi_bound, tol):
    """Lowest k eigenvalues by recursive interlacing of trailing submatrices.

    The eigenvalues of J[m:, m:] are the roots of D_m, one in each interval
    between consecutive eigenvalues of J[m+1:, m+1:] plus the two outer
    intervals closed by Gershgorin bounds.  Returns (eigs, status).
    """
    n = diag.shape[0]
    if k > n:
        k = n
    mu = np.empty(k)
    new = np.empty(k)
    mu[0] = diag[n - 1]
    cnt = 1
    status = OK
    for m in range(n - 2, -1, -1):
        size = n - m
        kk = k if k < size else size
        for i in range(kk):
            left = lo_bound if i == 0 else mu[i - 1]
            right = mu[i] if i < cnt else hi_bound
            g = 4.0 * EPS * max(abs(left), abs(right)) + 0.25 * tol
            xl = left + g
            xr = right - g
            root = 0.0
            done = False
            if xl < xr:
                fl = _cf_d(diag, offsq, xl, m)
                fr = _cf_d(diag, offsq, xr, m)
                if fl < 0.0 and fr > 0.0:
                    root, its, st = _brent(0, xl, xr, fl, fr, diag, offsq, 0.0, m, tol)
                    if st == OK:
                        done = True
            if not done:
                # the count is exact, so bisect between the global bounds;
                # neighbouring estimates may sit on the wrong side of the root
                root, st = _bisect_count(diag, offsq, m, i, lo_bound, hi_bound, tol)
                if st != OK:
                    status = NO_CONVERGENCE
            new[i] = root
        for i in range(kk):
            mu[i] = new[i]
        cnt = kk
    # polish on the full matrix: bracket tolerance shrinks 1000x once the
    # count confirms exactly one eigenvalue inside
    ptol = 1e-3 * tol
    for i in range(cnt):
        w = 2.0 * tol
        for attempt in range(4):
            xl = mu[i] - w
            xr = mu[i] + w
            if _cf_count(diag, offsq, xl, 0) == i and _cf_count(diag, offsq, xr, 0) == i + 1:
                fl = _cf_d(diag, offsq, xl, 0)
                fr = _cf_d(diag, offsq, xr, 0)
                st = NO_CONVERGENCE
                if fl < 0.0 and fr > 0.0:
                    root, its, st = _brent(0, xl, xr, fl, fr, diag, offsq, 0.0, 0, ptol)
                if st != OK:
                    root, st = _bisect_count(diag, offsq, 0, i, xl, xr, ptol)
                if st == OK:
                    mu[i] = root
                break
            w *= 4.0
    return mu[:cnt].copy(), status


def _boundary_roots(p, r2, s1, t_hi, guard):
    """Roots in t = u^2 of 1 + eps - t - sum p r2 t/(r2 - t) = 0, one per interval.

    ``s1`` is ``1 + L_J/L_0`` (1 without a dc inductor).  Returns (roots, status).
    """
    n = p.shape[0]
    roots = np.empty(n + 1)
    status = OK
    empty = np.empty(0)
    for i in range(n + 1):
        left = 0.0 if i == 0 else r2[i - 1]
        right = t_hi if i == n else r2[i]
        g = guard
        found = False
        for attempt in range(4):
            xl = left * (1.0 + g) if i > 0 else 0.0
            xr = right * (1.0 - g) if i < n else right
            fl = _feval(1, xl, p, r2, s1, 0)
            fr = _feval(1, xr, p, r2, s1, 0)
            if fl < 0.0 and fr > 0.0:
                root, its, st = _brent(1, xl, xr, fl, fr, p, r2, s1, 0, 0.0)
                if st != OK:
                    status = NO_CONVERGENCE
                roots[i] = root
                found = True
                break
            g *= 1e-3
        if not found:
            roots[i] = math.nan
            status = NO_CONVERGENCE
    return roots, status


# ---------------------------------------------------------------------------
# Laguerre / displacement tables
# ---------------------------------------------------------------------------

def _laguerre_table_loop(nmax, amp):
    """R[m, n] (n >= m) = exp(-a^2/2) a^(n-m) sqrt(m!/n!) L_m^(n-m)(a^2).

    Uses the normalised three-term recurrence in m at fixed offset d = n - m,
    so no factorial or power is formed explicitly.
    """
    x = amp * amp
    size = nmax + 1
    out = np.zeros((size, size))
    loga = math.log(amp) if amp > 0.0 else -math.inf
    for d in range(size):
        if d == 0:
            t0 = math.exp(-0.5 * x)
        elif amp == 0.0:
            continue
        else:
            t0 = math.exp(-0.5 * x + d * loga - 0.5 * math.lgamma(d + 1.0))
        tm1 = 0.0
        t = t0
        for k in range(0, size - d):
            out[k, k + d] = t
            nxt = ((2.0 * k + 1.0 + d - x) * t - math.sqrt(k * (k + d)) * tm1) / math.sqrt(
                (k + 1.0) * (k + 1.0 + d)
            )
            tm1 = t
            t = nxt
    return out


def laguerre_table_numpy(nmax: int, amp: float) -> np.ndarray:
    """Vectorised over the offset d; loops over the lower index only."""
    size = nmax + 1
    x = amp * amp
    out = np.zeros((size, size))
    d = np.arange(size, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        if amp > 0.0:
            from scipy.special import gammaln

            t = np.exp(-0.5 * x + d * math.log(amp) - 0.5 * gammaln(d + 1.0))
        else:
            t = np.zeros(size)
            t[0] = 1.0
    tm1 = np.zeros(size)
    rows = np.arange(size)
    for k in range(size):
        valid = size - k  # offsets d < valid fit in the table
        out[k, k + rows[:valid]] = t[:valid]
        nxt = ((2.0 * k + 1.0 + d - x) * t - np.sqrt(k * (k + d)) * tm1) / np.sqrt((k + 1.0) * (k + 1.0 + d))
        tm1 = t
        t = nxt
    return out


# ---------------------------------------------------------------------------
# numpy fallbacks and compiled versions
# ---------------------------------------------------------------------------

def cf_backward_numpy(diag, offsq, z):
    return _cf_backward(np.asarray(diag), np.asarray(offsq), z)


def cf_d0_deriv_numpy(diag, offsq, x, m=0):
    return _cf_d0_deriv(np.asarray(diag, float), np.asarray(offsq, float), float(x), int(m))


def cf_count_numpy(diag, offsq, x, m=0):
    return _cf_count(np.asarray(diag, float), np.asarray(offsq, float), float(x), int(m))


def lentz_numpy(diag, offsq, z):
    return _lentz(np.asarray(diag), np.asarray(offsq), complex(z))


def cf_eigvec_numpy(diag, offdiag, e):
    return _cf_eigvec(np.asarray(diag, float), np.asarray(offdiag, float), float(e))


def interlace_eigs_numpy(diag, offsq, k, lo_bound, hi_bound, tol):
    return _interlace_eigs(np.asarray(diag, float), np.asarray(offsq, float), int(k),
                           float(lo_bound), float(hi_bound), float(tol))


def boundary_roots_numpy(p, r2, s1, t_hi, guard):
    return _boundary_roots(np.asarray(p, float), np.asarray(r2, float), float(s1),
                           float(t_hi), float(guard))


if NUMBA_AVAILABLE:
    _jit = njit(cache=True)
    _cf_backward_c = _jit(_cf_backward)
    _cf_d0_deriv_c = _jit(_cf_d0_deriv)
    _cf_d_c = _jit(_cf_d)
    _cf_count_c = _jit(_cf_count)
    _lentz_c = _jit(_lentz)
    _cf_eigvec_c = _jit(_cf_eigvec)

    # the root helpers call each other, so they are compiled against the
    # compiled callees by rebuilding them in a closure-free namespace
    def _compile_roots():
        ns = {
            "np": np, "math": math, "EPS": EPS, "OK": OK, "NO_CONVERGENCE": NO_CONVERGENCE,
            "MAXITER": MAXITER, "BREAKDOWN_FLOOR": BREAKDOWN_FLOOR,
            "_cf_d": _cf_d_c, "_cf_count": _cf_count_c, "__name__": __name__,
        }
        jit_nocache = njit(cache=False)
        import inspect
        import textwrap

        for fn in (_feval, _brent, _bisect_count, _interlace_eigs, _boundary_roots):
            src = textwrap.dedent(inspect.getsource(fn))
            exec(compile(src, __file__, "exec"), ns)
            ns[fn.__name__] = jit_nocache(ns[fn.__name__])
        return ns["_interlace_eigs"], ns["_boundary_roots"]

    _interlace_eigs_c, _boundary_roots_c = _compile_roots()
    _laguerre_table_c = _jit(_laguerre_table_loop)

    def cf_backward_numba(diag, offsq, z):
        return _cf_backward_c(np.asarray(diag, np.complex128), np.asarray(offsq, np.complex128),
                              complex(z))

    def cf_d0_deriv_numba(diag, offsq, x, m=0):
        return _cf_d0_deriv_c(np.asarray(diag, float), np.asarray(offsq, float), float(x), int(m))

    def cf_count_numba(diag, offsq, x, m=0):
        return _cf_count_c(np.asarray(diag, float), np.asarray(offsq, float), float(x), int(m))

    def lentz_numba(diag, offsq, z):
        return _lentz_c(np.asarray(diag, np.complex128), np.asarray(offsq, np.complex128), complex(z))

    def cf_eigvec_numba(diag, offdiag, e):
        return _cf_eigvec_c(np.asarray(diag, float), np.asarray(offdiag, float), float(e))

    def interlace_eigs_numba(diag, offsq, k, lo_bound, hi_bound, tol):
        return _interlace_eigs_c(np.asarray(diag, float), np.asarray(offsq, float), int(k),
                                 float(lo_bound), float(hi_bound), float(tol))

    def boundary_roots_numba(p, r2, s1, t_hi, guard):
        return _boundary_roots_c(np.asarray(p, float), np.asarray(r2, float), float(s1),
                                 float(t_hi), float(guard))

    def laguerre_table_numba(nmax, amp):
        return _laguerre_table_c(int(nmax), float(amp))
else:  # pragma: no cover
    cf_backward_numba = cf_backward_numpy
    cf_d0_deriv_numba = cf_d0_deriv_numpy
    cf_count_numba = cf_count_numpy
    lentz_numba = lentz_numpy
    cf_eigvec_numba = cf_eigvec_numpy
    interlace_eigs_numba = interlace_eigs_numpy
    boundary_roots_numba = boundary_roots_numpy
    laguerre_table_numba = laguerre_table_numpy


def _pick(compiled, fallback):
    return compiled if USE_NUMBA else fallback


cf_backward = _pick(cf_backward_numba, cf_backward_numpy)
cf_d0_deriv = _pick(cf_d0_deriv_numba, cf_d0_deriv_numpy)
cf_count = _pick(cf_count_numba, cf_count_numpy)
lentz = _pick(lentz_numba, lentz_numpy)
cf_eigvec = _pick(cf_eigvec_numba, cf_eigvec_numpy)
interlace_eigs = _pick(interlace_eigs_numba, interlace_eigs_numpy)
boundary_roots = _pick(boundary_roots_numba, boundary_roots_numpy)
laguerre_table = _pick(laguerre_table_numba, laguerre_table_numpy)

BACKEND = "numba" if USE_NUMBA else "numpy"
