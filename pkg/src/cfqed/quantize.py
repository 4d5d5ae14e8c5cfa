"""Full-cosine quantization of dressed modes.

Each dressed mode ``n`` enters the junction phase with zero-point amplitude

    lambda_n = phi_n^J sqrt(hbar / (2 w_n)) / phi0,

so that ``theta = sum_n lambda_n (a_n + a_n^dag)`` and

    H = sum_n hbar w_n a_n^dag a_n - E_J cos(theta).

Single-mode cosine elements are generalized Laguerre functions.  For several
modes the cosine is ``Re prod_n D_n(i lambda_n)`` built from displacement
elements, which does not factor into per-mode cosines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq

from . import _kernels
from .boundary import BoundaryProblem, DressedModes, boundary_residual
from .constants import E_CHARGE, HBAR, PHI0
from .errors import (
    DimensionOverflow,
    DivergentSum,
    InsufficientModes,
    NotApplicable,
    NotARoot,
    OptimizerFailure,
    TruncationWarning,
)
from .netfunc import FosterForm, susceptance_slope

__all__ = [
    "ModeQuantization",
    "TruncationScheme",
    "quantize_modes",
    "participation_from_admittance",
    "cosine_matrix_element",
    "cosine_matrix",
    "displacement_matrix_element",
    "displacement_matrix",
    "multimode_cosine",
    "default_truncation",
    "basis_occupations",
    "build_hamiltonian",
    "lowest_eigenpairs",
    "variational_ground",
    "VariationalResult",
    "uv_scaling_fit",
    "UVFit",
    "prefactor_lumped",
    "prefactor_distributed",
    "truncation_error_bound",
    "leakage",
    "DIM_CAP",
]

DIM_CAP = 200_000


@dataclass(frozen=True)
class ModeQuantization:
    """Zero-point data for one dressed mode.

    Attributes
    ----------
    omega_n : float
        Mode frequency (rad/s).
    participation : float
        ``phi_n^J`` in 1/sqrt(F).
    phi_zpf : float
        Junction zero-point flux (Wb).
    lambda_n : float
        ``phi_zpf / phi0``.
    """

    omega_n: float
    participation: float
    phi_zpf: float
    lambda_n: float

    @classmethod
    def from_participation(cls, omega_n: float, participation: float) -> "ModeQuantization":
        phi_zpf = participation * math.sqrt(HBAR / (2.0 * omega_n))
        return cls(float(omega_n), float(participation), phi_zpf, phi_zpf / PHI0)

    @property
    def e_c(self) -> float:
        """Modal charging energy ``e^2 / (2 C_eff)`` in J."""
        return E_CHARGE ** 2 * self.participation ** 2 / 2.0


def quantize_modes(dressed: DressedModes) -> list[ModeQuantization]:
    return [ModeQuantization.from_participation(w, math.sqrt(p2))
            for w, p2 in zip(dressed.omega, dressed.participation_sq)]


def participation_from_admittance(env, omega_n: float, l_j: float | None = None,
                                  tol: float = 1e-8) -> tuple[float, float]:
    """``(phi^J)^2 = 2 w / (d[w B]/d w)`` and ``c_eff = 1/(phi^J)^2`` at a dressed root.

    Parameters
    ----------
    env : BoundaryProblem or FosterForm
        With a bare FosterForm, ``l_j`` is needed for the root check.

    Raises
    ------
    NotARoot
        The boundary residual at ``omega_n`` exceeds ``tol``.
    """
    if isinstance(env, BoundaryProblem):
        problem = env
    else:
        if l_j is None:
            raise ValueError("l_j is required with a bare FosterForm")
        problem = BoundaryProblem(env, l_j)
    res = float(abs(boundary_residual(problem, omega_n)))
    if res > tol:
        raise NotARoot(f"boundary residual {res:.2e} at omega={omega_n!r}")
    slope = susceptance_slope(problem.env, float(omega_n))
    phi_sq = 2.0 * omega_n / slope
    return phi_sq, 1.0 / phi_sq


# ---------------------------------------------------------------------------
# matrix elements
# ---------------------------------------------------------------------------

def _laguerre_element(k: int, d: int, amp: float) -> float:
    """``exp(-a^2/2) a^d sqrt(k!/(k+d)!) L_k^(d)(a^2)`` via the normalised recurrence."""
    x = amp * amp
    if d == 0:
        t = math.exp(-0.5 * x)
    elif amp == 0.0:
        return 0.0
    else:
        t = math.exp(-0.5 * x + d * math.log(amp) - 0.5 * math.lgamma(d + 1.0))
    tm1 = 0.0
    for j in range(k):
        nxt = ((2.0 * j + 1.0 + d - x) * t - math.sqrt(j * (j + d)) * tm1) / math.sqrt((j + 1.0) * (j + 1.0 + d))
        tm1, t = t, nxt
    return t


def cosine_matrix_element(n: int, m: int, lam: float) -> float:
    """``<n| cos(lam (a + a^dag)) |m>``; zero when ``n - m`` is odd."""
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be >= 0")
    d = abs(n - m)
    if d % 2:
        return 0.0
    sign = -1.0 if (d // 2) % 2 else 1.0
    return sign * _laguerre_element(min(n, m), d, abs(float(lam)))


def displacement_matrix_element(n: int, m: int, alpha: complex) -> complex:
    """``<n| D(alpha) |m>`` in the standard Laguerre form."""
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be >= 0")
    alpha = complex(alpha)
    amp = abs(alpha)
    theta = math.atan2(alpha.imag, alpha.real)
    d = abs(n - m)
    mag = _laguerre_element(min(n, m), d, amp)
    if n >= m:
        return mag * complex(math.cos(d * theta), math.sin(d * theta))
    return mag * (-1) ** d * complex(math.cos(d * theta), -math.sin(d * theta))


def _band_mask(size: int, p_band: int | None) -> np.ndarray | None:
    if p_band is None:
        return None
    idx = np.arange(size)
    return np.abs(idx[:, None] - idx[None, :]) <= 2 * p_band


def displacement_matrix(n_max: int, alpha: complex, p_band: int | None = None) -> np.ndarray:
    """Dense ``<n|D(alpha)|m>`` for ``0 <= n, m <= n_max`` (optionally banded)."""
    alpha = complex(alpha)
    amp = abs(alpha)
    theta = math.atan2(alpha.imag, alpha.real)
    r = np.asarray(_kernels.laguerre_table(int(n_max), amp))
    size = n_max + 1
    idx = np.arange(size)
    d = idx[None, :] - idx[:, None]  # column minus row
    upper = np.triu(r)  # r[m, n] for n >= m: element <n|D|m> magnitude
    mag = upper.T + np.triu(r, 1)
    # <n|D|m>: n >= m -> e^{i d th}; n < m -> (-1)^d e^{-i d th}, d = |n - m|
    dd = np.abs(d)
    phase = np.where(d <= 0, np.exp(1j * dd * theta), (-1.0) ** dd * np.exp(-1j * dd * theta))
    out = mag * phase
    mask = _band_mask(size, p_band)
    if mask is not None:
        out = np.where(mask, out, 0.0)
    return out


def cosine_matrix(n_max: int, lam: float, p_band: int | None = None) -> np.ndarray:
    """Dense single-mode cosine matrix ``<n|cos(lam (a + a^dag))|m>``."""
    r = np.asarray(_kernels.laguerre_table(int(n_max), abs(float(lam))))
    size = n_max + 1
    idx = np.arange(size)
    d = np.abs(idx[:, None] - idx[None, :])
    sym = np.triu(r) + np.triu(r, 1).T
    sign = np.where(d % 2 == 1, 0.0, np.where((d // 2) % 2 == 1, -1.0, 1.0))
    out = sym * sign
    mask = _band_mask(size, p_band)
    if mask is not None:
        out = np.where(mask, out, 0.0)
    return out


def multimode_cosine(lams, n_max: int, p_band: int | None = None) -> np.ndarray:
    """Dense ``cos(sum_j lam_j (a_j + a_j^dag))`` on the product Fock basis.

    Assembled as ``Re kron_j D_j(i lam_j)``; this equals
    ``(prod D(+i lam) + prod D(-i lam))/2`` because ``D(-i lam)`` is the
    elementwise conjugate of ``D(i lam)``.
    """
    out = np.ones((1, 1), dtype=complex)
    for lam in lams:
        out = np.kron(out, displacement_matrix(n_max, 1j * float(lam), p_band))
    return out.real.copy()


# ---------------------------------------------------------------------------
# truncation and Hamiltonian assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationScheme:
    """Fock cutoff ``n_max`` per mode and cosine half-bandwidth ``p_band``."""

    n_max: int
    p_band: int

    def __post_init__(self):
        if not (self.p_band >= 1 and self.n_max >= 2 * self.p_band):
            raise ValueError("need n_max >= 2 p_band >= 2")


_TRUNC_TABLE = ((0.2, 3, 20), (0.5, 5, 35), (1.0, 9, 50), (1.5, 12, 65))


def default_truncation(max_lambda: float) -> TruncationScheme:
    """Truncation keyed by the largest zero-point coupling.

    Beyond the tabulated range (``lambda > 1.5``) the values are
    extrapolated linearly and a :class:`TruncationWarning` is issued.
    """
    lam = abs(float(max_lambda))
    for cap, p, n in _TRUNC_TABLE:
        if lam <= cap:
            return TruncationScheme(n, p)
    warnings.warn(f"lambda={lam:.3g} beyond tabulated truncation range; extrapolating",
                  TruncationWarning, stacklevel=2)
    p = int(math.ceil(12 * lam / 1.5))
    n = int(math.ceil(65 * lam / 1.5))
    return TruncationScheme(max(n, 2 * p), p)


def basis_occupations(n_modes: int, trunc: TruncationScheme, parity: str | None = None) -> np.ndarray:
    """Occupation numbers (rows) of the retained product states, in Kronecker order."""
    size = trunc.n_max + 1
    grids = np.indices((size,) * n_modes).reshape(n_modes, -1).T
    if parity is None:
        return grids
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even', 'odd' or None")
    tot = grids.sum(axis=1) % 2
    return grids[tot == (0 if parity == "even" else 1)]


def build_hamiltonian(modes, e_j: float, trunc: TruncationScheme, parity: str | None = "even", *,
                      hbar: float = HBAR, omegas=None, dim_cap: int = DIM_CAP,
                      counterterm: bool = False) -> sp.csr_matrix:
    """Sparse ``H = sum hbar w_n n_n - E_J Re prod D_n(i lam_n)`` in one parity sector.

    Parameters
    ----------
    modes : sequence of ModeQuantization, or sequence of lambda values
        With plain lambdas, ``omegas`` supplies the frequencies.
    e_j : float
        Josephson energy in the energy unit implied by ``hbar``.
    trunc : TruncationScheme
        Per-mode Fock cutoff and cosine bandwidth ``|dn| <= 2 P``.
    parity : {"even", "odd", None}
        Total excitation-parity sector; None keeps the full space.
    counterterm : bool
        Subtract ``E_J phi^2 / 2`` with ``phi = sum lam_n (a_n + a_n^+)``.
        Dressed frequencies already contain the linearized junction, so
        without this term the quadratic part of the cosine is counted twice.

    Raises
    ------
    DimensionOverflow
        If the sector dimension exceeds ``dim_cap``.
    """
    lams, ws = _unpack_modes(modes, omegas)
    n_modes = len(lams)
    size = trunc.n_max + 1
    full_dim = size ** n_modes
    sector_dim = full_dim if parity is None else (full_dim + (1 if parity == "even" else -1) * (full_dim % 2)) // 2
    if sector_dim > dim_cap:
        raise DimensionOverflow(f"sector dimension {sector_dim} exceeds cap {dim_cap}")
    cos_op = sp.csr_matrix(np.ones((1, 1), dtype=complex))
    for lam in lams:
        dm = sp.csr_matrix(displacement_matrix(trunc.n_max, 1j * lam, trunc.p_band))
        cos_op = sp.kron(cos_op, dm, format="csr")
    cos_op = sp.csr_matrix(cos_op.real)
    occ = basis_occupations(n_modes, trunc, None)
    diag = hbar * occ @ np.asarray(ws, dtype=float)
    h = sp.diags(diag, format="csr") - e_j * cos_op
    if counterterm:
        h = h - 0.5 * e_j * _phi_squared(lams, trunc.n_max)
    if parity is not None:
        keep = np.flatnonzero(occ.sum(axis=1) % 2 == (0 if parity == "even" else 1))
        h = h[keep][:, keep]
    h = sp.csr_matrix(h)
    h.eliminate_zeros()
    return h


def _phi_squared(lams, n_max):
    """``(sum lam_n X_n)^2`` with each single-mode ``X^2`` taken exactly."""
    size = n_max + 1
    k = np.arange(size, dtype=float)
    x = sp.diags([np.sqrt(k[1:]), np.sqrt(k[1:])], [-1, 1], format="csr")
    x2 = sp.diags([np.sqrt(k[1:-1] * k[2:]), 2.0 * k + 1.0, np.sqrt(k[1:-1] * k[2:])], [-2, 0, 2], format="csr")
    eye = sp.identity(size, format="csr")
    out = None
    for a in range(len(lams)):
        for b in range(a, len(lams)):
            coef = lams[a] ** 2 if a == b else 2.0 * lams[a] * lams[b]
            term = sp.csr_matrix(np.ones((1, 1)))
            for j in range(len(lams)):
                op = (x2 if j == a else eye) if a == b else (x if j in (a, b) else eye)
                term = sp.kron(term, op, format="csr")
            out = coef * term if out is None else out + coef * term
    return out


def _unpack_modes(modes, omegas):
    if len(modes) and isinstance(modes[0], ModeQuantization):
        return [m.lambda_n for m in modes], [m.omega_n for m in modes]
    if omegas is None:
        raise ValueError("omegas are required when modes are given as lambda values")
    lams = [float(x) for x in modes]
    ws = [float(x) for x in np.atleast_1d(omegas)]
    if len(ws) != len(lams):
        raise ValueError("need one frequency per mode")
    return lams, ws


def lowest_eigenpairs(h, k: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenpairs of a symmetric (sparse or dense) matrix."""
    import scipy.linalg

    dense = h.toarray() if sp.issparse(h) else np.asarray(h)
    n = dense.shape[0]
    k = min(k, n)
    if n <= 4000:
        vals, vecs = scipy.linalg.eigh(dense, subset_by_index=(0, k - 1))
        return vals, vecs
    import scipy.sparse.linalg as spla

    vals, vecs = spla.eigsh(sp.csr_matrix(h), k=k, which="SA")
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


# ---------------------------------------------------------------------------
# variational bound, scaling and truncation diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariationalResult:
    r_star: np.ndarray
    e_var: float
    nbar: float
    iterations: int


def variational_ground(modes, e_j: float, *, hbar: float = HBAR, omegas=None,
                       gtol: float = 1e-12, max_sweeps: int = 500) -> VariationalResult:
    """Squeezed-vacuum upper bound on the ground energy.

    Minimises ``E(r) = sum hbar w_n sinh^2 r_n - E_J exp(-1/2 sum lam_n^2 e^{-2 r_n})``
    by coordinate descent, each coordinate solved exactly on its gradient
    ``hbar w sinh 2r - E_J e^{-S/2} lam^2 e^{-2r}``.  Starts from
    ``r_n = lam_n^2 E_J / (2 hbar w_n)``.

    Raises
    ------
    OptimizerFailure
        If the gradient does not fall below ``gtol`` (relative to the
        largest mode energy) within ``max_sweeps``.
    """
    lams, ws = _unpack_modes(modes, omegas)
    lam2 = np.asarray(lams, dtype=float) ** 2
    ew = hbar * np.asarray(ws, dtype=float)
    if e_j == 0.0:
        return VariationalResult(np.zeros(lam2.size), 0.0, 0.0, 0)
    if e_j < 0.0:
        raise ValueError("e_j must be >= 0")
    r = lam2 * e_j / (2.0 * ew)
    scale = float(np.max(ew))

    def grad(rv):
        s = float(np.sum(lam2 * np.exp(-2.0 * rv)))
        return ew * np.sinh(2.0 * rv) - e_j * math.exp(-0.5 * s) * lam2 * np.exp(-2.0 * rv)

    for sweep in range(max_sweeps):
        for n in range(r.size):
            rest = float(np.sum(lam2 * np.exp(-2.0 * r))) - lam2[n] * math.exp(-2.0 * r[n])

            def g(x, n=n, rest=rest):
                e2 = math.exp(-2.0 * x)
                return ew[n] * math.sinh(2.0 * x) - e_j * math.exp(-0.5 * (rest + lam2[n] * e2)) * lam2[n] * e2

            if lam2[n] == 0.0:
                r[n] = 0.0
                continue
            hi = max(2.0 * r[n], 1e-3)
            while g(hi) <= 0.0:
                hi *= 2.0
                if hi > 50.0:
                    raise OptimizerFailure("squeezing parameter diverged")
            r[n] = brentq(g, 0.0, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps)
        if np.max(np.abs(grad(r))) <= gtol * scale:
            break
    else:
        raise OptimizerFailure("coordinate descent did not reach the gradient tolerance")
    s = float(np.sum(lam2 * np.exp(-2.0 * r)))
    e_var = float(np.sum(ew * np.sinh(r) ** 2) - e_j * math.exp(-0.5 * s))
    return VariationalResult(r, e_var, float(np.sum(np.sinh(r) ** 2)), sweep + 1)


@dataclass(frozen=True)
class UVFit:
    exponent: float
    intercept: float
    n_modes: int
    prefactor: float  # phi^2 w^2 at the highest fitted mode


def uv_scaling_fit(dressed: DressedModes, omega_min: float, omega_p: float | None = None) -> UVFit:
    """Least-squares slope of ``log |phi_n^J|`` against ``log w_n`` for ``w_n >= omega_min``.

    Raises
    ------
    InsufficientModes
        Fewer than 10 modes in the window.
    """
    w = np.asarray(dressed.omega)
    phi2 = np.asarray(dressed.participation_sq)
    sel = w >= omega_min
    if omega_p is not None and np.all(w[sel] < omega_p):
        warnings.warn("all fitted modes lie below the plasma frequency; the high-frequency "
                      "suppression regime is not reached", NotApplicable, stacklevel=2)
    if np.count_nonzero(sel) < 10:
        raise InsufficientModes(f"{np.count_nonzero(sel)} modes above omega_min; need >= 10")
    x = np.log(w[sel])
    y = 0.5 * np.log(phi2[sel])
    slope, intercept = np.polyfit(x, y, 1)
    top = np.argmax(w[sel])
    return UVFit(float(slope), float(intercept), int(np.count_nonzero(sel)),
                 float(phi2[sel][top] * w[sel][top] ** 2))


def prefactor_lumped(c_j: float, l_j: float, c_sigma: float) -> float:
    """``(phi^J)^2 w^2`` asymptote for a lumped environment: ``1/(C_J L_J C_Sigma)``."""
    return 1.0 / (c_j * l_j * c_sigma)


def prefactor_distributed(c_r: float, velocity: float, c_j: float, length: float) -> float:
    """``(phi^J)^2 w^2`` asymptote for a distributed line: ``2 C_r v^2 / (C_J^2 L^2)``."""
    return 2.0 * c_r * velocity ** 2 / (c_j ** 2 * length ** 2)


def truncation_error_bound(omega_max: float, k: float, prefactor: float, *, hbar: float = HBAR,
                           phi0: float = PHI0) -> float:
    """Tail bound ``hbar P / (2 phi0^2) * w_max^(k-2) / (2-k)`` for modes above ``omega_max``.

    Raises
    ------
    DivergentSum
        If ``k >= 2``.
    """
    if k >= 2:
        raise DivergentSum(f"tail sum diverges for k={k} >= 2")
    if not omega_max > 0.0:
        raise ValueError("omega_max must be > 0")
    return hbar * prefactor / (2.0 * phi0 ** 2) * omega_max ** (k - 2.0) / (2.0 - k)


def leakage(eigvec, trunc: TruncationScheme, occupations=None, threshold: float = 1e-8) -> tuple[float, bool]:
    """Weight ``eta`` on states with any occupation above ``n_max - 2 P``.

    ``occupations`` gives the Fock numbers of each component (rows); the
    default is the full single-mode basis ``0..n_max``.
    """
    v = np.asarray(eigvec)
    if occupations is None:
        occ = np.arange(v.size)[:, None]
    else:
        occ = np.asarray(occupations)
        if occ.ndim == 1:
            occ = occ[:, None]
    edge = trunc.n_max - 2 * trunc.p_band
    mask = np.any(occ > edge, axis=1)
    eta = float(np.sum(np.abs(v[mask]) ** 2))
    return eta, eta < threshold
