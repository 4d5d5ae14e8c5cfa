"""Dressed modes from the boundary condition ``s Y(s) + 1/L_J = 0``.

On the imaginary axis, with ``w_p = 1/sqrt(L_J C_inf)``, ``u = w/w_p``,
``r_k = w_k/w_p``, ``p_k = C_k/C_inf`` and ``eps = L_J/L_0`` the condition reads

    f(u) = 1 + eps - u^2 - sum_k p_k r_k^2 u^2 / (r_k^2 - u^2) = 0.

``f`` decreases strictly between consecutive poles ``r_k``, so there is one
root below ``r_1``, one between each pair of poles and one above ``r_N``.
Roots are found in ``t = u^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import ConvergenceFailure, NearResonance, PoleHit
from .netfunc import FosterForm, TLineEnvironment, eval_foster, tline_admittance, tline_segment_slope

__all__ = [
    "BoundaryProblem",
    "DressedModes",
    "solve_dressed",
    "boundary_residual",
    "single_mode_exact",
    "multimode_dispersive_shift",
    "spatial_dressed",
    "spatial_modes",
    "graphical_curve",
    "josephson_inductance",
]

GUARD = 1e-9
RESIDUAL_TOL = 1e-10


def josephson_inductance(e_j: float) -> float:
    """``L_J = phi0^2 / E_J`` with ``E_J`` in joules."""
    from .constants import PHI0

    if not e_j > 0.0:
        raise ValueError("E_J must be > 0")
    return PHI0 ** 2 / e_j


@dataclass(frozen=True)
class BoundaryProblem:
    """Junction with inductance ``l_j`` shunted by the admittance ``env``."""

    env: FosterForm
    l_j: float

    def __post_init__(self):
        if not self.l_j > 0.0:
            raise ValueError("l_j must be > 0")
        if not self.env.c_inf > 0.0:
            raise ValueError("the environment needs a positive direct capacitance")

    @property
    def omega_p(self) -> float:
        """``1/sqrt(L_J C_inf)``."""
        return 1.0 / math.sqrt(self.l_j * self.env.c_inf)

    @property
    def p(self) -> np.ndarray:
        return self.env.c_k / self.env.c_inf

    @property
    def r(self) -> np.ndarray:
        return self.env.omega_k / self.omega_p

    @property
    def eps(self) -> float:
        return 0.0 if self.env.l0 is None else self.l_j / self.env.l0

    @property
    def p_tot(self) -> float:
        """Total participation ``sum C_k / C_Sigma`` with ``C_Sigma = C_inf + sum C_k``."""
        return float(np.sum(self.env.c_k)) / self.env.c_sigma


@dataclass(frozen=True)
class DressedModes:
    """Dressed mode frequencies and junction participations.

    Attributes
    ----------
    omega : ndarray
        Sorted frequencies (rad/s).
    participation_sq : ndarray
        ``(phi_n^J)^2`` in 1/F.
    c_eff : ndarray
        ``1 / participation_sq`` in F.
    qubit_index : int
        Index of the qubit-like root.
    """

    omega: np.ndarray
    participation_sq: np.ndarray
    c_eff: np.ndarray
    qubit_index: int = 0

    def __len__(self) -> int:
        return self.omega.size

    @property
    def participation(self) -> np.ndarray:
        return np.sqrt(self.participation_sq)


def boundary_residual(p: BoundaryProblem, omega, normalized: bool = True) -> np.ndarray:
    """Residual ``f(u)`` of the dimensionless boundary condition at ``omega``.

    With ``normalized`` (default) the value is divided by the sum of the
    magnitudes of the terms of ``f``, i.e. it is a backward error.  Near a
    pair of close poles ``f`` is so steep that adjacent doubles differ by
    more than 1e-10 in the raw value, while the normalized residual stays at
    rounding level.
    """
    u2 = np.atleast_1d((np.asarray(omega, dtype=float) / p.omega_p) ** 2)
    r2 = p.r ** 2
    raw = 1.0 + p.eps - u2
    scale = 1.0 + p.eps + u2
    if r2.size:
        terms = p.p[None, :] * r2[None, :] * u2[:, None] / (r2[None, :] - u2[:, None])
        raw = raw - np.sum(terms, axis=1)
        scale = scale + np.sum(np.abs(terms), axis=1)
    out = raw / scale if normalized else raw
    return out.reshape(np.shape(omega))


def _participation_sq(env: FosterForm, omega: np.ndarray) -> np.ndarray:
    """``1 / [C_inf + sum C_k w_k^4 / (w^2 - w_k^2)^2]``."""
    ck, wk = env.c_k, env.omega_k
    w2 = omega ** 2
    denom = np.full(omega.shape, env.c_inf)
    if ck.size:
        denom = denom + np.sum(ck[None, :] * wk[None, :] ** 4 / (w2[:, None] - wk[None, :] ** 2) ** 2, axis=1)
    return 1.0 / denom


def solve_dressed(p: BoundaryProblem) -> DressedModes:
    """All ``N + 1`` dressed roots with their junction participations.

    Raises
    ------
    ConvergenceFailure
        A bracket failed to produce a sign change or did not converge.
    """
    pk, r2 = p.p, p.r ** 2
    s1 = 1.0 + p.eps
    if r2.size:
        t_hi = 1.5 * max(2.0 * r2[-1], s1 + 2.0 * float(np.sum(pk * r2)))
    else:
        t_hi = 2.0 * s1
    t, status = _kernels.boundary_roots(pk, r2, s1, t_hi, GUARD)
    t = np.asarray(t)
    if status != 0 or not np.all(np.isfinite(t)):
        raise ConvergenceFailure("boundary root search failed in at least one interval")
    omega = p.omega_p * np.sqrt(t)
    worst = float(np.max(np.abs(boundary_residual(p, omega))))
    if worst > RESIDUAL_TOL:
        raise ConvergenceFailure(f"boundary residual {worst:.2e} exceeds {RESIDUAL_TOL:g}")
    phi2 = _participation_sq(p.env, omega)
    target = p.omega_p * math.sqrt(max(1.0 - p.p_tot, 0.0)) if p.p_tot < 1.0 else p.omega_p
    q = int(np.argmin(np.abs(omega - target)))
    return DressedModes(omega, phi2, 1.0 / phi2, q)


def single_mode_exact(omega_p: float, omega_r: float, p: float) -> tuple[float, float]:
    """Closed-form roots for one branch.

    ``w^2 = [w_p^2 + w_r^2 (1 + p) -/+ sqrt(D)] / 2`` with
    ``D = (w_p^2 + w_r^2 (1 + p))^2 - 4 w_p^2 w_r^2``; the smaller root uses
    the product form to avoid cancellation.
    """
    if not (omega_p > 0.0 and omega_r > 0.0):
        raise ValueError("frequencies must be positive")
    if not 0.0 <= p < 1.0:
        raise ValueError("p must satisfy 0 <= p < 1")
    s = omega_p ** 2 + omega_r ** 2 * (1.0 + p)
    prod = omega_p ** 2 * omega_r ** 2
    # D = (w_p^2 - w_r^2)^2 + p w_r^2 (2 w_p^2 + 2 w_r^2 + p w_r^2): a sum of non-negative terms
    disc = (omega_p ** 2 - omega_r ** 2) ** 2 + p * omega_r ** 2 * (
        2.0 * omega_p ** 2 + 2.0 * omega_r ** 2 + p * omega_r ** 2)
    root = math.sqrt(max(disc, 0.0))
    plus2 = 0.5 * (s + root)
    minus2 = prod / plus2
    return math.sqrt(minus2), math.sqrt(plus2)


def multimode_dispersive_shift(omega_p: float, branches) -> float:
    """Shift of the qubit-like root from ``omega_p`` to first order in ``p_k``.

    ``delta_omega = sum_k p_k w_p w_k^2 / (2 (w_p^2 - w_k^2))`` where ``p_k``
    and ``w_p`` are referred to the direct capacitance.  Warns with
    :class:`NearResonance` when ``max_k p_k r_k^2 / |1 - r_k^2| > 0.1``.
    """
    shift = 0.0
    worst = 0.0
    for pk, wk in branches:
        shift += pk * omega_p * wk ** 2 / (2.0 * (omega_p ** 2 - wk ** 2))
        r2 = (wk / omega_p) ** 2
        worst = max(worst, pk * r2 / abs(1.0 - r2))
    if worst > 0.1:
        warnings.warn(f"dispersive expansion parameter {worst:.3g} exceeds 0.1", NearResonance, stacklevel=2)
    return shift


def _segment_poles(seg_len: float, term: str, velocity: float, count: int) -> np.ndarray:
    if seg_len <= 0.0:
        return np.empty(0)
    k = np.arange(1, count + 1, dtype=float)
    if term == "short":
        return k * math.pi * velocity / seg_len
    return (k - 0.5) * math.pi * velocity / seg_len


def _tline_poles(env: TLineEnvironment, count: int) -> np.ndarray:
    poles = np.concatenate([_segment_poles(a, t, env.velocity, count) for a, t in env.segments])
    poles = np.sort(poles)
    if poles.size > 1:
        keep = np.concatenate(([True], np.diff(poles) > 1e-12 * poles[1:]))
        poles = poles[keep]
    return poles[:count]


def spatial_dressed(env: TLineEnvironment, l_j: float, n_roots: int) -> np.ndarray:
    """Lowest ``n_roots`` solutions of ``w B(w) = 1/L_J`` for a junction inside a line.

    ``w B`` increases strictly between the poles of the two line sections,
    so each interval between merged poles (and the one below the first)
    holds exactly one root.
    """
    if int(n_roots) != n_roots or n_roots < 1:
        raise ValueError("n_roots must be a positive integer")
    if not l_j > 0.0:
        raise ValueError("l_j must be > 0")
    n_roots = int(n_roots)
    poles = _tline_poles(env, n_roots)
    inv_lj = 1.0 / l_j

    def f(w):
        return w * tline_admittance(env, w).imag - inv_lj

    roots = np.empty(n_roots)
    lefts = np.concatenate(([0.0], poles[:-1]))
    for i in range(n_roots):
        left = lefts[i]
        if i < poles.size:
            right = poles[i]
        else:
            # no further poles (both sections shorter than needed): grow the window
            right = 2.0 * max(left, 1.0 / math.sqrt(l_j * max(env.c_j, 1e-30)))
        found = False
        for g in (1e-12, 1e-14, 1e-15):
            xl = left * (1.0 + g) if left > 0 else right * 1e-9
            xr = right * (1.0 - g)
            try:
                fl, fr = f(xl), f(xr)
            except PoleHit:
                continue
            if fl < 0.0 < fr:
                roots[i] = brentq(f, xl, xr, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=300)
                found = True
                break
        if not found:
            raise ConvergenceFailure(f"no sign change in transmission-line interval {i}")
    return roots


def spatial_modes(env: TLineEnvironment, l_j: float, n_roots: int) -> DressedModes:
    """Roots of :func:`spatial_dressed` with participations ``2 w / (d[w B]/d w)``."""
    w = spatial_dressed(env, l_j, n_roots)
    phi2 = np.array([2.0 * wi / tline_segment_slope(env, wi) for wi in w])
    return DressedModes(w, phi2, 1.0 / phi2, 0)


def graphical_curve(p: BoundaryProblem, omega_grid) -> np.ndarray:
    """Samples ``(w, w L_J Im Y(i w))``; NaN where ``w`` sits on a pole.

    Crossings of the value 1 bracket the dressed roots.
    """
    w = np.asarray(omega_grid, dtype=float).ravel()
    out = np.empty((w.size, 2))
    out[:, 0] = w
    for i, wi in enumerate(w):
        try:
            out[i, 1] = wi * p.l_j * eval_foster(p.env, wi).imag
        except PoleHit:
            out[i, 1] = np.nan
    return out
