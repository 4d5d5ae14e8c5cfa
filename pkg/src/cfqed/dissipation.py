"""Decay rates from the dissipative part of the environment.

* Modal decay: a conductance ``G_n`` at a dressed mode damps it at
  ``kappa_n = G_n / C_n^eff``.
* Purcell decay through one or several lossy modes, including the
  interference term generated by inter-mode couplings ``J_kl``.
* Spin-boson coupling ``alpha_SB`` of a junction phase to an ohmic line,
  with ``Gamma_1/Delta = 2 pi alpha_SB`` at zero temperature.

Frequencies are angular (rad/s) unless stated otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import R_Q
from .errors import NoZeroFound, RegimeWarning

__all__ = [
    "LossyMode",
    "InterModeCoupling",
    "modal_decay",
    "purcell_single",
    "purcell_from_admittance",
    "multimode_gamma",
    "suppression_zeros",
    "spin_boson_alpha",
    "phi_sq_from_alpha",
    "gamma1_over_delta",
    "phi_from_residue",
    "contour_residue",
    "design_bounds",
    "x_dephasing_rate",
]


@dataclass(frozen=True)
class LossyMode:
    """Environmental mode with complex frequency ``omega_k - i kappa_k/2``.

    ``g_k`` and ``phi_k`` are the magnitude and phase of its coupling to
    the qubit.
    """

    omega_k: float
    kappa_k: float
    g_k: float
    phi_k: float = 0.0

    def __post_init__(self):
        if self.kappa_k < 0.0:
            raise ValueError("kappa_k must be >= 0")


@dataclass(frozen=True)
class InterModeCoupling:
    """Coupling ``J_kl e^{i theta_kl}``; the reverse link carries ``-theta_kl``."""

    j_kl: float
    theta_kl: float = 0.0

    def reversed(self) -> "InterModeCoupling":
        return InterModeCoupling(self.j_kl, -self.theta_kl)


def modal_decay(g_n, c_eff):
    """``kappa = G_n / C_n^eff`` (rad/s)."""
    c = np.asarray(c_eff, dtype=float)
    if np.any(c <= 0.0):
        raise ValueError("c_eff must be > 0")
    out = np.asarray(g_n, dtype=float) / c
    return float(out) if out.ndim == 0 else out


def purcell_single(g: float, delta: float, kappa: float) -> float:
    """``Gamma = g^2 kappa / (Delta^2 + (kappa/2)^2)``.

    Warns with :class:`RegimeWarning` when ``|Delta| < kappa`` (the qubit
    sits inside the mode linewidth).
    """
    if kappa < 0.0:
        raise ValueError("kappa must be >= 0")
    if abs(delta) < kappa:
        warnings.warn("qubit inside the mode linewidth; the Purcell formula is not dispersive here",
                      RegimeWarning, stacklevel=2)
    return g * g * kappa / (delta * delta + 0.25 * kappa * kappa)


def purcell_from_admittance(g_cond_at_omega_q: float, c_q_eff: float) -> float:
    """``Gamma = G(w_q) / C_q^eff``."""
    return modal_decay(g_cond_at_omega_q, c_q_eff)


def _coupling_items(couplings):
    if not couplings:
        return []
    items = couplings.items() if isinstance(couplings, dict) else couplings
    out = []
    for (k, l), c in items:
        if k == l:
            raise ValueError("inter-mode coupling needs two distinct modes")
        if k > l:
            k, l, c = l, k, c.reversed()
        out.append((k, l, c))
    return out


def multimode_gamma(omega_q: float, modes, couplings=None, warn: bool = True) -> dict:
    """Qubit decay through several lossy modes with interference.

    Parameters
    ----------
    omega_q : float
        Qubit frequency.
    modes : sequence of LossyMode
    couplings : dict {(k, l): InterModeCoupling}, optional
        Index pairs into ``modes``.

    Returns
    -------
    dict
        ``gamma_direct`` (per-mode array), ``gamma_0`` (their sum),
        ``gamma_interference`` ({(k, l): value}) and ``gamma_eff``.
    """
    modes = list(modes)
    d = np.array([omega_q - m.omega_k for m in modes])
    kap = np.array([m.kappa_k for m in modes])
    g = np.array([m.g_k for m in modes])
    lor = d * d + 0.25 * kap * kap
    direct = g * g * kap / lor
    inter = {}
    for k, l, c in _coupling_items(couplings):
        if warn and abs(c.j_kl) > 0.1 * abs(modes[k].omega_k - modes[l].omega_k):
            warnings.warn(f"J_{k}{l} not small against the mode separation", RegimeWarning, stacklevel=2)
        cos_phi = math.cos(modes[k].phi_k - modes[l].phi_k + c.theta_kl)
        num = 2.0 * (kap[k] * d[l] + kap[l] * d[k]) * g[k] * g[l] * c.j_kl * cos_phi
        inter[(k, l)] = num / (lor[k] * lor[l])
    g0 = float(np.sum(direct))
    return {
        "gamma_direct": direct,
        "gamma_0": g0,
        "gamma_interference": inter,
        "gamma_eff": g0 + float(sum(inter.values())),
    }


def suppression_zeros(modes, couplings, omega_range, n_grid: int = 4001) -> np.ndarray:
    """Qubit frequencies in ``omega_range`` where ``Gamma_eff`` changes sign.

    Raises
    ------
    NoZeroFound
        No sign change on the grid (always the case without couplings,
        since every direct term is positive).
    """
    lo, hi = omega_range
    if not hi > lo:
        raise ValueError("omega_range must be increasing")
    items = _coupling_items(couplings)
    if not items or all(c.j_kl == 0.0 for _, _, c in items):
        raise NoZeroFound("no inter-mode coupling: the conductance is a sum of positive terms")

    def f(w):
        return multimode_gamma(w, modes, couplings, warn=False)["gamma_eff"]

    grid = np.linspace(lo, hi, n_grid)
    vals = np.array([f(w) for w in grid])
    zeros = []
    for i in range(n_grid - 1):
        if vals[i] == 0.0:
            zeros.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            zeros.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14 * abs(grid[i]), rtol=4 * np.finfo(float).eps))
    if not zeros:
        raise NoZeroFound("effective conductance keeps one sign on the interval")
    return np.array(zeros)


def spin_boson_alpha(phi_beta_sq: float, z0: float) -> float:
    """``alpha_SB = R_Q |phi_beta|^2 / (4 pi^2 Z0)``."""
    if not z0 > 0.0:
        raise ValueError("z0 must be > 0")
    return R_Q * phi_beta_sq / (4.0 * math.pi ** 2 * z0)


def phi_sq_from_alpha(alpha_sb: float, z0: float) -> float:
    """Inverse of :func:`spin_boson_alpha`."""
    if not z0 > 0.0:
        raise ValueError("z0 must be > 0")
    return 4.0 * math.pi ** 2 * z0 * alpha_sb / R_Q


def gamma1_over_delta(alpha_sb: float) -> float:
    """Zero-temperature ohmic relaxation ``Gamma_1 / Delta = 2 pi alpha_SB``."""
    if alpha_sb < 0.0:
        raise ValueError("alpha_sb must be >= 0")
    return 2.0 * math.pi * alpha_sb


def phi_from_residue(r_delta: float, delta: float, z0: float) -> float:
    """``|phi_beta|^2 = (4 pi^2 Z0 / R_Q) R_Delta / (2 Delta)``."""
    if not r_delta > 0.0:
        raise ValueError("r_delta must be > 0")
    return 4.0 * math.pi ** 2 * z0 / R_Q * r_delta / (2.0 * delta)


def contour_residue(y, s0: complex, radius: float, n: int = 64) -> complex:
    """Residue of ``y`` at the simple pole ``s0`` by the trapezoid rule on a circle.

    ``radius`` must exclude every other singularity; convergence in ``n``
    is geometric.
    """
    t = 2.0 * math.pi * np.arange(n) / n
    pts = s0 + radius * np.exp(1j * t)
    vals = np.array([y(s) for s in pts])
    return complex(np.mean(vals * (pts - s0)))


def design_bounds(t1_target: float, delta: float, z0: float) -> dict:
    """Largest ``alpha_SB`` and ``|phi_beta|^2`` compatible with ``T_1 >= t1_target``.

    ``alpha_max = 1 / (2 pi t1_target Delta)`` with ``Delta`` the qubit
    splitting in rad/s.
    """
    if not (t1_target > 0.0 and delta > 0.0 and z0 > 0.0):
        raise ValueError("inputs must be positive")
    a = 1.0 / (2.0 * math.pi * t1_target * delta)
    return {"alpha_max": a, "phi_sq_max": phi_sq_from_alpha(a, z0)}


def x_dephasing_rate(x00: float, x11: float, s_x0: float) -> float:
    """Pure dephasing from longitudinal ``X`` noise: ``(X_11 - X_00)^2 S_X(0) / 2``."""
    return 0.5 * (x11 - x00) ** 2 * s_x0
