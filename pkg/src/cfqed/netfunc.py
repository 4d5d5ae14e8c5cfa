"""Passive driving-point admittances.

A lossless one-port admittance seen by a junction is stored in Foster form

    Y(s) = s C_inf + 1/(s L_0) + sum_k s C_k w_k^2 / (s^2 + w_k^2)   (+ G_0)

i.e. a direct capacitor, an optional dc inductor and series-LC branches
with ``L_k = 1/(C_k w_k^2)``.  This module evaluates such forms, checks
positive-realness on a grid, reduces lumped LC networks to a Foster form
by spectral Schur complementation, and models a transmission line with an
embedded junction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateResonance, NonPositiveResidue, PoleHit, SingularInternalBlock

__all__ = [
    "FosterForm",
    "Element",
    "LumpedNetwork",
    "GROUND",
    "TLineEnvironment",
    "PRReport",
    "eval_foster",
    "susceptance_slope",
    "check_positive_real",
    "schur_reduce",
    "foster_star_network",
    "tline_admittance",
    "tline_foster",
    "tline_segment_slope",
    "POLE_RTOL",
]

POLE_RTOL = 1e-12
GROUND = -1


@dataclass(frozen=True)
class FosterForm:
    """Lossless admittance in partial-fraction form.

    Parameters
    ----------
    c_inf : float
        Direct (high-frequency) capacitance in F.  Includes the junction
        capacitance when the form describes the junction port.
    branches : sequence of (c_k, omega_k)
        Branch capacitances (F) and resonance frequencies (rad/s), with
        strictly increasing frequencies.
    l0 : float, optional
        Inductance (H) of a dc path to ground, if present.
    g0 : float
        Constant shunt conductance (S).  Zero for the lossless case.
    check : bool
        Validate positivity and ordering.  ``FosterForm.unchecked`` skips it
        so that invalid forms can be built for testing the PR check.
    """

    c_inf: float
    branches: tuple = ()
    l0: float | None = None
    g0: float = 0.0
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        br = tuple((float(c), float(w)) for c, w in self.branches)
        object.__setattr__(self, "branches", br)
        object.__setattr__(self, "c_inf", float(self.c_inf))
        if self.l0 is not None:
            object.__setattr__(self, "l0", float(self.l0))
        object.__setattr__(self, "g0", float(self.g0))
        if not self.check:
            return
        if not (self.c_inf >= 0.0 and math.isfinite(self.c_inf)):
            raise ValueError(f"c_inf must be finite and >= 0, got {self.c_inf}")
        if self.l0 is not None and not self.l0 > 0.0:
            raise ValueError(f"l0 must be > 0, got {self.l0}")
        if self.g0 < 0.0:
            raise ValueError(f"g0 must be >= 0, got {self.g0}")
        prev = 0.0
        for c, w in br:
            if not c > 0.0:
                raise ValueError(f"branch capacitance must be > 0, got {c}")
            if not w > prev:
                raise ValueError("branch frequencies must be positive and strictly increasing")
            prev = w

    @classmethod
    def unchecked(cls, c_inf, branches=(), l0=None, g0=0.0) -> "FosterForm":
        return cls(c_inf, branches, l0, g0, check=False)

    @property
    def c_k(self) -> np.ndarray:
        return np.array([c for c, _ in self.branches], dtype=float)

    @property
    def omega_k(self) -> np.ndarray:
        return np.array([w for _, w in self.branches], dtype=float)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    @property
    def c_sigma(self) -> float:
        """Total low-frequency node capacitance ``c_inf + sum c_k``."""
        return self.c_inf + float(np.sum(self.c_k))

    def with_branches(self, branches) -> "FosterForm":
        return FosterForm(self.c_inf, tuple(branches), self.l0, self.g0)


def _check_poles(y: FosterForm, w: np.ndarray) -> None:
    wk = y.omega_k
    if wk.size:
        hit = np.abs(w[:, None] - wk[None, :]) <= POLE_RTOL * wk[None, :]
        if np.any(hit):
            i, k = np.argwhere(hit)[0]
            raise PoleHit(f"omega={w[i]!r} coincides with branch pole {wk[k]!r}")
    if y.l0 is not None and np.any(w == 0.0):
        raise PoleHit("omega=0 is the dc pole of the inductive path")


def eval_foster(y: FosterForm, omega):
    """Admittance ``Y(i omega)`` in S; vectorised over ``omega``.

    Raises
    ------
    PoleHit
        If ``omega`` lies within a relative 1e-12 of a branch pole, or is 0
        with a dc inductor present.
    """
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w < 0.0):
        raise ValueError("omega must be >= 0")
    _check_poles(y, w)
    b = w * y.c_inf
    if y.branches:
        ck, wk = y.c_k, y.omega_k
        w2 = wk * wk
        # factored difference: w_k - w is exact near a pole, w_k^2 - w^2 is not
        den = (wk[None, :] - w[:, None]) * (wk[None, :] + w[:, None])
        b = b + np.sum(ck[None, :] * w2[None, :] * w[:, None] / den, axis=1)
    if y.l0 is not None:
        with np.errstate(divide="ignore"):
            b = b - 1.0 / (w * y.l0)
    out = y.g0 + 1j * b
    return complex(out[0]) if scalar else out


def susceptance_slope(y: FosterForm, omega) -> np.ndarray | float:
    """Derivative ``d[omega B(omega)]/d omega`` with ``B = Im Y(i omega)``."""
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    _check_poles(y, w)
    out = 2.0 * w * y.c_inf
    if y.branches:
        ck, wk = y.c_k, y.omega_k
        w2 = wk * wk
        out = out + np.sum(
            2.0 * ck[None, :] * w2[None, :] ** 2 * w[:, None]
            / ((wk[None, :] - w[:, None]) * (wk[None, :] + w[:, None])) ** 2, axis=1
        )
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PRReport:
    """Outcome of a positive-real check.

    Attributes
    ----------
    is_pr : bool
    min_re : float
        Minimum of Re Y over the grid.
    worst_frequency : float
        Grid frequency where the minimum occurs.
    residues_ok : bool
        Foster residues (capacitances, inverse inductance) all positive.
    """

    is_pr: bool
    min_re: float
    worst_frequency: float
    residues_ok: bool = True

    @property
    def worst_violation(self) -> tuple[float, float]:
        return self.min_re, self.worst_frequency


def default_grid(y: FosterForm, n: int = 400) -> np.ndarray:
    wk = y.omega_k
    if wk.size:
        lo, hi = wk.min() / 10.0, wk.max() * 10.0
    elif y.l0 is not None and y.c_inf > 0:
        w0 = 1.0 / math.sqrt(y.l0 * y.c_inf)
        lo, hi = w0 / 10.0, w0 * 10.0
    else:
        lo, hi = 2 * math.pi * 1e8, 2 * math.pi * 1e11
    return np.geomspace(lo, hi, n)


def check_positive_real(y, grid: Sequence[float] | None = None, abs_tol: float = 1e-12) -> PRReport:
    """Check ``Re Y(i omega) >= -abs_tol`` on a grid (and Foster residue signs).

    Parameters
    ----------
    y : FosterForm or callable
        A callable must map an angular frequency to a complex admittance.
    grid : sequence of float, optional
        Strictly positive frequencies.  Required for callables; for a
        FosterForm the default is 400 log-spaced points over
        ``[w_min/10, 10 w_max]``.
    """
    residues_ok = True
    if isinstance(y, FosterForm):
        residues_ok = (y.c_inf >= 0.0 and all(c > 0.0 for c, _ in y.branches)
                       and (y.l0 is None or y.l0 > 0.0) and y.g0 >= 0.0)
        g = default_grid(y) if grid is None else np.asarray(grid, dtype=float)

        def f(w):
            return eval_foster(y, w)
    else:
        if grid is None:
            raise ValueError("a grid is required for a callable admittance")
        g = np.asarray(grid, dtype=float)
        f = y
    if g.size == 0 or np.any(g <= 0.0):
        raise ValueError("grid must be non-empty with strictly positive frequencies")
    re = np.full(g.size, np.inf)
    for i, w in enumerate(g):
        try:
            re[i] = complex(f(float(w))).real
        except PoleHit:
            continue
    i = int(np.argmin(re))
    min_re = float(re[i])
    return PRReport(bool(min_re >= -abs_tol and residues_ok), min_re, float(g[i]), residues_ok)


# ---------------------------------------------------------------------------
# lumped networks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Element:
    """Two-terminal capacitor ``"C"`` or inductor ``"L"``; ``GROUND`` is -1."""

    kind: str
    value: float
    node_a: int
    node_b: int = GROUND


@dataclass(frozen=True)
class LumpedNetwork:
    """Lossless LC network with ``node_count`` non-ground nodes."""

    node_count: int
    elements: tuple

    def __post_init__(self):
        els = tuple(e if isinstance(e, Element) else Element(**e) for e in self.elements)
        object.__setattr__(self, "elements", els)
        if self.node_count < 1:
            raise ValueError("network needs at least one node")
        for e in els:
            if e.kind not in ("C", "L"):
                raise ValueError(f"unknown element kind {e.kind!r}")
            if not e.value > 0.0:
                raise ValueError(f"element value must be > 0, got {e.value}")
            for nd in (e.node_a, e.node_b):
                if not (nd == GROUND or 0 <= nd < self.node_count):
                    raise ValueError(f"node index {nd} out of range")
            if e.node_a == e.node_b:
                raise ValueError("element shorted onto a single node")

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Capacitance matrix C and inverse-inductance matrix K (Y = sC + K/s)."""
        n = self.node_count
        cm = np.zeros((n, n))
        km = np.zeros((n, n))
        for e in self.elements:
            m = cm if e.kind == "C" else km
            v = e.value if e.kind == "C" else 1.0 / e.value
            a, b = e.node_a, e.node_b
            if a != GROUND:
                m[a, a] += v
            if b != GROUND:
                m[b, b] += v
            if a != GROUND and b != GROUND:
                m[a, b] -= v
                m[b, a] -= v
        return cm, km


def schur_reduce(net: LumpedNetwork, port: int, *, rel_tol: float = 1e-10) -> FosterForm:
    """Driving-point admittance at ``port`` after eliminating internal nodes.

    The internal block ``Y_II = s C_II + K_II/s`` is diagonalised by the
    generalized eigenproblem ``K_II v = w^2 C_II v`` (``v^T C_II v = 1``).
    With port couplings ``c_k = C_pI v_k`` and ``kappa_k = K_pI v_k``::

        Y_in = s (C_pp - sum c_k^2) + (K_pp - sum kappa_k^2 / w_k^2) / s
               + sum (c_k - kappa_k / w_k^2)^2 w_k^2 s / (s^2 + w_k^2)

    Modes with ``w_k = 0`` only renormalise the direct capacitance.

    Raises
    ------
    SingularInternalBlock
        The internal capacitance block is not positive definite.
    NonPositiveResidue
        The direct capacitance or dc inverse inductance came out negative.
    DegenerateResonance
        Two coupled internal resonances coincide.
    """
    if not 0 <= port < net.node_count:
        raise ValueError(f"port {port} is not a node of the network")
    cm, km = net.matrices()
    idx = [i for i in range(net.node_count) if i != port]
    cpp, kpp = cm[port, port], km[port, port]
    if not idx:
        if cpp < 0 or kpp < 0:
            raise NonPositiveResidue("negative port element")
        return FosterForm(cpp, (), 1.0 / kpp if kpp > 0 else None)
    cii = cm[np.ix_(idx, idx)]
    kii = km[np.ix_(idx, idx)]
    cpi = cm[port, idx]
    kpi = km[port, idx]
    try:
        w2, v = scipy.linalg.eigh(kii, cii)
    except np.linalg.LinAlgError as exc:
        raise SingularInternalBlock("internal capacitance block is not positive definite") from exc
    cscale = max(np.max(np.abs(cm)), 1e-300)
    kscale = max(np.max(np.abs(km)), 1e-300)
    wscale = max(np.max(np.abs(w2)), 1e-300)
    ck = cpi @ v
    kk = kpi @ v
    zero = w2 <= 1e-12 * wscale
    if np.any(w2[~zero] < 0):
        raise SingularInternalBlock("internal pencil has negative eigenvalues")
    c_inf = cpp - float(np.sum(ck ** 2))
    inv_l0 = kpp - float(np.sum(kk[~zero] ** 2 / w2[~zero]))
    if c_inf < -rel_tol * cscale:
        raise NonPositiveResidue(f"reduced direct capacitance is negative ({c_inf:.3e} F)")
    if inv_l0 < -rel_tol * kscale:
        raise NonPositiveResidue(f"reduced dc inverse inductance is negative ({inv_l0:.3e} 1/H)")
    c_inf = max(c_inf, 0.0)
    l0 = 1.0 / inv_l0 if inv_l0 > rel_tol * kscale else None
    wk2 = w2[~zero]
    resid = (ck[~zero] - kk[~zero] / wk2) ** 2
    keep = resid > rel_tol * cscale
    wk = np.sqrt(wk2[keep])
    rk = resid[keep]
    order = np.argsort(wk)
    wk, rk = wk[order], rk[order]
    if wk.size > 1:
        gaps = np.diff(wk) / wk[1:]
        if np.any(gaps < 1e-9):
            raise DegenerateResonance("coupled internal resonances coincide; simple poles required")
    return FosterForm(c_inf, tuple(zip(rk, wk)), l0)


def foster_star_network(y: FosterForm) -> LumpedNetwork:
    """Lumped realisation of a Foster form: node 0 is the port.

    Each branch is an inductor from the port to its own node and a
    capacitor from that node to ground.
    """
    els = []
    if y.c_inf > 0:
        els.append(Element("C", y.c_inf, 0))
    if y.l0 is not None:
        els.append(Element("L", y.l0, 0))
    for k, (c, w) in enumerate(y.branches, start=1):
        els.append(Element("L", 1.0 / (c * w * w), 0, k))
        els.append(Element("C", c, k))
    return LumpedNetwork(1 + y.n_branches, tuple(els))


# ---------------------------------------------------------------------------
# transmission line with an embedded junction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TLineEnvironment:
    """Uniform line of length ``length`` with a junction at ``x_j``.

    ``termination_left`` applies at x = 0 and ``termination_right`` at
    x = length; each is ``"short"`` or ``"open"``.
    """

    z0: float
    length: float
    velocity: float
    x_j: float
    c_j: float = 0.0
    termination_left: str = "short"
    termination_right: str = "open"

    def __post_init__(self):
        for name in ("z0", "length", "velocity"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.x_j <= self.length:
            raise ValueError("x_j must lie within [0, length]")
        if self.c_j < 0.0:
            raise ValueError("c_j must be >= 0")
        for t in (self.termination_left, self.termination_right):
            if t not in ("short", "open"):
                raise ValueError(f"termination must be 'short' or 'open', got {t!r}")

    @property
    def c_per_length(self) -> float:
        return 1.0 / (self.z0 * self.velocity)

    @property
    def segments(self) -> tuple[tuple[float, str], tuple[float, str]]:
        return ((self.x_j, self.termination_left), (self.length - self.x_j, self.termination_right))


def _segment_b(theta: np.ndarray, term: str, z0: float) -> np.ndarray:
    """Susceptance of a stub of electrical length theta (short: -cot, open: tan)."""
    if term == "short":
        s = np.sin(theta)
        if np.any(np.abs(s) < 1e-12):
            raise PoleHit("frequency at a shorted-stub resonance")
        return -np.cos(theta) / s / z0
    c = np.cos(theta)
    if np.any(np.abs(c) < 1e-12):
        raise PoleHit("frequency at an open-stub resonance")
    return np.sin(theta) / c / z0


def tline_admittance(env: TLineEnvironment, omega):
    """Admittance seen by the junction: ``i w C_J`` plus both line sections in parallel."""
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w <= 0.0):
        raise ValueError("omega must be > 0")
    b = w * env.c_j
    for seg_len, term in env.segments:
        if seg_len == 0.0:
            if term == "short":
                raise PoleHit("zero-length shorted segment shorts the junction")
            continue
        b = b + _segment_b(w * seg_len / env.velocity, term, env.z0)
    out = 1j * b
    return complex(out[0]) if scalar else out


def tline_segment_slope(env: TLineEnvironment, omega: float) -> float:
    """``d[omega B]/d omega`` for the transmission-line admittance."""
    w = float(omega)
    out = 2.0 * w * env.c_j
    for seg_len, term in env.segments:
        if seg_len == 0.0:
            continue
        th = w * seg_len / env.velocity
        if term == "short":
            s = math.sin(th)
            bseg = -math.cos(th) / s / env.z0
            dseg = (th / (s * s)) / env.z0
        else:
            c = math.cos(th)
            bseg = math.tan(th) / env.z0
            dseg = (th / (c * c)) / env.z0
        out += bseg + dseg
    return out


def tline_foster(env: TLineEnvironment, n_modes: int, *, tail_correction: bool = False) -> FosterForm:
    """Truncated Foster form of a junction-terminated stub (``x_j == length``).

    The expansion follows the far-end termination:

    * open at x = 0 (``tanh``): poles ``(2k-1) pi v / (2 l)`` with
      ``C_k = 8 c l / ((2k-1)^2 pi^2)``;
    * short at x = 0 (``coth``): a dc inductor ``L_0 = Z_0 l / v`` and poles
      ``k pi v / l`` with ``C_k = 2 c l / (k^2 pi^2)``.

    Here ``c = 1/(Z_0 v)`` is the capacitance per unit length.  With
    ``tail_correction`` the low-frequency limit of the discarded branches
    (their summed capacitance) is added to ``c_inf``.
    """
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValueError("n_modes must be a positive integer")
    n_modes = int(n_modes)
    if not math.isclose(env.x_j, env.length, rel_tol=1e-12):
        raise ValueError("tline_foster requires the junction at x = length")
    c_tot = env.c_per_length * env.length
    k = np.arange(1, n_modes + 1, dtype=float)
    if env.termination_left == "open":
        wk = (2 * k - 1) * math.pi * env.velocity / (2 * env.length)
        ck = 8.0 * c_tot / ((2 * k - 1) ** 2 * math.pi ** 2)
        l0 = None
        total = c_tot
    else:
        wk = k * math.pi * env.velocity / env.length
        ck = 2.0 * c_tot / (k ** 2 * math.pi ** 2)
        l0 = env.z0 * env.length / env.velocity
        total = c_tot / 3.0
    c_inf = env.c_j
    if tail_correction:
        c_inf += total - float(np.sum(ck))
    return FosterForm(c_inf, tuple(zip(ck, wk)), l0)
