"""Foster, Cauer and Jacobi faces of a lossless admittance.

On the imaginary axis a Foster admittance is ``Y(i w) = i w F(w^2)`` with

    F(x) = A - B/x + sum_k R_k / (p_k - x),

``A = C_inf``, ``B = 1/L_0``, ``p_k = w_k^2`` and ``R_k = C_k w_k^2``.  The
ladder is grown by alternately removing the constant ``A`` (a shunt
capacitor or a series inductor) and taking the reciprocal of the remainder,
which is again of the same form.  Everything stays in pole/residue lists, so
no polynomial coefficients are ever formed.

A ladder ``c0 | L1, C1 | L2, C2 | ... [| L_tail]`` with the port shorted
is a chain of loops.  In loop currents its eigenproblem is the Jacobi matrix

    a_n = (1/C_{n-1} + 1/C_n) / L_n,    b_n = 1 / (C_n sqrt(L_n L_{n+1})),

with ``1/C_0 = 0`` (shorted port) and, for a terminal inductor, a final row
with ``1/C_{N+1} = 0``.  Its resolvent satisfies
``G(w^2) = -L_1 (Im Y(i w)/w - c0)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import jacobi
from .errors import (
    NearDegenerateError,
    NearDegenerateWarning,
    NegativeElement,
    NonRealizable,
    PoleHit,
    VariantMismatch,
)
from .netfunc import FosterForm

__all__ = [
    "CauerLadder",
    "cauer_expand",
    "cauer_eval",
    "cauer_eval_lentz",
    "cauer_to_jacobi",
    "jacobi_to_cauer",
    "cauer_to_foster",
    "foster_to_cauer_to_foster",
    "check_pole_spacing",
]

WARN_GAP = 1e-3
ERROR_GAP = 1e-9


@dataclass(frozen=True)
class CauerLadder:
    """Series-L / shunt-C ladder.

    Attributes
    ----------
    variant : {"TypeI", "TypeII"}
        TypeII starts with a shunt capacitor ``leading_c0``; TypeI does not.
    sections : tuple of (l_n, c_n)
    leading_c0 : float
        Zero for TypeI.
    l_tail : float or None
        Terminal series inductor to ground (present when the admittance has
        a dc pole).
    """

    variant: str
    sections: tuple
    leading_c0: float = 0.0
    l_tail: float | None = None

    def __post_init__(self):
        if self.variant not in ("TypeI", "TypeII"):
            raise ValueError(f"variant must be 'TypeI' or 'TypeII', got {self.variant!r}")
        secs = tuple((float(l), float(c)) for l, c in self.sections)
        object.__setattr__(self, "sections", secs)
        object.__setattr__(self, "leading_c0", float(self.leading_c0))
        for l, c in secs:
            if not (l > 0.0 and c > 0.0):
                raise NegativeElement(f"ladder element not positive: L={l}, C={c}")
        if self.variant == "TypeII" and not self.leading_c0 > 0.0:
            raise VariantMismatch("TypeII ladder needs a positive leading capacitor")
        if self.variant == "TypeI" and self.leading_c0 != 0.0:
            raise VariantMismatch("TypeI ladder has no leading capacitor")
        if self.l_tail is not None:
            if not self.l_tail > 0.0:
                raise NegativeElement("terminal inductor must be positive")
            if not secs:
                raise ValueError("a terminal inductor needs at least one section")

    @property
    def l(self) -> np.ndarray:
        return np.array([s[0] for s in self.sections])

    @property
    def c(self) -> np.ndarray:
        return np.array([s[1] for s in self.sections])

    @property
    def section_frequencies(self) -> np.ndarray:
        """``1/sqrt(L_n C_n)`` per section."""
        return 1.0 / np.sqrt(self.l * self.c)

    @property
    def section_impedances(self) -> np.ndarray:
        """``sqrt(L_n / C_n)`` per section."""
        return np.sqrt(self.l / self.c)


def check_pole_spacing(omega_k) -> None:
    """Warn (relative gap < 1e-3) or raise (< 1e-9) for crowded poles."""
    w = np.asarray(omega_k, dtype=float)
    if w.size < 2:
        return
    gap = float(np.min(np.diff(w) / w[1:]))
    if gap < ERROR_GAP:
        raise NearDegenerateError(f"relative pole gap {gap:.2e} below {ERROR_GAP:g}")
    if gap < WARN_GAP:
        warnings.warn(f"relative pole gap {gap:.2e}; conversion may lose accuracy",
                      NearDegenerateWarning, stacklevel=3)


class _Level:
    """``F(x) = A - B/x + sum R/(p - x)`` with a structural flag for ``B > 0``."""

    __slots__ = ("a", "b", "p", "r")

    def __init__(self, a, b, p, r):
        self.a = a
        self.b = b
        self.p = np.asarray(p, dtype=float)
        self.r = np.asarray(r, dtype=float)

    def reciprocal(self) -> "_Level":
        """Level of ``g = -1 / (x (F - A))``."""
        p, r, b = self.p, self.r, self.b
        rp = r * p
        total = b + float(np.sum(r))

        def h(x):
            return -total + float(np.sum(rp / (p - x)))

        def dh(x):
            return float(np.sum(rp / (p - x) ** 2))

        roots = []
        # interval (0, p_1) holds a root only when the dc term is present
        if b > 0.0 and p.size:
            roots.append(_bracket_root(h, 0.0, p[0], left_open=False))
        for k in range(p.size - 1):
            roots.append(_bracket_root(h, p[k], p[k + 1]))
        z = np.array(roots, dtype=float)
        res = np.array([1.0 / dh(zz) for zz in z]) if z.size else np.empty(0)
        if b > 0.0:
            new_b = 0.0
        else:
            new_b = 1.0 / dh(0.0) if p.size else 0.0
        if total <= 0.0:
            raise NegativeElement("extraction produced a non-positive series element")
        if np.any(res <= 0.0) or new_b < 0.0:
            raise NegativeElement("extraction produced a non-positive residue")
        return _Level(1.0 / total, new_b, z, res)

    def empty(self) -> bool:
        return self.p.size == 0 and self.b == 0.0


def _bracket_root(h, left, right, left_open=True):
    span = right - left
    for guard in (1e-12, 1e-14, 1e-15):
        xl = left + guard * max(span, abs(left)) if left_open else left
        xr = right - guard * max(span, abs(right))
        fl, fr = h(xl), h(xr)
        if fl < 0.0 < fr:
            return brentq(h, xl, xr, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400)
        if fl == 0.0:
            return xl
    raise NegativeElement("admittance is not monotone between poles; input is not positive-real")


def cauer_expand(y: FosterForm, variant: str = "TypeII") -> CauerLadder:
    """Continued-fraction (ladder) expansion of a Foster admittance.

    Parameters
    ----------
    y : FosterForm
    variant : {"TypeII", "TypeI"}
        TypeII extracts a leading shunt capacitor and needs ``c_inf > 0``;
        TypeI needs ``c_inf == 0``.

    Raises
    ------
    VariantMismatch
        The leading limit of the requested variant does not exist.
    NegativeElement
        An extracted element is not positive (input not positive-real).
    """
    if variant not in ("TypeI", "TypeII"):
        raise ValueError(f"unknown variant {variant!r}")
    if any(c <= 0.0 for c in y.c_k) or y.c_inf < 0.0:
        raise NegativeElement("Foster form has a non-positive residue")
    if variant == "TypeII" and not y.c_inf > 0.0:
        raise VariantMismatch("TypeII needs c_inf > 0; use TypeI")
    if variant == "TypeI" and y.c_inf != 0.0:
        raise VariantMismatch("TypeI needs c_inf == 0 (Y/s must vanish at infinity); use TypeII")
    check_pole_spacing(y.omega_k)
    if y.n_branches == 0 and y.l0 is None and y.c_inf == 0.0:
        raise ValueError("admittance is identically zero")
    wk = y.omega_k
    level = _Level(y.c_inf, 0.0 if y.l0 is None else 1.0 / y.l0, wk ** 2, y.c_k * wk ** 2)
    c0 = level.a
    ls, cs = [], []
    l_tail = None
    while not level.empty():
        zlev = level.reciprocal()
        if zlev.empty():
            if cs:
                l_tail = zlev.a
                break
            raise VariantMismatch("a lone inductive path has no ladder section")
        ls.append(zlev.a)
        level = zlev.reciprocal()
        if not level.a > 0.0:
            raise NegativeElement("extraction produced a non-positive shunt capacitor")
        cs.append(level.a)
    return CauerLadder(variant, tuple(zip(ls, cs)), c0 if variant == "TypeII" else 0.0, l_tail)


def cauer_eval(ladder: CauerLadder, omega):
    """Ladder admittance ``Y(i omega)`` by bottom-up nesting."""
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w <= 0.0):
        raise ValueError("omega must be > 0")
    out = np.empty(w.size, dtype=complex)
    for i, wi in enumerate(w):
        s = 1j * wi
        yb = 0j if ladder.l_tail is None else 1.0 / (s * ladder.l_tail)
        for l, c in reversed(ladder.sections):
            yc = s * c + yb
            if yc == 0:
                yb = 0j
                continue
            z = s * l + 1.0 / yc
            if abs(z) <= 1e-13 * abs(s * l):
                raise PoleHit(f"omega={wi!r} at a ladder resonance")
            yb = 1.0 / z
        out[i] = s * ladder.leading_c0 + yb
    return complex(out[0]) if scalar else out


def cauer_eval_lentz(ladder: CauerLadder, omega: float) -> complex:
    """Same admittance via the modified Lentz algorithm.

    ``Y - i w c0 = 1/(beta_1 + 1/(beta_2 + ...))`` with ``beta`` alternating
    ``i w L_n`` and ``i w C_n``; cast as the Jacobi-form fraction with
    ``z = 0``, diagonal ``-beta`` and squared couplings ``-1``.
    """
    s = 1j * float(omega)
    betas = []
    for l, c in ladder.sections:
        betas += [s * l, s * c]
    if ladder.l_tail is not None:
        betas.append(s * ladder.l_tail)
    if not betas:
        return s * ladder.leading_c0
    beta = np.array(betas)
    return s * ladder.leading_c0 + jacobi.lentz_eval(-beta, -np.ones(beta.size - 1), 0.0)


def cauer_to_jacobi(ladder: CauerLadder) -> jacobi.JacobiMatrix:
    """Loop-current Jacobi matrix of the ladder with its port shorted."""
    if not ladder.sections:
        raise ValueError("ladder needs at least one section")
    l = list(ladder.l)
    inv_c = list(1.0 / ladder.c)
    if ladder.l_tail is not None:
        l.append(ladder.l_tail)
        inv_c.append(0.0)
    l = np.array(l)
    inv_c = np.array(inv_c)
    prev = np.concatenate(([0.0], inv_c[:-1]))
    a = (prev + inv_c) / l
    b = inv_c[:-1] / np.sqrt(l[:-1] * l[1:])
    return jacobi.JacobiMatrix(a, b)


def jacobi_to_cauer(j: jacobi.JacobiMatrix, c1: float = 1.0, c0: float | None = None) -> CauerLadder:
    """Invert :func:`cauer_to_jacobi` in the gauge fixed by ``C_1 = c1``.

    Returns a TypeI ladder, or TypeII when a leading capacitor ``c0`` is
    given.  The Jacobi matrix determines the ladder only up to the scaling
    ``L -> s L``, ``C -> C / s``; ``c1`` selects the member of that family.

    A last row whose recovered elastance vanishes (to 1e-9 relative) is
    read as a terminal inductor.

    Raises
    ------
    NonRealizable
        A recovered capacitance is not positive.
    """
    if not c1 > 0.0:
        raise ValueError("c1 must be > 0")
    a, b = j.diag, j.offdiag
    inv_c = [1.0 / c1]
    ls = [1.0 / (a[0] * c1)]
    if not ls[0] > 0.0:
        raise NonRealizable("a_0 must be positive for a realizable ladder")
    l_tail = None
    for n in range(1, a.size):
        l_next = 1.0 / (ls[-1] * (b[n - 1] / inv_c[-1]) ** 2)
        ic = a[n] * l_next - inv_c[-1]
        if n == a.size - 1 and abs(ic) <= 1e-9 * inv_c[-1]:
            # vanishing last elastance: the row is a terminal inductor
            l_tail = l_next
            break
        if not ic > 0.0:
            raise NonRealizable(f"capacitance {n + 1} is not positive (1/C = {ic:.3e})")
        ls.append(l_next)
        inv_c.append(ic)
    secs = tuple((l, 1.0 / ic) for l, ic in zip(ls, inv_c))
    if c0 is None:
        return CauerLadder("TypeI", secs, 0.0, l_tail)
    return CauerLadder("TypeII", secs, c0, l_tail)


def cauer_to_foster(ladder: CauerLadder) -> FosterForm:
    """Foster form from the eigenvalues and first-site weights of the ladder's Jacobi matrix."""
    if not ladder.sections:
        return FosterForm(ladder.leading_c0)
    jm = cauer_to_jacobi(ladder)
    e = jacobi.eigenvalues(jm)
    w = jacobi.residues(jm, e)
    l1 = ladder.sections[0][0]
    l0 = None
    if ladder.l_tail is not None:
        # lowest eigenvalue is the dc loop; it is zero up to rounding
        l0 = l1 / w[0]
        e, w = e[1:], w[1:]
    ck = w / (l1 * e)
    return FosterForm(ladder.leading_c0, tuple(zip(ck, np.sqrt(e))), l0)


def foster_to_cauer_to_foster(y: FosterForm) -> FosterForm:
    """Round trip through the ladder; used as a consistency check."""
    variant = "TypeII" if y.c_inf > 0.0 else "TypeI"
    return cauer_to_foster(cauer_expand(y, variant))


def ladder_resolvent(ladder: CauerLadder, omega: float) -> float:
    """``G(w^2) = -L_1 (Im Y(i w)/w - c0)`` from the ladder admittance."""
    y = cauer_eval(ladder, omega)
    return -ladder.sections[0][0] * (y.imag / omega - ladder.leading_c0)


__all__.append("ladder_resolvent")
