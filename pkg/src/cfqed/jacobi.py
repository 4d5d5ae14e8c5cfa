"""Symmetric tridiagonal (Jacobi) matrices and their continued-fraction resolvent.

The (0,0) resolvent element of a Jacobi matrix ``J`` with diagonal ``a`` and
positive off-diagonal ``b`` is the continued fraction

    G(z) = 1 / (z - a_0 - b_1^2 / (z - a_1 - b_2^2 / (z - a_2 - ...)))

evaluated here by the stable backward recurrence
``D_{N-1} = z - a_{N-1}``, ``D_n = z - a_n - b_{n+1}^2 / D_{n+1}``, ``G = 1/D_0``.
Eigenvalues are the zeros of ``D_0``; the residue of ``G`` at an eigenvalue
is the squared first component of its eigenvector, ``1 / D_0'(E)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import Breakdown, ConvergenceFailure

__all__ = [
    "JacobiMatrix",
    "resolvent_g00",
    "eigenvalues",
    "residues",
    "eigenvector",
    "lentz_eval",
    "spectral_g00",
    "tridiagonal_eigh",
]


@dataclass(frozen=True)
class JacobiMatrix:
    """Real symmetric tridiagonal matrix with positive off-diagonal.

    Parameters
    ----------
    diag : array_like, shape (N,)
        Diagonal entries ``a_0 .. a_{N-1}``.
    offdiag : array_like, shape (N-1,)
        Off-diagonal entries ``b_1 .. b_{N-1}``, all strictly positive.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.diag, dtype=float).ravel()
        b = np.asarray(self.offdiag, dtype=float).ravel()
        if a.size == 0:
            raise ValueError("Jacobi matrix needs at least one diagonal entry")
        if b.size != a.size - 1:
            raise ValueError(f"offdiag length {b.size} must be len(diag) - 1 = {a.size - 1}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("Jacobi entries must be finite")
        if np.any(b <= 0.0):
            raise ValueError("Jacobi off-diagonal entries must be strictly positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "diag", a)
        object.__setattr__(self, "offdiag", b)

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm(self) -> float:
        """Infinity norm (also a Gershgorin radius bound)."""
        return float(np.max(_gershgorin_radius(self.diag, self.offdiag)))

    def gershgorin(self) -> tuple[float, float]:
        return _gershgorin(self.diag, self.offdiag)


def _gershgorin_radius(a, b):
    r = np.abs(a).copy()
    r[:-1] += np.abs(b)
    r[1:] += np.abs(b)
    return r


def _gershgorin(a, b):
    rad = np.zeros_like(a)
    rad[:-1] += np.abs(b)
    rad[1:] += np.abs(b)
    lo = float(np.min(a - rad))
    hi = float(np.max(a + rad))
    pad = 1e-12 * max(abs(lo), abs(hi), 1e-300) + 1e-300
    return lo - pad, hi + pad


def resolvent_g00(j: JacobiMatrix, z: complex) -> complex:
    """Evaluate ``<0|(z - J)^{-1}|0>`` by the backward recurrence.

    Raises
    ------
    Breakdown
        If an intermediate denominator falls below 1e-300 in magnitude.
    """
    d0, status = _kernels.cf_backward(j.diag.astype(complex), (j.offdiag ** 2).astype(complex), complex(z))
    if status != 0:
        raise Breakdown(f"denominator D_{status - 1} underflowed at z={z!r}; perturb z")
    return complex(1.0 / d0)


def lentz_eval(diag, offdiag_sq, z: complex) -> complex:
    """Modified Lentz evaluation of the same continued fraction.

    Denominators smaller than 1e-30 are replaced by 1e-30 (the usual
    tiny-floor substitution) instead of raising.
    """
    a = np.asarray(diag, dtype=complex).ravel()
    bsq = np.asarray(offdiag_sq, dtype=complex).ravel()
    if bsq.size != max(a.size - 1, 0):
        raise ValueError("offdiag_sq must have len(diag) - 1 entries")
    return complex(_kernels.lentz(a, bsq, complex(z)))


def tridiagonal_eigh(diag, offdiag, k: int | None = None) -> np.ndarray:
    """Lowest ``k`` eigenvalues of a symmetric tridiagonal matrix.

    Off-diagonal entries may have any sign (only their squares enter) and
    may vanish, in which case the Sturm-count bisection fallback resolves
    the resulting degenerate brackets.
    """
    a = np.asarray(diag, dtype=float).ravel()
    b = np.asarray(offdiag, dtype=float).ravel()
    n = a.size
    k = n if k is None else int(min(max(k, 0), n))
    if k == 0:
        return np.empty(0)
    if n == 1:
        return a.copy()
    lo, hi = _gershgorin(a, b)
    scale = max(abs(lo), abs(hi))
    tol = 1e-14 * scale
    eigs, status = _kernels.interlace_eigs(a, b * b, k, lo, hi, tol)
    if status != 0:
        raise ConvergenceFailure("eigenvalue bracket did not close within 200 iterations")
    return np.asarray(eigs)


def eigenvalues(j: JacobiMatrix, k: int | None = None) -> np.ndarray:
    """Sorted eigenvalues, located as zeros of ``D_0`` inside interlacing brackets.

    Parameters
    ----------
    j : JacobiMatrix
    k : int, optional
        Return only the lowest ``k`` values (cost O(N k)).  Default: all.
    """
    return tridiagonal_eigh(j.diag, j.offdiag, k)


def residues(j: JacobiMatrix, eigs) -> np.ndarray:
    """Weights ``|psi_k(0)|^2`` at the given eigenvalues.

    Taken from the twisted continued-fraction eigenvector rather than from
    ``1 / D_0'(E_k)``: for states localised away from site 0 the derivative
    of ``D_0`` is dominated by a near-vanishing tail denominator and loses
    all absolute accuracy, while the twisted vector keeps it.
    """
    eigs = np.atleast_1d(np.asarray(eigs, dtype=float))
    if j.size == 1:
        return np.ones(eigs.size)
    out = np.empty(eigs.size)
    for i, e in enumerate(eigs):
        v = np.asarray(_kernels.cf_eigvec(j.diag, j.offdiag, float(e)))
        if not np.all(np.isfinite(v)):
            raise Breakdown(f"eigenvector recurrence broke down at E={e!r}")
        out[i] = v[0] * v[0]
    return out


def eigenvector(j: JacobiMatrix | tuple, e: float) -> np.ndarray:
    """Unit eigenvector at eigenvalue ``e`` from continued-fraction ratios.

    ``j`` may also be a ``(diag, offdiag)`` pair with arbitrary off-diagonal
    signs; the sign convention is first nonzero component positive.
    """
    if isinstance(j, JacobiMatrix):
        a, b = j.diag, j.offdiag
    else:
        a, b = (np.asarray(x, dtype=float).ravel() for x in j)
    if a.size == 1:
        return np.ones(1)
    return np.asarray(_kernels.cf_eigvec(a, b, float(e)))


def spectral_g00(eigs, weights, z: complex) -> complex:
    """Rebuild ``G(z) = sum_k w_k / (z - E_k)`` from spectral data."""
    eigs = np.asarray(eigs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    return complex(np.sum(weights / (complex(z) - eigs)))
