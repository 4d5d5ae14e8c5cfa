"""Matrix continued fractions for block-tridiagonal Hamiltonians.

For ``H`` with diagonal blocks ``A_k`` and couplings ``H[k, k+1] = B_k``,
``H[k+1, k] = B_k^T`` the central Green's function at block ``c`` is

    G_cc(E) = [E - A_c - Sigma_left(E) - Sigma_right(E)]^{-1},

with the self-energies built by the recursions

    R_k = [E - A_k - B_k R_{k+1} B_k^T]^{-1},          R_{last+1} = 0,
    L_k = [E - A_k - B_{k-1}^T L_{k-1} B_{k-1}]^{-1},  L_{-1} = 0.

Every inverted matrix is a Schur complement of ``E - H``, so the numbers of
positive eigenvalues along the recursion add up to the number of
eigenvalues of ``H`` below ``E`` (a block Sturm count).  Eigenvalues are
located by scanning that count and refining each sign change of
``M(E) = G_cc(E)^{-1}``; the eigenvalues of ``M`` increase with ``E``
between poles, so a single crossing eigenvalue can be bracketed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize

from .errors import FitDiverged, LabelAmbiguity, MissedRootRisk, SingularBlock

__all__ = [
    "BlockTridiagonal",
    "block_g00",
    "block_count",
    "mcf_eigenvalues",
    "mcf_lowest",
    "mcf_eigenvectors",
    "TwoModeParams",
    "build_twomode",
    "twomode_levels",
    "twomode_observables",
    "perturbative_cross_kerr",
    "FitResult",
    "fit_twomode",
    "OBSERVABLES",
]

SINGULAR_RTOL = 1e-14


@dataclass(frozen=True)
class BlockTridiagonal:
    """Block-Jacobi operator with symmetric diagonal blocks."""

    a_blocks: tuple
    b_blocks: tuple

    def __post_init__(self):
        a = tuple(np.array(x, dtype=float) for x in self.a_blocks)
        b = tuple(np.array(x, dtype=float) for x in self.b_blocks)
        if not a:
            raise ValueError("need at least one diagonal block")
        if len(b) != len(a) - 1:
            raise ValueError("need one coupling block fewer than diagonal blocks")
        for k, ak in enumerate(a):
            if ak.ndim != 2 or ak.shape[0] != ak.shape[1]:
                raise ValueError(f"diagonal block {k} is not square")
            if not np.allclose(ak, ak.T, rtol=0.0, atol=1e-14 * max(1.0, float(np.max(np.abs(ak))))):
                raise ValueError(f"diagonal block {k} is not symmetric")
        for k, bk in enumerate(b):
            if bk.shape != (a[k].shape[0], a[k + 1].shape[0]):
                raise ValueError(f"coupling block {k} has shape {bk.shape}")
        object.__setattr__(self, "a_blocks", a)
        object.__setattr__(self, "b_blocks", b)

    @property
    def n_blocks(self) -> int:
        return len(self.a_blocks)

    @property
    def sizes(self) -> list[int]:
        return [a.shape[0] for a in self.a_blocks]

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    def offsets(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.sizes)))

    def dense(self) -> np.ndarray:
        off = self.offsets()
        h = np.zeros((self.dim, self.dim))
        for k, a in enumerate(self.a_blocks):
            h[off[k]:off[k + 1], off[k]:off[k + 1]] = a
        for k, b in enumerate(self.b_blocks):
            h[off[k]:off[k + 1], off[k + 1]:off[k + 2]] = b
            h[off[k + 1]:off[k + 2], off[k]:off[k + 1]] = b.T
        return h

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Product ``H x`` for a vector or a stack of column vectors."""
        off = self.offsets()
        y = np.zeros_like(x, dtype=float)
        for k, a in enumerate(self.a_blocks):
            y[off[k]:off[k + 1]] += a @ x[off[k]:off[k + 1]]
        for k, b in enumerate(self.b_blocks):
            y[off[k]:off[k + 1]] += b @ x[off[k + 1]:off[k + 2]]
            y[off[k + 1]:off[k + 2]] += b.T @ x[off[k]:off[k + 1]]
        return y

    def gershgorin(self) -> tuple[float, float]:
        """Interval containing the spectrum (block-row Gershgorin discs)."""
        lo, hi = math.inf, -math.inf
        for k, a in enumerate(self.a_blocks):
            rad = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
            if k > 0:
                rad = rad + np.sum(np.abs(self.b_blocks[k - 1]), axis=0)
            if k < self.n_blocks - 1:
                rad = rad + np.sum(np.abs(self.b_blocks[k]), axis=1)
            d = np.diag(a)
            lo = min(lo, float(np.min(d - rad)))
            hi = max(hi, float(np.max(d + rad)))
        pad = 1e-12 * max(abs(lo), abs(hi), 1.0)
        return lo - pad, hi + pad

    @property
    def scale(self) -> float:
        lo, hi = self.gershgorin()
        return max(abs(lo), abs(hi))


# ---------------------------------------------------------------------------
# recursion core
# ---------------------------------------------------------------------------

def _sym_inverse(s: np.ndarray, scale: float) -> tuple[np.ndarray, int]:
    """Inverse of a symmetric block and its number of positive eigenvalues."""
    if s.shape[0] == 1:
        x = float(s[0, 0])
        if abs(x) <= SINGULAR_RTOL * scale:
            raise SingularBlock("Schur complement is singular at this energy")
        return np.array([[1.0 / x]]), int(x > 0.0)
    w, v = np.linalg.eigh(0.5 * (s + s.T))
    if np.min(np.abs(w)) <= SINGULAR_RTOL * scale:
        raise SingularBlock("Schur complement is singular at this energy")
    return (v / w) @ v.T, int(np.count_nonzero(w > 0.0))


def _sweep(h: BlockTridiagonal, e: float, c: int, scale: float):
    """Return ``M(E)``, the sub-chain positive count, and the left/right inverses."""
    a, b = h.a_blocks, h.b_blocks
    n = h.n_blocks
    npos = 0
    right = [None] * n
    sig_r = None
    for k in range(n - 1, c, -1):
        s = e * np.eye(a[k].shape[0]) - a[k]
        if sig_r is not None:
            s = s - sig_r
        right[k], p = _sym_inverse(s, scale)
        npos += p
        sig_r = b[k - 1] @ right[k] @ b[k - 1].T
    left = [None] * n
    sig_l = None
    for k in range(c):
        s = e * np.eye(a[k].shape[0]) - a[k]
        if sig_l is not None:
            s = s - sig_l
        left[k], p = _sym_inverse(s, scale)
        npos += p
        sig_l = b[k].T @ left[k] @ b[k]
    m = e * np.eye(a[c].shape[0]) - a[c]
    if sig_r is not None:
        m = m - sig_r
    if sig_l is not None:
        m = m - sig_l
    return 0.5 * (m + m.T), npos, left, right


def _check_center(h: BlockTridiagonal, center):
    c = 0 if center is None else int(center)
    if not 0 <= c < h.n_blocks:
        raise ValueError("center block out of range")
    return c


def block_g00(h: BlockTridiagonal, e: float, center: int | None = None) -> np.ndarray:
    """Diagonal Green's-function block ``G_cc(E)`` (default ``c = 0``).

    Raises
    ------
    SingularBlock
        If an intermediate Schur complement, or ``G_cc^{-1}`` itself, is
        singular to ``1e-14`` of the spectral scale.
    """
    c = _check_center(h, center)
    scale = h.scale
    m, _, _, _ = _sweep(h, float(e), c, scale)
    inv, _ = _sym_inverse(m, scale)
    return inv


def _count(h, e, c, scale):
    """(count below e, sub-chain count, eigenvalues of M) with a nudge off exact poles."""
    for nudge in (0.0, 1e-13, -1e-13, 1e-11, -1e-11):
        x = e + nudge * scale
        try:
            m, nsub, _, _ = _sweep(h, x, c, scale)
        except SingularBlock:
            continue
        w = np.linalg.eigvalsh(m)
        return nsub + int(np.count_nonzero(w > 0.0)), nsub, w
    raise SingularBlock(f"cannot evaluate the block count near E={e!r}")


def _clamp(info, below, above):
    """Force a count between its neighbours.

    Next to a root that coincides with a sub-chain pole (exact degeneracies)
    roundoff can flip pivot signs, so raw counts are not always monotone.
    """
    n = min(max(info[0], below[0]), above[0])
    return info if n == info[0] else (n, info[1], info[2])


def block_count(h: BlockTridiagonal, e: float, center: int | None = None) -> int:
    """Number of eigenvalues of ``h`` strictly below ``e`` (block Sturm count)."""
    c = _check_center(h, center)
    return _count(h, float(e), c, h.scale)[0]


def mcf_eigenvalues(h: BlockTridiagonal, window, center: int | None = None,
                    n_scan: int | None = None, tol: float = 1e-14, warn: bool = True) -> np.ndarray:
    """Eigenvalues of ``h`` inside ``window`` from the matrix continued fraction.

    The window is scanned on a uniform grid; in every step the block count
    says how many roots it holds.  A step with one root and no sub-chain
    pole is refined with Brent's method on the eigenvalue of ``M(E)`` that
    crosses zero.  Steps holding several roots are subdivided once; if two
    distinct roots still share a step a :class:`MissedRootRisk` warning is
    issued and they are separated by count bisection.
    """
    lo, hi = (float(x) for x in window)
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ValueError("window must be a finite increasing interval")
    c = _check_center(h, center)
    scale = h.scale
    xtol = tol * scale
    n_lo = _count(h, lo, c, scale)
    n_hi = _count(h, hi, c, scale)
    total = n_hi[0] - n_lo[0]
    if total == 0:
        return np.empty(0)
    steps = n_scan if n_scan is not None else max(32, 4 * total)
    grid = np.linspace(lo, hi, steps + 1)
    counts = [n_lo] + [_count(h, x, c, scale) for x in grid[1:-1]] + [n_hi]
    for i in range(1, steps):
        counts[i] = _clamp(counts[i], counts[i - 1], n_hi)
    roots: list[float] = []
    coarse: list[float] = []
    warned = [False]

    def crossing(x0, info0, x1, info1):
        d = info0[2].size
        j = d - (info0[0] - info0[1]) - 1

        def g(x):
            return _count(h, x, c, scale)[2][j]

        return brentq(g, x0, x1, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)

    def solve(x0, info0, x1, info1, depth):
        k = info1[0] - info0[0]
        if k <= 0:
            return
        if k == 1 and info0[1] == info1[1]:
            try:
                roots.append(crossing(x0, info0, x1, info1))
                return
            except ValueError:
                pass
        if x1 - x0 <= xtol or (depth > 1 and x1 - x0 <= 1e-9 * scale):
            coarse.extend([0.5 * (x0 + x1)] * k)
            return
        if warn and k > 1 and depth == 1 and x1 - x0 > 1e3 * xtol and not warned[0]:
            warned[0] = True
            warnings.warn("several roots share one scan step after refinement; "
                          "resolving them by count bisection", MissedRootRisk, stacklevel=3)
        if k > 1 and depth == 0:
            sub = np.linspace(x0, x1, 9)
            infos = [info0] + [_count(h, x, c, scale) for x in sub[1:-1]] + [info1]
            for i in range(1, 8):
                infos[i] = _clamp(infos[i], infos[i - 1], info1)
            for i in range(8):
                solve(sub[i], infos[i], sub[i + 1], infos[i + 1], 1)
            return
        xm = 0.5 * (x0 + x1)
        im = _clamp(_count(h, xm, c, scale), info0, info1)
        solve(x0, info0, xm, im, depth + 1)
        solve(xm, im, x1, info1, depth + 1)

    for i in range(steps):
        solve(grid[i], counts[i], grid[i + 1], counts[i + 1], 0)
    roots.extend(_polish(h, sorted(coarse), scale))
    return np.sort(np.array(roots))


def _polish(h: BlockTridiagonal, coarse: list, scale: float) -> list:
    """Rayleigh-Ritz refinement of roots left by count bisection.

    Such roots sit in (near-)degenerate clusters where the count is only
    resolved to about ``1e-9`` of the scale; a projection onto the
    inverse-iteration subspace restores full precision.
    """
    out: list[float] = []
    i = 0
    while i < len(coarse):
        j = i + 1
        while j < len(coarse) and coarse[j] - coarse[j - 1] <= 1e-7 * scale:
            j += 1
        group = coarse[i:j]
        try:
            x = mcf_eigenvectors(h, float(np.mean(group)), mult=len(group))
            ritz = np.linalg.eigvalsh(x.T @ h.matvec(x))
            out.extend(ritz if np.all(np.abs(ritz - np.mean(group)) <= 1e-6 * scale) else group)
        except np.linalg.LinAlgError:
            out.extend(group)
        i = j
    return out


def mcf_lowest(h: BlockTridiagonal, k: int, center: int | None = None, tol: float = 1e-14) -> np.ndarray:
    """Lowest ``k`` eigenvalues: the window is closed by count bisection."""
    c = _check_center(h, center)
    scale = h.scale
    lo, hi = h.gershgorin()
    k = min(int(k), h.dim)
    a, b = lo, hi
    for _ in range(200):
        if b - a <= 1e-12 * scale:
            break
        mid = 0.5 * (a + b)
        if _count(h, mid, c, scale)[0] >= k:
            b = mid
        else:
            a = mid
    top = b + 1e-9 * scale
    # a coarse grid is enough: most steps hold a single root
    out = mcf_eigenvalues(h, (lo, top), center=c, n_scan=max(16, 2 * k), tol=tol, warn=False)
    return out[:k]


def mcf_eigenvectors(h: BlockTridiagonal, e: float, mult: int = 1, iters: int = 3,
                     seed: int = 0) -> np.ndarray:
    """Unit eigenvectors at eigenvalue ``e`` by block inverse iteration.

    The shifted solves use block LU, whose pivots are the left recursion
    ``L_k`` of the matrix continued fraction.  ``mult`` vectors span a
    (near-)degenerate eigenspace.
    """
    scale = h.scale
    shift = e + 1e-10 * scale
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((h.dim, mult))
    for _ in range(iters):
        x = _block_solve(h, shift, x, scale)
        x, _ = np.linalg.qr(x)
    return x


def _block_solve(h: BlockTridiagonal, shift: float, rhs: np.ndarray, scale: float) -> np.ndarray:
    """Solve ``(H - shift) x = rhs`` by block Gaussian elimination."""
    a, b = h.a_blocks, h.b_blocks
    off = h.offsets()
    n = h.n_blocks
    piv = [None] * n
    y = [None] * n
    for k in range(n):
        s = a[k] - shift * np.eye(a[k].shape[0])
        r = rhs[off[k]:off[k + 1]]
        if k > 0:
            s = s - b[k - 1].T @ piv[k - 1] @ b[k - 1]
            r = r - b[k - 1].T @ piv[k - 1] @ y[k - 1]
        piv[k] = np.linalg.inv(s)
        y[k] = r
    x = [None] * n
    x[n - 1] = piv[n - 1] @ y[n - 1]
    for k in range(n - 2, -1, -1):
        x[k] = piv[k] @ (y[k] - b[k] @ x[k + 1])
    return np.vstack(x)


# ---------------------------------------------------------------------------
# two-mode transmon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoModeParams:
    """``4E_C(n1^2 + n2^2) + 4E_p n1 n2 - E_J1 cos(phi1) - E_J2 cos(phi2)``.

    Energies in any consistent unit (GHz with h = 1 in the examples).
    """

    e_j1: float
    e_j2: float
    e_c: float
    e_p: float
    n_cut: int = 12

    def __post_init__(self):
        if not (self.e_j1 > 0.0 and self.e_j2 > 0.0 and self.e_c > 0.0):
            raise ValueError("e_j1, e_j2 and e_c must be > 0")
        if not abs(self.e_p) < 2.0 * self.e_c:
            raise ValueError("need |e_p| < 2 e_c")
        if int(self.n_cut) != self.n_cut or self.n_cut < 8:
            raise ValueError("n_cut must be an integer >= 8")

    @property
    def e_c_sigma(self) -> float:
        return self.e_c + 0.5 * self.e_p

    @property
    def e_c_delta(self) -> float:
        return self.e_c - 0.5 * self.e_p

    @property
    def e_j_bar(self) -> float:
        return 0.5 * (self.e_j1 + self.e_j2)

    @property
    def delta_e_j(self) -> float:
        return 0.5 * (self.e_j1 - self.e_j2)


def build_twomode(p: TwoModeParams) -> BlockTridiagonal:
    """Blocks indexed by ``n1``; each block is tridiagonal in ``n2``."""
    n = np.arange(-p.n_cut, p.n_cut + 1, dtype=float)
    size = n.size
    hop2 = -0.5 * p.e_j2 * (np.eye(size, k=1) + np.eye(size, k=-1))
    a_blocks = [np.diag(4.0 * p.e_c * (k * k + n * n) + 4.0 * p.e_p * k * n) + hop2 for k in n]
    b = -0.5 * p.e_j1 * np.eye(size)
    return BlockTridiagonal(tuple(a_blocks), tuple([b] * (size - 1)))


OBSERVABLES = ("omega_d", "omega_q", "alpha_d", "alpha_q", "eta")
LEVEL_KEYS = ("0", "d", "q", "dd", "qq", "dq")


def _bare_states(p: TwoModeParams) -> dict:
    """Product states of the two junction transmons at ``E_p = 0``.

    Each transmon ladder is gauge fixed so that ``<k+1|n|k> > 0``: the
    charge then plays the part of a position coordinate and the ladder
    signs match the harmonic ``a^dag`` convention.
    """
    from .spectra import TransmonParams, transmon_spectrum

    out = []
    for e_j in (p.e_j1, p.e_j2):
        s = transmon_spectrum(TransmonParams(e_j, p.e_c, 0.0, p.n_cut), 3)
        v = s.vectors.copy()
        for k in range(2):
            if v[:, k + 1] @ (s.charges * v[:, k]) < 0.0:
                v[:, k + 1] *= -1.0
        out.append(v)
    v1, v2 = out
    return {(i, j): np.kron(v1[:, i], v2[:, j]) for i, j in ((0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1))}


def _eigpairs(p: TwoModeParams, k: int, method: str):
    if method == "dense":
        import scipy.linalg

        return scipy.linalg.eigh(build_twomode(p).dense(), subset_by_index=(0, k - 1))
    if method != "mcf":
        raise ValueError("method must be 'mcf' or 'dense'")
    h = build_twomode(p)
    e = mcf_lowest(h, k, center=p.n_cut)
    vecs = np.empty((h.dim, e.size))
    for cl in _clusters(e, h.scale):
        vecs[:, cl] = mcf_eigenvectors(h, float(np.mean(e[cl])), mult=len(cl))
    return e, vecs


def _clusters(e: np.ndarray, scale: float, rtol: float = 1e-9) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, e.size):
        if e[i] - e[i - 1] <= rtol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _assign(vecs, groups, ref, threshold, name, taken):
    w = np.array([np.sum((vecs[:, g].T @ ref) ** 2) for g in groups])
    order = np.argsort(w)[::-1]
    if w.size > 1 and w[order[1]] > threshold:
        raise LabelAmbiguity(f"level '{name}' splits between two levels "
                             f"(weights {w[order[0]]:.2f}, {w[order[1]]:.2f})")
    best = int(order[0])
    taken[best] = taken.get(best, 0) + 1
    if taken[best] > len(groups[best]):
        raise LabelAmbiguity(f"level '{name}' claims a level already assigned")
    return best


def twomode_levels(p: TwoModeParams, method: str = "mcf", n_levels: int = 10,
                   threshold: float = 0.4) -> dict:
    """Energies of the vacuum and of the one- and two-excitation normal-mode levels.

    Labels come from maximum overlap with separable-limit product states
    rotated into the normal modes: the one-excitation levels fix the
    mixing ``a_D^dag = c_1 a_1^dag + c_2 a_2^dag`` (and likewise for Q),
    and the two-excitation references are ``(a_D^dag)^2/sqrt 2``,
    ``(a_Q^dag)^2/sqrt 2`` and ``a_D^dag a_Q^dag`` applied to the bare
    vacuum.  Keys: ``"0"``, ``"d"``, ``"q"``, ``"dd"``, ``"qq"``, ``"dq"``.

    Raises
    ------
    LabelAmbiguity
        A reference splits with more than ``threshold`` weight on two
        levels, or two references claim the same level.
    """
    bare = _bare_states(p)
    e, vecs = _eigpairs(p, n_levels, method)
    groups = _clusters(e, max(abs(e[0]), abs(e[-1]), 1.0))
    taken: dict[int, int] = {}
    g0 = _assign(vecs, groups, bare[(0, 0)], threshold, "0", taken)
    # one-excitation manifold: the two levels with most weight on span{|1,0>, |0,1>}
    basis1 = np.column_stack([bare[(1, 0)], bare[(0, 1)]])
    w1 = np.array([np.sum((vecs[:, g].T @ basis1) ** 2) / len(g) for g in groups])
    cand = [int(i) for i in np.argsort(w1)[::-1] if int(i) != g0]
    if len(cand) >= 3 and w1[cand[2]] > threshold:
        raise LabelAmbiguity("more than two levels carry one-excitation weight")
    picks = []
    for gi in cand[:2]:
        for col in groups[gi]:
            if len(picks) < 2:
                picks.append((e[col], vecs[:, col]))
                taken[gi] = taken.get(gi, 0) + 1
    if len(picks) < 2:
        raise LabelAmbiguity("one-excitation levels not resolved")
    picks.sort(key=lambda t: t[0])
    if picks[1][0] - picks[0][0] <= 1e-9 * max(abs(e[0]), abs(e[-1]), 1.0):
        # degenerate pair: any rotation is an eigenbasis, keep the bare axes
        coef = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    else:
        coef = []
        for _, v in picks:
            c = basis1.T @ v
            coef.append(c / np.linalg.norm(c))
    (d1, d2), (q1, q2) = coef
    r2 = math.sqrt(2.0)
    refs = {
        "dd": d1 * d1 * bare[(2, 0)] + r2 * d1 * d2 * bare[(1, 1)] + d2 * d2 * bare[(0, 2)],
        "qq": q1 * q1 * bare[(2, 0)] + r2 * q1 * q2 * bare[(1, 1)] + q2 * q2 * bare[(0, 2)],
        "dq": r2 * d1 * q1 * bare[(2, 0)] + (d1 * q2 + d2 * q1) * bare[(1, 1)] + r2 * d2 * q2 * bare[(0, 2)],
    }
    out = {"0": float(np.mean(e[groups[g0]])), "d": float(picks[0][0]), "q": float(picks[1][0])}
    for key in ("dd", "qq", "dq"):
        ref = refs[key] / np.linalg.norm(refs[key])
        out[key] = float(np.mean(e[groups[_assign(vecs, groups, ref, threshold, key, taken)]]))
    return out


def twomode_observables(p: TwoModeParams, method: str = "mcf", **kw) -> dict:
    """Mode frequencies, anharmonicities and cross-Kerr of the two-mode transmon.

    ``alpha_i = E_ii - 2 E_i + E_0`` and ``eta = E_dq - E_d - E_q + E_0``
    (negative for a transmon-like spectrum).  The dipole mode ``D`` is the
    lower single-excitation level, the quadrupole mode ``Q`` the upper.
    """
    lv = twomode_levels(p, method=method, **kw)
    e0 = lv["0"]
    return {
        "omega_d": lv["d"] - e0,
        "omega_q": lv["q"] - e0,
        "alpha_d": lv["dd"] - 2.0 * lv["d"] + e0,
        "alpha_q": lv["qq"] - 2.0 * lv["q"] + e0,
        "eta": lv["dq"] - lv["d"] - lv["q"] + e0,
        "levels": lv,
    }


def perturbative_cross_kerr(alpha_d: float, alpha_q: float) -> float:
    """``2 sqrt(alpha_D alpha_Q)`` (magnitude)."""
    return 2.0 * math.sqrt(alpha_d * alpha_q)


@dataclass(frozen=True)
class FitResult:
    params: TwoModeParams
    residuals: dict
    cost: float
    starts: list = field(default_factory=list)


def fit_twomode(targets: dict, initial: TwoModeParams, *, seed: int = 0, n_starts: int = 4,
                spread: float = 0.05, method: str = "dense",
                xatol: float = 1e-9, fatol: float = 1e-16, maxiter: int = 2000) -> FitResult:
    """Least-squares fit of ``(E_J1, E_J2, E_C, E_p)`` to the five observables.

    Nelder-Mead on the sum of squared relative residuals, run from
    ``initial`` and ``n_starts - 1`` seeded perturbations of it (relative
    spread ``spread``); the best start wins.

    Raises
    ------
    FitDiverged
        If no start produces a finite cost.
    """
    keys = [k for k in OBSERVABLES if k in targets]
    if len(keys) < 4:
        raise ValueError("need at least four target observables")
    x0 = np.array([initial.e_j1, initial.e_j2, initial.e_c, initial.e_p])
    rng = np.random.default_rng(seed)

    def to_params(x):
        return TwoModeParams(x[0], x[1], x[2], x[3], initial.n_cut)

    def cost(x):
        try:
            obs = twomode_observables(to_params(x), method=method)
        except (ValueError, LabelAmbiguity):
            return 1e6
        return float(sum(((obs[k] - targets[k]) / targets[k]) ** 2 for k in keys))

    starts = [x0] + [x0 * (1.0 + spread * rng.standard_normal(4)) for _ in range(n_starts - 1)]
    best = None
    history = []
    for s in starts:
        res = minimize(cost, s, method="Nelder-Mead",
                       options={"xatol": xatol, "fatol": fatol, "maxiter": maxiter, "maxfev": 2 * maxiter})
        history.append((res.x.copy(), float(res.fun)))
        if math.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None or best.fun >= 1e6:
        raise FitDiverged("no multistart converged to a finite residual")
    p = to_params(best.x)
    obs = twomode_observables(p, method=method)
    resid = {k: (obs[k] - targets[k]) / targets[k] for k in keys}
    return FitResult(p, resid, float(best.fun), history)
