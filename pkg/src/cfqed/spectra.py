"""Exact spectra of the transmon and the quantum Rabi model.

Both problems are tridiagonal in a natural basis and go through the scalar
Jacobi engine:

* transmon, charge basis ``|n>``: ``a_n = 4 E_C (n - n_g)^2``, coupling
  ``-E_J/2``.  The engine works with ``|b|``; eigenvectors are mapped back
  by the diagonal similarity ``(-1)^n``.
* Rabi model ``H = w_r a^dag a + (w_q/2) sigma_z + g sigma_x (a + a^dag)``,
  split by the parity ``Pi = sigma_z (-1)^{a^dag a}`` into two chains with
  ``a_k = +/-(-1)^k w_q/2 + k w_r`` and ``b_k = g sqrt(k+1)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .errors import NearResonance, OutOfRegime, RegimeWarning, TruncationWarning
from .jacobi import eigenvector, tridiagonal_eigh

__all__ = [
    "TransmonParams",
    "TransmonSpectrum",
    "transmon_spectrum",
    "transmon_observables",
    "charge_dispersion",
    "mathieu_asymptotic",
    "RabiParams",
    "RabiSpectrum",
    "default_rabi_nmax",
    "rabi_spectrum",
    "rabi_ground_photons",
    "dressed_matrix_elements",
    "koch_chi",
    "koch_design_g01",
    "two_manifold_chi",
    "jc_dressed",
    "bloch_siegert",
]


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _jacobi_eigs_vecs(a: np.ndarray, b: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenpairs of a tridiagonal matrix with ``b >= 0``.

    Vectors come from the continued-fraction ratio scheme; any vector whose
    residual is above rounding level (clustered eigenvalues) is replaced by
    a LAPACK tridiagonal solve.
    """
    e = tridiagonal_eigh(a, b, k)
    vecs = np.empty((a.size, e.size))
    for i, ei in enumerate(e):
        vecs[:, i] = eigenvector((a, b), ei)
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))) if b.size else 0.0, 1e-300)
    resid = _tri_apply(a, b, vecs) - vecs * e[None, :]
    bad = np.max(np.abs(resid), axis=0) > 1e-9 * scale
    if e.size > 1:
        gaps = np.diff(e)
        close = np.zeros(e.size, dtype=bool)
        close[:-1] |= gaps < 1e-8 * scale
        close[1:] |= gaps < 1e-8 * scale
        bad |= close
    if np.any(bad):
        _, full = scipy.linalg.eigh_tridiagonal(a, b, select="i", select_range=(0, e.size - 1))
        vecs[:, bad] = full[:, bad]
    return e, vecs


def _tri_apply(a, b, v):
    out = a[:, None] * v
    if b.size:
        out[:-1] += b[:, None] * v[1:]
        out[1:] += b[:, None] * v[:-1]
    return out


# ---------------------------------------------------------------------------
# transmon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransmonParams:
    """Cooper-pair box ``4 E_C (n - n_g)^2 - E_J cos(phi)``.

    Energies in any consistent unit (J, or GHz with h = 1).
    """

    e_j: float
    e_c: float
    n_g: float = 0.0
    n_cut: int = 40

    def __post_init__(self):
        if not (self.e_j >= 0.0 and self.e_c > 0.0):
            raise ValueError("need e_j >= 0 and e_c > 0")
        if int(self.n_cut) != self.n_cut or self.n_cut < 10:
            raise ValueError("n_cut must be an integer >= 10")

    @property
    def charges(self) -> np.ndarray:
        return np.arange(-self.n_cut, self.n_cut + 1, dtype=float)


@dataclass(frozen=True)
class TransmonSpectrum:
    energies: np.ndarray
    vectors: np.ndarray  # columns, charge basis ordered -n_cut .. n_cut
    charges: np.ndarray


def transmon_spectrum(p: TransmonParams, n_levels: int = 6) -> TransmonSpectrum:
    """Lowest ``n_levels`` eigenpairs in the charge basis."""
    dim = 2 * p.n_cut + 1
    if not 1 <= n_levels <= 2 * p.n_cut:
        raise ValueError("need 1 <= n_levels <= 2 n_cut")
    ns = p.charges
    a = 4.0 * p.e_c * (ns - p.n_g) ** 2
    b = np.full(dim - 1, 0.5 * p.e_j)
    if p.e_j == 0.0:
        e = np.sort(a)[:n_levels]
        order = np.argsort(a, kind="stable")[:n_levels]
        vecs = np.zeros((dim, n_levels))
        vecs[order, np.arange(n_levels)] = 1.0
        return TransmonSpectrum(e, vecs, ns)
    e, vecs = _jacobi_eigs_vecs(a, b, n_levels)
    # back to the physical -E_J/2 coupling
    gauge = np.where(ns.astype(int) % 2 == 0, 1.0, -1.0)
    return TransmonSpectrum(e, vecs * gauge[:, None], ns)


def transmon_observables(p: TransmonParams, n_levels: int = 4) -> dict:
    """Transition frequency, anharmonicity and charge matrix elements.

    Returns
    -------
    dict
        ``omega01`` and ``alpha`` in the energy unit of ``p`` (divide by
        hbar for angular frequency), ``n_matrix`` the ``n_levels`` square
        matrix of ``<j|n|k>``, plus ``n01``, ``n12`` magnitudes and their
        ratio.
    """
    s = transmon_spectrum(p, max(n_levels, 3))
    e = s.energies
    nmat = s.vectors.T @ (s.charges[:, None] * s.vectors)
    n01, n12 = abs(nmat[0, 1]), abs(nmat[1, 2])
    return {
        "omega01": e[1] - e[0],
        "alpha": (e[2] - e[1]) - (e[1] - e[0]),
        "energies": e,
        "n_matrix": nmat,
        "n01": n01,
        "n12": n12,
        "n_ratio": n12 / n01,
    }


def charge_dispersion(e_j: float, e_c: float, n_cut: int = 40) -> float:
    """``|w01(n_g = 1/2) - w01(n_g = 0)|`` in the energy unit of the inputs."""
    w0 = transmon_observables(TransmonParams(e_j, e_c, 0.0, n_cut))["omega01"]
    w1 = transmon_observables(TransmonParams(e_j, e_c, 0.5, n_cut))["omega01"]
    return abs(w1 - w0)


def mathieu_asymptotic(e_j: float, e_c: float, m: int) -> float:
    """Large-``q`` Mathieu level ``E_m = E_C a_m(q)``, ``q = E_J/(2 E_C)``.

    ``a_m(q) ~ -2q + 2 s sqrt(q) - (s^2 + 1)/8`` with ``s = 2m + 1``.  The
    level differences give ``sqrt(8 E_J E_C)`` and an anharmonicity of
    ``-E_C``.

    Raises
    ------
    OutOfRegime
        If ``q < 10``.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    q = e_j / (2.0 * e_c)
    if q < 10.0:
        raise OutOfRegime(f"q = {q:.3g} < 10; the asymptotic expansion does not apply")
    s = 2 * m + 1
    return e_c * (-2.0 * q + 2.0 * s * math.sqrt(q) - (s * s + 1) / 8.0)


# ---------------------------------------------------------------------------
# quantum Rabi model
# ---------------------------------------------------------------------------

def default_rabi_nmax(g: float, omega_r: float) -> int:
    n = 8 + math.ceil(40.0 * (g / omega_r) ** 2)
    return int(min(max(n, 20), 400))


@dataclass(frozen=True)
class RabiParams:
    omega_q: float
    omega_r: float
    g: float
    n_max: int | None = None

    def __post_init__(self):
        if not (self.omega_q > 0.0 and self.omega_r > 0.0):
            raise ValueError("frequencies must be positive")
        if self.g < 0.0:
            raise ValueError("g must be >= 0")
        if self.n_max is not None and self.n_max < 20:
            raise ValueError("n_max must be >= 20")

    @property
    def nmax(self) -> int:
        return self.n_max if self.n_max is not None else default_rabi_nmax(self.g, self.omega_r)


@dataclass(frozen=True)
class RabiSpectrum:
    """Merged parity-sector eigenpairs.

    ``vectors[i]`` holds the chain amplitudes of level ``i`` in its own
    sector; chain index ``k`` is photon number ``k`` with the spin fixed by
    parity (even chain starts at ``|e,0>``, odd chain at ``|g,0>``).
    """

    energies: np.ndarray
    parity: np.ndarray  # +1 / -1
    vectors: list
    leakage: np.ndarray

    def parity_expectation(self, i: int) -> float:
        """``<Pi>`` of level ``i`` evaluated on the embedded full-space vector."""
        v = self.vectors[i]
        k = np.arange(v.size)
        sz = _chain_spin(self.parity[i], k)
        return float(np.sum(v * v * sz * (-1.0) ** k))


def _chain_spin(parity: int, k: np.ndarray) -> np.ndarray:
    """sigma_z of chain site ``k``: even chain ``e,g,e,...``; odd chain ``g,e,g,...``."""
    base = np.where(k % 2 == 0, 1.0, -1.0)
    return base if parity > 0 else -base


def _rabi_chain(p: RabiParams, parity: int):
    k = np.arange(p.nmax + 1, dtype=float)
    a = _chain_spin(parity, k.astype(int)) * 0.5 * p.omega_q + k * p.omega_r
    b = p.g * np.sqrt(k[1:])
    return a, b


def rabi_spectrum(p: RabiParams, n_levels: int = 6) -> RabiSpectrum:
    """Lowest ``n_levels`` Rabi levels with parity labels.

    Warns with :class:`TruncationWarning` when any returned level has more
    than 1e-6 of its weight in the top tenth of its Fock chain.
    """
    levels = []
    for par in (+1, -1):
        a, b = _rabi_chain(p, par)
        k = min(n_levels, a.size)
        if p.g == 0.0:
            order = np.argsort(a, kind="stable")[:k]
            for idx in order:
                v = np.zeros(a.size)
                v[idx] = 1.0
                levels.append((a[idx], par, v))
            continue
        e, vecs = _jacobi_eigs_vecs(a, b, k)
        for i in range(e.size):
            levels.append((e[i], par, vecs[:, i]))
    levels.sort(key=lambda t: t[0])
    levels = levels[:n_levels]
    top = max(2, (p.nmax + 1) // 10)
    leak = np.array([float(np.sum(v[-top:] ** 2)) for _, _, v in levels])
    if np.any(leak > 1e-6):
        warnings.warn(f"Fock truncation n_max={p.nmax}: leakage {leak.max():.2e} > 1e-6",
                      TruncationWarning, stacklevel=2)
    return RabiSpectrum(
        np.array([t[0] for t in levels]),
        np.array([t[1] for t in levels], dtype=int),
        [t[2] for t in levels],
        leak,
    )


def rabi_ground_photons(p: RabiParams) -> float:
    """``<a^dag a>`` in the exact ground state."""
    s = rabi_spectrum(p, 1)
    v = s.vectors[0]
    return float(np.sum(np.arange(v.size) * v * v))


def _x_element(vi: np.ndarray, vj: np.ndarray, op: str) -> float:
    # <i| (a + a^dag) |j> or <i| i(a^dag - a) |j> between chains of opposite parity
    sq = np.sqrt(np.arange(1, vj.size))
    up = float(np.dot(vi[1:], sq * vj[:-1]))    # a^dag
    down = float(np.dot(vi[:-1], sq * vj[1:]))  # a
    return up + down if op == "X" else up - down


def dressed_matrix_elements(p: RabiParams | RabiSpectrum, op: str, i: int, j: int,
                            n_levels: int | None = None) -> float:
    """``|<E_i| X |E_j>|`` (``X = a + a^dag``) or ``|<E_i| P |E_j>|`` (``P = i(a^dag - a)``).

    Both operators flip parity, so elements between equal-parity levels
    (including every diagonal element) are exactly zero.
    """
    if op not in ("X", "P"):
        raise ValueError("op must be 'X' or 'P'")
    if isinstance(p, RabiSpectrum):
        s = p
    else:
        s = rabi_spectrum(p, n_levels or max(i, j) + 1)
    if s.parity[i] == s.parity[j]:
        return 0.0
    return abs(_x_element(s.vectors[i], s.vectors[j], op))


# ---------------------------------------------------------------------------
# dispersive and weak-coupling formulas
# ---------------------------------------------------------------------------

def koch_chi(g01: float, g12: float, delta01: float, delta12: float) -> float:
    """``chi = g01^2/D01 - g12^2/(2 D12)``; warns past ``g/|D| = 0.15``."""
    worst = max(abs(g01 / delta01), abs(g12 / delta12))
    if worst > 0.15:
        warnings.warn(f"g/|Delta| = {worst:.3g} beyond the dispersive range", NearResonance, stacklevel=2)
    return g01 ** 2 / delta01 - g12 ** 2 / (2.0 * delta12)


def koch_design_g01(ej_over_ec: float, omega01: float, omega_r: float, chi_target: float,
                    n_cut: int = 40) -> dict:
    """Coupling ``g01`` that gives ``|chi| = chi_target``.

    ``E_C`` is solved so that the exact transmon ``w01`` equals ``omega01``
    at the given ``E_J/E_C``; the exact anharmonicity and ``|n12|/|n01|``
    then fix ``D12`` and ``g12``.  All quantities in one frequency unit.
    """
    def w01(e_c):
        return transmon_observables(TransmonParams(ej_over_ec * e_c, e_c, 0.0, n_cut))["omega01"] - omega01

    guess = omega01 / math.sqrt(8.0 * ej_over_ec)
    e_c = brentq(w01, 0.5 * guess, 2.0 * guess, xtol=1e-15 * guess)
    obs = transmon_observables(TransmonParams(ej_over_ec * e_c, e_c, 0.0, n_cut))
    d01 = omega01 - omega_r
    d12 = omega01 + obs["alpha"] - omega_r
    ratio = obs["n_ratio"]
    unit = abs(1.0 / d01 - ratio ** 2 / (2.0 * d12))
    g01 = math.sqrt(abs(chi_target) / unit)
    return {"g01": g01, "g12": ratio * g01, "e_c": e_c, "alpha": obs["alpha"],
            "delta01": d01, "delta12": d12, "n_ratio": ratio}


def two_manifold_chi(omega01: float, alpha: float, omega_r: float, g01: float, g12: float) -> float:
    """Dispersive shift from exact diagonalization of the one- and two-excitation manifolds.

    Three transmon levels coupled to a resonator by ``g01``, ``g12`` with
    the rotating-wave coupling.  ``chi`` is half the difference of the
    resonator frequency with the transmon in ``|1>`` and in ``|0>``, the
    quantity :func:`koch_chi` approximates.
    """
    w12 = omega01 + alpha
    # manifold 1: {|0,1>, |1,0>}
    h1 = np.array([[omega_r, g01], [g01, omega01]])
    # manifold 2: {|0,2>, |1,1>, |2,0>}
    h2 = np.array([
        [2 * omega_r, g01 * math.sqrt(2.0), 0.0],
        [g01 * math.sqrt(2.0), omega01 + omega_r, g12],
        [0.0, g12, omega01 + w12],
    ])
    e1 = np.linalg.eigvalsh(h1)
    e2 = np.linalg.eigvalsh(h2)
    # adiabatic labels: resonator-like |0,1> and |1,1>
    e01 = e1[np.argmin(np.abs(e1 - omega_r))]
    e10 = e1[np.argmin(np.abs(e1 - omega01))]
    e11 = e2[np.argmin(np.abs(e2 - (omega01 + omega_r)))]
    wr0 = e01
    wr1 = e11 - e10
    return 0.5 * (wr1 - wr0)


def jc_dressed(n: int, g: float, omega_q: float, omega_r: float) -> tuple[float, float]:
    """Jaynes-Cummings doublet of manifold ``n`` (``|g,0>`` at zero energy).

    ``E_+/- = n w_r + D/2 +/- sqrt(D^2 + 4 g^2 n)/2`` with ``D = w_q - w_r``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d = omega_q - omega_r
    root = 0.5 * math.sqrt(d * d + 4.0 * g * g * n)
    mid = n * omega_r + 0.5 * d
    return mid - root, mid + root


def bloch_siegert(g: float, omega_q: float, omega_r: float) -> float:
    """Counter-rotating shift ``g^2/(w_q + w_r)``."""
    s = omega_q + omega_r
    if g / s > 0.2:
        warnings.warn(f"g/(w_q + w_r) = {g / s:.3g} > 0.2", RegimeWarning, stacklevel=2)
    return g * g / s
