"""Physical constants (CODATA values via :mod:`scipy.constants`)."""

from dataclasses import dataclass
import math

from scipy import constants as _sc


@dataclass(frozen=True)
class Constants:
    """Single record of the constants used throughout the package.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant (J s).
    h : float
        Planck constant (J s).
    e : float
        Elementary charge (C).
    phi0 : float
        Reduced flux quantum ``hbar / (2 e)`` (Wb).
    r_q : float
        Superconducting resistance quantum ``h / (2 e)**2`` (Ohm).
    """

    hbar: float = _sc.hbar
    h: float = _sc.h
    e: float = _sc.e

    @property
    def phi0(self) -> float:
        return self.hbar / (2.0 * self.e)

    @property
    def r_q(self) -> float:
        return self.h / (2.0 * self.e) ** 2


CODATA = Constants()

HBAR = CODATA.hbar
H_PLANCK = CODATA.h
E_CHARGE = CODATA.e
PHI0 = CODATA.phi0
R_Q = CODATA.r_q
TWO_PI = 2.0 * math.pi
