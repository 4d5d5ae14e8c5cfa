"""Continued-fraction spectral tools for superconducting circuits.

The package follows one pipeline: a passive environment (lumped network,
Foster form or transmission line) is reduced to the admittance seen by a
Josephson junction, converted between its Foster, Cauer and Jacobi faces,
solved for dressed modes through the boundary condition
``s Y(s) + 1/L_J = 0``, quantized with the full cosine nonlinearity, and
diagonalized with scalar or matrix continued fractions.
"""

from ._kernels import BACKEND, NUMBA_AVAILABLE
from .constants import CODATA, HBAR, PHI0, R_Q
from .errors import CfqedError, NumericError, RegimeWarning

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "NUMBA_AVAILABLE",
    "CODATA",
    "HBAR",
    "PHI0",
    "R_Q",
    "CfqedError",
    "NumericError",
    "RegimeWarning",
    "__version__",
]
