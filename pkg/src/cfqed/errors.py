"""Exception and warning types shared across the package.

Errors that signal a numerical failure derive from :class:`NumericError`;
the command-line front end maps those to exit status 3.  Regime warnings
derive from :class:`RegimeWarning` and are escalated under ``--strict``.
"""


class CfqedError(Exception):
    """Base class for all package errors."""


class NumericError(CfqedError):
    """A computation failed or produced an invalid intermediate."""


class PoleHit(NumericError, ValueError):
    """Evaluation point coincides with a pole of the function."""


class SingularInternalBlock(NumericError):
    """Internal nodal block of a network is singular."""


class NonPositiveResidue(NumericError):
    """A reduction produced a negative element, so the input is not passive."""


class DegenerateResonance(NumericError):
    """Two internal resonances coincide; simple poles are required."""


class NegativeElement(NumericError):
    """A Cauer extraction step produced a non-positive element."""


class VariantMismatch(NumericError, ValueError):
    """Requested ladder variant is incompatible with the admittance limits."""


class NonRealizable(NumericError):
    """A Jacobi matrix does not map to a ladder with positive elements."""


class NearDegenerateError(NumericError):
    """Branch frequencies are too close for a reliable conversion."""


class Breakdown(NumericError):
    """A continued-fraction denominator underflowed."""


class ConvergenceFailure(NumericError):
    """An iterative solver did not reach its tolerance."""


class NotARoot(NumericError, ValueError):
    """Frequency does not satisfy the boundary condition."""


class DimensionOverflow(NumericError):
    """Truncated Hilbert space exceeds the configured cap."""


class OptimizerFailure(NumericError):
    """Variational minimisation failed."""


class InsufficientModes(NumericError, ValueError):
    """Too few modes for a scaling fit."""


class DivergentSum(NumericError, ValueError):
    """Requested tail sum does not converge."""


class OutOfRegime(NumericError, ValueError):
    """Asymptotic formula used outside its validity range."""


class NoZeroFound(NumericError):
    """No sign change of the conductance model in the search range."""


class SingularBlock(NumericError):
    """Block inverse in a matrix continued fraction is singular."""


class LabelAmbiguity(NumericError):
    """Level labels could not be assigned uniquely."""


class FitDiverged(NumericError):
    """Parameter fit failed to converge."""


class RegimeWarning(UserWarning):
    """Base class for validity-regime warnings."""


class NearDegenerateWarning(RegimeWarning):
    """Branch frequencies are closely spaced; conversion may lose accuracy."""


class NearResonance(RegimeWarning):
    """Dispersive or perturbative validity check failed."""


class TruncationWarning(RegimeWarning):
    """Top retained states carry non-negligible weight."""


class MissedRootRisk(RegimeWarning):
    """Root scan may have skipped closely spaced eigenvalues."""


class NotApplicable(RegimeWarning):
    """Diagnostic requested outside the range where it is meaningful."""
