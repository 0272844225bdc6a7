"""
Error Hierarchy

This module provides the exception classes raised by the arithmetic core and
the moment zeta pipeline. Every class carries the process exit code used by
the command-line front end:

    1  computational failure (precision, caps, convergence, reconstruction)
    2  usage error
    3  verification failure (a mathematical contract did not hold)
"""

EXIT_OK = 0
EXIT_COMPUTATIONAL = 1
EXIT_USAGE = 2
EXIT_VERIFICATION = 3


class DworkZetaError(Exception):
    """Base class for every error raised by this project."""

    exit_code = EXIT_COMPUTATIONAL

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


# Computational failures

class SingularSystem(DworkZetaError):
    """Every Hankel system tried during reconstruction was singular."""


class MismatchBeyondOrder(DworkZetaError):
    """A reconstructed rational function disagrees with the extra coefficients."""


class NonConvergence(DworkZetaError):
    """Root finding did not converge within its iteration cap."""


class CapExceeded(DworkZetaError):
    """A field, table or enumeration size is beyond its configured cap."""


class WorkCapExceeded(CapExceeded):
    """A brute-force enumeration would exceed the work cap."""


class OrbitFieldCapExceeded(CapExceeded):
    """A p-orbit needs a field beyond the field cap."""


class FactoringTooHard(DworkZetaError):
    """q - 1 has a prime factor beyond the trial-division bound."""


class NotADivisor(DworkZetaError):
    """A subfield degree does not divide the extension degree."""


class ZeroElement(DworkZetaError):
    """The zero element was passed where a unit is required."""


class NoTable(DworkZetaError):
    """The field has no discrete-log table (beyond table cap)."""


class PrecisionLoss(DworkZetaError):
    """A high-precision computation failed its residual check."""


class EigenvaluePrecisionLoss(PrecisionLoss):
    """Numeric eigenvalue fallback lost too much precision."""


class NotCoprime(DworkZetaError):
    """gcd(m, p) != 1 where a p-action on S_m is requested."""


# Verification failures

class VerificationError(DworkZetaError):
    """A computed object failed a structural identity."""

    exit_code = EXIT_VERIFICATION


class InconsistentDet(VerificationError):
    """Supplied determinant disagrees with the full set of power sums."""


class NoFunctionalEquation(VerificationError):
    """The polynomial satisfies the functional equation with neither sign."""


class PurityViolation(VerificationError):
    """A reciprocal root lies off the expected Weil circle."""


class MethodMismatch(VerificationError):
    """Two independent counting methods disagree."""


class NegativeDegree(VerificationError):
    """A predicted polynomial degree came out negative."""


class HalfIntegerPower(VerificationError):
    """A half-integer power of q appears with a nonzero exponent."""


class Mismatch(VerificationError):
    """Two independent evaluations of the same quantity disagree."""


class CongruenceFailure(VerificationError):
    """Moment zeta series are not congruent where they must be."""


class NotAPerfectPower(VerificationError):
    """A series is not an exact power of the expected degree."""


# Usage errors

class UsageError(DworkZetaError):
    """Bad command-line arguments or configuration values."""

    exit_code = EXIT_USAGE


class HypothesisViolated(UsageError):
    """The requested run does not satisfy the hypotheses of the result it checks."""


class UnknownSuite(UsageError):
    """No verification suite is registered under the requested name."""


def exit_code_for(error):
    """
    Map an exception to the process exit code.

    Args:
        error (BaseException): Raised exception

    Returns:
        int: Exit code (1 for anything not in the hierarchy)
    """
    if isinstance(error, DworkZetaError):
        return error.exit_code
    return EXIT_COMPUTATIONAL
