"""Exception hierarchy.

Three families matter to callers (and to the CLI exit codes):

* ``UsageError`` -- bad parameters (exit code 2),
* ``CheckFailed`` -- a verification ran and the claim did not hold (exit code 1),
* ``InternalAssertion`` -- an invariant that must hold by construction broke,
  which means a bug rather than a mathematical counterexample (exit code 3).
"""


class PadicLabError(Exception):
    pass


class UsageError(PadicLabError, ValueError):
    pass


class CheckFailed(PadicLabError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InternalAssertion(PadicLabError, AssertionError):
    pass


# usage / domain errors
class NotPrime(UsageError):
    pass


class OutOfRange(UsageError):
    pass


class GuardExceeded(UsageError):
    pass


class CtxMismatch(UsageError):
    pass


class NotAUnit(PadicLabError, ArithmeticError):
    pass


class NotPIntegral(PadicLabError, ArithmeticError):
    pass


class PrecisionExhausted(UsageError):
    pass


class TruncationTooShort(UsageError):
    pass


class ZeroSeries(UsageError):
    pass


class NoSnap(PadicLabError):
    pass


# verification failures
class AuditFailure(CheckFailed):
    pass


class LemmaViolation(CheckFailed):
    pass


# internal assertions
class IntegralityViolation(InternalAssertion):
    pass


class AmbiguousSnap(InternalAssertion):
    pass


class TraceNotRational(InternalAssertion):
    pass


class CrossCheckMismatch(InternalAssertion):
    pass


class NoConvergence(InternalAssertion):
    pass
