"""Exception hierarchy for the latfree package."""


class LatfreeError(Exception):
    """Base class for all latfree errors."""


class NonFiniteValue(LatfreeError):
    """A NaN or infinite scalar reached a sign classification."""


class NotUnimodular(LatfreeError):
    """A basis matrix does not have determinant +-1."""


class InvalidRelabel(LatfreeError):
    """A requested relabeling does not preserve the member set."""


class NonConvexOracleDetected(LatfreeError):
    """The oracle produced gradient data inconsistent with a convex function.

    For exact built-in models this indicates a bug; for black-box oracles it
    usually means float noise exceeded the sign tolerance.
    """


class NotStronglyConvexInX(LatfreeError):
    """The continuous block of a mixed model is not positive definite."""


class LevelSetAssumptionViolated(LatfreeError):
    """The objective does not have bounded level sets."""


class BoxTooSmall(LatfreeError):
    """An enumeration box is too small to certify a global integer optimum."""


class NotApplicable(LatfreeError):
    """A check's precondition (e.g. identity starting basis) does not hold."""


class InternalInvariantViolation(LatfreeError):
    """A solver-internal invariant failed; indicates a bug, not bad input."""


class BudgetExhausted(LatfreeError):
    """The iteration budget ran out before a certificate was reached.

    Carries the flip trace accumulated so far in ``trace``.
    """

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace
