"""The flip loop: case dispatch, basis replacement, and certificates.

Each iteration preprocesses the current unimodular set, checks the two
terminal conditions (a vanishing gradient at a member, or a lattice-free
gradient polyhedron), and otherwise replaces the basis according to the
active pattern.  The minimum function value over the members never
increases, every active member survives the flip, and the loop provably
terminates for exact convex input.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from .errors import (
    BudgetExhausted,
    InternalInvariantViolation,
    NonConvexOracleDetected,
    NotUnimodular,
)
from .geometry import (
    ActiveSet,
    EvalLedger,
    GpSystem,
    HLineResult,
    ONE,
    Pattern,
    TWO_PLUS,
    default_policy,
    h_line,
    is_connected,
    preprocess_with_activity,
)
from .lattice import UniMatrix, UnimodularSet, vadd, vmul, vneg
from .numerics import SignPolicy, classify_sign

#: Upper bound on chargeable gradient inner products per flip.
EVALS_PER_FLIP = 20

GRADIENT_ZERO = "GradientZeroOptimum"
LATTICE_FREE = "LatticeFree"


class CaseId(str, Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE2_UPRIME = "case2_uprime"
    CASE2_UDOUBLEPRIME = "case2_udoubleprime"
    CASE2_REFLECT = "case2_reflect"
    CASE3 = "case3"
    CASE4 = "case4"
    CASE5 = "case5"
    NO_CASE = "no_case"


@dataclass(frozen=True)
class FlipTrace:
    """One flip: the preprocessed set it saw and the set it produced."""

    iteration: int
    before: UnimodularSet
    case: CaseId
    side: Optional[int]
    k: Optional[int]
    after: UnimodularSet
    f_before: object
    f_after: object
    inner_product_evals: int
    halfspaces: tuple


@dataclass(frozen=True)
class Certificate:
    """Terminal solver output.

    ``GradientZeroOptimum`` means some member has a vanishing gradient;
    ``LatticeFree`` means the final gradient polyhedron contains no
    integer point in its strict interior, so the final set contains an
    integer minimizer.
    """

    status: str
    final_set: UnimodularSet
    argmin_point: tuple
    argmin_value: object
    gp: GpSystem
    iterations: int
    trace: Tuple[FlipTrace, ...]


@dataclass
class SolveConfig:
    policy: Optional[SignPolicy] = None
    max_iterations: int = 10_000

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def dispatch_case(activity: ActiveSet, h_plus: Optional[HLineResult],
                  h_minus: Optional[HLineResult]):
    """Map the active pattern and line contents to a flip case.

    Returns ``(case, side, k)``.  When both sides qualify, a unique-point
    side wins over a multi-point side and +1 wins over -1; the update is
    valid either way, this just makes runs reproducible.
    """
    pattern = activity.pattern
    if pattern is Pattern.FULL:
        return CaseId.NO_CASE, None, None
    if pattern is Pattern.SINGLE:
        return CaseId.CASE1, None, None
    if pattern is Pattern.DIAGONAL_PAIR:
        return CaseId.CASE2, None, None

    lines = {1: h_plus, -1: h_minus}
    if pattern is Pattern.ADJACENT_PAIR:
        for kind, case in ((ONE, CaseId.CASE3), (TWO_PLUS, CaseId.CASE4)):
            for side in (1, -1):
                line = lines[side]
                if line is not None and line.kind == kind:
                    return case, side, line.witness
        return CaseId.NO_CASE, None, None

    if pattern is Pattern.TRIPLE:
        for side in (1, -1):
            line = lines[side]
            if line is not None and not line.is_empty:
                return CaseId.CASE5, side, line.witness
        return CaseId.NO_CASE, None, None

    raise InternalInvariantViolation(f"unhandled pattern {pattern}")


def flip_case1(uset: UnimodularSet, oracle, policy: Optional[SignPolicy] = None,
               ledger: Optional[EvalLedger] = None) -> UnimodularSet:
    """Single active anchor: flip each basis vector away from the gradient.

    sigma_i is +1 when grad f(z) . u_i <= 0 and -1 otherwise; both being
    +1 would mean the anchor strictly cuts nothing, which forces a second
    active member for convex f.
    """
    policy = policy or default_policy(oracle)
    ledger = ledger or EvalLedger(oracle)
    z, u1, u2 = uset.anchor, uset.u1, uset.u2
    sigma1 = 1 if classify_sign(ledger.inner(z, vadd(z, u1)), policy) <= 0 else -1
    sigma2 = 1 if classify_sign(ledger.inner(z, vadd(z, u2)), policy) <= 0 else -1
    if sigma1 == 1 and sigma2 == 1:
        raise NonConvexOracleDetected(
            "single active anchor but no basis direction is strictly cut"
        )
    return UnimodularSet(z, UniMatrix(vmul(sigma1, u1), vmul(sigma2, u2)))


def _candidate_activity(candidate: UnimodularSet, oracle, policy, ledger):
    from .geometry import active_set

    return active_set(candidate, oracle, policy, ledger)


def flip_case2(uset: UnimodularSet, oracle, policy: Optional[SignPolicy] = None,
               ledger: Optional[EvalLedger] = None):
    """Diagonal active pair: pick between two sheared candidates or reflect.

    The candidates share three points with the current set, so only the
    one new corner of each costs fresh gradient information.  The checks
    run in a fixed order with short-circuiting; when neither candidate is
    supported by the gradient evidence, the reflection basis
    (-u1, 2 u1 + u2) is returned.
    """
    policy = policy or default_policy(oracle)
    ledger = ledger or EvalLedger(oracle)
    z, u1, u2 = uset.anchor, uset.u1, uset.u2
    diag = vadd(vadd(z, u1), u2)
    far = vadd(vadd(z, u1), vadd(u1, u2))   # z + 2 u1 + u2
    back = vadd(z, vneg(u1))                # z - u1

    u_prime = UnimodularSet(z, UniMatrix(u1, vadd(u1, u2)))
    act_prime = _candidate_activity(u_prime, oracle, policy, ledger)
    if is_connected(u_prime, act_prime):
        return u_prime, CaseId.CASE2_UPRIME
    if act_prime.points == (far,):
        return u_prime, CaseId.CASE2_UPRIME
    if classify_sign(ledger.inner(diag, back), policy) > 0 and \
            classify_sign(ledger.inner(back, z), policy) > 0:
        return u_prime, CaseId.CASE2_UPRIME

    u_dprime = UnimodularSet(z, UniMatrix(vneg(u1), vadd(u1, u2)))
    act_dprime = _candidate_activity(u_dprime, oracle, policy, ledger)
    if is_connected(u_dprime, act_dprime):
        return u_dprime, CaseId.CASE2_UDOUBLEPRIME
    if act_dprime.points == (back,):
        return u_dprime, CaseId.CASE2_UDOUBLEPRIME
    if classify_sign(ledger.inner(z, far), policy) > 0 and \
            classify_sign(ledger.inner(far, diag), policy) > 0:
        return u_dprime, CaseId.CASE2_UDOUBLEPRIME

    reflect = UnimodularSet(z, UniMatrix(vneg(u1), vadd(vmul(2, u1), u2)))
    return reflect, CaseId.CASE2_REFLECT


def flip_case3(uset: UnimodularSet, side: int, k: int) -> UnimodularSet:
    """Adjacent pair with a unique interior line point z + k u1 + side u2."""
    u1, u2 = uset.u1, uset.u2
    new_u1 = vadd(vmul(k, u1), vmul(side, u2))
    new_u2 = vadd(vmul(-(k - 1), u1), vmul(-side, u2))
    try:
        return UnimodularSet(uset.anchor, UniMatrix(new_u1, new_u2))
    except NotUnimodular as exc:
        raise InternalInvariantViolation(str(exc)) from exc


def flip_case4(uset: UnimodularSet, side: int, k: int) -> UnimodularSet:
    """Adjacent pair with two or more interior line points; k minimizes |k|.

    On the line below the active edge (side -1) the witnesses k = 0 and
    k = 1 describe the same geometry under the anchor swap of the active
    pair, and the square reflected below the edge is the unique new set
    that never increases the distance measure there; shearing by k = 1
    can increase it.  Both therefore map to the reflected square.
    """
    u1, u2 = uset.u1, uset.u2
    if side == -1 and k in (0, 1):
        shift = 0
    else:
        shift = k if k >= 0 else k - 1
    new_u2 = vadd(vmul(shift, u1), vmul(side, u2))
    try:
        return UnimodularSet(uset.anchor, UniMatrix(u1, new_u2))
    except NotUnimodular as exc:
        raise InternalInvariantViolation(str(exc)) from exc


def flip_case5(uset: UnimodularSet, side: int, h_plus: HLineResult,
               h_minus: HLineResult) -> UnimodularSet:
    """Triple active: shear toward the admissible side-line corner.

    For a convex oracle at most one side line holds integer points, and
    when one does, the corner z - u1 + u2 (side +1) or z + u1 - u2
    (side -1) is interior and is its integer of minimal |k|.  The line
    below the parallelogram (side -1) can hold only that corner; the
    line through its top edge (side +1) may extend to further integers
    beyond the corner, which the flip formula never needs.
    """
    chosen = h_plus if side == 1 else h_minus
    other = h_minus if side == 1 else h_plus
    if chosen.is_empty:
        raise InternalInvariantViolation("dispatched side line is empty")
    if not other.is_empty:
        raise NonConvexOracleDetected(
            "both side lines contain integer points in the triple-active case"
        )
    z, u1, u2 = uset.anchor, uset.u1, uset.u2
    expected = vadd(vadd(z, vneg(u1)), u2) if side == 1 else vadd(vadd(z, u1), vneg(u2))
    if chosen.point(chosen.witness) != expected:
        raise NonConvexOracleDetected(
            "triple-active side line misses the expected corner"
        )
    if side == -1 and chosen.kind != ONE:
        raise NonConvexOracleDetected(
            "the side line below the parallelogram must hold a single point"
        )
    if side == 1:
        return UnimodularSet(z, UniMatrix(u1, vadd(vneg(u1), u2)))
    return UnimodularSet(z, UniMatrix(vadd(u1, vneg(u2)), u2))


def _gradient_is_zero(grad, policy) -> bool:
    return classify_sign(grad[0], policy) == 0 and classify_sign(grad[1], policy) == 0


def _argmin_member(uset, f_of) :
    best_point = None
    best_value = None
    for w in uset.members():
        value = f_of(w)
        if best_value is None or value < best_value:
            best_point, best_value = w, value
    return best_point, best_value


def solve(oracle, initial: UnimodularSet, config: Optional[SolveConfig] = None) -> Certificate:
    """Run the flip loop from ``initial`` until a certificate is reached.

    Per iteration: stop with ``GradientZeroOptimum`` if a member gradient
    vanishes; preprocess; stop ``LatticeFree`` when all four members are
    active, or when the set is connected and both side lines are free of
    integer points; otherwise dispatch and apply the flip.  Raises
    :class:`BudgetExhausted` (carrying the trace) if ``max_iterations``
    flips were not enough, which for exact convex input never happens
    with the default budget.
    """
    config = config or SolveConfig()
    policy = config.policy or default_policy(oracle)
    grad_cache: dict = {}
    f_cache: dict = {}

    def f_of(point):
        value = f_cache.get(point)
        if value is None:
            value = oracle.eval_f(point)
            f_cache[point] = value
        return value

    current = initial
    trace = []
    while True:
        ledger = EvalLedger(oracle, grad_cache)
        members = current.members()

        zero_member = next(
            (w for w in members if _gradient_is_zero(ledger.gradient(w), policy)),
            None,
        )
        if zero_member is not None:
            point, value = _argmin_member(current, f_of)
            return Certificate(
                status=GRADIENT_ZERO, final_set=current, argmin_point=point,
                argmin_value=value, gp=_gp_from_ledger(current, ledger),
                iterations=len(trace), trace=tuple(trace),
            )

        pre, activity = preprocess_with_activity(current, oracle, policy, ledger)

        h_plus = h_minus = None
        if activity.pattern is Pattern.FULL:
            return _lattice_free_certificate(pre, ledger, f_of, trace)
        if is_connected(pre, activity):
            h_plus = h_line(pre, oracle, 1, policy, ledger)
            h_minus = h_line(pre, oracle, -1, policy, ledger)
            if h_plus.is_empty and h_minus.is_empty:
                return _lattice_free_certificate(pre, ledger, f_of, trace)

        if len(trace) >= config.max_iterations:
            raise BudgetExhausted(
                f"no certificate after {config.max_iterations} flips", tuple(trace)
            )

        case, side, k = dispatch_case(activity, h_plus, h_minus)
        if case is CaseId.CASE1:
            flipped = flip_case1(pre, oracle, policy, ledger)
        elif case is CaseId.CASE2:
            flipped, case = flip_case2(pre, oracle, policy, ledger)
        elif case is CaseId.CASE3:
            flipped = flip_case3(pre, side, k)
        elif case is CaseId.CASE4:
            flipped = flip_case4(pre, side, k)
        elif case is CaseId.CASE5:
            flipped = flip_case5(pre, side, h_plus, h_minus)
        else:
            raise InternalInvariantViolation(
                "no case applies to a non-terminal preprocessed set"
            )

        if ledger.counted > EVALS_PER_FLIP:
            raise InternalInvariantViolation(
                f"{ledger.counted} chargeable evaluations in one flip "
                f"(budget {EVALS_PER_FLIP})"
            )
        new_members = flipped.member_set()
        if not set(activity.points) <= new_members:
            raise InternalInvariantViolation(
                "an active member was dropped by the flip"
            )
        f_before = min(f_of(w) for w in pre.members())
        f_after = min(f_of(w) for w in flipped.members())
        if classify_sign(f_after - f_before, policy) > 0:
            raise NonConvexOracleDetected(
                "minimum member value increased across a flip"
            )

        trace.append(FlipTrace(
            iteration=len(trace), before=pre, case=case, side=side, k=k,
            after=flipped, f_before=f_before, f_after=f_after,
            inner_product_evals=ledger.counted,
            halfspaces=_gp_from_ledger(pre, ledger).halfspaces,
        ))
        current = flipped


def _gp_from_ledger(uset, ledger) -> GpSystem:
    return GpSystem(tuple((w, tuple(ledger.gradient(w))) for w in uset.members()))


def _lattice_free_certificate(pre, ledger, f_of, trace) -> Certificate:
    point, value = _argmin_member(pre, f_of)
    return Certificate(
        status=LATTICE_FREE, final_set=pre, argmin_point=point,
        argmin_value=value, gp=_gp_from_ledger(pre, ledger),
        iterations=len(trace), trace=tuple(trace),
    )
