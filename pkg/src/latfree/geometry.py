"""Cut relations, gradient polyhedra and the geometry behind flip dispatch.

A member w of a set cuts a point v when grad f(w) . (v - w) >= 0 and
strictly cuts it when the product is positive; a strict cut certifies
f(v) > f(w).  The active members of a unimodular set are those not
strictly cut by any member, and the pattern they form (single corner,
edge pair, diagonal pair, triple, or all four) decides which flip
applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from .errors import InternalInvariantViolation, NonConvexOracleDetected
from .lattice import UnimodularSet, dot, vadd, vmul, vsub
from .numerics import EXACT, SignPolicy, classify_sign, tolerance_policy
from .oracles import EXACT_KIND, default_policy_kind


def default_policy(oracle) -> SignPolicy:
    """Exact policy for rational oracles, default tolerance for float ones."""
    if default_policy_kind(oracle) == EXACT_KIND:
        return EXACT
    return tolerance_policy()


class EvalLedger:
    """Memoized gradient inner products with a per-flip cost count.

    ``counted`` is the number of chargeable evaluations: one per distinct
    ordered member pair and one per member line constraint.  A pair whose
    gradient point is already fully tabulated (two independent directions
    paid for) is derived by linearity instead and tracked in ``derived``.
    The solver asserts ``counted`` stays within the constant per-flip
    budget.
    """

    def __init__(self, oracle, grad_cache: Optional[dict] = None):
        self.oracle = oracle
        self._grads = grad_cache if grad_cache is not None else {}
        self._pairs = {}
        self._lines = {}
        self._spanned = set()
        self.counted = 0
        self.derived = 0

    def gradient(self, w):
        g = self._grads.get(w)
        if g is None:
            g = self.oracle.eval_grad(w)
            self._grads[w] = g
        return g

    def mark_spanned(self, points):
        self._spanned.update(points)

    def inner(self, w, v):
        """grad f(w) . (v - w), charged once per distinct ordered pair."""
        key = (w, v)
        value = self._pairs.get(key)
        if value is None:
            value = dot(self.gradient(w), vsub(v, w))
            self._pairs[key] = value
            if w in self._spanned:
                self.derived += 1
            else:
                self.counted += 1
        return value

    def line_coefficients(self, uset: UnimodularSet, w, side: int):
        """Slope and offset of k -> grad f(w) . (z + k u1 + side u2 - w)."""
        key = (uset.anchor, uset.u1, uset.u2, w, side)
        coeffs = self._lines.get(key)
        if coeffs is None:
            g = self.gradient(w)
            slope = dot(g, uset.u1)
            offset = dot(g, vsub(vadd(uset.anchor, vmul(side, uset.u2)), w))
            coeffs = (slope, offset)
            self._lines[key] = coeffs
            self.counted += 1
        return coeffs


class Pattern(str, Enum):
    SINGLE = "single"
    ADJACENT_PAIR = "adjacent_pair"
    DIAGONAL_PAIR = "diagonal_pair"
    TRIPLE = "triple"
    FULL = "full"


@dataclass(frozen=True)
class ActiveSet:
    """The members lying in the gradient polyhedron, in canonical order."""

    points: tuple
    indices: tuple
    pattern: Pattern

    def __contains__(self, point) -> bool:
        return point in self.points


_PAIR_DIAGONALS = ({0, 3}, {1, 2})


def _pattern_from_indices(indices) -> Pattern:
    count = len(indices)
    if count == 1:
        return Pattern.SINGLE
    if count == 3:
        return Pattern.TRIPLE
    if count == 4:
        return Pattern.FULL
    if set(indices) in _PAIR_DIAGONALS:
        return Pattern.DIAGONAL_PAIR
    return Pattern.ADJACENT_PAIR


def cuts(w, v, oracle, policy: Optional[SignPolicy] = None,
         ledger: Optional[EvalLedger] = None) -> bool:
    """True when grad f(w) . (v - w) >= 0 under the sign policy."""
    policy = policy or default_policy(oracle)
    ledger = ledger or EvalLedger(oracle)
    return classify_sign(ledger.inner(w, v), policy) >= 0


def strictly_cuts(w, v, oracle, policy: Optional[SignPolicy] = None,
                  ledger: Optional[EvalLedger] = None) -> bool:
    """True when grad f(w) . (v - w) > 0 under the sign policy."""
    policy = policy or default_policy(oracle)
    ledger = ledger or EvalLedger(oracle)
    return classify_sign(ledger.inner(w, v), policy) > 0


def active_set(uset: UnimodularSet, oracle, policy: Optional[SignPolicy] = None,
               ledger: Optional[EvalLedger] = None) -> ActiveSet:
    """Members not strictly cut by any member (all 12 ordered pairs).

    Convexity guarantees this is nonempty; an empty result means the
    oracle is not convex or the tolerance is too small, and raises
    :class:`NonConvexOracleDetected`.
    """
    policy = policy or default_policy(oracle)
    ledger = ledger or EvalLedger(oracle)
    members = uset.members()
    cut_points = set()
    for w in members:
        for v in members:
            if v != w and classify_sign(ledger.inner(w, v), policy) > 0:
                cut_points.add(v)
    ledger.mark_spanned(members)
    indices = tuple(i for i, m in enumerate(members) if m not in cut_points)
    if not indices:
        raise NonConvexOracleDetected(
            "every member is strictly cut; a convex gradient field cannot do this"
        )
    points = tuple(members[i] for i in indices)
    return ActiveSet(points=points, indices=indices,
                     pattern=_pattern_from_indices(indices))


def is_connected(uset: UnimodularSet, activity: ActiveSet) -> bool:
    """Whether the active set contains an adjacent (edge) pair."""
    return activity.pattern in (Pattern.ADJACENT_PAIR, Pattern.TRIPLE, Pattern.FULL)


def preprocess(uset: UnimodularSet, oracle, policy: Optional[SignPolicy] = None,
               ledger: Optional[EvalLedger] = None) -> UnimodularSet:
    """Relabel so the anchor is active and the active pattern is canonical.

    After preprocessing: the anchor is in the gradient polyhedron; an
    adjacent active pair is exactly {z, z+u1}; a diagonal active pair is
    {z, z+u1+u2} oriented so that z strictly cuts z+u1 and the diagonal
    strictly cuts z+u2; three active members are {z, z+u1, z+u2}.
    """
    relabeled, _ = preprocess_with_activity(uset, oracle, policy, ledger)
    return relabeled


def preprocess_with_activity(uset: UnimodularSet, oracle,
                             policy: Optional[SignPolicy] = None,
                             ledger: Optional[EvalLedger] = None):
    policy = policy or default_policy(oracle)
    ledger = ledger or EvalLedger(oracle)
    activity = active_set(uset, oracle, policy, ledger)
    active_points = set(activity.points)

    if activity.pattern is Pattern.FULL:
        return uset, activity

    if activity.pattern is Pattern.SINGLE:
        target = activity.points[0]
        chosen = _first_labeling(uset, lambda lab: lab.anchor == target)
    elif activity.pattern is Pattern.ADJACENT_PAIR:
        chosen = _first_labeling(
            uset,
            lambda lab: lab.anchor in active_points
            and vadd(lab.anchor, lab.u1) in active_points,
        )
    elif activity.pattern is Pattern.TRIPLE:
        chosen = _first_labeling(
            uset,
            lambda lab: lab.anchor in active_points
            and vadd(lab.anchor, lab.u1) in active_points
            and vadd(lab.anchor, lab.u2) in active_points,
        )
    else:
        chosen = _orient_diagonal(uset, activity, oracle, policy, ledger)

    return chosen, _relabeled_activity(chosen, active_points)


def _first_labeling(uset, predicate):
    for lab in uset.labelings():
        if predicate(lab):
            return lab
    raise InternalInvariantViolation("no labeling matches the active pattern")


def _orient_diagonal(uset, activity, oracle, policy, ledger):
    """Pick the diagonal labeling with the strict-cut chain z -> z+u1 and
    diagonal -> z+u2.

    For a convex oracle exactly one of the two orientations at the first
    active corner satisfies the chain; zero or two matches expose a
    non-convex gradient field.
    """
    anchor = activity.points[0]
    diagonal = activity.points[1]
    valid = []
    for lab in uset.labelings():
        if lab.anchor != anchor:
            continue
        if strictly_cuts(anchor, vadd(anchor, lab.u1), oracle, policy, ledger) and \
                strictly_cuts(diagonal, vadd(anchor, lab.u2), oracle, policy, ledger):
            valid.append(lab)
    if len(valid) != 1:
        raise NonConvexOracleDetected(
            f"{len(valid)} diagonal orientations satisfy the strict-cut chain; "
            "expected exactly one"
        )
    return valid[0]


def _relabeled_activity(uset, active_points) -> ActiveSet:
    members = uset.members()
    indices = tuple(i for i, m in enumerate(members) if m in active_points)
    return ActiveSet(points=tuple(members[i] for i in indices), indices=indices,
                     pattern=_pattern_from_indices(indices))


EMPTY = "empty"
ONE = "one"
TWO_PLUS = "two_plus"


@dataclass(frozen=True)
class HLineResult:
    """Integer points of one auxiliary line inside the open polyhedron.

    The line is base + k * direction with base = z + side * u2 and
    direction = u1.  ``lo``/``hi`` are the open-interval endpoints in k
    (``None`` for an unbounded end); ``kind`` classifies the integer
    count and ``witness`` is the unique k (kind ``one``) or an integer k
    of minimal absolute value (kind ``two_plus``).
    """

    side: int
    base: tuple
    direction: tuple
    lo: Optional[object]
    hi: Optional[object]
    kind: str
    witness: Optional[int]

    def point(self, k: int):
        return vadd(self.base, vmul(k, self.direction))

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY


def h_line(uset: UnimodularSet, oracle, side: int,
           policy: Optional[SignPolicy] = None,
           ledger: Optional[EvalLedger] = None) -> HLineResult:
    """Solve the four strict halfspace constraints along one side line.

    Each member w contributes (g.u1) k + g.(z + side u2 - w) < 0; the
    intersection is an open interval whose strictly interior integers are
    classified as empty / exactly one / two or more.
    """
    if side not in (-1, 1):
        raise ValueError("side must be -1 or +1")
    policy = policy or default_policy(oracle)
    ledger = ledger or EvalLedger(oracle)
    base = vadd(uset.anchor, vmul(side, uset.u2))
    lo = hi = None
    infeasible = False
    for w in uset.members():
        slope, offset = ledger.line_coefficients(uset, w, side)
        slope_sign = classify_sign(slope, policy)
        shifted = offset + policy.tau
        if slope_sign == 0:
            if classify_sign(offset, policy) >= 0:
                infeasible = True
        elif slope_sign > 0:
            bound = -shifted / slope
            hi = bound if hi is None else min(hi, bound)
        else:
            bound = -shifted / slope
            lo = bound if lo is None else max(lo, bound)
    if not infeasible and lo is not None and hi is not None and lo >= hi:
        infeasible = True

    if infeasible:
        return HLineResult(side, base, uset.u1, lo, hi, EMPTY, None)

    lo_int = None if lo is None else math.floor(lo) + 1
    hi_int = None if hi is None else math.ceil(hi) - 1
    if lo_int is not None and hi_int is not None:
        count = hi_int - lo_int + 1
        if count <= 0:
            return HLineResult(side, base, uset.u1, lo, hi, EMPTY, None)
        if count == 1:
            return HLineResult(side, base, uset.u1, lo, hi, ONE, lo_int)
    witness = _closest_integer_to_zero(lo_int, hi_int)
    return HLineResult(side, base, uset.u1, lo, hi, TWO_PLUS, witness)


def _closest_integer_to_zero(lo_int, hi_int) -> int:
    if (lo_int is None or lo_int <= 0) and (hi_int is None or hi_int >= 0):
        return 0
    if hi_int is not None and hi_int < 0:
        return hi_int
    return lo_int


@dataclass(frozen=True)
class GpSystem:
    """The halfspaces grad f(w) . (x - w) <= 0 generated by a point set."""

    halfspaces: Tuple[tuple, ...]

    @classmethod
    def from_set(cls, uset: UnimodularSet, oracle) -> "GpSystem":
        return cls(tuple((w, tuple(oracle.eval_grad(w))) for w in uset.members()))

    @classmethod
    def from_points(cls, points, oracle) -> "GpSystem":
        return cls(tuple((tuple(w), tuple(oracle.eval_grad(w))) for w in points))

    def membership(self, x, policy: SignPolicy = EXACT) -> bool:
        return all(classify_sign(dot(g, vsub(x, w)), policy) <= 0
                   for w, g in self.halfspaces)

    def interior(self, x, policy: SignPolicy = EXACT) -> bool:
        """Strict membership; empty whenever some generating gradient is 0."""
        return all(classify_sign(dot(g, vsub(x, w)), policy) < 0
                   for w, g in self.halfspaces)
