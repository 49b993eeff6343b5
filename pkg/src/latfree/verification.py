"""Independent brute-force checks for solver output.

Everything here deliberately avoids the flip machinery: optima come from
exhaustive enumeration, lattice-freeness from scanning a box of integer
points against the halfspaces, and the progress-measure checks replay a
recorded trace.  These are the oracles the solver is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, lcm
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .engine import FlipTrace
from .errors import BoxTooSmall, NotApplicable
from .geometry import GpSystem
from .lattice import UnimodularSet, bounding_box
from .numerics import EXACT, SignPolicy
from .oracles import QuadraticModel, StrongConvexityData


@dataclass(frozen=True)
class IntegerBox:
    """Axis-aligned box of integer points, inclusive on both ends."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        if self.lower[0] > self.upper[0] or self.lower[1] > self.upper[1]:
            raise ValueError("box lower bound exceeds upper bound")

    @classmethod
    def around(cls, point, radius: int) -> "IntegerBox":
        return cls((point[0] - radius, point[1] - radius),
                   (point[0] + radius, point[1] + radius))

    @classmethod
    def around_points(cls, points, radius: int) -> "IntegerBox":
        low, high = bounding_box(points)
        return cls((low[0] - radius, low[1] - radius),
                   (high[0] + radius, high[1] + radius))

    def contains(self, point) -> bool:
        return (self.lower[0] <= point[0] <= self.upper[0]
                and self.lower[1] <= point[1] <= self.upper[1])

    def contains_box(self, other: "IntegerBox") -> bool:
        return self.contains(other.lower) and self.contains(other.upper)

    def points(self) -> Iterator[tuple]:
        for x in range(self.lower[0], self.upper[0] + 1):
            for y in range(self.lower[1], self.upper[1] + 1):
                yield (x, y)

    def __len__(self) -> int:
        return ((self.upper[0] - self.lower[0] + 1)
                * (self.upper[1] - self.lower[1] + 1))


@dataclass(frozen=True)
class OptimumSet:
    """All integer minimizers found in a certified enumeration."""

    points: tuple
    value: object

    def __contains__(self, point) -> bool:
        return tuple(point) in self.points


def required_box_for(model: QuadraticModel, alpha) -> IntegerBox:
    """Integer box certain to contain every point with f <= alpha.

    Uses the axis-aligned bounding box of the sublevel ellipse, rounded
    outward, so an enumeration over it is provably global.
    """
    center = model.continuous_minimizer()
    half = model.sublevel_halfwidths(alpha)
    return IntegerBox(
        (floor(center[0] - half[0]), floor(center[1] - half[1])),
        (ceil(center[0] + half[0]), ceil(center[1] + half[1])),
    )


def global_optimum_box(model: QuadraticModel, padding: int = 1) -> IntegerBox:
    """A box guaranteed to pass the global-margin check for ``model``."""
    center = model.continuous_minimizer()
    anchor = (floor(center[0]), floor(center[1]))
    alpha = min(model.eval_f((anchor[0] + dx, anchor[1] + dy))
                for dx in (0, 1) for dy in (0, 1))
    box = required_box_for(model, alpha)
    return IntegerBox((box.lower[0] - padding, box.lower[1] - padding),
                      (box.upper[0] + padding, box.upper[1] + padding))


def brute_force_optimum(oracle, box: IntegerBox) -> OptimumSet:
    """Exhaustively minimize over the box, certifying globality when possible.

    For a built-in quadratic the sublevel set of the best boxed value must
    fit inside the box, otherwise :class:`BoxTooSmall` is raised; the
    returned minimizers are then global.  For other oracles the result is
    only a boxed minimum.
    """
    best_value = None
    best_points = []
    for point in box.points():
        value = oracle.eval_f(point)
        if best_value is None or value < best_value:
            best_value = value
            best_points = [point]
        elif value == best_value:
            best_points.append(point)
    if isinstance(oracle, QuadraticModel):
        required = required_box_for(oracle, best_value)
        if not box.contains_box(required):
            raise BoxTooSmall(
                f"box {box.lower}..{box.upper} does not cover the sublevel "
                f"region {required.lower}..{required.upper}"
            )
    return OptimumSet(points=tuple(best_points), value=best_value)


@dataclass(frozen=True)
class LatticeFreeReport:
    passed: bool
    witnesses: tuple
    box: IntegerBox


def check_lattice_free(gp: GpSystem, uset: UnimodularSet,
                       box: Optional[IntegerBox] = None,
                       radius: int = 50,
                       policy: SignPolicy = EXACT) -> LatticeFreeReport:
    """Scan a box for integer points strictly inside every halfspace.

    An empty witness list means the polyhedron is lattice-free within the
    box (a documented under-approximation of the unbounded check).
    """
    if box is None:
        box = IntegerBox.around_points(uset.members(), radius)
    for member in uset.members():
        if not box.contains(member):
            raise ValueError("box must contain the generating set")
    witnesses = _interior_points(gp, box, policy)
    return LatticeFreeReport(passed=not witnesses, witnesses=tuple(witnesses),
                             box=box)


def _interior_points(gp: GpSystem, box: IntegerBox, policy: SignPolicy):
    fast = _interior_points_int64(gp, box) if policy.is_exact else None
    if fast is not None:
        return fast
    return [p for p in box.points() if gp.interior(p, policy)]


def _interior_points_int64(gp: GpSystem, box: IntegerBox):
    """Vectorized strict-interior scan with exact integer normals.

    Each halfspace g . (x - w) < 0 is scaled by the positive denominator
    lcm of g, leaving an integer inequality.  Returns None when the
    magnitudes could overflow int64, in which case the caller falls back
    to exact scalar arithmetic.
    """
    scaled = []
    for w, g in gp.halfspaces:
        g = (Fraction(g[0]), Fraction(g[1]))
        denom = lcm(g[0].denominator, g[1].denominator)
        scaled.append((w, (int(g[0] * denom), int(g[1] * denom))))
    span = max(abs(box.lower[0]) + abs(box.upper[0]),
               abs(box.lower[1]) + abs(box.upper[1])) + 4
    largest = max((abs(n[0]) + abs(n[1]) for _, n in scaled), default=0)
    if largest * span >= 2 ** 62:
        return None

    xs = np.arange(box.lower[0], box.upper[0] + 1, dtype=np.int64)
    ys = np.arange(box.lower[1], box.upper[1] + 1, dtype=np.int64)
    grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
    mask = np.ones(grid_x.shape, dtype=bool)
    for w, n in scaled:
        values = n[0] * (grid_x - w[0]) + n[1] * (grid_y - w[1])
        mask &= values < 0
        if not mask.any():
            return []
    return [(int(x), int(y)) for x, y in zip(grid_x[mask], grid_y[mask])]


@dataclass(frozen=True)
class MonotoneReport:
    passed: bool
    failures: tuple

    def __bool__(self) -> bool:
        return self.passed


def trace_sets(trace: Sequence[FlipTrace]) -> Tuple[UnimodularSet, ...]:
    """The per-iteration sets a trace visited, terminal set included."""
    if not trace:
        return ()
    return tuple(t.before for t in trace) + (trace[-1].after,)


def r_measure(uset: UnimodularSet, optima: OptimumSet) -> int:
    return min(uset.r_metric(z) for z in optima.points)


def check_monotone_measures(trace: Sequence[FlipTrace],
                            optima: OptimumSet) -> MonotoneReport:
    """Replay a trace against both progress measures.

    Per flip, neither the minimum member value nor the basis distance to
    the optimum set may increase; over any two consecutive flips one of
    them must strictly decrease unless the earlier set already contains
    an optimum.
    """
    sets = trace_sets(trace)
    if len(sets) <= 1:
        return MonotoneReport(passed=True, failures=())
    f_series = [trace[0].f_before] + [t.f_after for t in trace]
    r_series = [r_measure(s, optima) for s in sets]
    failures = []
    for i in range(len(sets) - 1):
        if f_series[i + 1] > f_series[i]:
            failures.append((i, "f-measure increased"))
        if r_series[i + 1] > r_series[i]:
            failures.append((i, "r-measure increased"))
    for i in range(len(sets) - 2):
        if f_series[i + 2] == f_series[i] and r_series[i + 2] == r_series[i]:
            contains_opt = any(z in sets[i].member_set() for z in optima.points)
            if not contains_opt:
                failures.append(
                    (i, "no strict decrease over two flips without an optimum")
                )
    return MonotoneReport(passed=not failures, failures=tuple(failures))


@dataclass(frozen=True)
class BoundReport:
    """Advisory comparison of first-containment time against a bound.

    The bound scales with a gradient-norm estimate whose provenance is
    recorded in the input data; with a trajectory-estimated value this is
    a sanity check, not a certificate.
    """

    passed: bool
    first_containment: Optional[int]
    r_initial: int
    bound_value: float
    provenance: str


def trajectory_box(trace: Sequence[FlipTrace], optima: OptimumSet,
                   initial: Optional[UnimodularSet] = None) -> IntegerBox:
    """Bounding box of every set visited by a trace plus the optima."""
    points = list(optima.points)
    for uset in trace_sets(trace):
        points.extend(uset.members())
    if initial is not None:
        points.extend(initial.members())
    low, high = bounding_box(points)
    return IntegerBox(low, high)


_SIGNED_UNITS = {(1, 0), (-1, 0), (0, 1), (0, -1)}


def check_proposition_bound(trace: Sequence[FlipTrace], optima: OptimumSet,
                            sc: StrongConvexityData,
                            initial: Optional[UnimodularSet] = None) -> BoundReport:
    """Compare the first index whose set contains an optimum to
    (6 L / c + 2) * r0.

    Requires an axis-aligned unit-square start (identity basis up to
    sign and swap, which leave the distance measure unchanged); raises
    :class:`NotApplicable` otherwise.  The comparison is exact: squares
    are compared so the irrational L never needs rounding.
    """
    sets = trace_sets(trace)
    if not sets:
        if initial is None:
            raise ValueError("empty trace requires the initial set")
        sets = (initial,)
    start = sets[0]
    if not (start.u1 in _SIGNED_UNITS and start.u2 in _SIGNED_UNITS):
        raise NotApplicable("bound check requires an identity starting basis")

    r0 = r_measure(start, optima)
    first = next(
        (i for i, s in enumerate(sets)
         if any(z in s.member_set() for z in optima.points)),
        None,
    )
    c = Fraction(sc.c_modulus)
    bound_value = float((6 * sc.l_estimate / float(c) + 2) * r0)
    if first is None:
        return BoundReport(False, None, r0, bound_value, sc.provenance)
    if r0 == 0:
        passed = first == 0
    elif first <= 2 * r0:
        passed = True
    else:
        # first <= 2 r0 + 6 r0 L / c  <=>  c^2 (first - 2 r0)^2 <= 36 r0^2 L^2
        lhs = (c * (first - 2 * r0)) ** 2
        rhs = 36 * r0 * r0 * Fraction(sc.l_squared)
        passed = lhs <= rhs
    return BoundReport(passed, first, r0, bound_value, sc.provenance)
