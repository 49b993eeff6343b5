"""Objective models behind the gradient-oracle interface.

An oracle is anything with ``eval_f(p)``, ``eval_grad(p)`` and a
``scalar_kind`` of ``"exact"`` or ``"float"``.  Built-in quadratics are
exact rational end to end; :class:`BlackBoxOracle` adapts user float
callables and is meant to be used with a tolerance sign policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Tuple

from .errors import LevelSetAssumptionViolated, NotStronglyConvexInX

EXACT_KIND = "exact"
FLOAT_KIND = "float"

QVec = Tuple[Fraction, Fraction]


def _as_fraction_matrix(rows) -> tuple:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def _as_fraction_vector(values) -> tuple:
    return tuple(Fraction(v) for v in values)


def _determinant(matrix) -> Fraction:
    """Exact determinant by Gaussian elimination with row pivoting."""
    n = len(matrix)
    rows = [list(row) for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
            det = -det
        pivot = rows[col][col]
        det *= pivot
        for r in range(col + 1, n):
            factor = rows[r][col] / pivot
            for c in range(col, n):
                rows[r][c] -= factor * rows[col][c]
    return det


def _solve_linear(matrix, rhs_columns):
    """Solve ``matrix @ X = rhs`` exactly for several right-hand sides."""
    n = len(matrix)
    width = len(rhs_columns[0])
    aug = [list(matrix[r]) + list(rhs_columns[r]) for r in range(n)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot_row is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [v / pivot for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:n + width] for row in aug]


def _is_symmetric(matrix) -> bool:
    n = len(matrix)
    return all(matrix[i][j] == matrix[j][i] for i in range(n) for j in range(i + 1, n))


def _is_positive_definite(matrix) -> bool:
    """Sylvester criterion: all leading principal minors positive."""
    if not _is_symmetric(matrix):
        return False
    n = len(matrix)
    for k in range(1, n + 1):
        minor = [row[:k] for row in matrix[:k]]
        if _determinant(minor) <= 0:
            return False
    return True


def sqrt_lower(x: Fraction, scale: int = 10 ** 12) -> Fraction:
    """Rational lower bound on sqrt(x), exact when x is a perfect square."""
    if x < 0:
        raise ValueError("square root of a negative value")
    n = x.numerator * x.denominator
    root = math.isqrt(n)
    if root * root == n:
        return Fraction(root, x.denominator)
    scaled = math.isqrt(n * scale * scale)
    return Fraction(scaled, scale * x.denominator)


def sqrt_upper(x: Fraction, scale: int = 10 ** 12) -> Fraction:
    """Rational upper bound on sqrt(x), exact when x is a perfect square."""
    if x < 0:
        raise ValueError("square root of a negative value")
    n = x.numerator * x.denominator
    root = math.isqrt(n)
    if root * root == n:
        return Fraction(root, x.denominator)
    scaled = math.isqrt(n * scale * scale)
    return Fraction(scaled + 1, scale * x.denominator)


class QuadraticModel:
    """Exact strictly convex quadratic f(x) = x'Qx/2 + c'x + d on the plane.

    ``Q`` must be symmetric positive definite, which bounds every level
    set.  The constant ``d`` only shifts reported values; gradients and
    value differences never depend on it.
    """

    scalar_kind = EXACT_KIND

    def __init__(self, q, c, constant=0):
        self.q = _as_fraction_matrix(q)
        self.c = _as_fraction_vector(c)
        self.constant = Fraction(constant)
        if len(self.q) != 2 or any(len(row) != 2 for row in self.q) or len(self.c) != 2:
            raise ValueError("quadratic model is two-dimensional")
        if self.q[0][1] != self.q[1][0]:
            raise LevelSetAssumptionViolated("Q must be symmetric")
        if not _is_positive_definite(self.q):
            raise LevelSetAssumptionViolated(
                "Q must be positive definite for bounded level sets"
            )

    def eval_f(self, p) -> Fraction:
        x = _as_fraction_vector(p)
        q = self.q
        quad = (q[0][0] * x[0] * x[0] + 2 * q[0][1] * x[0] * x[1]
                + q[1][1] * x[1] * x[1])
        return quad / 2 + self.c[0] * x[0] + self.c[1] * x[1] + self.constant

    def eval_grad(self, p) -> QVec:
        x = _as_fraction_vector(p)
        q = self.q
        return (q[0][0] * x[0] + q[0][1] * x[1] + self.c[0],
                q[1][0] * x[0] + q[1][1] * x[1] + self.c[1])

    def continuous_minimizer(self) -> QVec:
        """The unique stationary point, solving Q x = -c exactly."""
        sol = _solve_linear(self.q, [[-self.c[0]], [-self.c[1]]])
        return (sol[0][0], sol[1][0])

    def sublevel_halfwidths(self, alpha: Fraction) -> Tuple[Fraction, Fraction]:
        """Componentwise upper bounds on the extent of {f <= alpha} around
        the continuous minimizer.

        The sublevel set is the ellipse y'Qy <= 2(alpha - min f); its
        axis-aligned extent in coordinate i is sqrt of that radius times
        (Q^-1)_ii, rounded up to a rational.
        """
        center = self.continuous_minimizer()
        rho = 2 * (alpha - self.eval_f(center))
        if rho < 0:
            raise ValueError("alpha below the continuous minimum")
        det = _determinant(self.q)
        inv_diag = (self.q[1][1] / det, self.q[0][0] / det)
        return (sqrt_upper(rho * inv_diag[0]), sqrt_upper(rho * inv_diag[1]))


def quadratic_gradient(model: QuadraticModel, p) -> QVec:
    """Gradient Q p + c of a quadratic model, evaluated exactly."""
    return model.eval_grad(p)


class MixedQuadraticModel:
    """Convex quadratic in continuous x (dim d) and integer z (dim 2).

    f(x, z) = x'Ax/2 + x'Bz + z'Cz/2 + a'x + c'z with A symmetric
    positive definite, so that x can be minimized out exactly for each z.
    """

    def __init__(self, a_matrix, b_matrix, c_matrix, a_vector, c_vector):
        self.a_matrix = _as_fraction_matrix(a_matrix)
        self.b_matrix = _as_fraction_matrix(b_matrix)
        self.c_matrix = _as_fraction_matrix(c_matrix)
        self.a_vector = _as_fraction_vector(a_vector)
        self.c_vector = _as_fraction_vector(c_vector)
        d = len(self.a_matrix)
        if len(self.b_matrix) != d or any(len(row) != 2 for row in self.b_matrix):
            raise ValueError("B must be d x 2")
        if len(self.a_vector) != d or len(self.c_vector) != 2:
            raise ValueError("linear terms must have sizes d and 2")
        if not _is_positive_definite(self.a_matrix):
            raise NotStronglyConvexInX("continuous block A must be positive definite")
        if not _is_symmetric(self.c_matrix) or len(self.c_matrix) != 2:
            raise ValueError("C must be symmetric 2 x 2")
        # A^-1 B and A^-1 a, shared by the reduction and by recover_x.
        rhs = [list(self.b_matrix[r]) + [self.a_vector[r]] for r in range(d)]
        solved = _solve_linear(self.a_matrix, rhs)
        self._ainv_b = [row[:2] for row in solved]
        self._ainv_a = [row[2] for row in solved]

    @property
    def dimension(self) -> int:
        return len(self.a_matrix)

    def eval_f(self, x, z) -> Fraction:
        x = _as_fraction_vector(x)
        z = _as_fraction_vector(z)
        d = self.dimension
        total = Fraction(0)
        for i in range(d):
            total += self.a_vector[i] * x[i]
            total += x[i] * (self.b_matrix[i][0] * z[0] + self.b_matrix[i][1] * z[1])
            for j in range(d):
                total += self.a_matrix[i][j] * x[i] * x[j] / 2
        total += (self.c_matrix[0][0] * z[0] * z[0]
                  + 2 * self.c_matrix[0][1] * z[0] * z[1]
                  + self.c_matrix[1][1] * z[1] * z[1]) / 2
        total += self.c_vector[0] * z[0] + self.c_vector[1] * z[1]
        return total

    def recover_x(self, z) -> tuple:
        """The continuous minimizer of f(., z): x = -A^-1 (B z + a)."""
        z = _as_fraction_vector(z)
        return tuple(
            -(self._ainv_b[i][0] * z[0] + self._ainv_b[i][1] * z[1] + self._ainv_a[i])
            for i in range(self.dimension)
        )


def reduce_mixed(model: MixedQuadraticModel) -> QuadraticModel:
    """Minimize out the continuous block, returning the quadratic in z.

    The reduced matrix is C - B'A^-1 B and the reduced linear term is
    c - B'A^-1 a; the constant shift is dropped.  Raises
    :class:`LevelSetAssumptionViolated` if the reduction is not positive
    definite.
    """
    d = model.dimension
    reduced_q = [[model.c_matrix[r][s]
                  - sum(model.b_matrix[i][r] * model._ainv_b[i][s] for i in range(d))
                  for s in range(2)] for r in range(2)]
    reduced_c = [model.c_vector[r]
                 - sum(model.b_matrix[i][r] * model._ainv_a[i] for i in range(d))
                 for r in range(2)]
    return QuadraticModel(reduced_q, reduced_c)


class BlackBoxOracle:
    """Adapter around user float callables f(p) and grad(p).

    The callables must be pure; use a tolerance sign policy when solving,
    since float ties would otherwise corrupt the cut comparisons.
    """

    scalar_kind = FLOAT_KIND

    def __init__(self, f: Callable, grad: Callable):
        self._f = f
        self._grad = grad

    def eval_f(self, p) -> float:
        return float(self._f((float(p[0]), float(p[1]))))

    def eval_grad(self, p) -> Tuple[float, float]:
        g = self._grad((float(p[0]), float(p[1])))
        return (float(g[0]), float(g[1]))


GLOBAL_GIVEN = "global_given"
TRAJECTORY_ESTIMATED = "trajectory_estimated"


@dataclass(frozen=True)
class StrongConvexityData:
    """Strong-convexity modulus and a gradient-norm bound with provenance.

    ``l_squared`` is the exact square of the gradient-norm bound; the
    float ``l_estimate`` is derived for display.  ``provenance`` records
    whether the bound was supplied globally or estimated from a
    trajectory region, since the latter makes downstream bound checks
    advisory rather than certified.
    """

    c_modulus: Fraction
    l_squared: Fraction
    provenance: str

    @property
    def l_estimate(self) -> float:
        return math.sqrt(float(self.l_squared))


def lipschitz_strongconvexity(model: QuadraticModel, region) -> StrongConvexityData:
    """Strong-convexity modulus of a quadratic and a gradient bound on a box.

    The modulus is half the smallest eigenvalue of Q, rounded down to a
    rational so the resulting convergence bounds stay conservative.  The
    gradient bound is the exact maximum of ||Qx + c||_2 over the box
    corners, which is where the convex norm of a linear map peaks.
    """
    lower, upper = _region_bounds(region)
    trace = model.q[0][0] + model.q[1][1]
    disc = (model.q[0][0] - model.q[1][1]) ** 2 + 4 * model.q[0][1] ** 2
    scale = 10 ** 12
    while True:
        lam_lower = (trace - sqrt_upper(disc, scale)) / 2
        if lam_lower > 0:
            break
        scale *= 2 ** 16
    l_squared = Fraction(0)
    for cx in (lower[0], upper[0]):
        for cy in (lower[1], upper[1]):
            g = model.eval_grad((cx, cy))
            l_squared = max(l_squared, g[0] * g[0] + g[1] * g[1])
    return StrongConvexityData(c_modulus=lam_lower / 2, l_squared=l_squared,
                               provenance=TRAJECTORY_ESTIMATED)


def _region_bounds(region):
    if hasattr(region, "lower") and hasattr(region, "upper"):
        return tuple(region.lower), tuple(region.upper)
    lower, upper = region
    return tuple(lower), tuple(upper)


def default_policy_kind(oracle) -> str:
    kind = getattr(oracle, "scalar_kind", FLOAT_KIND)
    if kind not in (EXACT_KIND, FLOAT_KIND):
        raise ValueError(f"unknown oracle scalar kind: {kind!r}")
    return kind
