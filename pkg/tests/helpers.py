"""Shared random-instance generators and independent reference routines.

Everything is seeded and deterministic.  The reference routines
(enumeration, coordinate-wise grid minimization) are kept free of any
solver machinery so they can serve as independent oracles.
"""

from fractions import Fraction
import random

from latfree import (
    EvalLedger,
    MixedQuadraticModel,
    Pattern,
    QuadraticModel,
    UniMatrix,
    UnimodularSet,
    active_set,
)


def random_fraction(rng: random.Random, max_num: int = 20, max_den: int = 20,
                    signed: bool = True) -> Fraction:
    num = rng.randint(1, max_num)
    if signed and rng.random() < 0.5:
        num = -num
    return Fraction(num, rng.randint(1, max_den))


def random_pd_quadratic(rng: random.Random, max_entry: int = 20,
                        minimizer_bound: int = 25,
                        constant: Fraction = Fraction(0)) -> QuadraticModel:
    """Symmetric positive definite Q and linear term with small entries.

    Rejection keeps the continuous minimizer within ``minimizer_bound``
    so solve trajectories stay short enough for bulk test runs.
    """
    while True:
        q11 = abs(random_fraction(rng, max_entry, max_entry)) + Fraction(1, 4)
        q22 = abs(random_fraction(rng, max_entry, max_entry)) + Fraction(1, 4)
        q12 = random_fraction(rng, max_entry, max_entry)
        if q11 * q22 - q12 * q12 <= 0:
            continue
        c = (random_fraction(rng, max_entry, max_entry),
             random_fraction(rng, max_entry, max_entry))
        model = QuadraticModel([[q11, q12], [q12, q22]], c, constant)
        center = model.continuous_minimizer()
        if max(abs(center[0]), abs(center[1])) <= minimizer_bound:
            return model


def random_unimodular_set(rng: random.Random, radius: int = 10,
                          ops: int = 4) -> UnimodularSet:
    """Anchor plus a basis built from random shears, swaps and sign flips."""
    while True:
        u1, u2 = (1, 0), (0, 1)
        for _ in range(rng.randint(0, ops)):
            choice = rng.randrange(4)
            k = rng.randint(-3, 3)
            if choice == 0:
                u2 = (u2[0] + k * u1[0], u2[1] + k * u1[1])
            elif choice == 1:
                u1 = (u1[0] + k * u2[0], u1[1] + k * u2[1])
            elif choice == 2:
                u1, u2 = u2, u1
            else:
                u1 = (-u1[0], -u1[1])
        anchor = (rng.randint(-radius, radius), rng.randint(-radius, radius))
        uset = UnimodularSet(anchor, UniMatrix(u1, u2))
        if all(abs(x) <= radius and abs(y) <= radius for x, y in uset.members()):
            return uset


def random_instances(count: int, seed: int, radius: int = 10,
                     minimizer_bound: int = 25):
    """Deterministic list of (model, initial set) pairs."""
    rng = random.Random(seed)
    return [(random_pd_quadratic(rng, minimizer_bound=minimizer_bound),
             random_unimodular_set(rng, radius=radius))
            for _ in range(count)]


def set_near_minimizer(rng: random.Random, model: QuadraticModel,
                       spread: int = 2, ops: int = 3) -> UnimodularSet:
    """Random set anchored near the continuous minimizer.

    Sets straddling the minimizer hit the rarer active patterns (diagonal
    pair, triple, full) far more often than uniformly placed ones.
    """
    from math import floor

    center = model.continuous_minimizer()
    anchor = (floor(center[0]) + rng.randint(-spread, spread),
              floor(center[1]) + rng.randint(-spread, spread))
    u1, u2 = (1, 0), (0, 1)
    for _ in range(rng.randint(0, ops)):
        choice = rng.randrange(4)
        k = rng.randint(-2, 2)
        if choice == 0:
            u2 = (u2[0] + k * u1[0], u2[1] + k * u1[1])
        elif choice == 1:
            u1 = (u1[0] + k * u2[0], u1[1] + k * u2[1])
        elif choice == 2:
            u1, u2 = u2, u1
        else:
            u1 = (-u1[0], -u1[1])
    return UnimodularSet(anchor, UniMatrix(u1, u2))


def find_pattern_instances(pattern: Pattern, count: int, seed: int,
                           max_attempts: int = 400_000):
    """Search random instances whose active set forms ``pattern``."""
    rng = random.Random(seed)
    found = []
    attempts = 0
    while attempts < max_attempts:
        model = random_pd_quadratic(rng)
        for _ in range(8):
            attempts += 1
            uset = set_near_minimizer(rng, model)
            activity = active_set(uset, model)
            if activity.pattern is pattern:
                found.append((model, uset, activity))
                if len(found) >= count:
                    return found
    raise AssertionError(
        f"only {len(found)} instances with pattern {pattern} in "
        f"{max_attempts} attempts"
    )


def brute_force_r_metric(uset: UnimodularSet, x) -> int:
    """min over the four members of ||U^-1 (x - w)||_1, by enumeration."""
    inv = uset.basis.inverse()
    best = None
    for w in uset.members():
        r = inv.apply((x[0] - w[0], x[1] - w[1]))
        value = abs(r[0]) + abs(r[1])
        best = value if best is None else min(best, value)
    return best


def random_mixed_quadratic(rng: random.Random, dim: int) -> MixedQuadraticModel:
    """Random mixed model with PD continuous block and PD reduction."""
    from latfree import reduce_mixed
    from latfree.errors import LevelSetAssumptionViolated

    while True:
        a_matrix = [[Fraction(0)] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                value = random_fraction(rng, 4, 4)
                a_matrix[i][j] = value
                a_matrix[j][i] = value
        for i in range(dim):
            a_matrix[i][i] = abs(a_matrix[i][i]) + dim + 1
        b_matrix = [[random_fraction(rng, 3, 3) for _ in range(2)]
                    for _ in range(dim)]
        c12 = random_fraction(rng, 4, 4)
        c_matrix = [[abs(random_fraction(rng, 6, 4)) + 4, c12],
                    [c12, abs(random_fraction(rng, 6, 4)) + 4]]
        a_vec = [random_fraction(rng, 5, 5) for _ in range(dim)]
        c_vec = [random_fraction(rng, 5, 5) for _ in range(2)]
        try:
            model = MixedQuadraticModel(a_matrix, b_matrix, c_matrix, a_vec, c_vec)
            reduced = reduce_mixed(model)
        except LevelSetAssumptionViolated:
            continue
        center = reduced.continuous_minimizer()
        if max(abs(center[0]), abs(center[1])) <= 25:
            return model


def grid_partial_minimum(model: MixedQuadraticModel, z, span: float = 50.0,
                         tol: float = 1e-9, sweeps: int = 200) -> float:
    """Minimize f(., z) by coordinate sweeps of 1-D grid refinement.

    Independent of the exact algebraic reduction: each sweep shrinks a
    bracket around the best grid point per coordinate until the bracket
    is below ``tol``.  Convexity makes the sweep limit global.
    """
    dim = model.dimension
    x = [0.0] * dim

    def value(vec):
        return float(model.eval_f([Fraction(v).limit_denominator(10 ** 12)
                                   for v in vec], z))

    for _ in range(sweeps):
        moved = 0.0
        for i in range(dim):
            lo, hi = x[i] - span, x[i] + span
            while hi - lo > tol:
                step = (hi - lo) / 8.0
                candidates = [lo + step * j for j in range(9)]
                best = min(candidates, key=lambda t: value(x[:i] + [t] + x[i + 1:]))
                lo, hi = max(lo, best - step), min(hi, best + step)
            new_xi = (lo + hi) / 2.0
            moved = max(moved, abs(new_xi - x[i]))
            x[i] = new_xi
        if moved < tol:
            break
    return value(x)


def count_inner_products(model, uset) -> int:
    """Chargeable evaluations for one preprocessing pass, via a fresh ledger."""
    ledger = EvalLedger(model)
    active_set(uset, model, ledger=ledger)
    return ledger.counted
