import random
from fractions import Fraction

import pytest

from latfree import (
    BlackBoxOracle,
    MixedQuadraticModel,
    QuadraticModel,
    lipschitz_strongconvexity,
    quadratic_gradient,
    reduce_mixed,
)
from latfree.errors import LevelSetAssumptionViolated, NotStronglyConvexInX
from latfree.oracles import sqrt_lower, sqrt_upper

from helpers import grid_partial_minimum, random_fraction, random_mixed_quadratic


class TestQuadraticModel:
    def test_gradient_at_origin(self, figure_model):
        assert figure_model.eval_grad((0, 0)) == (1, 1)

    def test_gradient_vanishes_at_continuous_minimizer(self, figure_model):
        p = (Fraction(-1, 6), Fraction(-1, 2))
        assert figure_model.continuous_minimizer() == p
        assert quadratic_gradient(figure_model, p) == (0, 0)

    def test_diagonal_gradient(self):
        model = QuadraticModel([[2, 0], [0, 2]], [0, 0])
        assert model.eval_grad((3, 4)) == (6, 8)

    def test_asymmetric_rejected(self):
        with pytest.raises(LevelSetAssumptionViolated):
            QuadraticModel([[2, 1], [0, 2]], [0, 0])

    def test_indefinite_rejected(self):
        with pytest.raises(LevelSetAssumptionViolated):
            QuadraticModel([[1, 2], [2, 1]], [0, 0])
        with pytest.raises(LevelSetAssumptionViolated):
            QuadraticModel([[-1, 0], [0, 1]], [0, 0])

    def test_constant_shifts_values_not_gradients(self):
        base = QuadraticModel([[2, 0], [0, 2]], [-5, -1])
        shifted = QuadraticModel([[2, 0], [0, 2]], [-5, -1], constant=Fraction(13, 2))
        assert shifted.eval_f((2, 0)) - base.eval_f((2, 0)) == Fraction(13, 2)
        assert shifted.eval_grad((2, 0)) == base.eval_grad((2, 0))

    def test_corner_model_values(self, corner_model):
        # (x1 - 5/2)^2 + (x2 - 1/2)^2 with the constant kept
        assert corner_model.eval_f((2, 0)) == Fraction(1, 2)
        assert corner_model.eval_f((3, 1)) == Fraction(1, 2)
        assert corner_model.eval_grad((0, 0)) == (-5, -1)

    def test_finite_difference_matches_gradient(self):
        rng = random.Random(10)
        h = 1e-6
        for _ in range(20):
            q11 = abs(random_fraction(rng)) + 1
            q22 = abs(random_fraction(rng)) + 1
            model = QuadraticModel([[q11, 0], [0, q22]],
                                   [random_fraction(rng), random_fraction(rng)])
            p = (Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5)))
            f0 = float(model.eval_f(p))
            g = model.eval_grad(p)
            for axis in (0, 1):
                step = [0.0, 0.0]
                step[axis] = h
                f1 = float(model.eval_f((float(p[0]) + step[0],
                                         float(p[1]) + step[1])))
                assert abs((f1 - f0) / h - float(g[axis])) < 1e-3

    def test_gradient_monotone(self):
        rng = random.Random(11)
        for _ in range(100):
            from helpers import random_pd_quadratic

            model = random_pd_quadratic(rng)
            p = (Fraction(rng.randint(-8, 8)), Fraction(rng.randint(-8, 8)))
            q = (Fraction(rng.randint(-8, 8)), Fraction(rng.randint(-8, 8)))
            gp, gq = model.eval_grad(p), model.eval_grad(q)
            inner = (gp[0] - gq[0]) * (p[0] - q[0]) + (gp[1] - gq[1]) * (p[1] - q[1])
            if p == q:
                assert inner == 0
            else:
                assert inner > 0


class TestMixedReduction:
    def test_decoupled_blocks_unchanged(self):
        mixed = MixedQuadraticModel([[2]], [[0, 0]], [[2, 0], [0, 2]], [0], [3, -1])
        reduced = reduce_mixed(mixed)
        assert reduced.q == ((2, 0), (0, 2))
        assert reduced.c == (3, -1)

    def test_one_dimensional_coupling(self):
        mixed = MixedQuadraticModel([[2]], [[1, 0]], [[2, 0], [0, 2]], [0], [0, 0])
        reduced = reduce_mixed(mixed)
        assert reduced.q == ((Fraction(3, 2), 0), (0, 2))
        assert reduced.c == (0, 0)

    def test_recover_x_minimizes_the_slice(self):
        rng = random.Random(12)
        for _ in range(10):
            dim = rng.choice([1, 2, 3])
            mixed = random_mixed_quadratic(rng, dim)
            z = (rng.randint(-3, 3), rng.randint(-3, 3))
            x_star = mixed.recover_x(z)
            best = mixed.eval_f(x_star, z)
            for _ in range(10):
                probe = [x + Fraction(rng.randint(-8, 8), 8) for x in x_star]
                assert mixed.eval_f(probe, z) >= best

    def test_reduced_matches_slice_minimum(self):
        rng = random.Random(13)
        mixed = random_mixed_quadratic(rng, 2)
        reduced = reduce_mixed(mixed)
        for z in [(0, 0), (1, -2), (-3, 4)]:
            slice_min = mixed.eval_f(mixed.recover_x(z), z)
            # reduced drops the z-independent constant
            shift = mixed.eval_f(mixed.recover_x((0, 0)), (0, 0)) - reduced.eval_f((0, 0))
            assert reduced.eval_f(z) + shift == slice_min

    def test_grid_minimization_agrees(self):
        rng = random.Random(14)
        mixed = random_mixed_quadratic(rng, 2)
        for z in [(0, 0), (2, 1)]:
            exact = float(mixed.eval_f(mixed.recover_x(z), z))
            approx = grid_partial_minimum(mixed, z)
            assert abs(exact - approx) < 1e-6

    def test_not_strongly_convex_in_x(self):
        with pytest.raises(NotStronglyConvexInX):
            MixedQuadraticModel([[0]], [[0, 0]], [[1, 0], [0, 1]], [0], [0, 0])

    def test_reduction_can_violate_level_sets(self):
        mixed = MixedQuadraticModel([[1]], [[2, 0]], [[2, 0], [0, 2]], [0], [0, 0])
        with pytest.raises(LevelSetAssumptionViolated):
            reduce_mixed(mixed)


class TestStrongConvexity:
    def test_isotropic_modulus_is_exact(self):
        model = QuadraticModel([[2, 0], [0, 2]], [0, 0])
        data = lipschitz_strongconvexity(model, ((0, 0), (0, 0)))
        assert data.c_modulus == 1

    def test_single_point_region_gradient_norm(self, figure_model):
        data = lipschitz_strongconvexity(figure_model, ((0, 0), (0, 0)))
        assert data.l_squared == 2  # ||(1,1)||^2
        assert abs(data.l_estimate - 2 ** 0.5) < 1e-12
        assert data.provenance == "trajectory_estimated"

    def test_diagonal_modulus_is_half_min_entry(self):
        rng = random.Random(15)
        for _ in range(50):
            d1 = abs(random_fraction(rng)) + Fraction(1, 3)
            d2 = abs(random_fraction(rng)) + Fraction(1, 3)
            model = QuadraticModel([[d1, 0], [0, d2]], [0, 0])
            data = lipschitz_strongconvexity(model, ((-3, -3), (3, 3)))
            assert data.c_modulus == min(d1, d2) / 2

    def test_general_modulus_is_conservative(self):
        rng = random.Random(16)
        for _ in range(50):
            from helpers import random_pd_quadratic

            model = random_pd_quadratic(rng)
            data = lipschitz_strongconvexity(model, ((0, 0), (1, 1)))
            c = data.c_modulus
            assert c > 0
            # 2c must lower-bound both eigenvalues: Q - 2c I stays PSD.
            q = model.q
            a, b, d = q[0][0] - 2 * c, q[0][1], q[1][1] - 2 * c
            assert a >= 0 and d >= 0 and a * d - b * b >= 0


class TestSqrtBounds:
    def test_exact_on_perfect_squares(self):
        assert sqrt_lower(Fraction(9, 4)) == Fraction(3, 2)
        assert sqrt_upper(Fraction(9, 4)) == Fraction(3, 2)

    def test_brackets_irrational_roots(self):
        x = Fraction(2)
        lo, hi = sqrt_lower(x), sqrt_upper(x)
        assert lo < hi
        assert lo * lo < x < hi * hi
        assert hi - lo <= Fraction(2, 10 ** 12)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            sqrt_lower(Fraction(-1))


class TestBlackBox:
    def test_wraps_callables(self):
        oracle = BlackBoxOracle(lambda p: p[0] ** 2 + p[1] ** 2,
                                lambda p: (2 * p[0], 2 * p[1]))
        assert oracle.eval_f((3, 4)) == 25.0
        assert oracle.eval_grad((3, 4)) == (6.0, 8.0)
        assert oracle.scalar_kind == "float"
