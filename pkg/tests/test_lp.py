import numpy as np
import pytest
from scipy.optimize import linprog

from yuancert import InfeasibleError, InputError, UnboundedError, lp_solve


class TestBasics:
    def test_single_variable(self):
        opt, y = lp_solve([1.0], [[1.0]], [1.0], [True])
        assert opt == pytest.approx(1.0)
        np.testing.assert_allclose(y, [1.0])

    def test_two_variable_simplex(self):
        opt, y = lp_solve([1.0, 1.0], [[1.0, 1.0]], [1.0], [True, True])
        assert opt == pytest.approx(1.0)
        assert y.min() >= -1e-12
        assert y.sum() == pytest.approx(1.0)

    def test_free_variable(self):
        # maximize -y2 with y1 free: y1 + y2 = 3, y2 >= 0 -> y2 = 0, y1 = 3
        opt, y = lp_solve([0.0, -1.0], [[1.0, 1.0]], [3.0], [False, True])
        assert opt == pytest.approx(0.0)
        np.testing.assert_allclose(y, [3.0, 0.0], atol=1e-9)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            lp_solve([1.0], [[0.0]], [1.0], [True])

    def test_unbounded(self):
        with pytest.raises(UnboundedError):
            lp_solve([1.0, 0.0], [[0.0, 1.0]], [1.0], [True, True])

    def test_negative_rhs_handled(self):
        opt, y = lp_solve([-1.0], [[-1.0]], [-2.0], [True])
        assert opt == pytest.approx(-2.0)
        np.testing.assert_allclose(y, [2.0])

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            lp_solve([1.0, 2.0], [[1.0]], [1.0], [True, True])

    def test_constraint_qualification_program(self):
        # vanishing nonnegative combination of gradients (0,0,-1), capped:
        # the last row forces every coefficient to zero, optimum 0
        a = [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [-1.0, -1.0, -1.0, 0.0],
            [1.0, 1.0, 1.0, 1.0],
        ]
        opt, y = lp_solve([1.0, 1.0, 1.0, 0.0], a, [0.0, 0.0, 0.0, 1.0], [True] * 4)
        assert opt == pytest.approx(0.0, abs=1e-9)

    def test_degenerate_does_not_cycle(self):
        # redundant constraints with a degenerate vertex
        a = [[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [1.0, 0.0, 0.0]]
        opt, y = lp_solve([1.0, 2.0, 3.0], a, [1.0, 2.0, 0.0], [True] * 3)
        assert opt == pytest.approx(3.0)
        np.testing.assert_allclose(y, [0.0, 0.0, 1.0], atol=1e-9)


class TestAgainstScipy:
    def test_random_instances(self):
        rng = np.random.default_rng(0)
        solved = 0
        for _ in range(60):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(m, 8))
            a = rng.standard_normal((m, n))
            mask = rng.random(n) < 0.7
            y0 = rng.random(n)
            y0[~mask] = rng.standard_normal((~mask).sum())
            b = a @ y0  # feasible by construction
            c = rng.standard_normal(n)
            bounds = [(0, None) if keep else (None, None) for keep in mask]
            ref = linprog(-c, A_eq=a, b_eq=b, bounds=bounds, method="highs")
            if ref.status == 3:
                with pytest.raises(UnboundedError):
                    lp_solve(c, a, b, mask)
                continue
            assert ref.status == 0
            opt, y = lp_solve(c, a, b, mask)
            assert opt == pytest.approx(-ref.fun, abs=1e-7 * (1.0 + abs(ref.fun)))
            assert np.abs(a @ y - b).max() <= 1e-7 * (1.0 + np.abs(b).max())
            assert mask.sum() == 0 or y[mask].min() >= -1e-9
            solved += 1
        assert solved >= 20
