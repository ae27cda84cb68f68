import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from mfg1d.numerics import (RootFindError, cumulative_integral,
                            find_root_monotone, integrate_periodic,
                            integrate_piecewise)
from helpers import cubic_branches


class TestFindRootMonotone:
    def test_linear(self):
        r = find_root_monotone(lambda x: x - 2.0, (0.0, 5.0), "increasing", 1e-12)
        assert abs(r - 2.0) <= 1e-12

    def test_cubic(self):
        r = find_root_monotone(lambda x: x ** 3 - 8.0, (0.0, 4.0), "increasing", 1e-12)
        assert abs(r - 2.0) <= 1e-12

    def test_mass_objective_zero_mean_potential(self):
        # f(H) = int (H - eps V) - 1 with zero-mean V has root exactly 1
        x = np.arange(64) / 64.0
        v = np.cos(2 * np.pi * x)
        f = lambda h: integrate_periodic(h - 0.1 * v) - 1.0
        r = find_root_monotone(f, (0.0, 2.0), "increasing", 1e-12)
        assert abs(r - 1.0) <= 1e-12

    def test_decreasing_direction(self):
        r = find_root_monotone(lambda x: 3.0 - x, (0.0, 10.0), "decreasing", 1e-12)
        assert abs(r - 3.0) <= 1e-12

    def test_expansion_reaches_far_root(self):
        r = find_root_monotone(lambda x: x - 100.0, (0.0, 1.0), "increasing", 1e-10)
        assert abs(r - 100.0) <= 1e-10

    def test_deterministic(self):
        f = lambda x: np.expm1(x) - 0.7
        a = find_root_monotone(f, (0.0, 2.0), "increasing", 1e-13)
        b = find_root_monotone(f, (0.0, 2.0), "increasing", 1e-13)
        assert a == b

    def test_matches_brentq_on_random_monotone_cubics(self):
        rng = np.random.default_rng(42)
        for _ in range(8):
            a, b = rng.uniform(0.5, 3.0, size=2)
            c = rng.uniform(-5.0, 5.0)
            f = lambda x: a * x ** 3 + b * x + c
            ours = find_root_monotone(f, (-1.0, 1.0), "increasing", 1e-13)
            ref = brentq(f, -10.0, 10.0, xtol=1e-14)
            assert abs(ours - ref) <= 1e-10

    def test_no_sign_change(self):
        with pytest.raises(RootFindError, match="no sign change"):
            find_root_monotone(lambda x: x * x + 1.0, (1.0, 2.0), "increasing",
                               1e-10, lo_limit=0.5, hi_limit=4.0)

    def test_nonmonotone_detected(self):
        f = lambda x: (x - 1.0) ** 2 - 0.5
        with pytest.raises(RootFindError, match="nonmonotone"):
            find_root_monotone(f, (0.0, 1.5), "decreasing", 1e-12)


class TestIntegratePeriodic:
    def test_constant(self):
        assert integrate_periodic(np.ones(64)) == 1.0

    def test_zero_mean_cosine(self):
        x = np.arange(64) / 64.0
        assert abs(integrate_periodic(np.cos(2 * np.pi * x))) <= 1e-14

    def test_linearity(self):
        x = np.arange(64) / 64.0
        assert abs(integrate_periodic(1.0 + 0.3 * np.cos(2 * np.pi * x)) - 1.0) <= 1e-12

    @pytest.mark.parametrize("f,name", [
        (lambda x: np.cos(2 * np.pi * x) ** 2, "cos^2"),
        (lambda x: np.exp(np.cos(2 * np.pi * x)), "exp(cos)"),
    ])
    def test_spectral_accuracy_by_n128(self, f, name):
        x = np.arange(128) / 128.0
        exact, _ = quad(f, 0.0, 1.0, limit=200, epsabs=1e-14)
        assert abs(integrate_periodic(f(x)) - exact) < 1e-10, name


class TestIntegratePiecewise:
    def test_constant_halves(self):
        n = 64
        got = integrate_piecewise(np.full(n, 0.5), np.full(n, 1.5), 0.5, 0.5, 1.5)
        assert abs(got - 1.0) <= 1e-15

    def test_constant_quarter(self):
        n = 64
        got = integrate_piecewise(np.zeros(n), np.full(n, 2.0), 0.25, 0.0, 2.0)
        assert abs(got - 1.5) <= 1e-15

    def test_break_off_grid(self):
        # exact for piecewise-constant data even when d is not a node
        n = 64
        d = 0.3141
        got = integrate_piecewise(np.zeros(n), np.ones(n), d, 0.0, 1.0)
        assert abs(got - (1.0 - d)) <= 1e-15

    def test_branch_oracle_2048(self):
        # lower/upper branch of h for g(m) = -m, j = 1, eps = 0.01, split at
        # d = 0.5; expected value frozen from an adaptive-quadrature oracle
        # built on the cubic-root branch representation.
        n = 2048
        x = np.arange(n) / n
        y = 1.5 + 0.01 * (1.0 - np.cos(2 * np.pi * x))
        lower = np.array([cubic_branches(t)[0] for t in y])
        upper = np.array([cubic_branches(t)[1] for t in y])
        yd = 1.5 + 0.01 * (1.0 - np.cos(2 * np.pi * 0.5))
        lo_d, hi_d = cubic_branches(yd)
        got = integrate_piecewise(lower, upper, 0.5, lo_d, hi_d)
        assert abs(got - 1.004446901445994) <= 1e-8

    def test_rejects_bad_break(self):
        with pytest.raises(ValueError, match="outside"):
            integrate_piecewise(np.ones(32), np.ones(32), 1.5, 1.0, 1.0)


class TestCumulativeIntegral:
    def test_constant_is_exact(self):
        n = 256
        f = cumulative_integral(np.ones(n))
        assert np.array_equal(f[:-1], np.arange(n) / n)
        assert f[-1] == 1.0

    def test_cosine_antiderivative(self):
        # composite-trapezoid error at the quarter period is ~ h^2/12 * 2 pi
        # (about 8e-6 at N = 256), so the tolerance sits just above it
        n = 256
        x = np.arange(n) / n
        f = cumulative_integral(np.cos(2 * np.pi * x))
        exact = np.sin(np.pi / 2) / (2 * np.pi)
        assert abs(f[n // 4] - exact) <= 1e-5

    def test_zero_integrand(self):
        # j/m - p vanishes identically for constant m
        n = 128
        w = 1.0 / np.ones(n) - 1.0
        assert np.all(cumulative_integral(w) == 0.0)

    def test_total_matches_periodic_integral(self):
        x = np.arange(200) / 200.0
        vals = 1.0 + 0.3 * np.cos(2 * np.pi * x) + 0.1 * np.sin(4 * np.pi * x)
        f = cumulative_integral(vals)
        assert abs(f[-1] - integrate_periodic(vals)) <= 1e-12
