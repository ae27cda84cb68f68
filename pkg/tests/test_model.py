import numpy as np
import pytest

from mfg1d.model import (ConfigError, Coupling, Potential, make_problem,
                         parse_config, problem_from_config)
from helpers import linear_dec, power, vcos


class TestMakeProblem:
    def test_increasing_construction(self):
        spec = make_problem(power(1.0), vcos(), 1.0, 0.01, 256)
        assert spec.coupling.monotonicity == "strictly_increasing"
        assert spec.n_grid == 256 and spec.x.shape == (256,)

    def test_decreasing_construction(self):
        spec = make_problem(linear_dec(), vcos(), 1.0, 0.01, 256)
        assert spec.coupling.monotonicity == "strictly_decreasing"

    def test_negative_epsilon_rejected(self):
        with pytest.raises(ConfigError, match="negative epsilon"):
            make_problem(linear_dec(), vcos(), 1.0, -0.1, 256)

    def test_small_grid_rejected(self):
        with pytest.raises(ConfigError, match="n_grid"):
            make_problem(power(1.0), vcos(), 1.0, 0.01, 8)

    def test_nonmonotone_custom_rejected(self):
        bad = Coupling.custom(
            g=np.sin, g_prime=np.cos, g_inverse=np.arcsin,
            monotonicity="strictly_increasing")
        with pytest.raises(ConfigError, match="strictly_increasing"):
            make_problem(bad, vcos(), 1.0, 0.01, 256)

    def test_wrong_inverse_rejected(self):
        bad = Coupling.custom(
            g=lambda m: np.asarray(m, dtype=float),
            g_prime=lambda m: np.ones_like(np.asarray(m, dtype=float)),
            g_inverse=lambda y: 2.0 * np.asarray(y, dtype=float),
            monotonicity="strictly_increasing")
        with pytest.raises(ConfigError, match="g_inverse"):
            make_problem(bad, vcos(), 1.0, 0.01, 256)

    def test_nonperiodic_potential_rejected(self):
        ramp = Potential.custom(lambda x: np.asarray(x, dtype=float))
        with pytest.raises(ConfigError, match="periodicity"):
            make_problem(power(1.0), ramp, 1.0, 0.01, 256)

    def test_negative_current_flagged(self):
        spec = make_problem(power(1.0), vcos(), -1.0, 0.01, 256)
        assert spec.reflect and spec.j == -1.0

    def test_spec_arrays_immutable(self):
        spec = make_problem(power(1.0), vcos(), 1.0, 0.01, 64)
        with pytest.raises(ValueError):
            spec.x[0] = 5.0


class TestCouplingFamilies:
    @pytest.mark.parametrize("coupling", [
        power(1.0), power(3.0), power(0.5), linear_dec(),
        Coupling.affine(2.0, -1.0), Coupling.affine(-2.0, 0.5),
    ])
    def test_derivative_matches_finite_difference(self, coupling):
        m = np.linspace(0.2, 5.0, 49)
        s = 1e-5
        fd = (np.asarray(coupling.g(m + s)) - np.asarray(coupling.g(m - s))) / (2 * s)
        gp = np.asarray(coupling.g_prime(m))
        assert np.max(np.abs(fd - gp) / np.maximum(1e-30, np.abs(gp))) <= 1e-6

    @pytest.mark.parametrize("coupling", [
        power(1.0), power(3.0), linear_dec(), Coupling.affine(-2.0, 0.5),
    ])
    def test_inverse_roundtrip(self, coupling):
        m = np.geomspace(0.1, 10.0, 33)
        back = np.asarray(coupling.g_inverse(np.asarray(coupling.g(m))))
        assert np.max(np.abs(back - m)) <= 1e-10 * np.max(m)

    def test_power_requires_positive_theta(self):
        with pytest.raises(ConfigError):
            Coupling.power_increasing(-1.0)


class TestPotential:
    def test_cosine_metadata(self):
        v = vcos(1.0)
        assert v.v_max == 1.0 and v.v_min == -1.0
        assert v.argmax == 0.0 and v.single_max
        assert v.span == 2.0 and v.abs_max == 1.0

    def test_shifted_cosine_argmax(self):
        v = Potential.shifted_cosine(1.0, 0.25)
        assert abs(v.argmax - 0.25) <= 1e-12
        assert abs(float(v.v(0.25)) - 1.0) <= 1e-12

    def test_custom_two_maxima_detected(self):
        v = Potential.custom(lambda x: np.cos(4 * np.pi * np.asarray(x, dtype=float)))
        assert not v.single_max

    def test_custom_single_maximum(self):
        v = Potential.custom(lambda x: np.cos(2 * np.pi * np.asarray(x, dtype=float)))
        assert v.single_max and abs(v.v_max - 1.0) <= 1e-9

    def test_reflected_keeps_extrema(self):
        v = Potential.shifted_cosine(1.0, 0.25).reflected()
        assert abs(v.argmax - 0.75) <= 1e-12
        assert abs(float(v.v(0.75)) - 1.0) <= 1e-12


class TestConfig:
    def _write(self, tmp_path, text):
        p = tmp_path / "case.cfg"
        p.write_text(text, encoding="utf-8")
        return p

    def test_full_roundtrip(self, tmp_path):
        p = self._write(tmp_path, """
# comment
coupling.family = power_increasing
coupling.theta = 3
potential.family = cosine
potential.amplitude = 0.5
j = 2
epsilon = 0.001
n_grid = 128
tol_root = 1e-13
tol_residual = 1e-9
""")
        spec = problem_from_config(parse_config(p))
        assert spec.coupling.family == "power_increasing"
        assert spec.j == 2.0 and spec.epsilon == 0.001 and spec.n_grid == 128
        assert spec.tol_root == 1e-13 and spec.potential.v_max == 0.5

    def test_defaults(self, tmp_path):
        p = self._write(tmp_path, "coupling.family = linear_decreasing\nj = 0\nepsilon = 0.05\n")
        spec = problem_from_config(parse_config(p))
        assert spec.n_grid == 256 and spec.potential.family == "cosine"

    def test_missing_j(self, tmp_path):
        p = self._write(tmp_path, "coupling.family = linear_decreasing\nepsilon = 0.05\n")
        with pytest.raises(ConfigError, match="'j'"):
            problem_from_config(parse_config(p))

    def test_unknown_key_named(self, tmp_path):
        p = self._write(tmp_path, "coupling.family = linear_decreasing\nj = 1\nepsilon = 0.05\nbogus = 3\n")
        with pytest.raises(ConfigError, match="bogus"):
            parse_config(p)

    def test_unknown_family(self, tmp_path):
        p = self._write(tmp_path, "coupling.family = cubic\nj = 1\nepsilon = 0.05\n")
        with pytest.raises(ConfigError, match="cubic"):
            problem_from_config(parse_config(p))
