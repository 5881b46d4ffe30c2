import math

import numpy as np
import pytest

from oracles import hopf_embedding, hopf_jacobian, s3_euler_metric
from qgeom.charts import (
    ChartMap,
    apply_twist,
    complex_pair_line_element,
    complexify_pairs,
    compose,
    hopf_chart,
    identity_chart,
    jacobian,
    load_chart,
    minkowski_line_element,
    pullback_metric,
    rank_diagnostic,
    split_pairs,
    wick_chart,
    wick_twisted_line_element,
)
from qgeom.errors import ConfigError
from qgeom.expr_dsl import Parameter
from qgeom.quantum_metric import signature


class TestLineElements:
    def test_minkowski_examples(self):
        assert minkowski_line_element([1, 0, 0, 1], 1) == 0
        assert minkowski_line_element([0, 0, 0, 1], 2) == -4
        for c in (0.5, 1, 3):
            assert minkowski_line_element([3, 4, 0, 0], c) == 25

    def test_minkowski_errors(self):
        with pytest.raises(ConfigError):
            minkowski_line_element([1, 2, 3], 1)
        with pytest.raises(ConfigError):
            minkowski_line_element([1, 2, 3, 4], 0)

    def test_complex_pair_examples(self):
        assert complex_pair_line_element(1 + 1j, 0) == 2
        assert complex_pair_line_element(0, 1j, 5, 3) == 3

    def test_twisted_displacement(self):
        d = [0.3, -0.2, 0.7, 0.4]
        assert abs(wick_twisted_line_element(d, 1.0) - minkowski_line_element(d, 1.0)) <= 1e-15

    @pytest.mark.parametrize("c", [1.0, 2.5, 0.3, 17.0])
    def test_identity_over_random_displacements(self, c):
        rng = np.random.default_rng(11)
        d = rng.uniform(-1, 1, size=(1000, 4))
        # brute force: explicit arithmetic on each displacement
        for row, val in zip(d, wick_twisted_line_element(d, c)):
            dx, dy, dz, dt = row
            z1, z2 = complex(dx, dy), complex(dz, c * dt)
            expected = abs(z1) ** 2 + (z2.real**2 - z2.imag**2)
            assert abs(val - expected) <= 1e-13 * max(1, c * c)
            assert abs(val - minkowski_line_element(row, c)) <= 1e-13 * max(1, c * c)


class TestComplexify:
    def test_examples(self):
        assert complexify_pairs([1, 2, 3, 4]) == (1 + 2j, 3 + 4j)
        assert complexify_pairs([1, 0, 0, 0]) == (1, 0)

    def test_round_trip_exact(self):
        x = np.random.default_rng(5).normal(size=(1000, 4)) * 100
        z1, z2 = complexify_pairs(x)
        assert np.array_equal(split_pairs(z1, z2), x)

    def test_non_finite(self):
        with pytest.raises(ConfigError):
            complexify_pairs([1, np.nan, 0, 0])


class TestWick:
    def test_pullback_flat(self):
        assert np.array_equal(pullback_metric(np.eye(4), wick_chart(1.0), [0, 0, 0, 0]), np.diag([1, 1, 1, -1]))
        g = pullback_metric(np.eye(4), wick_chart(2.5), [1, 2, 3, 4])
        assert np.array_equal(g, np.diag([1, 1, 1, -6.25]))
        assert signature(g) == (3, 1, 0)

    def test_jacobian(self):
        assert np.array_equal(jacobian(wick_chart(3.0), [0.1, 0.2, 0.3, 0.4]), np.diag([1, 1, 1, 3.0]))

    def test_bad_c(self):
        with pytest.raises(ConfigError):
            wick_chart(0.0)

    def test_chart_file_matches_builtin(self):
        chart = load_chart("wick", {"c": 2.0})
        from_file = load_chart("src/qgeom/data/wick.chart", {"c": 2.0})
        p = [0.1, 0.2, 0.3, 0.4]
        assert from_file.twist == chart.twist
        assert pullback_metric(np.eye(4), from_file, p) == pytest.approx(
            pullback_metric(np.eye(4), chart, p), abs=1e-9
        )


class TestHopf:
    def test_pole(self):
        assert np.array_equal(hopf_chart(1.0)([0, 0, 0]), [1, 0, 0, 0])

    def test_sphere(self):
        rng = np.random.default_rng(6)
        for r in (1.0, 0.5, 3.0):
            chart = hopf_chart(r)
            for x in rng.uniform(chart.lower, chart.upper, size=(1000, 3)):
                assert abs(np.sum(chart(x) ** 2) - r * r) <= 1e-14 * max(1, r * r)

    def test_embedding_matches_oracle(self):
        x = [0.4, 1.3, 7.0]
        assert hopf_chart(1.0)(x) == pytest.approx(hopf_embedding(*x), abs=1e-15)

    def test_pullback_at_equator(self):
        p = [math.pi / 2, 0.3, 1.1]
        g = pullback_metric(np.eye(4), hopf_chart(1.0), p)
        jac = hopf_jacobian(*p)
        assert g == pytest.approx(jac.T @ jac, abs=1e-8)
        assert g == pytest.approx(np.diag([0.25] * 3), abs=1e-8)

    def test_pullback_general_point(self):
        p = [1.2, 2.0, 5.0]
        g = pullback_metric(np.eye(4), hopf_chart(1.0), p)
        assert g == pytest.approx(s3_euler_metric(1.2), abs=1e-8)

    def test_jacobian_against_closed_form(self):
        rng = np.random.default_rng(8)
        chart = hopf_chart(1.0)
        for _ in range(100):
            p = rng.uniform([0.05, 0.1, 0.1], [math.pi - 0.05, 2 * math.pi - 0.1, 4 * math.pi - 0.1])
            assert jacobian(chart, p) == pytest.approx(hopf_jacobian(*p), abs=1e-9)

    def test_free_radius(self):
        chart = hopf_chart(None)
        assert chart.source_dim == 4
        g = pullback_metric(np.eye(4), chart, [2.0, 1.0, 1.0, 1.0])
        assert g[0, 0] == pytest.approx(1.0, abs=1e-9)
        assert g[1:, 1:] == pytest.approx(s3_euler_metric(1.0, r=2.0), abs=1e-8)

    def test_rank_deficient_at_pole(self):
        chart = hopf_chart(1.0)
        assert rank_diagnostic(chart, [0.0, 1.0, 1.0]).deficient
        assert not rank_diagnostic(chart, [1.0, 1.0, 1.0]).deficient

    def test_bad_radius(self):
        with pytest.raises(ConfigError):
            hopf_chart(-1.0)


class TestPullback:
    def test_identity(self):
        g = np.array([[2.0, 0.3], [0.3, -1.0]])
        assert np.array_equal(pullback_metric(g, identity_chart(2), [0.5, 0.5]), g)

    def test_scaling(self):
        params = (Parameter("u", -5, 5), Parameter("v", -5, 5))
        chart = ChartMap("double", params, 2, lambda x: 2 * x)
        assert pullback_metric(np.eye(2), chart, [0.1, 0.2]) == pytest.approx(4 * np.eye(2), abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            pullback_metric(np.eye(3), wick_chart(1.0), [0, 0, 0, 0])

    def test_symmetric_output(self):
        rng = np.random.default_rng(9)
        chart = hopf_chart(1.0)
        for _ in range(20):
            p = rng.uniform([0.1, 0.1, 0.1], [3.0, 6.0, 12.0])
            g = pullback_metric(np.eye(4), chart, p)
            assert np.max(np.abs(g - g.T)) <= 1e-13

    def test_functoriality(self):
        box2 = (Parameter("u", -3, 3), Parameter("v", -3, 3))
        inner = ChartMap("inner", box2, 2, lambda x: np.array([x[0] + 0.3 * x[1] ** 2, np.sin(x[1]) + x[0] * x[1]]))
        box2b = (Parameter("s", -10, 10), Parameter("t", -10, 10))
        outer = ChartMap(
            "outer",
            box2b,
            3,
            lambda y: np.array([np.cos(y[0]) * y[1], y[0] ** 2 - y[1], np.exp(0.2 * y[0] * y[1])]),
        )
        G = np.array([[2.0, 0.1, 0.0], [0.1, 1.0, 0.3], [0.0, 0.3, 1.5]])
        rng = np.random.default_rng(10)
        for _ in range(20):
            p = rng.uniform(-1, 1, size=2)
            direct = pullback_metric(G, compose(outer, inner), p)
            stepwise = pullback_metric(pullback_metric(G, outer, inner(p)), inner, p)
            assert direct == pytest.approx(stepwise, abs=1e-7)

    def test_callable_target_metric(self):
        chart = identity_chart(2)
        g = pullback_metric(lambda y: np.diag([1.0, y[0] ** 2]), chart, [2.0, 0.0])
        assert np.array_equal(g, np.diag([1.0, 4.0]))


class TestTwist:
    def test_diagonal(self):
        assert np.array_equal(apply_twist(np.eye(4), (1, 1, 1, -1)), np.diag([1, 1, 1, -1]))

    def test_two_twisted_axes_keep_mixed_sign(self):
        g = np.array([[1.0, 0.5], [0.5, 1.0]])
        assert np.array_equal(apply_twist(g, (-1, -1)), -g)

    def test_mixed_coupling_rejected(self):
        g = np.array([[1.0, 0.5], [0.5, 1.0]])
        with pytest.raises(ConfigError):
            apply_twist(g, (1, -1))
