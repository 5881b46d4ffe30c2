import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import bloch_dtheta
from qgeom.errors import ConfigError, DomainError
from qgeom.expr_dsl import parse_family_file
from qgeom.finite_diff import DifferentiationScheme, partial
from qgeom.state_families import (
    builtin_family,
    differentiate_state,
    evaluate_state,
    family_from_definition,
    inner_product,
    load_family,
    scaled,
    with_phase,
)

C4 = DifferentiationScheme("central-4", h=1e-3)


def test_hopf_north_pole():
    psi = evaluate_state(builtin_family("hopf_s3"), [0, 0, 0])
    assert np.array_equal(psi, [1, 0])


def test_hopf_south_pole():
    psi = evaluate_state(builtin_family("hopf_s3"), [math.pi, 0, 0])
    assert psi == pytest.approx([0, 1], abs=1e-16)


def test_hopf_norm_random_points():
    rng = np.random.default_rng(3)
    for name in ("hopf_s3", "hopf_s3_nohalf"):
        for r in (1.0, 2.5):
            fam = builtin_family(name, {"r": r})
            for x in rng.uniform(fam.lower, fam.upper, size=(1000, 3)):
                psi = evaluate_state(fam, x)
                assert abs(inner_product(psi, psi).real - r**2) <= 1e-14 * max(1, r**2)


def test_shipped_file_matches_builtin():
    rng = np.random.default_rng(4)
    for name in ("hopf_s3", "hopf_s3_nohalf"):
        a, b = builtin_family(name), load_family(name)
        for x in rng.uniform(a.lower, a.upper, size=(50, 3)):
            assert evaluate_state(b, x) == pytest.approx(evaluate_state(a, x), abs=1e-15)


def test_constant_state():
    fam = builtin_family("constant_state", {"vector": [1 + 2j, 0]})
    assert np.array_equal(evaluate_state(fam, [0.3, -7.0]), [1 + 2j, 0])


def test_plane_wave_origin():
    fam = builtin_family("plane_wave", {"k": 1.0, "omega": 1.0})
    assert np.array_equal(evaluate_state(fam, [0, 0]), [1])


def test_bloch_equator():
    psi = evaluate_state(builtin_family("bloch_cp1"), [math.pi / 2, 0])
    assert psi == pytest.approx([math.sqrt(2) / 2] * 2, abs=1e-15)


def test_builtin_errors():
    with pytest.raises(ConfigError, match="unknown family"):
        builtin_family("nope")
    with pytest.raises(ConfigError, match="requires constant"):
        builtin_family("plane_wave", {"k": 1.0})
    with pytest.raises(ConfigError, match="no constant"):
        builtin_family("bloch_cp1", {"r": 2.0})


def test_out_of_bounds_point():
    with pytest.raises(DomainError):
        evaluate_state(builtin_family("bloch_cp1"), [4.0, 0.0])
    with pytest.raises(ConfigError, match="expects 2"):
        evaluate_state(builtin_family("bloch_cp1"), [1.0])


# -- differentiation ------------------------------------------------------------

def test_derivative_of_constant():
    fam = builtin_family("constant_state", {"vector": [1, 1j, 3]})
    for axis in range(2):
        assert np.max(np.abs(differentiate_state(fam, [0.2, 0.4], axis, C4))) <= 1e-15


def test_derivative_of_phase():
    fam = family_from_definition(parse_family_file("state: [exp(i*a)]"))
    d = differentiate_state(fam, [0.0], 0, C4)
    assert abs(d[0] - 1j) <= 1e-10


def test_bloch_dtheta_against_closed_form():
    d = differentiate_state(builtin_family("bloch_cp1"), [1.0, 0.0], 0)
    assert d == pytest.approx(bloch_dtheta(1.0, 0.0), abs=1e-9)


@pytest.mark.parametrize("kind", ["central-2", "central-4", "richardson"])
def test_schemes_agree(kind):
    scheme = DifferentiationScheme(kind, h=1e-3 if kind != "central-2" else 1e-5)
    d = differentiate_state(builtin_family("bloch_cp1"), [1.0, 0.4], 0, scheme)
    assert d == pytest.approx(bloch_dtheta(1.0, 0.4), abs=1e-9)


def test_central4_convergence():
    fam = builtin_family("bloch_cp1")
    exact = bloch_dtheta(1.0, 0.3)
    errors = []
    for k in range(8):
        h = 0.2 / 2**k
        d = differentiate_state(fam, [1.0, 0.3], 0, DifferentiationScheme("central-4", h=h))
        errors.append(np.max(np.abs(d - exact)))
    ratios = [a / b for a, b in zip(errors, errors[1:]) if b > 1e-11]
    assert len(ratios) >= 3
    assert all(r >= 8 for r in ratios)


def test_richardson_beats_central2():
    fam = builtin_family("bloch_cp1")
    exact = bloch_dtheta(1.0, 0.3)
    c2 = differentiate_state(fam, [1.0, 0.3], 0, DifferentiationScheme("central-2", h=0.05))
    ri = differentiate_state(fam, [1.0, 0.3], 0, DifferentiationScheme("richardson", h=0.05, levels=3))
    assert np.max(np.abs(ri - exact)) < 1e-3 * np.max(np.abs(c2 - exact))


def test_stencil_bounds_enforced():
    fam = builtin_family("bloch_cp1")
    with pytest.raises(DomainError, match="below bound"):
        differentiate_state(fam, [1e-3, 0.5], 0, C4)
    with pytest.raises(DomainError):
        differentiate_state(fam, [1.0, 0.5], 5, C4)


def test_per_axis_override_and_default_step():
    s = DifferentiationScheme(overrides={1: 0.25})
    assert s.step(1, 100.0) == 0.25
    assert s.step(0, 100.0) == pytest.approx(0.1)
    assert s.step(0, 0.2) == pytest.approx(1e-3)


def test_scheme_validation():
    with pytest.raises(ConfigError):
        DifferentiationScheme("central-6")
    with pytest.raises(ConfigError):
        DifferentiationScheme(h=0.0)
    with pytest.raises(ConfigError):
        DifferentiationScheme("richardson", levels=1)


def test_partial_on_plain_function():
    f = lambda x: np.array([np.sin(x[0]) * x[1]])  # noqa: E731
    assert partial(f, np.array([0.3, 2.0]), 0)[0] == pytest.approx(2 * math.cos(0.3), abs=1e-10)


# -- inner product ----------------------------------------------------------------

def test_inner_product_examples():
    assert inner_product([1, 0], [0, 1]) == 0
    assert inner_product([1j], [1j]) == 1
    assert inner_product([1 + 1j, 2], [1, 1j]) == 1 + 1j
    with pytest.raises(ConfigError):
        inner_product([1, 2], [1])


vec = st.lists(
    st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False), min_size=3, max_size=3
)
scalar = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@given(vec, vec)
def test_conjugate_symmetry(a, b):
    assert inner_product(a, b) == inner_product(b, a).conjugate()


@given(vec, vec, vec, scalar)
def test_linear_in_second_argument(a, b, c, alpha):
    lhs = inner_product(a, alpha * np.asarray(b) + np.asarray(c))
    rhs = alpha * inner_product(a, b) + inner_product(a, c)
    scale = np.linalg.norm(a) * (abs(alpha) * np.linalg.norm(b) + np.linalg.norm(c))
    assert abs(lhs - rhs) <= 1e-15 * max(1.0, scale) * 4


def test_with_phase_and_scaled_preserve_modulus():
    fam = builtin_family("bloch_cp1")
    p = [0.7, 1.1]
    a = evaluate_state(fam, p)
    b = evaluate_state(with_phase(fam, lambda x: x[0] * x[1]), p)
    c = evaluate_state(scaled(fam, 2 - 1j), p)
    assert np.abs(b) == pytest.approx(np.abs(a))
    assert c == pytest.approx((2 - 1j) * a)
