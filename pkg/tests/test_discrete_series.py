import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import fd_derivative, raw_coeff
from poincare_lab.discrete_series import (
    EnvelopingWord,
    MatrixCoefficientParam,
    abs_coeff_radial,
    casimir_report,
    coeff,
    derivative,
    formal_degree,
    lp_norm_closed_form,
)
from poincare_lab.errors import DivergenceError, DomainError, InsufficientSamplesError, WordTooLongError
from poincare_lab.group import (
    CartanCoords,
    GroupElement,
    a_t,
    cartan,
    frobenius_norm,
    group_norm,
    identity,
    multiply,
    random_element,
    recompose_cartan,
    rotation,
)

weights = st.integers(2, 14)
angles = st.floats(0, 2 * math.pi)


@st.composite
def elements(draw, t_max=4.0):
    return recompose_cartan(CartanCoords(draw(angles), draw(st.floats(0, t_max)), draw(angles)))


ONE_LETTER = [(x,) for x in "HEF"]
TWO_LETTERS = [(x, y) for x in "HEF" for y in "HEF"]


def test_param():
    p = MatrixCoefficientParam(4)
    assert p.normalization == 16 and p.integrable
    assert not MatrixCoefficientParam(2).integrable
    with pytest.raises(DomainError):
        MatrixCoefficientParam(1)


@pytest.mark.parametrize("k", [2, 3, 4, 7, 12])
def test_coeff_identity(k):
    assert coeff(k, identity()) == 1


@given(weights, angles)
def test_coeff_rotation(k, th):
    assert coeff(k, rotation(th)) == pytest.approx(complex(math.cos(k * th), math.sin(k * th)), abs=1e-12)


@given(weights, st.floats(0, 10))
def test_coeff_diagonal(k, t):
    assert abs(coeff(k, a_t(t))) == pytest.approx(math.cosh(t / 2) ** (-k), rel=1e-12)


@given(weights, elements())
def test_coeff_matches_raw_formula(k, g):
    assert coeff(k, g) == pytest.approx(raw_coeff(k, g.to_array()), rel=1e-12)


@given(weights, angles, angles, elements())
def test_bi_k_equivariance(k, th, ph, g):
    lhs = coeff(k, multiply(multiply(rotation(th), g), rotation(ph)))
    rhs = complex(math.cos(k * (th + ph)), math.sin(k * (th + ph))) * coeff(k, g)
    assert abs(lhs - rhs) <= 1e-12


@given(weights, elements(6.0))
def test_modulus_and_envelopes(k, g):
    f = frobenius_norm(g)
    a = abs(coeff(k, g))
    assert a == pytest.approx(2 ** k * (f * f + 2) ** (-k / 2), rel=1e-12)
    assert a <= (2 / f) ** k * (1 + 1e-12)
    assert a * group_norm(g) ** k <= 2 ** k * (1 + 1e-12)


def test_abs_coeff_radial_examples():
    assert abs_coeff_radial(5, 0.0) == 1.0
    assert abs_coeff_radial(4, 2.0) == pytest.approx(math.cosh(1.0) ** -4)
    assert abs_coeff_radial(4, 2.0) == pytest.approx(0.176378, abs=1e-6)


def test_abs_coeff_radial_bulk(rng):
    for _ in range(1000):
        g = random_element(rng, 5.0)
        k = int(rng.integers(2, 12))
        assert abs_coeff_radial(k, cartan(g).t) == pytest.approx(abs(coeff(k, g)), rel=1e-12, abs=1e-300)


def test_derivative_examples():
    assert derivative(4, EnvelopingWord(("H",)), identity()) == 0
    assert derivative(4, EnvelopingWord(("E",)), identity()) == pytest.approx(-2j)
    assert derivative(6, EnvelopingWord(("E",)), identity()) == pytest.approx(-3j)


def test_word_cap():
    with pytest.raises(WordTooLongError):
        EnvelopingWord(("H",) * 5)
    with pytest.raises(DomainError):
        EnvelopingWord(("X",))


def _rel_err(analytic, oracle, scale):
    return abs(analytic - oracle) / max(abs(oracle), scale)


@pytest.mark.parametrize("side", ["right", "left"])
@pytest.mark.parametrize("letters", ONE_LETTER + TWO_LETTERS)
def test_derivative_vs_finite_differences(letters, side, random_points):
    h = 1e-5 if len(letters) == 1 else 1e-4
    for k in (3, 4, 6):
        for g in random_points[:30]:
            a = derivative(k, EnvelopingWord(letters, side), g)
            fd = fd_derivative(k, letters, side, g, h)
            assert _rel_err(a, fd, abs(coeff(k, g))) < 1e-6


@pytest.mark.parametrize("letters", [("H", "E", "F"), ("F", "F", "E"), ("E", "H", "H", "F")])
def test_long_words_vs_finite_differences(letters, random_points):
    for g in random_points[:10]:
        a = derivative(5, EnvelopingWord(letters), g)
        fd = fd_derivative(5, letters, "right", g, 2e-3)
        assert _rel_err(a, fd, abs(coeff(5, g))) < 1e-3


BRACKETS = {("H", "E"): ("E", 2.0), ("H", "F"): ("F", -2.0), ("E", "F"): ("H", 1.0)}


@pytest.mark.parametrize("side", ["right", "left"])
@pytest.mark.parametrize("pair", list(BRACKETS))
@given(g=elements(), k=weights)
def test_commutators_follow_lie_bracket(side, pair, g, k):
    X, Y = pair
    Z, c = BRACKETS[pair]
    lhs = derivative(k, EnvelopingWord((X, Y), side), g) - derivative(k, EnvelopingWord((Y, X), side), g)
    rhs = c * derivative(k, EnvelopingWord((Z,), side), g)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs), k * k * abs(coeff(k, g)))


def _bounded_samples(rng, n=100):
    return [random_element(rng, 2.0) for _ in range(n)]


@pytest.mark.parametrize("k", [3, 4, 6])
def test_casimir_spread(k, rng):
    rep = casimir_report(k, _bounded_samples(rng))
    assert rep.sample_count == 100
    assert rep.relative_spread < 1e-8


def test_casimir_distinguishes_weights(rng):
    pts = _bounded_samples(rng)
    r4, r6 = casimir_report(4, pts), casimir_report(6, pts)
    assert r4.relative_spread < 1e-8 and r6.relative_spread < 1e-8
    assert abs(r4.eigenvalue_estimate - r6.eigenvalue_estimate) > 1.0


def test_casimir_matches_finite_difference_casimir(rng):
    pts = _bounded_samples(rng, 10)
    rep = casimir_report(5, pts)
    for g in pts[:3]:
        fd = 0.5 * fd_derivative(5, "HH", "right", g, 1e-4)
        fd += fd_derivative(5, "EF", "right", g, 1e-4) + fd_derivative(5, "FE", "right", g, 1e-4)
        assert fd / coeff(5, g) == pytest.approx(rep.eigenvalue_estimate, rel=1e-5)


def test_casimir_input_validation(rng):
    with pytest.raises(DomainError):
        GroupElement(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(InsufficientSamplesError):
        casimir_report(4, _bounded_samples(rng, 5))
    far = [a_t(14.0)] * 10
    with pytest.raises(InsufficientSamplesError):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            casimir_report(12, far)
    with pytest.warns(RuntimeWarning):
        rep = casimir_report(12, far + _bounded_samples(rng, 10))
    assert rep.sample_count == 10


def test_lp_closed_form():
    assert lp_norm_closed_form(4, 1) == 2.0
    assert lp_norm_closed_form(3, 1) == 4.0
    with pytest.raises(DivergenceError):
        lp_norm_closed_form(2, 1)
    assert lp_norm_closed_form(2, 2) == pytest.approx(math.sqrt(2))


def test_formal_degree():
    assert formal_degree(2) == 0.5
    assert formal_degree(4) == 1.5


@given(st.integers(2, 40))
def test_formal_degree_consistency(k):
    assert lp_norm_closed_form(k, 2) ** 2 * formal_degree(k) == pytest.approx(1.0, rel=1e-14)


def test_array_evaluation_matches_scalar(rng):
    pts = _bounded_samples(rng, 20)
    mats = np.stack([g.to_array() for g in pts])
    word = EnvelopingWord(("E", "H"))
    batch = derivative(4, word, mats)
    assert np.allclose(batch, [derivative(4, word, g) for g in pts], rtol=1e-14, atol=0)
