import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosmin.trigpoly import (
    CosinePoly,
    ExponentSet,
    Kind,
    autocorrelate,
    canonicalize,
    eval_cosine,
    eval_derivatives,
    from_exponents,
    is_canonical,
)

cosine_sets = st.lists(st.integers(1, 60), min_size=1, max_size=7, unique=True).map(
    lambda xs: ExponentSet.cosine(sorted(xs)))
newman_sets = st.lists(st.integers(0, 40), min_size=1, max_size=8, unique=True).map(
    lambda xs: ExponentSet.newman(sorted(xs)))


def brute_autocorrelation(exps):
    """Count ordered differences by looping over every pair."""
    terms = {}
    for a in exps:
        for b in exps:
            if b > a:
                terms[b - a] = terms.get(b - a, 0) + 2
    return terms


# -- types -----------------------------------------------------------------

def test_exponent_set_validation():
    with pytest.raises(ValueError, match="duplicate exponent 2"):
        ExponentSet.cosine((1, 2, 2))
    with pytest.raises(ValueError, match="strictly increasing"):
        ExponentSet.cosine((3, 1))
    with pytest.raises(ValueError):
        ExponentSet.cosine((0, 1))
    with pytest.raises(ValueError):
        ExponentSet.newman((-1, 2))
    with pytest.raises(ValueError):
        ExponentSet.cosine(())
    assert ExponentSet.newman((0,)).kind is Kind.NEWMAN


def test_cosine_poly_drops_zero_coefficients():
    p = CosinePoly({3: 0, 1: 2, 2: -1}, Fraction(1, 2))
    assert dict(p.terms) == {1: 2, 2: -1}
    assert p.constant == Fraction(1, 2)
    with pytest.raises(ValueError):
        CosinePoly({0: 1})


def test_json_round_trips():
    s = ExponentSet.newman((0, 1, 3))
    assert ExponentSet.from_json(s.to_json(), Kind.NEWMAN) == s
    p = autocorrelate(s)
    assert p.to_dict() == {"constant": 3, "terms": {"1": 2, "2": 2, "3": 2}}
    assert CosinePoly.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        ExponentSet.from_json('[1, "2"]')


# -- evaluation ------------------------------------------------------------

def test_eval_examples():
    p = from_exponents(ExponentSet.cosine((1, 2)))
    assert eval_cosine(p, math.pi) == pytest.approx(0.0, abs=1e-15)
    assert eval_cosine(p, math.acos(-0.25)) == pytest.approx(-9 / 8, abs=1e-15)
    q = CosinePoly({1: 2, 2: 2, 3: 2}, 3)
    assert eval_cosine(q, 2 * math.pi / 3) == pytest.approx(3.0, abs=1e-14)


def test_eval_array_matches_scalar():
    p = from_exponents(ExponentSet.cosine((2, 5, 11)))
    th = np.linspace(-4, 4, 17)
    vec = eval_cosine(p, th)
    assert vec.shape == th.shape
    for t, v in zip(th, vec):
        assert v == pytest.approx(eval_cosine(p, float(t)), abs=1e-14)


def test_eval_constant_poly():
    p = autocorrelate(ExponentSet.newman((0,)))
    assert eval_cosine(p, 1.234) == 1.0
    assert np.all(eval_cosine(p, np.zeros(3)) == 1.0)


def test_derivative_examples():
    assert eval_derivatives(CosinePoly({1: 1}), 0.0) == pytest.approx((1, 0, -1))
    f, d1, d2 = eval_derivatives(CosinePoly({1: 1, 2: 1}), math.pi)
    assert (f, d1, d2) == pytest.approx((0, 0, -3), abs=1e-13)
    p = CosinePoly({1: 1, 2: 1, 3: 1})
    h = 1e-5
    fd = (eval_cosine(p, 1.0 + h) - eval_cosine(p, 1.0 - h)) / (2 * h)
    assert abs(eval_derivatives(p, 1.0)[1] - fd) <= 1e-6


def test_eval_accuracy_against_mpmath():
    mpmath.mp.dps = 40
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        harmonics = sorted(int(m) for m in rng.choice(np.arange(1, 501), n, replace=False))
        coefs = [int(c) for c in rng.integers(-5, 6, n)]
        p = CosinePoly(dict(zip(harmonics, coefs)), 2)
        budget = 10 * np.finfo(float).eps * (sum(map(abs, coefs)) + 2)
        for t in rng.uniform(-20, 20, 10):
            exact = 2 + sum(c * mpmath.cos(m * mpmath.mpf(float(t)))
                            for m, c in zip(harmonics, coefs))
            assert abs(eval_cosine(p, float(t)) - float(exact)) <= budget


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 100), min_size=1, max_size=6, unique=True),
       st.floats(0.01, 6.2))
def test_derivatives_match_finite_differences(harmonics, theta):
    p = CosinePoly({m: 1 for m in harmonics})
    h = 1e-5
    eps = np.finfo(float).eps
    f0, d1, d2 = eval_derivatives(p, theta)
    fp, fm = eval_cosine(p, theta + h), eval_cosine(p, theta - h)
    n = len(harmonics)
    # 1e-5 plus the difference quotients' own truncation and rounding error
    trunc1 = sum(m**3 for m in harmonics) * h * h / 6
    trunc2 = sum(m**4 for m in harmonics) * h * h / 12
    assert f0 == pytest.approx(eval_cosine(p, theta), abs=1e-12)
    assert abs(d1 - (fp - fm) / (2 * h)) <= 1e-5 + trunc1 + 4 * n * eps / h
    assert abs(d2 - (fp - 2 * f0 + fm) / h**2) <= 1e-5 + trunc2 + 8 * n * eps / h**2


def test_derivatives_against_mpmath():
    mpmath.mp.dps = 30
    p = CosinePoly({3: 1, 17: -2, 100: 1})
    for t in (0.3, 1.0, 2.9):
        f = lambda x: sum(c * mpmath.cos(m * x) for m, c in p.terms.items())
        exact = [float(mpmath.diff(f, mpmath.mpf(t), k)) for k in (0, 1, 2)]
        got = eval_derivatives(p, t)
        assert got[0] == pytest.approx(exact[0], abs=1e-13)
        assert got[1] == pytest.approx(exact[1], abs=1e-10)
        assert got[2] == pytest.approx(exact[2], abs=1e-8)


# -- constructors ----------------------------------------------------------

def test_from_exponents_examples():
    assert dict(from_exponents(ExponentSet.cosine((2, 4, 6))).terms) == {2: 1, 4: 1, 6: 1}
    p = from_exponents(ExponentSet.cosine((1, 2, 3)))
    assert p.constant == 0 and dict(p.terms) == {1: 1, 2: 1, 3: 1}
    with pytest.raises(ValueError):
        from_exponents(ExponentSet.newman((0, 1)))


def test_autocorrelate_examples():
    p = autocorrelate(ExponentSet.newman((0, 1, 3)))
    assert p.constant == 3 and dict(p.terms) == {1: 2, 2: 2, 3: 2}
    p = autocorrelate(ExponentSet.newman((0,)))
    assert p.constant == 1 and not p.terms
    p = autocorrelate(ExponentSet.newman((0, 1, 2)))
    assert p.constant == 3 and dict(p.terms) == {1: 4, 2: 2}
    with pytest.raises(ValueError):
        autocorrelate(ExponentSet.cosine((1, 2)))


@settings(max_examples=100, deadline=None)
@given(newman_sets)
def test_autocorrelate_counts_pairs(s):
    p = autocorrelate(s)
    assert p.constant == len(s)
    assert dict(p.terms) == brute_autocorrelation(s.exponents)


def test_autocorrelation_is_squared_modulus():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        exps = sorted(int(a) for a in rng.choice(41, n, replace=False))
        p = autocorrelate(ExponentSet.newman(exps))
        th = rng.uniform(0, 2 * math.pi, 1000)
        vals = eval_cosine(p, th)
        direct = np.array([abs(sum(cmath.exp(1j * a * t) for a in exps)) ** 2 for t in th])
        assert vals.min() >= -1e-9
        assert np.max(np.abs(vals - direct)) <= 1e-9


# -- canonical forms -------------------------------------------------------

def test_canonicalize_examples():
    c = canonicalize(ExponentSet.cosine((2, 4, 6)))
    assert c.set.exponents == (1, 2, 3) and c.divisor == 2 and c.shift == 0
    c = canonicalize(ExponentSet.newman((5, 6, 8)))
    assert c.set.exponents == (0, 1, 3) and c.shift == 5 and c.divisor == 1
    c = canonicalize(ExponentSet.newman((0, 2, 6)))
    assert c.set.exponents == (0, 1, 3) and c.shift == 0 and c.divisor == 2
    c = canonicalize(ExponentSet.newman((7,)))
    assert c.set.exponents == (0,) and c.divisor == 1


@settings(max_examples=100, deadline=None)
@given(st.one_of(cosine_sets, newman_sets))
def test_canonicalize_idempotent(s):
    form = canonicalize(s)
    again = canonicalize(form.set)
    assert again.set == form.set and again.divisor == 1 and again.shift == 0
    assert is_canonical(form.set)
    assert s.exponents == tuple(form.divisor * a + form.shift for a in form.set.exponents)
    if s.kind is Kind.NEWMAN:
        assert form.set.exponents[0] == 0


@settings(max_examples=40, deadline=None)
@given(cosine_sets, st.integers(2, 5))
def test_scaled_sets_attain_same_values(s, d):
    base = from_exponents(canonicalize(s).set)
    scaled = from_exponents(canonicalize(s).set.scaled(d))
    # scaled(2 pi j / (k d)) = base(2 pi j / k), so each base grid value appears d times
    k = 720
    a = np.sort(np.repeat(eval_cosine(base, 2 * math.pi * np.arange(k) / k), d))
    b = np.sort(eval_cosine(scaled, 2 * math.pi * np.arange(k * d) / (k * d)))
    assert np.max(np.abs(a - b)) <= 1e-9
