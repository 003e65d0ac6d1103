import math

import gmpy2
import pytest
from hypothesis import given, strategies as st

from gaugezeros import kernel as K
from gaugezeros.kernel import DomainError, NoRootError


def test_entropy_examples():
    assert K.entropy(0) == 0
    assert K.entropy(1) == 0
    assert K.entropy(0.5) == pytest.approx(math.log(2), abs=1e-15)


@pytest.mark.parametrize("x", [-1e-300, 1.0000001, math.nan])
def test_entropy_domain(x):
    with pytest.raises(DomainError):
        K.entropy(x)


def test_entropy_symmetric_on_grid():
    for i in range(1000):
        x = i / 999
        assert abs(K.entropy(x) - K.entropy(1 - x)) <= 1e-15
        assert 0 <= K.entropy(x) <= math.log(2) + 1e-16


def test_log_binomial_examples():
    assert K.log_binomial_upper(4, 0) == 0
    assert K.log_binomial_upper(4, 2) == pytest.approx(4 * math.log(2))
    assert K.log_binomial_upper(4, 2) >= math.log(6)
    assert K.log_binomial_upper(10, 5) == pytest.approx(6.9315, abs=1e-4)
    assert K.log_binomial_upper(10, 5) >= math.log(252)


def test_log_binomial_dominates_exact_comb():
    for n in range(1, 61):
        for k in range(n + 1):
            assert math.exp(K.log_binomial_upper(n, k)) * (1 + 1e-14) >= math.comb(n, k)


@pytest.mark.parametrize("n,k", [(0, 0), (4, 5), (4, -1)])
def test_log_binomial_domain(n, k):
    with pytest.raises(DomainError):
        K.log_binomial_upper(n, k)


def test_positive_root_examples():
    assert float(K.positive_root(1, 1, [(1, 0)])) == pytest.approx(1.0, rel=1e-15)
    x = K.positive_root(1, 2, [(1, 1), (1, 0)])
    with K.big_context(128):
        assert abs(x - (1 + gmpy2.sqrt(5)) / 2) < mpfr_eps(110)
    assert float(K.positive_root(2, 3, [(1, 1)])) == pytest.approx(1 / math.sqrt(2), rel=1e-15)


def mpfr_eps(bits):
    return gmpy2.mpfr(2) ** (-bits)


def test_positive_root_reversed_form():
    # |b_0| = x + x^2 at the constant-on-the-left side: root of x^2 + x - 1
    x = K.positive_root(1, 0, [(1, 1), (1, 2)])
    assert float(x) == pytest.approx((math.sqrt(5) - 1) / 2, rel=1e-15)


def test_positive_root_errors():
    with pytest.raises(NoRootError):
        K.positive_root(1, 2, [(0, 1), (0, 0)])
    with pytest.raises(DomainError):
        K.positive_root(0, 2, [(1, 1)])
    with pytest.raises(DomainError):
        K.positive_root(1, 2, [(1, 1), (1, 3)])


def _residual_and_sign_change(a, d, terms, x, rel_tol):
    with K.big_context(256):
        a, x = gmpy2.mpfr(a), gmpy2.mpfr(x)
        f = lambda y: a * y**d - gmpy2.fsum(gmpy2.mpfr(c) * y**e for c, e in terms)  # noqa: E731
        lhs = a * x**d
        res = abs(f(x)) / lhs
        t = 10 * gmpy2.mpfr(rel_tol)
        lo, hi = f(x * (1 - t)), f(x * (1 + t))
        return res, lo * hi < 0


@given(
    d=st.integers(1, 12),
    la=st.floats(-40, 40),
    data=st.data(),
)
def test_positive_root_residual_and_uniqueness(d, la, data):
    rel_tol = 1e-20
    exps = data.draw(st.lists(st.integers(0, d - 1), min_size=1, max_size=d, unique=True))
    logs = data.draw(st.lists(st.floats(-40, 40), min_size=len(exps), max_size=len(exps)))
    terms = [(math.exp(l), e) for l, e in zip(logs, exps)]
    a = math.exp(la)
    x = K.positive_root(a, d, terms, rel_tol)
    res, flips = _residual_and_sign_change(a, d, terms, x, rel_tol)
    assert res <= rel_tol
    assert flips


def test_positive_root_log_huge_range():
    # x^n = e^{-5000}: u = -5000/n, far outside float exponents after exponentiation
    u = K.positive_root_log(0, 10, [(-5000, 0)])
    assert float(u) == pytest.approx(-500.0, rel=1e-18)
    u = K.positive_root_log(-1e6, 3, [(0, 0)])
    assert float(u) == pytest.approx(1e6 / 3, rel=1e-18)


@given(st.floats(-1e300, 1e300, allow_nan=False), st.sampled_from([53, 128, 200]))
def test_decimal_round_trip(x, prec):
    with K.big_context(prec):
        v = gmpy2.mpfr(x) * gmpy2.exp(gmpy2.mpfr(12345.678))
    back = K.from_decimal(K.to_decimal(v, prec), prec)
    with K.big_context(prec):
        if v == 0:
            assert back == 0
        else:
            assert abs(back - v) / abs(v) <= gmpy2.mpfr(2) ** (1 - prec)


def test_extended_exponent_range():
    # the MPFR build caps binary exponents near 2^30, i.e. natural logs near 7.4e8
    for lm in (7e8, -7e8):
        z = K.from_log_polar(lm, 0.3)
        assert math.isclose(float(K.log_abs(z)), lm, rel_tol=1e-15)
    assert K.from_log_polar(K.MINUS_INFINITY) == 0


def test_basic_ops_within_4ulp():
    prec = 128
    with K.big_context(prec):
        x, y = gmpy2.mpfr("1.2345678901234567890123456789"), gmpy2.mpfr("9.87654321e-7")
        got = {
            "add": x + y, "mul": x * y, "div": x / y,
            "sqrt": gmpy2.sqrt(x), "exp": gmpy2.exp(x), "log": gmpy2.log(x),
        }
    with K.big_context(prec + 64):
        xr, yr = gmpy2.mpfr(x), gmpy2.mpfr(y)
        refs = {
            "add": xr + yr, "mul": xr * yr, "div": xr / yr,
            "sqrt": gmpy2.sqrt(xr), "exp": gmpy2.exp(xr), "log": gmpy2.log(xr),
        }
        for name, ref in refs.items():
            ulp = abs(ref) * gmpy2.mpfr(2) ** (1 - prec)
            assert abs(gmpy2.mpfr(got[name]) - ref) <= 4 * ulp, name


def test_log_max_identity():
    assert K.log_max(K.MINUS_INFINITY, 3.0) == 3.0
    assert K.log_max() == K.MINUS_INFINITY


def test_log_sum_exp():
    with K.big_context(128):
        v = K.log_sum_exp([gmpy2.mpfr(-1e6), gmpy2.mpfr(-1e6), gmpy2.mpfr("-inf")])
        assert abs(v - (-1e6 + gmpy2.log(2))) < 1e-25
        assert K.log_sum_exp([gmpy2.mpfr("-inf")]) == gmpy2.mpfr("-inf")


def test_precision_must_be_sane():
    with pytest.raises(DomainError):
        K.big_context(1)
