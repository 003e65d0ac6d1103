import math

import pytest
from hypothesis import given, strategies as st

from gaugezeros import series as S
from gaugezeros.kernel import MINUS_INFINITY, DomainError


def test_lacunary_examples():
    f2 = S.family_lacunary(2)
    assert f2(4).log_mag == pytest.approx(math.log(24), abs=1e-12)
    assert f2(4).phase == 0
    assert f2(3).is_zero
    assert S.family_lacunary(3)(9).log_mag == pytest.approx(math.log(362880), abs=1e-12)
    assert f2(1).log_mag == 0.0
    assert f2(0).is_zero
    assert f2.declared_gauge == 0 and f2.declared_radius == 0


def test_lacunary_huge_index_stays_finite():
    # a log-gamma value, never the factorial itself
    lm = S.family_lacunary(2)(2**40).log_mag
    assert lm == pytest.approx(math.lgamma(2.0**40 + 1), rel=1e-15)


@pytest.mark.parametrize("rho", [1, 0, -3, 2.5])
def test_lacunary_domain(rho):
    with pytest.raises(DomainError):
        S.family_lacunary(rho)


def test_dense_examples():
    d2 = S.family_dense(2)
    assert d2(4).log_mag == pytest.approx(math.log(24), abs=1e-12)
    assert d2(5).is_zero
    assert S.family_dense(1)(6).log_mag == pytest.approx(math.log(720), abs=1e-12)
    assert d2.declared_gauge == 1


def test_dense_marks_exactly_the_squares():
    d2 = S.family_dense(2)
    squares = {r * r for r in range(0, 80)}
    for m in range(0, 6000):
        assert (not d2(m).is_zero) == (m in squares)


def test_gauge_t_examples():
    g = S.family_gauge_t(0.5)
    assert g(4).log_mag == pytest.approx(4 * math.log(4), abs=1e-12)
    assert g(3).log_mag == pytest.approx(math.log(1 + (1.5 + math.sqrt(3)) ** 3), abs=1e-12)
    # direct evaluation: 1 + 3.2320508^3 = 34.7625
    assert math.exp(g(3).log_mag) == pytest.approx(34.762495, abs=1e-6)
    assert S.family_gauge_t(0)(3).log_mag == pytest.approx(math.log(1 + 3**1.5), abs=1e-12)
    assert S.family_gauge_t(0)(3).log_mag == pytest.approx(1.824, abs=1e-3)


@given(st.floats(0, 1), st.integers(3, 3000))
def test_gauge_t_matches_direct_formula(t, n):
    if n & (n - 1) == 0:
        return
    direct = math.log1p((t * n + math.sqrt(n)) ** n) if n * math.log(t * n + math.sqrt(n)) < 700 else None
    got = S.family_gauge_t(t)(n).log_mag
    if direct is not None:
        assert got == pytest.approx(direct, rel=1e-13)
    else:
        assert got == pytest.approx(n * math.log(t * n + math.sqrt(n)), rel=1e-15)


def test_gauge_t_domain():
    with pytest.raises(DomainError):
        S.family_gauge_t(1.5)


def test_power_alpha_is_exact():
    f = S.family_power(1)
    for k in (1, 2, 7, 100, 1000):
        assert S.alpha(f, k) == pytest.approx(k, rel=1e-14)
    assert f(0).log_mag == 0.0


@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_phase_normalized(ph):
    c = S.LogCoefficient(0.0, ph)
    assert 0 <= c.phase < 2 * math.pi
    assert math.isclose(math.cos(c.phase), math.cos(ph), abs_tol=1e-9)


def test_zero_coefficient_invariants():
    assert S.ZERO.is_zero
    assert S.LogCoefficient(MINUS_INFINITY, 1.0).phase == 0.0
    with pytest.raises(DomainError):
        S.LogCoefficient(math.nan)
    with pytest.raises(DomainError):
        S.LogCoefficient(math.inf)


@pytest.mark.parametrize("name,params", [("lacunary", {"rho": 2}), ("dense", {"kexp": 2}),
                                         ("gauge_t", {"t": 0.3}), ("power", {"p": 1.5})])
def test_generators_are_pure(name, params):
    a, b = S.make_family(name, **params), S.make_family(name, **params)
    for k in range(0, 300):
        assert a(k) == a(k) == b(k)


def test_make_family_coercion_and_errors():
    assert S.make_family("lacunary", rho="2")(4).log_mag == pytest.approx(math.log(24))
    with pytest.raises(DomainError):
        S.make_family("lacunary", rho="2.5")
    with pytest.raises(DomainError):
        S.make_family("nope")
    with pytest.raises(DomainError):
        S.make_family("power", p=1, q=2)
    with pytest.raises(DomainError):
        S.make_family("power")


def test_file_round_trip(tmp_path):
    src = S.family_lacunary(2)
    path = tmp_path / "lac.txt"
    S.write_coefficient_file(path, src, 300)
    back = S.family_from_file(path)
    for k in range(301):
        assert back(k) == src(k)
    assert back(10_000).is_zero


@pytest.mark.parametrize("body,lineno", [
    ("0 0.0 0.0\n0 1.0 0.0\n", 2),
    ("1 0.0 0.0\n0 1.0 0.0\n", 2),
    ("0 0.0\n", 1),
    ("# header\n0 abc 0\n", 2),
    ("-1 0 0\n", 1),
    ("0 nan 0\n", 1),
])
def test_file_errors_carry_line_numbers(tmp_path, body, lineno):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    with pytest.raises(S.CoefficientFileError) as exc:
        S.family_from_file(path)
    assert exc.value.lineno == lineno


def test_file_accepts_minus_inf(tmp_path):
    path = tmp_path / "z.txt"
    path.write_text("0 -inf 0\n1 0.5 1.0  # comment\n")
    seq = S.family_from_file(path)
    assert seq(0).is_zero and seq(1).log_mag == 0.5


def test_log_alphas():
    la = S.family_power(1).log_alphas(10)
    assert la[0] == MINUS_INFINITY
    assert la[5] == pytest.approx(math.log(5))


def test_alpha_requires_positive_index():
    with pytest.raises(DomainError):
        S.alpha(S.family_power(1), 0)
