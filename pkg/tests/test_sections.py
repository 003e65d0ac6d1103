import math

import gmpy2
import pytest
from hypothesis import given, strategies as st

from gaugezeros import series as S
from gaugezeros import sections as X
from gaugezeros import kernel as K
from gaugezeros.kernel import MINUS_INFINITY, DomainError, ExponentOverflowError, big_context

POW1 = S.family_power(1)
LAC2 = S.family_lacunary(2)


def _abs(c):
    with big_context(256):
        return abs(gmpy2.mpc(c))


def test_strip_origin_examples(tmp_path):
    assert X.strip_origin(LAC2)[1] == 1
    assert X.strip_origin(POW1) == (POW1, 0)
    p = tmp_path / "s.txt"
    p.write_text("3 0.0 0.0\n5 1.0 0.0\n")
    seq, k = X.strip_origin(S.family_from_file(p))
    assert k == 3 and seq(0).log_mag == 0.0 and seq(2).log_mag == 1.0
    with pytest.raises(X.DegenerateSequenceError):
        X.strip_origin(S.from_records("zeros", {}), scan=50)


def test_power_section_values():
    s = X.build(POW1, 4, X.Mode.MAX_GAUGE)
    expect = [1, 0.25, 0.25, 0.421875, 1]
    for c, e in zip(s.coefficients, expect):
        assert float(_abs(c)) == pytest.approx(e, rel=1e-30)
    assert s.coefficients[4] == 1
    assert s.effective_degree == 4 and s.normalizer_index == 4


def test_mode_none_is_verbatim():
    seq = S.from_records("r", {0: S.LogCoefficient(0.3, 1.0), 2: S.LogCoefficient(-2.0, 4.0), 3: S.LogCoefficient(5.0)})
    s = X.build(seq, 3, X.Mode.NONE)
    for k in range(4):
        v = seq(k).value()
        assert abs(complex(s.coefficients[k]) - v) <= 1e-15 * max(1, abs(v))
    assert s.coefficients[1] == 0


def test_lacunary_stripped_section():
    seq, k = X.strip_origin(LAC2)
    s = X.build(seq, 6, X.Mode.MAX_GAUGE)
    nonzero = [j for j, c in enumerate(s.coefficients) if c != 0]
    # local index j carries original index j + 1: powers 1, 2, 4
    assert nonzero == [0, 1, 3]
    assert s.origin_multiplicity_stripped == 1
    assert s.effective_degree == 4 < s.n
    assert s.n - s.effective_degree == 2


def test_dynamic_range_examples():
    lo, hi, under = X.dynamic_range_report(X.build(POW1, 64))
    assert lo == pytest.approx(-64 / math.e, abs=0.05)
    assert hi == 0.0 and under == 0
    lo, _, under = X.dynamic_range_report(X.build(POW1, 2048))
    assert lo == pytest.approx(-753.4, abs=0.1)
    assert under > 0
    ones = S.family_geometric(1.0)
    assert X.dynamic_range_report(X.build(ones, 20, X.Mode.NONE)) == (0.0, 0.0, 0)


@given(st.sampled_from(["power", "gauge_t", "dense", "lacunary"]), st.integers(2, 300))
def test_max_gauge_coefficient_bounds(name, n):
    params = {"power": {"p": 1.3}, "gauge_t": {"t": 0.4}, "dense": {"kexp": 2}, "lacunary": {"rho": 3}}[name]
    seq, _ = X.strip_origin(S.make_family(name, **params))
    if n - seq.shift < 1 or all(seq(k).is_zero for k in range(1, n - seq.shift + 1)):
        return
    s = X.build(seq, n, X.Mode.MAX_GAUGE)
    mags = [_abs(c) for c in s.coefficients]
    top = max(mags[1:])
    assert top == 1
    assert all(m <= 1 for m in mags[1:])
    with big_context(256):
        assert gmpy2.fsum(mags) <= mags[0] + s.local_n
    # constant term untouched by the scaling
    assert abs(float(mags[0]) - math.exp(seq(0).log_mag)) <= 1e-15 * math.exp(seq(0).log_mag)


def test_modes_coincide_where_last_alpha_is_max():
    seq = S.family_gauge_t(0.5)
    for n in (8, 16, 64, 128):
        a = X.build(seq, n, X.Mode.MAX_GAUGE)
        b = X.build(seq, n, X.Mode.LAST_COEFF)
        assert a.normalizer_index == n
        assert a.coefficients == b.coefficients


def test_normalizer_errors():
    with pytest.raises(DomainError, match="MAX_GAUGE"):
        X.build(S.from_records("z", {0: S.LogCoefficient(0.0)}), 5, X.Mode.MAX_GAUGE)
    with pytest.raises(DomainError, match="LAST_COEFF"):
        X.build(X.strip_origin(LAC2)[0], 6, X.Mode.LAST_COEFF)
    with pytest.raises(DomainError):
        X.build(POW1, 0)


def test_exponent_capacity_is_an_error():
    assert K.LOG_MAGNITUDE_LIMIT > 7e8
    seq = S.from_records("wide", {0: S.LogCoefficient(0.0), 1: S.LogCoefficient(-1e12)})
    with pytest.raises(ExponentOverflowError):
        X.build(seq, 1, X.Mode.NONE)


def test_mode_parse():
    assert X.Mode.parse("max_gauge") is X.Mode.MAX_GAUGE
    assert X.Mode.parse("LAST-COEFF") is X.Mode.LAST_COEFF
    with pytest.raises(DomainError):
        X.Mode.parse("bogus")


def test_section_dump_round_trip(tmp_path):
    s = X.build(S.family_gauge_t(0.3), 40, X.Mode.MAX_GAUGE, precision=160)
    path = tmp_path / "sec.txt"
    X.write_section(s, path)
    back = X.read_section(path)
    assert back.n == 40 and back.mode is X.Mode.MAX_GAUGE and back.precision == 160
    for a, b in zip(s.coefficients, back.coefficients):
        with big_context(160):
            assert abs(a - b) <= abs(a) * gmpy2.mpfr(2) ** -159
    assert back.log_mags == s.log_mags


def test_from_coefficients():
    s = X.from_coefficients([-1, -1, 1])
    assert s.local_degree == 2 and s.mode is X.Mode.NONE
    assert s.log_mags[0] == 0.0
    s = X.from_coefficients([0, 1, 0])
    assert s.log_mags[0] == MINUS_INFINITY and s.local_degree == 1
