import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaugezeros import gauge as G
from gaugezeros import series as S
from gaugezeros.kernel import MINUS_INFINITY, DomainError

LAC2 = S.family_lacunary(2)
POW1 = S.family_power(1)
LOG_A4 = math.log(24) / 4


def test_window_max_examples():
    assert G.window_max(LAC2, 6, 0.2) == MINUS_INFINITY
    assert G.window_max(LAC2, 6, 0.5) == pytest.approx(LOG_A4, abs=1e-15)
    assert LOG_A4 == pytest.approx(0.7945, abs=1e-4)
    for n in (1, 7, 100):
        for g in (0.02, 0.5, 1.0):
            assert G.window_max(POW1, n, g) == pytest.approx(math.log(n), abs=1e-15)


def test_prefix_max_examples():
    assert G.prefix_max(POW1, 9) == pytest.approx(math.log(9))
    assert G.prefix_max(LAC2, 6) == pytest.approx(LOG_A4)
    zeros = S.from_records("zeros", {})
    assert G.prefix_max(zeros, 10) == MINUS_INFINITY


def test_ratio_examples():
    assert G.ratio_L(POW1, 37, 0.1) == 1.0
    assert G.ratio_L(LAC2, 6, 0.2) == 0.0
    assert G.ratio_L(LAC2, 6, 0.5) == 1.0
    with pytest.raises(G.UndefinedRatioError):
        G.ratio_L(S.from_records("zeros", {}), 5, 0.5)


def test_window_start_exact_decimal():
    assert G.window_start(10, 0.1) == 9
    assert G.window_start(100, 0.02) == 98
    assert G.window_start(5, 1.0) == 1
    with pytest.raises(DomainError):
        G.window_start(5, 0.0)
    with pytest.raises(DomainError):
        G.window_start(5, 1.5)


def _random_seq(seed, size=50, p_zero=0.4):
    rng = random.Random(seed)
    recs = {}
    for k in range(size + 1):
        if rng.random() > p_zero:
            recs[k] = S.LogCoefficient(rng.uniform(-50, 50), rng.uniform(0, 6))
    return S.from_records(f"rand{seed}", recs)


def _loop_window(seq, n, g):
    vals = []
    for k in range(1, n + 1):
        if k >= (1 - g) * n - 1e-12 and not seq(k).is_zero:
            vals.append(seq(k).log_mag / k)
    return max(vals) if vals else MINUS_INFINITY


@given(st.integers(0, 10_000), st.integers(1, 50), st.sampled_from([0.02, 0.05, 0.1, 0.25, 0.3, 0.5, 0.7, 1.0]))
def test_window_and_prefix_match_brute_force(seed, n, g):
    seq = _random_seq(seed)
    assert G.window_max(seq, n, g) == _loop_window(seq, n, g)
    assert G.prefix_max(seq, n) == _loop_window(seq, n, 1.0)


@given(st.integers(0, 10_000))
def test_profile_matches_reference_functions(seed):
    seq = _random_seq(seed, p_zero=0.2)
    first = next(k for k in range(1, 51) if not seq(k).is_zero)
    grid = list(range(first, 51))
    prof = G.profile(seq, grid, G.DEFAULT_GAMMAS, 0.5)
    for i, n in enumerate(grid):
        assert prof.log_A[i] == G.prefix_max(seq, n)
        for g in G.DEFAULT_GAMMAS:
            assert prof.log_A_gamma[g][i] == G.window_max(seq, n, g)
            assert prof.L[g][i] == pytest.approx(G.ratio_L(seq, n, g), rel=1e-15)


@given(st.integers(0, 10_000))
def test_ratio_bounded_and_monotone_in_gamma(seed):
    seq = _random_seq(seed, p_zero=0.2)
    first = next(k for k in range(1, 51) if not seq(k).is_zero)
    gammas = sorted(G.DEFAULT_GAMMAS + (1.0, 0.75))
    prof = G.profile(seq, list(range(first, 51)), gammas, 0.5)
    for i in range(len(prof.n_grid)):
        vals = [prof.L[g][i] for g in sorted(prof.gamma_grid)]
        assert all(0 <= v <= 1 for v in vals)
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert prof.L[1.0][i] == 1.0
    hats = [prof.L_hat[g] for g in sorted(prof.gamma_grid)]
    assert all(a <= b for a, b in zip(hats, hats[1:]))


def test_profile_power_all_ones():
    prof = G.profile(POW1, range(1, 2001))
    assert all(v == 1.0 for v in prof.L_hat.values())
    assert prof.G_hat == 1.0
    assert prof.gamma_grid == tuple(sorted(G.DEFAULT_GAMMAS, reverse=True))


def test_profile_lacunary_null_gauge():
    grid = list(range(1, 4097))
    prof = G.profile(LAC2, grid)
    ns = [3 * 2 ** (j - 1) for j in range(1, 13) if 3 * 2 ** (j - 1) <= 4096]
    for n in ns:
        assert prof.L[0.1][n - 1] == 0.0
    assert prof.L_hat[0.1] == 0.0
    assert prof.G_hat == 0.0


def test_profile_dense_gauge_one():
    prof = G.profile(S.family_dense(2), range(1, 4097))
    assert prof.L_hat[0.1] >= 0.95


def test_tail_inf_curve_is_suffix_min():
    prof = G.profile(S.family_gauge_t(0.5), range(1, 513))
    for g in prof.gamma_grid:
        ti = prof.tail_inf[g]
        assert np.all(np.diff(ti) >= 0)
        assert ti[0] == prof.L[g].min()


def test_argmax_ties_break_to_smallest_index():
    flat = S.from_records("flat", {k: S.LogCoefficient(0.0) for k in range(0, 30)})
    prof = G.profile(flat, range(1, 30))
    assert all(int(a) == 1 for a in prof.argmax)


def test_profile_errors():
    with pytest.raises(DomainError):
        G.profile(POW1, [3, 2])
    with pytest.raises(DomainError):
        G.profile(POW1, [1, 2], [0.0])


def test_csv_layout(tmp_path):
    prof = G.profile(POW1, range(1, 11), (0.5, 0.1))
    path = tmp_path / "g.csv"
    G.write_profile_csv(prof, path)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == ["n", "log_alpha", "log_A", "log_A_gamma_0.5", "L_0.5", "log_A_gamma_0.1", "L_0.1"]
    assert len(lines) == 11


def test_ostrowski_examples():
    grid = range(1, 2049)
    ones = S.family_geometric(1.0)
    assert not G.ostrowski_gaps(ones, 1.0, grid).has_gaps
    sparse = S.from_records("pow2", {2**j: S.LogCoefficient(0.0) for j in range(0, 12)})
    rep = G.ostrowski_gaps(sparse, 1.0, grid)
    assert rep.has_gaps and rep.tail_inf_log_A[0.1] == MINUS_INFINITY
    twos = S.family_geometric(2.0)
    assert not G.ostrowski_gaps(twos, 0.5, grid).has_gaps
    with pytest.raises(DomainError):
        G.ostrowski_gaps(ones, 0.0, grid)
