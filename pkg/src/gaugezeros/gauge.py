"""Gauge of a coefficient sequence over a finite n-grid, and Ostrowski-gap detection.

All maxima are taken over log alpha_k = log|a_k| / k, so vanishing
coefficients are -inf and never win a maximum.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .kernel import MINUS_INFINITY, DomainError
from .series import CoefficientSequence

DEFAULT_GAMMAS = (0.5, 0.25, 0.1, 0.05, 0.02)
DEFAULT_TAIL_FRACTION = 0.5


class UndefinedRatioError(DomainError):
    """L_n(gamma) requested where A_n = 0."""


def window_start(n: int, gamma: float) -> int:
    """First index of the window (1 - gamma) n <= k <= n, clamped to k >= 1.

    Uses the decimal value of ``gamma`` so that e.g. gamma = 0.1, n = 10
    gives 9 rather than 10.
    """
    if not 0 < gamma <= 1:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    g = Fraction(repr(float(gamma)))
    return max(1, math.ceil((1 - g) * n))


def _log_alpha(seq: CoefficientSequence, k: int) -> float:
    c = seq(k)
    return MINUS_INFINITY if c.is_zero else c.log_mag / k


def window_max(seq: CoefficientSequence, n: int, gamma: float) -> float:
    """log A_n(gamma)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    lo = window_start(n, gamma)
    return max((_log_alpha(seq, k) for k in range(lo, n + 1)), default=MINUS_INFINITY)


def prefix_max(seq: CoefficientSequence, n: int) -> float:
    """log A_n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return max(_log_alpha(seq, k) for k in range(1, n + 1))


def ratio_L(seq: CoefficientSequence, n: int, gamma: float) -> float:
    """L_n(gamma) = A_n(gamma) / A_n."""
    top = prefix_max(seq, n)
    if top == MINUS_INFINITY:
        raise UndefinedRatioError(f"A_{n} = 0 for {seq.name}: no nonzero coefficient in 1..{n}")
    w = window_max(seq, n, gamma)
    if w == MINUS_INFINITY:
        return 0.0
    return math.exp(w - top)


class _RangeMax:
    """Sparse table for O(1) range maxima over a fixed float array."""

    def __init__(self, values: np.ndarray):
        self.levels = [np.asarray(values, dtype=float)]
        width = 1
        while 2 * width <= len(values):
            prev = self.levels[-1]
            self.levels.append(np.maximum(prev[:-width], prev[width:]))
            width *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """max(values[lo..hi]) elementwise, inclusive bounds, lo <= hi."""
        span = hi - lo + 1
        level = np.frexp(span.astype(float))[1] - 1
        out = np.empty(len(lo))
        for lv in np.unique(level):
            sel = level == lv
            tab = self.levels[lv]
            out[sel] = np.maximum(tab[lo[sel]], tab[hi[sel] - (1 << lv) + 1])
        return out


@dataclass
class GaugeProfile:
    name: str
    n_grid: np.ndarray
    gamma_grid: tuple
    tail_fraction: float
    log_alpha: np.ndarray
    log_A: np.ndarray
    argmax: np.ndarray
    log_A_gamma: dict
    L: dict
    L_hat: dict
    tail_inf: dict
    G_hat: float

    @property
    def gamma_min(self) -> float:
        return min(self.gamma_grid)

    def summary(self) -> dict:
        return {
            "sequence": self.name,
            "n_max": int(self.n_grid[-1]),
            "n_points": int(len(self.n_grid)),
            "tail_fraction": self.tail_fraction,
            "L_hat": {repr(g): float(self.L_hat[g]) for g in self.gamma_grid},
            "gamma_min": self.gamma_min,
            "G_hat": float(self.G_hat),
        }


def _tail_mask(n_grid: np.ndarray, tail_fraction: float) -> np.ndarray:
    return n_grid >= (1.0 - tail_fraction) * n_grid[-1]


def profile(
    seq: CoefficientSequence,
    n_grid: Sequence[int],
    gamma_grid: Sequence[float] = DEFAULT_GAMMAS,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
) -> GaugeProfile:
    """Evaluate A_n, A_n(gamma), L_n(gamma) on ``n_grid`` and the tail-infimum summaries.

    L_hat(gamma) is the minimum of L_n(gamma) over the last ``tail_fraction``
    of the grid; ``tail_inf[gamma][i]`` is the infimum over grid points from
    i onwards, so the whole curve can be inspected.
    """
    n_grid = np.asarray(list(n_grid), dtype=np.int64)
    if n_grid.size == 0:
        raise DomainError("n_grid is empty")
    if n_grid[0] < 1 or np.any(np.diff(n_grid) <= 0):
        raise DomainError("n_grid must be strictly increasing positive integers")
    if not 0 < tail_fraction < 1:
        raise DomainError(f"tail_fraction must lie in (0, 1), got {tail_fraction}")
    gammas = tuple(sorted((float(g) for g in gamma_grid), reverse=True))
    if not gammas:
        raise DomainError("gamma_grid is empty")
    for g in gammas:
        if not 0 < g <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {g}")

    nmax = int(n_grid[-1])
    la = seq.log_alphas(nmax)

    # running max of log alpha over 1..k, argmax tie-broken to the smallest index
    run = np.empty(nmax + 1)
    arg = np.zeros(nmax + 1, dtype=np.int64)
    run[0] = MINUS_INFINITY
    best, best_k = MINUS_INFINITY, 0
    for k in range(1, nmax + 1):
        if la[k] > best:
            best, best_k = la[k], k
        run[k] = best
        arg[k] = best_k

    log_A = run[n_grid]
    if np.any(log_A == MINUS_INFINITY):
        bad = int(n_grid[np.argmax(log_A == MINUS_INFINITY)])
        raise UndefinedRatioError(f"A_{bad} = 0 for {seq.name}: no nonzero coefficient in 1..{bad}")

    rmq = _RangeMax(la)
    log_A_gamma, L, L_hat, tail_inf = {}, {}, {}, {}
    tail = _tail_mask(n_grid, tail_fraction)
    for g in gammas:
        lo = np.array([window_start(int(n), g) for n in n_grid], dtype=np.int64)
        w = rmq.query(lo, n_grid)
        ratio = np.where(w == MINUS_INFINITY, 0.0, np.exp(w - log_A))
        log_A_gamma[g] = w
        L[g] = ratio
        L_hat[g] = float(ratio[tail].min())
        tail_inf[g] = np.minimum.accumulate(ratio[::-1])[::-1]

    return GaugeProfile(
        name=seq.name,
        n_grid=n_grid,
        gamma_grid=gammas,
        tail_fraction=tail_fraction,
        log_alpha=la[n_grid],
        log_A=log_A,
        argmax=arg[n_grid],
        log_A_gamma=log_A_gamma,
        L=L,
        L_hat=L_hat,
        tail_inf=tail_inf,
        G_hat=L_hat[gammas[-1]],
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def write_profile_csv(prof: GaugeProfile, path) -> None:
    """Columns n, log_alpha, log_A, then (log_A_gamma_<g>, L_<g>) per gamma."""
    header = ["n", "log_alpha", "log_A"]
    for g in prof.gamma_grid:
        header += [f"log_A_gamma_{g!r}", f"L_{g!r}"]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, n in enumerate(prof.n_grid):
            row = [int(n), _fmt(prof.log_alpha[i]), _fmt(prof.log_A[i])]
            for g in prof.gamma_grid:
                row += [_fmt(prof.log_A_gamma[g][i]), _fmt(prof.L[g][i])]
            w.writerow(row)


@dataclass
class OstrowskiReport:
    radius: float
    gamma_grid: tuple
    tail_inf_log_A: dict
    flagged: dict

    @property
    def has_gaps(self) -> bool:
        return any(self.flagged.values())

    def tail_inf_A(self, gamma: float) -> float:
        return math.exp(self.tail_inf_log_A[gamma])


def ostrowski_gaps(
    seq: CoefficientSequence,
    R: float,
    n_grid: Sequence[int],
    gamma_grid: Sequence[float] = DEFAULT_GAMMAS,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    log_tol: float = 1e-12,
) -> OstrowskiReport:
    """Flag gamma where the tail infimum of A_n(gamma) is strictly below 1/R.

    The comparison is done on logs with slack ``log_tol`` so that a sequence
    sitting exactly on 1/R (e.g. a_k = 2^k, R = 1/2) is not flagged by
    rounding in log|a_k| / k.
    """
    if not R > 0 or math.isinf(R):
        raise DomainError(f"radius must be finite and positive, got {R}")
    n_grid = np.asarray(list(n_grid), dtype=np.int64)
    if n_grid.size == 0 or n_grid[0] < 1 or np.any(np.diff(n_grid) <= 0):
        raise DomainError("n_grid must be nonempty, strictly increasing, positive")
    la = seq.log_alphas(int(n_grid[-1]))
    rmq = _RangeMax(la)
    tail = _tail_mask(n_grid, tail_fraction)
    threshold = -math.log(R)
    gammas = tuple(sorted((float(g) for g in gamma_grid), reverse=True))
    tail_inf, flagged = {}, {}
    for g in gammas:
        lo = np.array([window_start(int(n), g) for n in n_grid], dtype=np.int64)
        w = rmq.query(lo, n_grid)
        inf_w = float(w[tail].min())
        tail_inf[g] = inf_w
        flagged[g] = bool(inf_w < threshold - log_tol)
    return OstrowskiReport(radius=R, gamma_grid=gammas, tail_inf_log_A=tail_inf, flagged=flagged)
