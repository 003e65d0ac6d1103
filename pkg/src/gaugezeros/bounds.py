"""Coefficient bounds on polynomial zeros: Cauchy, Van Vleck, and the outward radius.

Every bound equation is handed to :func:`kernel.positive_root_log` in
log-scaled form because section coefficients routinely span hundreds of
decades. Coefficients are given ascending, b_0 .. b_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .kernel import (
    DEFAULT_PRECISION,
    DEFAULT_ROOT_TOL,
    DomainError,
    big_context,
    log_binomial_upper,
    positive_root_log,
)

NEG_INF = mpfr("-inf")


def _logs(coeffs, precision):
    with big_context(precision + 16):
        out = []
        for c in coeffs:
            a = abs(mpc(c))
            out.append(gmpy2.log(a) if a != 0 else mpfr("-inf"))
        return out


def _log_comb(n: int, k: int) -> mpfr:
    return gmpy2.log(mpfr(math.comb(n, k)))


def _solve(log_lhs, degree, terms, precision, rel_tol):
    live = [(lc, e) for lc, e in terms if not (gmpy2.is_infinite(lc) and lc < 0)]
    if not live:
        return None
    u = positive_root_log(log_lhs, degree, live, rel_tol, precision)
    with big_context(precision):
        return gmpy2.exp(u)


def _degree(coeffs) -> int:
    n = len(coeffs) - 1
    if n < 1:
        raise DomainError("polynomial must have degree >= 1")
    return n


def cauchy_bound(coeffs: Sequence, precision: int = DEFAULT_PRECISION, rel_tol: float = DEFAULT_ROOT_TOL) -> mpfr:
    """Positive root of |b_n| x^n = sum_{k<n} |b_k| x^k; 0 if all lower terms vanish."""
    n = _degree(coeffs)
    lg = _logs(coeffs, precision)
    if gmpy2.is_infinite(lg[n]):
        raise DomainError("leading coefficient b_n must be nonzero")
    with big_context(precision + 16):
        x = _solve(lg[n], n, [(lg[k], k) for k in range(n)], precision, rel_tol)
    return x if x is not None else big_zero(precision)


def big_zero(precision):
    with big_context(precision):
        return mpfr(0)


def van_vleck_bound(
    coeffs: Sequence, m: int, precision: int = DEFAULT_PRECISION, rel_tol: float = DEFAULT_ROOT_TOL
) -> mpfr:
    """Radius of a closed disk holding at least m zeros.

    Positive root of |b_n| x^n = sum_{j<m} C(n-j-1, m-j-1) |b_j| x^j.
    Returns 0 when the right side vanishes (then b_0 = .. = b_{m-1} = 0 and
    the origin is a zero of multiplicity at least m).
    """
    n = _degree(coeffs)
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, {n}], got {m}")
    lg = _logs(coeffs, precision)
    if gmpy2.is_infinite(lg[n]):
        raise DomainError("leading coefficient b_n must be nonzero")
    with big_context(precision + 16):
        terms = [(_log_comb(n - j - 1, m - j - 1) + lg[j], j) for j in range(m)]
        x = _solve(lg[n], n, terms, precision, rel_tol)
    return x if x is not None else big_zero(precision)


def reverse_companion(coeffs: Sequence) -> list:
    """Coefficients of z^n P(1/z)."""
    return list(coeffs)[::-1]


def outward_radius(
    coeffs: Sequence, m: int, precision: int = DEFAULT_PRECISION, rel_tol: float = DEFAULT_ROOT_TOL
) -> mpfr:
    """Radius v with at least m zeros of modulus >= v.

    Positive root of |b_0| = sum_{k=n-m+1}^{n} C(k-1, k-(n-m)-1) |b_k| x^k.
    If every b_k in that window vanishes the result is +inf: the section
    then owes at least m zeros to infinity.
    """
    n = len(coeffs) - 1
    if n < 1:
        raise DomainError("polynomial must have degree >= 1")
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, {n}], got {m}")
    lg = _logs(coeffs, precision)
    if gmpy2.is_infinite(lg[0]):
        raise DomainError("constant coefficient b_0 must be nonzero")
    with big_context(precision + 16):
        terms = [(_log_comb(k - 1, k - (n - m) - 1) + lg[k], k) for k in range(n - m + 1, n + 1)]
        x = _solve(lg[0], 0, terms, precision, rel_tol)
    if x is None:
        with big_context(precision):
            return mpfr("inf")
    return x


@dataclass
class PestCheck:
    holds: bool
    log_slack: float
    lhs: float
    rhs: float


def check_pest(coeffs: Sequence, m: int, v, precision: int = DEFAULT_PRECISION, tol: float = 1e-12) -> PestCheck:
    """log|b_0| <= n H((m-1)/n) + log max_{n-m+1<=k<=n} |b_k| + n log max(1, v)."""
    n = len(coeffs) - 1
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, {n}], got {m}")
    lg = _logs(coeffs, precision)
    with big_context(precision + 16):
        v = mpfr(v)
        top = max(lg[n - m + 1 : n + 1])
        lhs = lg[0]
        if gmpy2.is_infinite(v):
            rhs = mpfr("inf")
        else:
            rhs = mpfr(log_binomial_upper(n, m - 1)) + top + n * gmpy2.log(max(mpfr(1), v))
        slack = rhs - lhs
    slack_f = float(slack)
    scale = max(1.0, abs(float(lhs)))
    return PestCheck(holds=slack_f >= -tol * scale, log_slack=slack_f, lhs=float(lhs), rhs=float(rhs))


@dataclass
class BoundsRow:
    m: int
    V: float
    v: float
    max1v: float
    pest_slack: float
    pest_holds: bool
    roots_within_V: Optional[int] = None
    roots_outside_v: Optional[int] = None


@dataclass
class BoundsReport:
    degree: int
    cauchy_C: float
    rows: list = field(default_factory=list)

    def van_vleck_V(self) -> dict:
        return {r.m: r.V for r in self.rows}

    def outward_v(self) -> dict:
        return {r.m: r.v for r in self.rows}

    def pest_holds(self) -> dict:
        return {r.m: r.pest_holds for r in self.rows}


def count_within(roots: Iterable, radius, rel: float = 1e-10) -> int:
    r = float(radius) * (1 + rel)
    return sum(1 for w in roots if float(abs(w)) <= r)


def count_outside(roots: Iterable, radius, rel: float = 1e-10) -> int:
    r = float(radius) * (1 - rel)
    return sum(1 for w in roots if float(abs(w)) >= r)


def bounds_report(
    coeffs: Sequence,
    ms: Iterable[int],
    roots: Optional[Sequence] = None,
    precision: int = DEFAULT_PRECISION,
) -> BoundsReport:
    """Cauchy radius plus, for each m, V_m, v_m, the pest check and optional counts."""
    n = _degree(coeffs)
    C = cauchy_bound(coeffs, precision)
    rep = BoundsReport(degree=n, cauchy_C=float(C))
    for m in sorted(set(int(m) for m in ms)):
        if not 1 <= m <= n:
            continue
        V = van_vleck_bound(coeffs, m, precision)
        v = outward_radius(coeffs, m, precision)
        pc = check_pest(coeffs, m, v, precision)
        row = BoundsRow(
            m=m,
            V=float(V),
            v=float(v),
            max1v=max(1.0, float(v)),
            pest_slack=pc.log_slack,
            pest_holds=pc.holds,
        )
        if roots is not None:
            row.roots_within_V = count_within(roots, V)
            row.roots_outside_v = count_outside(roots, v)
        rep.rows.append(row)
    return rep
