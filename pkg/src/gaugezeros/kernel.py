"""Numeric substrate: extended-exponent multiprecision numbers and log-domain helpers.

Section coefficients of divergent series span thousands of orders of
magnitude, so every high-precision quantity is a ``gmpy2.mpfr``/``gmpy2.mpc``
evaluated inside a context with the widest exponent range MPFR allows.
Precision is always passed in explicitly; nothing here reads a global
default except as a keyword default.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

DEFAULT_PRECISION = 128
DEFAULT_ROOT_TOL = 1e-20

MINUS_INFINITY = float("-inf")

_EMAX = gmpy2.get_emax_max()
_EMIN = gmpy2.get_emin_min()


def _probe_binary_exponent() -> int:
    # some builds saturate well below get_emax_max(); find the real ceiling
    with gmpy2.context(precision=8, emax=_EMAX, emin=_EMIN):
        lo, hi = 1, 1 << 62
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if gmpy2.is_finite(gmpy2.mul_2exp(mpfr(1), mid)):
                lo = mid
            else:
                hi = mid
    return lo


BINARY_EXPONENT_LIMIT = _probe_binary_exponent()
# largest |log x| safely representable, with 1% headroom for intermediate products
LOG_MAGNITUDE_LIMIT = 0.99 * BINARY_EXPONENT_LIMIT * math.log(2)


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NumericFailure(ArithmeticError):
    """A numeric procedure could not deliver a result meeting its contract."""


class NoRootError(NumericFailure):
    pass


class ExponentOverflowError(NumericFailure, OverflowError):
    pass


def big_context(precision: int = DEFAULT_PRECISION):
    """Context manager: ``precision`` mantissa bits, maximal exponent range."""
    if precision < 2:
        raise DomainError(f"precision must be >= 2 bits, got {precision}")
    return gmpy2.context(precision=precision, emax=_EMAX, emin=_EMIN)


def big_real(x, precision: int = DEFAULT_PRECISION) -> mpfr:
    with big_context(precision):
        return mpfr(x)


def big_complex(x, precision: int = DEFAULT_PRECISION) -> mpc:
    with big_context(precision):
        return mpc(x)


def from_log_polar(log_mag, phase: float = 0.0, precision: int = DEFAULT_PRECISION) -> mpc:
    """exp(log_mag) * e^{i phase}; exact zero for log_mag = -inf."""
    with big_context(precision):
        lm = mpfr(log_mag)
        if gmpy2.is_infinite(lm) and lm < 0:
            return mpc(0)
        mag = gmpy2.exp(lm)
        if gmpy2.is_infinite(mag):
            raise ExponentOverflowError(f"exp({log_mag}) exceeds the exponent range")
        if phase == 0:
            return mpc(mag)
        ph = mpfr(phase)
        return mpc(mag * gmpy2.cos(ph), mag * gmpy2.sin(ph))


def log_abs(z, precision: int = DEFAULT_PRECISION) -> mpfr:
    """Natural log of |z| at ``precision``; -inf for zero."""
    with big_context(precision):
        a = abs(mpc(z))
        if a == 0:
            return mpfr("-inf")
        return gmpy2.log(a)


def to_decimal(x, precision: int = DEFAULT_PRECISION) -> str:
    """Decimal string that parses back to the same value at ``precision`` bits."""
    with big_context(precision):
        x = mpfr(x)
        if not gmpy2.is_finite(x):
            return str(x)
        digits = int(math.ceil(precision * math.log10(2))) + 1
        mant, exp, _ = x.digits(10, digits)
        sign = "-" if mant.startswith("-") else ""
        mant = mant.lstrip("-")
        return f"{sign}0.{mant}e{exp}"


def from_decimal(s: str, precision: int = DEFAULT_PRECISION) -> mpfr:
    with big_context(precision):
        return mpfr(s)


def log_max(*values: float) -> float:
    """Maximum in the extended log domain; MINUS_INFINITY is the identity."""
    out = MINUS_INFINITY
    for v in values:
        if v > out:
            out = v
    return out


def log_sum_exp(values: Iterable) -> mpfr:
    """log(sum exp(v)) at the current context precision, skipping -inf terms."""
    vals = [v for v in values if not (gmpy2.is_infinite(v) and v < 0)]
    if not vals:
        return mpfr("-inf")
    top = max(vals)
    return top + gmpy2.log(gmpy2.fsum(gmpy2.exp(v - top) for v in vals))


def entropy(x: float) -> float:
    """Binary entropy in nats, with 0*log(1/0) = 0."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"entropy needs 0 <= x <= 1, got {x}")
    out = 0.0
    if 0.0 < x:
        out -= x * math.log(x)
    if x < 1.0:
        out -= (1.0 - x) * math.log1p(-x)
    return out


def log_binomial_upper(n: int, k: int) -> float:
    """n*H(k/n), an upper bound for log C(n, k)."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not 0 <= k <= n:
        raise DomainError(f"k must lie in [0, {n}], got {k}")
    return n * entropy(k / n)


def positive_root_log(
    log_lhs,
    lhs_degree: int,
    rhs_terms: Sequence[tuple],
    rel_tol: float = DEFAULT_ROOT_TOL,
    precision: int = DEFAULT_PRECISION,
) -> mpfr:
    """Log of the unique positive root of a*x^d = sum_j c_j x^{e_j}.

    Inputs are ``log a`` and pairs ``(log c_j, e_j)``; terms with
    ``log c_j = -inf`` are dropped. All ``e_j`` must lie on the same side of
    ``d`` (one sign change, so Descartes gives a unique positive root).

    The equation is solved for u = log x as g(u) = log a + d*u - LSE_j(log c_j + e_j*u) = 0,
    which is strictly monotone. The starting bracket comes from "every term is at
    most the left side" (one end) and "some term is at least 1/N of it" (the other).
    """
    with big_context(precision + 16):
        la = mpfr(log_lhs)
        if not gmpy2.is_finite(la):
            raise DomainError("left-hand coefficient must be finite and nonzero")
        terms = []
        for lc, e in rhs_terms:
            lc = mpfr(lc)
            if gmpy2.is_infinite(lc) and lc < 0:
                continue
            if not gmpy2.is_finite(lc):
                raise DomainError(f"non-finite right-hand coefficient log {lc}")
            if e == lhs_degree:
                raise DomainError("right-hand degree equal to left-hand degree")
            terms.append((lc, int(e)))
        if not terms:
            raise NoRootError("all right-hand coefficients vanish")
        sides = {e < lhs_degree for _, e in terms}
        if len(sides) != 1:
            raise DomainError("right-hand degrees straddle the left-hand degree")
        below = sides.pop()

        d = lhs_degree
        log_n = gmpy2.log(mpfr(len(terms)))
        ell = [(lc - la, d - e) for lc, e in terms]
        if below:
            lo = max(l / delta for l, delta in ell)
            hi = max((l + log_n) / delta for l, delta in ell)
        else:
            lo = min((l + log_n) / delta for l, delta in ell)
            hi = min(l / delta for l, delta in ell)
        if not (gmpy2.is_finite(lo) and gmpy2.is_finite(hi)):
            raise ExponentOverflowError("could not bracket the positive root")
        pad = (abs(lo) + abs(hi) + 1) * mpfr(2) ** (-precision)
        lo, hi = lo - pad, hi + pad

        def g_and_slope(u):
            ex = [lc + e * u for lc, e in terms]
            top = max(ex)
            w = [gmpy2.exp(x - top) for x in ex]
            s = gmpy2.fsum(w)
            g = la + d * u - (top + gmpy2.log(s))
            mean_e = gmpy2.fsum(wi * e for wi, (_, e) in zip(w, terms)) / s
            return g, d - mean_e

        increasing = below
        target = mpfr(rel_tol) / 4
        floor_width = (abs(lo) + abs(hi) + 1) * mpfr(2) ** (-(precision + 8))
        u = (lo + hi) / 2
        for _ in range(1000):
            g, slope = g_and_slope(u)
            if abs(g) <= target:
                break
            if (g > 0) == increasing:
                hi = u
            else:
                lo = u
            if hi - lo <= floor_width:
                break
            step = u - g / slope
            u = step if lo < step < hi else (lo + hi) / 2
        else:
            raise NumericFailure("positive_root did not converge")
        # two safeguarded Newton steps take the root from rel_tol to working precision
        for _ in range(2):
            g, slope = g_and_slope(u)
            step = u - g / slope
            if lo <= step <= hi:
                u = step
    with big_context(precision):
        return +u


def positive_root(
    lhs_coeff,
    lhs_degree: int,
    rhs_terms: Sequence[tuple],
    rel_tol: float = DEFAULT_ROOT_TOL,
    precision: int = DEFAULT_PRECISION,
) -> mpfr:
    """Unique positive root of a*x^d = sum_j c_j x^{e_j} (a > 0, c_j >= 0)."""
    with big_context(precision + 16):
        a = mpfr(lhs_coeff)
        if not a > 0:
            raise DomainError(f"left-hand coefficient must be positive, got {lhs_coeff}")
        logs = []
        for c, e in rhs_terms:
            c = mpfr(c)
            if c < 0:
                raise DomainError(f"right-hand coefficients must be >= 0, got {c}")
            logs.append((gmpy2.log(c) if c > 0 else mpfr("-inf"), e))
        la = gmpy2.log(a)
    u = positive_root_log(la, lhs_degree, logs, rel_tol, precision)
    with big_context(precision):
        x = gmpy2.exp(u)
        if gmpy2.is_infinite(x) or x == 0:
            raise ExponentOverflowError("positive root outside the exponent range")
        return x
