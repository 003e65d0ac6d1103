"""Coefficient sequences in log-polar form.

Every coefficient is carried as ``(log|a_k|, arg a_k)`` because the families of
interest have entries like (2^n)! that no fixed-exponent format can hold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .kernel import MINUS_INFINITY, DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LogCoefficient:
    log_mag: float
    phase: float = 0.0

    def __post_init__(self):
        if self.log_mag == MINUS_INFINITY:
            object.__setattr__(self, "phase", 0.0)
        elif math.isnan(self.log_mag) or self.log_mag == math.inf:
            raise DomainError(f"invalid log magnitude {self.log_mag}")
        else:
            object.__setattr__(self, "phase", normalize_phase(self.phase))

    @property
    def is_zero(self) -> bool:
        return self.log_mag == MINUS_INFINITY

    def value(self) -> complex:
        """Double-precision value; only sensible for moderate magnitudes."""
        if self.is_zero:
            return 0j
        return math.exp(self.log_mag) * complex(math.cos(self.phase), math.sin(self.phase))


ZERO = LogCoefficient(MINUS_INFINITY)


def normalize_phase(phase: float) -> float:
    p = math.fmod(phase, TWO_PI)
    if p < 0:
        p += TWO_PI
    if p >= TWO_PI:
        p = 0.0
    return p


@dataclass(frozen=True)
class CoefficientSequence:
    """A pure map k -> LogCoefficient plus declared metadata.

    ``declared_radius``/``declared_gauge`` are ``None`` when unknown.
    ``shift`` records how many leading zero coefficients were stripped
    from the sequence this one was derived from.
    """

    name: str
    generator: Callable[[int], LogCoefficient] = field(repr=False, compare=False)
    declared_radius: Optional[float] = None
    declared_gauge: Optional[float] = None
    shift: int = 0

    def __call__(self, k: int) -> LogCoefficient:
        if k < 0:
            raise DomainError(f"coefficient index must be >= 0, got {k}")
        return self.generator(k)

    def log_mags(self, kmax: int) -> np.ndarray:
        """log|a_k| for k = 0..kmax as a float array."""
        return np.array([self.generator(k).log_mag for k in range(kmax + 1)], dtype=float)

    def log_alphas(self, kmax: int) -> np.ndarray:
        """log alpha_k = log|a_k|/k for k = 0..kmax; entry 0 is -inf by convention."""
        lm = self.log_mags(kmax)
        out = np.full(kmax + 1, MINUS_INFINITY)
        k = np.arange(1, kmax + 1)
        out[1:] = lm[1:] / k
        return out


def _integer_root(m: int, e: int) -> Optional[int]:
    """r with r**e == m, else None."""
    if m < 0:
        return None
    if m in (0, 1):
        return m
    r = int(round(m ** (1.0 / e)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**e == m:
            return cand
    return None


def _is_power_of(m: int, base: int) -> bool:
    if m < 1:
        return False
    while m % base == 0:
        m //= base
    return m == 1


def log_factorial(m: int) -> float:
    return math.lgamma(m + 1.0)


def family_lacunary(rho: int) -> CoefficientSequence:
    """a_m = (rho^n)! at m = rho^n (n >= 0), zero elsewhere."""
    if int(rho) != rho or rho < 2:
        raise DomainError(f"rho must be an integer >= 2, got {rho}")
    rho = int(rho)

    @lru_cache(maxsize=None)
    def gen(m: int) -> LogCoefficient:
        if _is_power_of(m, rho):
            return LogCoefficient(log_factorial(m))
        return ZERO

    return CoefficientSequence(f"lacunary(rho={rho})", gen, declared_radius=0.0, declared_gauge=0.0)


def family_dense(kexp: int) -> CoefficientSequence:
    """a_m = (n^kexp)! at m = n^kexp (n >= 0), zero elsewhere."""
    if int(kexp) != kexp or kexp < 1:
        raise DomainError(f"kexp must be an integer >= 1, got {kexp}")
    kexp = int(kexp)

    @lru_cache(maxsize=None)
    def gen(m: int) -> LogCoefficient:
        if _integer_root(m, kexp) is not None:
            return LogCoefficient(log_factorial(m))
        return ZERO

    return CoefficientSequence(f"dense(kexp={kexp})", gen, declared_radius=0.0, declared_gauge=1.0)


def family_gauge_t(t: float) -> CoefficientSequence:
    """a_n = n^n on powers of two (2^0 = 1 included), else 1 + (t n + sqrt n)^n.

    At n = 0 the second branch reads 1 + 0^0 = 2.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")

    def gen(n: int) -> LogCoefficient:
        if n >= 1 and n & (n - 1) == 0:
            return LogCoefficient(n * math.log(n))
        if n == 0:
            return LogCoefficient(math.log(2.0))
        x = t * n + math.sqrt(n)
        lx = n * math.log(x)
        return LogCoefficient(lx + math.log1p(math.exp(-lx)))

    return CoefficientSequence(f"gauge_t(t={t})", gen, declared_radius=0.0, declared_gauge=t)


def family_power(p: float) -> CoefficientSequence:
    """a_n = n^{p n}, a_0 = 1; alpha_n = n^p exactly."""
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")

    def gen(n: int) -> LogCoefficient:
        if n == 0:
            return LogCoefficient(0.0)
        return LogCoefficient(p * n * math.log(n))

    return CoefficientSequence(f"power(p={p})", gen, declared_radius=0.0, declared_gauge=1.0)


def family_geometric(q: float = 1.0) -> CoefficientSequence:
    """a_k = q^k, radius of convergence 1/q; q = 1 gives the sections of 1/(1-z)."""
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")
    lq = math.log(q)

    def gen(k: int) -> LogCoefficient:
        return LogCoefficient(k * lq)

    return CoefficientSequence(f"geometric(q={q})", gen, declared_radius=1.0 / q)


def from_records(name: str, records: dict, declared_radius=None, declared_gauge=None) -> CoefficientSequence:
    """Sequence backed by ``{k: LogCoefficient}``; missing indices are zeros."""
    table = dict(records)

    def gen(k: int) -> LogCoefficient:
        return table.get(k, ZERO)

    return CoefficientSequence(name, gen, declared_radius=declared_radius, declared_gauge=declared_gauge)


class CoefficientFileError(ValueError):
    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


def _parse_float(tok: str) -> float:
    if tok.lower() == "-inf":
        return MINUS_INFINITY
    return float(tok)


def family_from_file(path) -> CoefficientSequence:
    """Read ``k log_mag phase`` records (``#`` comments, strictly increasing k)."""
    path = Path(path)
    records: dict[int, LogCoefficient] = {}
    last = -1
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) != 3:
                raise CoefficientFileError(path, lineno, f"expected 3 fields, got {len(toks)}")
            try:
                k = int(toks[0])
                lm = _parse_float(toks[1])
                ph = float(toks[2])
            except ValueError as exc:
                raise CoefficientFileError(path, lineno, str(exc)) from None
            if k < 0:
                raise CoefficientFileError(path, lineno, f"negative index {k}")
            if k in records:
                raise CoefficientFileError(path, lineno, f"duplicate index {k}")
            if k <= last:
                raise CoefficientFileError(path, lineno, f"index {k} not strictly increasing")
            try:
                records[k] = LogCoefficient(lm, ph)
            except DomainError as exc:
                raise CoefficientFileError(path, lineno, str(exc)) from None
            last = k
    return from_records(f"file({path.name})", records)


def write_coefficient_file(path, seq: CoefficientSequence, kmax: int, skip_zeros: bool = True) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"# {seq.name}\n# k log_mag phase\n")
        for k in range(kmax + 1):
            c = seq(k)
            if c.is_zero and skip_zeros:
                continue
            lm = "-inf" if c.is_zero else repr(c.log_mag)
            fh.write(f"{k} {lm} {c.phase!r}\n")


def alpha(seq: CoefficientSequence, k: int) -> float:
    """|a_k|^{1/k}."""
    if k < 1:
        raise DomainError(f"alpha is defined for k >= 1, got {k}")
    c = seq(k)
    if c.is_zero:
        return 0.0
    return math.exp(c.log_mag / k)


FAMILIES = {
    "lacunary": (family_lacunary, {"rho": int}),
    "dense": (family_dense, {"kexp": int}),
    "gauge_t": (family_gauge_t, {"t": float}),
    "power": (family_power, {"p": float}),
    "geometric": (family_geometric, {"q": float}),
}


def make_family(name: str, **params) -> CoefficientSequence:
    """Build a named family; ``params`` are coerced to the family's types."""
    try:
        factory, schema = FAMILIES[name]
    except KeyError:
        raise DomainError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    unknown = set(params) - set(schema)
    if unknown:
        raise DomainError(f"family {name!r} takes {sorted(schema)}, got unexpected {sorted(unknown)}")
    missing = set(schema) - set(params)
    if missing and name != "geometric":
        raise DomainError(f"family {name!r} needs parameters {sorted(missing)}")
    kwargs = {}
    for key, typ in schema.items():
        if key in params:
            try:
                val = float(params[key])
            except (TypeError, ValueError):
                raise DomainError(f"parameter {key}={params[key]!r} is not a number") from None
            if typ is int:
                if val != int(val):
                    raise DomainError(f"parameter {key} must be an integer, got {params[key]!r}")
                val = int(val)
            kwargs[key] = val
    return factory(**kwargs)
