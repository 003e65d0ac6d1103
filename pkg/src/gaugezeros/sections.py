"""Normalized sections p_n of a coefficient sequence.

Coefficients are formed in the log domain and only then exponentiated at the
run precision, so a section whose coefficients span e^{-10^4}..1 is built as
reliably as one spanning a few decades.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import gmpy2
from gmpy2 import mpc, mpfr

from .kernel import (
    DEFAULT_PRECISION,
    LOG_MAGNITUDE_LIMIT,
    MINUS_INFINITY,
    DomainError,
    ExponentOverflowError,
    big_context,
    to_decimal,
)
from .series import CoefficientSequence

# log of the smallest positive subnormal double
DOUBLE_UNDERFLOW_LOG = math.log(5e-324)
DEFAULT_STRIP_SCAN = 100_000


class Mode(enum.Enum):
    MAX_GAUGE = "max-gauge"
    LAST_COEFF = "last-coeff"
    NONE = "none"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise DomainError(f"unknown normalization mode {value!r}; use max-gauge, last-coeff or none")


class DegenerateSequenceError(DomainError):
    pass


def strip_origin(seq: CoefficientSequence, scan: int = DEFAULT_STRIP_SCAN):
    """Divide out the zero of f at the origin: returns (f/z^k, k)."""
    for k in range(scan + 1):
        if not seq(k).is_zero:
            break
    else:
        raise DegenerateSequenceError(f"{seq.name}: no nonzero coefficient among k = 0..{scan}")
    if k == 0:
        return seq, 0
    base = seq.generator

    def gen(j: int, _k=k):
        return base(j + _k)

    stripped = CoefficientSequence(
        name=f"{seq.name}/z^{k}",
        generator=gen,
        declared_radius=seq.declared_radius,
        declared_gauge=seq.declared_gauge,
        shift=seq.shift + k,
    )
    return stripped, k


@dataclass
class NormalizedSection:
    """Coefficients c_0..c_{n-shift} of a normalized section.

    ``n`` is the nominal index in the unstripped series; the stored polynomial
    is p_n / z^shift, so ``effective_degree`` (in unstripped indexing) equals
    ``local_degree + origin_multiplicity_stripped``.
    """

    n: int
    mode: Mode
    precision: int
    coefficients: list = field(repr=False)
    log_mags: list = field(repr=False)
    origin_multiplicity_stripped: int = 0
    log_normalizer: float = 0.0
    normalizer_index: int = 0
    name: str = ""

    @property
    def local_n(self) -> int:
        return self.n - self.origin_multiplicity_stripped

    @property
    def local_degree(self) -> int:
        for k in range(len(self.log_mags) - 1, -1, -1):
            if self.log_mags[k] != MINUS_INFINITY:
                return k
        return -1

    @property
    def effective_degree(self) -> int:
        d = self.local_degree
        return d + self.origin_multiplicity_stripped if d >= 0 else -1

    @property
    def dynamic_range(self) -> tuple:
        nz = [x for x in self.log_mags if x != MINUS_INFINITY]
        return (min(nz), max(nz)) if nz else (MINUS_INFINITY, MINUS_INFINITY)

    @property
    def a0(self):
        return self.coefficients[0]

    def trimmed(self) -> list:
        """Coefficients up to the local degree."""
        return self.coefficients[: self.local_degree + 1]


def _exact(x: float) -> Fraction:
    return Fraction(x)


def build(
    seq: CoefficientSequence,
    n: int,
    mode=Mode.MAX_GAUGE,
    precision: int = DEFAULT_PRECISION,
) -> NormalizedSection:
    """Section of index ``n`` (counted in the unstripped series) under ``mode``.

    MAX_GAUGE divides z by A_n = max_{1<=k<=n} alpha_k, LAST_COEFF by alpha_n
    and NONE leaves the coefficients untouched. log|c_k| is formed as
    (j log|a_k| - k log|a_j|) / j with j the normalizing index, which is exact
    up to one rounding and exactly 0 at k = j.
    """
    mode = Mode.parse(mode)
    shift = seq.shift
    m = n - shift
    if m < 1:
        raise DomainError(f"section index {n} leaves local degree {m} < 1 after stripping {shift}")
    coeffs = [seq(k) for k in range(m + 1)]
    lm = [c.log_mag for c in coeffs]

    j = 0
    if mode is Mode.MAX_GAUGE:
        best = None
        for k in range(1, m + 1):
            if lm[k] == MINUS_INFINITY:
                continue
            key = _exact(lm[k]) / k
            if best is None or key > best:
                best, j = key, k
        if best is None:
            raise DomainError(f"MAX_GAUGE normalizer A_{m} vanishes for {seq.name}")
    elif mode is Mode.LAST_COEFF:
        if lm[m] == MINUS_INFINITY:
            raise DomainError(f"LAST_COEFF normalizer alpha_{m} vanishes for {seq.name}")
        j = m

    capacity = LOG_MAGNITUDE_LIMIT
    out, logs = [], []
    with big_context(precision + 32):
        log_aj = mpfr(lm[j]) if j else mpfr(0)
        for k, c in enumerate(coeffs):
            if c.is_zero:
                logs.append(MINUS_INFINITY)
                out.append(None)
                continue
            if j:
                logc = (j * mpfr(lm[k]) - k * log_aj) / j
            else:
                logc = mpfr(lm[k])
            if logc < -capacity or logc > capacity:
                raise ExponentOverflowError(
                    f"log|c_{k}| = {float(logc):.6g} exceeds the exponent capacity at {precision} bits"
                )
            out.append((logc, c.phase))
            logs.append(float(logc))
    with big_context(precision):
        coefficients = []
        for item in out:
            if item is None:
                coefficients.append(mpc(0))
                continue
            logc, ph = item
            mag = gmpy2.exp(logc)
            if ph == 0.0:
                coefficients.append(mpc(mag))
            else:
                coefficients.append(mpc(mag * gmpy2.cos(mpfr(ph)), mag * gmpy2.sin(mpfr(ph))))

    return NormalizedSection(
        n=n,
        mode=mode,
        precision=precision,
        coefficients=coefficients,
        log_mags=logs,
        origin_multiplicity_stripped=shift,
        log_normalizer=(lm[j] / j) if j else 0.0,
        normalizer_index=j,
        name=seq.name,
    )


def from_coefficients(coeffs, precision: int = DEFAULT_PRECISION, n: int | None = None, name: str = "explicit"):
    """Wrap explicit c_0..c_d (ascending) as a mode-NONE section of nominal index ``n``."""
    with big_context(precision):
        cs = [mpc(c) for c in coeffs]
        logs = [MINUS_INFINITY if c == 0 else float(gmpy2.log(abs(c))) for c in cs]
    if n is None:
        n = len(cs) - 1
    if n < len(cs) - 1:
        cs, logs = cs[: n + 1], logs[: n + 1]
    return NormalizedSection(
        n=n, mode=Mode.NONE, precision=precision, coefficients=cs, log_mags=logs, name=name
    )


def dynamic_range_report(section: NormalizedSection):
    """(min log|c_k|, max log|c_k|, number of nonzero c_k that flush to 0 in float64)."""
    lo, hi = section.dynamic_range
    under = sum(1 for x in section.log_mags if x != MINUS_INFINITY and x < DOUBLE_UNDERFLOW_LOG)
    return lo, hi, under


def section_text(section: NormalizedSection) -> str:
    lines = [
        f"# mode={section.mode.value} precision={section.precision} n={section.n} "
        f"origin={section.origin_multiplicity_stripped} name={section.name.replace(' ', '')}",
        "# k Re(c_k) Im(c_k) log|c_k|",
    ]
    for k, (c, lg) in enumerate(zip(section.coefficients, section.log_mags)):
        re = to_decimal(c.real, section.precision)
        im = to_decimal(c.imag, section.precision)
        lines.append(f"{k} {re} {im} {'-inf' if lg == MINUS_INFINITY else repr(lg)}")
    return "\n".join(lines) + "\n"


def write_section(section: NormalizedSection, path) -> None:
    Path(path).write_text(section_text(section), encoding="utf-8")


def read_section(path) -> NormalizedSection:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = {}
    for tok in lines[0].lstrip("#").split():
        if "=" in tok:
            key, val = tok.split("=", 1)
            meta[key] = val
    precision = int(meta["precision"])
    coeffs, logs = [], []
    with big_context(precision):
        for line in lines[1:]:
            if not line.strip() or line.startswith("#"):
                continue
            k, re, im, lg = line.split()
            coeffs.append(mpc(mpfr(re), mpfr(im)))
            logs.append(MINUS_INFINITY if lg == "-inf" else float(lg))
    return NormalizedSection(
        n=int(meta["n"]),
        mode=Mode.parse(meta["mode"]),
        precision=precision,
        coefficients=coeffs,
        log_mags=logs,
        origin_multiplicity_stripped=int(meta.get("origin", 0)),
        name=meta.get("name", ""),
    )
