"""Zero counting measures on the Riemann sphere and equidistribution diagnostics.

Masses are exact rationals (counts over the nominal n). Angular statistics
skip zeros sitting exactly at the origin, whose argument is undefined.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .kernel import DomainError, big_context
from .roots import SphericalRootSet, eval_sparse, sparse_terms
from .sections import Mode, NormalizedSection

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
N_MOMENTS = 8


@dataclass
class ZeroCountingMeasure:
    """Atoms of weight 1/n at the finite zeros; infinity carries the rest.

    The first ``origin_stripped`` atoms are the origin zeros divided out
    before normalization.
    """

    n: int
    moduli: np.ndarray
    angles: np.ndarray
    infinity_count: int
    origin_stripped: int = 0

    def __post_init__(self):
        if len(self.moduli) + self.infinity_count != self.n:
            raise DomainError(
                f"measure does not conserve count: {len(self.moduli)} finite + "
                f"{self.infinity_count} at infinity != n = {self.n}"
            )

    @property
    def infinity_mass(self) -> Fraction:
        return Fraction(self.infinity_count, self.n)

    @property
    def total_mass(self) -> Fraction:
        return Fraction(len(self.moduli), self.n) + self.infinity_mass

    @classmethod
    def from_points(cls, points: Sequence[complex], n: Optional[int] = None, origin_stripped: int = 0):
        pts = [complex(p) for p in points]
        n = len(pts) if n is None else n
        mod = np.abs(np.array(pts, dtype=complex)) if pts else np.zeros(0)
        ang = np.mod(np.angle(np.array(pts, dtype=complex)), 2 * math.pi) if pts else np.zeros(0)
        ang = np.where(mod == 0, np.nan, ang)
        return cls(n=n, moduli=mod, angles=ang, infinity_count=n - len(pts), origin_stripped=origin_stripped)


def measure_from_roots(rootset: SphericalRootSet) -> ZeroCountingMeasure:
    with big_context(rootset.precision):
        mod = np.array([float(abs(mpc(w))) for w in rootset.finite_roots], dtype=float)
        ang = np.array(
            [
                float(gmpy2.atan2(mpc(w).imag, mpc(w).real)) if mpc(w) != 0 else float("nan")
                for w in rootset.finite_roots
            ],
            dtype=float,
        )
    ang = np.mod(ang, 2 * math.pi)
    # fmod can return exactly 2*pi for tiny negative angles
    ang = np.where(ang >= 2 * math.pi, 0.0, ang)
    return ZeroCountingMeasure(
        n=rootset.nominal_n,
        moduli=mod,
        angles=ang,
        infinity_count=rootset.infinity_count,
        origin_stripped=rootset.origin_stripped,
    )


# closed sets are closed up to this relative slack, so |w| = 1 + 1 ulp counts as on the circle
BOUNDARY_REL_TOL = 1e-12


def disk_mass(measure: ZeroCountingMeasure, r: float, rel_tol: float = BOUNDARY_REL_TOL) -> Fraction:
    """nu_n of the closed disk of radius r."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    return Fraction(int(np.count_nonzero(measure.moduli <= r * (1 + rel_tol))), measure.n)


def annulus_mass(measure: ZeroCountingMeasure, eps: float, rel_tol: float = BOUNDARY_REL_TOL) -> Fraction:
    inside = (measure.moduli >= (1 - eps) * (1 - rel_tol)) & (measure.moduli <= (1 + eps) * (1 + rel_tol))
    return Fraction(int(np.count_nonzero(inside)), measure.n)


def _unit_angles(measure: ZeroCountingMeasure) -> np.ndarray:
    a = measure.angles[~np.isnan(measure.angles)]
    return np.sort(a / (2 * math.pi))


def star_discrepancy(measure: ZeroCountingMeasure) -> float:
    """Star discrepancy of {arg w / 2pi} over finite nonzero zeros, against the uniform law."""
    x = _unit_angles(measure)
    N = len(x)
    if N == 0:
        raise DomainError("star discrepancy undefined: no finite nonzero zeros")
    i = np.arange(N)
    return float(max(np.max((i + 1) / N - x), np.max(x - i / N)))


def trig_moment(measure: ZeroCountingMeasure, m: int) -> float:
    """|(1/n) sum e^{i m theta}| over finite nonzero zeros; n stays the denominator."""
    if m < 1:
        raise DomainError(f"moment order must be >= 1, got {m}")
    a = measure.angles[~np.isnan(measure.angles)]
    return float(abs(np.exp(1j * m * a).sum()) / measure.n)


def radial_quantiles(measure: ZeroCountingMeasure, qs=QUANTILES) -> tuple:
    if len(measure.moduli) == 0:
        return tuple(float("nan") for _ in qs)
    return tuple(float(v) for v in np.quantile(measure.moduli, qs))


def koksma_consistent(measure: ZeroCountingMeasure) -> bool:
    """Sanity relation |tau_1| <= 2 pi D*; a flag for reports, not a guaranteed bound."""
    return trig_moment(measure, 1) <= 2 * math.pi * star_discrepancy(measure) + 1e-15


@dataclass
class JensenSlack:
    slack: float
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.slack >= -1e-12


def jensen_check(section: NormalizedSection, measure: ZeroCountingMeasure, r: float) -> JensenSlack:
    """(1/n) log((|a_0| + n)/|a_0|) - nu_n(closed disk r) log(1/r) on the stripped section.

    Origin zeros divided out before normalization are excluded and n is the
    stripped index, matching the a_0 != 0 reduction.
    """
    if section.mode is not Mode.MAX_GAUGE:
        raise DomainError("Jensen bound applies to MAX_GAUGE sections only")
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    with big_context(section.precision):
        a0 = abs(mpc(section.a0))
        if a0 == 0:
            raise DomainError("a_0 = 0: strip the origin zeros first")
        n = measure.n - measure.origin_stripped
        local = measure.moduli[measure.origin_stripped:]
        count = int(np.count_nonzero(local <= r * (1 + BOUNDARY_REL_TOL)))
        rhs = gmpy2.log((a0 + n) / a0) / n
        lhs = mpfr(count) / n * gmpy2.log(1 / mpfr(r))
        return JensenSlack(slack=float(rhs - lhs), lhs=float(lhs), rhs=float(rhs))


def circle_max_log(section: NormalizedSection, radius: float, samples: Optional[int] = None) -> float:
    """(1/n) max_j log|p(radius e^{2 pi i j / samples})| for the stored polynomial.

    ``samples`` defaults to 8 x degree and must be at least 4 x degree.
    """
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    deg = section.local_degree
    if deg < 1:
        raise DomainError("section has no positive-degree part")
    if samples is None:
        samples = 8 * deg
    if samples < 4 * deg:
        raise DomainError(f"need at least {4 * deg} samples, got {samples}")
    prec = section.precision + 32
    with big_context(prec):
        terms = sparse_terms([mpc(c) for c in section.trimmed()])
        rad = mpfr(radius)
        two_pi = 2 * gmpy2.const_pi()
        best = mpfr("-inf")
        for j in range(samples):
            t = two_pi * j / samples
            z = rad * mpc(gmpy2.cos(t), gmpy2.sin(t))
            p, _, _ = eval_sparse(terms, z)
            a = abs(p)
            if a > 0:
                lg = gmpy2.log(a)
                if lg > best:
                    best = lg
        return float(best / section.local_n)


def circle_max_root_ratio(section: NormalizedSection, radius: float, samples: Optional[int] = None) -> float:
    """max over |z| = radius of |p(z)|^{1/n} / |z|."""
    return math.exp(circle_max_log(section, radius, samples) - math.log(radius))


@dataclass
class AnnulusCheck:
    fraction: float
    inner: float
    outer: float


def dilcher_rubel_annulus_check(rootset: SphericalRootSet, a0: float, eps: float) -> AnnulusCheck:
    """Fraction of finite zeros in a0/(1+a0) <= |z| <= 2 + eps (LAST_COEFF sections)."""
    if rootset.mode is not Mode.LAST_COEFF:
        raise DomainError("annulus check needs a LAST_COEFF section")
    if not a0 > 0 or not eps > 0:
        raise DomainError("a0 and eps must be positive")
    inner = a0 / (1 + a0)
    outer = 2 + eps
    with big_context(rootset.precision):
        mods = [float(abs(mpc(w))) for w in rootset.finite_roots]
    if not mods:
        return AnnulusCheck(float("nan"), inner, outer)
    inside = sum(1 for m in mods if inner <= m <= outer)
    return AnnulusCheck(inside / len(mods), inner, outer)


@dataclass
class EquidistributionReport:
    n: int
    star_discrepancy: float
    trig_moments: tuple
    radial_quantiles: tuple
    annulus_mass: dict
    disk_mass: dict
    infinity_mass: Fraction
    jensen_slack: dict
    koksma_ok: bool = True
    extra: dict = field(default_factory=dict)

    CSV_HEADER = (
        ["n", "star_discrepancy"]
        + [f"tau_{m}" for m in range(1, N_MOMENTS + 1)]
        + ["q05", "q25", "q50", "q75", "q95"]
        + ["annulus_mass_0.1", "annulus_mass_0.2", "disk_mass_0.5", "disk_mass_0.9"]
        + ["infinity_mass", "jensen_slack_0.5", "jensen_slack_0.9"]
    )

    def csv_row(self) -> list:
        f = lambda x: repr(float(x))  # noqa: E731
        return (
            [self.n, f(self.star_discrepancy)]
            + [f(t) for t in self.trig_moments]
            + [f(q) for q in self.radial_quantiles]
            + [f(self.annulus_mass[0.1]), f(self.annulus_mass[0.2])]
            + [f(self.disk_mass[0.5]), f(self.disk_mass[0.9])]
            + [f(self.infinity_mass), f(self.jensen_slack[0.5]), f(self.jensen_slack[0.9])]
        )


def equidistribution_report(section: NormalizedSection, rootset: SphericalRootSet) -> EquidistributionReport:
    mu = measure_from_roots(rootset)
    try:
        disc = star_discrepancy(mu)
        koksma = koksma_consistent(mu)
    except DomainError:
        disc, koksma = float("nan"), True
    jensen = {}
    for r in (0.5, 0.9):
        if section.mode is Mode.MAX_GAUGE and section.a0 != 0:
            jensen[r] = jensen_check(section, mu, r).slack
        else:
            jensen[r] = float("nan")
    return EquidistributionReport(
        n=rootset.nominal_n,
        star_discrepancy=disc,
        trig_moments=tuple(trig_moment(mu, m) for m in range(1, N_MOMENTS + 1)),
        radial_quantiles=radial_quantiles(mu),
        annulus_mass={e: annulus_mass(mu, e) for e in (0.1, 0.2)},
        disk_mass={r: disk_mass(mu, r) for r in (0.5, 0.9)},
        infinity_mass=mu.infinity_mass,
        jensen_slack=jensen,
        koksma_ok=koksma,
    )
