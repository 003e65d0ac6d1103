"""All zeros of a normalized section, on the Riemann sphere.

The main solver is Aberth-Ehrlich simultaneous iteration. A vectorized
float64 pass gets close when the coefficient range allows it; the
multiprecision pass then finishes at the run precision. The oracle is
deliberately a different method (companion eigenvalues, then Newton
polishing of each root on its own).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from statistics import median
from typing import Optional, Sequence

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpc, mpfr
from scipy.optimize import linear_sum_assignment

from .kernel import DomainError, NumericFailure, big_context, to_decimal
from .sections import Mode, NormalizedSection

DEFAULT_MAX_ITER = 200
DEFAULT_REL_TOL = 1e-25
ORACLE_MAX_DEGREE = 32

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# float64 pre-pass only when log|c| spans less than this
_DOUBLE_RANGE = 600.0


class RootFindingError(NumericFailure):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or []


@dataclass
class ResidualStats:
    max: float
    median: float
    values: list = field(default_factory=list, repr=False)


@dataclass
class SphericalRootSet:
    """Finite zeros (stripped-origin zeros first) plus the count at infinity."""

    finite_roots: list
    infinity_count: int
    nominal_n: int
    origin_stripped: int = 0
    mode: Optional[Mode] = None
    precision: int = 128
    residual_stats: Optional[ResidualStats] = None
    iterations: int = 0
    method: str = "aberth"

    @property
    def local_roots(self) -> list:
        """Zeros of the stored (origin-stripped) polynomial."""
        return self.finite_roots[self.origin_stripped:]

    def total(self) -> int:
        return len(self.finite_roots) + self.infinity_count


def _split_origin(coeffs: list):
    z0 = 0
    while z0 < len(coeffs) and coeffs[z0] == 0:
        z0 += 1
    return z0, coeffs[z0:]


def newton_polygon_guesses(log_mags: Sequence[float]) -> list:
    """Initial (radius, angle) pairs from the upper hull of (k, log|c_k|).

    Each hull edge from k_i to k_{i+1} contributes k_{i+1} - k_i starts on
    the circle of radius exp(-slope), evenly spaced and rotated by a
    golden-ratio offset per edge.
    """
    pts = [(k, v) for k, v in enumerate(log_mags) if v != float("-inf")]
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or below the chord hull[-2] -> p
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    out = []
    for i in range(len(hull) - 1):
        (k0, v0), (k1, v1) = hull[i], hull[i + 1]
        cnt = k1 - k0
        log_r = (v0 - v1) / cnt
        offset = ((i + 1) * GOLDEN) % 1.0
        for j in range(cnt):
            theta = 2.0 * math.pi * ((j + offset) / cnt) + 0.4
            out.append((log_r, theta))
    return out


def _initial_points(log_mags, precision):
    guesses = newton_polygon_guesses(log_mags)
    with big_context(precision):
        return [gmpy2.exp(mpfr(lr)) * mpc(gmpy2.cos(mpfr(t)), gmpy2.sin(mpfr(t))) for lr, t in guesses]


def _double_ratio(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z) in float64, using the reversed polynomial where |z| > 1."""
    d = len(c) - 1
    out = np.empty_like(z)
    inner = np.abs(z) <= 1.0
    if inner.any():
        x = z[inner]
        p = np.full_like(x, c[-1])
        dp = np.zeros_like(x)
        for a in c[-2::-1]:
            dp = dp * x + p
            p = p * x + a
        out[inner] = p / dp
    outer = ~inner
    if outer.any():
        x = z[outer]
        w = 1.0 / x
        q = np.full_like(w, c[0])
        dq = np.zeros_like(w)
        for a in c[1:]:
            dq = dq * w + q
            q = q * w + a
        out[outer] = x * q / (d * q - w * dq)
    return out


def _aberth_double(c: np.ndarray, z: np.ndarray, max_iter: int = 120, tol: float = 1e-14):
    n = len(z)
    eye = np.eye(n, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            ratio = _double_ratio(c, z)
            diff = z[:, None] - z[None, :]
            diff[eye] = 1.0
            inv = 1.0 / diff
            inv[eye] = 0.0
            delta = ratio / (1.0 - ratio * inv.sum(axis=1))
            if not np.all(np.isfinite(delta)):
                return None
            z = z - delta
            if np.all(np.abs(delta) <= tol * np.abs(z)):
                break
    return z


def eval_sparse(terms, z):
    """p(z), p'(z) and sum |c_k||z|^k by Horner over sparse (k, c_k), descending k."""
    k_prev, c_top = terms[0]
    p = c_top
    dp = mpc(0)
    az = abs(z)
    s = abs(c_top)
    for k, a in terms[1:]:
        g = k_prev - k
        if g == 1:
            dp = dp * z + p
            p = p * z + a
            s = s * az + abs(a)
        else:
            zg1 = z ** (g - 1)
            zg = zg1 * z
            dp = dp * zg + g * p * zg1
            p = p * zg + a
            s = s * az**g + abs(a)
        k_prev = k
    if k_prev > 0:
        zg1 = z ** (k_prev - 1)
        dp = dp * zg1 * z + k_prev * p * zg1
        p = p * zg1 * z
        s = s * az**k_prev
    return p, dp, s


def sparse_terms(coeffs):
    return [(k, c) for k, c in reversed(list(enumerate(coeffs))) if c != 0]


def _aberth_mp(coeffs, z, max_iter, rel_tol, precision):
    d = len(coeffs) - 1
    terms = sparse_terms(coeffs)
    eps_level = mpfr(4 * d) * mpfr(2) ** (-precision)
    tol = mpfr(rel_tol)
    z = list(z)
    active = list(range(d))
    sweeps = 0
    last_res = [mpfr(0)] * d
    while active and sweeps < max_iter:
        sweeps += 1
        updates = []
        for i in active:
            zi = z[i]
            p, dp, s = eval_sparse(terms, zi)
            res = abs(p) / s if s != 0 else mpfr(0)
            last_res[i] = res
            acc = mpc(0)
            for j in range(d):
                if j != i:
                    acc += 1 / (zi - z[j])
            if dp == 0:
                # stationary point of p: nudge off it
                updates.append((i, zi * mpfr("1e-3") + mpfr("1e-3"), False))
                continue
            ratio = p / dp
            delta = ratio / (1 - ratio * acc)
            mag = abs(zi)
            if abs(delta) <= tol * mag:
                updates.append((i, delta, True))
            elif res <= eps_level:
                updates.append((i, None, True))
            else:
                updates.append((i, delta, False))
        still = []
        for i, delta, done in updates:
            if delta is not None:
                z[i] = z[i] - delta
            if not done:
                still.append(i)
        active = still
    if active:
        raise RootFindingError(
            f"Aberth iteration did not converge for {len(active)} of {d} roots in {max_iter} sweeps",
            residuals=[float(last_res[i]) for i in active],
        )
    return z, sweeps


def find_roots(
    section: NormalizedSection,
    max_iter: int = DEFAULT_MAX_ITER,
    rel_tol: float = DEFAULT_REL_TOL,
) -> SphericalRootSet:
    """Zeros of ``section`` at its precision; degree deficit is assigned to infinity."""
    precision = section.precision
    with big_context(precision):
        coeffs = [mpc(c) for c in section.trimmed()]
        z0, poly = _split_origin(coeffs)
        d = len(poly) - 1
        if d + z0 < 1:
            raise DomainError("section has degree 0: no finite zeros to find")
        roots: list = []
        sweeps = 0
        if d == 1:
            roots = [-poly[0] / poly[1]]
        elif d > 1:
            logmags = [float("-inf") if c == 0 else float(gmpy2.log(abs(c))) for c in poly]
            start = _initial_points(logmags, precision)
            finite = [v for v in logmags if v != float("-inf")]
            top, bottom = max(finite), min(finite)
            if top - bottom < _DOUBLE_RANGE:
                scale = mpfr(top)
                cd = np.array([complex(c / gmpy2.exp(scale)) for c in poly])
                z_d = np.array([complex(x) for x in start])
                refined = _aberth_double(cd, z_d)
                if refined is not None and np.all(np.isfinite(refined)) and np.all(refined != 0):
                    start = [mpc(complex(x)) for x in refined]
            roots, sweeps = _aberth_mp(poly, start, max_iter, rel_tol, precision)
        finite_roots = [mpc(0)] * (section.origin_multiplicity_stripped + z0) + roots
    out = SphericalRootSet(
        finite_roots=finite_roots,
        infinity_count=section.n - section.effective_degree,
        nominal_n=section.n,
        origin_stripped=section.origin_multiplicity_stripped,
        mode=section.mode,
        precision=precision,
        iterations=sweeps,
    )
    out.residual_stats = residual_check(section, out)
    return out


def _newton_polish(poly, z, precision, max_iter=200):
    terms = sparse_terms(poly)
    tol = mpfr(2) ** (-(precision - 8))
    eps_level = mpfr(4 * len(poly)) * mpfr(2) ** (-precision)
    for _ in range(max_iter):
        p, dp, s = eval_sparse(terms, z)
        if p == 0:
            return z, True
        if dp == 0:
            return z, False
        delta = p / dp
        z = z - delta
        if abs(delta) <= tol * abs(z) or abs(p) <= eps_level * s:
            return z, True
    return z, False


def _companion_eigs_double(poly_scaled) -> np.ndarray:
    c = np.array([complex(x) for x in poly_scaled])
    d = len(c) - 1
    M = np.zeros((d, d), dtype=complex)
    M[1:, :-1] = np.eye(d - 1)
    M[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(M)


def _companion_eigs_mp(poly_scaled, precision):
    d = len(poly_scaled) - 1
    with mpmath.workprec(precision):
        M = mpmath.zeros(d, d)
        for i in range(1, d):
            M[i, i - 1] = 1
        lead = mpmath.mpc(mpmath.mpf(str(poly_scaled[-1].real)), mpmath.mpf(str(poly_scaled[-1].imag)))
        for i in range(d):
            ci = mpmath.mpc(mpmath.mpf(str(poly_scaled[i].real)), mpmath.mpf(str(poly_scaled[i].imag)))
            M[i, d - 1] = -ci / lead
        ev = mpmath.eig(M, left=False, right=False)
        return [mpc(mpfr(str(e.real)), mpfr(str(e.imag))) for e in ev]


def _well_separated(roots) -> bool:
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            scale = max(abs(roots[i]), abs(roots[j]))
            if abs(roots[i] - roots[j]) <= mpfr("1e-12") * scale:
                return False
    return True


def oracle_roots(section: NormalizedSection) -> SphericalRootSet:
    """Independent zeros for degree <= 32: companion eigenvalues + per-root Newton.

    The variable is rescaled so that |c_0| = |c_d| before forming the
    companion matrix. If polished roots collide or Newton stalls, the
    eigenvalues are recomputed at full precision with mpmath.
    """
    precision = section.precision
    with big_context(precision):
        coeffs = [mpc(c) for c in section.trimmed()]
        z0, poly = _split_origin(coeffs)
        d = len(poly) - 1
        if d > ORACLE_MAX_DEGREE:
            raise DomainError(f"oracle limited to degree {ORACLE_MAX_DEGREE}, got {d}")
        if d + z0 < 1:
            raise DomainError("section has degree 0")
        roots: list = []
        if d >= 1:
            log_s = (gmpy2.log(abs(poly[0])) - gmpy2.log(abs(poly[-1]))) / d
            s = gmpy2.exp(log_s)
            scaled = [c * s**k for k, c in enumerate(poly)]
            top = max(abs(c) for c in scaled)
            scaled = [c / top for c in scaled]
            ok = False
            try:
                ys = _companion_eigs_double(scaled)
                if np.all(np.isfinite(ys)):
                    polished = [_newton_polish(poly, mpc(complex(y)) * s, precision) for y in ys]
                    roots = [r for r, _ in polished]
                    ok = all(flag for _, flag in polished) and _well_separated(roots)
            except np.linalg.LinAlgError:
                ok = False
            if not ok:
                ys = _companion_eigs_mp(scaled, precision + 32)
                polished = [_newton_polish(poly, y * s, precision) for y in ys]
                roots = [r for r, _ in polished]
        finite_roots = [mpc(0)] * (section.origin_multiplicity_stripped + z0) + roots
    out = SphericalRootSet(
        finite_roots=finite_roots,
        infinity_count=section.n - section.effective_degree,
        nominal_n=section.n,
        origin_stripped=section.origin_multiplicity_stripped,
        mode=section.mode,
        precision=precision,
        method="oracle",
    )
    out.residual_stats = residual_check(section, out)
    return out


def residual_check(section: NormalizedSection, roots) -> ResidualStats:
    """|p(w)| / sum |c_k||w|^k over the zeros of the stored polynomial.

    Evaluated with 64 guard bits over the run precision.
    """
    if isinstance(roots, SphericalRootSet):
        pts = roots.local_roots
    else:
        pts = list(roots)
    with big_context(section.precision + 64):
        terms = sparse_terms([mpc(c) for c in section.trimmed()])
        vals = []
        for w in pts:
            w = mpc(w)
            p, _, s = eval_sparse(terms, w)
            vals.append(0.0 if s == 0 else float(abs(p) / s))
    if not vals:
        return ResidualStats(0.0, 0.0, [])
    return ResidualStats(max(vals), median(vals), vals)


def matching_distance(a: Sequence, b: Sequence, precision: int = 128) -> float:
    """Largest pairwise distance under the min-sum optimal assignment between two multisets."""
    if len(a) != len(b):
        raise DomainError(f"multisets differ in size: {len(a)} vs {len(b)}")
    if not a:
        return 0.0
    with big_context(precision):
        cost = np.array([[float(abs(mpc(x) - mpc(y))) for y in b] for x in a])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def roots_text(rootset: SphericalRootSet) -> str:
    """``Re Im`` per finite zero, then ``INF count``."""
    lines = [
        f"# n={rootset.nominal_n} origin={rootset.origin_stripped} "
        f"mode={rootset.mode.value if rootset.mode else 'none'} precision={rootset.precision}"
    ]
    for w in rootset.finite_roots:
        lines.append(f"{to_decimal(w.real, rootset.precision)} {to_decimal(w.imag, rootset.precision)}")
    lines.append(f"INF {rootset.infinity_count}")
    return "\n".join(lines) + "\n"


def write_roots(rootset: SphericalRootSet, path) -> None:
    Path(path).write_text(roots_text(rootset), encoding="utf-8")


def read_roots(path) -> SphericalRootSet:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = {}
    if lines and lines[0].startswith("#"):
        for tok in lines[0].lstrip("#").split():
            key, _, val = tok.partition("=")
            meta[key] = val
    precision = int(meta.get("precision", 128))
    roots, inf = [], None
    with big_context(precision):
        for line in lines:
            if not line.strip() or line.startswith("#"):
                continue
            a, b = line.split()
            if a == "INF":
                inf = int(b)
                continue
            roots.append(mpc(mpfr(a), mpfr(b)))
    if inf is None:
        raise ValueError(f"{path}: missing trailing INF record")
    n = int(meta.get("n", len(roots) + inf))
    mode = Mode.parse(meta["mode"]) if "mode" in meta else None
    return SphericalRootSet(
        finite_roots=roots,
        infinity_count=inf,
        nominal_n=n,
        origin_stripped=int(meta.get("origin", 0)),
        mode=mode,
        precision=precision,
    )
