"""Command-line experiment runner: ``gauge``, ``zeros``, ``bounds``, ``report``.

Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import bounds as bnd
from . import gauge as gg
from . import measures as ms
from . import roots as rt
from . import sections as sec
from .config import ConfigError, ScenarioConfig, load_config
from .kernel import DomainError, NumericFailure
from .series import CoefficientFileError

log = logging.getLogger("gaugezeros")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

BOUNDS_HEADER = [
    "n", "degree", "m", "C", "V_m", "v_m", "max1v", "pest_slack", "pest_holds",
    "roots_within_V", "roots_outside_v",
]


def _paths(cfg: ScenarioConfig) -> dict:
    out = Path(cfg.out)
    slug = cfg.slug()
    return {
        "out": out,
        "gauge_csv": out / f"gauge_{slug}.csv",
        "gauge_summary": out / f"gauge_{slug}_summary.json",
        "zeros_csv": out / f"zeros_{slug}.csv",
        "verdict": out / f"verdict_{slug}.txt",
        "errors": out / f"errors_{slug}.txt",
        "bounds_csv": out / f"bounds_{slug}.csv",
        "manifest": out / f"manifest_{slug}.json",
        "roots_dir": out / "roots",
        "sections_dir": out / "sections",
        "roots_file": lambda n: out / "roots" / f"{slug}_n{n}.txt",
        "section_file": lambda n: out / "sections" / f"{slug}_n{n}.txt",
    }


def _prepared_sequence(cfg: ScenarioConfig):
    seq = cfg.sequence()
    if cfg.strip_origin:
        seq, _ = sec.strip_origin(seq)
    return seq


@dataclass
class SectionResult:
    n: int
    row: Optional[list] = None
    report: Optional[ms.EquidistributionReport] = None
    roots_text: Optional[str] = None
    section_text: Optional[str] = None
    bounds_rows: Optional[list] = None
    error: Optional[str] = None


def _zeros_job(args) -> SectionResult:
    cfg, n = args
    try:
        seq = _prepared_sequence(cfg)
        s = sec.build(seq, n, cfg.mode, cfg.precision)
        r = rt.find_roots(s, cfg.max_iter, cfg.rel_tol)
        rep = ms.equidistribution_report(s, r)
        return SectionResult(
            n=n,
            row=rep.csv_row(),
            report=rep,
            roots_text=rt.roots_text(r),
            section_text=sec.section_text(s) if cfg.dump_sections else None,
        )
    except (NumericFailure, DomainError) as exc:
        return SectionResult(n=n, error=f"{type(exc).__name__}: {exc}")


def _bounds_rows(n, coeffs, ms_list, found_roots, precision):
    rep = bnd.bounds_report(coeffs, ms_list, found_roots, precision)
    rows = []
    for r in rep.rows:
        rows.append([
            n, rep.degree, r.m, repr(rep.cauchy_C), repr(r.V), repr(r.v), repr(r.max1v),
            repr(r.pest_slack), int(r.pest_holds),
            "" if r.roots_within_V is None else r.roots_within_V,
            "" if r.roots_outside_v is None else r.roots_outside_v,
        ])
    return rows


def _bounds_job(args) -> SectionResult:
    cfg, n = args
    try:
        seq = _prepared_sequence(cfg)
        s = sec.build(seq, n, cfg.mode, cfg.precision)
        coeffs = s.trimmed()
        d = len(coeffs) - 1
        if d < 1:
            raise DomainError(f"section {n} has degree 0")
        m_list = {min(d, math.floor(g * d) + 1) for g in cfg.gamma_grid} | {d}
        found = None
        if cfg.bounds_roots:
            found = rt.find_roots(s, cfg.max_iter, cfg.rel_tol).local_roots
        return SectionResult(n=n, bounds_rows=_bounds_rows(n, coeffs, m_list, found, cfg.precision))
    except (NumericFailure, DomainError) as exc:
        return SectionResult(n=n, error=f"{type(exc).__name__}: {exc}")


def _run_jobs(job, cfg: ScenarioConfig, grid) -> list:
    tasks = [(cfg, n) for n in grid]
    if cfg.workers == 1 or len(tasks) <= 1:
        return [job(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(job, tasks))


def decide_verdict(reports: list, cfg: ScenarioConfig) -> tuple:
    """('yes' | 'no' | 'inconclusive', explanation) from the per-n diagnostics.

    All checks are read at the largest computed n. A failing check is 'no'
    only if it also fails at every computed n; otherwise 'inconclusive'.
    """
    if not reports:
        return "inconclusive", "no section was computed"
    v = cfg.verdict
    checks = {
        "star_discrepancy": (lambda r: r.star_discrepancy < v.max_discrepancy, f"< {v.max_discrepancy}"),
        "infinity_mass": (lambda r: float(r.infinity_mass) < v.max_infinity_mass, f"< {v.max_infinity_mass}"),
        "annulus_mass(0.2)": (lambda r: float(r.annulus_mass[0.2]) > v.min_annulus_mass, f"> {v.min_annulus_mass}"),
    }
    values = {
        "star_discrepancy": lambda r: r.star_discrepancy,
        "infinity_mass": lambda r: float(r.infinity_mass),
        "annulus_mass(0.2)": lambda r: float(r.annulus_mass[0.2]),
    }
    last = reports[-1]
    failing = [name for name, (ok, _) in checks.items() if not ok(last)]
    desc = lambda name: f"{name}={values[name](last):.6g} (need {checks[name][1]})"  # noqa: E731
    if not failing:
        return "yes", f"at n={last.n}: " + ", ".join(desc(k) for k in checks)
    persistent = [name for name in failing if not any(checks[name][0](r) for r in reports)]
    if persistent:
        return "no", f"at n={last.n}: " + ", ".join(desc(k) for k in persistent)
    return "inconclusive", f"at n={last.n}: " + ", ".join(desc(k) for k in failing) + " fails only at the largest n"


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_gauge(cfg: ScenarioConfig) -> int:
    p = _paths(cfg)
    p["out"].mkdir(parents=True, exist_ok=True)
    seq = cfg.sequence()
    grid = range(1, cfg.effective_nmax + 1)
    prof = gg.profile(seq, grid, cfg.gamma_grid, cfg.tail_fraction)
    gg.write_profile_csv(prof, p["gauge_csv"])
    summary = prof.summary()
    summary["tail_inf_curve"] = {
        repr(g): {"n": [int(n) for n in prof.n_grid[:: max(1, len(prof.n_grid) // 64)]],
                  "inf": [float(x) for x in prof.tail_inf[g][:: max(1, len(prof.n_grid) // 64)]]}
        for g in prof.gamma_grid
    }
    R = seq.declared_radius
    if R is not None and 0 < R < math.inf:
        rep = gg.ostrowski_gaps(seq, R, grid, cfg.gamma_grid, cfg.tail_fraction)
        summary["ostrowski"] = {
            "radius": R,
            "tail_inf_log_A": {repr(g): rep.tail_inf_log_A[g] for g in rep.gamma_grid},
            "flagged": {repr(g): rep.flagged[g] for g in rep.gamma_grid},
            "has_gaps": rep.has_gaps,
        }
    p["gauge_summary"].write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{seq.name}: n <= {cfg.effective_nmax}")
    for g in prof.gamma_grid:
        print(f"  L_hat({g}) = {prof.L_hat[g]:.6f}")
    print(f"  G_hat = {prof.G_hat:.6f} (gamma = {prof.gamma_min})")
    if "ostrowski" in summary:
        print(f"  Ostrowski gaps (R = {R}): {'yes' if summary['ostrowski']['has_gaps'] else 'no'}")
    return EXIT_OK


def cmd_zeros(cfg: ScenarioConfig) -> int:
    p = _paths(cfg)
    p["roots_dir"].mkdir(parents=True, exist_ok=True)
    if cfg.dump_sections:
        p["sections_dir"].mkdir(parents=True, exist_ok=True)
    results = _run_jobs(_zeros_job, cfg, cfg.section_grid)
    rows, reports, errors = [], [], []
    for res in results:
        if res.error:
            errors.append(f"n={res.n} {res.error}")
            log.error("n=%d: %s", res.n, res.error)
            continue
        rows.append(res.row)
        reports.append(res.report)
        p["roots_file"](res.n).write_text(res.roots_text, encoding="utf-8")
        if res.section_text is not None:
            p["section_file"](res.n).write_text(res.section_text, encoding="utf-8")
    _write_csv(p["zeros_csv"], ms.EquidistributionReport.CSV_HEADER, rows)
    if errors:
        p["errors"].write_text("\n".join(errors) + "\n", encoding="utf-8")
    elif p["errors"].exists():
        p["errors"].unlink()
    verdict, why = decide_verdict(reports, cfg)
    line = f"consistent with Szegő class: {verdict} [{why}]"
    p["verdict"].write_text(line + "\n", encoding="utf-8")
    for rep in reports:
        print(
            f"  n={rep.n:>6}  D*={rep.star_discrepancy:.6f}  |tau_1|={rep.trig_moments[0]:.6f}  "
            f"annulus(0.2)={float(rep.annulus_mass[0.2]):.4f}  inf_mass={rep.infinity_mass}"
        )
    print(line)
    return EXIT_NUMERIC if errors else EXIT_OK


def cmd_bounds(cfg: ScenarioConfig, coeffs: Optional[list] = None) -> int:
    p = _paths(cfg)
    p["out"].mkdir(parents=True, exist_ok=True)
    if coeffs is not None:
        d = len(coeffs) - 1
        m_list = {min(d, math.floor(g * d) + 1) for g in cfg.gamma_grid} | set(range(1, d + 1))
        s = sec.from_coefficients(coeffs, cfg.precision)
        found = rt.find_roots(s, cfg.max_iter, cfg.rel_tol).local_roots if cfg.bounds_roots else None
        rows = _bounds_rows(d, s.trimmed(), m_list, found, cfg.precision)
        path = p["out"] / "bounds_oneshot.csv"
        _write_csv(path, BOUNDS_HEADER, rows)
        print(f"C = {rows[0][3]}")
        for r in rows:
            print(f"  m={r[2]}  V_m={r[4]}  v_m={r[5]}  pest_slack={r[7]}")
        return EXIT_OK
    results = _run_jobs(_bounds_job, cfg, cfg.section_grid)
    rows, errors = [], []
    for res in results:
        if res.error:
            errors.append(f"n={res.n} {res.error}")
            log.error("n=%d: %s", res.n, res.error)
            continue
        rows.extend(res.bounds_rows)
    _write_csv(p["bounds_csv"], BOUNDS_HEADER, rows)
    for r in rows:
        extra = f"  within V: {r[9]}  outside v: {r[10]}" if r[9] != "" else ""
        print(f"  n={r[0]} m={r[2]}  C={float(r[3]):.6g}  V_m={float(r[4]):.6g}  v_m={float(r[5]):.6g}{extra}")
    return EXIT_NUMERIC if errors else EXIT_OK


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def cmd_report(cfg: ScenarioConfig) -> int:
    p = _paths(cfg)
    out = p["out"]
    if not out.is_dir():
        raise FileNotFoundError(f"output directory {out} does not exist")
    files = []
    manifest_path = p["manifest"]
    for f in sorted(out.rglob("*")):
        if f.is_file() and f != manifest_path:
            files.append({"path": f.relative_to(out).as_posix(), "bytes": f.stat().st_size, "sha256": _sha256(f)})
    grid = cfg.section_grid
    present_rows = set()
    if p["zeros_csv"].exists():
        with p["zeros_csv"].open(encoding="utf-8") as fh:
            present_rows = {int(r["n"]) for r in csv.DictReader(fh)}
    missing = {
        "gauge": not p["gauge_csv"].exists(),
        "zeros_csv": not p["zeros_csv"].exists(),
        "bounds_csv": not p["bounds_csv"].exists(),
        "zeros_n": [n for n in grid if n not in present_rows or not p["roots_file"](n).exists()],
    }
    verdict = p["verdict"].read_text(encoding="utf-8").strip() if p["verdict"].exists() else None
    complete = not (missing["gauge"] or missing["zeros_csv"] or missing["bounds_csv"] or missing["zeros_n"])
    manifest = {
        "config": cfg.as_dict(),
        "files": files,
        "verdict": verdict,
        "missing": missing,
        "complete": complete,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    print(f"manifest: {manifest_path} ({len(files)} files, complete={complete})")
    if missing["zeros_n"]:
        print(f"  missing sections: {missing['zeros_n']}")
    for key in ("gauge", "zeros_csv", "bounds_csv"):
        if missing[key]:
            print(f"  missing artifact: {key}")
    if verdict:
        print(f"  {verdict}")
    return EXIT_OK


def _parse_params(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise ConfigError("--param", f"expected K=V, got {it!r}")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _parse_coeffs(text: str) -> list:
    try:
        return [complex(t.replace(" ", "")) for t in text.split(",")]
    except ValueError:
        raise ConfigError("--coeffs", f"cannot parse {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaugezeros", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("gauge", "zeros", "bounds", "report"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path)
        sp.add_argument("--family")
        sp.add_argument("--file", dest="coeff_file", help="coefficient file instead of a family")
        sp.add_argument("--param", action="append", metavar="K=V")
        sp.add_argument("--nmax", type=int)
        sp.add_argument("--n", dest="n_grid", help="comma-separated section indices")
        sp.add_argument("--mode", choices=[m.value for m in sec.Mode])
        sp.add_argument("--precision", type=int)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--workers", type=int)
        if name == "bounds":
            sp.add_argument("--coeffs", help="one-shot: b_0,b_1,...,b_n")
            sp.add_argument("--no-roots", action="store_true", help="skip root counts")
    return ap


def config_from_args(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if args.family:
        cfg.family, cfg.coeff_file = args.family, None
        cfg.params = {}
    if args.coeff_file:
        cfg.coeff_file, cfg.family = str(args.coeff_file), None
        cfg.params = {}
    cfg.params.update(_parse_params(args.param))
    if args.nmax is not None:
        cfg.nmax = args.nmax
    if args.n_grid:
        try:
            cfg.n_grid = [int(t) for t in args.n_grid.replace(",", " ").split()]
        except ValueError:
            raise ConfigError("--n", f"expected integers, got {args.n_grid!r}") from None
    if args.mode:
        cfg.mode = sec.Mode.parse(args.mode)
    if args.precision is not None:
        cfg.precision = args.precision
    if args.out is not None:
        cfg.out = str(args.out)
    if args.workers is not None:
        cfg.workers = args.workers
    if getattr(args, "no_roots", False):
        cfg.bounds_roots = False
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        coeffs = _parse_coeffs(args.coeffs) if getattr(args, "coeffs", None) else None
        if coeffs is not None:
            if len(coeffs) < 2 or coeffs[-1] == 0:
                raise ConfigError("--coeffs", "need degree >= 1 with nonzero leading coefficient")
            if cfg.family is None and cfg.coeff_file is None:
                cfg.family = "geometric"
            if not cfg.n_grid and cfg.nmax is None:
                cfg.nmax = len(coeffs) - 1
        cfg.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CoefficientFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "gauge":
            return cmd_gauge(cfg)
        if args.command == "zeros":
            return cmd_zeros(cfg)
        if args.command == "bounds":
            return cmd_bounds(cfg, coeffs)
        return cmd_report(cfg)
    except (NumericFailure, DomainError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CoefficientFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
