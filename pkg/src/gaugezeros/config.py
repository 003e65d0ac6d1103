"""Scenario configuration: an INI file, overridable from the command line."""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional

from .gauge import DEFAULT_GAMMAS, DEFAULT_TAIL_FRACTION
from .kernel import DEFAULT_PRECISION, DomainError
from .roots import DEFAULT_MAX_ITER, DEFAULT_REL_TOL
from .sections import Mode
from .series import FAMILIES, CoefficientSequence, family_from_file, make_family


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field = field_name


@dataclass
class Verdict:
    max_discrepancy: float = 0.1
    max_infinity_mass: float = 0.02
    min_annulus_mass: float = 0.8


@dataclass
class ScenarioConfig:
    family: Optional[str] = None
    params: dict = field(default_factory=dict)
    coeff_file: Optional[str] = None
    n_grid: list = field(default_factory=list)
    nmax: Optional[int] = None
    gamma_grid: tuple = DEFAULT_GAMMAS
    tail_fraction: float = DEFAULT_TAIL_FRACTION
    mode: Mode = Mode.MAX_GAUGE
    precision: int = DEFAULT_PRECISION
    strip_origin: bool = True
    max_iter: int = DEFAULT_MAX_ITER
    rel_tol: float = DEFAULT_REL_TOL
    out: str = "runs/default"
    workers: int = 1
    dump_sections: bool = False
    bounds_roots: bool = True
    verdict: Verdict = field(default_factory=Verdict)

    def validate(self) -> "ScenarioConfig":
        if (self.family is None) == (self.coeff_file is None):
            raise ConfigError("sequence", "give exactly one of 'family' or 'file'")
        if self.family is not None:
            if self.family not in FAMILIES:
                raise ConfigError("sequence.family", f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
            try:
                make_family(self.family, **self.params)
            except DomainError as exc:
                raise ConfigError("sequence.params", str(exc)) from None
        elif not Path(self.coeff_file).is_file():
            raise ConfigError("sequence.file", f"no such file {self.coeff_file!r}")
        if self.nmax is not None and self.nmax < 1:
            raise ConfigError("grid.nmax", f"must be >= 1, got {self.nmax}")
        if any(n < 1 for n in self.n_grid):
            raise ConfigError("grid.n", "section indices must be >= 1")
        if sorted(set(self.n_grid)) != list(self.n_grid):
            raise ConfigError("grid.n", "section indices must be strictly increasing")
        if not self.n_grid and self.nmax is None:
            raise ConfigError("grid", "give 'n' or 'nmax'")
        if not self.gamma_grid or any(not 0 < g <= 1 for g in self.gamma_grid):
            raise ConfigError("grid.gammas", "every gamma must lie in (0, 1]")
        if not 0 < self.tail_fraction < 1:
            raise ConfigError("grid.tail_fraction", "must lie in (0, 1)")
        if self.precision < 24:
            raise ConfigError("sections.precision", f"need at least 24 bits, got {self.precision}")
        if self.max_iter < 1:
            raise ConfigError("solver.max_iter", "must be >= 1")
        if not self.rel_tol > 0:
            raise ConfigError("solver.rel_tol", "must be positive")
        if self.workers < 1:
            raise ConfigError("run.workers", "must be >= 1")
        v = self.verdict
        for name in ("max_discrepancy", "max_infinity_mass", "min_annulus_mass"):
            val = getattr(v, name)
            if not (0 <= val <= 1) or math.isnan(val):
                raise ConfigError(f"verdict.{name}", f"must lie in [0, 1], got {val}")
        return self

    @property
    def effective_nmax(self) -> int:
        if self.nmax is not None:
            return self.nmax
        return max(self.n_grid)

    @property
    def section_grid(self) -> list:
        """Section indices for zeros/bounds: the explicit grid capped at nmax, else nmax/4, nmax/2, nmax."""
        top = self.effective_nmax
        grid = [n for n in self.n_grid if n <= top]
        if grid:
            return grid
        return sorted({max(1, top // 4), max(1, top // 2), top})

    def sequence(self) -> CoefficientSequence:
        if self.coeff_file is not None:
            return family_from_file(self.coeff_file)
        return make_family(self.family, **self.params)

    def slug(self) -> str:
        if self.coeff_file is not None:
            return "file_" + Path(self.coeff_file).stem
        parts = [self.family] + [f"{k}{self.params[k]}" for k in sorted(self.params)]
        return "_".join(parts).replace(".", "p").replace("-", "m")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        d["gamma_grid"] = list(self.gamma_grid)
        d["section_grid"] = self.section_grid
        return d


def _floats(text: str, field_name: str) -> tuple:
    try:
        return tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(field_name, f"expected numbers, got {text!r}") from None


def _ints(text: str, field_name: str) -> list:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(field_name, f"expected integers, got {text!r}") from None


def _get(parser, section, key, conv, field_name, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        if conv is bool:
            return parser.getboolean(section, key)
        return conv(raw)
    except ValueError:
        raise ConfigError(field_name, f"cannot parse {raw!r}") from None


def load_config(path) -> ScenarioConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc)) from None
    cfg = ScenarioConfig()
    known = {"sequence", "grid", "sections", "solver", "verdict", "run"}
    for sec in parser.sections():
        if sec not in known:
            raise ConfigError(sec, f"unknown section; expected one of {sorted(known)}")
    if parser.has_section("sequence"):
        items = dict(parser.items("sequence"))
        cfg.family = items.pop("family", None)
        f = items.pop("file", None)
        if f is not None:
            fp = Path(f)
            cfg.coeff_file = str(fp if fp.is_absolute() else (path.parent / fp))
        cfg.params = items
    if parser.has_section("grid"):
        if parser.has_option("grid", "n"):
            cfg.n_grid = _ints(parser.get("grid", "n"), "grid.n")
        cfg.nmax = _get(parser, "grid", "nmax", int, "grid.nmax", None)
        if parser.has_option("grid", "gammas"):
            cfg.gamma_grid = _floats(parser.get("grid", "gammas"), "grid.gammas")
        cfg.tail_fraction = _get(parser, "grid", "tail_fraction", float, "grid.tail_fraction", cfg.tail_fraction)
    if parser.has_section("sections"):
        if parser.has_option("sections", "mode"):
            try:
                cfg.mode = Mode.parse(parser.get("sections", "mode"))
            except DomainError as exc:
                raise ConfigError("sections.mode", str(exc)) from None
        cfg.precision = _get(parser, "sections", "precision", int, "sections.precision", cfg.precision)
        cfg.strip_origin = _get(parser, "sections", "strip_origin", bool, "sections.strip_origin", cfg.strip_origin)
    if parser.has_section("solver"):
        cfg.max_iter = _get(parser, "solver", "max_iter", int, "solver.max_iter", cfg.max_iter)
        cfg.rel_tol = _get(parser, "solver", "rel_tol", float, "solver.rel_tol", cfg.rel_tol)
    if parser.has_section("verdict"):
        for name in ("max_discrepancy", "max_infinity_mass", "min_annulus_mass"):
            setattr(cfg.verdict, name, _get(parser, "verdict", name, float, f"verdict.{name}", getattr(cfg.verdict, name)))
    if parser.has_section("run"):
        out = _get(parser, "run", "out", str, "run.out", None)
        if out is not None:
            cfg.out = out
        cfg.workers = _get(parser, "run", "workers", int, "run.workers", cfg.workers)
        cfg.dump_sections = _get(parser, "run", "dump_sections", bool, "run.dump_sections", cfg.dump_sections)
        cfg.bounds_roots = _get(parser, "run", "bounds_roots", bool, "run.bounds_roots", cfg.bounds_roots)
    return cfg
