"""Scenario runs: configs in, reports and tables out.

Three scenario kinds share one TOML config layout (see README):

* ``verify`` solves one Dirichlet problem and runs every applicable
  estimate at each check site;
* ``uniqueness`` solves pairs of problems on truncations [0, L] that
  differ only by a bump on the far cap, and records how far the
  difference reaches back towards the origin;
* ``convergence`` measures the nodal error against a closed-form
  solution on successive uniform refinements.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from .domain import PiecewiseLinear, PlanarDomain, Rectangle, build_generalized_strip
from .errors import ConfigError, GeometryError, HGraphError, SolverError
from .estimates import Transversal, check_classical_bounds, run_checks
from .mesh import TriangleMesh, generate_disk_mesh, generate_strip_mesh
from .reports import EstimateReport
from .solver import (
    BoundaryData,
    DirichletProblem,
    Solution,
    SolverOptions,
    exact_cap,
    exact_cylinder,
    solve_dirichlet,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


CSV_HEADER = ("scenario", "check", "x0", "measured", "bound", "slack", "pass")


class Kind(Enum):
    VERIFY = "verify"
    UNIQUENESS = "uniqueness"
    CONVERGENCE = "convergence"


# -- config ------------------------------------------------------------------

_SCHEMA: dict[str, Any] = {
    "kind": str,
    "name": str,
    "H": float,
    "seed": int,
    "domain": {
        "x_range": list,
        "b_minus": (list, float),
        "b_plus": (list, float),
        "pinched_left": bool,
        "random": bool,
        "max_width": float,
        "min_width": float,
        "knots": int,
    },
    "data": {
        "f_minus": (list, float),
        "f_plus": (list, float),
        "oracle": str,
        "random": bool,
        "lipschitz": float,
        "offset": float,
    },
    "mesh": {"nx": int, "ny": int, "rings": int},
    "rect": {"a": float, "b": float, "center": list},
    "checks": {"x0": list},
    "solver": {
        "grad_tol": float,
        "max_iters": int,
        "armijo_c": float,
        "armijo_shrink": float,
        "grad_cap": float,
    },
    "uniqueness": {"lengths": list, "delta": float, "sites": list, "cells_per_unit": int},
    "convergence": {
        "oracle": str,
        "radius": float,
        "half_width": float,
        "length": float,
        "levels": int,
        "min_order": float,
    },
}

_REQUIRED = {
    Kind.VERIFY: ("H", "domain", "mesh"),
    Kind.UNIQUENESS: ("H", "domain", "uniqueness"),
    Kind.CONVERGENCE: ("H", "convergence", "mesh"),
}


def _is(value, t) -> bool:
    if isinstance(value, bool):
        return t is bool
    if t is float:
        return isinstance(value, (int, float))
    return isinstance(value, t)


def _check_types(cfg: dict, schema: dict, where: str) -> None:
    for key, value in cfg.items():
        if key not in schema:
            raise ConfigError(f"unknown key {where}{key!r}")
        expected = schema[key]
        if isinstance(expected, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where}{key} must be a table")
            _check_types(value, expected, f"{where}{key}.")
            continue
        types = expected if isinstance(expected, tuple) else (expected,)
        if not any(_is(value, t) for t in types):
            raise ConfigError(f"{where}{key} has the wrong type ({type(value).__name__})")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario document; ``raw`` keeps the parsed tables."""

    kind: Kind
    raw: dict

    @classmethod
    def from_dict(cls, d: dict, seed: int | None = None) -> "ScenarioConfig":
        d = json.loads(json.dumps(d))
        if "kind" not in d:
            raise ConfigError("missing key 'kind'")
        _check_types(d, _SCHEMA, "")
        try:
            kind = Kind(d["kind"])
        except ValueError:
            raise ConfigError(f"unknown scenario kind {d['kind']!r}") from None
        for key in _REQUIRED[kind]:
            if key not in d:
                raise ConfigError(f"{kind.value} scenario needs {key!r}")
        if not d["H"] > 0:
            raise ConfigError("H must be positive")
        if seed is not None:
            d["seed"] = int(seed)
        d.setdefault("seed", 0)
        if not 0 <= d["seed"] < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        d.setdefault("name", kind.value)
        if kind is Kind.UNIQUENESS:
            u = d["uniqueness"]
            for key in ("lengths", "delta"):
                if key not in u:
                    raise ConfigError(f"uniqueness.{key} is required")
            Ls = [float(v) for v in u["lengths"]]
            if not Ls or any(b <= a for a, b in zip(Ls, Ls[1:])) or Ls[0] <= 0:
                raise ConfigError("uniqueness.lengths must be positive and increasing")
            if u["delta"] < 0:
                raise ConfigError("uniqueness.delta must be non-negative")
        if kind is Kind.CONVERGENCE and d["convergence"].get("oracle") not in ("cap", "cylinder"):
            raise ConfigError("convergence.oracle must be 'cap' or 'cylinder'")
        return cls(kind, d)

    @classmethod
    def load(cls, path: str | Path, seed: int | None = None) -> "ScenarioConfig":
        try:
            with open(path, "rb") as fh:
                d = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(d, seed)

    @property
    def name(self) -> str:
        return self.raw["name"]

    @property
    def H(self) -> float:
        return float(self.raw["H"])

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    def section(self, key: str) -> dict:
        return self.raw.get(key, {})

    def digest(self) -> str:
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def solver_options(self) -> SolverOptions:
        try:
            return SolverOptions(**self.section("solver"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


# -- random scenario pieces --------------------------------------------------


def random_strip(
    rng: np.random.Generator,
    x_range: tuple[float, float],
    H: float,
    knots: int = 9,
    min_width: float = 0.4,
    max_width: float = 0.8,
    max_slope: float = 0.5,
) -> PlanarDomain:
    """Strip with a wandering centre line and width in
    [min_width/H, max_width/H] at every breakpoint."""
    xs = np.linspace(x_range[0], x_range[1], knots)
    dx = np.diff(xs)
    centre = np.concatenate(([0.0], np.cumsum(rng.uniform(-max_slope, max_slope, knots - 1) * dx)))
    width = rng.uniform(min_width, max_width, knots) / H
    return build_generalized_strip(
        PiecewiseLinear(xs, centre - width / 2), PiecewiseLinear(xs, centre + width / 2), x_range
    )


def random_lipschitz(
    rng: np.random.Generator, x_range: tuple[float, float], lipschitz: float, knots: int = 9, offset: float = 0.0
) -> PiecewiseLinear:
    xs = np.linspace(x_range[0], x_range[1], knots)
    steps = rng.uniform(-lipschitz, lipschitz, knots - 1) * np.diff(xs)
    return PiecewiseLinear(xs, offset + np.concatenate(([0.0], np.cumsum(steps))))


def _table(value, x_range) -> PiecewiseLinear:
    if isinstance(value, (int, float)):
        return PiecewiseLinear.constant(float(value), *x_range)
    try:
        return PiecewiseLinear.from_points(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad piecewise-linear table: {exc}") from exc


def build_domain(cfg: ScenarioConfig, rng: np.random.Generator, x_range=None) -> PlanarDomain:
    d = cfg.section("domain")
    if x_range is None:
        if "x_range" not in d:
            raise ConfigError("domain.x_range is required")
        x_range = tuple(float(v) for v in d["x_range"])
    if d.get("random", False):
        return random_strip(
            rng, x_range, cfg.H, d.get("knots", 9), d.get("min_width", 0.4), d.get("max_width", 0.8)
        )
    for key in ("b_minus", "b_plus"):
        if key not in d:
            raise ConfigError(f"domain.{key} is required")
    try:
        return build_generalized_strip(
            _table(d["b_minus"], x_range), _table(d["b_plus"], x_range), x_range, d.get("pinched_left", False)
        )
    except GeometryError as exc:
        raise ConfigError(f"invalid domain: {exc}") from exc


def build_data(cfg: ScenarioConfig, domain: PlanarDomain, rng: np.random.Generator) -> BoundaryData:
    d = cfg.section("data")
    x_range = (domain.x_lo, domain.x_hi)
    oracle = d.get("oracle", "none")
    if oracle == "cylinder":
        return cylinder_data(domain, cfg.H)
    if oracle != "none":
        raise ConfigError(f"unknown data oracle {oracle!r}")
    if d.get("random", False):
        lip = d.get("lipschitz", 0.25)
        off = d.get("offset", 0.0)
        fm = random_lipschitz(rng, x_range, lip, offset=off)
        fp = random_lipschitz(rng, x_range, lip, offset=off)
        if domain.pinched_left:
            fp = PiecewiseLinear(fp.xs, fp.ys - fp.ys[0] + fm.ys[0])
        return BoundaryData(fm, fp)
    fm = _table(d.get("f_minus", 0.0), x_range)
    fp = _table(d.get("f_plus", 0.0), x_range)
    return BoundaryData(fm, fp)


def cylinder_data(domain: PlanarDomain, H: float) -> BoundaryData:
    """Zero on the curves, exact cylinder profile on the caps of a straight
    strip symmetric about y = 0."""
    w = float(domain.b_plus(domain.x_lo))
    xs = domain.breakpoints()
    if not (np.allclose(domain.b_plus(xs), w) and np.allclose(domain.b_minus(xs), -w)):
        raise ConfigError("the cylinder oracle needs a straight strip |y| < w")
    try:
        profile = exact_cylinder(H, w)
    except HGraphError as exc:
        raise ConfigError(str(exc)) from exc
    zero = PiecewiseLinear.constant(0.0, domain.x_lo, domain.x_hi)
    return BoundaryData(zero, zero, profile, profile)


def _mesh_for(cfg: ScenarioConfig, domain: PlanarDomain) -> TriangleMesh:
    m = cfg.section("mesh")
    if "nx" not in m or "ny" not in m:
        raise ConfigError("mesh.nx and mesh.ny are required")
    if m["nx"] < 1 or m["ny"] < 1:
        raise ConfigError("mesh sizes must be positive")
    return generate_strip_mesh(domain, m["nx"], m["ny"])


# -- run records -------------------------------------------------------------


@dataclass
class RunRecord:
    scenario: str
    kind: Kind
    config_hash: str
    seed: int
    status: str = "ok"
    error: str | None = None
    diagnostics: dict = field(default_factory=dict)
    reports: list[EstimateReport] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    manifest: list[str] = field(default_factory=list)
    plot: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "kind": self.kind.value,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "status": self.status,
            "error": self.error,
            "diagnostics": self.diagnostics,
            "reports": [r.to_dict() for r in self.reports],
            "tables": self.tables,
            "notes": self.notes,
            "manifest": self.manifest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            d["scenario"],
            Kind(d["kind"]),
            d["config_hash"],
            int(d["seed"]),
            d["status"],
            d["error"],
            d["diagnostics"],
            [EstimateReport.from_dict(r) for r in d["reports"]],
            d["tables"],
            list(d["notes"]),
            list(d["manifest"]),
        )


def _new_record(cfg: ScenarioConfig) -> RunRecord:
    return RunRecord(cfg.name, cfg.kind, cfg.digest(), cfg.seed)


def _diagnostics(sol: Solution) -> dict:
    return {
        "iterations": sol.iterations,
        "grad_norm": sol.grad_norm,
        "h_max": sol.h_max,
        "vertices": sol.mesh.n_vertices,
        "triangles": sol.mesh.n_triangles,
    }


def _solver_failure(record: RunRecord, exc: SolverError) -> RunRecord:
    record.status = "solver_error"
    record.error = f"{type(exc).__name__}: {exc}"
    return record


def run_verify(cfg: ScenarioConfig) -> RunRecord:
    if cfg.kind is not Kind.VERIFY:
        raise ConfigError("run_verify needs a verify scenario")
    record = _new_record(cfg)
    rng = cfg.rng()
    domain = build_domain(cfg, rng)
    data = build_data(cfg, domain, rng)
    mesh = _mesh_for(cfg, domain)
    try:
        problem = DirichletProblem(mesh, data, cfg.H)
        sol = solve_dirichlet(problem, cfg.solver_options())
    except SolverError as exc:
        return _solver_failure(record, exc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    record.diagnostics = _diagnostics(sol)

    rect = None
    r = cfg.section("rect")
    if r:
        if "a" not in r:
            raise ConfigError("rect.a is required")
        centre = r.get("center", [0.5 * (domain.x_lo + domain.x_hi), 0.0])
        rect = Rectangle(r["a"], r.get("b", 10.0), tuple(centre))

    sites = [float(x) for x in cfg.section("checks").get("x0", [])]
    for k, x0 in enumerate(sites):
        record.reports.extend(run_checks(sol, x0, rect if k == 0 else None))
    if rect is not None and not sites:
        record.reports.extend(run_checks(sol, rect.center[0], rect)[-2:])
    record.reports.extend(check_classical_bounds(sol))
    if cfg.section("data").get("oracle") == "cylinder":
        w = float(domain.b_plus(domain.x_lo))
        exact = exact_cylinder(cfg.H, w)(mesh.vertices[:, 1])
        record.diagnostics["oracle_linf_error"] = float(np.max(np.abs(sol.u - exact)))

    record.plot = {"kind": "profiles", "solution": sol, "rect": rect, "sites": sites}
    return record


def _bump_cap(data: BoundaryData, domain: PlanarDomain, delta: float):
    """Right-cap values: the default linear interpolation plus a parabolic
    bump of height delta vanishing at both cap corners."""
    x = domain.x_hi
    lo, hi = float(domain.b_minus(x)), float(domain.b_plus(x))
    vlo, vhi = float(data.f_minus(x)), float(data.f_plus(x))

    def cap(y):
        s = (np.asarray(y, float) - lo) / (hi - lo)
        return vlo + s * (vhi - vlo) + 4.0 * delta * s * (1.0 - s)

    return cap


def max_difference(a: Solution, b: Solution, x0: float) -> float:
    """max over the transversal at x0 of |u_a - u_b| (same mesh)."""
    diff = Solution(a.mesh, a.u - b.u, 0.0, 0, a.H)
    return float(np.max(np.abs(Transversal.of(diff, x0).samples)))


def run_uniqueness(cfg: ScenarioConfig) -> RunRecord:
    if cfg.kind is not Kind.UNIQUENESS:
        raise ConfigError("run_uniqueness needs a uniqueness scenario")
    record = _new_record(cfg)
    u = cfg.section("uniqueness")
    lengths = [float(v) for v in u["lengths"]]
    delta = float(u["delta"])
    sites = sorted(float(v) for v in u.get("sites", [0.5, 1.0, 2.0, 3.0]))
    per_unit = int(u.get("cells_per_unit", 20))
    ny = int(cfg.section("mesh").get("ny", 16))
    opts = cfg.solver_options()

    table = {}
    diags = {}
    for L in lengths:
        rng = cfg.rng()
        domain = build_domain(cfg, rng, (0.0, L))
        data = build_data(cfg, domain, rng)
        mesh = generate_strip_mesh(domain, max(1, int(round(per_unit * L))), ny)
        perturbed = replace(data, right_cap=_bump_cap(data, domain, delta))
        try:
            s1 = solve_dirichlet(DirichletProblem(mesh, data, cfg.H), opts)
            s2 = solve_dirichlet(DirichletProblem(mesh, perturbed, cfg.H), opts)
        except SolverError as exc:
            return _solver_failure(record, exc)
        xs = [x for x in sites if x <= L]
        D = [max_difference(s1, s2, x) for x in xs]
        key = f"{L:g}"
        table[key] = {
            "x": xs,
            "D": D,
            "D_over_log": [d / math.log(2.0 + x) for x, d in zip(xs, D)],
        }
        diags[key] = {"first": _diagnostics(s1), "second": _diagnostics(s2)}
        slack = 10.0 * max(s1.grad_norm, s2.grad_norm, np.finfo(float).eps)
        for k in range(len(xs) - 1):
            record.reports.append(
                EstimateReport(f"D_monotone_L{key}", D[k] - D[k + 1], 0.0, slack, (), xs[k])
            )

    for L1, L2 in zip(lengths, lengths[1:]):
        a, b = table[f"{L1:g}"], table[f"{L2:g}"]
        common = [x for x in a["x"] if x in b["x"]]
        if not common:
            continue
        x = 1.0 if 1.0 in common else common[0]
        da, db = a["D"][a["x"].index(x)], b["D"][b["x"].index(x)]
        record.reports.append(EstimateReport(f"D_shrinks_L{L2:g}", db - da, 0.0, 0.0, (), x))

    record.tables = {"D": table}
    record.diagnostics = diags
    record.notes.append(
        "Finite truncations only show trends; the logarithmic growth comparison uses ln(2 + x) "
        "and asserts nothing about the limit."
    )
    record.plot = {"kind": "divergence", "table": table}
    return record


def nodal_error(mesh: TriangleMesh, u: np.ndarray, exact) -> float:
    """max over the vertices of |u - exact(x, y)|."""
    v = mesh.vertices
    return float(np.max(np.abs(np.asarray(u) - exact(v[:, 0], v[:, 1]))))


def observed_orders(errors) -> list[float]:
    e = np.asarray(errors, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return [float(v) for v in np.log2(e[:-1] / e[1:])]


def run_convergence(cfg: ScenarioConfig) -> RunRecord:
    if cfg.kind is not Kind.CONVERGENCE:
        raise ConfigError("run_convergence needs a convergence scenario")
    record = _new_record(cfg)
    c = cfg.section("convergence")
    m = cfg.section("mesh")
    H = cfg.H
    levels = int(c.get("levels", 3))
    if levels < 2:
        raise ConfigError("convergence.levels must be at least 2")
    opts = cfg.solver_options()

    try:
        if c["oracle"] == "cap":
            R = float(c.get("radius", 0.5))
            exact = exact_cap(H, R)
            rings = int(m.get("rings", 10))
            meshes = [generate_disk_mesh(R, rings * 2**k) for k in range(levels)]
            data = BoundaryData(rim=0.0)
        else:
            w = float(c.get("half_width", 0.4))
            length = float(c.get("length", 4.0))
            profile = exact_cylinder(H, w)
            domain = build_generalized_strip(
                PiecewiseLinear.constant(-w, 0.0, length), PiecewiseLinear.constant(w, 0.0, length), (0.0, length)
            )
            meshes = [generate_strip_mesh(domain, m.get("nx", 20) * 2**k, m.get("ny", 8) * 2**k) for k in range(levels)]
            data = cylinder_data(domain, H)

            def exact(x, y):
                return profile(y)
    except HGraphError as exc:
        if isinstance(exc, SolverError):
            raise
        raise ConfigError(str(exc)) from exc

    errors, hs, diags = [], [], []
    for mesh in meshes:
        try:
            sol = solve_dirichlet(DirichletProblem(mesh, data, H), opts)
        except SolverError as exc:
            return _solver_failure(record, exc)
        errors.append(nodal_error(mesh, sol.u, exact))
        hs.append(sol.h_max)
        diags.append(_diagnostics(sol))
    orders = observed_orders(errors)
    min_order = float(c.get("min_order", 1.5))
    for k in range(levels - 1):
        record.reports.append(EstimateReport("error_decrease", errors[k + 1] - errors[k], 0.0, 0.0, (), float(k + 1)))
    record.reports.append(EstimateReport("observed_order", -orders[-1], -min_order, 0.0, (), float(levels - 1)))
    record.tables = {"h_max": hs, "linf_error": errors, "order": orders}
    record.diagnostics = {"levels": diags}
    record.plot = {"kind": "convergence", "h": hs, "errors": errors}
    return record


RUNNERS = {Kind.VERIFY: run_verify, Kind.UNIQUENESS: run_uniqueness, Kind.CONVERGENCE: run_convergence}


def run(cfg: ScenarioConfig) -> RunRecord:
    return RUNNERS[cfg.kind](cfg)


# -- output ------------------------------------------------------------------


def _num(x) -> str:
    if x is None:
        return ""
    return "%.17g" % x


def csv_text(record: RunRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in record.reports:
        w.writerow(
            (record.scenario, r.name, _num(r.x0), _num(r.measured), _num(r.bound), _num(r.slack), str(r.passed).lower())
        )
    return buf.getvalue()


def dumps_json(obj, indent: int = 0) -> str:
    """JSON text with every float written with 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, type(None), str)) for v in obj):
            return "[" + ", ".join(dumps_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return "%.17g" % x
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _plot(record: RunRecord, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .estimates import natural_partition, profile_project
    from .geometry import Label, clip_decompose

    matplotlib.rcParams["svg.hashsalt"] = "hgraph"
    fig, ax = plt.subplots(figsize=(6, 4))
    info = record.plot
    if info.get("kind") == "profiles":
        sol, rect = info["solution"], info["rect"]
        if rect is not None:
            dec = natural_partition(clip_decompose(sol.mesh.polygon, rect))
            for lab, colour in ((Label.LAMBDA1, "tab:blue"), (Label.LAMBDA2, "tab:red")):
                for comp in dec.gamma(lab):
                    p = profile_project(sol, comp).points
                    ax.plot(p[:, 0], p[:, 1], color=colour, lw=1)
            ax.set_ylabel("z")
            ax.set_title("profile images of the boundary classes")
        else:
            for x0 in info["sites"]:
                tr = Transversal.of(sol, x0)
                ax.plot(tr.points[:, 1], tr.samples, label=f"x = {x0:g}")
            ax.set_ylabel("u")
            if info["sites"]:
                ax.legend()
        ax.set_xlabel("x" if rect is not None else "y")
    elif info.get("kind") == "divergence":
        for key, row in info["table"].items():
            D = np.maximum(np.asarray(row["D"]), 1e-300)
            ax.semilogy(row["x"], D, marker="o", label=f"L = {key}")
        ax.set_xlabel("x")
        ax.set_ylabel("D(x; L)")
        ax.legend()
    elif info.get("kind") == "convergence":
        ax.loglog(info["h"], info["errors"], marker="o")
        ax.set_xlabel("h_max")
        ax.set_ylabel("L-infinity error")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_outputs(record: RunRecord, out_dir: str | Path) -> list[Path]:
    """Write <scenario>.csv, .svg and .json into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = out / record.scenario
    paths = [base.with_suffix(".csv"), base.with_suffix(".svg"), base.with_suffix(".json")]
    record.manifest = [p.name for p in paths]
    paths[0].write_text(csv_text(record))
    _plot(record, paths[1])
    paths[2].write_text(dumps_json(record.to_dict()) + "\n")
    return paths


def emit_failure(record: RunRecord, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{record.scenario}.json"
    record.manifest = [path.name]
    path.write_text(dumps_json(record.to_dict()) + "\n")
    return path
