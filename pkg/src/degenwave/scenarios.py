"""Scenario configs (JSON), execution, and artifact persistence.

A scenario bundles the model pair, initial data, grid, scheme controls, and
a list of named checks. Configs are plain JSON, floats round-trip through
their shortest decimal form, and every artifact write is atomic (temp file
plus rename), so repeated runs of the same config are byte-identical.
"""

from __future__ import annotations

import json
import math
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .errors import DegenwaveError, RangeError, SchemaError
from .grid import Field, Grid
from .piecewise import DEFAULT_TOL, PiecewiseFunction, burgers, constant, identity, linear
from .solver import RunResult, SchemeParams, max_stable_dt, run

THREADS_ENV_VAR = "DEGENWAVE_THREADS"
DEFAULT_SNAPSHOT_COUNT = 33

SINGLE_CHECKS = {
    "conservation": (),
    "decay": ("threshold",),
    "cutoff_convergence": ("band_lo", "band_hi", "threshold"),
    "entropy_residual": ("comparison_constant",),
    "squeeze_bounds": ("shift_upper", "shift_lower"),
    "profile": ("t_lo", "threshold"),
}
PAIR_CHECKS = {
    "contraction": (),
    "t_nonexpansive": ("tolerance",),
}
_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_TERM_RE = re.compile(
    rf"^(?:(?P<coef>{_NUM})\*)?(?P<fn>sin|cos)\((?P<freq>{_NUM})\)$|^(?P<const>{_NUM})$"
)


@dataclass(frozen=True)
class CheckSpec:
    name: str
    params: tuple[tuple[str, float], ...] = ()

    def param_dict(self) -> dict:
        return dict(self.params)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    phi: PiecewiseFunction
    g: PiecewiseFunction
    initial: tuple[tuple[str, object], ...]   # canonicalized JSON items
    grid_cells: int
    scheme: SchemeParams
    checks: tuple[CheckSpec, ...] = ()
    initial_b: tuple[tuple[str, object], ...] | None = None
    seed: int = 0
    tol: float = DEFAULT_TOL


@dataclass
class ScenarioResult:
    name: str
    reports: list[diag.CheckReport]
    error: str | None = None
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and all(r.passed for r in self.reports)


@dataclass
class SuiteSummary:
    results: list[ScenarioResult]
    overall_pass: bool
    timings: dict[str, float] = field(default_factory=dict)


# -- initial-data builders -----------------------------------------------------


def _parse_expression(text: str, path: str) -> list[tuple[float, str, float]]:
    """Sums of scaled sin/cos/constants, e.g. ``0.5 + 0.25*sin(1) - 0.1*cos(2)``.

    Terms are joined by ``+`` or ``-`` surrounded by spaces; ``sin(k)`` means
    sin(2 pi k x) at cell centers.
    """
    tokens = re.split(r"\s+([+\-])\s+", text.strip())
    if not tokens or not tokens[0]:
        raise SchemaError(path, "empty expression")
    terms = []
    sign = 1.0
    for i, tok in enumerate(tokens):
        if i % 2 == 1:
            sign = 1.0 if tok == "+" else -1.0
            continue
        m = _TERM_RE.match(tok.strip())
        if not m:
            raise SchemaError(path, f"cannot parse term {tok!r}")
        if m.group("const") is not None:
            terms.append((sign * float(m.group("const")), "const", 0.0))
        else:
            coef = float(m.group("coef")) if m.group("coef") else 1.0
            terms.append((sign * coef, m.group("fn"), float(m.group("freq"))))
        sign = 1.0
    return terms


def build_initial(spec: dict, grid: Grid, path: str = "/initial") -> Field:
    """Materialize an initial-data spec on a grid (values at cell centers)."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SchemaError(path, "expected exactly one of sine/step/cells/expression")
    ((kind, body),) = spec.items()
    x = grid.cell_centers()
    if kind in ("sine", "step") and not isinstance(body, dict):
        raise SchemaError(f"{path}/{kind}", "expected an object of parameters")
    if kind == "sine":
        mean = float(body.get("mean", 0.0))
        amp = float(body.get("amplitude", 0.0))
        freq = float(body.get("frequency", 1.0))
        return Field(grid, mean + amp * np.sin(2.0 * np.pi * freq * x))
    if kind == "step":
        try:
            left = float(body["left"])
            right = float(body["right"])
            split = float(body["split"])
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"{path}/step", f"need numeric left/right/split: {e}") from e
        return Field(grid, np.where(x < split, left, right))
    if kind == "cells":
        try:
            arr = np.asarray(body, dtype=float)
        except (TypeError, ValueError) as e:
            raise SchemaError(f"{path}/cells", f"values must be numbers: {e}") from e
        if arr.shape != (grid.n_cells,):
            raise SchemaError(f"{path}/cells",
                              f"expected {grid.n_cells} values, got {arr.size}")
        return Field(grid, arr)
    if kind == "expression":
        vals = np.zeros_like(x)
        for coef, fn, freq in _parse_expression(str(body), f"{path}/expression"):
            if fn == "const":
                vals = vals + coef
            elif fn == "sin":
                vals = vals + coef * np.sin(2.0 * np.pi * freq * x)
            else:
                vals = vals + coef * np.cos(2.0 * np.pi * freq * x)
        return Field(grid, vals)
    raise SchemaError(path, f"unknown initial-data kind {kind!r}")


# -- function specs ------------------------------------------------------------


def _build_function(spec, path: str) -> PiecewiseFunction:
    if not isinstance(spec, dict):
        raise SchemaError(path, "expected an object")
    if "kind" in spec:
        kind = spec["kind"]
        lo = float(spec.get("lo", -2.0))
        hi = float(spec.get("hi", 2.0))
        try:
            if kind == "burgers":
                return burgers(lo, hi)
            if kind == "linear":
                return linear(float(spec.get("slope", 1.0)),
                              float(spec.get("intercept", 0.0)), lo, hi)
            if kind == "identity":
                return identity(lo, hi)
            if kind == "constant":
                return constant(float(spec.get("value", 0.0)), lo, hi)
        except ValueError as e:
            raise RangeError(path, str(e)) from e
        raise SchemaError(f"{path}/kind", f"unknown kind {kind!r}")
    if "breakpoints" not in spec or "pieces" not in spec:
        raise SchemaError(path, "need either kind or breakpoints+pieces")
    try:
        return PiecewiseFunction.from_dict(spec)
    except ValueError as e:
        sub = "breakpoints" if "breakpoint" in str(e) else "pieces"
        raise RangeError(f"{path}/{sub}", str(e)) from e


# -- config parsing -------------------------------------------------------------


def _freeze_initial(spec: dict) -> tuple[tuple[str, object], ...]:
    def freeze(obj):
        if isinstance(obj, dict):
            return tuple((k, freeze(v)) for k, v in obj.items())
        if isinstance(obj, list):
            return tuple(freeze(v) for v in obj)
        return obj

    return freeze(spec)


def _thaw(items):
    if isinstance(items, tuple):
        if all(isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], str) for e in items):
            return {k: _thaw(v) for k, v in items}
        return [_thaw(v) for v in items]
    return items


def initial_spec_dict(cfg_initial) -> dict:
    return _thaw(cfg_initial)


def _parse_scenario(doc: dict, path: str) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise SchemaError(path, "scenario must be an object")
    name = doc.get("name")
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise SchemaError(f"{path}/name",
                          "name must match [A-Za-z0-9._-]+ (used as a directory)")
    for key in doc:
        if key not in {"name", "phi", "g", "initial", "initial_b", "grid",
                       "scheme", "checks", "seed", "tol"}:
            raise SchemaError(f"{path}/{key}", "unknown field")
    if "phi" not in doc or "g" not in doc:
        raise SchemaError(path, "phi and g are required")
    phi = _build_function(doc["phi"], f"{path}/phi")
    g = _build_function(doc["g"], f"{path}/g")
    if not g.monotone_nondecreasing:
        raise SchemaError(f"{path}/g/monotone",
                          "the diffusion function must be monotone nondecreasing")
    grid_spec = doc.get("grid")
    if not isinstance(grid_spec, dict) or "n_cells" not in grid_spec:
        raise SchemaError(f"{path}/grid", "grid.n_cells is required")
    n_cells = grid_spec["n_cells"]
    if not isinstance(n_cells, int) or n_cells < 4:
        raise SchemaError(f"{path}/grid/n_cells", "n_cells must be an integer >= 4")
    scheme_spec = doc.get("scheme")
    if not isinstance(scheme_spec, dict) or "t_end" not in scheme_spec:
        raise SchemaError(f"{path}/scheme", "scheme.t_end is required")
    t_end = float(scheme_spec["t_end"])
    cfl = scheme_spec.get("cfl_safety", 0.5)
    times = scheme_spec.get("snapshot_times")
    if times is None:
        if t_end > 0.0:
            times = [i * t_end / (DEFAULT_SNAPSHOT_COUNT - 1)
                     for i in range(DEFAULT_SNAPSHOT_COUNT)]
        else:
            times = [0.0]
    try:
        scheme = SchemeParams(t_end=t_end, cfl_safety=float(cfl),
                              snapshot_times=tuple(float(t) for t in times))
    except ValueError as e:
        sub = "cfl_safety" if "cfl" in str(e) else (
            "snapshot_times" if "snapshot" in str(e) else "t_end")
        raise SchemaError(f"{path}/scheme/{sub}", str(e)) from e
    if "initial" not in doc:
        raise SchemaError(f"{path}/initial", "initial data spec is required")
    grid = Grid(n_cells)
    u0 = build_initial(doc["initial"], grid, f"{path}/initial")
    fields = [u0]
    initial_b = None
    if "initial_b" in doc:
        fields.append(build_initial(doc["initial_b"], grid, f"{path}/initial_b"))
        initial_b = _freeze_initial(doc["initial_b"])
    for f0 in fields:
        sup = float(np.max(np.abs(f0.values)))
        for fname, fn in (("phi", phi), ("g", g)):
            if not fn.covers(-sup, sup):
                raise SchemaError(
                    f"{path}/{fname}",
                    f"must cover [-{sup!r}, {sup!r}] for this initial data",
                )
    checks: list[CheckSpec] = []
    for i, entry in enumerate(doc.get("checks", [])):
        cpath = f"{path}/checks/{i}"
        if isinstance(entry, str):
            entry = {"name": entry}
        if not isinstance(entry, dict) or "name" not in entry:
            raise SchemaError(cpath, "check must be a name or an object with one")
        cname = entry["name"]
        if cname in PAIR_CHECKS:
            allowed = PAIR_CHECKS[cname]
            if initial_b is None:
                raise SchemaError(f"{cpath}/name",
                                  f"{cname} needs a second initial condition (initial_b)")
        elif cname in SINGLE_CHECKS:
            allowed = SINGLE_CHECKS[cname]
        else:
            raise SchemaError(f"{cpath}/name", f"unknown check {cname!r}")
        params = []
        for key, val in entry.items():
            if key == "name":
                continue
            if key not in allowed:
                raise SchemaError(f"{cpath}/{key}",
                                  f"{cname} does not accept parameter {key!r}")
            params.append((key, float(val)))
        checks.append(CheckSpec(cname, tuple(sorted(params))))
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise SchemaError(f"{path}/seed", "seed must be an integer")
    tol = float(doc.get("tol", DEFAULT_TOL))
    return ScenarioConfig(
        name=name, phi=phi, g=g, initial=_freeze_initial(doc["initial"]),
        grid_cells=n_cells, scheme=scheme, checks=tuple(checks),
        initial_b=initial_b, seed=seed, tol=tol,
    )


def parse_config(text):
    """Parse a UTF-8 JSON document into one config or a list of configs."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("/", f"invalid JSON: {e}") from e
    if isinstance(doc, list):
        return [_parse_scenario(entry, f"/{i}") for i, entry in enumerate(doc)]
    return _parse_scenario(doc, "")


def serialize_config(cfg: ScenarioConfig) -> dict:
    doc = {
        "name": cfg.name,
        "phi": cfg.phi.to_dict(),
        "g": cfg.g.to_dict(),
        "initial": initial_spec_dict(cfg.initial),
        "grid": {"n_cells": cfg.grid_cells},
        "scheme": {
            "t_end": cfg.scheme.t_end,
            "cfl_safety": cfg.scheme.cfl_safety,
            "snapshot_times": list(cfg.scheme.snapshot_times),
        },
        "checks": [{"name": c.name, **c.param_dict()} for c in cfg.checks],
        "seed": cfg.seed,
        "tol": cfg.tol,
    }
    if cfg.initial_b is not None:
        doc["initial_b"] = initial_spec_dict(cfg.initial_b)
    return doc


def config_to_json(cfg) -> str:
    if isinstance(cfg, list):
        return json.dumps([serialize_config(c) for c in cfg], indent=2)
    return json.dumps(serialize_config(cfg), indent=2)


# -- execution -------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_snapshots_csv(path: Path, result: RunResult) -> None:
    lines = [",".join([_fmt(t)] + [_fmt(v) for v in f.values])
             for t, f in result.snapshots]
    _write_text_atomic(path, "\n".join(lines) + "\n")


def _write_series_csv(path: Path, series) -> None:
    lines = ["time,value"] + [f"{_fmt(t)},{_fmt(v)}" for t, v in series]
    _write_text_atomic(path, "\n".join(lines) + "\n")


def _write_profile_csv(path: Path, estimate: diag.ProfileEstimate) -> None:
    centers = estimate.profile.grid.cell_centers()
    lines = ["x,value"] + [f"{_fmt(x)},{_fmt(v)}"
                           for x, v in zip(centers, estimate.profile.values)]
    _write_text_atomic(path, "\n".join(lines) + "\n")


def _failed_report(name: str, exc: Exception) -> diag.CheckReport:
    return diag.CheckReport(name, observed=math.inf, threshold=0.0,
                            extra={"error": f"{type(exc).__name__}: {exc}"})


def _run_checks(cfg: ScenarioConfig, result: RunResult,
                result_b: RunResult | None, out: Path) -> list[diag.CheckReport]:
    reports: list[diag.CheckReport] = []
    for spec in cfg.checks:
        p = spec.param_dict()
        try:
            if spec.name == "conservation":
                rep = diag.conservation_monitor(result)
            elif spec.name == "decay":
                rep = diag.decay_metric(result, threshold=p.get("threshold"))
            elif spec.name == "cutoff_convergence":
                rep = diag.cutoff_convergence(result, band_lo=p.get("band_lo"),
                                              band_hi=p.get("band_hi"),
                                              threshold=p.get("threshold"))
            elif spec.name == "entropy_residual":
                rep = diag.entropy_residual(
                    result, cfg.phi, cfg.g,
                    comparison_constant=p.get("comparison_constant",
                                              diag.ENTROPY_COMPARISON_CONSTANT))
            elif spec.name == "squeeze_bounds":
                rep = diag.squeeze_bounds(result, cfg.phi, cfg.g,
                                          shift_upper=p.get("shift_upper"),
                                          shift_lower=p.get("shift_lower"))
            elif spec.name == "profile":
                t_lo = p.get("t_lo", 0.5 * cfg.scheme.t_end)
                est = diag.extract_profile(result, t_lo=t_lo,
                                           threshold=p.get("threshold"))
                tail_worst = max(v for _, v in est.residual_history)
                rep = diag.CheckReport(
                    "profile", observed=tail_worst, threshold=est.threshold,
                    series=est.residual_history,
                    extra={"speed_used": est.speed_used,
                           "converged": est.converged})
                _write_profile_csv(out / "profile.csv", est)
            elif spec.name == "contraction":
                rep = diag.contraction_monitor(result, result_b)
            elif spec.name == "t_nonexpansive":
                rep = diag.t_nonexpansive_from_runs(result, result_b,
                                                    tolerance=p.get("tolerance"))
            else:  # unreachable after parse validation
                raise SchemaError("/checks", f"unknown check {spec.name!r}")
        except Exception as e:  # a failed check must not abort the batch
            rep = _failed_report(spec.name, e)
        reports.append(rep)
        if rep.series is not None:
            _write_series_csv(out / f"series_{spec.name}.csv", rep.series)
    return reports


def run_scenario(cfg: ScenarioConfig, out_dir) -> ScenarioResult:
    """Execute one scenario and write its artifacts under ``out_dir/<name>/``."""
    started = time.perf_counter()
    out = Path(out_dir) / cfg.name
    out.mkdir(parents=True, exist_ok=True)
    grid = Grid(cfg.grid_cells)
    u0 = build_initial(initial_spec_dict(cfg.initial), grid)
    error = None
    reports: list[diag.CheckReport] = []
    try:
        result = run(cfg.phi, cfg.g, u0, cfg.scheme, cfg.tol)
        result_b = None
        if cfg.initial_b is not None:
            # both trajectories advance with one shared admissible step so the
            # pair checks compare states at identical times
            u0b = build_initial(initial_spec_dict(cfg.initial_b), grid)
            cap_b = cfg.scheme.cfl_safety * max_stable_dt(
                cfg.phi, cfg.g, float(u0b.values.min()), float(u0b.values.max()),
                grid.dx)
            dt_shared = min(result.dt, cap_b)
            if dt_shared != result.dt:
                result = run(cfg.phi, cfg.g, u0, cfg.scheme, cfg.tol, _dt=dt_shared)
            result_b = run(cfg.phi, cfg.g, u0b, cfg.scheme, cfg.tol, _dt=dt_shared)
    except DegenwaveError as e:
        error = f"{type(e).__name__}: {e}"
        reports = [_failed_report(spec.name, e) for spec in cfg.checks]
    else:
        _write_snapshots_csv(out / "snapshots.csv", result)
        _write_text_atomic(out / "structure.json",
                           json.dumps(result.structure.to_dict(), indent=2) + "\n")
        if result_b is not None:
            _write_snapshots_csv(out / "snapshots_b.csv", result_b)
            _write_text_atomic(out / "structure_b.json",
                               json.dumps(result_b.structure.to_dict(), indent=2) + "\n")
        reports = _run_checks(cfg, result, result_b, out)
    payload = [r.to_dict() for r in reports]
    if error is not None:
        payload = {"error": error, "checks": payload}
    _write_text_atomic(out / "checks.json", json.dumps(payload, indent=2) + "\n")
    return ScenarioResult(cfg.name, reports, error,
                          time.perf_counter() - started)


def _thread_count(explicit: int | None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def run_suite(cfgs: list[ScenarioConfig], out_dir, threads: int | None = None) -> SuiteSummary:
    """Run a batch of scenarios (optionally in parallel) and write summary.json.

    Scenarios share nothing, so parallelism cannot change any output; the
    summary lists scenarios in config order regardless of completion order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = min(_thread_count(threads), max(len(cfgs), 1))
    if workers == 1:
        results = [run_scenario(cfg, out) for cfg in cfgs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda cfg: run_scenario(cfg, out), cfgs))
    overall = all(r.passed for r in results)
    summary = {
        "scenarios": [
            {
                "name": r.name,
                "checks": [
                    {"name": c.name, "passed": c.passed,
                     "observed": c.observed, "threshold": c.threshold}
                    for c in r.reports
                ],
            }
            for r in results
        ],
        "overall_pass": overall,
    }
    _write_text_atomic(out / "summary.json", json.dumps(summary, indent=2) + "\n")
    timings = {r.name: r.elapsed for r in results}
    return SuiteSummary(results, overall, timings)
