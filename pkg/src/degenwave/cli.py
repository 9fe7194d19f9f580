"""Command-line entry point.

Subcommands:

* ``run --config FILE --out DIR``: one scenario, artifacts under DIR/<name>/.
* ``suite --config FILE --out DIR``: a batch (object or array) plus summary.json.
* ``analyze --config FILE``: print the structure report as JSON, no stepping.
* ``pair --config FILE --out DIR``: two-initial-data scenario; the contraction
  and profile-distance checks are added when not listed.

Exit codes: 0 all checks passed, 1 some check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import scenarios
from .errors import DegenwaveError, SchemaError
from .grid import Grid
from .scenarios import CheckSpec, ScenarioConfig, build_initial, initial_spec_dict
from .structure import analyze


def _load(path: str):
    try:
        text = Path(path).read_bytes()
    except OSError as e:
        raise SchemaError("/", f"cannot read config file: {e}") from e
    return scenarios.parse_config(text)


def _load_single(path: str) -> ScenarioConfig:
    cfg = _load(path)
    if isinstance(cfg, list):
        raise SchemaError("/", "expected a single scenario object, got an array")
    return cfg


def _cmd_run(args) -> int:
    result = scenarios.run_scenario(_load_single(args.config), args.out)
    for rep in result.reports:
        print(f"{result.name}/{rep.name}: {'pass' if rep.passed else 'FAIL'} "
              f"(observed={rep.observed:g}, threshold={rep.threshold:g})")
    if result.error:
        print(f"{result.name}: error: {result.error}", file=sys.stderr)
    return 0 if result.passed else 1


def _cmd_suite(args) -> int:
    cfg = _load(args.config)
    cfgs = cfg if isinstance(cfg, list) else [cfg]
    summary = scenarios.run_suite(cfgs, args.out, threads=args.threads)
    for res in summary.results:
        status = "pass" if res.passed else "FAIL"
        print(f"{res.name}: {status} ({len(res.reports)} checks, {res.elapsed:.2f}s)")
    print(f"overall: {'pass' if summary.overall_pass else 'FAIL'}")
    return 0 if summary.overall_pass else 1


def _cmd_analyze(args) -> int:
    cfg = _load_single(args.config)
    grid = Grid(cfg.grid_cells)
    u0 = build_initial(initial_spec_dict(cfg.initial), grid)
    report = analyze(cfg.phi, cfg.g, u0, cfg.tol)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_pair(args) -> int:
    cfg = _load_single(args.config)
    if cfg.initial_b is None:
        raise SchemaError("/initial_b", "pair scenarios need a second initial condition")
    names = {c.name for c in cfg.checks}
    extra = [CheckSpec(n) for n in ("contraction", "t_nonexpansive") if n not in names]
    if extra:
        cfg = replace(cfg, checks=cfg.checks + tuple(extra))
    result = scenarios.run_scenario(cfg, args.out)
    for rep in result.reports:
        print(f"{result.name}/{rep.name}: {'pass' if rep.passed else 'FAIL'} "
              f"(observed={rep.observed:g}, threshold={rep.threshold:g})")
    return 0 if result.passed else 1


def cli(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="degenwave",
        description="Periodic degenerate convection-diffusion laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_out in (
        ("run", _cmd_run, True),
        ("suite", _cmd_suite, True),
        ("analyze", _cmd_analyze, False),
        ("pair", _cmd_pair, True),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        if needs_out:
            p.add_argument("--out", required=True)
        if name == "suite":
            p.add_argument("--threads", type=int, default=None)
        p.set_defaults(handler=fn)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        return args.handler(args)
    except SchemaError as e:
        print(f"config error at {e.path or '/'}: {e.message}", file=sys.stderr)
        return 2
    except DegenwaveError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli(sys.argv[1:]))
