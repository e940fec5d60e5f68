"""Scenario-driven command line front end.

One scenario per invocation, defined in an INI-style file with nested
sections: the flow, the cocycle, the target space, time grids and scan
overrides.  Reports land as JSON and flat CSV in the output directory.

Exit codes: 0 on a passing run, 1 on a reported analytic failure, and 2 on
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import criteria, intertwine
from .cocycle import resolve_cocycle
from .errors import ConfigError, ExtractionError, PreconditionError, SemiflowLabError
from .flow import resolve_flow, verify_semiflow
from .spaces import SpaceSpec


def _utc_stamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for row in rows:
            writer.writerow(row)


def load_scenario(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse scenario file {path}: {exc}")
    if not read:
        raise ConfigError(f"scenario file {path} not found")
    if not parser.has_section("scenario") or not parser.get("scenario", "name", fallback=""):
        raise ConfigError("scenario file needs a [scenario] section with a name")
    return parser


def _floats(text: str):
    return [float(v) for v in text.replace(",", " ").split()]


def _build_flow(cfg):
    try:
        return resolve_flow(cfg.get("flow", "gallery"))
    except (configparser.Error, PreconditionError) as exc:
        raise ConfigError(f"bad flow spec: {exc}")


def _build_cocycle(cfg, flow):
    # an inadmissible coboundary is an analytic rejection, not a config
    # problem, so only name/parse issues become ConfigError here
    try:
        return resolve_cocycle(cfg.get("cocycle", "gallery", fallback="unit"), flow)
    except (configparser.Error, PreconditionError) as exc:
        raise ConfigError(f"bad cocycle spec: {exc}")


def _build_space(cfg):
    if not cfg.has_section("space"):
        return None
    try:
        return SpaceSpec.parse(cfg.get("space", "spec"))
    except (configparser.Error, PreconditionError) as exc:
        raise ConfigError(f"bad space spec: {exc}")


def _seed_of(cfg, args):
    return args.seed if args.seed is not None else cfg.getint("scenario", "seed",
                                                              fallback=0)


def _scan_from(cfg, args) -> criteria.SupScanConfig:
    scan = criteria.DEFAULT_SCAN
    overrides = {}
    if cfg.has_section("scan"):
        for key in ("ladder_depth", "n_angles", "refine_rounds", "angular_base",
                    "angular_cap", "disk_angular_cap", "disk_radial_base"):
            if cfg.has_option("scan", key):
                overrides[key] = cfg.getint("scan", key)
        for key in ("refine_contraction", "bound_threshold", "stability_rel"):
            if cfg.has_option("scan", key):
                overrides[key] = cfg.getfloat("scan", key)
    if args.threads:
        overrides["threads"] = args.threads
    return replace(scan, **overrides) if overrides else scan


def _report_header(cfg, seed) -> dict:
    return {"scenario": cfg.get("scenario", "name"), "seed": seed,
            "generated_at": _utc_stamp()}


def cmd_flow_verify(args) -> int:
    cfg = load_scenario(args.scenario)
    flow = _build_flow(cfg)
    seed = _seed_of(cfg, args)
    tol = args.tol if args.tol is not None else cfg.getfloat("scenario", "tol", fallback=1e-8)
    t_grid = _floats(cfg.get("grid", "t_values", fallback="")) or None
    report = verify_semiflow(flow, t_grid=t_grid, tol=tol)
    payload = _report_header(cfg, seed)
    payload["flow"] = flow.name
    payload["report"] = {k: (v if not isinstance(v, float) or np.isfinite(v) else None)
                         for k, v in report.to_dict().items()}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.get("scenario", "name")
    if args.format in ("json", "both"):
        _write_json(out / f"{name}.flow.json", payload)
    if args.format in ("csv", "both"):
        rows = [("field", "value")] + sorted(report.to_dict().items())
        _write_csv(out / f"{name}.flow.csv", rows)
    print(f"flow-verify {flow.name}: {'pass' if report.passed else 'FAIL'} "
          f"(law residual {report.max_law_residual:.3g})")
    return 0 if report.passed else 1


def cmd_verdict(args) -> int:
    cfg = load_scenario(args.scenario)
    flow = _build_flow(cfg)
    cocycle = _build_cocycle(cfg, flow)
    space = _build_space(cfg)
    seed = _seed_of(cfg, args)
    if space is None:
        raise ConfigError("verdict needs a [space] section")
    if space.p <= 1:
        raise ConfigError("the criterion equivalences need p > 1; "
                          "use the decay command for p = 1")
    t_grid = _floats(cfg.get("grid", "t_values", fallback="")) or None
    scan = _scan_from(cfg, args)
    report = criteria.uniform_bound_verdict(flow, cocycle, space, t_grid=t_grid, scan=scan)
    payload = _report_header(cfg, seed)
    payload.update(report.to_json_dict())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.get("scenario", "name")
    if args.format in ("json", "both"):
        _write_json(out / f"{name}.criterion.json", payload)
    if args.format in ("csv", "both"):
        _write_csv(out / f"{name}.criterion.csv", report.csv_rows())
    print(f"verdict {flow.name}/{cocycle.name} on {space.label()}: {report.verdict}")
    return 0 if report.verdict == "BOUNDED" else 1


def cmd_decay(args) -> int:
    cfg = load_scenario(args.scenario)
    flow = _build_flow(cfg)
    cocycle = _build_cocycle(cfg, flow)
    space = _build_space(cfg)
    seed = _seed_of(cfg, args)
    if space is None:
        raise ConfigError("decay needs a [space] section")
    tol = args.tol if args.tol is not None else cfg.getfloat("scenario", "decay_tol",
                                                             fallback=1e-3)
    table = criteria.direct_decay_probe(flow, cocycle, space, tol=tol)
    payload = _report_header(cfg, seed)
    payload.update(table.to_json_dict())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.get("scenario", "name")
    if args.format in ("json", "both"):
        _write_json(out / f"{name}.decay.json", payload)
    if args.format in ("csv", "both"):
        _write_csv(out / f"{name}.decay.csv", table.csv_rows())
    print(f"decay {flow.name}/{cocycle.name} on {space.label()}: "
          f"{'decays' if table.decayed else 'NO DECAY'}")
    return 0 if table.decayed else 1


def cmd_intertwine(args) -> int:
    try:
        t_family, t_values, space = intertwine.load_bundle(args.bundle)
    except PreconditionError as exc:
        raise ConfigError(str(exc))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = Path(args.bundle).parent.name or "bundle"
    payload = {"bundle": str(args.bundle), "space": space.label(),
               "generated_at": _utc_stamp(), "seed": args.seed or 0}
    try:
        semiflow, cocycle, report = intertwine.extract_semigroup(t_family, t_values)
    except ExtractionError as exc:
        payload["error"] = str(exc)
        payload["failed_at"] = exc.t
        _write_json(out / f"{name}.intertwine.json", payload)
        print(f"intertwine: extraction FAILED at t = {exc.t:g}")
        return 1
    payload["report"] = report.to_json_dict()
    _write_json(out / f"{name}.intertwine.json", payload)
    grid = np.linspace(0.05, 0.85, 9) * np.exp(1j * np.linspace(0.0, 5.5, 9))
    rows = [("t", "z_re", "z_im", "m_re", "m_im", "phi_re", "phi_im")]
    for t in t_values:
        mv = cocycle.eval(float(t), grid)
        pv = semiflow(float(t), grid)
        for z, m_val, p_val in zip(grid, mv, pv):
            rows.append((t, z.real, z.imag, m_val.real, m_val.imag, p_val.real, p_val.imag))
    _write_csv(out / f"{name}.symbols.csv", rows)
    print(f"intertwine: extraction {'pass' if report.passed else 'FAIL'} "
          f"(flow law residual {report.flow_law_residual:.3g})")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiflow-lab",
        description="semiflow / weighted-composition-semigroup laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_scenario=True):
        if needs_scenario:
            p.add_argument("--scenario", required=True, help="scenario INI file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get("SEMIFLOW_LAB_THREADS", "0") or 0))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--format", choices=("json", "csv", "both"), default="both")

    common(sub.add_parser("flow-verify", help="check the semiflow axioms"))
    common(sub.add_parser("verdict", help="uniform-bound criterion verdict"))
    common(sub.add_parser("decay", help="direct strong-continuity decay table"))
    p_int = sub.add_parser("intertwine", help="extract symbols from a matrix bundle")
    p_int.add_argument("--bundle", required=True, help="bundle manifest JSON")
    common(p_int, needs_scenario=False)
    return parser


_COMMANDS = {
    "flow-verify": cmd_flow_verify,
    "verdict": cmd_verdict,
    "decay": cmd_decay,
    "intertwine": cmd_intertwine,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SemiflowLabError as exc:
        print(f"analytic failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
