"""Command line entry points for scenario studies.

Subcommands
  run      solve a scenario grid: cells/<name>.json, summary.csv, comparison.csv
  sweep    transponder-cost sweep over the same grid: sweep.csv
  solve    one instance, one architecture: report JSON
  catalog  dump the cost catalog as CSV
  paths    build the admissible path catalog and report its size

A scenario grid is the cross product volumes x speed sets x transponder
scales x architectures, each cell named like `10G-DFN-3T-OPT` (speed set,
matrix token, total volume in Tbps, optional `s<scale>` when the transponder
scale is not 1, architecture). Cell names parse back into their parameters.

Exit codes: 0 success, 1 at least one cell failed (solver gave up, errored,
or a requested report could not be produced; "not feasible" is a result, not
a failure), 2 configuration/usage errors.

Reruns with the same config and seed write byte-identical outputs; wall
times never enter any report.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import metrics
from .costcat import build_cost_catalog, dump_catalog_csv
from .formats import read_instance, read_sndlib
from .milp import build_model, build_transparent_variant, export_model
from .netmodel import (MODE_OPTIMIZED, MODE_TRANSPARENT, Instance,
                       scale_demand_matrix, synth_matrix)
from .pathgen import build_catalog, dump_paths
from .solve import FEASIBLE, INFEASIBLE, OPTIMAL, UNKNOWN, solve_exact, solve_heuristic

SOLVERS = ("exact", "heuristic", "export-only")
ARCHITECTURES = (MODE_OPTIMIZED, MODE_TRANSPARENT)
ARCH_TAG = {MODE_OPTIMIZED: "OPT", MODE_TRANSPARENT: "TRA"}
TAG_ARCH = {v: k for k, v in ARCH_TAG.items()}
SPEED_TAGS = {(10,): "10G", (100,): "100G", (10, 100): "10+100G"}
TAG_SPEEDS = {v: k for k, v in SPEED_TAGS.items()}
MATRIX_TOKEN = re.compile(r"^[A-Z][A-Z0-9+]*$")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CellSpec:
    """One point of the scenario grid."""

    matrix: str
    volume: int
    speeds: tuple
    scale: Fraction
    architecture: str


def render_cell_name(cell: CellSpec) -> str:
    parts = [SPEED_TAGS[cell.speeds], cell.matrix,
             f"{float(cell.volume) / 1000:g}T"]
    if cell.scale != 1:
        parts.append(f"s{float(cell.scale):g}")
    parts.append(ARCH_TAG[cell.architecture])
    return "-".join(parts)


def parse_cell_name(name: str) -> CellSpec:
    parts = name.split("-")
    if len(parts) not in (4, 5):
        raise ConfigError(f"malformed cell name {name!r}")
    speed_tag, matrix, vol = parts[0], parts[1], parts[2]
    scale = Fraction(1)
    if len(parts) == 5:
        if not re.match(r"^s\d+(\.\d+)?$", parts[3]):
            raise ConfigError(f"malformed scale tag in {name!r}")
        scale = Fraction(parts[3][1:])
    arch_tag = parts[-1]
    if speed_tag not in TAG_SPEEDS or arch_tag not in TAG_ARCH \
            or not MATRIX_TOKEN.match(matrix) \
            or not re.match(r"^\d+(\.\d+)?T$", vol):
        raise ConfigError(f"malformed cell name {name!r}")
    volume = Fraction(vol[:-1]) * 1000
    if volume.denominator != 1:
        raise ConfigError(f"volume in {name!r} is not a whole Gbps count")
    return CellSpec(matrix, int(volume), TAG_SPEEDS[speed_tag], scale, TAG_ARCH[arch_tag])


@dataclass
class ScenarioConfig:
    instance: str
    matrix_name: str = "MTX"
    matrix_source: str = "instance"      # "instance" | "synthetic"
    synthetic: dict | None = None        # mode/weights/hub/hub_factor
    volumes: tuple = ()                  # empty: keep the matrix total as is
    speeds: tuple = ((10, 100),)
    architectures: tuple = ARCHITECTURES
    scales: tuple = (Fraction(1),)
    solver: str = "heuristic"
    seed: int = 0
    out: str = "results"


def load_config(path: str | None, args: argparse.Namespace) -> ScenarioConfig:
    """Config file merged with flag overrides; flags win."""
    raw = {}
    if path:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
    known = {"instance", "matrix", "volumes", "speeds", "architectures",
             "transponder_scales", "solver", "seed", "out"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")

    instance = getattr(args, "instance", None) or raw.get("instance")
    if not instance:
        raise ConfigError("an instance file is required (--instance or config)")

    matrix = raw.get("matrix", {})
    if not isinstance(matrix, dict):
        raise ConfigError("config key 'matrix' must be an object")
    matrix_name = matrix.get("name", "MTX")
    if not MATRIX_TOKEN.match(matrix_name):
        raise ConfigError(f"matrix name {matrix_name!r} must be uppercase alphanumeric")
    matrix_source = matrix.get("source", "instance")
    if matrix_source not in ("instance", "synthetic"):
        raise ConfigError(f"unknown matrix source {matrix_source!r}")
    synthetic = None
    if matrix_source == "synthetic":
        synthetic = {k: v for k, v in matrix.items() if k not in ("name", "source")}
        if synthetic.get("mode") not in ("decentralized", "centralized"):
            raise ConfigError(
                "synthetic matrix needs mode 'decentralized' or 'centralized'")

    def int_list(key, default):
        vals = raw.get(key, default)
        if not isinstance(vals, list) or not all(isinstance(v, int) and v >= 0 for v in vals):
            raise ConfigError(f"config key {key!r} must be a list of non-negative integers")
        return tuple(vals)

    volumes = int_list("volumes", [])
    speeds_raw = raw.get("speeds", [[10, 100]])
    speeds = []
    for s in speeds_raw:
        t = tuple(sorted(set(s))) if isinstance(s, list) else None
        if t not in SPEED_TAGS:
            raise ConfigError(f"unsupported speed set {s!r}")
        speeds.append(t)
    archs = tuple(raw.get("architectures", list(ARCHITECTURES)))
    for a in archs:
        if a not in ARCHITECTURES:
            raise ConfigError(f"unknown architecture {a!r}")
    scales_raw = raw.get("transponder_scales", [1])
    scales = []
    for s in scales_raw:
        try:
            f = Fraction(str(s))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad transponder scale {s!r}") from None
        if f < 1:
            raise ConfigError(f"transponder scale {s!r} is below 1")
        scales.append(f)

    solver = getattr(args, "solver", None) or raw.get("solver", "heuristic")
    if solver not in SOLVERS:
        raise ConfigError(f"unknown solver {solver!r}")
    seed = args.seed if getattr(args, "seed", None) is not None else raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    out = getattr(args, "out", None) or raw.get("out", "results")

    if matrix_source == "synthetic" and not volumes:
        raise ConfigError("synthetic matrices need explicit target volumes")
    return ScenarioConfig(instance=instance, matrix_name=matrix_name,
                          matrix_source=matrix_source, synthetic=synthetic,
                          volumes=volumes, speeds=tuple(speeds),
                          architectures=archs, scales=tuple(scales),
                          solver=solver, seed=seed, out=out)


def read_instance_file(path: str) -> Instance:
    return read_instance(Path(path).read_text())


def scenario_grid(config: ScenarioConfig, architectures=None) -> list[CellSpec]:
    base = read_instance_file(config.instance)
    volumes = config.volumes
    if not volumes:
        volumes = (int(base.total_demand()),)
    cells = []
    for volume in volumes:
        for speeds in config.speeds:
            for scale in config.scales:
                for arch in (architectures or config.architectures):
                    cells.append(CellSpec(config.matrix_name, volume, speeds,
                                          scale, arch))
    return cells


def build_cell_instance(base: Instance, config: ScenarioConfig, cell: CellSpec) -> Instance:
    """The base instance re-targeted to one grid point."""
    if config.matrix_source == "synthetic":
        spec = config.synthetic or {}
        weights = spec.get("weights", "uniform")
        if weights == "uniform":
            weights = {i: 1 for i in base.pops}
        missing = [p for p in base.pops if p not in weights]
        if missing:
            raise ConfigError(f"synthetic matrix lacks weights for {missing}")
        demands = synth_matrix(spec["mode"], base.pops, weights, cell.volume,
                               hub=spec.get("hub"),
                               hub_factor=spec.get("hub_factor", 1))
    else:
        raw = {d.pair: Fraction(d.value) for d in base.demands}
        demands = scale_demand_matrix(raw, cell.volume)
    return dataclasses.replace(
        base, demands=tuple(demands), speeds=cell.speeds,
        transponder_scale=cell.scale, mode=cell.architecture,
        name=render_cell_name(cell))


def run_cell(payload: dict) -> dict:
    """Solve one grid cell; pure function of the payload (worker-safe).

    Returns name/status plus whatever the merge step needs: the cell JSON
    document, an optional LP export text, and an error message.
    """
    config = payload["config"]
    cell = payload["cell"]
    name = render_cell_name(cell)
    result = {"name": name, "architecture": cell.architecture, "status": "error",
              "json": None, "lp": None, "error": None, "report": None}
    try:
        base = read_instance_file(config.instance)
        inst = build_cell_instance(base, config, cell)
        cc = build_cost_catalog(inst)
        cat = build_catalog(inst)
        if cell.architecture == MODE_TRANSPARENT:
            model = build_transparent_variant(inst, cat, cc)
        else:
            model = build_model(inst, cat, cc)
        if config.solver == "export-only":
            buf = io.StringIO()
            export_model(model, buf)
            result.update(status="exported", lp=buf.getvalue(),
                          json={"name": name, "architecture": cell.architecture,
                                "status": "exported",
                                "variables": len(model.variables),
                                "constraints": len(model.constraints)})
            return result
        if config.solver == "exact":
            rep = solve_exact(model)
        else:
            rep = solve_heuristic(model, seed=config.seed)
        solver_block = {"solver": config.solver, "status": rep.status,
                        "nodes": rep.nodes_explored, "iterations": rep.iterations}
        if rep.status == INFEASIBLE:
            result.update(status="not feasible",
                          json={"name": name, "architecture": cell.architecture,
                                "status": "not feasible", "solver": solver_block})
        elif rep.status in (OPTIMAL, FEASIBLE):
            tr = metrics.report(model, rep.solution, name=name,
                                status=rep.status)
            doc = metrics.report_json(tr)
            doc["solver"] = solver_block
            result.update(status=rep.status, json=doc, report=tr)
        else:
            result.update(status=UNKNOWN,
                          json={"name": name, "architecture": cell.architecture,
                                "status": UNKNOWN, "solver": solver_block},
                          error="solver gave up without a verdict")
    except (ValueError, OSError) as exc:
        result.update(status="error", error=str(exc),
                      json={"name": name, "architecture": cell.architecture,
                            "status": "error", "error": str(exc)})
    return result


def _run_cells(config: ScenarioConfig, cells: list[CellSpec], jobs: int) -> list[dict]:
    payloads = [{"config": config, "cell": cell} for cell in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_cell, payloads))
    return [run_cell(p) for p in payloads]


def _write_cells(outdir: Path, results: list[dict]) -> None:
    cells_dir = outdir / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    for res in results:
        with open(cells_dir / f"{res['name']}.json", "w") as f:
            json.dump(res["json"], f, indent=2, sort_keys=True)
            f.write("\n")
        if res["lp"] is not None:
            (cells_dir / f"{res['name']}.lp").write_text(res["lp"])


def _summary_rows(results: list[dict]) -> list[list[str]]:
    rows = []
    for res in results:
        if res["report"] is not None:
            rows.append(metrics.report_csv_row(res["report"]))
        elif res["status"] == "not feasible":
            rows.append(metrics.infeasible_csv_row(res["name"], res["architecture"]))
        else:
            pad = [""] * (len(metrics.REPORT_COLUMNS) - 3)
            rows.append([res["name"], res["architecture"], res["status"]] + pad)
    return rows


def run_scenarios(config: ScenarioConfig, jobs: int = 1) -> int:
    """Solve the whole grid and write cell reports plus the two tables."""
    cells = scenario_grid(config)
    results = _run_cells(config, cells, jobs)
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_cells(outdir, results)

    with open(outdir / "summary.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(metrics.REPORT_COLUMNS)
        w.writerows(_summary_rows(results))

    # architecture comparison, one row per scenario, as in the cost tables
    by_name = {res["name"]: res for res in results}
    scenario_keys = []
    for cell in cells:
        key = dataclasses.replace(cell, architecture=MODE_OPTIMIZED)
        if key not in scenario_keys:
            scenario_keys.append(key)
    with open(outdir / "comparison.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["scenario", "transparent_core", "transparent_edge",
                    "transparent_total", "optimized_core", "optimized_edge",
                    "optimized_total", "difference"])
        for key in scenario_keys:
            row_cells = {}
            for arch in ARCHITECTURES:
                res = by_name.get(render_cell_name(
                    dataclasses.replace(key, architecture=arch)))
                if res is None:
                    row_cells[arch] = ["", "", ""]
                elif res["report"] is not None:
                    tr = res["report"]
                    row_cells[arch] = [metrics.fmt_cost(tr.core_cost),
                                       metrics.fmt_cost(tr.edge_cost),
                                       metrics.fmt_cost(tr.total_cost)]
                elif res["status"] == "not feasible":
                    row_cells[arch] = ["not feasible"] * 3
                else:
                    row_cells[arch] = [res["status"]] * 3
            t_res = by_name.get(render_cell_name(
                dataclasses.replace(key, architecture=MODE_TRANSPARENT)))
            o_res = by_name.get(render_cell_name(key))
            if (t_res and o_res and t_res["report"] and o_res["report"]
                    and o_res["report"].total_cost):
                ratio = t_res["report"].total_cost / o_res["report"].total_cost - 1
                diff = f"{float(100 * ratio):+.1f}%"
            else:
                diff = "n/a"
            scenario = render_cell_name(key).rsplit("-", 1)[0]
            w.writerow([scenario] + row_cells[MODE_TRANSPARENT]
                       + row_cells[MODE_OPTIMIZED] + [diff])

    failed = [r for r in results if r["error"] is not None]
    for r in failed:
        print(f"cell {r['name']}: {r['error']}", file=sys.stderr)
    return 1 if failed else 0


def sweep_transponder(config: ScenarioConfig, jobs: int = 1) -> int:
    """Re-optimize per transponder scale; optimized architecture only."""
    cells = scenario_grid(config, architectures=(MODE_OPTIMIZED,))
    results = _run_cells(config, cells, jobs)
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_cells(outdir, results)
    with open(outdir / "sweep.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["name", "scale", "core_cost", "edge_cost", "total_cost",
                    "f_ip", "f_wdm", "opacity", "lambdas", "ip_paths"])
        for cell, res in zip(cells, results):
            base = [res["name"], f"{float(cell.scale):g}"]
            if res["report"] is not None:
                tr = res["report"]
                w.writerow(base + [metrics.fmt_cost(tr.core_cost),
                                   metrics.fmt_cost(tr.edge_cost),
                                   metrics.fmt_cost(tr.total_cost),
                                   metrics.fmt_cost(tr.total_ip),
                                   metrics.fmt_cost(tr.total_wdm),
                                   metrics.fmt_opacity(tr.opacity),
                                   str(tr.lambda_count), str(tr.ip_path_count)])
            else:
                w.writerow(base + [res["status"]] + [""] * 7)
    failed = [r for r in results if r["error"] is not None]
    for r in failed:
        print(f"cell {r['name']}: {r['error']}", file=sys.stderr)
    return 1 if failed else 0


# ----------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wdmplan",
                                description="two-layer IP over WDM network design")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve a scenario grid")
    sweep = sub.add_parser("sweep", help="transponder cost sweep")
    for sp in (run, sweep):
        sp.add_argument("--config", help="scenario config (JSON)")
        sp.add_argument("--instance", help="instance file (overrides config)")
        sp.add_argument("--out", help="output directory (overrides config)")
        sp.add_argument("--solver", choices=SOLVERS, help="overrides config")
        sp.add_argument("--seed", type=int, help="heuristic tie-break seed")
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallel worker processes over cells")

    sv = sub.add_parser("solve", help="solve one instance")
    sv.add_argument("--instance", required=True)
    sv.add_argument("--architecture", choices=ARCHITECTURES, default=MODE_OPTIMIZED)
    sv.add_argument("--solver", choices=("exact", "heuristic"), default="heuristic")
    sv.add_argument("--seed", type=int, default=0)
    sv.add_argument("--out", help="report JSON path (default: stdout)")

    cat = sub.add_parser("catalog", help="dump the cost catalog as CSV")
    cat.add_argument("--out", help="CSV path (default: stdout)")
    cat.add_argument("--speeds", default="10,100", help="e.g. 10,100")
    cat.add_argument("--scale", default="1", help="transponder cost scale")

    pa = sub.add_parser("paths", help="build the admissible path catalog")
    pa.add_argument("--instance", help="native instance file")
    pa.add_argument("--sndlib", help="SNDlib network file instead of --instance")
    pa.add_argument("--pops", help="PoP list file (one node id per line), with --sndlib")
    pa.add_argument("--length-source", default="routing-cost",
                    choices=("routing-cost", "setup-cost", "coordinates"))
    pa.add_argument("--k", type=int, help="paths per pair (overrides instance)")
    pa.add_argument("--max-km", type=float, help="length bound (overrides instance)")
    pa.add_argument("--expect", type=int, help="expected |P|; prints the deviation")
    pa.add_argument("--out", help="write the catalog to this file")
    return p


def _cmd_solve(args) -> int:
    inst = read_instance_file(args.instance)
    if args.architecture != inst.mode:
        inst = dataclasses.replace(inst, mode=args.architecture)
    cc = build_cost_catalog(inst)
    cat = build_catalog(inst)
    if args.architecture == MODE_TRANSPARENT:
        model = build_transparent_variant(inst, cat, cc)
    else:
        model = build_model(inst, cat, cc)
    rep = solve_exact(model) if args.solver == "exact" \
        else solve_heuristic(model, seed=args.seed)
    if rep.status == INFEASIBLE:
        print("not feasible")
        return 1
    if rep.solution is None:
        print(rep.status)
        return 1
    tr = metrics.report(model, rep.solution,
                        name=inst.name or Path(args.instance).stem,
                        status=rep.status)
    if args.out:
        with open(args.out, "w") as f:
            metrics.write_report_json(tr, f)
    else:
        metrics.write_report_json(tr, sys.stdout)
    print(f"{rep.status}: core {metrics.fmt_cost(tr.core_cost)} "
          f"edge {metrics.fmt_cost(tr.edge_cost)} "
          f"total {metrics.fmt_cost(tr.total_cost)}", file=sys.stderr)
    return 0


def _cmd_catalog(args) -> int:
    speeds = tuple(int(s) for s in args.speeds.split(","))
    scale = Fraction(args.scale)
    if args.out:
        with open(args.out, "w", newline="") as f:
            dump_catalog_csv(f, speeds=speeds, transponder_scale=scale)
    else:
        dump_catalog_csv(sys.stdout, speeds=speeds, transponder_scale=scale)
    return 0


def _cmd_paths(args) -> int:
    if bool(args.instance) == bool(args.sndlib):
        raise ConfigError("exactly one of --instance / --sndlib is required")
    if args.instance:
        inst = read_instance_file(args.instance)
    else:
        if not args.pops:
            raise ConfigError("--sndlib needs --pops (the PoP list is input data)")
        net = read_sndlib(Path(args.sndlib).read_text(),
                          length_source=args.length_source)
        pops = tuple(line.strip() for line in Path(args.pops).read_text().splitlines()
                     if line.strip() and not line.lstrip().startswith("#"))
        inst = Instance(graph=net.graph, pops=pops, demands=())
    overrides = {}
    if args.k:
        overrides["max_paths_per_pair"] = args.k
    if args.max_km:
        overrides["max_path_km"] = Fraction(str(args.max_km))
    if overrides:
        inst = dataclasses.replace(inst, **overrides)
    cat = build_catalog(inst)
    n = len(cat.paths)
    print(f"paths: {n}")
    print(f"pairs without any admissible path: {len(cat.empty_pairs())}")
    if args.expect:
        dev = 100 * (n - args.expect) / args.expect
        print(f"expected {args.expect}: deviation {dev:+.2f}%")
    if args.out:
        with open(args.out, "w") as f:
            dump_paths(cat, f)
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            return run_scenarios(load_config(args.config, args), jobs=args.jobs)
        if args.command == "sweep":
            return sweep_transponder(load_config(args.config, args), jobs=args.jobs)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "catalog":
            return _cmd_catalog(args)
        if args.command == "paths":
            return _cmd_paths(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
