"""Command line front end: config in, JSON report (and optional DOT) out.

Exit status is 0 when every requested verdict passes or is not applicable,
1 when a stage fails or a verdict fails, and 2 for an invalid config.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

from . import gf2
from .category import (
    FAIL,
    NA,
    PASS,
    check_cover,
    verify_rest_points,
)
from .expr import FieldSyntaxError, parse_field
from .fixtures import FIXTURES, fixture
from .isolation import validate_index_pair
from .oracle import axioms_check, brute_force_hls, flow_steps
from .pipeline import analyze, build_map, isolating_set
from .quotient import NoCollapse, collapse_time

SCHEMA = "v1"

STAGES = {
    "index-pair": ("index_pair",),
    "morse": ("index_pair", "morse"),
    "conley": ("index_pair", "conley_index"),
    "ls-bounds": ("index_pair", "morse", "conley_index", "ls_category"),
    "run": ("index_pair", "morse", "conley_index", "ls_category"),
    "verify": ("index_pair", "morse", "conley_index", "ls_category", "checks"),
    "oracle-hls": ("index_pair", "morse", "conley_index", "ls_category", "oracle"),
}


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.field = where


@dataclass
class RunConfig:
    system: dict
    isolating_set: object = None
    gradient_like: bool = False
    rest_cluster_diameter: int = 4
    seed: int = 0
    oracle: dict = field(default_factory=lambda: {"pairs": 100, "max_size": 4})

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "isolating_set": self.isolating_set,
            "gradient_like": self.gradient_like,
            "rest_cluster_diameter": self.rest_cluster_diameter,
            "seed": self.seed,
            "oracle": self.oracle,
        }


def _positive(doc, key, where, strict=True):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(where, f"must be a finite number, got {v!r}")
    if v < 0 or (strict and v == 0):
        raise ConfigError(where, f"must be {'positive' if strict else 'non-negative'}, got {v!r}")
    return float(v)


def _check_grid(g, where):
    if not isinstance(g, dict):
        raise ConfigError(where, "must be an object with box and subdivisions")
    box, subs = g.get("box"), g.get("subdivisions")
    if not isinstance(box, list) or not box:
        raise ConfigError(f"{where}.box", "must be a non-empty list of [lo, hi] pairs")
    for a, b in enumerate(box):
        if not (isinstance(b, list) and len(b) == 2 and all(isinstance(x, (int, float)) for x in b)):
            raise ConfigError(f"{where}.box[{a}]", f"must be [lo, hi], got {b!r}")
        if not b[0] < b[1]:
            raise ConfigError(f"{where}.box[{a}]", f"lower end must be below upper end, got {b!r}")
    if not isinstance(subs, list) or len(subs) != len(box):
        raise ConfigError(f"{where}.subdivisions", f"must list {len(box)} cell counts")
    for a, n in enumerate(subs):
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise ConfigError(f"{where}.subdivisions[{a}]", f"must be an integer >= 2, got {n!r}")
    per = g.get("periodic")
    if per is not None and (not isinstance(per, list) or len(per) != len(box) or not all(isinstance(p, bool) for p in per)):
        raise ConfigError(f"{where}.periodic", f"must list {len(box)} booleans")


def _check_system(system: dict):
    sources = [k for k in ("fixture", "field", "map", "map_file") if k in system]
    if len(sources) != 1:
        raise ConfigError("system", f"needs exactly one of fixture, field, map, map_file; got {sources or 'none'}")
    src = sources[0]
    if src == "fixture":
        if system["fixture"] not in FIXTURES:
            raise ConfigError("system.fixture", f"unknown fixture {system['fixture']!r}; choose from {sorted(FIXTURES)}")
        merged = fixture(system["fixture"])
        merged.update({k: v for k, v in system.items() if k != "fixture"})
        if "map" in merged:
            return
        system = merged
    if src == "map_file":
        path = system["map_file"]
        if not isinstance(path, str) or not os.path.isfile(path):
            raise ConfigError("system.map_file", f"file not found: {path!r}")
        return
    if src == "map" or "map" in system:
        return
    _check_grid(system.get("grid"), "grid")
    _positive(system, "tau", "tau")
    if "padding" in system:
        _positive(system, "padding", "padding", strict=False)
    comps = system.get("field")
    dim = len(system["grid"]["box"])
    if not isinstance(comps, list) or not all(isinstance(s, str) for s in comps):
        raise ConfigError("field", "must be a list of expression strings")
    try:
        parse_field(comps, dim)
    except FieldSyntaxError as exc:
        raise ConfigError(f"field[{exc.component}]" if exc.component is not None else "field", str(exc)) from exc
    except ValueError as exc:
        raise ConfigError("field", str(exc)) from exc


def parse_config(doc) -> RunConfig:
    """Validate a config document; raises :class:`ConfigError` naming the field."""
    if not isinstance(doc, dict):
        raise ConfigError("config", "must be a JSON object")
    system = dict(doc.get("system") or {})
    for key in ("fixture", "field", "map", "map_file", "grid", "tau", "padding"):
        if key in doc:
            system[key] = doc[key]
    _check_system(system)
    S = doc.get("isolating_set")
    if S is not None and not isinstance(S, (list, dict)):
        raise ConfigError("isolating_set", "must be null, a list of cell indices, or {ranges: [...]}")
    grad = doc.get("gradient_like", False)
    if not isinstance(grad, bool):
        raise ConfigError("gradient_like", f"must be a boolean, got {grad!r}")
    diam = doc.get("rest_cluster_diameter", 4)
    if isinstance(diam, bool) or not isinstance(diam, int) or diam < 0:
        raise ConfigError("rest_cluster_diameter", f"must be a non-negative integer, got {diam!r}")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed", f"must be an integer, got {seed!r}")
    oracle = {"pairs": 100, "max_size": 4, **(doc.get("oracle") or {})}
    for k in ("pairs", "max_size"):
        if isinstance(oracle[k], bool) or not isinstance(oracle[k], int) or oracle[k] < 0:
            raise ConfigError(f"oracle.{k}", f"must be a non-negative integer, got {oracle[k]!r}")
    return RunConfig(system, S, grad, diam, seed, oracle)


def load_config(source: str) -> RunConfig:
    """Path to a JSON config, or the bare name of a shipped fixture."""
    if not os.path.exists(source) and source in FIXTURES:
        return parse_config({"system": {"fixture": source}, "gradient_like": source != "line4"})
    try:
        with open(source) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("--config", f"file not found: {source}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    return parse_config(doc)


def _morse_label(i: int) -> str:
    return f"M{i + 1}"


def run(config: RunConfig, command: str = "run") -> dict:
    """Execute the stages ``command`` needs and return the report document."""
    stages = STAGES[command]
    report = {"schema": SCHEMA, "command": command, "inputs": config.to_json(), "verdicts": {}, "errors": []}
    report["inputs"]["gf2_backend"] = gf2.BACKEND
    timings = {}
    state = {}
    failed = False

    def stage(name, fn):
        nonlocal failed
        if failed:
            report[name] = {"status": NA, "reason": "an upstream stage failed"}
            return
        t0 = time.perf_counter()
        try:
            report[name] = fn()
        except Exception as exc:  # recorded in the report, not raised
            failed = True
            report["errors"].append({"stage": name, "error": type(exc).__name__, "message": str(exc)})
            report[name] = {"status": FAIL, "error": str(exc)}
        timings[name] = round(time.perf_counter() - t0, 6)

    def index_pair():
        fmap = build_map(config.system)
        state["fmap"] = fmap
        a = analyze(fmap, isolating_set(fmap, config.isolating_set))
        state["a"] = a
        grid = fmap.grid
        val = validate_index_pair(fmap, a.pair.N, a.pair.L)
        report["verdicts"]["index_pair_valid"] = PASS if val.ok else FAIL
        return {
            "grid": grid.to_json(),
            "sizes": {"N": len(a.pair.N), "L": len(a.pair.L), "interior": len(a.pair.interior)},
            "validation": val.to_json(grid),
            "N": grid.to_multi(a.pair.N),
            "L": grid.to_multi(a.pair.L),
            "images": {
                ",".join(map(str, grid.cell(c))): [
                    "exterior" if d < 0 else list(grid.cell(d)) for d in sorted(fmap.images[c])
                ]
                for c in sorted(a.pair.N)
            },
        }

    def morse():
        a = state["a"]
        md, flt = a.morse()
        grid = a.fmap.grid
        return {
            "sets": [
                {"label": _morse_label(i), "size": len(M), "cells": grid.to_multi(M)} for i, M in enumerate(md.sets)
            ],
            "order": [_morse_label(i) for i in range(len(md.sets))],
            "dag": [[_morse_label(i), _morse_label(j)] for i, j in sorted(md.dag)],
            "hasse": [[_morse_label(i), _morse_label(j)] for i, j in md.hasse_edges()],
            "filtration": [len(s) for s in flt.stages],
            "iplus": len(a.iplus),
            "invariant": len(md.invariant),
        }

    def conley_index():
        a = state["a"]
        betti, cup = a.homology()
        return {"betti": list(betti), "cup_length": cup, "euler": a.cpair.euler(), "chain_counts": a.cpair.counts()}

    def ls_category():
        a = state["a"]
        grid = a.fmap.grid
        r31 = a.theorem_3_1()
        state["r31"] = r31
        doc = r31.to_json(grid)
        verdicts = dict(r31.verdicts)
        r32 = a.corollary_3_2()
        verdicts.update(r32.verdicts)
        doc["corollary_3_2_upper"] = r32.upper
        if config.gradient_like:
            rp = verify_rest_points(a.pm, a.md, r31.lower, config.rest_cluster_diameter)
            verdicts.update(rp.verdicts)
            doc["rest_points"] = rp.details
        else:
            verdicts["theorem_3_3"] = NA
            verdicts["theorem_4_6"] = NA
            doc["rest_points"] = {"reason": "dynamics not declared gradient-like"}
        doc.update(verdicts)
        report["verdicts"].update(verdicts)
        return doc

    def checks():
        a = state["a"]
        md, flt = a.morse()
        cover = state["r31"].cover
        out = {}
        stages_ok = all(flt.stages[i] <= flt.stages[i + 1] for i in range(len(flt.stages) - 1))
        out["filtration_nesting"] = stages_ok and (not flt.stages or flt.stages[-1] == a.iplus)
        running, ok = frozenset(), True
        for j, e in enumerate(cover.elements):
            running |= e.cells
            ok &= flt.stages[j] <= running
        out["induction_invariant"] = ok
        out["cover_certificates"] = not check_cover(cover, flt)
        rest = a.pm.cells - a.iplus
        out["collapse_outside_iplus"] = not isinstance(collapse_time(a.pm, rest, a.iplus), NoCollapse)
        for k, v in out.items():
            report["verdicts"][k] = PASS if v else FAIL
        return {k: (PASS if v else FAIL) for k, v in out.items()}

    def oracle():
        a = state["a"]
        grid = a.fmap.grid
        doc = {}
        if a.pair.L:
            report["verdicts"]["oracle_agreement"] = NA
            return {"status": NA, "reason": "the oracle handles pairs with empty exit set only"}
        N = sorted(a.pair.N)
        brute = brute_force_hls(grid, N, N, config.oracle["max_size"])
        r31 = state["r31"]
        doc["brute_force"] = brute
        doc["lower"], doc["upper"] = r31.lower, r31.upper
        ok = brute is not None and r31.lower <= brute <= r31.upper
        report["verdicts"]["oracle_agreement"] = PASS if ok else FAIL
        try:
            maps = flow_steps(a.fmap, N)
        except ValueError:
            maps = []
        ax = axioms_check(grid, N, config.oracle["pairs"], config.seed, maps, config.oracle["max_size"])
        doc["axioms"] = ax.to_json()
        report["verdicts"]["axioms"] = PASS if ax.ok else FAIL
        return doc

    fns = {
        "index_pair": index_pair,
        "morse": morse,
        "conley_index": conley_index,
        "ls_category": ls_category,
        "checks": checks,
        "oracle": oracle,
    }
    for name in stages:
        stage(name, fns[name])
    report["timings"] = timings
    return report


def exit_status(report: dict) -> int:
    if report["errors"]:
        return 1
    return 0 if all(v in (PASS, NA) for v in report["verdicts"].values()) else 1


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def comparable(report: dict) -> dict:
    """The report without its timings block."""
    return {k: v for k, v in report.items() if k != "timings"}


def _levels(n, hasse):
    """Longest-path height above the attractors, used as DOT rank hints."""
    level = [0] * n
    for i in range(n):  # edges (hi, lo) with hi > lo, so ascending order suffices
        for hi, lo in hasse:
            if hi == i:
                level[i] = max(level[i], level[lo] + 1)
    return level


def to_dot(report: dict) -> str:
    """Hasse diagram of the Morse decomposition as a DOT digraph."""
    morse = report.get("morse")
    if not morse or "sets" not in morse:
        raise ValueError("report has no morse stage")
    sets = morse["sets"]
    index = {s["label"]: i for i, s in enumerate(sets)}
    hasse = [(index[a], index[b]) for a, b in morse["hasse"]]
    level = _levels(len(sets), hasse)
    lines = ["digraph morse {", "  rankdir=TB;", "  node [shape=box];"]
    for s in sets:
        unit = "cell" if s["size"] == 1 else "cells"
        lines.append(f'  {s["label"]} [label="{s["label"]} ({s["size"]} {unit})"];')
    for lv in sorted(set(level), reverse=True):
        names = "; ".join(sets[i]["label"] for i in range(len(sets)) if level[i] == lv)
        lines.append(f"  {{ rank=same; {names}; }}")
    for a, b in hasse:
        lines.append(f"  {sets[a]['label']} -> {sets[b]['label']};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(report: dict, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(to_dot(report))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conleyls", description="Conley index and LS category bounds on cubical grids.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in STAGES:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON config path or a fixture name")
        s.add_argument("--output", help="write the JSON report here instead of stdout")
        s.add_argument("--dot", help="write the Morse Hasse diagram as DOT")
        s.add_argument("--seed", type=int, help="override the config seed")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        config.seed = args.seed
    report = run(config, args.command)
    text = dumps(report)
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.dot:
        try:
            export_dot(report, args.dot)
        except ValueError as exc:
            print(f"dot export: {exc}", file=sys.stderr)
            return 1
    for err in report["errors"]:
        print(f"{err['stage']} failed: {err['error']}: {err['message']}", file=sys.stderr)
    return exit_status(report)


if __name__ == "__main__":
    sys.exit(main())
