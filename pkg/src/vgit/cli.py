"""Command-line pipeline: chambers, quotient graph, shellings, Chow checks and strata.

Every stage writes a deterministic text artifact into the output directory.
The exit status is 0 when every check passes, 1 when some check fails and
2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .action import (
    ActionError,
    ChamberComplex,
    TorusAction,
    chamber_complex,
    load_action,
    sampled_stability_check,
)
from .chow.flips import (
    FlipError,
    all_flips,
    check_projection_formula,
    correspondence_class,
    loop_independence_check,
    perturbed_flip,
)
from .geometry import MAX_REFINEMENT_DIM as MAX_GEOMETRY_DIM
from .geometry import complex_from_cells, rational_hull
from .graph import (
    DEFAULT_MAX_TREES,
    GraphError,
    QuotientGraph,
    build_graph,
    chain_types,
    dual_complex,
    export_dot,
    local_loops,
    matrix_tree_count,
    spanning_trees,
)
from .rational import format_rational
from .shelling import (
    MAX_REFINEMENT_DIM,
    PolytopalComplex,
    ShellingError,
    is_shelling,
    line_shelling,
    refines,
    shellable_refinement,
)
from .strata import LinearModel, StrataError, chain_dimension, check_void_intersections

STAGES = ("chambers", "graph", "trees", "loops", "shelling", "chow", "independence", "strata")
REQUIRES = {
    "chambers": (),
    "graph": ("chambers",),
    "trees": ("graph",),
    "loops": ("graph",),
    "shelling": ("chambers",),
    "chow": ("graph",),
    "independence": ("chow", "loops"),
    "strata": ("graph",),
}
VERBOSITY_ENV = "VGIT_VERBOSITY"
# the chain-type enumeration of the whole graph is exponential in the number of walls
MAX_CHAIN_WALLS = 12

log = logging.getLogger("vgit")


class ConfigError(ValueError):
    pass


def parse_action_file(path) -> TorusAction:
    return load_action(path)


@dataclass
class PipelineConfig:
    action_path: Path
    stages: tuple = STAGES
    out: Path = Path("vgit-out")
    max_trees: int = DEFAULT_MAX_TREES
    max_dim: int = MAX_GEOMETRY_DIM
    seed: int = 0
    samples: int = 100

    def __post_init__(self):
        self.action_path = Path(self.action_path)
        self.out = Path(self.out)
        unknown = [s for s in self.stages if s not in STAGES]
        if unknown:
            raise ConfigError(f"unknown stages: {', '.join(unknown)}")
        chosen = set(self.stages)
        for s in self.stages:
            missing = [r for r in REQUIRES[s] if r not in chosen]
            if missing:
                raise ConfigError(f"stage '{s}' requires {', '.join(missing)}")
        self.stages = tuple(s for s in STAGES if s in chosen)
        if self.max_trees < 1:
            raise ConfigError("--max-trees must be positive")


@dataclass
class PipelineResult:
    status: int
    verdicts: list = field(default_factory=list)  # (stage, check, passed)
    artifacts: list = field(default_factory=list)


class _Run:
    def __init__(self, cfg: PipelineConfig, action: TorusAction):
        self.cfg = cfg
        self.action = action
        self.result = PipelineResult(0)
        self.cc: ChamberComplex | None = None
        self.graph: QuotientGraph | None = None
        self.loops: list = []
        self.flips: dict = {}

    def verdict(self, stage: str, check: str, passed: bool) -> str:
        self.result.verdicts.append((stage, check, passed))
        return "PASS" if passed else "FAIL"

    def write(self, name: str, text: str) -> None:
        path = self.cfg.out / name
        path.write_text(text, encoding="utf-8")
        self.result.artifacts.append(name)


def _vertex(v) -> list:
    return [format_rational(x) for x in v]


def _stage_chambers(run: _Run) -> None:
    a = run.action
    if a.effective_rank > run.cfg.max_dim:
        raise ConfigError(f"unsupported dimension {a.effective_rank} (cap {run.cfg.max_dim})")
    cc = chamber_complex(a)
    run.cc = cc
    problems = sampled_stability_check(cc, run.cfg.samples, run.cfg.seed)
    data = {
        "action": json.loads(a.to_text()),
        "effective_rank": a.effective_rank,
        "quotient_dim": a.quotient_dim,
        "chambers": [{"id": i, "vertices": [_vertex(v) for v in cc.chamber(i).vertices]} for i in range(len(cc.chambers))],
        "walls": [
            {
                "id": j,
                "vertices": [_vertex(v) for v in cc.wall_cell(j).vertices],
                "support": list(w.support),
                "lambda": list(w.lam),
                "level": format_rational(w.level),
                "chambers": list(w.adjacent),
            }
            for j, w in enumerate(cc.walls)
        ],
        "boundary_walls": [
            {"vertices": [_vertex(v) for v in cc.base.cells[w.cell].vertices], "chamber": w.adjacent[0]}
            for w in cc.boundary_walls
        ],
        "codim2": [
            {
                "vertices": [_vertex(v) for v in cc.base.cells[c.cell].vertices],
                "chambers": list(c.chambers),
                "walls": list(c.walls),
                "interior": c.interior,
            }
            for c in cc.codim2
        ],
        "stability_oracle": {"samples_per_chamber": run.cfg.samples, "problems": problems},
    }
    run.verdict("chambers", "stability oracle", not problems)
    run.write("chambers.json", json.dumps(data, indent=2, sort_keys=True) + "\n")


def _stage_graph(run: _Run) -> None:
    g = build_graph(run.cc)
    run.graph = g
    ok = all(g.degree(f"J{j}") == 2 for j, _ in g.j_vertices)
    run.verdict("graph", "wall degrees", ok)
    run.write("graph.dot", export_dot(g))


def _stage_trees(run: _Run) -> None:
    g = run.graph
    lines = []
    if not g.is_connected():
        lines.append("graph is disconnected: no spanning trees")
        run.write("trees.txt", "\n".join(lines) + "\n")
        return
    count, trees = spanning_trees(g, run.cfg.max_trees)
    listed = list(trees)
    lines.append(f"matrix-tree count {count}")
    lines.append(f"enumerated {len(listed)} (cap {run.cfg.max_trees})")
    if len(listed) < run.cfg.max_trees:
        lines.append(f"count check {run.verdict('trees', 'matrix-tree count', len(listed) == count)}")
    for k, t in enumerate(listed):
        lines.append(f"tree {k}: " + " ".join(f"{a}-{b}" for a, b in t))
    run.write("trees.txt", "\n".join(lines) + "\n")


def _stage_loops(run: _Run) -> None:
    run.loops = local_loops(run.graph)
    lines = [f"local loops {len(run.loops)}"]
    for k, L in enumerate(run.loops):
        cell = run.cc.base.cells[L.cell]
        at = " ".join("(" + ",".join(_vertex(v)) + ")" for v in cell.vertices)
        count = matrix_tree_count(L.graph(run.graph))
        lines.append(f"loop {k} at {at}: {' '.join(L.cycle)}; spanning trees {count}")
    run.write("loops.txt", "\n".join(lines) + "\n")


def _stage_shelling(run: _Run) -> None:
    a, cc = run.action, run.cc
    P = rational_hull(a.effective_weights)
    lines = []
    if P.dim < 1:
        run.write("shelling.txt", "moment polytope is a point: nothing to shell\n")
        return
    shell = line_shelling(P)
    bc = shell.complex
    ok = bool(is_shelling(bc, shell.order))
    lines.append(f"moment polytope: {len(bc.facets)} boundary facets")
    lines.append(f"line shelling {list(shell.order)} {run.verdict('shelling', 'line shelling', ok)}")
    for k in range(len(bc.facets)):
        s = line_shelling(P, ending_facet=k)
        good = s.order[-1] == k and bool(is_shelling(bc, s.order))
        lines.append(f"ending with facet {k}: {list(s.order)} {run.verdict('shelling', f'ending facet {k}', good)}")
    if P.dim > MAX_REFINEMENT_DIM:
        lines.append(f"chamber refinement skipped: dimension {P.dim} above cap {MAX_REFINEMENT_DIM}")
    else:
        chambers = PolytopalComplex(tuple(cc.chamber(i) for i in range(len(cc.chambers))))
        try:
            refined, order = shellable_refinement(chambers)
            ok = refines(refined, chambers) and bool(is_shelling(refined, order.order))
            lines.append(f"chamber refinement: {len(refined.facets)} cells, order {list(order.order)}")
            lines.append(f"refinement check {run.verdict('shelling', 'refinement', ok)}")
            H = dual_complex(cc, complex_from_cells(refined.facets))
            marks = [m for _, m in H.marks]
            lines.append(
                f"dual complex: {len(H.i_vertices)} cells, {marks.count('flip')} flip walls, {marks.count('iso')} iso walls"
            )
        except (ShellingError, GraphError) as exc:
            lines.append(f"chamber refinement {run.verdict('shelling', 'refinement', False)}: {exc}")
    run.write("shelling.txt", "\n".join(lines) + "\n")


def _stage_chow(run: _Run) -> None:
    cc = run.cc
    lines = [f"quotient dimension {run.action.quotient_dim}"]
    try:
        run.flips = all_flips(cc, validate=False)
    except FlipError as exc:
        lines.append(f"flips {run.verdict('chow', 'flips', False)}: {exc}")
        run.write("chow_report.txt", "\n".join(lines) + "\n")
        return
    rings = {}
    for f in run.flips.values():
        for i in f.chambers:
            rings.setdefault(i, f.ring(i))
    for i in sorted(rings):
        R = rings[i]
        lines.append(f"chamber {i}: ranks {list(R.ranks)}")
        lines.append(R.dump().rstrip("\n"))
    for j, f in sorted(run.flips.items()):
        i0, i1 = f.chambers
        lines.append(f"wall {j}: chambers {i0} -> {i1}, M_J{j} ranks {list(f.ring_j.ranks)}")
        for i in f.chambers:
            hom = f.pull_map(i).check_homomorphism()
            proj = check_projection_formula(f, i)
            lines.append(f"  pullback from {i} is a ring map {run.verdict('chow', f'wall {j} ring map from {i}', hom)}")
            lines.append(f"  projection formula towards {i} {run.verdict('chow', f'wall {j} projection to {i}', proj)}")
        lines.append(f"  correspondence class: {correspondence_class(f).text()}")
    run.write("chow_report.txt", "\n".join(lines) + "\n")


def _stage_independence(run: _Run) -> None:
    lines = []
    if not run.flips and run.cc.walls:
        lines.append("no flip data: chow stage failed")
    if not run.loops:
        lines.append("no local loops")
    qd = run.action.quotient_dim
    for k, L in enumerate(run.loops):
        g = L.graph(run.graph)
        flips = {j: run.flips[j] for j in L.walls}
        report = loop_independence_check(g, flips, qd, max_trees=run.cfg.max_trees)
        lines.append(f"loop {k}: {' '.join(L.cycle)}")
        lines.append(report.text().rstrip("\n"))
        run.verdict("independence", f"loop {k}", report.passed)
        j0 = L.walls[0]
        bad = dict(flips)
        bad[j0] = perturbed_flip(flips[j0], flips[j0].chambers[0])
        control = loop_independence_check(g, bad, qd, max_trees=run.cfg.max_trees)
        lines.append(f"negative control (perturbed wall {j0}): {'detected' if not control.passed else 'not detected'}")
    run.write("independence.txt", "\n".join(lines) + "\n")


def _stage_strata(run: _Run) -> None:
    m = LinearModel.from_complex(run.cc)
    lines = []
    for j in range(len(run.cc.walls)):
        rep = check_void_intersections(m, j)
        run.verdict("strata", f"void wall {j}", rep.passed)
        control = check_void_intersections(m, j, semistable=False)
        lines.append(rep.text())
        lines.append(f"  without semistability: {control.text()}")
    pieces = [("loop " + str(k), L.graph(run.graph)) for k, L in enumerate(local_loops(run.graph))]
    if run.graph.is_connected() and len(run.graph.j_vertices) <= MAX_CHAIN_WALLS:
        pieces.insert(0, ("graph", run.graph))
    for name, g in pieces:
        realizable = 0
        worst = None
        for ct in chain_types(g):
            try:
                d = chain_dimension(m, ct)
            except StrataError:
                continue
            realizable += 1
            run.verdict("strata", f"{name} chain {realizable}", d.passed)
            if worst is None or d.dimension > worst.dimension:
                worst = d
        if worst is None:
            lines.append(f"{name}: no realizable chain types")
        else:
            lines.append(f"{name}: {realizable} realizable chain types, largest {worst.text()}")
    run.write("strata.txt", "\n".join(lines) + "\n")


_RUNNERS: dict[str, Callable[[_Run], None]] = {
    "chambers": _stage_chambers,
    "graph": _stage_graph,
    "trees": _stage_trees,
    "loops": _stage_loops,
    "shelling": _stage_shelling,
    "chow": _stage_chow,
    "independence": _stage_independence,
    "strata": _stage_strata,
}


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    action = parse_action_file(cfg.action_path)
    cfg.out.mkdir(parents=True, exist_ok=True)
    run = _Run(cfg, action)
    for stage in cfg.stages:
        start = time.perf_counter()
        _RUNNERS[stage](run)
        log.info("stage %s done in %.2fs", stage, time.perf_counter() - start)
    lines = [f"{stage}: {check}: {'PASS' if ok else 'FAIL'}" for stage, check, ok in run.result.verdicts]
    run.write("summary.txt", "\n".join(lines) + ("\n" if lines else ""))
    run.result.status = 0 if all(ok for _, _, ok in run.result.verdicts) else 1
    return run.result


def _parse_stages(text: str) -> tuple:
    if text == "all":
        return STAGES
    return tuple(s.strip() for s in text.split(",") if s.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vgit",
        description="Chambers, quotient graphs, shellings and Chow-ring checks for torus actions on P^m.",
        epilog=f"Set {VERBOSITY_ENV}=1 (info) or 2 (debug) for progress messages on stderr.",
    )
    p.add_argument("action", help="JSON action file with 'rank', 'weights' and optional 'label', 'shift'")
    p.add_argument("--stages", default="all", help=f"comma-separated subset of {','.join(STAGES)} (default: all)")
    p.add_argument("--out", default="vgit-out", help="output directory (default: vgit-out)")
    p.add_argument("--max-trees", type=int, default=DEFAULT_MAX_TREES, help="cap on enumerated spanning trees")
    p.add_argument("--max-dim", type=int, default=MAX_GEOMETRY_DIM, help="cap on the torus rank")
    p.add_argument("--seed", type=int, default=0, help="seed of the sampling stability oracle")
    p.add_argument("--samples", type=int, default=100, help="oracle samples per chamber")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    level = {"0": logging.WARNING, "1": logging.INFO, "2": logging.DEBUG}.get(os.environ.get(VERBOSITY_ENV, "0"), logging.WARNING)
    logging.basicConfig(level=level, format="%(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        cfg = PipelineConfig(
            args.action, _parse_stages(args.stages), Path(args.out), args.max_trees, args.max_dim, args.seed, args.samples
        )
        result = run_pipeline(cfg)
    except (ConfigError, ActionError, OSError) as exc:
        print(f"vgit: error: {exc}", file=sys.stderr)
        return 2
    failed = [f"{s}: {c}" for s, c, ok in result.verdicts if not ok]
    for item in failed:
        print(f"FAIL {item}", file=sys.stderr)
    print(f"{len(result.verdicts) - len(failed)}/{len(result.verdicts)} checks passed; artifacts in {cfg.out}")
    return result.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
