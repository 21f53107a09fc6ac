"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``python3 -m pytest tests/test_acceptance.py -s`` to see only these lines.
"""

import itertools
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from vgit.action import chamber_complex, sampled_stability_check
from vgit.chow import (
    RingMap,
    ToricQuotient,
    all_flips,
    bundle_ring,
    check_projection_formula,
    loop_independence_check,
    perturbed_flip,
    point_ring,
    weighted_blowup_ring,
    wps_ring,
)
from vgit.cli import STAGES, PipelineConfig, run_pipeline
from vgit.corpus import corpus
from vgit.geometry import rational_hull, volume
from vgit.graph import build_graph, chain_types, local_loops, matrix_tree_count, spanning_trees
from vgit.shelling import PolytopalComplex, is_shelling, line_shelling, refines, shellable_refinement
from vgit.strata import LinearModel, StrataError, chain_dimension, check_void_intersections

ACTIONS = Path(__file__).resolve().parent.parent / "actions"


def verdict(capsys, n, title, ok, elapsed, limit=None):
    ok = bool(ok) and (limit is None or elapsed < limit)
    bound = "no limit" if limit is None else f"limit {limit} s"
    with capsys.disabled():
        print(f"\ncriterion {n:>2} {title}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s, {bound})")
    assert ok


def test_criterion_1_chambers(capsys):
    acts = corpus()
    worst = 0.0
    ok = True
    for name, counts in (("p2_line", (2, 1, 0)), ("square", (4, 4, 1))):
        t = time.perf_counter()
        cc = chamber_complex(acts[name])
        problems = sampled_stability_check(cc, samples=100, seed=0)
        interior = [r for r in build_graph(cc).codim2_faces if r.interior]
        worst = max(worst, time.perf_counter() - t)
        ok &= not problems and (len(cc.chambers), len(cc.walls), len(interior)) == counts
    verdict(capsys, 1, "chamber correctness", ok, worst, 1)


def test_criterion_2_graph(capsys):
    t = time.perf_counter()
    acts = corpus()
    ok = len(acts) >= 10
    single = 0
    for a in acts.values():
        g = build_graph(chamber_complex(a))
        single += len(g.i_vertices) == 1
        ok &= all(g.degree(f"J{j}") == 2 for j, _ in g.j_vertices)
        count, trees = spanning_trees(g)
        ok &= count == matrix_tree_count(g) == sum(1 for _ in trees)
    ok &= single >= 1
    verdict(capsys, 2, "graph structure", ok, time.perf_counter() - t, 1)


def random_polygons(n, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        pts = {(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(rng.randint(3, 10))}
        p = rational_hull(pts)
        if p.dim == 2:
            out.append(p)
    return out


def test_criterion_3_shelling(capsys):
    t = time.perf_counter()
    polys = [
        rational_hull([(0, 0), (1, 0), (0, 1)]),
        rational_hull([(0, 0), (1, 0), (1, 1), (0, 1)]),
        rational_hull([(0, 0), (2, 0), (3, 2), (1, 3), (-1, 2)]),
        rational_hull(itertools.product((0, 1), repeat=3)),
    ] + random_polygons(20)
    ok = True
    for p in polys:
        s = line_shelling(p)
        ok &= bool(is_shelling(s.complex, s.order))
        for k in range(len(s.order)):
            e = line_shelling(p, ending_facet=k)
            ok &= e.order[-1] == k and bool(is_shelling(e.complex, e.order))
    verdict(capsys, 3, "shelling soundness", ok, time.perf_counter() - t, 5)


def test_criterion_4_refinement(capsys):
    t = time.perf_counter()
    corners = [(0, 0), (2, 0), (2, 2), (0, 2)]
    square = [rational_hull([corners[k], corners[(k + 1) % 4], (1, 1)]) for k in range(4)]
    A, B, C = (0, 0), (12, 0), (6, 12)
    a, b, c = (4, Fraction(8, 3)), (8, Fraction(8, 3)), (6, Fraction(20, 3))
    twisted = [rational_hull(x) for x in ((A, B, b), (B, C, c), (C, A, a), (A, b, a), (B, c, b), (C, a, c), (a, b, c))]
    ok = True
    for cells, hull in ((square, corners), (twisted, (A, B, C))):
        sub = PolytopalComplex(tuple(cells))
        refined, order = shellable_refinement(sub)
        ok &= sum(volume(f) for f in refined.facets) == volume(rational_hull(hull))
        ok &= refines(refined, sub) and bool(is_shelling(refined, order.order))
    verdict(capsys, 4, "shellable refinement", ok, time.perf_counter() - t, 5)


def agrees(alg, toric, images):
    """Ranks equal, the generator images define a ring map, and it preserves every integral."""
    f = RingMap(alg, toric.ring, images)
    if alg.ranks != toric.ring.ranks or not f.check_homomorphism():
        return False
    return all(alg.integrate(alg.basis(k)) == toric.ring.integrate(f(alg.basis(k))) for k in range(alg.dim))


def test_criterion_5_chow_engine(capsys):
    t = time.perf_counter()
    ok = True
    for w in ((1, 1), (1, 1, 1), (1, 2)):
        q = ToricQuotient.from_git([[x] for x in w], [1])
        ok &= agrees(wps_ring(w), q, {"h": q.divisor(0)})
    ok &= wps_ring((1, 2)).integrate(wps_ring((1, 2)).gen("h")) == Fraction(1, 2)
    pt = point_ring()
    line = ToricQuotient.from_git([[1], [1]], [1])
    ok &= agrees(bundle_ring(pt, [pt.one(), pt.zero(), pt.zero()], [1, 1]), line, {"X": line.divisor(0)})
    P2 = wps_ring((1, 1, 1))
    h = P2.gen("h")
    bl = weighted_blowup_ring(P2, [h], [P2.one(), P2.zero(), P2.power(h, 2)], exceptional_top=-1)
    q = ToricQuotient.from_git([[1], [1], [1]], [1]).star_subdivide({0, 1}, {0: 1, 1: 1})
    ok &= agrees(bl, q, {"h": q.divisor(2), "E": q.divisor(3)})
    ok &= bl.ranks == (1, 2, 1) and bl.integrate(bl.power(bl.gen("E"), 2)) == -1
    # the same surface as the projectivised bundle O + O(1) over a line
    P1 = wps_ring((1, 1))
    f1 = bundle_ring(P1, [P1.one(), P1.gen("h"), P1.zero()], [1, 1])
    R = q.ring
    ok &= agrees(f1, q, {"h": R.sub(q.divisor(2), q.divisor(3)), "X": q.divisor(3)})
    verdict(capsys, 5, "chow engine", ok, time.perf_counter() - t, 1)


@pytest.fixture(scope="module")
def complexes():
    return {name: chamber_complex(a) for name, a in corpus().items()}


@pytest.fixture(scope="module")
def flips(complexes):
    return [f for cc in complexes.values() for f in all_flips(cc, validate=False).values()]


def test_criterion_6_projection_formula(capsys, flips):
    t = time.perf_counter()
    ok = bool(flips)
    for f in flips:
        for i in f.chambers:
            ok &= check_projection_formula(f, i)
    verdict(capsys, 6, "projection formula", ok, time.perf_counter() - t, 1)


def test_criterion_7_tree_independence(capsys, complexes):
    t = time.perf_counter()
    cc = complexes["square"]
    g = build_graph(cc)
    flips = all_flips(cc)
    (loop,) = local_loops(g)
    report = loop_independence_check(loop.graph(g), flips, 1)
    bad = dict(flips)
    bad[0] = perturbed_flip(flips[0], flips[0].chambers[0])
    control = loop_independence_check(loop.graph(g), bad, 1)
    ok = report.passed and len(report.trees) == 8 and len(set(report.pairings)) == 1 and not control.passed
    verdict(capsys, 7, "tree independence", ok, time.perf_counter() - t, 10)


def test_criterion_8_dimension_bound(capsys, complexes):
    acts = corpus()
    models = {n: LinearModel.from_complex(cc) for n, cc in complexes.items() if acts[n].quotient_dim > 0}
    graphs = {n: build_graph(complexes[n]) for n in models}
    t = time.perf_counter()
    ok = True
    realizable = 0
    for n, m in models.items():
        for ct in chain_types(graphs[n]):
            try:
                d = chain_dimension(m, ct)
            except StrataError:
                continue
            realizable += 1
            ok &= d.passed and d.bound == acts[n].quotient_dim
    ok &= realizable > 0
    verdict(capsys, 8, "dimension bound", ok, time.perf_counter() - t, 1)


def test_criterion_9_void_intersections(capsys, complexes):
    t = time.perf_counter()
    acts = corpus()
    ok = True
    witnessed = False
    for n, cc in complexes.items():
        if acts[n].quotient_dim == 0:
            continue
        m = LinearModel.from_complex(cc)
        for j in range(len(cc.walls)):
            ok &= check_void_intersections(m, j).passed
            control = check_void_intersections(m, j, semistable=False)
            witnessed |= not control.passed and control.witness is not None
    verdict(capsys, 9, "void intersections", ok and witnessed, time.perf_counter() - t, 1)


def test_criterion_10_determinism(capsys, tmp_path):
    t = time.perf_counter()
    ok = True
    for name in ("square", "pent", "isotypic"):
        outs = [tmp_path / f"{name}-{k}" for k in range(2)]
        for out in outs:
            run_pipeline(PipelineConfig(ACTIONS / f"{name}.json", STAGES, out))
        files = sorted(p.name for p in outs[0].iterdir())
        ok &= files == sorted(p.name for p in outs[1].iterdir()) and len(files) == 9
        ok &= all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in files)
    verdict(capsys, 10, "determinism", ok, time.perf_counter() - t)
