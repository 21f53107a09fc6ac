from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from vgit.action import TorusAction, chamber_complex
from vgit.geometry import rational_hull, volume
from vgit.graph import build_graph, matrix_tree_count
from vgit.shelling import is_shelling, line_shelling
from vgit.strata import LinearModel, cyclic_order

points = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=3, max_size=9, unique=True)


def solid(pts):
    return rational_hull(pts).dim == 2


@settings(max_examples=40, deadline=None)
@given(points.filter(solid))
def test_hull_contains_its_points(pts):
    p = rational_hull(pts)
    assert all(p.contains(x) for x in pts)
    assert p.contains(p.barycenter, strict=True)
    for a, b in p.facets:
        assert sum(1 for v in p.vertices if sum(x * y for x, y in zip(a, v)) == b) == 2
    assert set(p.vertices) <= {tuple(Fraction(c) for c in x) for x in pts}


@settings(max_examples=40, deadline=None)
@given(points.filter(solid), st.integers(0, 30))
def test_line_shellings_of_random_polygons(pts, k):
    p = rational_hull(pts)
    s = line_shelling(p)
    assert is_shelling(s.complex, s.order)
    facet = k % len(s.order)
    assert line_shelling(p, ending_facet=facet).order[-1] == facet


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(points.filter(solid), st.integers(-3, 3), st.integers(-3, 3))
def test_cyclic_order_is_translation_invariant(pts, dx, dy):
    pts = pts[:5]
    if not solid(pts):
        return
    a = TorusAction(2, tuple(pts))
    b = TorusAction(2, tuple((x + dx, y + dy) for x, y in pts))
    center = rational_hull(pts).barycenter
    if any(tuple(Fraction(c) for c in w) == center for w in pts):
        return
    shifted = (center[0] + dx, center[1] + dy)
    ka = [p.coords for p in cyclic_order(LinearModel(a), center)]
    kb = [p.coords for p in cyclic_order(LinearModel(b), shifted)]
    assert ka == kb and sorted(c for cs in ka for c in cs) == list(range(len(pts)))


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=5, unique=True).filter(solid))
def test_chambers_tile_the_moment_polytope(pts):
    a = TorusAction(2, tuple(pts))
    cc = chamber_complex(a)
    assert sum(volume(cc.chamber(i)) for i in range(len(cc.chambers))) == volume(rational_hull(pts))
    g = build_graph(cc)
    assert all(g.degree(f"J{j}") == 2 for j, _ in g.j_vertices)
    assert matrix_tree_count(g) >= 1
