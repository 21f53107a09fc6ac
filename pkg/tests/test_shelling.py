import itertools
import json
from fractions import Fraction

import pytest

from vgit.geometry import rational_hull, volume
from vgit.shelling import (
    PolytopalComplex,
    ShellingError,
    is_shelling,
    line_shelling,
    refines,
    remark_holds,
    shellable_refinement,
)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def complex_of(*cells):
    return PolytopalComplex(tuple(rational_hull(c) for c in cells))


def four_triangles():
    c = (1, 1)
    corners = [(0, 0), (2, 0), (2, 2), (0, 2)]
    return complex_of(*[(corners[k], corners[(k + 1) % 4], c) for k in range(4)])


def test_segment_subdivision_shells():
    c = complex_of([(0,), (1,)], [(1,), (2,)])
    assert is_shelling(c, [0, 1]) and is_shelling(c, [1, 0])


def test_diagonal_split_square_shells():
    c = complex_of([(0, 0), (1, 0), (1, 1)], [(0, 0), (0, 1), (1, 1)])
    check = is_shelling(c, [0, 1])
    assert check.ok and len(check.certificates) == 1 and len(check.certificates[0]) == 1


def test_opposite_triangles_first_is_not_a_shelling():
    c = four_triangles()
    check = is_shelling(c, [0, 2, 1, 3])
    assert not check and check.failing_index == 1
    assert is_shelling(c, [0, 1, 2, 3])


def test_every_cyclic_order_of_four_triangles_shells():
    c = four_triangles()
    for order in itertools.permutations(range(4)):
        adjacent = all((order[k] - order[k - 1]) % 4 in (1, 3) or k == 0 for k in range(1, 4))
        ok = bool(is_shelling(c, order))
        if adjacent:
            assert ok


def test_order_must_be_a_permutation():
    with pytest.raises(ShellingError):
        is_shelling(four_triangles(), [0, 1, 1, 2])


def test_non_pure_complex_is_rejected():
    with pytest.raises(ShellingError):
        complex_of([(0, 0), (1, 0), (0, 1)], [(2, 0), (3, 0)])


def test_boundary_of_triangle_shells():
    t = rational_hull([(0, 0), (1, 0), (0, 1)])
    s = line_shelling(t)
    assert sorted(s.order) == [0, 1, 2]
    assert is_shelling(s.complex, s.order)


def test_square_line_shelling():
    s = line_shelling(rational_hull(SQUARE))
    assert s.order == (3, 2, 1, 0)
    assert s.complex.facets[s.order[0]].vertex_set == rational_hull([(1, 0), (1, 1)]).vertex_set


def test_ending_facet():
    sq = rational_hull(SQUARE)
    for k in range(4):
        assert line_shelling(sq, ending_facet=k).order[-1] == k


def test_cube_line_shelling():
    cube = rational_hull(itertools.product((0, 1), repeat=3))
    s = line_shelling(cube, direction=(1, 2, 3))
    assert len(s.order) == 6 and is_shelling(s.complex, s.order)
    assert remark_holds(s.complex, s.order, is_shelling(s.complex, s.order))


def test_segment_line_shelling():
    s = line_shelling(rational_hull([(0,), (3,)]))
    assert len(s.order) == 2


def test_line_shelling_rejects_bad_input():
    sq = rational_hull(SQUARE)
    with pytest.raises(ShellingError):
        line_shelling(sq, direction=(0, 0))
    with pytest.raises(ShellingError):
        line_shelling(sq, base_point=(2, 2))
    with pytest.raises(ShellingError):
        line_shelling(rational_hull([(0, 0), (1, 1)]))


def test_refinement_of_four_triangles():
    sub = four_triangles()
    refined, order = shellable_refinement(sub)
    assert refines(refined, sub)
    check = is_shelling(refined, order.order)
    assert check and remark_holds(refined, order.order, check)


def test_refinement_of_twisted_triangle_in_triangle():
    # concentric inner triangle with cyclically rotated diagonals: not regular
    A, B, C = (0, 0), (12, 0), (6, 12)
    a, b, c = (4, Fraction(8, 3)), (8, Fraction(8, 3)), (6, Fraction(20, 3))
    sub = complex_of((A, B, b), (B, C, c), (C, A, a), (A, b, a), (B, c, b), (C, a, c), (a, b, c))
    refined, order = shellable_refinement(sub)
    assert len(refined.facets) == 33
    assert refines(refined, sub) and is_shelling(refined, order.order)
    assert sum(volume(f) for f in refined.facets) == volume(rational_hull([A, B, C])) == 72


def test_refinement_of_triangle_in_triangle():
    A, B, C = (0, 0), (8, 0), (4, 8)
    a, b, c = (4, 2), (5, 4), (3, 4)
    sub = complex_of((a, b, c), (A, B, a), (B, C, b), (C, A, c), (a, B, b), (b, C, c), (c, A, a))
    refined, order = shellable_refinement(sub)
    assert len(refined.facets) == 28
    assert refines(refined, sub) and is_shelling(refined, order.order)


def test_refinement_in_dimension_one():
    sub = complex_of([(0,), (1,)], [(1,), (3,)])
    refined, order = shellable_refinement(sub)
    assert len(refined.facets) == 2 and is_shelling(refined, order.order)


def test_refinement_needs_a_tiling():
    with pytest.raises(ShellingError):
        shellable_refinement(complex_of([(0, 0), (1, 0), (0, 1)], [(2, 0), (3, 0), (2, 1)]))


def test_complex_json_round_trip():
    c = four_triangles()
    back = PolytopalComplex.from_json(c.to_json())
    assert [f.vertex_set for f in back.facets] == [f.vertex_set for f in c.facets]
    s = line_shelling(rational_hull(SQUARE))
    assert json.loads(s.to_json()) == list(s.order)
