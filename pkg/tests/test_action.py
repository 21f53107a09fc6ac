from fractions import Fraction

import pytest

from vgit.action import (
    ActionError,
    TorusAction,
    chamber_complex,
    load_action,
    moment_polytope,
    sampled_stability_check,
    wall_one_parameter_subgroup,
)
from vgit.rational import dot

HALF = Fraction(1, 2)


def test_moment_polytopes():
    line = TorusAction(1, ((0,), (1,), (2,)))
    assert sorted(moment_polytope(line).vertices) == [(0,), (2,)]
    sq = TorusAction(2, ((0, 0), (1, 0), (0, 1), (1, 1)))
    assert len(moment_polytope(sq).vertices) == 4
    diag = moment_polytope(sq, [0, 3])
    assert diag.dim == 1 and diag.vertex_set == frozenset({(0, 0), (1, 1)})
    with pytest.raises(ActionError):
        moment_polytope(sq, [])


def test_rank_one_chambers(actions):
    cc = chamber_complex(actions["p2_line"])
    assert [sorted(cc.chamber(i).vertices) for i in range(2)] == [[(0,), (1,)], [(1,), (2,)]]
    assert len(cc.walls) == 1
    w = cc.walls[0]
    assert w.support == (1,) and w.lam == (1,) and w.adjacent == (0, 1)
    assert cc.codim2 == ()


def test_square_chambers(actions):
    cc = chamber_complex(actions["square"])
    assert len(cc.chambers) == 4 and len(cc.walls) == 4
    center = (HALF, HALF)
    for i in range(4):
        assert len(cc.chamber(i).vertices) == 3 and center in cc.chamber(i).vertices
    interior = [c for c in cc.codim2 if c.interior]
    assert len(interior) == 1
    assert cc.base.cells[interior[0].cell].vertices == (center,)
    assert interior[0].chambers == (0, 1, 2, 3)


def test_single_chamber_triangle(actions):
    cc = chamber_complex(actions["triangle"])
    assert len(cc.chambers) == 1 and cc.walls == ()
    assert len(cc.boundary_walls) == 3


def test_wall_lambdas_on_square(actions):
    cc = chamber_complex(actions["square"])
    by_support = {w.support: w for w in cc.walls}
    assert {w.lam for w in cc.walls if w.support == (0, 3)} <= {(1, -1), (-1, 1)}
    assert {w.lam for w in cc.walls if w.support == (1, 2)} <= {(1, 1), (-1, -1)}
    assert set(by_support) == {(0, 3), (1, 2)}
    W = actions["square"].effective_weights
    for j, w in enumerate(cc.walls):
        values = {dot(w.lam, W[i]) for i in w.support}
        assert values == {w.level}
        assert len({dot(w.lam, x) for k, x in enumerate(W) if k not in w.support}) >= 1
        # orientation: lambda increases from the first adjacent chamber to the second
        a, b = (cc.chamber_point(i) for i in w.adjacent)
        assert dot(w.lam, a) < w.level < dot(w.lam, b)
        assert wall_one_parameter_subgroup(actions["square"], cc, w.cell) == w.lam


def test_lambda_rejects_non_wall_cell(actions):
    cc = chamber_complex(actions["square"])
    with pytest.raises(ActionError):
        wall_one_parameter_subgroup(actions["square"], cc, cc.chambers[0])


def test_effective_rank_zero():
    with pytest.raises(ActionError):
        chamber_complex(TorusAction(1, ((3,), (3,))))


def test_kernel_action(actions):
    a = actions["kernel"]
    assert a.effective_rank == 1 and a.quotient_dim == 1
    cc = chamber_complex(a)
    assert len(cc.chambers) == 2 and len(cc.walls) == 1


def test_shift_is_combinatorially_invariant(actions):
    a, b = chamber_complex(actions["square"]), chamber_complex(actions["shifted_square"])
    assert a.base.f_vector() == b.base.f_vector()
    shift = actions["shifted_square"].shift
    moved = sorted(tuple(x + s for x, s in zip(v, shift)) for i in range(4) for v in a.chamber(i).vertices)
    assert moved == sorted(v for i in range(4) for v in b.chamber(i).vertices)
    assert [w.lam for w in a.walls] == [w.lam for w in b.walls]


def test_sampling_oracle(actions):
    for name in ("p2_line", "square", "pent"):
        assert sampled_stability_check(chamber_complex(actions[name]), samples=20, seed=3) == []


def test_file_round_trip(tmp_path, actions):
    for a in actions.values():
        text = a.to_text()
        path = tmp_path / "a.json"
        path.write_text(text)
        b = load_action(path)
        assert b == a and b.to_text() == text
    assert actions["p2_line"].n == 1 and actions["p2_line"].m == 2
    assert actions["square"].n == 2 and actions["square"].m == 3


@pytest.mark.parametrize(
    "text, message",
    [
        ('{"rank": 2, "weights": [[0, 0], [1]]}', "row 1"),
        ('{"rank": 1, "weights": [[0], [1.5]]}', "row 1"),
        ('{"rank": 1}', "needs"),
        ('{"rank": 1, "weights": [[0]], "colour": 3}', "unknown"),
        ("[1, 2", "malformed"),
    ],
)
def test_bad_action_files(text, message):
    with pytest.raises(ActionError, match=message):
        TorusAction.from_text(text)
