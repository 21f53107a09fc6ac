"""Torus actions on projective space, their moment images and GIT chambers."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .geometry import (
    CellComplex,
    Polytope,
    complex_from_cells,
    polytope_from_constraints,
    rational_hull,
    split_by_hyperplanes,
)
from .rational import dot, nullspace, primitive, rank, rref, sub


class ActionError(ValueError):
    pass


@dataclass(frozen=True)
class TorusAction:
    """Diagonal action of an n-dimensional torus on P^m through integer weights.

    ``weights[i]`` is the character on the homogeneous coordinate ``x_i``.
    ``shift`` records a change of linearization and is added to every weight.
    """

    rank: int
    weights: tuple
    label: str = ""
    shift: tuple | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise ActionError("torus rank must be at least 1")
        ws = tuple(tuple(int(x) for x in w) for w in self.weights)
        if not ws:
            raise ActionError("at least one weight is required")
        for k, w in enumerate(ws):
            if len(w) != self.rank:
                raise ActionError(f"weight row {k} has length {len(w)}, expected rank {self.rank}")
        object.__setattr__(self, "weights", ws)
        if self.shift is not None:
            s = tuple(int(x) for x in self.shift)
            if len(s) != self.rank:
                raise ActionError(f"shift has length {len(s)}, expected rank {self.rank}")
            object.__setattr__(self, "shift", s)

    @property
    def m(self) -> int:
        return len(self.weights) - 1

    @property
    def n(self) -> int:
        return self.rank

    @cached_property
    def moment_weights(self) -> tuple:
        """Weights after applying the linearization shift."""
        if self.shift is None:
            return self.weights
        return tuple(tuple(a + b for a, b in zip(w, self.shift)) for w in self.weights)

    @cached_property
    def _reduction(self):
        w0 = self.moment_weights[0]
        diffs = [sub(w, w0) for w in self.moment_weights[1:]]
        if not diffs or rank(diffs) == 0:
            return 0, []
        _, pivots = rref(diffs, self.rank)
        return len(pivots), pivots

    @property
    def effective_rank(self) -> int:
        return self._reduction[0]

    @cached_property
    def effective_weights(self) -> tuple:
        """Weights written in coordinates of the effective quotient torus.

        When the action has a positive-dimensional kernel, the weights are
        projected onto pivot coordinates of their difference lattice; the
        projection is injective on the affine span, so the chamber structure
        is unchanged.
        """
        r, pivots = self._reduction
        if r == self.rank:
            return tuple(tuple(Fraction(x) for x in w) for w in self.moment_weights)
        return tuple(tuple(Fraction(w[c]) for c in pivots) for w in self.moment_weights)

    @property
    def quotient_dim(self) -> int:
        """dim X - dim T for X = P^m and the effective torus."""
        return self.m - self.effective_rank

    def translated(self, v: Sequence[int]) -> "TorusAction":
        return TorusAction(self.rank, tuple(tuple(a + b for a, b in zip(w, v)) for w in self.weights), self.label, self.shift)

    def subset_hull(self, support) -> Polytope:
        return _subset_hull(self.effective_weights, tuple(sorted(support)))

    def stability_signature(self, point: Sequence) -> frozenset:
        """Coordinate subsets whose weight hull contains ``point``.

        A point of P^m with nonzero coordinates exactly on S is semistable for
        the linearization ``point`` iff ``point`` lies in the hull of the
        weights of S (torus Hilbert-Mumford criterion).
        """
        idx = range(len(self.weights))
        out = []
        for k in range(1, len(self.weights) + 1):
            for s in combinations(idx, k):
                if self.subset_hull(s).contains(point):
                    out.append(s)
        return frozenset(out)

    # -- file format -------------------------------------------------------

    def to_text(self) -> str:
        lines = ["{"]
        lines.append(f'  "label": {json.dumps(self.label)},')
        lines.append(f'  "rank": {self.rank},')
        if self.shift is not None:
            lines.append(f'  "shift": {json.dumps(list(self.shift))},')
        lines.append(f'  "weights": {json.dumps([list(w) for w in self.weights])}')
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TorusAction":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ActionError(f"malformed action file: {exc}") from None
        if not isinstance(data, dict):
            raise ActionError("action file must contain an object")
        unknown = set(data) - {"rank", "weights", "label", "shift"}
        if unknown:
            raise ActionError(f"unknown fields: {sorted(unknown)}")
        if "rank" not in data or "weights" not in data:
            raise ActionError("action file needs 'rank' and 'weights'")
        rk = data["rank"]
        if not isinstance(rk, int) or isinstance(rk, bool):
            raise ActionError(f"rank must be an integer, got {rk!r}")
        weights = data["weights"]
        if not isinstance(weights, list) or not weights:
            raise ActionError("weights must be a nonempty list of integer vectors")
        for k, w in enumerate(weights):
            if not isinstance(w, list) or any(not isinstance(x, int) or isinstance(x, bool) for x in w):
                raise ActionError(f"weight row {k} is not a list of integers: {w!r}")
            if len(w) != rk:
                raise ActionError(f"weight row {k} has length {len(w)}, expected rank {rk}")
        shift = data.get("shift")
        if shift is not None and (
            not isinstance(shift, list) or any(not isinstance(x, int) or isinstance(x, bool) for x in shift)
        ):
            raise ActionError(f"shift must be a list of integers, got {shift!r}")
        label = data.get("label", "")
        if not isinstance(label, str):
            raise ActionError("label must be a string")
        return cls(rk, tuple(tuple(w) for w in weights), label, tuple(shift) if shift is not None else None)


_HULL_CACHE: dict = {}


def _subset_hull(weights: tuple, support: tuple) -> Polytope:
    key = (weights, support)
    hull = _HULL_CACHE.get(key)
    if hull is None:
        hull = rational_hull(weights[i] for i in support)
        if len(_HULL_CACHE) > 200_000:
            _HULL_CACHE.clear()
        _HULL_CACHE[key] = hull
    return hull


def load_action(path) -> TorusAction:
    return TorusAction.from_text(Path(path).read_text(encoding="utf-8"))


def moment_polytope(a: TorusAction, support: Sequence[int] | None = None) -> Polytope:
    """Hull of the (shifted) weights of the coordinates in ``support``."""
    if support is None:
        support = range(len(a.weights))
    support = sorted(set(support))
    if not support:
        raise ActionError("empty support")
    for i in support:
        if not 0 <= i < len(a.weights):
            raise ActionError(f"coordinate index {i} out of range")
    return rational_hull(a.moment_weights[i] for i in support)


@dataclass(frozen=True)
class Wall:
    cell: int  # index into ChamberComplex.base.cells
    support: tuple  # coordinates whose weights lie on the wall's hyperplane
    lam: tuple  # primitive one-parameter subgroup fixing the wall
    level: Fraction  # common value of <lam, w_i> on the support
    adjacent: tuple  # chamber ids (one or two)


@dataclass(frozen=True)
class Codim2Cell:
    cell: int
    chambers: tuple
    walls: tuple  # interior wall ids containing the cell
    interior: bool


@dataclass(frozen=True)
class ChamberComplex:
    action: TorusAction
    base: CellComplex
    chambers: tuple  # cell indices of the chambers, chamber id = position
    walls: tuple  # walls between two distinct chambers (the set J)
    boundary_walls: tuple
    codim2: tuple = field(default=())

    def chamber(self, i: int) -> Polytope:
        return self.base.cells[self.chambers[i]]

    def wall_cell(self, j: int) -> Polytope:
        return self.base.cells[self.walls[j].cell]

    def chamber_point(self, i: int) -> tuple:
        return self.chamber(i).barycenter

    def chamber_of_cell(self, cell: int) -> int:
        return self.chambers.index(cell)

    @property
    def dim(self) -> int:
        return self.base.dim


def _hyperplane_through(points: Sequence) -> tuple | None:
    p0 = points[0]
    rows = [sub(p, p0) for p in points[1:]]
    normals = nullspace(rows, len(p0)) if rows else nullspace([], len(p0))
    if len(normals) != 1:
        return None
    nrm = primitive(normals[0])
    return nrm, dot(nrm, p0)


def _orient(nrm: tuple, off: Fraction) -> tuple:
    if nrm < tuple(-x for x in nrm):
        return tuple(-x for x in nrm), -off
    return nrm, off


def chamber_complex(a: TorusAction) -> ChamberComplex:
    """GIT chamber decomposition of the moment polytope of ``a`` on P^m.

    The chamber of a generic point is the intersection of all weight simplices
    containing it; the arrangement of hyperplanes spanned by weights is used
    to find one generic point in every chamber.
    """
    r = a.effective_rank
    if r == 0:
        raise ActionError("effective rank 0: the torus acts through a character, there are no chambers")
    W = a.effective_weights
    idx = range(len(W))
    ambient = rational_hull(W)

    hyperplanes = set()
    for s in combinations(idx, r):
        pts = [W[i] for i in s]
        if r == 1:
            hyperplanes.add(_orient((1,), pts[0][0]))
            continue
        h = _hyperplane_through(pts)
        if h is not None:
            hyperplanes.add(_orient(*h))
    arrangement = split_by_hyperplanes(ambient, sorted(hyperplanes))

    simplices = []
    for s in combinations(idx, r + 1):
        hull = _subset_hull(W, s)
        if hull.dim == r:
            simplices.append(hull)

    chambers = {}
    for cell in arrangement:
        p = cell.barycenter
        cons = []
        for simp in simplices:
            if simp.contains(p):
                cons.extend(simp.facets)
        ch = polytope_from_constraints(cons, (), r)
        chambers.setdefault(ch.vertex_set, ch)
    base = complex_from_cells(chambers.values())
    chamber_cells = tuple(base.top_indices)

    walls, boundary = [], []
    for c in base.indices_of_dim(r - 1):
        adj = tuple(sorted(chamber_cells.index(j) for j in base.cofaces_of(c) if j in chamber_cells))
        wall = _make_wall(a, base, chamber_cells, c, adj)
        (walls if len(adj) == 2 else boundary).append(wall)

    codim2 = []
    if r >= 2:
        boundary_cells = {w.cell for w in boundary}
        wall_cells = [w.cell for w in walls]
        for c in base.indices_of_dim(r - 2):
            cof = base.cofaces_of(c)
            chs = tuple(sorted(chamber_cells.index(j) for j in cof if j in chamber_cells))
            ws = tuple(k for k, wc in enumerate(wall_cells) if wc in cof)
            interior = not any(j in boundary_cells for j in cof)
            codim2.append(Codim2Cell(c, chs, ws, interior))
    return ChamberComplex(a, base, chamber_cells, tuple(walls), tuple(boundary), tuple(codim2))


def _make_wall(a: TorusAction, base: CellComplex, chamber_cells, c: int, adjacent: tuple) -> Wall:
    W = a.effective_weights
    cell = base.cells[c]
    r = cell.ambient_dim
    if cell.dim != r - 1:
        raise ActionError(f"cell {c} is not of codimension one")
    if r == 1:
        nrm, off = (1,), cell.vertices[0][0]
    else:
        pts = list(cell.vertices)
        if len(pts) < r:
            raise ActionError("degenerate wall cell")
        nrm, off = _hyperplane_through(pts[:1] + _spanning(pts, r - 1))
    support = tuple(i for i, w in enumerate(W) if dot(nrm, w) == off)
    if not support or (r > 1 and rank([sub(W[i], W[support[0]]) for i in support[1:]]) != r - 1):
        raise ActionError(f"support of wall cell {c} does not affinely span it")
    first = base.cells[chamber_cells[adjacent[0]]]
    if len(adjacent) == 2:
        direction = sub(base.cells[chamber_cells[adjacent[1]]].barycenter, first.barycenter)
    else:
        direction = sub(cell.barycenter, first.barycenter)
    if dot(nrm, direction) < 0:
        nrm, off = tuple(-x for x in nrm), -off
    return Wall(c, support, nrm, Fraction(off), adjacent)


def _spanning(points, k):
    """k points among ``points[1:]`` whose differences with points[0] are independent."""
    p0 = points[0]
    chosen = []
    for p in points[1:]:
        cand = chosen + [p]
        if rank([sub(q, p0) for q in cand]) == len(cand):
            chosen = cand
        if len(chosen) == k:
            break
    return chosen


def wall_one_parameter_subgroup(a: TorusAction, cc: ChamberComplex, cell: int) -> tuple:
    """Primitive lambda with <lambda, w_i> constant on the support of a codimension-one cell."""
    base = cc.base
    if base.cells[cell].dim != base.ambient_dim - 1:
        raise ActionError(f"cell {cell} is not of codimension one")
    adj = tuple(sorted(cc.chambers.index(j) for j in base.cofaces_of(cell) if j in cc.chambers))
    return _make_wall(a, base, cc.chambers, cell, adj).lam


def sampled_stability_check(cc: ChamberComplex, samples: int = 100, seed: int = 0) -> list[str]:
    """Compare the chambers with a brute-force hull-membership oracle.

    Random interior points of each chamber (positive rational combinations
    of its vertices) must all have the stability signature of the
    barycenter, and distinct chambers must have distinct signatures.
    Returns the list of problems found; empty means the chambers agree.
    """
    rng = random.Random(seed)
    a = cc.action
    problems = []
    seen = {}
    for i in range(len(cc.chambers)):
        cell = cc.chamber(i)
        ref = a.stability_signature(cell.barycenter)
        if ref in seen:
            problems.append(f"chambers {seen[ref]} and {i} have the same semistable locus")
        seen.setdefault(ref, i)
        for _ in range(samples):
            coeffs = [rng.randint(1, 1000) for _ in cell.vertices]
            total = sum(coeffs)
            p = tuple(sum(Fraction(c, total) * v[k] for c, v in zip(coeffs, cell.vertices)) for k in range(cell.ambient_dim))
            if a.stability_signature(p) != ref:
                problems.append(f"chamber {i}: sample ({','.join(map(str, p))}) is in a different GIT class")
                break
    return problems
