"""Exact rational polyhedral geometry.

Polytopes carry both a vertex list and an inequality description
``normal . x <= offset`` (plus affine equations when the polytope is not
full-dimensional).  Everything is computed with :class:`fractions.Fraction`;
the algorithms are brute force and meant for small ("desk scale") inputs in
ambient dimension at most three.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, gcd
from typing import Iterable, Sequence

from .rational import det, dot, nullspace, primitive, rank, rref, solve, sub, vec

MAX_REFINEMENT_DIM = 3


class GeometryError(ValueError):
    pass


def _affine_rank(points: Sequence[tuple]) -> int:
    if not points:
        return -1
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]]) if len(points) > 1 else 0


def _integral_halfspace(normal: Sequence, point: Sequence) -> tuple:
    n = primitive(normal)
    return n, dot(n, point)


@dataclass(frozen=True)
class Polytope:
    """A bounded convex polytope with matching V- and H-descriptions."""

    vertices: tuple
    facets: tuple  # ((int normal), Fraction offset) meaning normal . x <= offset
    equations: tuple  # ((int normal), Fraction offset) meaning normal . x == offset
    dim: int

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def barycenter(self) -> tuple:
        k = len(self.vertices)
        return tuple(sum(c) / k for c in zip(*self.vertices))

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def sort_key(self):
        return (self.dim, self.barycenter, self.vertices)

    def contains(self, x: Sequence, strict: bool = False) -> bool:
        x = vec(x)
        for a, b in self.equations:
            if dot(a, x) != b:
                return False
        for a, b in self.facets:
            v = dot(a, x)
            if v > b or (strict and v == b):
                return False
        return True

    def relative_interior_point(self) -> tuple:
        return self.barycenter

    def tight_facets(self, x: Sequence) -> list[int]:
        return [k for k, (a, b) in enumerate(self.facets) if dot(a, x) == b]

    def is_face(self, other: "Polytope | None") -> bool:
        """Whether ``other`` (possibly None for the empty set) is a face of self."""
        if other is None:
            return True
        if not all(self.contains(v) for v in other.vertices):
            return False
        tight = set(range(len(self.facets)))
        for v in other.vertices:
            tight &= set(self.tight_facets(v))
        generated = [v for v in self.vertices if all(dot(self.facets[k][0], v) == self.facets[k][1] for k in tight)]
        return frozenset(generated) == other.vertex_set

    def __repr__(self) -> str:
        verts = ", ".join("(" + ",".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope(dim={self.dim}, vertices=[{verts}])"


def rational_hull(points: Iterable[Sequence]) -> Polytope:
    """Convex hull of finitely many rational points."""
    pts = sorted({vec(p) for p in points})
    if not pts:
        raise GeometryError("convex hull of an empty point set")
    n = len(pts[0])
    for p in pts:
        if len(p) != n:
            raise GeometryError(f"dimension mismatch: point {p} is not in dimension {n}")
    p0 = pts[0]
    diffs = [sub(p, p0) for p in pts[1:]]
    if diffs:
        red, pivots = rref(diffs, n)
    else:
        pivots = []
    r = len(pivots)
    equations = []
    for u in nullspace(diffs, n) if diffs else nullspace([], n):
        equations.append(_integral_halfspace(u, p0))
    if r == 0:
        return Polytope((p0,), (), tuple(sorted(equations)), 0)

    local = [tuple(p[c] for c in pivots) for p in pts]
    facets = {}
    if r == 2:
        candidates = _polygon_edges(local)
    elif r == 3:
        candidates = _solid_facets(local)
    else:
        candidates = _brute_force_facets(local, r)
    for k, a in candidates:
        amb = [Fraction(0)] * n
        for c, x in zip(pivots, a):
            amb[c] = x
        normal, offset = _integral_halfspace(amb, pts[k])
        facets[(normal, offset)] = True
    facet_list = sorted(facets)

    vertices = []
    for p, q in zip(pts, local):
        tight = [tuple(normal[c] for c in pivots) for normal, offset in facet_list if dot(normal, p) == offset]
        if tight and rank(tight) == r:
            vertices.append(p)
    return Polytope(tuple(sorted(vertices)), tuple(facet_list), tuple(sorted(equations)), r)


def _polygon_edges(local: list) -> list:
    """Outer edge normals of a planar point set (monotone chain), with a point on each edge."""
    pts = sorted(set(local))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for q in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    upper: list = []
    for q in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    ring = lower[:-1] + upper[:-1]
    index = {q: k for k, q in enumerate(local)}
    out = []
    for k in range(len(ring)):
        a, b = ring[k], ring[(k + 1) % len(ring)]
        out.append((index[a], (b[1] - a[1], a[0] - b[0])))
    return out


def _solid_facets(local: list) -> list:
    """Facet normals of a full-dimensional point set in R^3, in integer arithmetic."""
    den = 1
    for q in local:
        for x in q:
            den = den * x.denominator // gcd(den, x.denominator)
    ints = [tuple(int(x * den) for x in q) for q in local]
    seen = set()
    out = []
    n = len(ints)
    for i in range(n):
        pi = ints[i]
        for j in range(i + 1, n):
            u = tuple(a - b for a, b in zip(ints[j], pi))
            for k in range(j + 1, n):
                v = tuple(a - b for a, b in zip(ints[k], pi))
                nrm = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
                if nrm == (0, 0, 0):
                    continue
                g = gcd(gcd(abs(nrm[0]), abs(nrm[1])), abs(nrm[2]))
                nrm = tuple(x // g for x in nrm)
                off = sum(a * b for a, b in zip(nrm, pi))
                if (nrm, off) in seen or (tuple(-x for x in nrm), -off) in seen:
                    continue
                pos = neg = False
                for q in ints:
                    t = nrm[0] * q[0] + nrm[1] * q[1] + nrm[2] * q[2] - off
                    if t > 0:
                        pos = True
                    elif t < 0:
                        neg = True
                    if pos and neg:
                        break
                seen.add((nrm, off))
                if pos and neg:
                    continue
                if pos:
                    nrm = tuple(-x for x in nrm)
                out.append((i, tuple(Fraction(x) for x in nrm)))
    return out


def _brute_force_facets(local: list, r: int) -> list:
    out = []
    for combo in combinations(range(len(local)), r):
        base = local[combo[0]]
        rows = [sub(local[c], base) for c in combo[1:]]
        normals = nullspace(rows, r)
        if len(normals) != 1:
            continue
        a = normals[0]
        b = dot(a, base)
        pos = neg = False
        for q in local:
            v = dot(a, q) - b
            if v > 0:
                pos = True
            elif v < 0:
                neg = True
            if pos and neg:
                break
        if pos and neg:
            continue
        if pos:
            a = tuple(-x for x in a)
        out.append((combo[0], a))
    return out


def polytope_from_constraints(inequalities: Sequence, equations: Sequence = (), ambient_dim: int | None = None):
    """Vertex enumeration for ``{x : a.x <= b, c.x == d}``; None when empty.

    The region must be bounded (it always is for the cells built here).
    """
    ineqs = [(vec(a), Fraction(b)) for a, b in inequalities]
    eqs = [(vec(a), Fraction(b)) for a, b in equations]
    if ambient_dim is None:
        ambient_dim = len((ineqs or eqs)[0][0])
    n = ambient_dim
    eq_rows = [a for a, _ in eqs]
    eq_rank = rank(eq_rows) if eq_rows else 0
    need = n - eq_rank
    points = set()
    for combo in combinations(range(len(ineqs)), need):
        rows = eq_rows + [ineqs[k][0] for k in combo]
        rhs = [b for _, b in eqs] + [ineqs[k][1] for k in combo]
        if rank(rows) != n:
            continue
        x = solve(rows, rhs)
        if x is None:
            continue
        if all(dot(a, x) <= b for a, b in ineqs) and all(dot(a, x) == b for a, b in eqs):
            points.add(x)
    if not points:
        return None
    return rational_hull(points)


def intersect(p: Polytope, q: Polytope) -> Polytope | None:
    if p.ambient_dim != q.ambient_dim:
        raise GeometryError("polytopes live in different ambient dimensions")
    return polytope_from_constraints(p.facets + q.facets, p.equations + q.equations, p.ambient_dim)


@dataclass(frozen=True)
class FaceLattice:
    polytope: Polytope
    faces: tuple  # tuple of frozensets of vertices, sorted by (dim, barycenter); includes empty face and P
    dims: tuple
    order: frozenset  # pairs (i, j): face i is properly contained in face j

    def f_vector(self) -> tuple:
        d = self.polytope.dim
        return tuple(sum(1 for k in self.dims if k == i) for i in range(d))

    def euler_ok(self) -> bool:
        d = self.polytope.dim
        if d == 0:
            return True
        chi = sum((-1) ** i * f for i, f in enumerate(self.f_vector()))
        return chi == 1 - (-1) ** d

    def faces_of_dim(self, k: int) -> list[frozenset]:
        return [f for f, dk in zip(self.faces, self.dims) if dk == k]


def _face_key(face: frozenset):
    pts = sorted(face)
    if not pts:
        return (-1, (), ())
    k = len(pts)
    bary = tuple(sum(c) / k for c in zip(*pts))
    return (_affine_rank(pts), bary, tuple(pts))


def face_lattice(p: Polytope) -> FaceLattice:
    """All faces of ``p`` (empty face and ``p`` included) with containment."""
    full = p.vertex_set
    facet_sets = []
    for a, b in p.facets:
        facet_sets.append(frozenset(v for v in p.vertices if dot(a, v) == b))
    faces = {full}
    frontier = set(facet_sets)
    while frontier:
        faces |= frontier
        new = set()
        for f in frontier:
            for g in facet_sets:
                h = f & g
                if h not in faces:
                    new.add(h)
        frontier = new
    faces.add(frozenset())
    ordered = sorted(faces, key=_face_key)
    dims = tuple(_affine_rank(sorted(f)) for f in ordered)
    order = frozenset(
        (i, j) for i, fi in enumerate(ordered) for j, fj in enumerate(ordered) if i != j and fi < fj
    )
    return FaceLattice(p, tuple(ordered), dims, order)


def faces_as_polytopes(p: Polytope, include_self: bool = True) -> list[Polytope]:
    lat = face_lattice(p)
    out = []
    for f in lat.faces:
        if not f:
            continue
        if f == p.vertex_set and not include_self:
            continue
        out.append(p if f == p.vertex_set else rational_hull(f))
    return out


def simplices(p: Polytope) -> list[tuple]:
    """A pulling triangulation of ``p`` (lists of vertex tuples)."""
    lat = face_lattice(p)

    def tri(face: frozenset, dim: int):
        if dim == 0:
            return [tuple(face)]
        v0 = min(face)
        out = []
        for g, dg in zip(lat.faces, lat.dims):
            if dg == dim - 1 and g < face and v0 not in g:
                for s in tri(g, dim - 1):
                    out.append(s + (v0,))
        return out

    return tri(p.vertex_set, p.dim)


def volume(p: Polytope) -> Fraction:
    """``dim p``-dimensional volume measured in the coordinate projection used for ``p``.

    For full-dimensional polytopes this is the ordinary Lebesgue volume.
    """
    d = p.dim
    if d == 0:
        return Fraction(1)
    if d == p.ambient_dim:
        coords = list(range(d))
    else:
        p0 = p.vertices[0]
        _, coords = rref([sub(v, p0) for v in p.vertices[1:]], p.ambient_dim)
    total = Fraction(0)
    for s in simplices(p):
        pts = [tuple(v[c] for c in coords) for v in s]
        total += abs(det([sub(q, pts[0]) for q in pts[1:]]))
    return total / factorial(d)


@dataclass(frozen=True)
class CellComplex:
    """A polyhedral complex given by all of its nonempty cells.

    Cells are ordered canonically by (dimension, barycenter); ``incidence``
    holds pairs ``(i, j)`` with cell ``i`` a proper face of cell ``j``.
    """

    cells: tuple
    incidence: frozenset = field(repr=False)

    @property
    def dim(self) -> int:
        return max(c.dim for c in self.cells)

    @property
    def ambient_dim(self) -> int:
        return self.cells[0].ambient_dim

    def indices_of_dim(self, k: int) -> list[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == k]

    @property
    def top_indices(self) -> list[int]:
        return self.indices_of_dim(self.dim)

    def faces_of(self, j: int) -> list[int]:
        return sorted(i for i, jj in self.incidence if jj == j)

    def cofaces_of(self, i: int) -> list[int]:
        return sorted(j for ii, j in self.incidence if ii == i)

    def index_of(self, p: Polytope) -> int:
        for k, c in enumerate(self.cells):
            if c.vertex_set == p.vertex_set:
                return k
        raise KeyError(p)

    def f_vector(self) -> tuple:
        return tuple(len(self.indices_of_dim(k)) for k in range(self.dim + 1))

    def support(self) -> Polytope:
        return rational_hull(v for c in self.cells for v in c.vertices)

    def check_intersections(self) -> bool:
        """Every pairwise intersection is a (possibly empty) face of both cells."""
        for a, b in combinations(range(len(self.cells)), 2):
            p, q = self.cells[a], self.cells[b]
            r = intersect(p, q)
            if not (p.is_face(r) and q.is_face(r)):
                return False
        return True

    def check_volume(self, ambient: Polytope | None = None) -> bool:
        ambient = ambient or self.support()
        top = [self.cells[i] for i in self.top_indices]
        if any(c.dim != ambient.dim for c in top):
            return False
        return sum(volume(c) for c in top) == volume(ambient)

    def is_isomorphic(self, other: "CellComplex") -> bool:
        return [c.vertices for c in self.cells] == [c.vertices for c in other.cells]


def complex_from_cells(top_cells: Iterable[Polytope]) -> CellComplex:
    """Close a list of cells under taking faces."""
    by_vertices = {}
    for cell in top_cells:
        for f in faces_as_polytopes(cell):
            by_vertices.setdefault(f.vertex_set, f)
    cells = sorted(by_vertices.values(), key=Polytope.sort_key)
    incidence = frozenset(
        (i, j)
        for i, ci in enumerate(cells)
        for j, cj in enumerate(cells)
        if ci.dim < cj.dim and ci.vertex_set < cj.vertex_set
    )
    return CellComplex(tuple(cells), incidence)


def split_by_hyperplanes(region: Polytope, hyperplanes: Iterable[tuple]) -> list[Polytope]:
    """Cut ``region`` by every hyperplane ``a.x == b`` that meets its relative interior."""
    cells = [region]
    for a, b in hyperplanes:
        a = vec(a)
        b = Fraction(b)
        nxt = []
        for cell in cells:
            vals = [dot(a, v) - b for v in cell.vertices]
            if min(vals) < 0 < max(vals):
                base = list(cell.facets)
                neg_a = tuple(-x for x in a)
                lo = polytope_from_constraints(base + [(a, b)], cell.equations, cell.ambient_dim)
                hi = polytope_from_constraints(base + [(neg_a, -b)], cell.equations, cell.ambient_dim)
                nxt.extend(c for c in (lo, hi) if c is not None and c.dim == cell.dim)
            else:
                nxt.append(cell)
        cells = nxt
    return sorted(cells, key=Polytope.sort_key)


def cutting_hyperplanes(p: Polytope) -> list[tuple]:
    """Hyperplanes a polytope contributes to an overlay.

    Full-dimensional polytopes contribute their facet hyperplanes, codimension-one
    polytopes their affine hull; smaller ones cannot separate top cells.
    """
    codim = p.ambient_dim - p.dim
    if codim == 0:
        return list(p.facets)
    if codim == 1:
        return list(p.equations)
    return []


def common_refinement(polytopes: Sequence[Polytope]) -> CellComplex:
    """Overlay of polytopes inside the hull of their union."""
    polytopes = list(polytopes)
    if not polytopes:
        raise GeometryError("common refinement of an empty list")
    n = polytopes[0].ambient_dim
    if any(p.ambient_dim != n for p in polytopes):
        raise GeometryError("polytopes live in different ambient dimensions")
    if n > MAX_REFINEMENT_DIM:
        raise GeometryError(f"unsupported ambient dimension {n} (cap {MAX_REFINEMENT_DIM})")
    ambient = rational_hull(v for p in polytopes for v in p.vertices)
    hyperplanes = []
    seen = set()
    for p in polytopes:
        for h in cutting_hyperplanes(p):
            key = h if h[0] > tuple(-x for x in h[0]) else (tuple(-x for x in h[0]), -h[1])
            if key not in seen:
                seen.add(key)
                hyperplanes.append(key)
    return complex_from_cells(split_by_hyperplanes(ambient, sorted(hyperplanes)))
