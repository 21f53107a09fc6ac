"""Shellings of polytopal complexes.

* :func:`is_shelling` decides whether a facet order is a shelling, recursing
  into facet boundaries (supported for complexes of dimension at most three).
* :func:`line_shelling` is the Bruggesser-Mani rocket-flight order of the
  boundary of a polytope, made generic by a symbolic perturbation of the
  flight direction.
* :func:`shellable_refinement` lifts a planar subdivision to a polytope one
  dimension up and reads a shelling of a refinement off its lower facets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .geometry import (
    GeometryError,
    Polytope,
    face_lattice,
    faces_as_polytopes,
    intersect,
    rational_hull,
    split_by_hyperplanes,
    volume,
)
from .rational import dot, format_rational, parse_rational, vec

MAX_SHELLING_DIM = 3
MAX_REFINEMENT_DIM = 2


class ShellingError(ValueError):
    pass


@dataclass(frozen=True)
class PolytopalComplex:
    facets: tuple  # Polytopes of a common dimension

    def __post_init__(self):
        if not self.facets:
            raise ShellingError("a complex needs at least one facet")
        dims = {f.dim for f in self.facets}
        if len(dims) != 1:
            raise ShellingError(f"non-pure complex: facet dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.facets[0].dim

    @cached_property
    def _structure(self) -> "_Faces":
        return _Faces(self.facets)

    @cached_property
    def ridges(self) -> tuple:
        """Codimension-one faces with the facets containing them."""
        s = self._structure
        out = {}
        for k, f in enumerate(self.facets):
            for r in s.sub[f.vertex_set]:
                out.setdefault(r, []).append(k)
        return tuple(sorted(((r, tuple(v)) for r, v in out.items()), key=lambda x: sorted(x[0])))

    def check_complex(self) -> None:
        """Pairwise intersections must be faces of both facets."""
        for a in range(len(self.facets)):
            for b in range(a + 1, len(self.facets)):
                p, q = self.facets[a], self.facets[b]
                r = intersect(p, q)
                if r is not None and not (p.is_face(r) and q.is_face(r)):
                    raise ShellingError(f"facets {a} and {b} do not meet in a common face")

    def to_json(self) -> str:
        data = [[[format_rational(x) for x in v] for v in f.vertices] for f in self.facets]
        return json.dumps(data)

    @classmethod
    def from_json(cls, text: str) -> "PolytopalComplex":
        data = json.loads(text)
        return cls(tuple(rational_hull([tuple(parse_rational(x) for x in v) for v in f]) for f in data))

    @classmethod
    def boundary(cls, p: Polytope) -> "PolytopalComplex":
        if p.dim < 1:
            raise ShellingError("a point has no boundary complex")
        facets = [f for f in faces_as_polytopes(p, include_self=False) if f.dim == p.dim - 1]
        return cls(tuple(facets))


class _Faces:
    """Combinatorial face data (vertex sets) of a collection of polytopes."""

    def __init__(self, polytopes: Sequence[Polytope]):
        self.dim: dict = {}
        self.sub: dict = {}
        for p in polytopes:
            lat = face_lattice(p)
            for f, d in zip(lat.faces, lat.dims):
                if f:
                    self.dim[f] = d
            for f, d in zip(lat.faces, lat.dims):
                if f and f not in self.sub:
                    self.sub[f] = tuple(
                        sorted((g for g, dg in zip(lat.faces, lat.dims) if dg == d - 1 and g and g < f), key=sorted)
                    )


@dataclass
class ShellingCheck:
    ok: bool
    certificates: list  # per step: ridges of F_j lying in earlier facets
    failing_index: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class ShellingOrder:
    complex: PolytopalComplex
    order: tuple
    certificates: list = field(default_factory=list)

    def facets(self) -> list:
        return [self.complex.facets[k] for k in self.order]

    def to_json(self) -> str:
        return json.dumps(list(self.order))


def _step(face: frozenset, earlier: Sequence[frozenset], faces: _Faces, memo: dict):
    """Decide the shelling condition for adding ``face`` after ``earlier``."""
    if not earlier or faces.dim[face] == 0:
        return True, (), ""
    inters = {face & g for g in earlier} - {frozenset()}
    if not inters:
        return False, (), "intersection with earlier facets is empty"
    ridges = faces.sub[face]
    certs = tuple(r for r in ridges if any(r <= g for g in earlier))
    maximal = [q for q in inters if not any(q < q2 for q2 in inters)]
    for q in maximal:
        if not any(q <= r for r in certs):
            return False, certs, "intersection is not pure of codimension one"
    if not _is_beginning(ridges, certs, faces, memo):
        return False, certs, "intersection is not the beginning of a shelling of the facet boundary"
    return True, certs, ""


def _is_beginning(facets: tuple, start: tuple, faces: _Faces, memo: dict) -> bool:
    """Whether some shelling of the complex ``facets`` begins with the set ``start``."""
    if not facets or faces.dim[facets[0]] == 0:
        return True
    key = (facets, frozenset(start))
    if key in memo:
        return memo[key]
    if faces.dim[facets[0]] == 1 and _is_cycle(facets):
        result = _connected_edges(start)
    else:
        result = _reachable(facets, frozenset(start), faces, memo)
    memo[key] = result
    return result


def _is_cycle(edges: tuple) -> bool:
    deg: dict = {}
    for e in edges:
        for v in e:
            deg[v] = deg.get(v, 0) + 1
    return all(d == 2 for d in deg.values()) and _connected_edges(edges)


def _connected_edges(edges) -> bool:
    edges = list(edges)
    if not edges:
        return True
    seen = {0}
    stack = [0]
    while stack:
        a = stack.pop()
        for b in range(len(edges)):
            if b not in seen and edges[a] & edges[b]:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(edges)


def _reachable(facets: tuple, start: frozenset, faces: _Faces, memo: dict) -> bool:
    # the shelling condition for the next facet depends only on the set already
    # placed, so a search over subsets suffices
    n = len(facets)
    idx_start = frozenset(k for k in range(n) if facets[k] in start)
    full = frozenset(range(n))
    seen = set()
    stack = [frozenset()]
    while stack:
        s = stack.pop()
        if s == full:
            return True
        inside = s < idx_start
        for k in range(n):
            if k in s or (inside and k not in idx_start) or (not inside and not idx_start <= s):
                continue
            ok, _, _ = _step(facets[k], [facets[i] for i in s], faces, memo)
            if ok:
                t = s | {k}
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return False


def is_shelling(c: PolytopalComplex, order: Sequence[int]) -> ShellingCheck:
    """Check the shelling conditions for ``order`` (a permutation of facet indices)."""
    order = list(order)
    if sorted(order) != list(range(len(c.facets))):
        raise ShellingError("order is not a permutation of the facets")
    if c.dim > MAX_SHELLING_DIM:
        raise ShellingError(f"unsupported dimension {c.dim} (cap {MAX_SHELLING_DIM})")
    faces = c._structure
    memo: dict = {}
    sets = [c.facets[k].vertex_set for k in order]
    certs = []
    for j, f in enumerate(sets):
        ok, cert, reason = _step(f, sets[:j], faces, memo)
        if j:
            certs.append(cert)
        if not ok:
            return ShellingCheck(False, certs, j, reason)
    return ShellingCheck(True, certs)


def remark_holds(c: PolytopalComplex, order: Sequence[int], check: ShellingCheck) -> bool:
    """If two certificate ridges of a step share a codimension-two face H, every
    facet containing H already appears up to that step."""
    faces = c._structure
    sets = [c.facets[k].vertex_set for k in order]
    d = c.dim
    for j, cert in enumerate(check.certificates, start=1):
        placed = set(sets[: j + 1])
        for a in range(len(cert)):
            for b in range(a + 1, len(cert)):
                h = cert[a] & cert[b]
                if not h or faces.dim.get(h) != d - 2:
                    continue
                if any(h <= f and f not in placed for f in sets):
                    return False
    return True


# -- Bruggesser-Mani ---------------------------------------------------------


def _poly_sign(coeffs: Sequence[Fraction]) -> int:
    """Sign of sum c_i eps^i for infinitesimal eps > 0."""
    for c in coeffs:
        if c:
            return 1 if c > 0 else -1
    return 0


def _poly_mul_scalar(c, p):
    return [c * x for x in p]


def _crossing_sort(facets, x0, v) -> list[int]:
    """Rocket-flight order of facets for the line x0 + t v(eps), v(eps) = v + sum eps^i e_i."""
    n = len(v)
    nums, dens = [], []
    for a, b in facets:
        nums.append(Fraction(b) - dot(a, x0))
        dens.append([dot(a, v)] + [Fraction(a[i]) for i in range(n)])
    for k, num in enumerate(nums):
        if num <= 0:
            raise ShellingError("base point of the flight is not interior")
    sign = [_poly_sign(d) for d in dens]

    def before(k, l):
        # t_k < t_l  <=>  num_k den_l - num_l den_k has the sign of den_k den_l
        diff = [x - y for x, y in zip(_poly_mul_scalar(nums[k], dens[l]), _poly_mul_scalar(nums[l], dens[k]))]
        s = _poly_sign(diff) * sign[k] * sign[l]
        if s == 0:
            raise ShellingError("two facets cross at the same time")
        return s < 0

    def insort(idx):
        out: list = []
        for k in idx:
            pos = len(out)
            while pos > 0 and before(k, out[pos - 1]):
                pos -= 1
            out.insert(pos, k)
        return out

    pos = insort([k for k in range(len(facets)) if sign[k] > 0])
    neg = insort([k for k in range(len(facets)) if sign[k] < 0])
    return pos + neg


def line_shelling(
    p: Polytope,
    direction: Sequence | None = None,
    ending_facet: int | None = None,
    base_point: Sequence | None = None,
) -> ShellingOrder:
    """Bruggesser-Mani shelling of the boundary of a full-dimensional polytope.

    Facet indices refer to ``PolytopalComplex.boundary(p)``.  With
    ``ending_facet`` the flight starts next to that facet and leaves through
    it, and the reversed order is returned so that it ends there.
    """
    if p.dim != p.ambient_dim:
        raise ShellingError("line shelling needs a full-dimensional polytope")
    bc = PolytopalComplex.boundary(p)
    # match boundary facets to the H-description
    hs = []
    for f in bc.facets:
        for a, b in p.facets:
            if all(dot(a, x) == b for x in f.vertices):
                hs.append((a, b))
                break
    center = p.barycenter
    if ending_facet is not None:
        a, b = hs[ending_facet]
        fc = bc.facets[ending_facet].barycenter
        delta = Fraction(1, 2)
        for _ in range(64):
            x0 = tuple(q + delta * (c - q) for q, c in zip(fc, center))
            order = _crossing_sort(hs, x0, tuple(Fraction(x) for x in a))
            if order[0] == ending_facet:
                order = order[::-1]
                break
            delta /= 2
        else:  # pragma: no cover - a point close enough to the facet always works
            raise ShellingError("could not aim the flight at the requested facet")
    else:
        v = vec(direction) if direction is not None else tuple(Fraction(int(i == 0)) for i in range(p.dim))
        if not any(v):
            raise ShellingError("zero direction")
        x0 = vec(base_point) if base_point is not None else center
        if not p.contains(x0, strict=True):
            raise ShellingError("base point must be interior")
        order = _crossing_sort(hs, x0, v)
    check = is_shelling(bc, order)
    if not check:
        raise ShellingError(f"line shelling failed at step {check.failing_index}: {check.reason}")
    return ShellingOrder(bc, tuple(order), check.certificates)


# -- shellable refinement --------------------------------------------------------


def _edge_lines(cells: Sequence[Polytope]) -> list[tuple]:
    lines = set()
    for cell in cells:
        for a, b in cell.facets:
            lines.add((tuple(a), Fraction(b)))
    return sorted(lines)


def shellable_refinement(sub: PolytopalComplex) -> tuple[PolytopalComplex, ShellingOrder]:
    """A shellable refinement of a subdivision of a polytope of dimension at most two.

    Every cell is cut by the lines supporting the edges of all cells.  That
    arrangement subdivision is regular: the convex function summing
    |line(x)| over the cutting lines lifts it to the lower facets of a
    polytope whose top facet is a copy of the input polytope.  A line
    shelling of the lifted polytope flying downwards passes through all
    lower facets first and ends with the top facet; its initial segment
    projects to a shelling of the refinement.
    """
    d = sub.dim
    if d > MAX_REFINEMENT_DIM:
        raise ShellingError(f"unsupported dimension {d} (cap {MAX_REFINEMENT_DIM})")
    if any(c.ambient_dim != d for c in sub.facets):
        raise ShellingError("subdivision must be full-dimensional in its ambient space")
    sub.check_complex()
    P = rational_hull(v for c in sub.facets for v in c.vertices)
    if sum(volume(c) for c in sub.facets) != volume(P):
        raise ShellingError("cells do not tile their convex hull")
    if d == 0:
        order = ShellingOrder(sub, tuple(range(len(sub.facets))))
        return sub, order
    lines = [(a, b) for a, b in _edge_lines(sub.facets) if not any(all(dot(a, v) == b for v in f.vertices) for f in _outer(P))]
    cells = []
    for c in sub.facets:
        cells.extend(split_by_hyperplanes(c, lines))
    cells = sorted({c.vertex_set: c for c in cells}.values(), key=Polytope.sort_key)

    def height(x):
        return sum((abs(dot(a, x) - b) for a, b in lines), Fraction(0))

    pts = {v for c in cells for v in c.vertices}
    top = max((height(x) for x in pts), default=Fraction(0)) + 1
    lifted = [x + (height(x),) for x in pts] + [x + (top,) for x in P.vertices]
    Q = rational_hull(lifted)
    down = tuple(Fraction(0) for _ in range(d)) + (Fraction(-1),)
    shell = line_shelling(Q, direction=down)
    bq = shell.complex
    lower = [k for k in shell.order if _outer_normal(Q, bq.facets[k])[-1] < 0]
    if _outer_normal(Q, bq.facets[shell.order[-1]])[-1] <= 0:
        raise ShellingError("the lifted flight does not end with the top facet")
    by_proj = {c.vertex_set: i for i, c in enumerate(cells)}
    order = []
    for k in lower:
        proj = frozenset(v[:-1] for v in bq.facets[k].vertices)
        if proj not in by_proj:
            raise ShellingError("lifted lower facets do not project onto the refinement")
        order.append(by_proj[proj])
    if sorted(order) != list(range(len(cells))):
        raise ShellingError("lifted lower facets do not cover the refinement")
    refined = PolytopalComplex(tuple(cells))
    check = is_shelling(refined, order)
    if not check:
        raise ShellingError(f"projected order is not a shelling (step {check.failing_index})")
    return refined, ShellingOrder(refined, tuple(order), check.certificates)


def _outer(P: Polytope) -> list:
    return [f for f in faces_as_polytopes(P, include_self=False) if f.dim == P.dim - 1]


def _outer_normal(Q: Polytope, f: Polytope) -> tuple:
    for a, b in Q.facets:
        if all(dot(a, x) == b for x in f.vertices):
            return tuple(a)
    raise GeometryError("facet not found")


def refines(refined: PolytopalComplex, original: PolytopalComplex) -> bool:
    """Each refined cell lies in exactly one original cell (by interior point)."""
    for c in refined.facets:
        x = c.barycenter
        hits = [o for o in original.facets if all(o.contains(v) for v in c.vertices)]
        if len(hits) != 1 or not hits[0].contains(x):
            return False
    return True

