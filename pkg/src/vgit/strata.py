"""The linear local model of a torus action around a codimension-two face.

Everything here is combinatorial: subspaces are coordinate index sets and
semistability is decided by hull membership of weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, cmp_to_key
from itertools import product
from math import gcd
from typing import Sequence

from .action import ChamberComplex, TorusAction, chamber_complex
from .graph import ChainType
from .rational import dot, primitive, rank, sub, vec


class StrataError(ValueError):
    pass


@dataclass(frozen=True)
class IsotypicPiece:
    weight: tuple
    coords: tuple
    stabilizer: tuple | None  # primitive annihilating 1-PS (rank 2), None if absent or not unique


@dataclass(frozen=True)
class Stratum:
    wall: int
    component: tuple  # the coordinates of the fixed component s
    sign: str  # "+" or "-"
    coords: tuple

    @property
    def label(self) -> str:
        return "{" + ",".join(f"x{i}" for i in self.component) + "}"


@dataclass(frozen=True)
class LinearModel:
    """The action on V = C^(m+1) with weights measured from ``center``.

    Weights are the effective ones of the action (see TorusAction), so the
    wall data of its chamber complex apply verbatim.
    """

    action: TorusAction
    center: tuple | None = None

    @cached_property
    def weights(self) -> tuple:
        W = self.action.effective_weights
        if self.center is None:
            return W
        c = vec(self.center)
        if len(c) != len(W[0]):
            raise StrataError(f"center has length {len(c)}, expected {len(W[0])}")
        return tuple(sub(w, c) for w in W)

    @property
    def rank(self) -> int:
        return self.action.effective_rank

    @cached_property
    def chambers(self) -> ChamberComplex:
        return chamber_complex(self.action)

    @cached_property
    def isotypic(self) -> tuple:
        return tuple(isotypic_decomposition(self))

    @classmethod
    def from_complex(cls, cc: ChamberComplex, center: tuple | None = None) -> "LinearModel":
        """Reuse an already computed chamber complex of the action."""
        m = cls(cc.action, center)
        m.__dict__["chambers"] = cc
        return m

    @cached_property
    def _supports(self) -> dict:
        return {}

    def pairing(self, j: int) -> list:
        """<lambda_j, w_i> - level_j for every coordinate, in absolute weights."""
        wall = self.chambers.walls[j]
        W = self.action.effective_weights
        return [dot(wall.lam, w) - wall.level for w in W]


def _stabilizer(w: tuple, r: int) -> tuple | None:
    if r != 2 or not any(w):
        return None
    return primitive((-w[1], w[0]))


def isotypic_decomposition(m: LinearModel) -> list[IsotypicPiece]:
    groups: dict = {}
    for i, w in enumerate(m.weights):
        groups.setdefault(w, []).append(i)
    pieces = [IsotypicPiece(w, tuple(c), _stabilizer(w, m.rank)) for w, c in groups.items()]
    pieces.sort(key=lambda p: p.coords)
    return pieces


def _cross(u: Sequence, v: Sequence) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def cyclic_order(m: LinearModel, center: Sequence) -> list[IsotypicPiece]:
    """Pieces sorted counterclockwise around ``center``, starting from the
    lexicographically smallest primitive direction; equal directions are
    ordered by distance."""
    if m.rank != 2:
        raise StrataError("cyclic order needs an effective rank-2 action")
    c = vec(center)
    items = []
    for p in m.isotypic:
        d = sub(p.weight, c)
        if not any(d):
            raise StrataError(f"weight ({','.join(map(str, p.weight))}) equals the center")
        items.append((primitive(d), dot(d, d), p))
    start = min(d for d, _, _ in items)

    def half(d):
        # 0 for angles in [0, pi) measured from ``start``, 1 for [pi, 2 pi)
        x = _cross(start, d)
        return 0 if x > 0 or (x == 0 and dot(start, d) > 0) else 1

    def cmp(a, b):
        ha, hb = half(a[0]), half(b[0])
        if ha != hb:
            return ha - hb
        x = _cross(a[0], b[0])
        if x:
            return -1 if x > 0 else 1
        return (a[1] > b[1]) - (a[1] < b[1])

    items.sort(key=cmp_to_key(cmp))
    return [p for _, _, p in items]


def wall_components(m: LinearModel, j: int) -> list[tuple]:
    """Fixed components of C*_j inside the wall locus: isotypic pieces of the support."""
    support = set(m.chambers.walls[j].support)
    return [p.coords for p in m.isotypic if set(p.coords) <= support]


def bb_strata(m: LinearModel, j: int) -> list[Stratum]:
    """Plus and minus strata of every fixed component, one level set at a time."""
    wall = m.chambers.walls[j]
    W = m.action.effective_weights
    values = [dot(wall.lam, w) for w in W]
    out = []
    for p in m.isotypic:
        level = values[p.coords[0]]
        plus = tuple(sorted(set(p.coords) | {i for i, v in enumerate(values) if v > level}))
        minus = tuple(sorted(set(p.coords) | {i for i, v in enumerate(values) if v < level}))
        out.append(Stratum(j, p.coords, "+", plus))
        out.append(Stratum(j, p.coords, "-", minus))
    return out


@dataclass(frozen=True)
class VoidReport:
    wall: int
    passed: bool
    checked: int
    witness: tuple | None = None  # (component s, sign, component s', sign, coordinates)

    def text(self) -> str:
        head = f"wall {self.wall}: {'PASS' if self.passed else 'FAIL'} ({self.checked} intersections)"
        if self.witness is None:
            return head
        s, a, t, b, coords = self.witness
        names = ",".join(f"x{i}" for i in coords)
        return f"{head} witness BY{a}{list(s)} & BY{b}{list(t)} contains a point supported on {{{names}}}"


def check_void_intersections(m: LinearModel, j: int, semistable: bool = True) -> VoidReport:
    """Pairwise intersections of the strata of distinct wall components, inside U_j.

    A coordinate subspace meets U_j iff the wall's barycenter lies in the
    weight hull of its coordinates.  With ``semistable=False`` U_j is all of
    V and any nonzero intersection is reported.
    """
    cc = m.chambers
    point = cc.wall_cell(j).barycenter
    comps = set(wall_components(m, j))
    strata = [s for s in bb_strata(m, j) if s.component in comps]
    checked = 0
    for x, y in product(strata, repeat=2):
        if x.component >= y.component:
            continue
        checked += 1
        inter = tuple(sorted(set(x.coords) & set(y.coords)))
        if not inter:
            continue
        if not semistable or m.action.subset_hull(inter).contains(point):
            return VoidReport(j, False, checked, (x.component, x.sign, y.component, y.sign, inter))
    return VoidReport(j, True, checked)


# -- chain dimensions ------------------------------------------------------------


@dataclass(frozen=True)
class ChainDimension:
    dimension: int
    bound: int
    families: tuple  # per component: number of orbit moduli
    gluings: tuple  # per distinct glued facet: conditions imposed

    @property
    def passed(self) -> bool:
        return self.dimension <= self.bound

    def text(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        deficit = self.bound - self.dimension
        return f"dimension {self.dimension} <= {self.bound}: {verdict} (deficiency {deficit})"


def _orbit_moduli(W: Sequence, support: Sequence[int]) -> int:
    """Dimension of the family of T-orbits in P^m with exactly this support."""
    pts = [W[i] for i in support]
    rk = rank([sub(p, pts[0]) for p in pts[1:]]) if len(pts) > 1 else 0
    return len(pts) - 1 - rk


def _class_members(component: Sequence[str]) -> tuple[list[int], list[int]]:
    chambers = sorted(int(n[1:]) for n in component if n[0] == "I")
    walls = sorted(int(n[1:]) for n in component if n[0] == "J")
    return chambers, walls


def _class_support(m: LinearModel, chambers: list[int], walls: list[int]) -> tuple:
    key = (tuple(chambers), tuple(walls))
    if key not in m._supports:
        try:
            m._supports[key] = _compute_class_support(m, chambers, walls)
        except StrataError as exc:
            m._supports[key] = exc
    out = m._supports[key]
    if isinstance(out, StrataError):
        raise out
    return out


def _compute_class_support(m: LinearModel, chambers: list[int], walls: list[int]) -> tuple:
    # any weight hull is a union of closed chambers, so barycenters decide equality
    cc = m.chambers
    W = m.action.effective_weights
    cells = [cc.chamber(i) for i in chambers]
    support = tuple(i for i, w in enumerate(W) if any(c.contains(w) for c in cells))
    hull = m.action.subset_hull(support)
    covered = [k for k in range(len(cc.chambers)) if hull.contains(cc.chamber_point(k))]
    if hull.dim != m.rank or covered != chambers:
        raise StrataError(f"chambers {chambers} do not form the moment image of one orbit")
    for k in range(len(cc.walls)):
        if k not in walls and hull.contains(cc.wall_cell(k).barycenter, strict=True):
            raise StrataError(f"orbit over chambers {chambers} crosses wall {k} outside its class")
    return support


def chain_dimension(m: LinearModel, chain: ChainType) -> ChainDimension:
    """Moduli count of chains of the given type in P^m modulo the torus.

    Each component contributes the orbits whose moment image is exactly the
    union of its chambers; each distinct glued facet imposes that the two
    boundary orbits agree.  Raises StrataError for unrealizable types.
    """
    cc = m.chambers
    W = m.action.effective_weights
    r = m.rank
    supports = []
    for comp in chain.components:
        chambers, walls = _class_members(comp)
        supports.append(_class_support(m, chambers, walls))
    families = tuple(_orbit_moduli(W, s) for s in supports)
    glued = {}
    for a, b, j in chain.meetings:
        wall = cc.walls[j]
        values = [dot(wall.lam, w) - wall.level for w in W]
        fa = tuple(i for i in supports[a] if values[i] == 0)
        fb = tuple(i for i in supports[b] if values[i] == 0)
        if fa != fb:
            raise StrataError(f"components {a} and {b} do not share a facet along wall {j}")
        side_a = {values[i] > 0 for i in supports[a] if values[i] != 0}
        side_b = {values[i] > 0 for i in supports[b] if values[i] != 0}
        if len(side_a) != 1 or side_a == side_b:
            raise StrataError(f"components {a} and {b} are not on opposite sides of wall {j}")
        facet = m.action.subset_hull(fa)
        if facet.dim != r - 1 or not facet.contains(cc.wall_cell(j).barycenter):
            raise StrataError(f"the common facet of {a} and {b} does not cover wall {j}")
        glued[(min(a, b), max(a, b), fa)] = _orbit_moduli(W, fa)
    gluings = tuple(glued[k] for k in sorted(glued))
    return ChainDimension(sum(families) - sum(gluings), m.action.quotient_dim, families, gluings)


# -- endpoint product decomposition -----------------------------------------------


@dataclass(frozen=True)
class EndpointData:
    rays: tuple  # primitive directions of l1 and l2 (counterclockwise from l1)
    v1: tuple  # coordinates on l1
    v2: tuple
    p1_weights: tuple  # weighted projective data of P1 = [V1 // (T / C*_1)]
    p2_weights: tuple
    invariant: tuple  # coordinates of weight zero (V0)
    fiber_weights: tuple  # weights of V' = V'1 x (interior coordinates) x V'2
    fiber_coords: tuple  # source of each fiber weight: "l1", coordinate index, or "l2"

    @property
    def fiber_dim(self) -> int:
        return len(self.fiber_weights)


def endpoint_product_data(m: LinearModel) -> EndpointData:
    if m.rank != 2:
        raise StrataError("endpoint data needs an effective rank-2 action")
    W = m.weights
    nonzero = [i for i, w in enumerate(W) if any(w)]
    invariant = tuple(i for i, w in enumerate(W) if not any(w))
    dirs = sorted({primitive(W[i]) for i in nonzero})
    if len(dirs) < 2:
        raise StrataError("not an angle: the weights span at most one ray")
    # l1 is the ray with every other direction strictly counterclockwise within pi
    l1 = l2 = None
    for d in dirs:
        crosses = [d[0] * e[1] - d[1] * e[0] for e in dirs if e != d]
        if all(c > 0 for c in crosses):
            l1 = d
        if all(c < 0 for c in crosses):
            l2 = d
    if l1 is None or l2 is None:
        raise StrataError("not an angle: the weights do not span a pointed two-dimensional cone")
    v1 = tuple(i for i in nonzero if primitive(W[i]) == l1)
    v2 = tuple(i for i in nonzero if primitive(W[i]) == l2)

    def multiples(coords, d):
        k = 0 if d[0] != 0 else 1
        return tuple(int(W[i][k] / d[k]) for i in coords)

    p1, p2 = multiples(v1, l1), multiples(v2, l2)
    g1 = g2 = 0
    for a in p1:
        g1 = gcd(g1, a)
    for a in p2:
        g2 = gcd(g2, a)
    interior = [i for i in nonzero if i not in v1 and i not in v2]
    fiber = [tuple(Fraction(g1 * x) for x in l1)] + [W[i] for i in interior] + [tuple(Fraction(g2 * x) for x in l2)]
    sources = ("l1",) + tuple(interior) + ("l2",)
    return EndpointData((l1, l2), v1, v2, p1, p2, invariant, tuple(fiber), sources)
