"""Wall crossings between adjacent chamber quotients and the tree virtual class.

Each wall j between chambers i and i' is resolved by a common toric
quotient M_j (a weighted blow-up of both sides) with maps M_j -> M_i and
M_j -> M_i'.  The virtual class of a spanning tree is represented by its
pushforward to the Chow ring of the product of the chamber quotients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from ..action import ChamberComplex
from ..graph import QuotientGraph, spanning_trees, walls_of_tree
from ..rational import dot, format_rational, rref
from .algebra import AlgebraError, GradedAlgebra, RingMap, TableAlgebra, TensorAlgebra, tensor
from .toric import ToricError, ToricQuotient


class FlipError(ValueError):
    pass


@dataclass
class FlipData:
    wall: int
    chambers: tuple  # (i, i'); lambda increases from i to i'
    ring_j: GradedAlgebra
    ring_i: GradedAlgebra
    ring_ip: GradedAlgebra
    pull_i: RingMap
    pull_ip: RingMap
    exceptional: tuple

    def side(self, chamber: int) -> int:
        if chamber not in self.chambers:
            raise FlipError(f"chamber {chamber} is not adjacent to wall {self.wall}")
        return self.chambers.index(chamber)

    def ring(self, chamber: int) -> GradedAlgebra:
        return (self.ring_i, self.ring_ip)[self.side(chamber)]

    def pull_map(self, chamber: int) -> RingMap:
        return (self.pull_i, self.pull_ip)[self.side(chamber)]

    def validate(self) -> None:
        for name, alg in (("ring_j", self.ring_j), ("ring_i", self.ring_i), ("ring_i'", self.ring_ip)):
            if not alg.is_complete():
                raise FlipError(f"wall {self.wall}: {name} is not complete")
        for chamber in self.chambers:
            if not self.pull_map(chamber).check_homomorphism():
                raise FlipError(f"wall {self.wall}: pullback from chamber {chamber} is not a ring map")
            if not check_projection_formula(self, chamber):
                raise FlipError(f"wall {self.wall}: projection formula fails towards chamber {chamber}")


def flip_pullback(f: FlipData, chamber: int, x: Sequence) -> tuple:
    return f.pull_map(chamber)(x)


def flip_pushforward(f: FlipData, chamber: int, x: Sequence) -> tuple:
    """Poincare adjoint of the pullback: integrate_i(push(x)*a) = integrate_j(x*pull(a))."""
    ring = f.ring(chamber)
    pull = f.pull_map(chamber)
    try:
        duals = ring.dual_basis()
    except AlgebraError as exc:
        raise FlipError(str(exc)) from None
    return tuple(f.ring_j.integrate(f.ring_j.mul(x, pull(d))) for d in duals)


def check_projection_formula(f: FlipData, chamber: int) -> bool:
    ring = f.ring(chamber)
    pull = f.pull_map(chamber)
    for xb in range(f.ring_j.dim):
        x = f.ring_j.basis(xb)
        px = flip_pushforward(f, chamber, x)
        for a in range(ring.dim):
            ea = ring.basis(a)
            if ring.integrate(ring.mul(px, ea)) != f.ring_j.integrate(f.ring_j.mul(x, pull(ea))):
                return False
    return True


# -- correspondence classes ----------------------------------------------------


@dataclass
class CorrespondenceClass:
    wall: int
    algebra: TensorAlgebra
    element: tuple

    def coefficient(self, a: int, b: int) -> Fraction:
        return self.element[self.algebra._flat[(a, b)]]

    def text(self) -> str:
        parts = []
        for k, c in enumerate(self.element):
            if c:
                parts.append(f"{format_rational(c)} {self.algebra.basis_label(k)}")
        return " + ".join(parts) if parts else "0"


def correspondence_class(f: FlipData, duals: tuple | None = None) -> CorrespondenceClass:
    """sum_ab integrate_j(pull_i(a^v) pull_i'(b^v)) a (x) b over dual bases.

    ``duals`` optionally supplies (basis, dual basis) pairs for both rings;
    the result does not depend on that choice.
    """
    A, B = f.ring_i, f.ring_ip
    T = tensor(A, B, prefixes=(f"{f.chambers[0]}.", f"{f.chambers[1]}."))
    if duals is None:
        try:
            ba, da = [A.basis(k) for k in range(A.dim)], A.dual_basis()
            bb, db = [B.basis(k) for k in range(B.dim)], B.dual_basis()
        except AlgebraError as exc:
            raise FlipError(str(exc)) from None
    else:
        (ba, da), (bb, db) = duals
    R = f.ring_j
    pa = [f.pull_i(x) for x in da]
    pb = [f.pull_ip(x) for x in db]
    out = [Fraction(0)] * T.dim
    for x, px in zip(ba, pa):
        for y, py in zip(bb, pb):
            c = R.integrate(R.mul(px, py))
            if c:
                t = T.pure_tensor([x, y])
                for k, v in enumerate(t):
                    if v:
                        out[k] += c * v
    return CorrespondenceClass(f.wall, T, tuple(out))


# -- flips from toric data -----------------------------------------------------


def _characters(cc: ChamberComplex) -> list:
    out = []
    for w in cc.action.effective_weights:
        if any(Fraction(x).denominator != 1 for x in w):
            raise FlipError("effective weights must be integral")
        out.append((1,) + tuple(int(x) for x in w))
    return out


def chamber_quotient(cc: ChamberComplex, i: int) -> ToricQuotient:
    p = cc.chamber_point(i)
    return ToricQuotient.from_git(_characters(cc), (Fraction(1),) + tuple(p))


def flip_from_wall(cc: ChamberComplex, j: int, quotients: dict | None = None, validate: bool = True) -> FlipData:
    """FlipData of an interior wall, resolving both sides by one weighted star subdivision."""
    quotients = {} if quotients is None else quotients
    wall = cc.walls[j]
    if len(wall.adjacent) != 2:
        raise FlipError(f"wall {j} is on the boundary")
    i0, i1 = wall.adjacent
    for i in (i0, i1):
        if i not in quotients:
            quotients[i] = chamber_quotient(cc, i)
    q0, q1 = quotients[i0], quotients[i1]
    chars = _characters(cc)
    lam_hat = (-wall.level,) + tuple(Fraction(x) for x in wall.lam)
    c = [dot(lam_hat, ch) for ch in chars]
    if any(x.denominator != 1 for x in c):
        raise FlipError(f"wall {j}: non-integral pairing with its one-parameter subgroup")
    c = [int(x) for x in c]
    g = 0
    for x in c:
        g = gcd(g, abs(x))
    plus = frozenset(i for i, x in enumerate(c) if x > 0)
    minus = frozenset(i for i, x in enumerate(c) if x < 0)
    if not plus or not minus:
        raise FlipError(f"wall {j}: one side of the wall has no weights")
    try:
        qj = q0.star_subdivide(plus, {i: c[i] // g for i in plus})
        other = q1.star_subdivide(minus, {i: -c[i] // g for i in minus})
    except ToricError as exc:
        raise FlipError(f"wall {j}: {exc}") from None
    if qj.faces != other.faces:
        raise FlipError(f"wall {j}: non-elementary flip (the two weighted blow-ups differ)")
    rj = qj.ring
    r = len(lam_hat)
    s = rj.gen(f"t{r}")
    pull0 = RingMap(q0.ring, rj, {f"t{k}": rj.gen(f"t{k}") for k in range(r)})
    pull1 = RingMap(
        q1.ring,
        rj,
        {f"t{k}": rj.sub(rj.gen(f"t{k}"), rj.scale(lam_hat[k] / g, s)) for k in range(r)},
    )
    q0.ring.label, q1.ring.label = f"M{i0}", f"M{i1}"
    rj.label = f"M_J{j}"
    f = FlipData(j, (i0, i1), rj, q0.ring, q1.ring, pull0, pull1, s)
    if validate:
        f.validate()
    return f


def all_flips(cc: ChamberComplex, validate: bool = True) -> dict:
    quotients: dict = {}
    return {j: flip_from_wall(cc, j, quotients, validate) for j in range(len(cc.walls))}


# -- virtual classes -----------------------------------------------------------


def product_ring(chambers: Sequence[int], rings: Mapping[int, GradedAlgebra]) -> TensorAlgebra:
    return tensor(*[rings[i] for i in chambers], prefixes=[f"{i}." for i in chambers])


def tree_virtual_pushforward(
    T: TensorAlgebra,
    chambers: Sequence[int],
    flips: Mapping[int, FlipData],
    tree_walls: Mapping[int, tuple],
    quotient_dim: int | None = None,
) -> tuple:
    """Pushforward of the virtual class of one spanning tree to the product ring.

    ``tree_walls[j]`` lists the chambers joined to wall j in the tree.  A wall
    joined to both neighbours contributes its correspondence class; a wall
    joined to one neighbour contributes push(1) on that side.
    """
    chambers = list(chambers)
    slot = {i: k for k, i in enumerate(chambers)}
    v = T.one()
    for j, joined in sorted(tree_walls.items()):
        if not joined:
            continue
        f = flips[j]
        if len(joined) == 2:
            gamma = correspondence_class(f)
            emb = T.embed([slot[f.chambers[0]], slot[f.chambers[1]]], gamma.element, sub=gamma.algebra)
        else:
            i = joined[0]
            emb = T.embed([slot[i]], flip_pushforward(f, i, f.ring_j.one()))
        v = T.mul(v, emb)
    if quotient_dim is not None:
        expected = sum(T.factors[k].top_degree for k in range(len(chambers))) - quotient_dim
        deg = T.degree_of(v)
        if deg is None and any(v):
            raise FlipError("degree overflow: virtual class is not homogeneous")
        if any(v) and deg != expected:
            raise FlipError(f"degree overflow: virtual class has degree {deg}, expected {expected}")
    return v


@dataclass
class LoopReport:
    trees: list  # edge tuples, in lexicographic order
    test_labels: list
    pairings: list  # one tuple per tree
    discrepancies: list = field(default_factory=list)  # (tree index, test label, value, reference)

    @property
    def passed(self) -> bool:
        return not self.discrepancies

    def text(self) -> str:
        lines = [f"trees {len(self.trees)}", f"test classes {len(self.test_labels)}"]
        lines.append("pairings")
        for t, (tree, row) in enumerate(zip(self.trees, self.pairings)):
            edges = " ".join(f"{a}-{b}" for a, b in tree)
            lines.append(f"  tree {t} [{edges}]: " + " ".join(format_rational(x) for x in row))
        for t, label, got, ref in self.discrepancies:
            lines.append(f"  discrepancy tree {t} {label}: {format_rational(got)} != {format_rational(ref)}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def loop_independence_check(
    g: QuotientGraph,
    flips: Mapping[int, FlipData],
    quotient_dim: int,
    rings: Mapping[int, GradedAlgebra] | None = None,
    max_trees: int = 10**6,
) -> LoopReport:
    """Compare the virtual pushforwards of all spanning trees of a graph piece."""
    chambers = sorted(g.i_vertices)
    if rings is None:
        rings = {}
        for f in flips.values():
            for i in f.chambers:
                rings.setdefault(i, f.ring(i))
    if len(chambers) == 1 and chambers[0] not in rings:
        raise FlipError("a single-chamber piece needs its chamber ring")
    T = product_ring(chambers, rings)
    _, trees = spanning_trees(g, max_trees)
    trees = list(trees)
    degree = T.top_degree - quotient_dim
    tests = T.indices_of_degree(quotient_dim) if degree >= 0 else []
    labels = [T.basis_label(k) for k in tests]
    pairings = []
    for tree in trees:
        v = tree_virtual_pushforward(T, chambers, flips, walls_of_tree(g, tree), quotient_dim)
        pairings.append(tuple(T.integrate(T.mul(v, T.basis(k))) for k in tests))
    report = LoopReport(trees, labels, pairings)
    if pairings:
        ref = pairings[0]
        for t, row in enumerate(pairings[1:], start=1):
            for label, got, want in zip(labels, row, ref):
                if got != want:
                    report.discrepancies.append((t, label, got, want))
    return report


def perturbed_flip(f: FlipData, chamber: int, epsilon: Fraction = Fraction(1)) -> FlipData:
    """Negative-control copy of f whose pullback from ``chamber`` is shifted by
    epsilon times the exceptional class on every generator of positive degree."""
    pull = f.pull_map(chamber)
    R = f.ring_j
    images = {n: R.add(x, R.scale(epsilon, f.exceptional)) for n, x in pull.images.items()}
    bad = RingMap(pull.source, R, images)
    if f.side(chamber) == 0:
        return FlipData(f.wall, f.chambers, R, f.ring_i, f.ring_ip, bad, f.pull_ip, f.exceptional)
    return FlipData(f.wall, f.chambers, R, f.ring_i, f.ring_ip, f.pull_i, bad, f.exceptional)


# -- tautological ring ---------------------------------------------------------


def tautological_ring(
    T: TensorAlgebra,
    chambers: Sequence[int],
    virtual: Sequence,
    generators: Mapping[int, Sequence[Sequence]] | None = None,
    label: str = "taut",
) -> TableAlgebra:
    """Subalgebra of T generated by the supplied chamber classes, modulo the
    kernel of the virtual pairing (a, b) -> integrate(a * b * virtual)."""
    chambers = list(chambers)
    gens = []
    for k, i in enumerate(chambers):
        ring = T.factors[k]
        classes = generators.get(i) if generators else None
        if classes is None:
            classes = [ring.gen(n) for n in ring.gen_names]
        for c, x in enumerate(classes):
            e = T.embed([k], x)
            d = T.degree_of(e)
            if d is None or d == 0:
                continue
            gens.append((d, e))
    # degree-by-degree closure of the span of monomials in the generators
    spans = {0: [T.one()]}
    top = T.top_degree
    for d in range(1, top + 1):
        cands = []
        for dg, e in gens:
            for x in spans.get(d - dg, []):
                cands.append(T.mul(e, x))
        spans[d] = _row_basis(cands)
    # quotient by the radical of the virtual pairing, degree by degree
    basis, degrees = [], []
    for d in range(top + 1):
        S = spans[d]
        if not S:
            continue
        kernel_test = [tuple(T.integrate(T.mul(T.mul(x, y), virtual)) for y in _all_spans(spans)) for x in S]
        keep = _independent_rows(kernel_test)
        for k in keep:
            basis.append(S[k])
            degrees.append(d)
    n = len(basis)
    pair_rows = {}
    probes = _all_spans(spans)
    for k, x in enumerate(basis):
        pair_rows[k] = tuple(T.integrate(T.mul(T.mul(x, y), virtual)) for y in probes)
    table = {}
    for a in range(n):
        for b in range(a, n):
            prod_ = T.mul(basis[a], basis[b])
            row = tuple(T.integrate(T.mul(T.mul(prod_, y), virtual)) for y in probes)
            table[(a, b)] = _express(row, [pair_rows[k] for k in range(n)])
    integral = [T.integrate(T.mul(x, virtual)) for x in basis]
    if not basis or degrees[0] != 0:
        raise FlipError("virtual class pairs trivially with the unit")
    # basis element 0 is the unit; every other basis element is its own generator
    monomials = [tuple(int(k == a) for a in range(1, n)) for k in range(n)]
    names = [f"b{k}" for k in range(1, n)]
    alg = TableAlgebra(names, degrees[1:], monomials, degrees, table, integral, label)
    alg.representatives = basis  # type: ignore[attr-defined]
    return alg


def _all_spans(spans: dict) -> list:
    out = []
    for d in sorted(spans):
        out.extend(spans[d])
    return out


def _row_basis(rows: list) -> list:
    chosen = []
    for r in rows:
        if not any(r):
            continue
        if _rank(chosen + [r]) > len(chosen):
            chosen.append(r)
    return chosen


def _rank(rows) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def _independent_rows(rows: list) -> list:
    keep = []
    for k, r in enumerate(rows):
        if any(r) and _rank([rows[i] for i in keep] + [r]) > len(keep):
            keep.append(k)
    return keep


def _express(target: tuple, rows: list) -> dict:
    """Coefficients c with sum c_k rows[k] = target (rows independent)."""
    if not any(target):
        return {}
    n = len(rows)
    m = len(target)
    aug = [[rows[k][i] for k in range(n)] + [target[i]] for i in range(m)]
    red, piv = rref(aug, n + 1)
    if n in piv:
        raise FlipError("product leaves the tautological span")
    out = {}
    for row, p in zip(red, piv):
        if row[n]:
            out[p] = row[n]
    return out
