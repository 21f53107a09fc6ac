"""The bipartite graph of chambers and walls, and combinatorics on it."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .action import ChamberComplex
from .geometry import CellComplex
from .rational import det

DEFAULT_MAX_TREES = 10**6


class GraphError(ValueError):
    pass


def inode(i: int) -> str:
    return f"I{i}"


def jnode(j: int) -> str:
    return f"J{j}"


def _node_key(name: str):
    return (name[0], int(name[1:]))


@dataclass(frozen=True)
class Codim2Record:
    cell: int
    chambers: tuple
    walls: tuple
    interior: bool


@dataclass(frozen=True)
class QuotientGraph:
    """Graph with chamber vertices ``I<i>`` and wall vertices ``J<j>``.

    ``j_vertices`` maps each wall id to the pair of chambers it separates; a
    wall contributes the two edges (j, i) and (j, i').  ``marks`` is only
    used by dual complexes and labels each wall vertex "flip" or "iso".
    """

    i_vertices: tuple
    j_vertices: tuple  # ((j, (i, i')), ...)
    codim2_faces: tuple = ()
    marks: tuple = ()  # ((j, mark), ...)
    chamber_map: tuple = ()  # dual complexes: ((i, chamber id of G), ...)

    @property
    def walls(self) -> dict:
        return dict(self.j_vertices)

    @property
    def edges(self) -> tuple:
        out = []
        for j, (a, b) in self.j_vertices:
            out.append((j, a))
            if b != a:
                out.append((j, b))
        return tuple(sorted(out))

    @property
    def nodes(self) -> list[str]:
        return [inode(i) for i in self.i_vertices] + [jnode(j) for j, _ in self.j_vertices]

    def edge_names(self) -> list[tuple]:
        return [(jnode(j), inode(i)) for j, i in self.edges]

    def mark(self, j: int) -> str:
        return dict(self.marks).get(j, "flip")

    def degree(self, node: str) -> int:
        return sum(1 for e in self.edge_names() if node in e)

    def is_connected(self) -> bool:
        nodes = self.nodes
        if not nodes:
            return True
        adj = {v: set() for v in nodes}
        for a, b in self.edge_names():
            adj[a].add(b)
            adj[b].add(a)
        seen = {nodes[0]}
        stack = [nodes[0]]
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == len(nodes)

    def subgraph(self, chambers: Iterable[int], walls: Iterable[int]) -> "QuotientGraph":
        chambers = tuple(sorted(set(chambers)))
        walls = set(walls)
        jv = tuple((j, p) for j, p in self.j_vertices if j in walls)
        for _, (a, b) in jv:
            if a not in chambers or b not in chambers:
                raise GraphError("a wall of the subgraph has a chamber outside it")
        return QuotientGraph(chambers, jv, (), tuple(m for m in self.marks if m[0] in walls), self.chamber_map)


def build_graph(cc: ChamberComplex) -> QuotientGraph:
    i_vertices = tuple(range(len(cc.chambers)))
    j_vertices = tuple((j, tuple(w.adjacent)) for j, w in enumerate(cc.walls))
    codim2 = tuple(Codim2Record(c.cell, c.chambers, c.walls, c.interior) for c in cc.codim2)
    g = QuotientGraph(i_vertices, j_vertices, codim2)
    for j, (a, b) in j_vertices:
        if a == b:
            raise GraphError(f"wall {j} does not separate two distinct chambers")
    if not g.is_connected():
        raise GraphError("quotient graph of a connected moment polytope is disconnected")
    return g


# -- spanning trees -----------------------------------------------------------


def matrix_tree_count(g: QuotientGraph) -> int:
    nodes = g.nodes
    if len(nodes) <= 1:
        return 1
    pos = {v: k for k, v in enumerate(nodes)}
    n = len(nodes)
    lap = [[Fraction(0)] * n for _ in range(n)]
    for a, b in g.edge_names():
        x, y = pos[a], pos[b]
        lap[x][x] += 1
        lap[y][y] += 1
        lap[x][y] -= 1
        lap[y][x] -= 1
    minor = [row[1:] for row in lap[1:]]
    return int(det(minor))


def _enumerate_trees(nodes: list[str], edges: list[tuple]) -> Iterator[tuple]:
    need = len(nodes) - 1
    if need == 0:
        yield ()
        return
    pos = {v: k for k, v in enumerate(nodes)}

    def find(parent, x):
        while parent[x] != x:
            x = parent[x]
        return x

    def reachable_all(chosen, start):
        parent = list(range(len(nodes)))
        for a, b in chosen + edges[start:]:
            ra, rb = find(parent, pos[a]), find(parent, pos[b])
            if ra != rb:
                parent[ra] = rb
        return len({find(parent, k) for k in range(len(nodes))}) == 1

    def rec(start, chosen, parent):
        if len(chosen) == need:
            yield tuple(chosen)
            return
        if len(edges) - start < need - len(chosen):
            return
        if not reachable_all(chosen, start):
            return
        for k in range(start, len(edges)):
            a, b = edges[k]
            ra, rb = find(parent, pos[a]), find(parent, pos[b])
            if ra == rb:
                continue
            p2 = list(parent)
            p2[ra] = rb
            yield from rec(k + 1, chosen + [edges[k]], p2)

    yield from rec(0, [], list(range(len(nodes))))


def spanning_trees(g: QuotientGraph, max_trees: int = DEFAULT_MAX_TREES):
    """Exact tree count (matrix-tree theorem) and a lexicographic tree iterator.

    Trees are tuples of edges ``("J<j>", "I<i>")``; iteration stops after
    ``max_trees`` trees.
    """
    if not g.is_connected():
        raise GraphError("spanning trees of a disconnected graph")
    count = matrix_tree_count(g)
    edges = sorted(g.edge_names(), key=lambda e: (_node_key(e[0]), _node_key(e[1])))

    def it():
        for k, t in enumerate(_enumerate_trees(g.nodes, edges)):
            if k >= max_trees:
                return
            yield t

    return count, it()


def walls_of_tree(g: QuotientGraph, tree: Sequence[tuple]) -> dict:
    """For each wall vertex, the chambers it is joined to inside ``tree``."""
    out = {j: [] for j, _ in g.j_vertices}
    for jn, i_n in tree:
        out[int(jn[1:])].append(int(i_n[1:]))
    return {j: tuple(sorted(v)) for j, v in out.items()}


# -- local loops --------------------------------------------------------------


@dataclass(frozen=True)
class LocalLoop:
    cell: int  # codim-2 cell of the chamber complex
    cycle: tuple  # node names in cyclic order, starting at the smallest chamber
    chambers: tuple
    walls: tuple

    def graph(self, g: QuotientGraph) -> QuotientGraph:
        return g.subgraph(self.chambers, self.walls)


def local_loops(g: QuotientGraph) -> list[LocalLoop]:
    loops = []
    for rec in g.codim2_faces:
        if not rec.interior:
            continue
        walls = [j for j in rec.walls if set(g.walls[j]) <= set(rec.chambers)]
        sub = g.subgraph(rec.chambers, walls)
        if len(sub.nodes) < 4 or not sub.is_connected():
            continue
        if any(sub.degree(v) != 2 for v in sub.nodes):
            continue
        adj = {v: [] for v in sub.nodes}
        for a, b in sub.edge_names():
            adj[a].append(b)
            adj[b].append(a)
        start = inode(min(rec.chambers))
        nxt = min(adj[start], key=lambda v: min(_node_key(w) for w in adj[v] if w != start))
        cycle = [start, nxt]
        while True:
            cand = [w for w in adj[cycle[-1]] if w != cycle[-2]]
            if cand[0] == start:
                break
            cycle.append(cand[0])
        if len(cycle) != len(sub.nodes):
            continue
        loops.append(LocalLoop(rec.cell, tuple(cycle), tuple(sorted(rec.chambers)), tuple(sorted(walls))))
    return loops


# -- contractions and chain types ----------------------------------------------


@dataclass(frozen=True)
class ContractionType:
    base: QuotientGraph
    contracted: tuple  # wall ids in J'
    classes: tuple  # partition of the base nodes, each a sorted tuple of names
    graph: QuotientGraph  # the contracted graph; its chamber i is classes[i]

    def class_of(self, node: str) -> int:
        for k, c in enumerate(self.classes):
            if node in c:
                return k
        raise KeyError(node)


def contract(gamma: QuotientGraph, jprime: Iterable[int]) -> ContractionType:
    """Delete the edges of every wall in J', identifying {i, j, i'} into one node."""
    jprime = tuple(sorted(set(jprime)))
    walls = gamma.walls
    for j in jprime:
        if j not in walls:
            raise GraphError(f"wall {j} is not a wall vertex of the graph")
    parent = {v: v for v in gamma.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j in jprime:
        a, b = walls[j]
        for v in (inode(a), inode(b)):
            ra, rb = find(jnode(j)), find(v)
            if ra != rb:
                parent[ra] = rb
    groups = {}
    for v in gamma.nodes:
        groups.setdefault(find(v), []).append(v)
    # keep only classes that are chambers or merged triples; untouched walls stay walls
    classes = []
    for members in groups.values():
        if any(m[0] == "I" for m in members):
            classes.append(tuple(sorted(members, key=_node_key)))
    classes.sort(key=lambda c: _node_key(c[0]))
    where = {m: k for k, c in enumerate(classes) for m in c}
    new_j = tuple(
        (j, tuple(sorted((where[inode(a)], where[inode(b)])))) for j, (a, b) in gamma.j_vertices if j not in jprime
    )
    contracted = QuotientGraph(tuple(range(len(classes))), new_j)
    all_classes = tuple(classes) + tuple((jnode(j),) for j, _ in new_j)
    return ContractionType(gamma, jprime, all_classes, contracted)


@dataclass(frozen=True)
class ChainType:
    """Combinatorial type of a chain of orbit closures T_[i] glued along T/C*_j."""

    contraction: ContractionType
    components: tuple  # one label per chamber class: the tuple of nodes in [i]
    meetings: tuple  # ((class a, class b, wall j), ...) pairs of components that intersect

    @property
    def length(self) -> int:
        return len(self.components)

    def satisfies_gluing_conditions(self) -> bool:
        g = self.contraction.graph
        expected = {(min(a, b), max(a, b), j) for j, (a, b) in g.j_vertices if a != b}
        got = {(min(a, b), max(a, b), j) for a, b, j in self.meetings}
        return expected == got


def chain_types(gamma: QuotientGraph) -> list[ChainType]:
    if not gamma.is_connected():
        raise GraphError("chain types need a connected graph")
    js = [j for j, _ in gamma.j_vertices]
    out = []
    for k in range(len(js) + 1):
        for jp in combinations(js, k):
            ct = contract(gamma, jp)
            n_chambers = len(ct.graph.i_vertices)
            comps = tuple(ct.classes[:n_chambers])
            meetings = tuple((a, b, j) for j, (a, b) in ct.graph.j_vertices if a != b)
            out.append(ChainType(ct, comps, meetings))
    return out


# -- dual cell complex ----------------------------------------------------------


def dual_complex(cc: ChamberComplex, refinement: CellComplex) -> QuotientGraph:
    """Graph H of a subdivision of the chamber complex.

    Vertices are the top cells of ``refinement``; every codimension-one cell
    shared by two top cells becomes a wall vertex, marked "flip" when it lies
    on a chamber wall and "iso" when it is interior to a chamber.
    """
    top = refinement.top_indices
    owner = []
    for t in top:
        cell = refinement.cells[t]
        p = cell.barycenter
        homes = [i for i in range(len(cc.chambers)) if all(cc.chamber(i).contains(v) for v in cell.vertices)]
        if len(homes) != 1 or not cc.chamber(homes[0]).contains(p):
            raise GraphError(f"refinement cell {t} does not lie in a single chamber")
        owner.append(homes[0])
    jv, marks = [], []
    j = 0
    for f in refinement.indices_of_dim(refinement.dim - 1):
        adj = [k for k, t in enumerate(top) if t in refinement.cofaces_of(f)]
        if len(adj) != 2:
            continue
        jv.append((j, (adj[0], adj[1])))
        marks.append((j, "flip" if owner[adj[0]] != owner[adj[1]] else "iso"))
        j += 1
    return QuotientGraph(tuple(range(len(top))), tuple(jv), (), tuple(marks), tuple(enumerate(owner)))


# -- DOT export -----------------------------------------------------------------


def export_dot(g: QuotientGraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for i in g.i_vertices:
        lines.append(f"  {inode(i)} [shape=box];")
    for j, _ in g.j_vertices:
        lines.append(f"  {jnode(j)} [shape=circle];")
    for j, i in g.edges:
        style = " [style=dashed]" if g.mark(j) == "iso" else ""
        lines.append(f"  {jnode(j)} -- {inode(i)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
