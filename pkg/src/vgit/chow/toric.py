"""Chow rings of simplicial toric GIT quotients C^N // G with G a torus.

A quotient is described by the character matrix (one column per coordinate)
and the simplicial complex of *faces*: coordinate sets S that may vanish
simultaneously on the semistable locus.  The ring is

    Q[t_0..t_{r-1}] / (prod_{i in S} D_i : S a minimal non-face),
    D_i = <character_i, t>,

integrated so that the point class of a maximal face sigma has degree
1/|det(characters off sigma)| (the orbifold correction of the isotropy).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from ..rational import det, rank, solve
from .algebra import AlgebraError, GradedAlgebra, from_presentation, linear_form, poly_prod


class ToricError(ValueError):
    pass


def in_cone(theta: Sequence, gens: Sequence[Sequence]) -> bool:
    """Whether theta is a nonnegative combination of gens (Caratheodory search)."""
    theta = [Fraction(x) for x in theta]
    if not any(theta):
        return True
    gens = [tuple(Fraction(x) for x in g) for g in gens if any(g)]
    r = len(theta)
    for size in range(1, min(r, len(gens)) + 1):
        for sub in combinations(gens, size):
            if rank(list(sub)) < size:
                continue
            cols = [[sub[k][i] for k in range(size)] for i in range(r)]
            x = solve(cols, theta)
            if x is not None and all(c >= 0 for c in x):
                return True
    return False


@dataclass(frozen=True)
class ToricQuotient:
    characters: tuple  # one integer vector per coordinate
    faces: frozenset  # of frozensets; closed under subsets
    names: tuple = ()
    gen_prefix: str = "t"

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(len(self.characters))))

    @classmethod
    def from_git(cls, characters: Sequence[Sequence[int]], theta: Sequence, names=(), gen_prefix="t"):
        chars = tuple(tuple(int(c) for c in ch) for ch in characters)
        n = len(chars)
        faces = set()
        for size in range(n + 1):
            found = False
            for s in combinations(range(n), size):
                if size and not all(frozenset(t) in faces for t in combinations(s, size - 1)):
                    continue
                rest = [chars[i] for i in range(n) if i not in s]
                if in_cone(theta, rest) and rest:
                    faces.add(frozenset(s))
                    found = True
            if not found:
                break
        if frozenset() not in faces:
            raise ToricError("the GIT quotient is empty for this linearization")
        return cls(chars, frozenset(faces), tuple(names), gen_prefix)

    @property
    def n_coords(self) -> int:
        return len(self.characters)

    @property
    def group_rank(self) -> int:
        return len(self.characters[0]) if self.characters else 0

    @property
    def dim(self) -> int:
        return self.n_coords - self.group_rank

    @cached_property
    def maximal_faces(self) -> list:
        return sorted(
            (f for f in self.faces if not any(f < g for g in self.faces)), key=lambda f: sorted(f)
        )

    @cached_property
    def minimal_nonfaces(self) -> list:
        out = []
        n = self.n_coords
        for size in range(1, n + 1):
            for s in combinations(range(n), size):
                fs = frozenset(s)
                if fs in self.faces:
                    continue
                if all(frozenset(t) in self.faces for t in combinations(s, size - 1)):
                    out.append(fs)
        return out

    def divisor_poly(self, i: int) -> dict:
        return linear_form(self.characters[i], self.group_rank)

    def point_degree(self, sigma) -> Fraction:
        rest = [self.characters[i] for i in range(self.n_coords) if i not in sigma]
        if len(rest) != self.group_rank:
            raise ToricError(f"face {sorted(sigma)} does not have dimension {self.dim}")
        d = det(rest)
        if d == 0:
            raise ToricError(f"characters off face {sorted(sigma)} are dependent: not an orbifold quotient")
        return Fraction(1, abs(int(d)))

    @cached_property
    def ring(self) -> GradedAlgebra:
        r = self.group_rank
        names = [f"{self.gen_prefix}{k}" for k in range(r)]
        rels = [poly_prod([self.divisor_poly(i) for i in s], r) for s in self.minimal_nonfaces]
        if not self.maximal_faces:
            raise ToricError("quotient has no maximal faces")
        sigma = self.maximal_faces[0]
        if len(sigma) != self.dim:
            raise ToricError("quotient is not pure-dimensional")
        top = poly_prod([self.divisor_poly(i) for i in sorted(sigma)], r)
        try:
            alg = from_presentation(names, rels, normalization=(top, self.point_degree(sigma)), label="toric")
        except AlgebraError as exc:
            raise ToricError(str(exc)) from None
        for tau in self.maximal_faces[1:]:
            x = alg.element(poly_prod([self.divisor_poly(i) for i in sorted(tau)], r))
            if len(tau) != self.dim or alg.integrate(x) != self.point_degree(tau):
                raise ToricError(f"inconsistent point degrees at face {sorted(tau)}")
        return alg

    def divisor(self, i: int) -> tuple:
        return self.ring.element(self.divisor_poly(i))

    def star_subdivide(self, face: frozenset, coefficients: dict, name: str = "y") -> "ToricQuotient":
        """Weighted star subdivision at ``face``: one new coordinate y and one new
        group direction under which coordinate i has weight -coefficients[i]."""
        face = frozenset(face)
        if face not in self.faces:
            raise ToricError(f"{sorted(face)} is not a face")
        n = self.n_coords
        chars = [tuple(ch) + (-int(coefficients.get(i, 0)),) for i, ch in enumerate(self.characters)]
        chars.append((0,) * self.group_rank + (1,))
        y = n
        keep = {f for f in self.faces if not face <= f}
        coned = {f | {y} for f in keep if (f | face) in self.faces}
        closed = keep | coned
        return ToricQuotient(tuple(chars), frozenset(closed), self.names + (name,), self.gen_prefix)
