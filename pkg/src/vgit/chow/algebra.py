"""Finite-dimensional graded commutative Q-algebras with an integration functional.

Elements are tuples of :class:`~fractions.Fraction` in the algebra's basis.
Every basis element is a monomial in named generators, which is what lets
ring maps be specified on generators only.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

from ..rational import format_rational, inverse, rref


class AlgebraError(ValueError):
    pass


Poly = dict  # {exponent tuple: Fraction}


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def poly_add(p: Poly, q: Poly, s=1) -> Poly:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + s * c
    return {e: c for e, c in out.items() if c != 0}


def linear_form(coeffs: Sequence, nvars: int | None = None) -> Poly:
    nvars = len(coeffs) if nvars is None else nvars
    out = {}
    for k, c in enumerate(coeffs):
        if c:
            e = [0] * nvars
            e[k] = 1
            out[tuple(e)] = Fraction(c)
    return out


def poly_prod(polys: Iterable[Poly], nvars: int) -> Poly:
    out = {(0,) * nvars: Fraction(1)}
    for p in polys:
        out = poly_mul(out, p)
    return out


def monomials_of_degree(degrees: Sequence[int], d: int) -> list[tuple]:
    out = []

    def rec(k, left, acc):
        if k == len(degrees):
            if left == 0:
                out.append(tuple(acc))
            return
        for e in range(left // degrees[k] + 1):
            rec(k + 1, left - e * degrees[k], acc + [e])

    rec(0, d, [])
    return out


def _mono_degree(e: tuple, degrees: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(e, degrees))


class GradedAlgebra:
    """Graded commutative algebra with explicit basis and structure constants.

    Subclasses provide ``_mul_basis(a, b) -> {index: coefficient}``.
    """

    def __init__(self, gen_names, gen_degrees, monomials, degrees, integral, label: str = ""):
        self.gen_names = tuple(gen_names)
        self.gen_degrees = tuple(gen_degrees)
        self.monomials = tuple(tuple(m) for m in monomials)
        self.degrees = tuple(degrees)
        self.integral = tuple(Fraction(x) for x in integral)
        self.label = label
        if len(self.monomials) != len(self.degrees) or len(self.integral) != len(self.degrees):
            raise AlgebraError("basis, degree and integral vectors disagree in length")
        self._mono_index = {m: k for k, m in enumerate(self.monomials)}

    # -- basic structure ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def top_degree(self) -> int:
        return max(self.degrees)

    @property
    def ranks(self) -> tuple:
        return tuple(sum(1 for d in self.degrees if d == k) for k in range(self.top_degree + 1))

    def basis_label(self, k: int) -> str:
        parts = []
        for name, e in zip(self.gen_names, self.monomials[k]):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def zero(self) -> tuple:
        return (Fraction(0),) * self.dim

    def basis(self, k: int) -> tuple:
        v = [Fraction(0)] * self.dim
        v[k] = Fraction(1)
        return tuple(v)

    def one(self) -> tuple:
        return self.basis(self._mono_index[(0,) * len(self.gen_names)])

    def indices_of_degree(self, d: int) -> list[int]:
        return [k for k, dk in enumerate(self.degrees) if dk == d]

    def _mul_basis(self, a: int, b: int) -> dict:
        raise NotImplementedError

    @cached_property
    def _mul_cache(self) -> dict:
        return {}

    def mul_basis(self, a: int, b: int) -> dict:
        key = (a, b) if a <= b else (b, a)
        cache = self._mul_cache
        r = cache.get(key)
        if r is None:
            if self.degrees[a] + self.degrees[b] > self.top_degree:
                r = {}
            else:
                r = self._mul_basis(*key)
            cache[key] = r
        return r

    def mul(self, x: Sequence, y: Sequence) -> tuple:
        out = [Fraction(0)] * self.dim
        nx = [(a, c) for a, c in enumerate(x) if c]
        ny = [(b, c) for b, c in enumerate(y) if c]
        for a, ca in nx:
            for b, cb in ny:
                for k, v in self.mul_basis(a, b).items():
                    out[k] += ca * cb * v
        return tuple(out)

    def mul_many(self, xs: Iterable[Sequence]) -> tuple:
        out = self.one()
        for x in xs:
            out = self.mul(out, x)
        return out

    def add(self, x, y) -> tuple:
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y) -> tuple:
        return tuple(a - b for a, b in zip(x, y))

    def scale(self, c, x) -> tuple:
        return tuple(c * a for a in x)

    def power(self, x, e: int) -> tuple:
        out = self.one()
        for _ in range(e):
            out = self.mul(out, x)
        return out

    def integrate(self, x: Sequence) -> Fraction:
        return sum((a * b for a, b in zip(x, self.integral)), Fraction(0))

    def degree_of(self, x: Sequence) -> int | None:
        """Degree of a nonzero homogeneous element (None for zero or mixed elements)."""
        ds = {self.degrees[k] for k, c in enumerate(x) if c}
        return ds.pop() if len(ds) == 1 else None

    # -- generators and monomials -----------------------------------------------

    def gen(self, name: str) -> tuple:
        k = self.gen_names.index(name)
        e = [0] * len(self.gen_names)
        e[k] = 1
        return self.monomial(tuple(e))

    @cached_property
    def generators(self) -> dict:
        return {name: self.gen(name) for name in self.gen_names}

    def monomial(self, e: Sequence[int]) -> tuple:
        e = tuple(e)
        if e in self._mono_index:
            return self.basis(self._mono_index[e])
        if _mono_degree(e, self.gen_degrees) > self.top_degree:
            return self.zero()
        return self._reduce_monomial(e)

    def _reduce_monomial(self, e: tuple) -> tuple:
        # generic fallback: multiply generators one at a time
        out = self.one()
        for k, a in enumerate(e):
            if a:
                g = [0] * len(e)
                g[k] = 1
                gk = self.monomial(tuple(g))
                out = self.mul(out, self.power(gk, a))
        return out

    def element(self, poly: Mapping) -> tuple:
        """Evaluate a polynomial in the generators ({exponents: coefficient})."""
        out = self.zero()
        for e, c in poly.items():
            out = self.add(out, self.scale(Fraction(c), self.monomial(e)))
        return out

    # -- pairing ----------------------------------------------------------------

    @cached_property
    def pairing_matrix(self) -> list:
        n = self.dim
        return [[self.integrate(self.mul(self.basis(a), self.basis(b))) for b in range(n)] for a in range(n)]

    def is_complete(self) -> bool:
        """Integration supported in top degree and Poincare pairing nondegenerate."""
        if any(v != 0 and self.degrees[k] != self.top_degree for k, v in enumerate(self.integral)):
            return False
        try:
            self._pairing_inverse
        except ZeroDivisionError:
            return False
        return True

    @cached_property
    def _pairing_inverse(self) -> list:
        return inverse(self.pairing_matrix)

    def dual_basis(self) -> list[tuple]:
        """Elements e^v_b with integrate(e_a * e^v_b) = delta_ab."""
        try:
            inv = self._pairing_inverse
        except ZeroDivisionError:
            raise AlgebraError(f"Poincare pairing of {self.label or 'algebra'} is degenerate") from None
        n = self.dim
        return [tuple(inv[c][b] for c in range(n)) for b in range(n)]

    # -- checks -----------------------------------------------------------------

    def check_commutative_associative(self) -> bool:
        n = self.dim
        for a in range(n):
            for b in range(n):
                if self._mul_basis_raw(a, b) != self._mul_basis_raw(b, a):
                    return False
        for a in range(n):
            ea = self.basis(a)
            for b in range(n):
                ab = self.mul(ea, self.basis(b))
                for c in range(n):
                    ec = self.basis(c)
                    if self.mul(ab, ec) != self.mul(ea, self.mul(self.basis(b), ec)):
                        return False
        return True

    def _mul_basis_raw(self, a: int, b: int) -> dict:
        if self.degrees[a] + self.degrees[b] > self.top_degree:
            return {}
        return {k: v for k, v in self._mul_basis(a, b).items() if v}

    # -- serialization ----------------------------------------------------------

    def dump(self) -> str:
        lines = [f"algebra {self.label}".rstrip()]
        lines.append("generators " + " ".join(f"{n}:{d}" for n, d in zip(self.gen_names, self.gen_degrees)))
        lines.append("basis")
        for k in range(self.dim):
            lines.append(f"  {k} {self.basis_label(k)} {self.degrees[k]}")
        lines.append("structure")
        for a in range(self.dim):
            for b in range(a, self.dim):
                for c, v in sorted(self.mul_basis(a, b).items()):
                    if v:
                        lines.append(f"  {a} {b} {c} {format_rational(v)}")
        lines.append("integrate " + " ".join(format_rational(x) for x in self.integral))
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"GradedAlgebra({self.label!r}, ranks={self.ranks})"


class TableAlgebra(GradedAlgebra):
    """Algebra given by an explicit table of structure constants."""

    def __init__(self, gen_names, gen_degrees, monomials, degrees, table, integral, label=""):
        super().__init__(gen_names, gen_degrees, monomials, degrees, integral, label)
        self._table = table

    def _mul_basis(self, a, b):
        return self._table.get((a, b)) or self._table.get((b, a)) or {}

    def with_integral(self, integral, label=None) -> "TableAlgebra":
        return TableAlgebra(
            self.gen_names, self.gen_degrees, self.monomials, self.degrees, self._table, integral,
            self.label if label is None else label,
        )


def _reducer_for_degree(span_rows: list, columns: list, order_key) -> tuple[list, dict]:
    """Standard monomials and normal forms for one graded piece.

    ``columns`` lists monomials of the degree; ``span_rows`` are ideal elements
    given as dicts. Columns earlier in ``order_key`` order are eliminated first.
    """
    cols = sorted(columns, key=order_key)
    pos = {m: k for k, m in enumerate(cols)}
    rows = []
    for r in span_rows:
        row = [Fraction(0)] * len(cols)
        for m, c in r.items():
            row[pos[m]] += c
        if any(row):
            rows.append(row)
    if rows:
        red, piv = rref(rows, len(cols))
    else:
        red, piv = [], []
    std = [cols[k] for k in range(len(cols)) if k not in piv]
    normal = {m: {m: Fraction(1)} for m in std}
    for row, p in zip(red, piv):
        normal[cols[p]] = {cols[k]: -row[k] for k in range(len(cols)) if k not in piv and row[k] != 0}
    return std, normal


def from_presentation(
    gen_names: Sequence[str],
    relations: Sequence[Poly],
    normalization: tuple | None = None,
    gen_degrees: Sequence[int] | None = None,
    max_degree: int = 64,
    order_key: Callable | None = None,
    label: str = "",
) -> TableAlgebra:
    """Q[gens]/(relations) computed degree by degree.

    ``normalization=(poly, value)`` fixes the integral on the (one-dimensional)
    top-degree piece.  The quotient must be finite-dimensional.
    """
    ng = len(gen_names)
    gen_degrees = tuple(gen_degrees or (1,) * ng)
    if order_key is None:
        order_key = lambda m: tuple(-x for x in m)  # noqa: E731  eliminate lex-largest first
    rels = []
    for r in relations:
        r = {tuple(e): Fraction(c) for e, c in r.items() if c}
        if not r:
            continue
        degs = {_mono_degree(e, gen_degrees) for e in r}
        if len(degs) != 1:
            raise AlgebraError("relations must be homogeneous")
        rels.append((degs.pop(), r))

    std_by_deg, normal_by_deg = [], []
    zero_run = 0
    max_gen = max(gen_degrees, default=1)
    for d in range(max_degree + 1):
        cols = monomials_of_degree(gen_degrees, d)
        span = []
        for dr, r in rels:
            if dr > d:
                continue
            for m in monomials_of_degree(gen_degrees, d - dr):
                span.append(poly_mul({m: Fraction(1)}, r))
        std, normal = _reducer_for_degree(span, cols, order_key)
        std_by_deg.append(std)
        normal_by_deg.append(normal)
        zero_run = zero_run + 1 if not std else 0
        if zero_run >= max_gen:
            break
    else:
        raise AlgebraError("presentation does not define a finite-dimensional algebra")
    while std_by_deg and not std_by_deg[-1]:
        std_by_deg.pop()
        normal_by_deg.pop()
    monomials, degrees = [], []
    for d, std in enumerate(std_by_deg):
        for m in std:
            monomials.append(m)
            degrees.append(d)
    index = {m: k for k, m in enumerate(monomials)}
    top = len(std_by_deg) - 1

    def reduce_mono(e):
        d = _mono_degree(e, gen_degrees)
        if d > top:
            return {}
        return {index[m]: c for m, c in normal_by_deg[d][e].items()}

    table = {}
    for a in range(len(monomials)):
        for b in range(a, len(monomials)):
            if degrees[a] + degrees[b] <= top:
                e = tuple(x + y for x, y in zip(monomials[a], monomials[b]))
                table[(a, b)] = reduce_mono(e)
    alg = TableAlgebra(gen_names, gen_degrees, monomials, degrees, table, [0] * len(monomials), label)
    alg._reduce_monomial = lambda e: _vector(reduce_mono(e), len(monomials))  # type: ignore[method-assign]
    if normalization is not None:
        poly, value = normalization
        x = alg.element(poly)
        tops = alg.indices_of_degree(alg.top_degree)
        if len(tops) != 1:
            raise AlgebraError("normalization needs a one-dimensional top degree")
        coeff = x[tops[0]]
        if coeff == 0 or any(c for k, c in enumerate(x) if k != tops[0]):
            raise AlgebraError("normalization class is not a nonzero top-degree class")
        integral = [Fraction(0)] * len(monomials)
        integral[tops[0]] = Fraction(value) / coeff
        alg.integral = tuple(integral)
    return alg


def _vector(d: Mapping[int, Fraction], n: int) -> tuple:
    v = [Fraction(0)] * n
    for k, c in d.items():
        v[k] += c
    return tuple(v)


def extend(
    base: GradedAlgebra,
    name: str,
    relations: Sequence[Sequence],
    integral_rule: Callable[[int, tuple], Fraction],
    gen_degree: int = 1,
    label: str = "",
) -> TableAlgebra:
    """base[X]/(relations) where each relation is a coefficient list [c_0, c_1, ...]
    of base elements meaning sum c_k X^k.

    Columns with higher powers of X are eliminated first, so the standard
    basis prefers low powers of X.  ``integral_rule(k, base_element)`` gives
    the integral of ``base_element * X^k`` for standard basis elements.
    """
    top_guess = base.top_degree + max(len(r) for r in relations) + 1
    rels = []
    for coeffs in relations:
        terms = {}
        deg = None
        for k, c in enumerate(coeffs):
            c = tuple(Fraction(x) for x in c)
            if not any(c):
                continue
            dc = base.degree_of(c)
            if dc is None:
                raise AlgebraError("relation coefficients must be homogeneous")
            dtot = dc + k * gen_degree
            if deg is not None and deg != dtot:
                raise AlgebraError("relation is not homogeneous")
            deg = dtot
            terms[k] = c
        if terms:
            rels.append((deg, terms))

    def columns(d):
        return [(k, b) for k in range(d // gen_degree + 1) for b in base.indices_of_degree(d - k * gen_degree)]

    std_by_deg, normal_by_deg = [], []
    for d in range(top_guess + 1):
        cols = columns(d)
        span = []
        for dr, terms in rels:
            # multiply by base basis elements b and X^l with deg(b) + l*deg(X) = d - dr
            for l in range(0, (d - dr) // gen_degree + 1 if d >= dr else 0):
                for b in base.indices_of_degree(d - dr - l * gen_degree):
                    eb = base.basis(b)
                    row = {}
                    for k, c in terms.items():
                        prod_ = base.mul(eb, c)
                        for idx, v in enumerate(prod_):
                            if v:
                                key = (k + l, idx)
                                row[key] = row.get(key, 0) + v
                    span.append(row)
        std, normal = _reducer_for_degree(span, cols, lambda kb: (-kb[0], kb[1]))
        std_by_deg.append(std)
        normal_by_deg.append(normal)
    while std_by_deg and not std_by_deg[-1]:
        std_by_deg.pop()
        normal_by_deg.pop()
    keys, degrees = [], []
    for d, std in enumerate(std_by_deg):
        for kb in sorted(std):
            keys.append(kb)
            degrees.append(d)
    index = {kb: n for n, kb in enumerate(keys)}
    top = len(std_by_deg) - 1

    def reduce_key(k, b):
        d = base.degrees[b] + k * gen_degree
        if d > top:
            return {}
        return {index[m]: c for m, c in normal_by_deg[d][(k, b)].items()}

    table = {}
    for a in range(len(keys)):
        for b in range(a, len(keys)):
            if degrees[a] + degrees[b] > top:
                continue
            (ka, ba), (kb_, bb) = keys[a], keys[b]
            out = {}
            for idx, v in base.mul_basis(ba, bb).items():
                if v:
                    for n, c in reduce_key(ka + kb_, idx).items():
                        out[n] = out.get(n, 0) + v * c
            table[(a, b)] = {n: c for n, c in out.items() if c}
    monomials = [base.monomials[b] + (k,) for k, b in keys]
    integral = [integral_rule(k, base.basis(b)) for k, b in keys]
    alg = TableAlgebra(
        base.gen_names + (name,), base.gen_degrees + (gen_degree,), monomials, degrees, table, integral, label
    )

    def reduce_mono(e):
        k = e[-1]
        x = base.monomial(e[:-1])
        out = [Fraction(0)] * len(keys)
        for idx, v in enumerate(x):
            if v:
                for n, c in reduce_key(k, idx).items():
                    out[n] += v * c
        return tuple(out)

    alg._reduce_monomial = reduce_mono  # type: ignore[method-assign]
    alg.base_embedding = lambda x: _embed_base(alg, index, base, x)  # type: ignore[attr-defined]
    return alg


def _embed_base(alg, index, base, x) -> tuple:
    out = [Fraction(0)] * alg.dim
    for b, v in enumerate(x):
        if v:
            out[index[(0, b)]] += v
    return tuple(out)


class TensorAlgebra(GradedAlgebra):
    """Graded tensor product of complete algebras; integral is the product."""

    def __init__(self, factors: Sequence[GradedAlgebra], prefixes: Sequence[str] | None = None, label=""):
        self.factors = tuple(factors)
        if prefixes is None:
            prefixes = [f"{k}." for k in range(len(factors))]
        names, degs = [], []
        for f, p in zip(self.factors, prefixes):
            names += [p + n for n in f.gen_names]
            degs += list(f.gen_degrees)
        self._sizes = [f.dim for f in self.factors]
        multi = list(product(*[range(s) for s in self._sizes]))
        monomials = [sum((f.monomials[i] for f, i in zip(self.factors, idx)), ()) for idx in multi]
        degrees = [sum(f.degrees[i] for f, i in zip(self.factors, idx)) for idx in multi]
        integral = []
        for idx in multi:
            v = Fraction(1)
            for f, i in zip(self.factors, idx):
                v *= f.integral[i]
                if not v:
                    break
            integral.append(v)
        self._multi = multi
        self._flat = {idx: k for k, idx in enumerate(multi)}
        super().__init__(names, degs, monomials, degrees, integral, label)

    def _mul_basis(self, a, b):
        ia, ib = self._multi[a], self._multi[b]
        parts = [list(f.mul_basis(x, y).items()) for f, x, y in zip(self.factors, ia, ib)]
        out = {}
        for combo in product(*parts):
            c = Fraction(1)
            idx = []
            for k, v in combo:
                c *= v
                idx.append(k)
            if c:
                key = self._flat[tuple(idx)]
                out[key] = out.get(key, 0) + c
        return out

    def _reduce_monomial(self, e):
        out = None
        pos = 0
        vecs = []
        for f in self.factors:
            k = len(f.gen_names)
            vecs.append(f.monomial(e[pos : pos + k]))
            pos += k
        return self.pure_tensor(vecs)

    def pure_tensor(self, elements: Sequence[Sequence]) -> tuple:
        out = [Fraction(0)] * self.dim
        nz = [[(i, c) for i, c in enumerate(x) if c] for x in elements]
        for combo in product(*nz):
            c = Fraction(1)
            idx = []
            for i, v in combo:
                c *= v
                idx.append(i)
            out[self._flat[tuple(idx)]] += c
        return tuple(out)

    def embed(self, slots: Sequence[int], x: Sequence, sub: "TensorAlgebra | None" = None) -> tuple:
        """Embed an element of the tensor of factors ``slots`` (or of one factor)."""
        slots = list(slots)
        out = [Fraction(0)] * self.dim
        if len(slots) == 1:
            items = [((i,), c) for i, c in enumerate(x) if c]
        else:
            if sub is None:
                raise AlgebraError("embedding a multi-factor element needs its tensor algebra")
            items = [(sub._multi[k], c) for k, c in enumerate(x) if c]
        for idx, c in items:
            full = [self.factors[k].one() for k in range(len(self.factors))]
            for s, i in zip(slots, idx):
                full[s] = self.factors[s].basis(i)
            t = self.pure_tensor(full)
            for k, v in enumerate(t):
                if v:
                    out[k] += c * v
        return tuple(out)

    def factor_indices(self, k: int) -> tuple:
        return self._multi[k]

    def basis_label(self, k: int) -> str:
        return "(" + " | ".join(f.basis_label(i) for f, i in zip(self.factors, self._multi[k])) + ")"


def tensor(*algebras: GradedAlgebra, prefixes: Sequence[str] | None = None, label: str = "") -> TensorAlgebra:
    """Tensor product of complete algebras."""
    for a in algebras:
        if not a.is_complete():
            raise AlgebraError(f"tensor factor {a.label or a!r} is not complete")
    return TensorAlgebra(algebras, prefixes, label)


class RingMap:
    """A graded ring homomorphism specified by the images of the generators."""

    def __init__(self, source: GradedAlgebra, target: GradedAlgebra, images: Mapping[str, Sequence]):
        self.source = source
        self.target = target
        self.images = {n: tuple(Fraction(c) for c in images[n]) for n in source.gen_names}
        self._cache: dict = {}

    def _monomial_image(self, e: tuple) -> tuple:
        r = self._cache.get(e)
        if r is None:
            r = self.target.one()
            for name, a in zip(self.source.gen_names, e):
                if a:
                    r = self.target.mul(r, self.target.power(self.images[name], a))
            self._cache[e] = r
        return r

    def __call__(self, x: Sequence) -> tuple:
        out = self.target.zero()
        for k, c in enumerate(x):
            if c:
                out = self.target.add(out, self.target.scale(c, self._monomial_image(self.source.monomials[k])))
        return out

    def check_homomorphism(self) -> bool:
        """Degree preservation on generators and multiplicativity on all basis pairs."""
        src, tgt = self.source, self.target
        for name, deg in zip(src.gen_names, src.gen_degrees):
            img = self.images[name]
            d = tgt.degree_of(img)
            if d is not None and d != deg:
                return False
        if self(src.one()) != tgt.one():
            return False
        n = src.dim
        for a in range(n):
            fa = self(src.basis(a))
            for b in range(a, n):
                if self(src.mul(src.basis(a), src.basis(b))) != tgt.mul(fa, self(src.basis(b))):
                    return False
        # the images must also satisfy the relations hidden in the normal forms
        for a in range(n):
            for b in range(a, n):
                e = tuple(x + y for x, y in zip(src.monomials[a], src.monomials[b]))
                if self._monomial_image(e) != self(src.monomial(e)):
                    return False
        return True
