"""Standard presentations: weighted projective spaces, projective bundles, weighted blow-ups."""

from __future__ import annotations

from fractions import Fraction
from math import prod
from typing import Sequence

from ..rational import rank
from .algebra import AlgebraError, GradedAlgebra, extend, from_presentation


def point_ring() -> GradedAlgebra:
    return from_presentation([], [], normalization=({(): 1}, 1), label="pt")


def wps_ring(weights: Sequence[int], name: str = "h") -> GradedAlgebra:
    """Q[h]/h^(k+1) with integrate(h^k) = 1/prod(weights)."""
    weights = [int(a) for a in weights]
    if not weights or any(a <= 0 for a in weights):
        raise AlgebraError(f"weighted projective space needs positive weights, got {weights}")
    k = len(weights) - 1
    label = "P(" + ",".join(map(str, weights)) + ")"
    return from_presentation(
        [name], [{(k + 1,): 1}], normalization=({(k,): 1}, Fraction(1, prod(weights))), label=label
    )


def bundle_ring(
    base: GradedAlgebra, chern: Sequence[Sequence], weights: Sequence[int], name: str = "X"
) -> GradedAlgebra:
    """A(Z)[X]/P(X) for the weighted projectivisation of a rank-r bundle.

    ``chern`` lists the coefficients of P from the leading one down to the
    constant term; the leading coefficient must be the unit of ``base``.
    """
    r = len(weights)
    if len(chern) != r + 1:
        raise AlgebraError(f"P must have degree {r} = rank, got {len(chern) - 1}")
    coeffs = [tuple(Fraction(c) for c in x) for x in chern]
    if coeffs[0] != base.one():
        raise AlgebraError("P is not monic")
    if any(a <= 0 for a in weights):
        raise AlgebraError("bundle weights must be positive")
    factor = Fraction(1, prod(weights))

    def rule(k, b):
        return base.integrate(b) * factor if k == r - 1 else Fraction(0)

    alg = extend(base, name, [list(reversed(coeffs))], rule, label=f"P_{base.label}({r})")
    if alg.dim != base.dim * r:
        raise AlgebraError("projective bundle ring is not free of the expected rank")
    return alg


def weighted_blowup_ring(
    Y: GradedAlgebra,
    K_gens: Sequence[Sequence],
    P: Sequence[Sequence],
    exceptional_top: Fraction | None = None,
    name: str = "E",
) -> GradedAlgebra:
    """A(Y)[E]/(K*E, P(E)).

    ``P`` lists coefficients from the leading one (the unit) down to the
    constant term; its degree is the codimension of the blown-up centre.
    The integral is that of Y on E-free classes and zero elsewhere.  When
    ``exceptional_top`` is given, integrate(E^codim) is checked against it.
    """
    if not Y.is_complete():
        raise AlgebraError("blow-up base must be complete")
    coeffs = [tuple(Fraction(c) for c in x) for x in P]
    d = len(coeffs) - 1
    if d < 1 or coeffs[0] != Y.one():
        raise AlgebraError("P must be monic of positive degree")
    kg = [tuple(Fraction(c) for c in k) for k in K_gens]
    rels = [[Y.zero(), k] for k in kg] + [list(reversed(coeffs))]

    def rule(k, b):
        return Y.integrate(b) if k == 0 else Fraction(0)

    alg = extend(Y, name, rels, rule, label=f"Bl({Y.label})")
    ideal_rows = [Y.mul(Y.basis(b), k) for k in kg for b in range(Y.dim)]
    quotient_dim = Y.dim - (rank([r for r in ideal_rows if any(r)]) if ideal_rows else 0)
    expected = Y.dim + (d - 1) * quotient_dim
    if alg.dim != expected:
        raise AlgebraError(
            f"inconsistent P versus K: blow-up has rank {alg.dim}, expected {expected}"
        )
    if exceptional_top is not None:
        got = alg.integrate(alg.power(alg.gen(name), d))
        if got != Fraction(exceptional_top):
            raise AlgebraError(f"integral of E^{d} is {got}, normal bundle data asks for {exceptional_top}")
    return alg
