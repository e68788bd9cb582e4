"""Closed formulas for the string homology groups and string brackets of spheres.

These are evaluated directly from the formulas and never touch the Gysin
solver, so the two can be cross-checked.

Even spheres use the block length P = 2n - 2.  The commonly quoted closed
form of the even case disagrees with its inductive derivation in two places
(see ``printed_group``); :func:`theorem_group` follows the derivation:

* the free part of every positive even degree is one copy of Z, generated by
  the CP^infinity classes;
* block k contributes a Z_2 at degree kP and a cyclic group of order 2k + 1
  at degree kP + n, so the torsion order is 2^k (2k-1)!! through degree
  kP + n - 1 and 2^k (2k+1)!! from kP + n up to (k+1)P - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, prod

from .loop_algebra import CIRCLE, EVEN, ODD, SphereContext
from .zlinalg import invariant_factors


@dataclass(frozen=True)
class GroupDescriptor:
    rank: int
    torsion_order: int = 1
    refinement: tuple[int, ...] | None = None
    annotation: tuple[str, ...] = ()

    def __post_init__(self):
        if self.torsion_order < 1:
            raise ValueError("torsion order must be >= 1")
        if self.refinement is not None and self.torsion_order % prod(self.refinement):
            raise ValueError("refinement must divide the torsion order")

    def matches(self, rank: int, torsion_order: int) -> bool:
        return self.rank == rank and self.torsion_order == torsion_order

    def describe(self) -> str:
        parts = []
        if self.torsion_order > 1:
            ref = self.refinement or ()
            rest = self.torsion_order // prod(ref)
            parts += [f"ℤ_{d}" for d in ref]
            if rest > 1:
                parts.append(f"T(order={rest})")
        if self.rank:
            parts.append("ℤ" if self.rank == 1 else f"ℤ^{self.rank}")
        return " ⊕ ".join(parts) or "0"


def _odd_double_factorial(k: int) -> int:
    """3 * 5 * ... * (2k+1), i.e. (2k+1)!!; empty product for k <= 0."""
    return prod(2 * j + 1 for j in range(1, k + 1))


def theorem_group(ctx: SphereContext, i: int) -> GroupDescriptor:
    """String homology of the n-sphere in degree i."""
    if i < 0:
        raise ValueError("degree must be >= 0")
    n = ctx.n
    if ctx.family == CIRCLE:
        W = ctx.winding_cutoff
        if i == 0:
            return GroupDescriptor(2 * W + 1, annotation=("truncated",))
        if i % 2:
            cyc = [abs(w) for w in range(-W, W + 1) if abs(w) > 1]
            return GroupDescriptor(1, prod(cyc), invariant_factors(cyc), ("truncated",))
        return GroupDescriptor(1)
    if i == 0:
        return GroupDescriptor(1)
    if ctx.family == ODD:
        if i % 2 == 0:
            return GroupDescriptor(2 if i % (n - 1) == 0 else 1)
        k = (i - 1) // (n - 1)
        return GroupDescriptor(0, factorial(k), annotation=(f"t_{k}",))
    P = 2 * n - 2
    k, r = divmod(i, P)
    if i % 2:
        return GroupDescriptor(1 if r == n - 1 else 0)
    top = r >= n
    order = 2 ** k * _odd_double_factorial(k if top else k - 1)
    return GroupDescriptor(1, order, (2,) * k, (f"C_{k + 1 if top else k}",))


def printed_group(ctx: SphereContext, i: int) -> GroupDescriptor | None:
    """The group as the quoted closed form literally gives it, where it says anything.

    Odd spheres and the circle agree with :func:`theorem_group`.  For even
    spheres it lists Z_2^k ⊕ C_k ⊕ Z ⊕ Z in degree kP + n with
    |C_k| = 3 * 5 * ... * (2k-1), and Z below degree n.
    """
    n = ctx.n
    if ctx.family == ODD and i == 0:
        return None
    if ctx.family != EVEN or i == 0:
        return theorem_group(ctx, i)
    P = 2 * n - 2
    k, r = divmod(i, P)
    if i % 2:
        return GroupDescriptor(1 if r == n - 1 else 0)
    if i < n:
        return GroupDescriptor(1)
    if r == n:
        return GroupDescriptor(2, 2 ** k * _odd_double_factorial(k - 1), (2,) * k)
    return None


@dataclass(frozen=True)
class BracketFormula:
    coefficient: int
    order: int | None  # None for an infinite-order target
    vanishes: bool


def _verdict(coefficient: int, order: int | None) -> bool:
    if order is None:
        return coefficient == 0
    return coefficient % order == 0


def theorem_bracket(ctx: SphereContext, p: int, q: int) -> BracketFormula:
    """Bracket of two named generators as given by the closed formula.

    circle: e(a⊗x^p), e(a⊗x^q), coefficient -pq on e(1⊗x^(p+q));
    odd:    e(a⊗u^p), e(a⊗u^q), coefficient pq on e(1⊗u^(p+q-2)) of order p+q-1;
    even:   e(bv^p),  e(bv^q),  coefficient -(4pq+2p+2q+1) on e(v^(p+q)) of order 2(p+q)+1.
    """
    fam = ctx.family
    if fam == CIRCLE:
        coeff = -p * q
        order = abs(p + q) or None
    elif fam == ODD:
        coeff = p * q
        order = p + q - 1
    else:
        coeff = -(4 * p * q + 2 * p + 2 * q + 1)
        order = 2 * (p + q) + 1
    return BracketFormula(coeff, order, _verdict(coeff, order))
