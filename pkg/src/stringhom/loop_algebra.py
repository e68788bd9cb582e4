"""Loop homology of spheres as a graded ring with the BV operator.

Everything uses the geometric grading, where the loop homology in degree h
is the ordinary homology of the free loop space in degree h + n.

Monomials by family:

* circle (n = 1):   a^e ⊗ x^w,  |a| = -1, |x| = 0,  w any integer
* odd n >= 3:       a^e ⊗ u^i,  |a| = -n, |u| = n - 1
* even n:           v^k, b v^k, a v^k,  |a| = -n, |b| = -1, |v| = 2n - 2,
                    with a^2 = ab = b^2 = 0 and 2 a v^k = 0 for k >= 1

The rings are treated as strictly commutative; every product of two odd
generators is killed by the relations, so no Koszul sign ever appears.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

CIRCLE, ODD, EVEN = "circle", "odd", "even"


class ContextMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SphereContext:
    n: int
    winding_cutoff: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sphere dimension must be >= 1")
        if self.winding_cutoff < 0:
            raise ValueError("winding cutoff must be >= 0")

    @property
    def family(self) -> str:
        if self.n == 1:
            return CIRCLE
        return ODD if self.n % 2 else EVEN


@dataclass(frozen=True, order=True)
class LoopMonomial:
    """``head`` is one of "1", "a", "b"; ``power`` is the exponent of x, u or v."""
    head: str
    power: int

    def hdeg(self, ctx: SphereContext) -> int:
        n = ctx.n
        fam = ctx.family
        if fam == CIRCLE:
            return -1 if self.head == "a" else 0
        if fam == ODD:
            return (-n if self.head == "a" else 0) + self.power * (n - 1)
        base = {"1": 0, "a": -n, "b": -1}[self.head]
        return base + self.power * (2 * n - 2)

    def annihilator(self, ctx: SphereContext) -> int:
        """2 for the classes a v^k with k >= 1, else 0 (infinite order)."""
        return 2 if ctx.family == EVEN and self.head == "a" and self.power >= 1 else 0

    def label(self, ctx: SphereContext) -> str:
        fam = ctx.family
        if fam == EVEN:
            head = "" if self.head == "1" else self.head
            if self.power == 0:
                return head or "1"
            v = "v" if self.power == 1 else f"v^{self.power}"
            return head + v
        var = "x" if fam == CIRCLE else "u"
        if self.power == 0:
            tail = "1"
        elif self.power == 1:
            tail = var
        else:
            tail = f"{var}^{self.power}"
        return f"{self.head}⊗{tail}"


def loop_basis(ctx: SphereContext, hdeg: int) -> list[LoopMonomial]:
    """All monomials of the given degree, ordered by (head, power).

    For the circle the Laurent exponent is restricted to |w| <= cutoff.
    Use :meth:`LoopMonomial.annihilator` for the order of each basis element.
    """
    n, fam = ctx.n, ctx.family
    out = []
    if fam == CIRCLE:
        head = {0: "1", -1: "a"}.get(hdeg)
        if head is not None:
            W = ctx.winding_cutoff
            out = [LoopMonomial(head, w) for w in range(-W, W + 1)]
        return out
    if fam == ODD:
        step = n - 1
        for head, base in (("1", 0), ("a", -n)):
            if (hdeg - base) % step == 0 and hdeg >= base:
                out.append(LoopMonomial(head, (hdeg - base) // step))
    else:
        step = 2 * n - 2
        for head, base in (("1", 0), ("a", -n), ("b", -1)):
            if (hdeg - base) % step == 0 and hdeg >= base:
                out.append(LoopMonomial(head, (hdeg - base) // step))
    return sorted(out)


def _monomial_product(ctx: SphereContext, x: LoopMonomial,
                      y: LoopMonomial) -> LoopMonomial | None:
    heads = {x.head, y.head} - {"1"}
    if x.head != "1" and y.head != "1":
        return None  # a^2 = ab = b^2 = 0
    head = heads.pop() if heads else "1"
    return LoopMonomial(head, x.power + y.power)


@dataclass(frozen=True)
class LoopClass:
    """Homogeneous integer combination of loop monomials."""
    ctx: SphereContext
    hdeg: int
    terms: Mapping[LoopMonomial, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            if m.hdeg(self.ctx) != self.hdeg:
                raise ValueError(f"{m.label(self.ctx)} is not of degree {self.hdeg}")
            ann = m.annihilator(self.ctx)
            if ann:
                c %= ann
            if c:
                clean[m] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, ctx: SphereContext, head: str, power: int, coeff: int = 1) -> "LoopClass":
        m = LoopMonomial(head, power)
        return cls(ctx, m.hdeg(ctx), {m: coeff})

    @classmethod
    def zero(cls, ctx: SphereContext, hdeg: int) -> "LoopClass":
        return cls(ctx, hdeg, {})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "LoopClass") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch("classes live in different loop homologies")

    def __add__(self, other: "LoopClass") -> "LoopClass":
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.hdeg != other.hdeg:
            raise ValueError("cannot add classes of different degree")
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return LoopClass(self.ctx, self.hdeg, terms)

    def __neg__(self) -> "LoopClass":
        return self.scale(-1)

    def __sub__(self, other: "LoopClass") -> "LoopClass":
        return self + (-other)

    def scale(self, k: int) -> "LoopClass":
        return LoopClass(self.ctx, self.hdeg, {m: k * c for m, c in self.terms.items()})

    def __rmul__(self, k: int) -> "LoopClass":
        return self.scale(k)

    def __mul__(self, other: "LoopClass") -> "LoopClass":
        return loop_product(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LoopClass) or self.ctx != other.ctx:
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.hdeg == other.hdeg and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.ctx, self.hdeg, tuple(self.terms.items())))

    def coords(self, basis: list[LoopMonomial]) -> list[int]:
        index = {m: k for k, m in enumerate(basis)}
        out = [0] * len(basis)
        for m, c in self.terms.items():
            if m not in index:
                raise KeyError(f"{m.label(self.ctx)} outside the given basis")
            out[index[m]] = c
        return out

    @classmethod
    def from_coords(cls, ctx: SphereContext, hdeg: int, basis: list[LoopMonomial],
                    coords) -> "LoopClass":
        return cls(ctx, hdeg, {m: c for m, c in zip(basis, coords) if c})

    def single(self) -> tuple[int, LoopMonomial] | None:
        """(coefficient, monomial) when the class has exactly one term."""
        if len(self.terms) != 1:
            return None
        (m, c), = self.terms.items()
        return c, m

    def label(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m, c in self.terms.items():
            lab = m.label(self.ctx)
            if c == 1:
                parts.append(("+", lab))
            elif c == -1:
                parts.append(("-", lab))
            else:
                body = f"{abs(c)}({lab})" if "⊗" in lab else f"{abs(c)}{lab}"
                parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __str__(self) -> str:
        return self.label()

    def __iter__(self) -> Iterator[tuple[LoopMonomial, int]]:
        return iter(self.terms.items())


def loop_product(x: LoopClass, y: LoopClass) -> LoopClass:
    """Bilinear loop product; degrees add."""
    x._check(y)
    terms: dict[LoopMonomial, int] = {}
    for mx, cx in x.terms.items():
        for my, cy in y.terms.items():
            m = _monomial_product(x.ctx, mx, my)
            if m is not None:
                terms[m] = terms.get(m, 0) + cx * cy
    return LoopClass(x.ctx, x.hdeg + y.hdeg, terms)


def _delta_monomial(ctx: SphereContext, m: LoopMonomial) -> tuple[int, LoopMonomial] | None:
    fam = ctx.family
    if fam == ODD:
        if m.head == "a" and m.power:
            return m.power, LoopMonomial("1", m.power - 1)
        return None
    if fam == CIRCLE:
        if m.head == "a" and m.power:
            return m.power, LoopMonomial("1", m.power)
        return None
    if m.head == "b":
        return 2 * m.power + 1, LoopMonomial("1", m.power)
    return None


def bv_delta(x: LoopClass) -> LoopClass:
    """The BV operator; raises degree by one and squares to zero."""
    terms: dict[LoopMonomial, int] = {}
    for m, c in x.terms.items():
        img = _delta_monomial(x.ctx, m)
        if img is not None:
            k, target = img
            terms[target] = terms.get(target, 0) + k * c
    return LoopClass(x.ctx, x.hdeg + 1, terms)
