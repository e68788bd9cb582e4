"""Degree-by-degree solver for the Gysin sequence of the free loop space.

For each degree i the sequence

    H(i-n)  --e-->  E_i  --cap-->  E_{i-2}  --M-->  H(i-n-1)

(H is loop homology, E equivariant homology) gives a short exact sequence

    0 -> coker(M: E_{i-1} -> H(i-n)) -> E_i -> ker(M: E_{i-2} -> H(i-n-1)) -> 0.

A node stores the erased part (cokernel), the kernel that is lifted through
the cap product, the middle group as resolved by ``ses_resolve``, and a value
of the marking map on every generator.  Marking values are assigned by the
following rules, in order; anything else is refused:

1. an erased class e(x) marks to the BV operator of x;
2. a lift in the CP^infinity tower marks to zero;
3. a finite-order generator marks to zero when the target is torsion-free;
4. anything marks to zero when the target group vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .loop_algebra import (CIRCLE, EVEN, LoopClass, LoopMonomial, SphereContext,
                           bv_delta, loop_basis)
from .zlinalg import (FgAbelianGroup, Homomorphism, IntMatrix, cyclic_presentation,
                      diagonal_kernel, element_order, invariant_factors, reduce_coords,
                      ses_resolve, _combo_label)


class AmbiguousMarking(RuntimeError):
    """The marking map on a generator is not forced by the rules."""


class ExactnessAuditFailure(RuntimeError):
    pass


class DegreeOutOfRange(IndexError):
    pass


ERASED, LIFT = "erased", "lift"


@dataclass(frozen=True)
class EquivariantGenerator:
    """A generator of one equivariant homology group.

    ``order`` is 0 for infinite order, a positive integer when known, and
    None for a finite order hidden inside an unresolved extension.
    """
    label: str
    provenance: str
    degree: int
    order: int | None
    m_value: LoopClass
    erased: LoopClass | None = None
    parent: tuple[int, ...] | None = None
    gamma: bool = False
    root: str = ""
    root_degree: int = 0

    @property
    def finite(self) -> bool:
        return self.order != 0


@dataclass(frozen=True)
class EqClass:
    """Element of a node, in coordinates over the node's generators."""
    degree: int
    coords: tuple[int, ...]

    def __add__(self, other: "EqClass") -> "EqClass":
        if self.degree != other.degree:
            raise ValueError("cannot add classes of different degree")
        return EqClass(self.degree, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def scale(self, k: int) -> "EqClass":
        return EqClass(self.degree, tuple(k * a for a in self.coords))

    def __neg__(self) -> "EqClass":
        return self.scale(-1)


@dataclass(frozen=True)
class GysinNode:
    degree: int
    ctx: SphereContext
    erase_basis: tuple[LoopMonomial, ...]
    erased_orders: tuple[int, ...]
    erase_matrix: IntMatrix = field(compare=False)
    kernel: FgAbelianGroup = FgAbelianGroup()
    group: FgAbelianGroup = FgAbelianGroup()
    generators: tuple[EquivariantGenerator, ...] = ()
    mark_basis: tuple[LoopMonomial, ...] = ()

    @property
    def split(self) -> bool:
        return self.group.resolved

    @property
    def erased_count(self) -> int:
        return len(self.erased_orders)

    @property
    def orders(self) -> tuple[int | None, ...]:
        return tuple(g.order for g in self.generators)

    @property
    def mark_annihilators(self) -> tuple[int, ...]:
        return tuple(m.annihilator(self.ctx) for m in self.mark_basis)

    @property
    def mark_hdeg(self) -> int:
        return self.degree - self.ctx.n + 1

    def m_matrix(self) -> IntMatrix:
        cols = [g.m_value.coords(list(self.mark_basis)) for g in self.generators]
        return IntMatrix(cols, len(self.mark_basis)).transpose() if cols \
            else IntMatrix.zeros(len(self.mark_basis), 0)

    def cap_matrix(self, below: "GysinNode | None") -> IntMatrix:
        rows = len(below.generators) if below else 0
        cols = [list(g.parent) if g.parent is not None else [0] * rows for g in self.generators]
        return IntMatrix(cols, rows).transpose() if cols else IntMatrix.zeros(rows, 0)

    def zero(self) -> EqClass:
        return EqClass(self.degree, (0,) * len(self.generators))

    def basis_class(self, k: int, coeff: int = 1) -> EqClass:
        return EqClass(self.degree, tuple(coeff if j == k else 0 for j in range(len(self.generators))))

    def is_zero(self, c: EqClass) -> bool:
        ne = self.erased_count
        lifts = c.coords[ne:]
        erased = c.coords[:ne]
        if self.split:
            return all(x % d == 0 if d else x == 0 for x, d in zip(c.coords, self.orders))
        # the erased part injects, so classes inside it are decidable
        if any(lifts):
            raise AmbiguousMarking(f"degree {self.degree}: equality undecidable in an unresolved extension")
        return element_order(erased, self.erased_orders) == 1

    def element_order(self, c: EqClass) -> int | None:
        """Order of a class (0 infinite); None if hidden in an extension."""
        if self.split:
            return element_order(c.coords, self.orders)
        if any(c.coords[self.erased_count:]):
            return None
        return element_order(c.coords[:self.erased_count], self.erased_orders)

    def marking_hom(self) -> Homomorphism:
        """Marking map as a homomorphism of canonical groups (split nodes only)."""
        src = _cyclic_group([g.order for g in self.generators])
        tgt = _cyclic_group(list(self.mark_annihilators))
        return Homomorphism(src[0], tgt[0], tgt[1] @ self.m_matrix() @ src[2])

    def label(self, k: int) -> str:
        return self.generators[k].label


def _cyclic_group(orders: Sequence[int]):
    """Canonical group of a diagonal presentation plus coordinate changes."""
    cyc = cyclic_presentation(len(orders), [[d if j == i else 0 for j in range(len(orders))]
                                            for i, d in enumerate(orders) if d], canonical=True)
    torsion = tuple(d for d in cyc.orders if d)
    group = FgAbelianGroup(len(cyc.orders) - len(torsion), torsion)
    basis = IntMatrix([list(b) for b in cyc.basis], len(orders)).transpose() \
        if cyc.basis else IntMatrix.zeros(len(orders), 0)
    return group, cyc.coords, basis


def _group_of_orders(orders: Sequence[int]) -> FgAbelianGroup:
    torsion = invariant_factors([d for d in orders if d])
    return FgAbelianGroup(sum(1 for d in orders if d == 0), torsion)


@dataclass(frozen=True)
class GroupTable:
    ctx: SphereContext
    max_degree: int
    nodes: tuple[GysinNode, ...]
    audit_log: tuple[str, ...] = ()

    @property
    def truncated(self) -> bool:
        return self.ctx.family == CIRCLE

    def node(self, degree: int) -> GysinNode | None:
        if 0 <= degree <= self.max_degree:
            return self.nodes[degree]
        return None

    def __getitem__(self, degree: int) -> GysinNode:
        node = self.node(degree)
        if node is None:
            raise DegreeOutOfRange(f"degree {degree} outside 0..{self.max_degree}")
        return node

    def find(self, label: str) -> tuple[int, int]:
        for node in self.nodes:
            for k, g in enumerate(node.generators):
                if g.label == label:
                    return node.degree, k
        raise KeyError(label)

    def generator_class(self, label: str) -> EqClass:
        d, k = self.find(label)
        return self[d].basis_class(k)

    def with_m_value(self, degree: int, index: int, value: LoopClass) -> "GroupTable":
        """Copy of the table with one marking value replaced (fault injection)."""
        node = self[degree]
        gens = list(node.generators)
        gens[index] = replace(gens[index], m_value=value)
        nodes = list(self.nodes)
        nodes[degree] = replace(node, generators=tuple(gens))
        return replace(self, nodes=tuple(nodes))


def _gamma_label(degree: int) -> str:
    return "γ" if degree == 2 else f"γ_{degree // 2}"


def _lift_label(below: GysinNode, vec: Sequence[int], degree: int) -> tuple[str, str, int]:
    nz = [(k, c) for k, c in enumerate(vec) if c]
    if len(nz) == 1 and nz[0][1] == 1:
        g = below.generators[nz[0][0]]
        root, root_deg = (g.root, g.root_degree) if g.provenance == LIFT else (g.label, g.degree)
    else:
        root = _combo_label([g.label for g in below.generators], vec)
        root_deg = below.degree
    shift = (degree - root_deg) // 2
    return f"{root}·{_gamma_label(2 * shift)}", root, root_deg


def _kernel_of_marking(node: GysinNode) -> tuple[FgAbelianGroup, list[tuple[int, ...]], list[int | None]]:
    """Kernel of M on a node: group, spanning vectors, and their orders."""
    m = node.m_matrix()
    gens = len(node.generators)
    if m.is_zero():
        vecs = [tuple(int(j == k) for j in range(gens)) for k in range(gens)]
        return node.group, vecs, list(node.orders)
    if not node.split:
        raise AmbiguousMarking(f"degree {node.degree}: nonzero marking on an unresolved extension")
    sub = diagonal_kernel(m, node.orders, node.mark_annihilators)
    return _group_of_orders(sub.orders), list(sub.generators), list(sub.orders)


def _assign_marking(ctx: SphereContext, gen: EquivariantGenerator, target: list[LoopMonomial],
                    hdeg: int) -> LoopClass:
    zero = LoopClass.zero(ctx, hdeg)
    if not target:
        return zero
    if gen.gamma:
        return zero
    if gen.finite and all(m.annihilator(ctx) == 0 for m in target):
        return zero
    raise AmbiguousMarking(f"degree {gen.degree}: marking of {gen.label} is not forced")


def _bottom_root(ctx: SphereContext, x: LoopClass) -> bool:
    single = x.single()
    return single is not None and single[0] == 1 and single[1] == LoopMonomial("a", 0)


def solve(ctx: SphereContext, max_degree: int) -> GroupTable:
    """Compute equivariant homology in degrees 0..max_degree."""
    if max_degree < 0:
        raise ValueError("max degree must be >= 0")
    n = ctx.n
    nodes: list[GysinNode] = []
    log: list[str] = []
    for i in range(max_degree + 1):
        hdeg = i - n
        basis = loop_basis(ctx, hdeg)
        rels = [[m.annihilator(ctx) if j == k else 0 for j in range(len(basis))]
                for k, m in enumerate(basis) if m.annihilator(ctx)]
        prev1 = nodes[i - 1] if i >= 1 else None
        if prev1 is not None and basis:
            rels += [g.m_value.coords(basis) for g in prev1.generators if not g.m_value.is_zero()]
        cyc = cyclic_presentation(len(basis), rels)
        erased = _group_of_orders(cyc.orders)

        prev2 = nodes[i - 2] if i >= 2 else None
        if prev2 is not None:
            kgroup, kvecs, korders = _kernel_of_marking(prev2)
        else:
            kgroup, kvecs, korders = FgAbelianGroup(), [], []
        group = ses_resolve(erased, kgroup)
        if not group.resolved:
            log.append(f"degree {i}: extension of {kgroup} by {erased} unresolved, "
                       f"torsion order {group.torsion_order}")

        mark_hdeg = hdeg + 1
        target = loop_basis(ctx, mark_hdeg)
        gens: list[EquivariantGenerator] = []
        for comb, d in zip(cyc.basis, cyc.orders):
            x = LoopClass.from_coords(ctx, hdeg, basis, comb)
            g = EquivariantGenerator(f"e({x.label()})", ERASED, i, d, bv_delta(x), erased=x,
                                     gamma=(i == 0 and _bottom_root(ctx, x)))
            gens.append(g)
        for vec, d in zip(kvecs, korders):
            gamma = all(prev2.generators[k].gamma for k, c in enumerate(vec) if c)
            if gamma:
                label, root, root_deg = _gamma_label(i), "", 0
            else:
                label, root, root_deg = _lift_label(prev2, vec, i)
            order = d
            if not group.resolved and d != 0:
                order = None
            g = EquivariantGenerator(label, LIFT, i, order, LoopClass.zero(ctx, mark_hdeg),
                                     parent=tuple(vec), gamma=gamma, root=root, root_degree=root_deg)
            gens.append(replace(g, m_value=_assign_marking(ctx, g, target, mark_hdeg)))
        seen: dict[str, int] = {}
        for k, g in enumerate(gens):
            if g.label in seen:
                seen[g.label] += 1
                gens[k] = replace(g, label=f"{g.label}#{seen[g.label]}")
            else:
                seen[g.label] = 0
        nodes.append(GysinNode(i, ctx, tuple(basis), cyc.orders, cyc.coords, kgroup, group,
                               tuple(gens), tuple(target)))
    if ctx.family == CIRCLE:
        log.append(f"winding classes truncated at |w| <= {ctx.winding_cutoff}")
    return GroupTable(ctx, max_degree, tuple(nodes), tuple(log))


def erase(table: GroupTable, x: LoopClass) -> EqClass:
    """The erasing map, landing in the node of degree hdeg(x) + n."""
    degree = x.hdeg + table.ctx.n
    node = table[degree]
    if x.is_zero():
        return node.zero()
    try:
        coords = x.coords(list(node.erase_basis))
    except KeyError as exc:
        raise DegreeOutOfRange(f"{x.label()} lies outside the truncated table") from exc
    a = reduce_coords(node.erase_matrix.apply(coords), node.erased_orders)
    return EqClass(degree, tuple(a) + (0,) * (len(node.generators) - node.erased_count))


def marking(table: GroupTable, c: EqClass) -> LoopClass:
    """The marking map, landing in loop homology of degree |c| - n + 1."""
    node = table[c.degree]
    out = LoopClass.zero(table.ctx, node.mark_hdeg)
    for coeff, g in zip(c.coords, node.generators):
        if coeff:
            out = out + g.m_value.scale(coeff)
    return out


def cap(table: GroupTable, c: EqClass) -> EqClass:
    """Cap product with the generator of H^2(CP^infinity)."""
    node = table[c.degree]
    below = table.node(c.degree - 2)
    if below is None:
        return EqClass(c.degree - 2, ())
    vec = node.cap_matrix(below).apply(c.coords)
    return EqClass(c.degree - 2, tuple(vec))


@dataclass
class AuditReport:
    violations: list[str] = field(default_factory=list)
    checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, msg: str) -> None:
        self.violations.append(msg)


def exactness_audit(table: GroupTable) -> AuditReport:
    """Re-derive each node from the stored marking values and compare."""
    rep = AuditReport()
    ctx = table.ctx
    for node in table.nodes:
        i = node.degree
        for k, g in enumerate(node.generators):
            rep.checks += 1
            if g.provenance == ERASED and g.m_value != bv_delta(g.erased):
                rep.fail(f"degree {i}: M(e(x)) != Δ(x) on {g.label}")
            if g.gamma and not g.m_value.is_zero():
                rep.fail(f"degree {i}: CP^∞ class {g.label} has nonzero marking")
            if g.finite and not g.m_value.is_zero() and node.mark_basis and \
                    not any(node.mark_annihilators) and g.order is not None and g.order > 0:
                rep.fail(f"degree {i}: finite-order {g.label} marks into a free group")
            above = table.node(i + 1)
            if above is not None and not g.m_value.is_zero():
                rep.checks += 1
                try:
                    if not above.is_zero(erase(table, g.m_value)):
                        rep.fail(f"degree {i + 1}: e(M({g.label})) != 0")
                except DegreeOutOfRange:
                    pass
        below = table.node(i - 2)
        for g in node.generators:
            if g.parent is not None:
                rep.checks += 1
                if not marking(table, EqClass(i - 2, g.parent)).is_zero():
                    rep.fail(f"degree {i}: cap({g.label}) is not in ker M")
        # bookkeeping: erased part = coker of the marking one degree down
        basis = list(node.erase_basis)
        rels = [[m.annihilator(ctx) if j == k else 0 for j in range(len(basis))]
                for k, m in enumerate(basis) if m.annihilator(ctx)]
        prev1 = table.node(i - 1)
        if prev1 is not None and basis:
            rels += [g.m_value.coords(basis) for g in prev1.generators if not g.m_value.is_zero()]
        rep.checks += 1
        coker = _group_of_orders(cyclic_presentation(len(basis), rels).orders)
        stored = _group_of_orders(node.erased_orders)
        if (coker.rank, coker.torsion_order) != (stored.rank, stored.torsion_order):
            rep.fail(f"degree {i}: image of e is {stored}, exactness requires {coker}")
        if below is not None:
            rep.checks += 1
            try:
                kgroup, _, _ = _kernel_of_marking(below)
            except AmbiguousMarking as exc:
                rep.fail(str(exc))
            else:
                if (kgroup.rank, kgroup.torsion_order) != (node.kernel.rank, node.kernel.torsion_order):
                    rep.fail(f"degree {i}: image of cap is {node.kernel}, kernel of M is {kgroup}")
        rep.checks += 1
        g = node.group
        if g.rank != stored.rank + node.kernel.rank or \
                g.torsion_order != stored.torsion_order * node.kernel.torsion_order:
            rep.fail(f"degree {i}: group {g} is not an extension of {node.kernel} by {stored}")
    return rep
