"""Exact linear algebra over the integers.

Matrices are stored as lists of Python ints, so every computation is exact
regardless of how large torsion orders grow.  The module provides the Smith
normal form, finitely generated abelian groups in invariant-factor form,
homomorphisms between them, and the short-exact-sequence resolution policy
used by the Gysin solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod
from typing import Sequence

from sympy import factorint


class IntMatrix:
    """Dense integer matrix in row-major order."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence[int]], cols: int | None = None):
        self.data = [[int(x) for x in row] for row in data]
        self.rows = len(self.data)
        if cols is None:
            cols = len(self.data[0]) if self.data else 0
        self.cols = cols
        for row in self.data:
            if len(row) != cols:
                raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(size)] for i in range(size)], size)

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: int | None = None,
                 cols: int | None = None) -> "IntMatrix":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        m = cls.zeros(rows, cols)
        for i, d in enumerate(entries):
            m.data[i][i] = d
        return m

    @property
    def entries(self) -> list[int]:
        return [x for row in self.data for x in row]

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.data, self.cols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix([[self.data[i][j] for i in range(self.rows)]
                          for j in range(self.cols)], self.rows)

    def column(self, j: int) -> list[int]:
        return [row[j] for row in self.data]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ot = other.transpose().data
        return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in ot]
                          for row in self.data], other.cols)

    def apply(self, vec: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(row, vec)) for row in self.data]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.data)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, row in enumerate(self.data)
                   for j, x in enumerate(row) if i != j)

    def diag(self) -> list[int]:
        return [self.data[i][i] for i in range(min(self.rows, self.cols))]

    def det(self) -> int:
        """Bareiss fraction-free determinant."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [row[:] for row in self.data]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, IntMatrix) and self.shape == other.shape
                and self.data == other.data)

    def __repr__(self) -> str:
        return f"IntMatrix({self.data})"


def _as_matrix(m) -> IntMatrix:
    return m if isinstance(m, IntMatrix) else IntMatrix(m)


class _Reducer:
    """Elementary row/column operations that keep U, U^-1, V, V^-1 in sync.

    Invariant: s = u @ m @ v, with ui = u^-1 and vi = v^-1.
    """

    def __init__(self, m: IntMatrix):
        self.a = [row[:] for row in m.data]
        self.m, self.n = m.rows, m.cols
        eye = lambda k: [[int(i == j) for j in range(k)] for i in range(k)]
        self.u, self.ui = eye(self.m), eye(self.m)
        self.v, self.vi = eye(self.n), eye(self.n)

    def swap_rows(self, i, j):
        if i == j:
            return
        for mat in (self.a, self.u):
            mat[i], mat[j] = mat[j], mat[i]
        for row in self.ui:
            row[i], row[j] = row[j], row[i]

    def add_row(self, i, j, c):
        # row_i += c * row_j
        for mat in (self.a, self.u):
            ri, rj = mat[i], mat[j]
            for k in range(len(ri)):
                ri[k] += c * rj[k]
        for row in self.ui:
            row[j] -= c * row[i]

    def negate_row(self, i):
        for mat in (self.a, self.u):
            mat[i] = [-x for x in mat[i]]
        for row in self.ui:
            row[i] = -row[i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for mat in (self.a, self.v):
            for row in mat:
                row[i], row[j] = row[j], row[i]
        self.vi[i], self.vi[j] = self.vi[j], self.vi[i]

    def add_col(self, i, j, c):
        # col_i += c * col_j
        for mat in (self.a, self.v):
            for row in mat:
                row[i] += c * row[j]
        ri, rj = self.vi[i], self.vi[j]
        for k in range(len(rj)):
            rj[k] -= c * ri[k]

    def negate_col(self, i):
        for mat in (self.a, self.v):
            for row in mat:
                row[i] = -row[i]
        self.vi[i] = [-x for x in self.vi[i]]

    def _min_pivot(self, t, rows, cols):
        best = None
        for i in rows:
            for j in cols:
                x = self.a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        return best

    def reduce(self, divisibility: bool = True) -> None:
        a = self.a
        for t in range(min(self.m, self.n)):
            best = self._min_pivot(t, range(t, self.m), range(t, self.n))
            if best is None:
                break
            self.swap_rows(t, best[1])
            self.swap_cols(t, best[2])
            while True:
                p = a[t][t]
                dirty = False
                for i in range(t + 1, self.m):
                    if a[i][t]:
                        self.add_row(i, t, -(a[i][t] // p))
                        dirty = dirty or a[i][t] != 0
                for j in range(t + 1, self.n):
                    if a[t][j]:
                        self.add_col(j, t, -(a[t][j] // p))
                        dirty = dirty or a[t][j] != 0
                if dirty:
                    cand = [(abs(a[i][t]), i, t) for i in range(t + 1, self.m) if a[i][t]]
                    cand += [(abs(a[t][j]), t, j) for j in range(t + 1, self.n) if a[t][j]]
                    _, i, j = min(cand)
                    self.swap_rows(t, i)
                    self.swap_cols(t, j)
                    continue
                if divisibility:
                    bad = next(((i, j) for i in range(t + 1, self.m)
                                for j in range(t + 1, self.n) if a[i][j] % p), None)
                    if bad is not None:
                        self.add_row(t, bad[0], 1)
                        continue
                break
            if a[t][t] < 0:
                self.negate_row(t)


@dataclass(frozen=True)
class SmithForm:
    u: IntMatrix
    s: IntMatrix
    v: IntMatrix
    u_inv: IntMatrix
    v_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return self.s.diag()

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_decomposition(m, divisibility: bool = True) -> SmithForm:
    """Smith form together with the inverses of both transforms.

    With ``divisibility=False`` the result is merely diagonal (no d1 | d2
    chain), which keeps already-diagonal presentations untouched.
    """
    m = _as_matrix(m)
    r = _Reducer(m)
    r.reduce(divisibility)
    mk = lambda rows, cols: IntMatrix(rows, cols)
    return SmithForm(mk(r.u, m.rows), mk(r.a, m.cols), mk(r.v, m.cols),
                     mk(r.ui, m.rows), mk(r.vi, m.cols))


def smith_normal_form(m) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(u, s, v)`` with ``s = u @ m @ v`` in Smith normal form.

    ``u`` and ``v`` are unimodular and the diagonal of ``s`` is non-negative
    with each entry dividing the next.
    """
    f = smith_decomposition(m)
    return f.u, f.s, f.v


def nullspace(m) -> list[list[int]]:
    """Basis of the saturated integer kernel ``{x : m x = 0}``."""
    m = _as_matrix(m)
    f = smith_decomposition(m, divisibility=False)
    nonzero = {j for j, d in enumerate(f.diagonal) if d}
    return [f.v.column(j) for j in range(m.cols) if j not in nonzero]


# ---------------------------------------------------------------------------
# Cyclic presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cyclic:
    """Cokernel of a relation matrix split into cyclic summands.

    ``orders[k]`` is 0 for a free summand.  ``basis[k]`` expresses summand
    generator ``k`` as an integer combination of the input generators, and
    ``coords`` maps input generator coordinates to summand coordinates.
    """
    orders: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]
    coords: IntMatrix

    def to_coords(self, vec: Sequence[int]) -> list[int]:
        return reduce_coords(self.coords.apply(vec), self.orders)


def reduce_coords(vec: Sequence[int], orders: Sequence[int]) -> list[int]:
    return [x % d if d else x for x, d in zip(vec, orders)]


def cyclic_presentation(ngens: int, relations: Sequence[Sequence[int]],
                        canonical: bool = False) -> Cyclic:
    """Decompose ``Z^ngens / rowspace(relations)`` into cyclic summands.

    Summands of order 1 are dropped.  With ``canonical`` the orders follow
    the invariant-factor chain (torsion first, then free summands).
    """
    rel = IntMatrix(relations, ngens) if relations else IntMatrix.zeros(0, ngens)
    f = smith_decomposition(rel, divisibility=canonical)
    diag = f.diagonal + [0] * (ngens - min(rel.rows, ngens))
    keep = [j for j in range(ngens) if diag[j] != 1]
    if canonical:
        keep.sort(key=lambda j: (diag[j] == 0, diag[j]))
    orders, basis, rows = [], [], []
    for j in keep:
        b = list(f.v_inv.data[j])
        c = f.v.column(j)
        first = next((x for x in b if x), 0)
        if first < 0:
            b, c = [-x for x in b], [-x for x in c]
        orders.append(diag[j])
        basis.append(tuple(b))
        rows.append(c)
    return Cyclic(tuple(orders), tuple(basis), IntMatrix(rows, ngens))


def element_order(vec: Sequence[int], orders: Sequence[int]) -> int:
    """Order of an element in a cyclic presentation; 0 means infinite."""
    out = 1
    for x, d in zip(vec, orders):
        if d == 0:
            if x:
                return 0
        elif x % d:
            k = d // gcd(x, d)
            out = out * k // gcd(out, k)
    return out


def lattice_basis(gens: Sequence[Sequence[int]], dim: int) -> tuple[list[list[int]], SmithForm]:
    """Basis (as columns) of the sublattice of Z^dim spanned by ``gens``."""
    mat = IntMatrix([list(col) for col in gens], dim).transpose() if gens \
        else IntMatrix.zeros(dim, 0)
    f = smith_decomposition(mat, divisibility=False)
    basis = []
    for j, d in enumerate(f.diagonal):
        if d:
            basis.append([d * x for x in f.u_inv.column(j)])
    return basis, f


def _solve_in_basis(f: SmithForm, vec: Sequence[int]) -> list[int]:
    y = f.u.apply(vec)
    out = []
    for j, d in enumerate(f.diagonal):
        if d:
            if y[j] % d:
                raise ValueError("vector not in lattice")
            out.append(y[j] // d)
        elif y[j]:
            raise ValueError("vector not in lattice")
    for j in range(len(f.diagonal), len(y)):
        if y[j]:
            raise ValueError("vector not in lattice")
    return out


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a diagonally presented group, re-presented cyclically.

    ``generators[k]`` is a vector in the ambient generator coordinates.
    """
    orders: tuple[int, ...]
    generators: tuple[tuple[int, ...], ...]


def _subquotient(lattice_gens: list[list[int]], ambient_orders: Sequence[int]) -> Subgroup:
    """Present ``L / (L ∩ D Z^g)`` where D is the ambient relation diagonal.

    ``lattice_gens`` must span a lattice containing every ``d_i e_i``.
    """
    g = len(ambient_orders)
    rel_cols = [[d if k == i else 0 for k in range(g)] for i, d in enumerate(ambient_orders) if d]
    basis, f = lattice_basis(list(lattice_gens) + rel_cols, g)
    rels = [_solve_in_basis(f, c) for c in rel_cols]
    cyc = cyclic_presentation(len(basis), rels, canonical=True)
    gens = []
    for comb in cyc.basis:
        v = [sum(c * b[k] for c, b in zip(comb, basis)) for k in range(g)]
        gens.append(tuple(reduce_coords(v, ambient_orders)))
    return Subgroup(cyc.orders, tuple(gens))


def diagonal_kernel(matrix: IntMatrix, src_orders: Sequence[int],
                    tgt_orders: Sequence[int]) -> Subgroup:
    """Kernel of a map between diagonally presented groups."""
    g, t = len(src_orders), len(tgt_orders)
    if t == 0 or matrix.is_zero():
        lat = [[int(i == k) for k in range(g)] for i in range(g)]
    else:
        block = [list(matrix.data[r]) + [-(tgt_orders[r] if r == c else 0) for c in range(t)]
                 for r in range(t)]
        lat = [v[:g] for v in nullspace(IntMatrix(block, g + t))]
        lat += [[d if k == i else 0 for k in range(g)] for i, d in enumerate(src_orders) if d]
    return _subquotient(lat, src_orders)


def diagonal_image(matrix: IntMatrix, tgt_orders: Sequence[int]) -> Subgroup:
    lat = [matrix.column(j) for j in range(matrix.cols)]
    lat = [c for c in lat if any(c)]
    lat += [[d if k == i else 0 for k in range(len(tgt_orders))]
            for i, d in enumerate(tgt_orders) if d]
    return _subquotient(lat, tgt_orders)


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------

def _prime_power_parts(torsion: Sequence[int]) -> dict[int, list[int]]:
    parts: dict[int, list[int]] = {}
    for d in torsion:
        for p, e in factorint(d).items():
            parts.setdefault(p, []).append(p ** e)
    return parts


def invariant_factors(cyclic_orders: Sequence[int]) -> tuple[int, ...]:
    """Invariant factors of a direct sum of finite cyclic groups."""
    parts = _prime_power_parts([d for d in cyclic_orders if d > 1])
    for p in parts:
        parts[p].sort(reverse=True)
    length = max((len(v) for v in parts.values()), default=0)
    out = []
    for k in range(length):
        out.append(prod(v[k] for v in parts.values() if k < len(v)))
    return tuple(reversed(out))


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^rank ⊕ (cyclic torsion) ⊕ (opaque torsion of known order).

    ``torsion`` is the invariant-factor chain of the resolved torsion.  The
    opaque part collects whole p-primary components whose isomorphism type
    is undetermined; ``opaque_order`` is 1 when there is none.  Labels cover
    the torsion summands first, then the free summands; an opaque part has
    no summand labels of its own, its spanning labels go in ``opaque_labels``.
    """
    rank: int = 0
    torsion: tuple[int, ...] = ()
    generators: tuple[str, ...] = ()
    opaque_order: int = 1
    opaque_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rank < 0 or self.opaque_order < 1:
            raise ValueError("negative rank or invalid opaque order")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} break the divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("invariant factors must be >= 2")
        if self.generators:
            if len(self.generators) != len(self.torsion) + self.rank:
                raise ValueError("generator labels do not match summands")
            if len(set(self.generators)) != len(self.generators):
                raise ValueError("generator labels must be unique")
        if self.opaque_order > 1:
            shared = set(factorint(self.opaque_order)) & set(_prime_power_parts(self.torsion))
            if shared:
                raise ValueError("opaque and resolved torsion share primes")

    @classmethod
    def free(cls, rank: int, labels: Sequence[str] = ()) -> "FgAbelianGroup":
        return cls(rank, (), tuple(labels))

    @classmethod
    def cyclic(cls, order: int, label: str | None = None) -> "FgAbelianGroup":
        if order == 0:
            return cls(1, (), (label,) if label else ())
        if order == 1:
            return cls()
        return cls(0, (order,), (label,) if label else ())

    @classmethod
    def opaque(cls, order: int, labels: Sequence[str] = ()) -> "FgAbelianGroup":
        return cls(0, (), (), order, tuple(labels))

    @property
    def resolved(self) -> bool:
        return self.opaque_order == 1

    @property
    def torsion_order(self) -> int:
        return prod(self.torsion) * self.opaque_order

    @property
    def order(self) -> int | None:
        """Group order, or None when the group is infinite."""
        return None if self.rank else self.torsion_order

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and self.torsion_order == 1

    @property
    def is_free(self) -> bool:
        return self.torsion_order == 1

    @property
    def summand_orders(self) -> tuple[int, ...]:
        if not self.resolved:
            raise ValueError("opaque torsion has no summand coordinates")
        return self.torsion + (0,) * self.rank

    def primary_parts(self) -> dict[int, tuple[str, object]]:
        """Map prime -> ("resolved", [p-power orders]) or ("opaque", order)."""
        out: dict[int, tuple[str, object]] = {p: ("resolved", v)
                                              for p, v in _prime_power_parts(self.torsion).items()}
        for p, e in factorint(self.opaque_order).items():
            out[p] = ("opaque", p ** e)
        return out

    def describe(self, ascii: bool = False) -> str:
        z = "Z" if ascii else "ℤ"
        parts = [f"{z}_{d}" if ascii else f"ℤ{_subscript(d)}" for d in self.torsion]
        if not self.resolved:
            parts.append(f"T(order={self.opaque_order})")
        if self.rank == 1:
            parts.append(z)
        elif self.rank > 1:
            parts.append(f"{z}^{self.rank}")
        if not parts:
            return "0"
        return " + ".join(parts) if ascii else " ⊕ ".join(parts)

    def __str__(self) -> str:
        return self.describe()


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _subscript(d: int) -> str:
    return str(d).translate(_SUB)


def direct_sum(*groups: FgAbelianGroup) -> FgAbelianGroup:
    """Direct sum; summand labels are dropped unless every summand is resolved."""
    rank = sum(g.rank for g in groups)
    cyc = [d for g in groups for d in g.torsion]
    opaque = prod(g.opaque_order for g in groups)
    opaque_primes = set(factorint(opaque))
    res_parts = _prime_power_parts(cyc)
    for p in list(res_parts):
        if p in opaque_primes:
            opaque *= prod(res_parts.pop(p))
    torsion = invariant_factors([q for v in res_parts.values() for q in v])
    if opaque == 1 and all(g.generators for g in groups) and \
            [d for g in groups for d in g.torsion] == list(torsion):
        labels = tuple(l for g in groups for l in g.generators[:len(g.torsion)]) + \
            tuple(l for g in groups for l in g.generators[len(g.torsion):])
        return FgAbelianGroup(rank, torsion, labels)
    return FgAbelianGroup(rank, torsion, (), opaque,
                          tuple(l for g in groups for l in (g.generators or g.opaque_labels))
                          if opaque > 1 else ())


def _combo_label(labels: Sequence[str], comb: Sequence[int]) -> str:
    terms = []
    for c, lab in zip(comb, labels):
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else str(abs(c))
        terms.append((sign, f"{mag}{lab}"))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, t in terms[1:]:
        out += f"{sign}{t}"
    return out if len(terms) == 1 else f"({out})"


def group_from_presentation(gen_labels: Sequence[str], relations) -> FgAbelianGroup:
    """Cokernel of the relation matrix (rows are relations) in invariant-factor form.

    New generator labels are integer combinations of the input labels.
    """
    rows = relations.data if isinstance(relations, IntMatrix) else [list(r) for r in relations]
    if any(len(r) != len(gen_labels) for r in rows):
        raise ValueError("relation columns must match the number of generators")
    cyc = cyclic_presentation(len(gen_labels), rows, canonical=True)
    labels = tuple(_combo_label(gen_labels, b) for b in cyc.basis)
    if len(set(labels)) != len(labels):
        labels = tuple(f"{l}#{k}" for k, l in enumerate(labels))
    torsion = tuple(d for d in cyc.orders if d)
    return FgAbelianGroup(len(cyc.orders) - len(torsion), torsion, labels)


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Homomorphism:
    """Map of resolved groups, columns are images of source summand generators."""
    source: FgAbelianGroup
    target: FgAbelianGroup
    matrix: IntMatrix = field(compare=False)

    def __post_init__(self):
        src, tgt = self.source.summand_orders, self.target.summand_orders
        if self.matrix.shape != (len(tgt), len(src)):
            raise ValueError(f"matrix shape {self.matrix.shape} != {(len(tgt), len(src))}")
        for j, d in enumerate(src):
            if d and element_order([d * x for x in self.matrix.column(j)], tgt) != 1:
                raise ValueError(f"map is not well defined on summand {j} of order {d}")

    def __call__(self, vec: Sequence[int]) -> list[int]:
        return reduce_coords(self.matrix.apply(vec), self.target.summand_orders)


def _labels_for(group: FgAbelianGroup) -> list[str]:
    n = len(group.torsion) + group.rank
    return list(group.generators) if group.generators else [f"g{k}" for k in range(n)]


def _group_from_subgroup(sub: Subgroup, ambient_labels: Sequence[str]) -> tuple[FgAbelianGroup, IntMatrix]:
    torsion = tuple(d for d in sub.orders if d)
    labels = tuple(_combo_label(ambient_labels, g) for g in sub.generators)
    if len(set(labels)) != len(labels):
        labels = tuple(f"{l}#{k}" for k, l in enumerate(labels))
    group = FgAbelianGroup(len(sub.orders) - len(torsion), torsion, labels)
    incl = IntMatrix([list(g) for g in sub.generators], len(ambient_labels)).transpose() \
        if sub.generators else IntMatrix.zeros(len(ambient_labels), 0)
    return group, incl


def kernel(h: Homomorphism) -> tuple[FgAbelianGroup, Homomorphism]:
    sub = diagonal_kernel(h.matrix, h.source.summand_orders, h.target.summand_orders)
    group, incl = _group_from_subgroup(sub, _labels_for(h.source))
    return group, Homomorphism(group, h.source, incl)


def image(h: Homomorphism) -> tuple[FgAbelianGroup, Homomorphism]:
    sub = diagonal_image(h.matrix, h.target.summand_orders)
    group, incl = _group_from_subgroup(sub, _labels_for(h.target))
    return group, Homomorphism(group, h.target, incl)


def cokernel(h: Homomorphism) -> tuple[FgAbelianGroup, Homomorphism]:
    tgt = h.target.summand_orders
    t = len(tgt)
    rels = [h.matrix.column(j) for j in range(h.matrix.cols)]
    rels += [[d if k == i else 0 for k in range(t)] for i, d in enumerate(tgt) if d]
    cyc = cyclic_presentation(t, rels, canonical=True)
    labels = _labels_for(h.target)
    names = tuple(f"[{_combo_label(labels, b)}]" for b in cyc.basis)
    if len(set(names)) != len(names):
        names = tuple(f"{l}#{k}" for k, l in enumerate(names))
    torsion = tuple(d for d in cyc.orders if d)
    group = FgAbelianGroup(len(cyc.orders) - len(torsion), torsion, names)
    return group, Homomorphism(h.target, group, cyc.coords)


# ---------------------------------------------------------------------------
# Short exact sequences
# ---------------------------------------------------------------------------

class ExtensionError(ValueError):
    """Raised when an extension cannot even be bookkept by order."""


def ses_resolve(left: FgAbelianGroup, right: FgAbelianGroup) -> FgAbelianGroup:
    """Middle term G of 0 -> left -> G -> right -> 0, as far as it is forced.

    The free part of ``right`` always splits off.  On torsion, a p-primary
    component is forced whenever one side has no p-torsion; where both sides
    do, only the order is kept.
    """
    if right.is_trivial:
        return left
    if left.is_trivial:
        return right
    if right.is_free:
        return direct_sum(left, right)
    if left.rank:
        raise ExtensionError("extension of torsion by an infinite group is not order-determined")
    lp, rp = left.primary_parts(), right.primary_parts()
    cyclic: list[int] = []
    opaque = 1
    for p in sorted(set(lp) | set(rp)):
        sides = [s for s in (lp.get(p), rp.get(p)) if s is not None]
        if len(sides) == 1 and sides[0][0] == "resolved":
            cyclic.extend(sides[0][1])
            continue
        for kind, val in sides:
            opaque *= prod(val) if kind == "resolved" else val
    torsion = invariant_factors(cyclic)
    rank = right.rank
    if opaque == 1 and torsion == left.torsion + right.torsion and left.generators and right.generators:
        labels = left.generators + right.generators
        return FgAbelianGroup(rank, torsion, labels)
    spanning = tuple(left.generators or left.opaque_labels) + tuple(right.generators or right.opaque_labels)
    return FgAbelianGroup(rank, torsion, (), opaque, spanning if opaque > 1 else ())
