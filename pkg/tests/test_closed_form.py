from math import factorial

import pytest

from stringhom.closed_form import (GroupDescriptor, printed_group, theorem_bracket,
                                   theorem_group)
from stringhom.loop_algebra import SphereContext

S3, S2 = SphereContext(3), SphereContext(2)


def test_group_examples():
    assert theorem_group(S3, 5).matches(0, 2)
    assert theorem_group(S2, 1).matches(1, 1)
    assert theorem_group(SphereContext(5), 2).matches(1, 1)
    for n in range(2, 9):
        assert theorem_group(SphereContext(n), 0).matches(1, 1)
    with pytest.raises(ValueError):
        theorem_group(S3, -1)


def test_odd_torsion_is_factorial():
    for n in (3, 5, 9):
        ctx = SphereContext(n)
        for i in range(1, 80, 2):
            assert theorem_group(ctx, i).torsion_order == factorial((i - 1) // (n - 1))


def test_even_block_structure():
    ctx = SphereContext(4)
    # block k = 1 spans degrees 6..11; the Z_3 appears at 6 + n = 10
    assert theorem_group(ctx, 6).matches(1, 2)
    assert theorem_group(ctx, 8).matches(1, 2)
    assert theorem_group(ctx, 10).matches(1, 6)
    assert theorem_group(ctx, 9).matches(1, 1)
    assert theorem_group(ctx, 7).matches(0, 1)
    assert theorem_group(ctx, 10).annotation == ("C_2",)


def test_circle():
    ctx = SphereContext(1, 4)
    assert theorem_group(ctx, 0).rank == 9
    g = theorem_group(ctx, 3)
    assert g.torsion_order == factorial(4) ** 2
    assert g.refinement == (2, 2, 12, 12)
    assert theorem_group(ctx, 4).matches(1, 1)


def test_printed_even_statement_differs_only_at_kP_plus_n():
    for n in (2, 4, 6):
        ctx = SphereContext(n)
        P = 2 * n - 2
        for i in range(0, 6 * P):
            p = printed_group(ctx, i)
            if p is None:
                continue
            same = p.matches(theorem_group(ctx, i).rank, theorem_group(ctx, i).torsion_order)
            assert same == (i < n or i % P != n % P or i % 2 == 1), i


def test_descriptor():
    d = GroupDescriptor(1, 12, (2, 2))
    assert d.describe() == "ℤ_2 ⊕ ℤ_2 ⊕ T(order=3) ⊕ ℤ"
    with pytest.raises(ValueError):
        GroupDescriptor(0, 6, (4,))
    assert GroupDescriptor(0).describe() == "0"


def test_bracket_examples():
    b = theorem_bracket(S3, 2, 2)
    assert (b.coefficient, b.order, b.vanishes) == (4, 3, False)
    b = theorem_bracket(S2, 1, 1)
    assert (b.coefficient, b.order, b.vanishes) == (-9, 5, False)
    b = theorem_bracket(SphereContext(1, 5), 1, -1)
    assert (b.coefficient, b.order, b.vanishes) == (1, None, False)
    b = theorem_bracket(S3, 1, 2)
    assert (b.coefficient, b.order, b.vanishes) == (2, 2, True)


def test_odd_divisibility_exhaustive():
    for i in range(1, 31):
        for j in range(1, 31):
            b = theorem_bracket(S3, i, j)
            assert b.vanishes == ((i * j) % (i + j - 1) == 0)
            assert b == theorem_bracket(S3, j, i)


def test_even_exhaustive():
    for k in range(31):
        for l in range(31):
            b = theorem_bracket(S2, k, l)
            assert b.coefficient == -(2 * k + 1) * (2 * l + 1)
            assert b.order == 2 * (k + l) + 1
            assert b.vanishes == (b.coefficient % b.order == 0)
            assert b == theorem_bracket(S2, l, k)


def test_circle_criterion():
    ctx = SphereContext(1, 10)
    for p in range(-10, 11):
        for q in range(-10, 11):
            b = theorem_bracket(ctx, p, q)
            s = p + q
            assert b.vanishes == (p * q == 0 or (s != 0 and (p * q) % s == 0))
