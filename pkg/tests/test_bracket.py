from dataclasses import replace

import pytest

from stringhom.bracket import bracket_entry, bracket_table, lie_audit, markable_generators, string_bracket
from stringhom.gysin import marking, solve
from stringhom.loop_algebra import SphereContext


@pytest.fixture(scope="module")
def s3():
    return solve(SphereContext(3), 20)


@pytest.fixture(scope="module")
def s2():
    return solve(SphereContext(2), 12)


def entry(table, a, b):
    return bracket_entry(table, table.find(a), table.find(b))


def test_odd_example(s3):
    e = entry(s3, "e(a⊗u^2)", "e(a⊗u^2)")
    assert abs(e.coefficient) == 4 and e.target_label() == "e(1⊗u^2)"
    assert e.order == 3 and not e.vanishes
    assert e.degree == 7


def test_odd_vanishing_example(s3):
    e = entry(s3, "e(a⊗u)", "e(a⊗u^2)")
    assert abs(e.coefficient) == 2 and e.order == 2 and e.vanishes


def test_even_example(s2):
    e = entry(s2, "e(bv)", "e(bv)")
    assert (e.coefficient, e.order, e.vanishes) == (-9, 5, False)
    assert e.target_label() == "e(v^2)"


def test_circle_zero_winding_sum():
    t = solve(SphereContext(1, 4), 2)
    e = entry(t, "e(a⊗x)", "e(a⊗x^-1)")
    assert e.coefficient == 1 and e.order is None and not e.vanishes
    e = entry(t, "e(a⊗x^2)", "e(a⊗x^2)")
    # -4 on a class of order 4
    assert e.coefficient == -4 and e.order == 4 and e.vanishes


def test_gamma_brackets_vanish(s3):
    for label in ("γ", "γ_2", "γ_3"):
        g = s3.generator_class(label)
        for node in s3.nodes:
            for k in range(len(node.generators)):
                other = node.basis_class(k)
                if g.degree + other.degree + 2 - 3 > 20:
                    continue
                res = string_bracket(s3, g, other)
                assert all(c == 0 for c in res.coords)


def test_only_named_families_nonzero():
    t = solve(SphereContext(3), 10)
    for e in bracket_table(t):
        if not e.vanishes:
            assert e.left_label.startswith("e(a⊗u") and e.right_label.startswith("e(a⊗u")
    for n in (2, 4):
        t = solve(SphereContext(n), 3 * n)
        nonzero = [e for e in bracket_table(t) if not e.vanishes]
        # for n = 4 the first nonzero bracket sits in degree 16
        assert bool(nonzero) == (n == 2)
        for e in nonzero:
            assert e.left_label.startswith("e(b") and e.right_label.startswith("e(b")


def test_empty_table():
    t = solve(SphereContext(5), 3)
    assert bracket_table(t) == []


def test_markable_excludes_gamma(s3):
    labels = {s3[d].label(k) for d, k in markable_generators(s3)}
    assert not any(l.startswith("γ") for l in labels)


@pytest.mark.parametrize("ctx,D", [(SphereContext(3), 20), (SphereContext(2), 12),
                                   (SphereContext(4), 40), (SphereContext(5), 40),
                                   (SphereContext(1, 5), 3)])
def test_lie_audit_clean(ctx, D):
    t = solve(ctx, D)
    entries = bracket_table(t)
    rep = lie_audit(entries, t)
    assert rep.ok, rep.violations


def test_nested_brackets_vanish_even(s2):
    for e in bracket_table(s2):
        assert marking(s2, e.result).is_zero()


def test_sign_fault_detected(s3):
    entries = bracket_table(s3)
    k = next(i for i, e in enumerate(entries) if not e.vanishes and e.order != 2)
    bad = list(entries)
    bad[k] = replace(entries[k], result=-entries[k].result)
    rep = lie_audit(bad, s3)
    assert any("antisymmetry" in v for v in rep.violations)


def test_antisymmetry_sign(s3):
    a, b = s3.generator_class("e(a⊗u)"), s3.generator_class("e(a⊗u^3)")
    ab, ba = string_bracket(s3, a, b), string_bracket(s3, b, a)
    node = s3[ab.degree]
    assert node.is_zero(ab + (-ba))
