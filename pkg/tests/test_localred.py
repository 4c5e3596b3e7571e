#!/usr/bin/env python3
"""
Tests for local reduction data, Tate's algorithm and conductor tables
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.frey import build_I, build_II, descend_family, family_I, family_II, family_III
from modules.localred import (
    Char2Lookup,
    LocalDataError,
    char2_table_lookup,
    conductor_profile,
    divisibility_category,
    enumerate_conductor_classes,
    local_data,
    phi_group_order,
    projective_point,
    tate_Q,
)
from modules.numfield import prime_factors


def descended():
    return descend_family(family_I(7, (1, 2, 3)))


def test_char2_table():
    print("Testing char-2 valuation table...")
    assert char2_table_lookup(4, 5, 4) == Char2Lookup('candidates', frozenset({2, 3, 4}))
    assert char2_table_lookup(9, 5, 4).candidates == {2, 3, 4}
    assert char2_table_lookup(8, 11, 16).status == 'non-minimal'
    assert char2_table_lookup(4, 6, 6).candidates == {5, 6}
    assert char2_table_lookup(4, 6, 8).status == 'non-minimal-or-candidates'
    assert char2_table_lookup(0, 0, 1).status == 'outside-table'
    print("✓ Char-2 table")


def test_local_data_at_pi():
    print("\nTesting local data at pi_7...")
    # 7 does not divide a+b: additive, exponent 2
    data = local_data(build_I(7, (1, 2, 3), 1, 0), 7)
    assert data.reduction_type == 'additive'
    assert data.exponent == 2

    # 7 | a+b: good after one rescaling
    data = local_data(build_I(7, (1, 2, 3), 3, 4), 7)
    assert data.valuations[0] == 0
    assert data.rescalings == 1
    assert data.exponent == 0

    data = local_data(build_II(7, (1, 2), 3, 4), 7)
    assert data.reduction_type == 'multiplicative'
    assert data.exponent == 1

    with pytest.raises(LocalDataError):
        local_data(build_II(7, (1, 2), 1, -1), 7)
    print("✓ Local data at pi")


def test_tate_Q_at_two():
    """Conductor exponents 2, 3, 4 of E(0,1), E(1,-1), E(1,1) at 2."""
    print("\nTesting Tate's algorithm at 2...")
    family = descended()
    assert tate_Q(family.at(0, 1), 2).exponent == 2
    assert tate_Q(family.at(1, -1), 2).exponent == 3
    assert tate_Q(family.at(1, 1), 2).exponent == 4
    with pytest.raises(LocalDataError):
        tate_Q(build_I(7, (1, 2, 3), 2, 1), 2)
    print("✓ Tate at 2")


def test_tate_agrees_with_valuations():
    family = descended()
    for a, b in ((2, 1), (3, 1), (3, 2), (5, 2)):
        curve = family.at(a, b)
        factors, _ = prime_factors(Fraction(curve.discriminant).numerator)
        for p in factors:
            if p < 5:
                continue
            assert local_data(curve, p).exponent == tate_Q(curve, p).exponent


def test_rescaling_invariance():
    model = descended().at(2, 1).model
    scaled = model.scaled(Fraction(1, 5))
    assert local_data(scaled, 5).exponent == local_data(model, 5).exponent == 0
    assert local_data(scaled, 5).rescalings == 1
    assert local_data(scaled, 43).exponent == 1


def test_phi_group_order():
    print("\nTesting component-group order at 7...")
    family = descended()
    assert phi_group_order(family.at(1, -1), 7) == 3
    assert phi_group_order(family.at(0, 1), 7) == 6
    assert phi_group_order(family.at(0, 1), 5) == 1
    with pytest.raises(LocalDataError):
        phi_group_order(family.at(2, 1), 43)
    print("✓ Component-group order")


def test_conductor_profile():
    print("\nTesting conductor profiles...")
    profile = conductor_profile(descended().at(2, 1))
    assert profile.entries['43'].reduction_type == 'multiplicative'
    assert profile.entries['43'].exponent == 1
    assert profile.entries['7'].exponent == 2
    assert '43^1' in profile.assembled

    curve = build_II(7, (1, 2), 1, 3)
    profile = conductor_profile(curve, support=[2, 7])
    assert profile.entries['P2'].exponent in (0, 1)
    assert profile.entries['pi'].exponent == 2
    print("✓ Conductor profiles")


def test_divisibility_category():
    assert divisibility_category(0, 1) == '2∤a+b, 4|even'
    assert divisibility_category(2, 1) == '2∤a+b, 2‖even'
    assert divisibility_category(1, 1) == '2‖a+b'
    assert divisibility_category(1, 3) == '4|a+b'


def test_enumerate_conductor_classes():
    """Exponent at 2 per divisibility class of (a, b)."""
    print("\nTesting conductor enumeration mod 8...")
    table = enumerate_conductor_classes(descended(), modulus_exponent=3)
    assert len(table.rows) == 48
    assert table.categories() == {
        '2∤a+b, 2‖even': frozenset({3}),
        '2∤a+b, 4|even': frozenset({2}),
        '2‖a+b': frozenset({4}),
        '4|a+b': frozenset({3}),
    }
    assert not table.unstable
    assert 'unstable classes: 0' in table.to_text()
    print("✓ Conductor enumeration")


DESCENDED_EXPONENTS_AT_2 = {
    '2∤a+b, 2‖even': frozenset({3}),
    '2∤a+b, 4|even': frozenset({2}),
    '2‖a+b': frozenset({4}),
    '4|a+b': frozenset({3}),
}


def test_projective_point():
    assert projective_point(3, 5, 16) == (1, 5 * 11 % 16)
    assert projective_point(6, 7, 16) == (6 * 7 % 16, 1)
    assert projective_point(1, 0, 8) == (1, 0)
    assert projective_point(0, 5, 8) == (0, 1)


def test_scaling_invariant_families():
    assert descended().scaling_invariant
    assert family_I(7, (1, 2, 3)).scaling_invariant
    assert family_II(7, (1, 2)).scaling_invariant
    # a2 = 2(a+b) has degree 1: scaling is a quadratic twist
    assert not family_III(13, 1, '+').scaling_invariant


def test_conductor_classes_mod_256():
    """The 2-adic exponent of the descended curve depends only on the divisibility class."""
    print("\nTesting conductor enumeration mod 2^8...")
    table = enumerate_conductor_classes(descended(), modulus_exponent=8)
    assert len(table.rows) == 3 * 4 ** 7
    assert table.categories() == DESCENDED_EXPONENTS_AT_2
    assert not table.unstable
    exponents = {(row.x, row.y): row.exponents[0] for row in table.rows}
    assert exponents[(0, 1)] == 2
    assert exponents[(1, 255)] == 3
    assert exponents[(1, 1)] == 4
    print("✓ Conductor enumeration mod 2^8")


def test_conductor_classes_stable_to_512():
    coarse = enumerate_conductor_classes(descended(), modulus_exponent=8)
    fine = enumerate_conductor_classes(descended(), modulus_exponent=9)
    assert not fine.unstable
    assert fine.categories() == coarse.categories()
    exponents = {(row.x, row.y): row.exponents[0] for row in coarse.rows}
    for row in fine.rows:
        assert row.exponents[0] == exponents[(row.x % 256, row.y % 256)]


def family_II_category(a: int, b: int) -> str:
    s = a + b
    if s % 4 == 0:
        return '4|a+b'
    if s % 2 == 0:
        return '2‖a+b'
    return '2∤a+b, 4|a' if a % 4 == 0 else '2∤a+b, 4∤a'


def test_family_II_exponents_at_P2():
    """Family II (1, 2) at the inert prime above 2, classes mod 2^8."""
    print("\nTesting family II exponents at P2...")
    table = enumerate_conductor_classes(family_II(7, (1, 2)), modulus_exponent=8)
    assert table.place == 'P2'
    assert not table.unstable

    seen = {}
    for row in table.rows:
        seen.setdefault(family_II_category(row.x, row.y), set()).update(row.exponents)
    assert set(seen) == {'4|a+b', '2‖a+b', '2∤a+b, 4|a', '2∤a+b, 4∤a'}
    assert seen['4|a+b'] <= {0, 1}
    assert seen['2‖a+b'] <= {0, 1, 4}
    assert seen['2∤a+b, 4∤a'] <= {3, 4}
    assert seen['2∤a+b, 4|a'] == {3}
    print("✓ Family II at P2")


def test_conductor_classes_without_scaling():
    table = enumerate_conductor_classes(family_III(13, 1, '+'), modulus_exponent=1)
    assert [(row.x, row.y) for row in table.rows] == [(0, 1), (1, 0), (1, 1)]
    for row in table.rows:
        assert len(row.exponents) == 4
        assert all(0 <= e <= 8 for e in row.exponents)


def main():
    """Run all tests."""
    print("=" * 60)
    print("Local Reduction Tests")
    print("=" * 60)
    print()

    tests = [
        test_char2_table,
        test_local_data_at_pi,
        test_tate_Q_at_two,
        test_tate_agrees_with_valuations,
        test_rescaling_invariance,
        test_phi_group_order,
        test_conductor_profile,
        test_divisibility_category,
        test_enumerate_conductor_classes,
        test_projective_point,
        test_scaling_invariant_families,
        test_conductor_classes_mod_256,
        test_conductor_classes_stable_to_512,
        test_family_II_exponents_at_P2,
        test_conductor_classes_without_scaling,
    ]
    results = []
    for test in tests:
        try:
            test()
            results.append(True)
        except Exception as e:
            print(f"❌ {test.__name__} failed: {e}")
            results.append(False)

    print("\n" + "=" * 60)
    print(f"Results: {sum(results)}/{len(results)} tests passed")
    print("=" * 60)
    return all(results)


if __name__ == '__main__':
    success = main()
    sys.exit(0 if success else 1)
