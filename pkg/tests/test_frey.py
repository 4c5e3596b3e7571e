#!/usr/bin/env python3
"""
Tests for the Frey-curve families and their descent and conjugation structure
"""
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.frey import (
    FreyConstructionError,
    build_I,
    build_II,
    build_III,
    conjugation_check,
    descend_family,
    descend_to_K0,
    descent_triple,
    family_I,
    family_II,
    family_III,
    get_family,
    kcurve_pair,
    suitable_triples,
)
from modules.numfield import get_context


def test_suitable_triples():
    print("Testing suitable triples...")
    assert suitable_triples(7) == [(1, 2, 3)]
    assert len(suitable_triples(11)) == 10
    assert len(suitable_triples(13)) == 20
    print("✓ Suitable triples")


def test_family_I_identities():
    """alpha f_k1 + beta f_k2 + gamma f_k3 = 0 is checked at build time."""
    print("\nTesting family I identities...")
    for r, triples in ((7, suitable_triples(7)), (11, suitable_triples(11)), (13, [(1, 2, 3), (1, 3, 4), (2, 5, 6)])):
        for triple in triples:
            family = family_I(r, triple)
            A, B, C = family.parts
            assert (A + B + C).is_zero()
            curve = family.at(2, 1)
            assert not curve.singular
            assert curve.model.identity_holds()

    curve = build_I(7, (1, 2, 3), 3, 4)
    formulas = curve.formula_invariants()
    assert formulas['discriminant'] == curve.discriminant
    assert formulas['c4'] == curve.c4
    assert formulas['c6'] == curve.c6
    ctx = curve.ctx
    # 7 | a+b gives v(Delta) = 12 before rescaling
    assert ctx.pi_r.valuation(curve.discriminant) == 12
    with pytest.raises(FreyConstructionError):
        family_I(7, (1, 3, 2))
    with pytest.raises(FreyConstructionError):
        build_I(7, (1, 2, 3), 0, 0)
    print("✓ Family I")


def test_family_I_galois_equivariance():
    curve = build_I(7, (1, 2, 3), 2, 1)
    conjugate = curve.galois(3)
    assert conjugate.discriminant == curve.discriminant.galois(3)
    assert conjugate.c4 == curve.c4.galois(3)


def test_descent_triple():
    print("\nTesting descent triples...")
    assert descent_triple(7) == (1, 2, 3)
    assert descent_triple(13) == (1, 3, 4)
    triple = descent_triple(19)
    assert max(triple) <= 9
    with pytest.raises(FreyConstructionError):
        descent_triple(11)
    print("✓ Descent triples")


def test_descent_to_Q():
    """r = 7: a4 = -3024 (a^4 - a^3 b + 3a^2 b^2 - a b^3 + b^4)."""
    print("\nTesting descent to Q for r=7...")
    family = descend_family(family_I(7, (1, 2, 3)))
    assert family.base_field == 'Q'
    assert family.descended

    def a4(a, b):
        return -3024 * (a ** 4 - a ** 3 * b + 3 * a ** 2 * b ** 2 - a * b ** 3 + b ** 4)

    def a6(a, b):
        return 12096 * (a ** 6 - 15 * a ** 5 * b + 15 * a ** 4 * b ** 2 - 29 * a ** 3 * b ** 3
                        + 15 * a ** 2 * b ** 4 - 15 * a * b ** 5 + b ** 6)

    curve = family.at(0, 1)
    assert curve.model.a4 == -3024
    assert curve.model.a6 == 12096
    for a, b in ((0, 1), (1, 1), (1, -1), (2, 1), (3, -5)):
        model = family.at(a, b).model
        assert model.a4 == Fraction(a4(a, b))
    for a, b in ((0, 1), (1, 1), (1, -1)):
        assert family.at(a, b).model.a6 == Fraction(a6(a, b))

    descended = descend_to_K0(build_I(7, (1, 2, 3), 2, 1))
    assert descended.model.identity_holds()
    with pytest.raises(FreyConstructionError):
        descend_family(family_II(7, (1, 2)))
    with pytest.raises(FreyConstructionError):
        descend_family(family_I(13, (1, 2, 3)))
    print("✓ Descent")


def test_family_II():
    print("\nTesting family II...")
    ctx = get_context(7)
    family = family_II(7, (1, 2))
    assert family.coefficients.alpha == ctx.parse_z('z^2+z-2')
    assert family.coefficients.beta == ctx.parse_z('-z^2+4')
    assert family.coefficients.gamma == ctx.parse_z('-z-2')

    assert build_II(7, (1, 2), 1, -1).singular
    curve = build_II(7, (1, 2), 3, 4)
    assert not curve.singular
    assert curve.model.identity_holds()
    assert curve.formula_invariants()['discriminant'] == curve.discriminant
    print("✓ Family II")


def test_kcurve_pair():
    print("\nTesting k-curve pairs...")
    assert kcurve_pair(13, 1) == (1, 5)
    assert kcurve_pair(13, 5) == (5, 1)
    k1, n2 = kcurve_pair(17, 1)
    ctx = get_context(17)
    assert ctx.sigma((17 - 1) // 4, ctx.cos_sum(k1)) == ctx.cos_sum(n2)
    with pytest.raises(FreyConstructionError):
        kcurve_pair(7, 1)
    print("✓ k-curve pairs")


def test_family_III():
    print("\nTesting family III...")
    ctx = get_context(13)
    for sign in ('+', '-'):
        family = family_III(13, 1, sign)
        assert family.indices == (1, 5)
        curve = family.at(2, 1)
        assert curve.model.identity_holds()
        formulas = curve.formula_invariants()
        assert formulas['discriminant'] == curve.discriminant
        assert formulas['c4'] == curve.c4
        assert formulas['c6'] == curve.c6

    curve = build_III(13, 1, '+', 1, -1)
    assert curve.model.a2 == 0
    assert not curve.singular
    alpha = family_III(13, 1, '+').coefficients.alpha
    assert ctx.pi_r.valuation(alpha) == 0
    print("✓ Family III")


def test_conjugation_check():
    print("\nTesting conjugation structure...")
    report = conjugation_check(family_II(13, (1, 5)))
    assert report.ok
    assert report.m == 3

    report = conjugation_check(build_III(13, 1, '+', 2, 1))
    assert report.checks['j(isogenous image) = j(E)']
    assert report.valuations_at_pi == {'alpha': 0, 'beta': 0}

    with pytest.raises(FreyConstructionError):
        conjugation_check(family_II(13, (1, 2)))
    with pytest.raises(FreyConstructionError):
        conjugation_check(family_II(7, (1, 2)))
    print("✓ Conjugation")


def test_get_family_cache():
    assert get_family(7, 'II', (1, 2)) is get_family(7, 'II', (1, 2))
    with pytest.raises(FreyConstructionError):
        get_family(7, 'IV', (1, 2))


PRIMES = (7, 11, 13, 17, 19)


def test_family_I_every_suitable_triple():
    """Every suitable triple up to r = 19 satisfies the linear relation and the closed formulas."""
    print("\nTesting family I for every suitable triple...")
    for r in PRIMES:
        triples = suitable_triples(r)
        assert len(triples) == math.comb((r - 1) // 2, 3)
        for triple in triples:
            family = family_I(r, triple)
            A, B, C = family.parts
            assert (A + B + C).is_zero(), (r, triple)
            curve = family.at(2, 1)
            assert curve.model.identity_holds(), (r, triple)
            assert curve.formula_invariants()['discriminant'] == curve.discriminant, (r, triple)
    print("✓ Every suitable triple")


def test_invariant_identity_on_random_curves():
    """c4^3 - c6^2 = 1728 Delta on a thousand random coprime pairs across the families."""
    print("\nTesting c4^3 - c6^2 = 1728 Delta on random curves...")
    rng = random.Random(1728)
    families = [
        descend_family(family_I(7, (1, 2, 3))),
        family_I(7, (1, 2, 3)),
        family_I(11, (1, 3, 4)),
        family_II(7, (1, 2)),
        family_III(13, 1, '+'),
        family_III(13, 1, '-'),
    ]
    checked = 0
    while checked < 1000:
        a, b = rng.randint(-10 ** 4, 10 ** 4), rng.randint(-10 ** 4, 10 ** 4)
        if math.gcd(a, b) != 1:
            continue
        family = families[checked % len(families)]
        model = family.at(a, b).model
        c4, c6 = model.c4, model.c6
        assert c4 * c4 * c4 - c6 * c6 == 1728 * model.discriminant, (family.label, a, b)
        checked += 1
    print("✓ Invariant identity")


def test_galois_equivariance_of_invariants():
    for family in (family_II(7, (1, 2)), family_III(13, 1, '+')):
        curve = family.at(3, 2)
        for a in (2, 3):
            conjugate = curve.galois(a)
            assert conjugate.discriminant == curve.discriminant.galois(a)
            assert conjugate.c4 == curve.c4.galois(a)
            assert conjugate.c6 == curve.c6.galois(a)


def main():
    """Run all tests."""
    print("=" * 60)
    print("Frey Curve Tests")
    print("=" * 60)
    print()

    tests = [
        test_suitable_triples,
        test_family_I_identities,
        test_family_I_galois_equivariance,
        test_descent_triple,
        test_descent_to_Q,
        test_family_II,
        test_kcurve_pair,
        test_family_III,
        test_conjugation_check,
        test_get_family_cache,
        test_family_I_every_suitable_triple,
        test_invariant_identity_on_random_curves,
        test_galois_equivariance_of_invariants,
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
