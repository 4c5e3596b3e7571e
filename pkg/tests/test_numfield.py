#!/usr/bin/env python3
"""
Tests for cyclotomic field arithmetic and prime splitting in K+
"""
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.numfield import (
    FieldContext,
    FieldElement,
    FieldError,
    field_arith,
    galois_apply,
    get_context,
    norm_to_Q,
    rational_valuation,
    reduce_mod,
    split_prime,
    valuation,
)


def test_field_basics():
    """zeta^7 = 1 and w satisfies t^3 + t^2 - 2t - 1."""
    print("Testing field basics...")
    ctx = get_context(7)
    assert ctx.degree == 6
    assert ctx.kplus_degree == 3
    assert ctx.zeta ** 7 == 1
    w = ctx.w
    assert (w ** 3 + w ** 2 - 2 * w - 1).is_zero()
    assert ctx.w_minpoly == [-1, -2, 1, 1]
    x = 1 - ctx.zeta
    assert field_arith('mul', x, field_arith('inv', x)) == 1
    with pytest.raises(ZeroDivisionError):
        ctx.zero.inverse()
    print("✓ Field basics")


def test_context_flags():
    print("\nTesting subfield flags...")
    assert get_context(7).has_k0 and not get_context(7).has_k
    assert get_context(13).has_k0 and get_context(13).has_k
    assert not get_context(11).has_k0 and not get_context(11).has_k
    with pytest.raises(FieldError):
        FieldContext(5)
    with pytest.raises(FieldError):
        FieldContext(9)
    print("✓ Subfield flags")


def test_galois_action():
    print("\nTesting Galois action...")
    ctx = get_context(7)
    x = ctx.zeta_power(1) + ctx.zeta_power(2)
    assert galois_apply(-1, x) == ctx.zeta_power(-1) + ctx.zeta_power(-2)
    ctx13 = get_context(13)
    assert ctx13.sigma(3, ctx13.w) == ctx13.cos_sum(pow(ctx13.g, 3, 13))
    assert ctx13.g == 2
    assert ctx13.sigma(3, ctx13.w) == ctx13.cos_sum(5)
    with pytest.raises(FieldError):
        x.galois(7)
    other = get_context(11).one
    with pytest.raises(FieldError):
        ctx.one + other
    print("✓ Galois action")


def test_norms():
    print("\nTesting norms...")
    ctx = get_context(7)
    assert norm_to_Q(ctx.one) == 1
    assert norm_to_Q(1 - ctx.zeta) == 7
    assert abs(norm_to_Q(ctx.parse_z('z^2+z-3'), over='K+')) == 13
    assert abs(ctx.pi_r.generator.norm_kplus()) == 7
    print("✓ Norms")


def test_z_coordinates():
    print("\nTesting z-polynomial round trip...")
    ctx = get_context(7)
    assert ctx.z == -ctx.w
    assert ctx.format_z(ctx.parse_z('z^2+z-3')) == 'z^2+z-3'
    assert ctx.to_z_poly(ctx.parse_z('-2z^2+3z+4')) == [Fraction(4), Fraction(3), Fraction(-2)]
    assert ctx.z_minpoly == [1, -2, -1, 1]
    print("✓ z coordinates")


def test_split_prime_r7():
    """2 and 3 are inert; 13 and 41 split completely."""
    print("\nTesting prime splitting for r=7...")
    ctx = get_context(7)
    two = split_prime(ctx, 2)
    assert len(two) == 1
    assert two[0].residue_degree == 3
    assert two[0].label == 'P2'
    assert split_prime(ctx, 3)[0].label == 'P3'

    for q, generators in ((13, ('z^2+z-3', '-z^2+2z+2', '2z^2-z-2')),
                          (41, ('-z^2-2z+4', '-2z^2+3z+4', '-3z^2+z+3'))):
        ideals = split_prime(ctx, q)
        assert len(ideals) == 3
        assert all(P.residue_degree == 1 and P.norm == q for P in ideals)
        keys = {P.key for P in ideals}
        named = {ctx.prime_from_generator(q, g).key for g in generators}
        assert named == keys
    with pytest.raises(FieldError):
        split_prime(ctx, 7)
    with pytest.raises(FieldError):
        ctx.prime_from_generator(13, 'z+1')
    print("✓ Prime splitting")


def test_valuation_and_reduction():
    print("\nTesting valuations and reduction...")
    ctx = get_context(7)
    P = ctx.prime_from_generator(13, 'z^2+z-3')
    assert valuation(ctx.one, P) == 0
    assert valuation(ctx.from_rational(13), P) == 1
    assert valuation(ctx.from_rational(169), P) == 2
    assert reduce_mod(ctx.from_rational(13), P) == 0
    assert reduce_mod(ctx.from_rational(20), P) == 7
    assert reduce_mod(P.generator, P) == 0
    with pytest.raises(FieldError):
        valuation(ctx.zero, P)
    with pytest.raises(FieldError):
        reduce_mod(ctx.from_rational(Fraction(1, 13)), P)

    w1, w2, w3 = ctx.cos_sum(1), ctx.cos_sum(2), ctx.cos_sum(3)
    product = (w3 - w2) * (w1 - w3) * (w2 - w1)
    assert valuation(product, ctx.pi_r) == 3
    assert valuation(ctx.from_rational(7), ctx.pi_r) == 3
    print("✓ Valuations")


def test_rational_valuation():
    assert rational_valuation(Fraction(48, 5), 2) == 4
    assert rational_valuation(Fraction(3, 20), 2) == -2
    with pytest.raises(FieldError):
        rational_valuation(0, 3)


def random_element(rng, ctx, den_bound=5):
    while True:
        x = FieldElement(ctx, [rng.randint(-9, 9) for _ in range(ctx.degree)], rng.randint(1, den_bound))
        if not x.is_zero():
            return x


def random_kplus(rng, ctx):
    while True:
        x = ctx.element_from_w([rng.randint(-20, 20) for _ in range(ctx.kplus_degree)])
        if not x.is_zero():
            return x


def test_ring_axioms_on_random_elements():
    print("\nTesting ring axioms on random elements...")
    rng = random.Random(7)
    for r in (7, 11, 13):
        ctx = get_context(r)
        for _ in range(25):
            x, y, z = (random_element(rng, ctx) for _ in range(3))
            assert x * (y + z) == x * y + x * z
            assert (x * y) * z == x * (y * z)
            assert x - x == ctx.zero
            assert x * x.inverse() == ctx.one
            assert (x / y) * y == x
    print("✓ Ring axioms")


def test_galois_maps_are_homomorphisms():
    print("\nTesting Galois homomorphisms...")
    rng = random.Random(11)
    for r in (7, 11, 13):
        ctx = get_context(r)
        for _ in range(20):
            x, y = random_element(rng, ctx), random_element(rng, ctx)
            a, b = rng.randint(1, r - 1), rng.randint(1, r - 1)
            assert galois_apply(a, x + y) == galois_apply(a, x) + galois_apply(a, y)
            assert galois_apply(a, x * y) == galois_apply(a, x) * galois_apply(a, y)
            assert galois_apply(a, galois_apply(b, x)) == galois_apply(a * b, x)
        w = random_kplus(rng, ctx)
        assert galois_apply(-1, w) == w
    print("✓ Galois homomorphisms")


def test_norm_is_multiplicative():
    rng = random.Random(13)
    for r in (7, 11, 13):
        ctx = get_context(r)
        for _ in range(10):
            x, y = random_element(rng, ctx), random_element(rng, ctx)
            assert norm_to_Q(x * y) == norm_to_Q(x) * norm_to_Q(y)
            assert norm_to_Q(x.galois(2)) == norm_to_Q(x)
            u, v = random_kplus(rng, ctx), random_kplus(rng, ctx)
            assert norm_to_Q(u * v, over='K+') == norm_to_Q(u, over='K+') * norm_to_Q(v, over='K+')
            assert norm_to_Q(u) == norm_to_Q(u, over='K+') ** 2


def test_integral_w_combinations():
    rng = random.Random(17)
    for r in (7, 11, 13):
        ctx = get_context(r)
        for _ in range(20):
            x = random_kplus(rng, ctx)
            assert x.in_kplus()
            assert x.is_integral()
            assert x.norm_kplus().denominator == 1


def test_reduction_is_a_ring_map():
    """Reduction at the primes above 13 and at the inert prime above 2, r = 7."""
    print("\nTesting reduction homomorphism...")
    rng = random.Random(23)
    ctx = get_context(7)
    for P in split_prime(ctx, 13) + split_prime(ctx, 2):
        F = P.residue_field
        for _ in range(30):
            x, y = random_kplus(rng, ctx), random_kplus(rng, ctx)
            assert reduce_mod(x + y, P) == F.add(reduce_mod(x, P), reduce_mod(y, P))
            assert reduce_mod(x * y, P) == F.mul(reduce_mod(x, P), reduce_mod(y, P))
            assert reduce_mod(P.lift(reduce_mod(x, P)), P) == reduce_mod(x, P)
    print("✓ Reduction homomorphism")


def test_valuation_is_additive():
    print("\nTesting valuation additivity...")
    rng = random.Random(29)
    ctx = get_context(7)
    for P in split_prime(ctx, 13) + split_prime(ctx, 2) + [ctx.pi_r]:
        for _ in range(15):
            x, y = random_kplus(rng, ctx), random_kplus(rng, ctx)
            x = x * P.generator ** rng.randint(0, 3)
            assert valuation(x * y, P) == valuation(x, P) + valuation(y, P)
            assert valuation(x * P.generator, P) == valuation(x, P) + 1
    print("✓ Valuation additivity")


def main():
    """Run all tests."""
    print("=" * 60)
    print("Number Field Tests")
    print("=" * 60)
    print()

    tests = [
        test_field_basics,
        test_context_flags,
        test_galois_action,
        test_norms,
        test_z_coordinates,
        test_split_prime_r7,
        test_valuation_and_reduction,
        test_rational_valuation,
        test_ring_axioms_on_random_elements,
        test_galois_maps_are_homomorphisms,
        test_norm_is_multiplicative,
        test_integral_w_combinations,
        test_reduction_is_a_ring_map,
        test_valuation_is_additive,
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
    passed = sum(results)
    print(f"Results: {passed}/{len(results)} tests passed")
    print("=" * 60)
    return all(results)


if __name__ == '__main__':
    success = main()
    sys.exit(0 if success else 1)
