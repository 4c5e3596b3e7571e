#!/usr/bin/env python3
"""
Tests for phi_r, its quadratic factors and solution classification
"""
import math
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.diophantine import (
    BinaryForm,
    DiophantineError,
    classify_solution,
    factor_coprimality_report,
    phi_eval,
    phi_form,
    quadratic_factors,
    search_trivial,
    square_sum_obstructions,
)
from modules.numfield import get_context

TRIVIAL_PAIRS = sorted([(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)])


def test_phi_values():
    print("Testing phi_r values...")
    assert phi_eval(7, 1, 1) == 1
    assert phi_eval(7, 1, -1) == 7
    assert phi_eval(7, 2, 1) == 43
    assert phi_eval(7, 3, 4) == 2653
    assert phi_eval(7, 3, 4) % 7 == 0
    with pytest.raises(DiophantineError):
        phi_eval(9, 1, 2)
    print("✓ phi_r values")


def test_phi_cofactor_identity():
    for r in (7, 11, 13, 17, 19):
        for a, b in ((2, 1), (3, -5), (7, 4)):
            assert (a + b) * phi_eval(r, a, b) == a ** r + b ** r


def test_quadratic_factors_multiply_to_phi():
    print("\nTesting quadratic factorization of phi_r...")
    ctx = get_context(7)
    forms = quadratic_factors(ctx)
    assert len(forms) == 3
    product = forms[0] * forms[1] * forms[2]
    assert product == phi_form(7).map(ctx.from_rational)
    assert phi_form(7).coefficients == (1, -1, 1, -1, 1, -1, 1)

    ctx13 = get_context(13)
    forms13 = quadratic_factors(ctx13)
    assert len(forms13) == 6
    assert all(f.v.in_kplus() for f in forms13)
    print("✓ Quadratic factors")


def test_binary_form_evaluation():
    f = BinaryForm([1, 2, 1])
    assert f.evaluate(3, -1) == 4
    assert (f * f).degree == 4


def test_classify_solution():
    print("\nTesting solution classification...")
    trivial = classify_solution(7, 2, 5, 1, 1, 1)
    assert trivial.trivial
    assert trivial.case == 'A'
    assert trivial.phi == 1

    sol = classify_solution(7, 3, 1, 2, 1, 43)
    assert sol.case == 'A'
    assert sol.phi == 43
    assert sol.sum_root == 1
    assert sol.phi_support == {43: 1}
    assert sol.support_ok

    zero = classify_solution(7, 3, 5, 1, -1, 0)
    assert zero.trivial
    assert zero.case == 'B'

    with pytest.raises(DiophantineError):
        classify_solution(7, 1, 2, 2, 1, 11)
    with pytest.raises(DiophantineError):
        classify_solution(7, 1, 3, 2, 4, 2)
    with pytest.raises(DiophantineError):
        # 43 is 1 mod 7
        classify_solution(7, 43, 1, 2, 1, 3)
    print("✓ Classification")


def test_search_trivial():
    print("\nTesting trivial-solution search...")
    for r, height in ((7, 1), (7, 20), (11, 12)):
        result = search_trivial(r, height)
        assert result.pairs == TRIVIAL_PAIRS
        assert result.r_pairs == [(-1, 1), (1, -1)]
    print("✓ Trivial search")


def test_coprimality_report():
    print("\nTesting coprimality report...")
    report = factor_coprimality_report(7, 2, 1)
    assert report.pairwise_ok
    assert report.offending_primes == []
    assert report.lambda_valuations is None
    assert report.ok

    report = factor_coprimality_report(7, 3, 4)
    assert report.phi_r_valuation == 1
    assert report.lambda_valuations == [1] * 6
    assert report.ok
    with pytest.raises(DiophantineError):
        factor_coprimality_report(7, 2, 4)
    print("✓ Coprimality")


def test_square_sum_obstructions():
    assert square_sum_obstructions() == {3: False, 4: False, 7: False}
    assert square_sum_obstructions((5, 13)) == {5: True, 13: True}


def test_search_trivial_wide_box():
    """No nontrivial phi_7 in {1, 7} with |a|, |b| <= 1000."""
    print("\nTesting trivial-solution search at H=1000...")
    result = search_trivial(7, 1000, workers=4)
    assert result.pairs == TRIVIAL_PAIRS
    assert result.r_pairs == [(-1, 1), (1, -1)]
    print("✓ Wide trivial search")


def test_phi_form_times_sum_is_binomial():
    for r in (3, 5, 7, 11, 13, 17, 19):
        assert BinaryForm([1, 1]) * phi_form(r) == BinaryForm([1] + [0] * (r - 1) + [1])


def test_quadratic_factors_on_random_pairs():
    """prod f_k(a, b) = phi_r(a, b) in K+ for random coprime pairs."""
    print("\nTesting factor products on random pairs...")
    rng = random.Random(19)
    for r in (7, 11, 13, 17, 19):
        ctx = get_context(r)
        forms = quadratic_factors(ctx)
        checked = 0
        while checked < 200:
            a, b = rng.randint(-1000, 1000), rng.randint(-1000, 1000)
            if math.gcd(a, b) != 1 or a + b == 0:
                continue
            product = ctx.one
            for f in forms:
                product = product * f.evaluate(a, b)
            assert product == ctx.from_rational(phi_eval(r, a, b)), (r, a, b)
            checked += 1
    print("✓ Factor products")


def test_coprimality_report_negative_entries():
    for a, b in ((3, -5), (-2, 1), (-7, 4), (5, -12), (0, -1)):
        report = factor_coprimality_report(7, a, b)
        assert report.pairwise_ok, (a, b)

    report = factor_coprimality_report(7, -3, -4)
    assert report.pairwise_ok
    assert report.phi_r_valuation == 1
    assert report.ok


def main():
    """Run all tests."""
    print("=" * 60)
    print("Diophantine Tests")
    print("=" * 60)
    print()

    tests = [
        test_phi_values,
        test_phi_cofactor_identity,
        test_quadratic_factors_multiply_to_phi,
        test_binary_form_evaluation,
        test_classify_solution,
        test_search_trivial,
        test_coprimality_report,
        test_square_sum_obstructions,
        test_search_trivial_wide_box,
        test_phi_form_times_sum_is_binomial,
        test_quadratic_factors_on_random_pairs,
        test_coprimality_report_negative_entries,
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
