import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hecke_sep.combinat import (
    WeightDecomposition,
    binom,
    binom_lemma_cases,
    carry_valuation,
    check_binom_divisibility_lemma,
    delta_coeff,
    gamma_coeff,
    lucas_residue,
    reduction_coeffs,
    vp_binom,
)


def pascal(n):
    row = [1]
    for _ in range(n):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row


def test_binom_values():
    assert binom(5, 2) == 10
    assert binom(17, 0) == 1
    assert binom(100, 50) == pascal(100)[50]
    assert binom(100, 50).bit_length() == 97


def test_carry_examples():
    assert carry_valuation(2, 5, 2) == 1
    assert carry_valuation(3, 9, 3) == 1
    assert carry_valuation(7, 40, 0) == 0


def test_lucas_examples():
    assert lucas_residue(3, 7, 4) == 2 == 35 % 3
    assert lucas_residue(5, 3, 4) == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_kummer_and_lucas_match_exact_binomials(p):
    for n in range(201):
        for k in range(n + 1):
            exact = math.comb(n, k)
            assert carry_valuation(p, n, k) == vp_binom(p, n, k)
            assert lucas_residue(p, n, k) == exact % p


@pytest.mark.parametrize("p", [3, 5])
def test_lucas_on_digit_pairs(p):
    q = p
    for d in range(1, p):
        for r in range(q):
            for i in range(r + 2):
                for l in range(d + 1):
                    for m in range(l, l + q):
                        n, k = d * q + r - i + 1, l * q + (m - l)
                        if not 0 <= r - i + 1 < q:  # low digit must not carry
                            continue
                        want = math.comb(d, l) * math.comb(r - i + 1, m - l) % p
                        assert lucas_residue(p, n, k) == want


def test_divisibility_lemma_examples():
    assert check_binom_divisibility_lemma(4, 1, 1) is None
    assert math.comb(5, 2) % 2 == 0 and math.comb(4, 2) % 2 == 0
    assert check_binom_divisibility_lemma(3, 2, 0) is None
    assert check_binom_divisibility_lemma(7, 0, 3) is None


def test_divisibility_lemma_rejects_bad_hypotheses():
    with pytest.raises(ValueError):
        check_binom_divisibility_lemma(3, 2, 1)


def test_divisibility_lemma_all_small_q():
    cases = binom_lemma_cases(16)
    assert len(cases) == 436
    assert all(check_binom_divisibility_lemma(*c) is None for c in cases)


def test_lemma_is_sharp_just_outside_its_range():
    # outside r < q - d some binomial in the range is a unit mod p,
    # which is why the checker refuses such triples
    k, q, p = 2 * 3 + 2, 3, 3
    found = any(
        math.comb(k - i, k - j - l * (q - 1)) % p
        for i in range(3)
        for j in range(3)
        for l in range(j + 1, 3)
        if k - j - l * (q - 1) >= 0
    )
    assert found


def test_reduction_coefficient_examples():
    assert delta_coeff(2, 0, 1) == -1
    assert reduction_coeffs("delta", 2, 0, 1) == -1
    for d in range(5):
        assert gamma_coeff(1, d + 1, d) == d + 1
        for m in range(d + 1, d + 6):
            assert delta_coeff(m, d, d) == math.comb(m, d)
    with pytest.raises(ValueError):
        reduction_coeffs("epsilon", 1, 2, 3)


@given(st.integers(0, 500), st.sampled_from([2, 3, 4, 5, 7, 8, 9, 16, 25, 27]))
def test_weight_decomposition(k, q):
    w = WeightDecomposition(k, q)
    assert w.d * q + w.r == k and 0 <= w.r < q
    assert q % w.p == 0
