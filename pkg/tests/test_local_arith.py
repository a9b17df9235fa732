import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hecke_sep.local_arith import (
    INF,
    digit_split,
    digits_to_elem,
    elem_to_digits,
    enum_digits,
    inv,
    is_irreducible_fp,
    make_ring,
    minimal_irreducible,
    power_sum,
    prime_power_decompose,
    teichmuller,
    valuation,
)

from conftest import RING_PARAMS, elems, rings_st


@st.composite
def ring_and_elems(draw, n=3):
    ring = draw(rings_st)
    return (ring,) + tuple(draw(elems(ring)) for _ in range(n))


def test_rational_ring_is_integers_mod_2_to_8():
    R = make_ring(2, 1, 1, 8)
    assert R.modulus == 256 and R.q == 2
    assert R.from_int(255) + 1 == 0


def test_quadratic_unramified_ring_uses_x2_plus_1():
    R = make_ring(3, 2, 1, 6)
    assert R.q == 9
    assert R.unramified_minpoly == (1, 0, 1)
    assert is_irreducible_fp(R.unramified_minpoly, 3)


def test_ramified_uniformizer_squares_to_two():
    R = make_ring(2, 1, 2, 8)
    assert R.uniformizer * R.uniformizer == 2
    assert valuation(R.from_int(2)) == 2


def test_inverse_of_three_mod_256():
    R = make_ring(2, 1, 1, 8)
    assert inv(R.from_int(3)) == 171


def test_inverting_a_non_unit_raises():
    R = make_ring(3, 1, 1, 4)
    with pytest.raises(ZeroDivisionError):
        inv(R.from_int(3))


def test_mixed_rings_rejected():
    with pytest.raises(ValueError):
        make_ring(2, 1, 1, 8).one + make_ring(3, 1, 1, 8).one


@pytest.mark.parametrize("args", [(4, 1, 1, 4), (2, 1, 2, 3), (3, 1, 1, 0)])
def test_bad_ring_parameters(args):
    with pytest.raises(ValueError):
        make_ring(*args)


def test_valuation_sentinel_and_units():
    R = make_ring(3, 1, 1, 5)
    assert valuation(R.zero) == INF
    assert valuation(R.pi_pow(2) * 7) == 2
    assert valuation(R.from_int(3**5)) == INF


def test_teichmuller_of_two_mod_nine():
    R = make_ring(3, 1, 1, 2)
    assert teichmuller(R.residue(2)) == 8
    assert teichmuller(R.residue(1)) == 1
    assert teichmuller(R.residue(0)) == 0


def test_minimal_irreducible_is_lexicographically_first():
    for p, f in [(2, 2), (2, 3), (3, 2), (5, 2)]:
        g = minimal_irreducible(p, f)
        assert is_irreducible_fp(g, p)
        for c in itertools.product(range(p), repeat=f):
            cand = tuple(c) + (1,)
            if cand == g:
                break
            assert not is_irreducible_fp(cand, p)


def test_prime_power_decompose():
    assert prime_power_decompose(16) == (2, 4)
    assert prime_power_decompose(9) == (3, 2)
    with pytest.raises(ValueError):
        prime_power_decompose(12)


@given(ring_and_elems())
def test_ring_axioms(data):
    R, x, y, z = data
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert (x + y) - y == x


@given(ring_and_elems(2))
def test_valuation_laws(data):
    R, x, y = data
    total = valuation(x) + valuation(y)
    assert valuation(x * y) == (total if total < R.P else INF)
    assert valuation(x + y) >= min(valuation(x), valuation(y))


@given(ring_and_elems(1))
def test_unit_inverse(data):
    R, x = data
    if x.is_unit():
        assert x * x.inverse() == 1


@given(st.sampled_from([p for p in RING_PARAMS if p[2] == 1 and p[1] == 1]), st.integers(), st.integers())
def test_matches_big_integers_when_unramified_over_qp(params, a, b):
    R = make_ring(*params)
    m = R.modulus
    assert (R.from_int(a) * R.from_int(b)).coords[0] == (a * b) % m
    assert (R.from_int(a) + R.from_int(b)).coords[0] == (a + b) % m


@pytest.mark.parametrize("params", RING_PARAMS)
def test_teichmuller_is_multiplicative_section(params):
    R = make_ring(*params)
    for i in range(R.q):
        t = R.teichmuller_index(i)
        assert t ** R.q == t
        assert t.residue() == R.residue(i)
        for j in range(R.q):
            prod = R.residue(i) * R.residue(j)
            assert R.teichmuller_index(prod.index) == t * R.teichmuller_index(j)


def test_residue_field_satisfies_frobenius():
    R = make_ring(2, 3, 1, 4)
    for lam in R.residues():
        assert lam ** R.q == lam


def test_digit_sets():
    R = make_ring(2, 1, 1, 4)
    assert enum_digits(R, 0) == [()]
    assert sorted(digits_to_elem(R, d).coords[0] for d in enum_digits(R, 2)) == [0, 1, 2, 3]
    R3 = make_ring(3, 2, 1, 4)
    assert len(enum_digits(R3, 3)) == 9**3
    with pytest.raises(ValueError):
        enum_digits(R, 5)


def test_digit_split_and_round_trip():
    R = make_ring(3, 1, 1, 4)
    assert digit_split((1, 2), 1) == ((1,), 2)
    assert digit_split((0, 0, 0), 2) == ((0, 0), 0)
    for mu in enum_digits(R, 3):
        assert elem_to_digits(digits_to_elem(R, mu), 3) == mu
        head, last = digit_split(mu, 2)
        assert digits_to_elem(R, head) + R.pi_pow(2) * R.teichmuller_index(last) == digits_to_elem(R, mu)


def test_power_sum_examples():
    R = make_ring(3, 1, 1, 4)
    # [2] = -1 exactly, so the squares sum to 0 + 1 + 1
    assert power_sum(R, 2) == 2
    assert (power_sum(R, 2) + 1).valuation() >= 1
    assert power_sum(R, 1) == 0
    assert power_sum(R, 0) == 3


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)])
def test_power_sum_mod_pi(p, f):
    R = make_ring(p, f, 1, 3)
    q = R.q
    for i in range(3 * (q - 1) + 1):
        expected = -1 if i > 0 and i % (q - 1) == 0 else 0
        assert (power_sum(R, i) - expected).valuation() >= 1


@given(ring_and_elems(1), st.integers(0, 3))
def test_div_pi_inverts_multiplication(data, n):
    R, x = data
    y = x * R.pi_pow(n)
    back = y.div_pi(n)
    # division only recovers x modulo pi^(P - n)
    assert (back - x).valuation() >= R.P - n


def test_random_elements_are_deterministic():
    R = make_ring(3, 2, 1, 4)
    a = [R.random_elem(random.Random(5)) for _ in range(3)]
    b = [R.random_elem(random.Random(5)) for _ in range(3)]
    assert a == b
