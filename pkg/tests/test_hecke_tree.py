import random
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hecke_sep.hecke_tree import (
    ROOT,
    ROOT_1,
    HeckeContext,
    TreeFunction,
    VertexKey,
    _cross_right,
    ball_analysis,
    beta_act,
    beta_conjugate,
    distance_sphere,
    hecke_T,
    hecke_T_minus_a,
    hecke_Tminus,
    hecke_Tplus,
    indicator,
    random_tree_function,
    sphere_coeffs_recursion,
    sphere_keys,
    spherical_T,
    tminus_right,
    tplus_right,
)
from hecke_sep.local_arith import make_ring
from hecke_sep.suites import run_spherical, run_structure
from hecke_sep.sym_rep import SymVector, act, apply_U, mat_w, mat_w_lambda

from conftest import RING_PARAMS, rings_st


def test_root_neighbours_weight_zero():
    R = make_ring(3, 1, 1, 4)
    f = indicator(R, [ROOT])
    expected = indicator(R, [VertexKey(0, 1, (lam,)) for lam in range(3)] + [ROOT_1])
    assert hecke_T(f) == expected
    assert hecke_T_minus_a(HeckeContext(R, 0, R.zero), f) == expected


def test_weight_one_at_root():
    R = make_ring(3, 1, 1, 6)
    y = SymVector.from_ints(R, (0, 1))
    f = TreeFunction.delta(ROOT, y)
    plus = hecke_Tplus(f)
    for lam in range(3):
        t = R.teichmuller_index(lam)
        assert plus[VertexKey(0, 1, (lam,))] == SymVector(R, (-t, R.uniformizer))
    assert hecke_Tminus(f) == TreeFunction.delta(ROOT_1, y)


def test_operator_edge_cases():
    R = make_ring(2, 1, 1, 6)
    ctx = HeckeContext(R, 2, R.from_int(3))
    assert hecke_T_minus_a(ctx, TreeFunction(R, 2)).is_zero()
    with pytest.raises(ValueError):
        TreeFunction(R, 1, {ROOT: SymVector.zero(R, 2)})


@given(rings_st, st.integers(0, 2**32))
def test_T_minus_a_is_linear(R, seed):
    rng = random.Random(seed)
    k = rng.randint(0, 3)
    ctx = HeckeContext(R, k, R.random_elem(rng))
    f = random_tree_function(R, k, rng, range(2), sides=(0, 1), density=0.5)
    g = random_tree_function(R, k, rng, range(2), sides=(0, 1), density=0.5)
    assert hecke_T_minus_a(ctx, f + g) == hecke_T_minus_a(ctx, f) + hecke_T_minus_a(ctx, g)


@given(rings_st, st.integers(0, 2**32))
def test_right_side_formulas_match_matrix_compositions(R, seed):
    rng = random.Random(seed)
    k = rng.randint(0, 4)
    v = SymVector.random(R, k, rng)
    lam = R.teichmuller_index(rng.randrange(R.q))
    w = mat_w(R)
    assert tplus_right(lam, v) == apply_U(act(mat_w_lambda(lam) @ w, v))
    assert tminus_right(lam, v) == act(mat_w_lambda(-lam), apply_U(act(w, v)))
    assert _cross_right(v) == act(w, apply_U(act(w, v)))


def test_spherical_examples():
    R = make_ring(2, 1, 1, 4)
    delta = indicator(R, [ROOT])
    t1sq = hecke_T(hecke_T(delta))
    assert t1sq[ROOT] == SymVector.from_ints(R, (3,))
    others = [key for key in t1sq if key != ROOT]
    assert len(others) == 6 and all(t1sq[key] == SymVector.from_ints(R, (1,)) for key in others)
    assert spherical_T(0, delta) == delta
    for q, p, f in [(2, 2, 1), (3, 3, 1), (4, 2, 2)]:
        Rq = make_ring(p, f, 1, 4)
        for n in range(1, 5):
            assert len(spherical_T(n, indicator(Rq, [ROOT]))) == (q + 1) * q ** (n - 1)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_spherical_relations(q):
    assert run_spherical({"q": q, "n_max": 4, "vertices": 10}, seed=11).ok


def test_distance_sphere_matches_side_description():
    for n in range(1, 4):
        expected = set(sphere_keys(3, n, 0)) | set(sphere_keys(3, n - 1, 1))
        assert distance_sphere(ROOT, n, 3) == expected


def test_beta_examples():
    R = make_ring(3, 1, 1, 4)
    v = SymVector.from_ints(R, (1, 2, 0))
    key = VertexKey(0, 2, (1, 2))
    out = beta_conjugate(TreeFunction.delta(key, v))
    assert out == TreeFunction.delta(VertexKey(1, 2, (1, 2)), act(mat_w(R), v))
    f0 = indicator(R, [ROOT, key])
    assert set(beta_conjugate(f0)) == {ROOT_1, VertexKey(1, 2, (1, 2))}
    with pytest.raises(ValueError):
        beta_conjugate(indicator(R, [ROOT_1]))
    assert beta_act(beta_act(f0)) == f0


def test_ball_analysis_examples():
    R = make_ring(3, 1, 1, 6)
    one = SymVector.from_ints(R, (1,))
    assert ball_analysis(TreeFunction.delta(VertexKey(0, 2, (0, 1)), one), 2)[0]
    inside, _ = ball_analysis(TreeFunction.delta(VertexKey(1, 2, (0, 1)), one), 2)
    assert not inside
    far = TreeFunction.delta(VertexKey(0, 3, (0, 1, 2)), one.scale(R.pi_pow(3)))
    assert ball_analysis(far, 2) == (False, 3)


def test_recursion_examples():
    R = make_ring(3, 1, 1, 6)
    k = 3
    ctx = HeckeContext(R, k, R.from_int(5))
    empty = TreeFunction(R, k)
    mu = (1, 2)
    assert all(c.is_zero() for c in sphere_coeffs_recursion(ctx, empty, empty, empty, mu))
    lam = 1
    child = TreeFunction.delta(VertexKey(0, 3, mu + (lam,)), SymVector.basis(R, k, k))
    got = sphere_coeffs_recursion(ctx, empty, empty, child, mu)
    t = R.teichmuller_index(lam)
    assert got == [t ** (k - j) * comb(k, j) for j in range(k + 1)]


@pytest.mark.parametrize("params", RING_PARAMS)
def test_structural_invariants(params):
    res = run_structure({"ring": list(params), "k_max": 3, "samples": 25}, seed=2)
    assert res.ok, res.counterexample


@given(st.integers(0, 2**32))
def test_plus_images_of_distinct_vertices_are_disjoint(seed):
    rng = random.Random(seed)
    R = make_ring(3, 1, 1, 4)
    n = rng.randint(0, 3)
    side = rng.randint(0, 1)
    keys = sphere_keys(3, n, side)
    a, b = rng.sample(keys, 2) if len(keys) > 1 else (keys[0], keys[0])
    if a == b:
        return
    sa = hecke_Tplus(TreeFunction.delta(a, SymVector.random(R, 2, rng)))
    sb = hecke_Tplus(TreeFunction.delta(b, SymVector.random(R, 2, rng)))
    assert not set(sa) & set(sb)
