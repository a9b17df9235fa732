"""Self-contained check jobs.

A job is a pure function of (params, seed) returning a JobResult, so any
record can be re-run from its own fields.  The CLI enumerates jobs from a
config; tests call the same functions directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from . import combinat, exact_matrix, hecke_tree, poly_lab, separatedness, sym_rep
from .local_arith import RingSpec, make_ring, prime_power_decompose
from .poly_lab import LocalPoly
from .sym_rep import SymVector


@dataclass
class JobResult:
    ok: bool
    counterexample: Optional[Any] = None
    details: dict = field(default_factory=dict)


def job_rng(seed: int, suite: str, params: dict) -> random.Random:
    """Per-job stream, independent of enumeration order."""
    return random.Random(f"{seed}|{suite}|{sorted(params.items())}")


def _ring(spec) -> RingSpec:
    p, f, e, P = spec
    return make_ring(p, f, e, P)


# ---------------------------------------------------------------------------
# lemmas


def run_binomial(params: dict, seed: int) -> JobResult:
    q, d, r = params["q"], params["d"], params["r"]
    bad = combinat.check_binom_divisibility_lemma(q, d, r)
    return JobResult(bad is None, None if bad is None else {"i": bad[0], "j": bad[1], "l": bad[2]})


def run_matrix(params: dict, seed: int) -> JobResult:
    kind = params["kind"]
    args = {k: v for k, v in params.items() if k != "kind"}
    det = exact_matrix.det_exact(exact_matrix.build_binomial_matrix(kind, **args))
    if kind == 3:
        p, _ = prime_power_decompose(params["q"])
        ok = det % p != 0
    else:
        ok = det == 1
    return JobResult(ok, None if ok else {"det": det}, {"det": det})


def _random_poly(ring: RingSpec, deg: int, rng: random.Random) -> LocalPoly:
    return LocalPoly([ring.random_elem(rng) for _ in range(deg + 1)])


def run_coefficients(params: dict, seed: int) -> JobResult:
    """Witnesses (x^q-x)^(d+1) g + pi^n h must satisfy hypothesis and conclusions."""
    q, d, n, samples = params["q"], params["d"], params["n"], params["samples"]
    p, f = prime_power_decompose(q)
    ring = make_ring(p, f, 1, n + 2)
    rng = job_rng(seed, "coefficients", params)
    for _ in range(samples):
        g = _random_poly(ring, rng.randint(0, q), rng)
        h = _random_poly(ring, rng.randint(0, q * (d + 2)), rng)
        c = poly_lab.make_witness(g, h, ring, q, d, n)
        rep = poly_lab.check_coefficient_lemmas(c, ring, q, d, n)
        if not (rep.hypothesis and rep.ok):
            return JobResult(False, {"coeffs": [list(x.coords) for x in c.coeffs], "report": repr(rep)})
    return JobResult(True, details={"witnesses": samples})


def run_reduce(params: dict, seed: int) -> JobResult:
    """Identity reduction against long division, on monomials and random dense
    polynomials; every admissible shift checked by exact division."""
    q, d, samples = params["q"], params["d"], params["samples"]
    t_max = q * (d + 1) + 3 * (q - 1)
    modulus = poly_lab.frobenius_modulus(q, d)
    for t in range(t_max + 1):
        mono = LocalPoly.monomial(t)
        want = poly_lab.remainder_oracle(mono, q, d)
        if poly_lab.reduce_via_identity(mono, q, d) != want:
            return JobResult(False, {"t": t, "method": "identity"})
        if poly_lab.reduce_via_coefficients(mono, q, d) != want:
            return JobResult(False, {"t": t, "method": "coefficients"})
        for s in range(poly_lab.max_shift(t, q, d) + 1):
            rhs = LocalPoly([0])
            for exp, w in poly_lab.identity_terms(t, q, d, s):
                rhs = rhs + LocalPoly.monomial(exp, w)
            _, rem = (mono - rhs).divmod_monic(modulus)
            if rem != LocalPoly([0]):
                return JobResult(False, {"t": t, "s": s, "method": "shift identity"})
    rng = job_rng(seed, "reduce", params)
    for _ in range(samples):
        poly = LocalPoly([rng.randint(-50, 50) for _ in range(rng.randint(0, t_max) + 1)])
        want = poly_lab.remainder_oracle(poly, q, d)
        if poly_lab.reduce_via_identity(poly, q, d) != want:
            return JobResult(False, {"coeffs": poly.to_ints(), "method": "identity"})
    return JobResult(True, details={"t_max": t_max, "random": samples})


# ---------------------------------------------------------------------------
# tree operators


def _random_vertex(q: int, rng: random.Random, depth: int = 3) -> hecke_tree.VertexKey:
    n = rng.randint(0, depth)
    return hecke_tree.VertexKey(rng.randint(0, 1), n, tuple(rng.randrange(q) for _ in range(n)))


def run_spherical(params: dict, seed: int) -> JobResult:
    """T_n(delta_v) is the distance-n indicator, and the recursions hold for
    the indicators taken as independent definitions of T_n."""
    p, f = prime_power_decompose(params["q"])
    ring = make_ring(p, f, 1, 4)
    q, n_max = ring.q, params["n_max"]
    rng = job_rng(seed, "spherical", params)
    for _ in range(params["vertices"]):
        v = _random_vertex(q, rng)
        delta = hecke_tree.indicator(ring, [v])
        spheres = [hecke_tree.indicator(ring, hecke_tree.distance_sphere(v, n, q)) for n in range(n_max + 1)]
        t1 = hecke_tree.hecke_T
        if t1(spheres[1]) != spheres[2] + delta.scale(q + 1):
            return JobResult(False, {"vertex": list(v), "relation": "T1^2"})
        for n in range(3, n_max + 1):
            if t1(spheres[n - 1]) != spheres[n] + spheres[n - 2].scale(q):
                return JobResult(False, {"vertex": list(v), "relation": f"T1 T{n - 1}"})
        for n in range(n_max + 1):
            if hecke_tree.spherical_T(n, delta) != spheres[n]:
                return JobResult(False, {"vertex": list(v), "n": n})
    root = hecke_tree.indicator(ring, [hecke_tree.ROOT])
    for n in range(1, n_max + 1):
        keys = hecke_tree.sphere_keys(q, n, 0) + hecke_tree.sphere_keys(q, n - 1, 1)
        if hecke_tree.spherical_T(n, root) != hecke_tree.indicator(ring, keys):
            return JobResult(False, {"vertex": "root", "n": n})
    return JobResult(True)


def _random_lambda(ring: RingSpec, rng: random.Random):
    if rng.random() < 0.5:
        return ring.residue(rng.randrange(ring.q))
    return ring.random_elem(rng)


def run_local_formulas(params: dict, seed: int) -> JobResult:
    ring = _ring(params["ring"])
    rng = job_rng(seed, "local_formulas", params)
    for _ in range(params["samples"]):
        k = rng.randint(0, params["k_max"])
        lam = _random_lambda(ring, rng)
        v = SymVector.random(ring, k, rng)
        for name, fast, slow in (
            ("tplus", sym_rep.tplus_local, sym_rep.tplus_oracle),
            ("tminus", sym_rep.tminus_local, sym_rep.tminus_oracle),
        ):
            if fast(lam, v) != slow(lam, v):
                return JobResult(False, {"formula": name, "k": k, "lambda": repr(lam),
                                         "v": [list(c.coords) for c in v.coeffs]})
    return JobResult(True)


def run_structure(params: dict, seed: int) -> JobResult:
    """Beta-intertwining, disjoint T+ supports, the sphere recursion and
    nonvanishing of T on random inputs."""
    ring = _ring(params["ring"])
    q, samples = ring.q, params["samples"]
    depth = 3 if q <= 4 else 2  # keeps the support near 100 vertices
    rng = job_rng(seed, "structure", params)
    for _ in range(samples):
        k = rng.randint(0, params["k_max"])
        f = hecke_tree.random_tree_function(ring, k, rng, levels=range(0, depth), sides=(0, 1), density=0.5)
        for name, op in (("Tplus", hecke_tree.hecke_Tplus), ("Tminus", hecke_tree.hecke_Tminus)):
            if hecke_tree.beta_act(op(f)) != op(hecke_tree.beta_act(f)):
                return JobResult(False, {"check": f"beta {name}", "k": k})

        n = rng.randint(0, 3)
        a_key = _random_vertex(q, rng)
        b_key = _random_vertex(q, rng)
        if a_key != b_key and a_key.n == b_key.n and a_key.side == b_key.side:
            va, vb = SymVector.random(ring, k, rng), SymVector.random(ring, k, rng)
            sa = hecke_tree.hecke_Tplus(hecke_tree.TreeFunction.delta(a_key, va))
            sb = hecke_tree.hecke_Tplus(hecke_tree.TreeFunction.delta(b_key, vb))
            if set(sa) & set(sb):
                return JobResult(False, {"check": "disjoint", "a": list(a_key), "b": list(b_key)})

        ctx = hecke_tree.HeckeContext(ring, k, ring.random_elem(rng))
        m = n + 1
        mu = tuple(rng.randrange(q) for _ in range(m))
        near = [hecke_tree.VertexKey(0, m - 1, mu[:-1]), hecke_tree.VertexKey(0, m, mu)]
        near += [hecke_tree.VertexKey(0, m + 1, mu + (lam,)) for lam in range(q)]
        noise = hecke_tree.random_tree_function(ring, k, rng, levels=range(m - 1, m + 2),
                                                density=min(1.0, 20 / q ** (m + 1)))
        g = noise + hecke_tree.TreeFunction(ring, k, {key: SymVector.random(ring, k, rng) for key in near})
        parts = [g.restrict(lambda key, lv=lv: key.side == 0 and key.n == lv) for lv in (m - 1, m, m + 1)]
        want = hecke_tree.hecke_T_minus_a(ctx, g).get_vec(hecke_tree.VertexKey(0, m, mu)).coeffs
        if hecke_tree.sphere_coeffs_recursion(ctx, *parts, mu) != list(want):
            return JobResult(False, {"check": "recursion", "mu": list(mu), "k": k})

        if f.valuation() == 0 and hecke_tree.hecke_T(f).is_zero():
            return JobResult(False, {"check": "T nonzero", "k": k})
    return JobResult(True)


# ---------------------------------------------------------------------------
# separatedness


def run_epsilon(params: dict, seed: int) -> JobResult:
    p, f, e, P = params["ring"]
    ring = make_ring(p, f, e, P)
    a = ring.pi_pow(params["a_valuation"]) * params["a_unit"]
    spec = separatedness.ExperimentSpec(
        ring, params["k"], a, params["N"], params["M"], params["mode"], seed, params["sample_count"]
    )
    point = separatedness.epsilon_point(spec, params["budget"])
    cls = separatedness.classify_weight(ring, params["k"], a)
    pred = cls.predicted_epsilon
    ok = point.error is None and (pred is None or point.epsilon_hat <= pred)
    details = point.as_json()
    details.update(predicted_epsilon=pred, labels=cls.labels)
    return JobResult(ok, None if ok else {"epsilon_hat": point.epsilon_hat, "error": point.error}, details)


def run_classify(params: dict, seed: int) -> JobResult:
    p, f, e = params["ring"][:3]
    q = p**f
    weights = params.get("weights") or [params["k"]] + [0] * (e * f - 1)
    profile = separatedness.WeightProfile(p, f, e, tuple(weights))
    v = params["a_valuation"]
    cls = separatedness.classify(profile, v)
    ring = make_ring(p, f, e, separatedness.default_precision(0, v, e))
    k = sum(weights)
    smooth = separatedness.newton_smooth_params(k, ring.pi_pow(v))
    details = {
        "labels": cls.labels,
        "predicted_epsilon": cls.predicted_epsilon,
        "d": cls.d,
        "r": cls.r,
        "q": q,
    }
    details["smooth"] = {
        "v_lambda1": str(smooth.v_lambda1),
        "v_lambda2": str(smooth.v_lambda2),
        "bullet_lambda2": smooth.bullet_lambda2,
        "bullet_q_lambda1": smooth.bullet_q_lambda1,
        "bullet_sum": str(smooth.bullet_sum),
    }
    ok = smooth.v_lambda1 + smooth.v_lambda2 == k and smooth.bullet_sum == 0
    return JobResult(ok, None if ok else details.get("smooth"), details)


JOBS: dict[str, Callable[[dict, int], JobResult]] = {
    "binomial": run_binomial,
    "matrix": run_matrix,
    "coefficients": run_coefficients,
    "reduce": run_reduce,
    "spherical": run_spherical,
    "local_formulas": run_local_formulas,
    "structure": run_structure,
    "epsilon": run_epsilon,
    "classify": run_classify,
}
