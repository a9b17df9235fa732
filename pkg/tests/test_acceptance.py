"""End-to-end acceptance checks, one per criterion.

Each test prints a single ``PASS``/``FAIL`` line with its runtime, so
``pytest -s tests/test_acceptance.py`` doubles as a summary report.
"""

import copy
import io
import json
import random
import time
from contextlib import contextmanager

from hecke_sep import cli
from hecke_sep.cli import DEFAULTS, ENUMERATORS, COMMON_KEYS, run_job, strip_timing
from hecke_sep.exact_matrix import brute_force_preimage_bound, snf_local
from hecke_sep.hecke_tree import HeckeContext
from hecke_sep.local_arith import make_ring
from hecke_sep.separatedness import build_linear_system, newton_smooth_params, system_shape

SEED = 20240601


@contextmanager
def criterion(capsys, number: int, title: str, limit_s: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = time.perf_counter() - start < limit_s
    finally:
        elapsed = time.perf_counter() - start
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n[criterion {number:2d}] {status}  {title}  ({elapsed:.1f}s, limit {limit_s:.0f}s)")
    assert elapsed < limit_s, f"took {elapsed:.1f}s"


def config(command: str, **overrides) -> dict:
    cfg = copy.deepcopy(DEFAULTS[command])
    cfg.update(COMMON_KEYS, seed=SEED)
    cfg.update(overrides)
    return cfg


def run_suite(command: str, job_kind: str, **overrides) -> list[dict]:
    jobs = [(s, p) for s, p in ENUMERATORS[command](config(command, **overrides)) if s == job_kind]
    assert jobs, f"no {job_kind} jobs enumerated"
    return [run_job(command, s, p, SEED) for s, p in jobs]


def failures(records: list[dict]) -> list[dict]:
    return [r for r in records if not r["pass"]]


def test_criterion_01_spherical_relations(capsys):
    with criterion(capsys, 1, "spherical Hecke relations, q in {2,3,4}, n <= 4", 10):
        recs = run_suite("hecke", "spherical")
        assert sorted(r["params"]["q"] for r in recs) == [2, 3, 4]
        assert all(r["params"]["n_max"] == 4 and r["params"]["vertices"] == 10 for r in recs)
        assert failures(recs) == []


def test_criterion_02_local_formulas(capsys):
    with criterion(capsys, 2, "T+/T- local formulas equal composition oracles", 5):
        recs = run_suite("hecke", "local_formulas")
        assert sorted(map(tuple, (r["params"]["ring"] for r in recs))) == sorted(
            [(2, 1, 1, 8), (3, 1, 1, 8), (3, 2, 1, 8), (2, 1, 2, 8)]
        )
        assert all(r["params"]["samples"] == 200 and r["params"]["k_max"] == 6 for r in recs)
        assert failures(recs) == []


def test_criterion_03_matrix_lemmas(capsys):
    with criterion(capsys, 3, "binomial matrices nonsingular", 30):
        recs = run_suite("lemmas", "matrix", suite="matrices")
        kinds = {k: [r for r in recs if r["params"]["kind"] == k] for k in (1, 2, 3)}
        assert len(kinds[1]) == 8 * 21
        assert len(kinds[2]) == 21 * sum(m - 1 for m in range(1, 9))
        assert {r["params"]["q"] for r in kinds[3]} == {2, 4, 3, 9, 5, 25}
        assert failures(recs) == []


def test_criterion_04_kummer_exhaustive(capsys):
    with criterion(capsys, 4, "binomial divisibility, exhaustive", 60):
        recs = run_suite("lemmas", "binomial", suite="binomial")
        expected = sum(q - d for q in (2, 3, 4, 5, 7, 8, 9, 16) for d in range(q))
        assert len(recs) == expected
        assert failures(recs) == []


def test_criterion_05_reduction_identity(capsys):
    with criterion(capsys, 5, "reduction modulo (x^q - x)^(d+1)", 30):
        recs = run_suite("reduce", "reduce")
        assert {(r["params"]["q"], r["params"]["d"]) for r in recs} == {
            (q, d) for q in (2, 3, 5) for d in range(4)
        }
        assert all(r["params"]["samples"] == 200 for r in recs)
        assert failures(recs) == []


def test_criterion_06_coefficient_witnesses(capsys):
    with criterion(capsys, 6, "coefficient-lemma witnesses", 20):
        recs = run_suite("lemmas", "coefficients", suite="polynomials")
        assert len(recs) == 2 * 3 * 4
        assert all(r["params"]["samples"] == 100 for r in recs)
        assert failures(recs) == []


def _brute_force_instances() -> int:
    checked = 0
    for params in ENUMERATORS["epsilon"](config("epsilon", theorem_grid=True, M_max=2)):
        p, f, e, P = params[1]["ring"]
        k, v, N, M = (params[1][x] for x in ("k", "a_valuation", "N", "M"))
        R = make_ring(p, f, e, P)
        _, cols = system_shape(R.q, k, N, M)
        if R.modulus ** (R.dim * cols) > 2**20:
            continue
        S = build_linear_system(HeckeContext(R, k, R.pi_pow(v)), N, M)
        prof = snf_local(S)
        assert max(prof.divisors, default=0) == brute_force_preimage_bound(S), params
        checked += 1
    return checked


def test_criterion_07_epsilon_bounds(capsys):
    with criterion(capsys, 7, "epsilon-hat within the theorem bounds on the grid", 600):
        cfg = config("epsilon", theorem_grid=True, N_list=[1, 2], M_max=2)
        jobs = ENUMERATORS["epsilon"](cfg)
        recs = [run_job("epsilon", s, p, SEED) for s, p in jobs]
        assert {tuple(r["params"]["ring"][:2]) for r in recs} == {(2, 1), (3, 1)}
        for r in recs:
            p, f, e, P = r["params"]["ring"]
            q, k, v = p**f, r["params"]["k"], r["params"]["a_valuation"]
            d = k // q
            assert P >= d + v + 4 and r["mode"] == "snf" and r["error"] is None, r
            if "Thm(iii)" in r["labels"]:
                assert r["epsilon_hat"] <= d, r
            if {"Thm(i)", "Thm(ii)"} & set(r["labels"]):
                assert r["epsilon_hat"] <= d + v, r
        assert failures(recs) == []
        assert _brute_force_instances() >= 10


def test_criterion_08_structural_invariants(capsys):
    with criterion(capsys, 8, "disjoint supports, beta, recursion, injectivity", 30):
        recs = run_suite("hecke", "structure")
        assert all(r["params"]["samples"] >= 100 for r in recs)
        assert failures(recs) == []


def test_criterion_09_smooth_parameters(capsys):
    with criterion(capsys, 9, "Newton polygon root valuations", 5):
        rng = random.Random(SEED)
        rings = [make_ring(p, f, e, 2 * 16) for p, f, e in [(2, 1, 1), (3, 1, 1), (3, 2, 1), (2, 1, 2)]]
        count = 0
        for R in rings:
            for k in range(11):
                for v in range(k + 2):
                    unit = R.from_int(rng.choice([u for u in range(1, 4 * R.p) if u % R.p]))
                    sp = newton_smooth_params(k, R.pi_pow(v) * unit)
                    assert sp.v_lambda1 + sp.v_lambda2 == k
                    assert sp.bullet_sum == 0
                    assert sp.bullet_lambda2 == (k - sp.v_lambda2 >= 0)
                    assert sp.bullet_q_lambda1 == (R.e * R.f - sp.v_lambda1 + k >= 0)
                    count += 1
        assert count == 4 * sum(k + 2 for k in range(11))


def test_criterion_10_reproducibility(capsys):
    with criterion(capsys, 10, "identical config and seed give identical reports", 120):
        runs = []
        for _ in range(2):
            text = ""
            for command in ("epsilon", "classify", "reduce"):
                buf = io.StringIO()
                assert cli.run(command, config(command, samples=50) if command == "reduce" else config(command), buf) == 0
                text += buf.getvalue()
            runs.append(text)
        stripped = [[json.dumps(strip_timing(json.loads(l)), sort_keys=True) for l in t.splitlines()] for t in runs]
        assert stripped[0] == stripped[1] and len(stripped[0]) > 0
