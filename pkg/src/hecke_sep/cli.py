"""Command-line entry point.

    hecke-sep lemmas   [--config FILE] [--suite binomial|matrices|polynomials|all]
    hecke-sep hecke    [--config FILE]
    hecke-sep epsilon  [--config FILE]
    hecke-sep classify [--config FILE]
    hecke-sep reduce   [--config FILE]
    hecke-sep replay   --record REPORT.jsonl [--failures-only]

Every command accepts --seed, --out and --budget.  Reports are JSON Lines,
one record per job.  Exit status is 0 when every job passes, 1 on an
assertion failure and 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Any, Iterable, Optional, TextIO

from . import exact_matrix, separatedness
from .local_arith import prime_power_decompose
from .suites import JOBS, JobResult

SCHEMA_VERSION = 1
TIMING_FIELDS = ("runtime_ms",)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


DEFAULTS: dict[str, dict[str, Any]] = {
    "lemmas": {
        "suite": "all",
        "q_values": [2, 3, 4, 5, 7, 8, 9, 16],
        "m_max": 8,
        "a_range": 10,
        "kind3_primes": [2, 3, 5],
        "coeff_q_values": [2, 3],
        "coeff_d_max": 2,
        "coeff_n_max": 4,
        "samples": 100,
    },
    "hecke": {
        "rings": [[2, 1, 1, 8], [3, 1, 1, 8], [3, 2, 1, 8], [2, 1, 2, 8]],
        "k_max": 6,
        "samples": 200,
        "spherical_q_values": [2, 3, 4],
        "n_max": 4,
        "vertices": 10,
        "structure_samples": 100,
        "structure_k_max": 3,
    },
    "epsilon": {
        "ring": [3, 1, 1],
        "k": 3,
        "a_valuation": 1,
        "a_unit": 1,
        "N_list": [1, 2],
        "M_max": 2,
        "mode": "snf",
        "sample_count": 200,
        "theorem_grid": False,
        "grid_rings": [[2, 1, 1], [3, 1, 1], [2, 1, 2], [3, 1, 2]],
        "grid_v_max": 3,
    },
    "classify": {
        "ring": [3, 1, 1],
        "k_max": 9,
        "v_max": 3,
        "weights": None,
    },
    "reduce": {
        "q_values": [2, 3, 5],
        "d_max": 3,
        "samples": 200,
    },
}
COMMON_KEYS = {"seed": 0, "budget": separatedness.DEFAULT_BUDGET}
LEMMA_SUITES = ("binomial", "matrices", "polynomials", "all")


# ---------------------------------------------------------------------------
# configuration


def _check_type(key: str, value: Any, default: Any) -> None:
    def is_int(x: Any) -> bool:
        return isinstance(x, int) and not isinstance(x, bool)

    def int_list(x: Any) -> bool:
        return isinstance(x, list) and all(is_int(y) for y in x)

    if default is None:
        ok = value is None or int_list(value)
    elif isinstance(default, bool):
        ok = isinstance(value, bool)
    elif is_int(default):
        ok = is_int(value)
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, list) and default and isinstance(default[0], list):
        ok = isinstance(value, list) and all(int_list(y) for y in value)
    else:
        ok = int_list(value)
    if not ok:
        raise ConfigError(f"field {key!r}: expected a value shaped like {json.dumps(default)}")


def load_config(command: str, path: Optional[str]) -> dict[str, Any]:
    """Defaults for ``command`` overlaid with the JSON object in ``path``."""
    cfg = dict(COMMON_KEYS)
    cfg.update(DEFAULTS[command])
    if path is None:
        return cfg
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    for key, value in raw.items():
        if key not in cfg:
            raise ConfigError(f"{path}: unknown key {key!r} for command {command!r}")
        _check_type(key, value, cfg[key])
        cfg[key] = value
    return cfg


def _validate_seed(seed: int) -> int:
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return seed


# ---------------------------------------------------------------------------
# job enumeration


def jobs_lemmas(cfg: dict) -> list[tuple[str, dict]]:
    suite = cfg["suite"]
    if suite not in LEMMA_SUITES:
        raise ConfigError(f"field 'suite': expected one of {', '.join(LEMMA_SUITES)}")
    jobs: list[tuple[str, dict]] = []
    if suite in ("binomial", "all"):
        for q in cfg["q_values"]:
            prime_power_decompose(q)
            for d in range(q):
                for r in range(q - d):
                    jobs.append(("binomial", {"q": q, "d": d, "r": r}))
    if suite in ("matrices", "all"):
        m_max, a_range = cfg["m_max"], cfg["a_range"]
        for m in range(1, m_max + 1):
            for a in range(-a_range, a_range + 1):
                jobs.append(("matrix", {"kind": 1, "a": a, "m": m}))
                for t in range(2, m + 1):
                    jobs.append(("matrix", {"kind": 2, "a": a, "m": m, "t": t}))
        for k, q, m in exact_matrix.kind3_cases(tuple(cfg["kind3_primes"])):
            jobs.append(("matrix", {"kind": 3, "k": k, "q": q, "m": m}))
    if suite in ("polynomials", "all"):
        for q in cfg["coeff_q_values"]:
            for d in range(cfg["coeff_d_max"] + 1):
                for n in range(1, cfg["coeff_n_max"] + 1):
                    jobs.append(("coefficients", {"q": q, "d": d, "n": n, "samples": cfg["samples"]}))
    return jobs


def jobs_hecke(cfg: dict) -> list[tuple[str, dict]]:
    jobs: list[tuple[str, dict]] = []
    for q in cfg["spherical_q_values"]:
        prime_power_decompose(q)
        jobs.append(("spherical", {"q": q, "n_max": cfg["n_max"], "vertices": cfg["vertices"]}))
    for ring in cfg["rings"]:
        if len(ring) != 4:
            raise ConfigError("field 'rings': each ring is [p, f, e, P]")
        jobs.append(("local_formulas", {"ring": ring, "k_max": cfg["k_max"], "samples": cfg["samples"]}))
        jobs.append(("structure", {"ring": ring, "k_max": cfg["structure_k_max"],
                                   "samples": cfg["structure_samples"]}))
    return jobs


def _full_ring(ring: list[int], k: int, v: int) -> list[int]:
    if len(ring) == 4:
        return list(ring)
    if len(ring) != 3:
        raise ConfigError("field 'ring': expected [p, f, e] or [p, f, e, P]")
    p, f, e = ring
    d = k // p**f
    return [p, f, e, separatedness.default_precision(d, v, e)]


def jobs_epsilon(cfg: dict) -> list[tuple[str, dict]]:
    if cfg["mode"] not in ("snf", "sample"):
        raise ConfigError("field 'mode': expected 'snf' or 'sample'")
    points = []
    if cfg["theorem_grid"]:
        for g in separatedness.theorem_grid([tuple(r) for r in cfg["grid_rings"]], cfg["grid_v_max"]):
            points.append((list(g["ring"]), g["k"], g["a_valuation"]))
    else:
        points.append((cfg["ring"], cfg["k"], cfg["a_valuation"]))
    jobs = []
    for ring, k, v in points:
        full = _full_ring(ring, k, v)
        for N in cfg["N_list"]:
            for M in range(cfg["M_max"] + 1):
                params = {
                    "ring": full, "k": k, "a_valuation": v, "a_unit": cfg["a_unit"], "N": N, "M": M,
                    "mode": cfg["mode"], "sample_count": cfg["sample_count"], "budget": cfg["budget"],
                }
                _validate_epsilon(params)
                jobs.append(("epsilon", params))
    return jobs


def _validate_epsilon(params: dict) -> None:
    from .local_arith import make_ring

    p, f, e, P = params["ring"]
    try:
        ring = make_ring(p, f, e, P)
        if params["a_unit"] % p == 0:
            raise ValueError("a_unit must be prime to p")
        a = ring.pi_pow(params["a_valuation"]) * params["a_unit"]
        separatedness.ExperimentSpec(ring, params["k"], a, params["N"], params["M"], params["mode"])
    except ValueError as exc:
        raise ConfigError(f"invalid grid point {params}: {exc}") from exc


def jobs_classify(cfg: dict) -> list[tuple[str, dict]]:
    ring = cfg["ring"][:3]
    if len(ring) != 3:
        raise ConfigError("field 'ring': expected [p, f, e]")
    jobs = []
    if cfg["weights"] is not None:
        p, f, e = ring
        if len(cfg["weights"]) != e * f:
            raise ConfigError("field 'weights': need e*f entries")
        for v in range(cfg["v_max"] + 1):
            jobs.append(("classify", {"ring": ring, "weights": cfg["weights"], "a_valuation": v}))
        return jobs
    for k in range(cfg["k_max"] + 1):
        for v in range(cfg["v_max"] + 1):
            jobs.append(("classify", {"ring": ring, "k": k, "a_valuation": v}))
    return jobs


def jobs_reduce(cfg: dict) -> list[tuple[str, dict]]:
    jobs = []
    for q in cfg["q_values"]:
        prime_power_decompose(q)
        for d in range(cfg["d_max"] + 1):
            jobs.append(("reduce", {"q": q, "d": d, "samples": cfg["samples"]}))
    return jobs


ENUMERATORS = {
    "lemmas": jobs_lemmas,
    "hecke": jobs_hecke,
    "epsilon": jobs_epsilon,
    "classify": jobs_classify,
    "reduce": jobs_reduce,
}


# ---------------------------------------------------------------------------
# execution


def run_job(command: str, suite: str, params: dict, seed: int) -> dict:
    start = time.perf_counter()
    try:
        result = JOBS[suite](params, seed)
    except (ValueError, ArithmeticError) as exc:
        result = JobResult(False, {"exception": f"{type(exc).__name__}: {exc}"})
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "suite": suite,
        "params": params,
        "seed": seed,
    }
    record.update(result.details)
    record.update(
        outcome="pass" if result.ok else "fail",
        counterexample=result.counterexample,
        runtime_ms=round((time.perf_counter() - start) * 1000, 3),
    )
    # the epsilon report is read by tools that expect a boolean flag
    record["pass"] = result.ok
    return record


def write_record(out: TextIO, record: dict) -> None:
    out.write(json.dumps(record, sort_keys=True) + "\n")
    out.flush()


def strip_timing(record: dict) -> dict:
    return {k: v for k, v in record.items() if k not in TIMING_FIELDS}


def run(command: str, cfg: dict, out: TextIO) -> int:
    """Run every job of ``command`` and stream one record per job."""
    jobs = ENUMERATORS[command](cfg)
    status = EXIT_OK
    for suite, params in jobs:
        record = run_job(command, suite, params, cfg["seed"])
        write_record(out, record)
        if not record["pass"]:
            status = EXIT_FAIL
    return status


def read_records(path: str) -> list[dict]:
    records = []
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {lineno}: {exc.msg}") from exc
        for key in ("command", "suite", "params", "seed"):
            if key not in rec:
                raise ConfigError(f"{path}: line {lineno}: record lacks {key!r}")
        if rec["suite"] not in JOBS:
            raise ConfigError(f"{path}: line {lineno}: unknown suite {rec['suite']!r}")
        records.append(rec)
    return records


def replay(records: Iterable[dict], out: TextIO, failures_only: bool = False) -> int:
    """Re-run records; fails if a job fails or its output differs from the record."""
    status = EXIT_OK
    for rec in records:
        if failures_only and rec.get("pass", rec.get("outcome") == "pass"):
            continue
        fresh = run_job(rec["command"], rec["suite"], rec["params"], rec["seed"])
        fresh["reproduced"] = strip_timing(fresh) == strip_timing(rec)
        write_record(out, fresh)
        if not (fresh["pass"] and fresh["reproduced"]):
            status = EXIT_FAIL
    return status


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hecke-sep", description="Checks and experiments for Hecke operators on the Bruhat-Tits tree.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with flat keys")
    common.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides the config)")
    common.add_argument("--out", help="write the JSONL report here instead of stdout")
    common.add_argument("--budget", type=int, help="largest rows*cols system solved exactly")
    sub = parser.add_subparsers(dest="command", required=True)
    lemmas = sub.add_parser("lemmas", parents=[common], help="binomial, matrix and polynomial lemmas")
    lemmas.add_argument("--suite", choices=LEMMA_SUITES)
    sub.add_parser("hecke", parents=[common], help="tree operator identities")
    sub.add_parser("epsilon", parents=[common], help="measure the valuation loss of T - a")
    sub.add_parser("classify", parents=[common], help="label weights against the known criteria")
    sub.add_parser("reduce", parents=[common], help="reduction modulo (x^q - x)^(d+1)")
    rep = sub.add_parser("replay", parents=[common], help="re-run records from a report")
    rep.add_argument("--record", required=True, help="JSONL report to replay")
    rep.add_argument("--failures-only", action="store_true")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out: TextIO = sys.stdout
    try:
        if args.command == "replay":
            records = read_records(args.record)
        else:
            cfg = load_config(args.command, args.config)
            if args.seed is not None:
                cfg["seed"] = args.seed
            if args.budget is not None:
                cfg["budget"] = args.budget
            if getattr(args, "suite", None):
                cfg["suite"] = args.suite
            _validate_seed(cfg["seed"])
            ENUMERATORS[args.command](cfg)  # validate before opening the sink
        if args.out:
            out = open(args.out, "w")
        try:
            if args.command == "replay":
                return replay(records, out, args.failures_only)
            return run(args.command, cfg, out)
        finally:
            if out is not sys.stdout:
                out.close()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_FAIL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
