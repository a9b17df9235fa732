"""Measuring how much (T - a) can lose in valuation.

For f supported on the side-0 spheres S_N .. S_{N+M}, the coefficients of
(T - a) f strictly outside the ball B_N form a linear map into the spheres
S_{N+1} .. S_{N+M+1}.  Its largest elementary divisor is the least eps such
that (T - a) f = 0 mod pi^n outside B_N forces f = 0 mod pi^(n - eps).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

import numpy as np

from .exact_matrix import (
    LocalMatrix,
    array_ops,
    snf_local,
)
from .hecke_tree import (
    HeckeContext,
    TreeFunction,
    VertexKey,
    hecke_T_minus_a,
    in_ball,
    sphere_keys,
)
from .local_arith import INF, LocalElem, RingSpec, make_ring
from .sym_rep import SymVector

DEFAULT_BUDGET = 4_000_000  # rows * cols


@dataclass(frozen=True)
class ExperimentSpec:
    ring: RingSpec
    k: int
    a: LocalElem
    N: int
    M: int
    mode: str = "snf"
    seed: int = 0
    sample_count: int = 200

    def __post_init__(self) -> None:
        if self.N < 1 or self.M < 0:
            raise ValueError("need N >= 1 and M >= 0")
        if self.mode not in ("snf", "sample"):
            raise ValueError(f"unknown mode {self.mode!r}")
        va = self.a.valuation()
        d = self.k // self.ring.q
        if va == INF or self.ring.P <= d + va + 2:
            raise ValueError(
                f"precision P={self.ring.P} must exceed d + v(a) + 2 = {d + va + 2}"
            )

    @property
    def P(self) -> int:
        return self.ring.P

    @property
    def context(self) -> HeckeContext:
        return HeckeContext(self.ring, self.k, self.a)


# ---------------------------------------------------------------------------
# the truncated system


def system_shape(q: int, k: int, N: int, M: int) -> tuple[int, int]:
    cols = (k + 1) * sum(q ** (N + m) for m in range(M + 1))
    rows = (k + 1) * sum(q ** (N + m) for m in range(1, M + 2))
    return rows, cols


def _layout(q: int, k: int, levels: Sequence[int]) -> dict[tuple[VertexKey, int], int]:
    index = {}
    for n in levels:
        for key in sphere_keys(q, n):
            for j in range(k + 1):
                index[(key, j)] = len(index)
    return index


def column_layout(q: int, k: int, N: int, M: int) -> dict[tuple[VertexKey, int], int]:
    return _layout(q, k, range(N, N + M + 1))


def row_layout(q: int, k: int, N: int, M: int) -> dict[tuple[VertexKey, int], int]:
    return _layout(q, k, range(N + 1, N + M + 2))


def build_linear_system(
    ctx: HeckeContext, N: int, M: int, budget: Optional[int] = None
) -> LocalMatrix:
    ring, k, q = ctx.ring, ctx.k, ctx.ring.q
    rows, cols = system_shape(q, k, N, M)
    if budget is not None and rows * cols > budget:
        raise MemoryError(f"system of shape {rows}x{cols} exceeds budget {budget}")
    ops = array_ops(ring)
    data = np.zeros((rows, cols, ring.dim), dtype=ops.dtype)
    col_index = column_layout(q, k, N, M)
    row_index = row_layout(q, k, N, M)
    teich = [ring.teichmuller_index(i) for i in range(q)]
    # child contribution of basis e_i: pi^j binom(i,j) (-[lam])^(i-j)
    plus = [
        [[ring.pi_pow(j) * comb(i, j) * (-teich[lam]) ** (i - j) if j <= i else ring.zero for j in range(k + 1)] for i in range(k + 1)]
        for lam in range(q)
    ]
    # parent contribution of basis e_i: pi^(k-i) binom(i,j) [lam_mu]^(i-j)
    minus = [
        [[ring.pi_pow(k - i) * comb(i, j) * teich[lam] ** (i - j) if j <= i else ring.zero for j in range(k + 1)] for i in range(k + 1)]
        for lam in range(q)
    ]
    neg_a = (-ctx.a).coords
    for (key, i), col in col_index.items():
        for lam in range(q):
            child = VertexKey(0, key.n + 1, key.digits + (lam,))
            for j in range(i + 1):
                data[row_index[(child, j)], col] = plus[lam][i][j].coords
        if key.n >= N + 2:
            parent = VertexKey(0, key.n - 1, key.digits[:-1])
            for j in range(i + 1):
                data[row_index[(parent, j)], col] = minus[key.digits[-1]][i][j].coords
        if key.n >= N + 1:
            data[row_index[(key, i)], col] = neg_a
    return LocalMatrix(ring, data)


def function_to_vector(f: TreeFunction, N: int, M: int) -> np.ndarray:
    """Coefficient vector of f in the column layout, shape (1, cols, dim)."""
    ring, k = f.ring, f.k
    index = column_layout(ring.q, k, N, M)
    ops = array_ops(ring)
    x = np.zeros((1, len(index), ring.dim), dtype=ops.dtype)
    for key, v in f.items():
        for j, c in enumerate(v.coeffs):
            if (key, j) not in index:
                raise ValueError(f"{key} lies outside the supported spheres")
            x[0, index[(key, j)]] = c.coords
    return x


def vector_to_function(ring: RingSpec, k: int, x: np.ndarray, layout: dict) -> TreeFunction:
    coeffs: dict[VertexKey, list[LocalElem]] = {}
    for (key, j), pos in layout.items():
        coeffs.setdefault(key, [ring.zero] * (k + 1))[j] = ring.elem(int(c) for c in x[pos])
    return TreeFunction(ring, k, {key: SymVector(ring, tuple(c)) for key, c in coeffs.items()})


def random_sphere_function(
    ring: RingSpec, k: int, N: int, M: int, rng: random.Random, max_val: int = 0
) -> TreeFunction:
    data = {}
    for n in range(N, N + M + 1):
        for key in sphere_keys(ring.q, n):
            v = rng.randint(0, max_val) if max_val else 0
            data[key] = SymVector.random(ring, k, rng, min_val=min(v, ring.P))
    return TreeFunction(ring, k, data)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class WeightProfile:
    """Weights indexed by embeddings (l, t): l the Frobenius twist on the
    unramified part (0 <= l < f), t the choice of Eisenstein root (0 <= t < e)."""

    p: int
    f: int
    e: int
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != self.e * self.f or any(w < 0 for w in self.weights):
            raise ValueError("need e*f non-negative weights")

    @classmethod
    def single(cls, ring: RingSpec, k: int) -> "WeightProfile":
        return cls(ring.p, ring.f, ring.e, (k,) + (0,) * (ring.dim - 1))

    @property
    def q(self) -> int:
        return self.p**self.f

    def embedding(self, idx: int) -> tuple[int, int]:
        return divmod(idx, self.e)

    @property
    def support(self) -> list[int]:
        """Embeddings with nonzero weight."""
        return [i for i, w in enumerate(self.weights) if w]

    def frobenius_class(self, l: int) -> list[int]:
        return [i for i in self.support if self.embedding(i)[0] == l]

    def gamma(self, idx: int) -> int:
        return self.embedding(idx)[0]

    def v_sigma(self, idx: int) -> int:
        l = self.gamma(idx)
        for i in range(1, self.f + 1):
            if self.frobenius_class((l + i) % self.f):
                return i
        raise AssertionError("embedding with nonzero weight must lie in some class")


@dataclass
class Classification:
    labels: list[str]
    predicted_epsilon: Optional[int]
    d: int
    r: int
    v_a: float

    @property
    def covered(self) -> bool:
        return any(lab.startswith("Thm") for lab in self.labels)


def classify(profile: WeightProfile, v_a: float) -> Classification:
    """Every applicable label, with the smallest eps predicted by a theorem label."""
    labels = []
    support = profile.support
    if all(len(profile.frobenius_class(l)) <= 1 for l in range(profile.f)) and all(
        profile.weights[s] + 1 <= profile.p ** profile.v_sigma(s) for s in support
    ):
        labels.append("deIeso-injective")
    q, p, e = profile.q, profile.p, profile.e
    k = sum(profile.weights)
    d, r = divmod(k, q)
    if profile.e == 1 and profile.f == 1 and len(support) <= 1 and k < 2 * p - 1:
        labels.append("Breuil")
    predictions = []
    if len(support) <= 1:
        half_q2 = Fraction(q * q, 2)
        if k <= half_q2 and r < q - d and 0 <= v_a <= 1:
            labels.append("Thm(i)")
            predictions.append(d + v_a)
        if k <= half_q2 and 2 * v_a - 1 <= r < q - d and 1 <= v_a <= e:
            labels.append("Thm(ii)")
            predictions.append(d + v_a)
        if k <= min(p * q - 1, half_q2) and d - 1 <= r and v_a >= d:
            labels.append("Thm(iii)")
            predictions.append(d)
    if not any(lab.startswith("Thm") for lab in labels) and "deIeso-injective" not in labels and "Breuil" not in labels:
        labels.append("uncovered")
    pred = min(predictions) if predictions else None
    if pred is not None and pred != INF:
        pred = int(pred)
    return Classification(labels, pred, d, r, v_a)


def classify_weight(ring: RingSpec, k: int, a: LocalElem) -> Classification:
    return classify(WeightProfile.single(ring, k), a.valuation())


# ---------------------------------------------------------------------------
# Newton polygon of X^2 - a X + q pi^k


@dataclass(frozen=True)
class SmoothParams:
    v_lambda1: Fraction
    v_lambda2: Fraction
    slopes: tuple[Fraction, Fraction]
    bullet_lambda2: bool  # v(lambda2^-1) + k >= 0
    bullet_q_lambda1: bool  # v(q lambda1^-1) + k >= 0
    bullet_sum: Fraction  # v(lambda1^-1) + v(lambda2^-1) + k, always 0


def newton_smooth_params(k: int, a: LocalElem) -> SmoothParams:
    """Valuations of lambda1, lambda2 with lambda1 lambda2 = pi^k and
    lambda1 + q lambda2 = a.  lambda1 and q lambda2 are the roots of
    X^2 - a X + q pi^k; lambda1 is taken to be the root of smaller valuation."""
    ring = a.ring
    vq = ring.e * ring.f
    const = k + vq
    va = a.valuation()
    if va == INF and ring.P * 2 < const:
        raise ValueError("a vanishes at precision P and the polygon is ambiguous")
    if va * 2 < const:
        small, large = Fraction(va), Fraction(const - va)
    else:
        small = large = Fraction(const, 2)
    v1 = small
    v2 = large - vq
    return SmoothParams(
        v_lambda1=v1,
        v_lambda2=v2,
        slopes=(-small, -large),
        bullet_lambda2=(-v2 + k) >= 0,
        bullet_q_lambda1=(vq - v1 + k) >= 0,
        bullet_sum=-v1 - v2 + k,
    )


# ---------------------------------------------------------------------------
# epsilon scan


@dataclass
class EpsilonPoint:
    N: int
    M: int
    epsilon_hat: Optional[int]
    divisors: list
    mode: str
    lower_bound: bool
    rows: int
    cols: int
    runtime_ms: float
    error: Optional[str] = None
    histogram: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        return {
            "N": self.N,
            "M": self.M,
            "epsilon_hat": self.epsilon_hat,
            "divisors": self.divisors,
            "mode": self.mode,
            "lower_bound": self.lower_bound,
            "shape": [self.rows, self.cols],
            "histogram": self.histogram,
            "error": self.error,
        }


@dataclass
class EpsilonReport:
    points: list[EpsilonPoint]
    predicted_epsilon: Optional[int]
    labels: list[str]
    P: int

    @property
    def epsilon_hat(self) -> Optional[int]:
        vals = [pt.epsilon_hat for pt in self.points if pt.epsilon_hat is not None]
        return max(vals) if vals else None

    @property
    def passed(self) -> bool:
        if any(pt.error for pt in self.points):
            return False
        if self.predicted_epsilon is None:
            return True
        return all(pt.epsilon_hat <= self.predicted_epsilon for pt in self.points)


def divisor_histogram(divisors: Sequence) -> dict[str, int]:
    hist: dict[str, int] = {}
    for a in divisors:
        key = ">=P" if a == INF else str(int(a))
        hist[key] = hist.get(key, 0) + 1
    return dict(sorted(hist.items(), key=lambda kv: (kv[0] == ">=P", kv[0].zfill(6))))


def epsilon_point(spec: ExperimentSpec, budget: Optional[int] = DEFAULT_BUDGET) -> EpsilonPoint:
    """One (N, M) measurement; snf mode falls back to sampling above the budget."""
    start = time.perf_counter()
    ctx = spec.context
    rows, cols = system_shape(spec.ring.q, spec.k, spec.N, spec.M)
    mode = spec.mode
    if mode == "snf" and budget is not None and rows * cols > budget:
        mode = "sample"
    if mode == "snf":
        system = build_linear_system(ctx, spec.N, spec.M)
        profile = snf_local(system)
        error = None
        eps = None
        if profile.kernel_dim:
            error = f"precision insufficient: raise P above {spec.P}"
        else:
            eps = int(max(profile.divisors, default=0))
        return EpsilonPoint(
            spec.N, spec.M, eps, profile.as_json(), "snf", False, rows, cols,
            (time.perf_counter() - start) * 1000, error, divisor_histogram(profile.divisors),
        )
    eps = sample_epsilon(spec)
    return EpsilonPoint(
        spec.N, spec.M, eps, [], "sample", True, rows, cols, (time.perf_counter() - start) * 1000
    )


def sample_epsilon(spec: ExperimentSpec) -> int:
    """Lower bound on eps from random f: min(v((T-a)f outside B_N), P) - v(f)."""
    rng = random.Random(spec.seed)
    ctx = spec.context
    best = 0
    for _ in range(spec.sample_count):
        f = random_sphere_function(spec.ring, spec.k, spec.N, spec.M, rng, max_val=2)
        if f.is_zero():
            continue
        out = hecke_T_minus_a(ctx, f).restrict(lambda key: not in_ball(key, spec.N))
        best = max(best, int(min(out.valuation(), spec.P) - f.valuation()))
    return best


def epsilon_scan(
    ring_params: tuple[int, int, int],
    k: int,
    a_valuation: int,
    a_unit: int = 1,
    N_list: Sequence[int] = (1, 2),
    M_max: int = 2,
    mode: str = "snf",
    seed: int = 0,
    P: Optional[int] = None,
    budget: Optional[int] = DEFAULT_BUDGET,
    sample_count: int = 200,
) -> EpsilonReport:
    """Scan (N, M) for a = pi^v * unit at weight k."""
    p, f, e = ring_params
    q = p**f
    d = k // q
    if P is None:
        P = default_precision(d, a_valuation, e)
    ring = make_ring(p, f, e, P)
    if a_unit % p == 0:
        raise ValueError("a_unit must be prime to p")
    a = ring.pi_pow(a_valuation) * a_unit
    cls = classify_weight(ring, k, a)
    points = []
    for N in N_list:
        for M in range(M_max + 1):
            spec = ExperimentSpec(ring, k, a, N, M, mode, seed, sample_count)
            points.append(epsilon_point(spec, budget))
    return EpsilonReport(points, cls.predicted_epsilon, cls.labels, P)


def default_precision(d: int, v_a: int, e: int) -> int:
    """d + v(a) + 4, rounded up to a multiple of e."""
    P = d + v_a + 4
    return -(-P // e) * e


def theorem_grid(
    rings: Sequence[tuple[int, int, int]] = ((2, 1, 1), (3, 1, 1), (2, 1, 2), (3, 1, 2)),
    v_max: int = 3,
) -> list[dict]:
    """Every (ring, k, v(a)) with k <= q^2/2 and v(a) <= v_max covered by a theorem label."""
    out = []
    for p, f, e in rings:
        q = p**f
        for k in range(q * q // 2 + 1):
            for v in range(v_max + 1):
                profile = WeightProfile(p, f, e, (k,) + (0,) * (e * f - 1))
                cls = classify(profile, v)
                if cls.covered:
                    out.append(
                        {"ring": (p, f, e), "k": k, "a_valuation": v, "labels": cls.labels,
                         "predicted_epsilon": cls.predicted_epsilon}
                    )
    return out


# ---------------------------------------------------------------------------
# kernel sampling and the A/B/C/D predicates


def near_kernel_function(ctx: HeckeContext, N: int, M: int, n: int, rng: random.Random) -> TreeFunction:
    """Random f on S_N..S_{N+M} with (T - a) f = 0 mod pi^n outside B_N."""
    ring = ctx.ring
    system = build_linear_system(ctx, N, M)
    sf = snf_local(system, transforms=True)
    ops = array_ops(ring)
    cols = system.shape[1]
    y = np.zeros((cols, ring.dim), dtype=ops.dtype)
    for t in range(cols):
        a_t = sf.profile.divisors[t] if t < len(sf.profile.divisors) else INF
        shift = 0 if a_t == INF else max(0, n - int(a_t))
        y[t] = ring.random_elem(rng, min(shift, ring.P)).coords
    x = sf.V_inv.apply(y[None])[0]
    return vector_to_function(ring, ctx.k, x, column_layout(ring.q, ctx.k, N, M))


def abcd_diagnostics(ctx: HeckeContext, f: TreeFunction, N: int, M: int, n: int) -> list[dict]:
    """Evaluate the four predicates on each sphere m = 0..M+1 (level N + m)."""
    ring, k, a = ctx.ring, ctx.k, ctx.a
    q, d = ring.q, ctx.d
    va = a.valuation()
    if va == INF or n + va > ring.P:
        raise ValueError("n + v(a) must not exceed the precision")
    a2 = a * a

    def in_scaled(x: LocalElem, m_exp: int, scale: LocalElem) -> bool:
        # x in (pi^m_exp / scale) O, evaluated as v(scale * x) >= m_exp
        return m_exp <= 0 or (scale * x).valuation() >= m_exp

    table = []
    for m in range(M + 2):
        A = B = C = D = True
        for key in sphere_keys(q, N + m):
            c = f.get_vec(key).coeffs
            broad = all(in_scaled(c[i], n - d, a) for i in range(k + 1))
            A = A and broad and all(in_scaled(c[j], n - j, a) for j in range(min(d, k) + 1))
            B = B and broad and all(in_scaled(c[k - j], n - j, a) for j in range(min(d, k) + 1))
            for j in range(d + 1):
                for i in range(j + 1, j + q):
                    if i > k:
                        continue
                    acc = ring.zero
                    for s in range(j, (k - i) // (q - 1) + 1):
                        acc = acc + comb(s, j) * c[i + s * (q - 1)]
                    C = C and in_scaled(acc, n - j, a)
            D = D and all(in_scaled(c[i], n, a2) for i in range(k + 1))
        table.append({"m": m, "A": A, "B": B, "C": C, "D": D})
    return table
