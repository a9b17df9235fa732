"""Integer determinants, the binomial matrices, and elementary divisors over
O/pi^P.

Local matrices are stored as integer arrays of shape ``(rows, cols, dim)``
holding the canonical coordinates of each entry, so that elimination steps
run as numpy array operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence

import numpy as np

from .local_arith import INF, LocalElem, RingSpec, prime_power_decompose

IntMatrix = list[list[int]]


class PrecisionInsufficient(ArithmeticError):
    """An elementary divisor is indistinguishable from zero at precision P."""


# ---------------------------------------------------------------------------
# integer matrices


def det_exact(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def build_binomial_matrix(kind: int, **params: int) -> IntMatrix:
    """The three binomial matrices (rows and columns indexed from 1).

    kind 1, params (a, m): entry (l, i) = binom(a+l, i-1).
    kind 2, params (a, m, t): as kind 1 but columns i < t use binom(a+l+1, i-1).
    kind 3, params (k, q, m): entry (i, l) = binom(k-i+1, m+l(q-1)), where
    k = d*q + r with 1 <= d < p, d-1 <= r and 1 <= m <= d.
    """
    if kind == 1:
        a, m = params["a"], params["m"]
        if m < 1:
            raise ValueError("kind 1 needs m >= 1")
        return [[_binom_any(a + l, i - 1) for i in range(1, m + 1)] for l in range(1, m + 1)]
    if kind == 2:
        a, m, t = params["a"], params["m"], params["t"]
        if not 2 <= t <= m:
            raise ValueError("kind 2 needs 2 <= t <= m")
        return [
            [_binom_any(a + l + (1 if i < t else 0), i - 1) for i in range(1, m + 1)]
            for l in range(1, m + 1)
        ]
    if kind == 3:
        k, q, m = params["k"], params["q"], params["m"]
        p, _ = prime_power_decompose(q)
        d, r = divmod(k, q)
        if not (1 <= d < p and d - 1 <= r and 1 <= m <= d):
            raise ValueError(f"kind 3 needs 1 <= d < p, d-1 <= r, 1 <= m <= d (k={k}, q={q}, m={m})")
        return [[comb(k - i + 1, m + l * (q - 1)) for l in range(1, m + 1)] for i in range(1, m + 1)]
    raise ValueError(f"unknown matrix kind {kind}")


def _binom_any(n: int, k: int) -> int:
    """binom(n, k) for integer n of any sign via the falling factorial."""
    if k < 0:
        return 0
    num = 1
    for j in range(k):
        num *= n - j
    den = 1
    for j in range(2, k + 1):
        den *= j
    return num // den


def kind3_cases(primes: Sequence[int] = (2, 3, 5)) -> list[tuple[int, int, int]]:
    """All valid (k, q, m) with q in {p, p^2} and k <= q^2/2."""
    out = []
    for p in primes:
        for q in (p, p * p):
            for k in range(q * q // 2 + 1):
                d, r = divmod(k, q)
                if 1 <= d < p and d - 1 <= r:
                    out.extend((k, q, m) for m in range(1, d + 1))
    return out


# ---------------------------------------------------------------------------
# vectorised arithmetic on coordinate arrays


class ArrayOps:
    """Element-wise ring operations on arrays of shape (..., dim)."""

    def __init__(self, ring: RingSpec):
        self.ring = ring
        self.mod = ring.modulus
        self.dim = ring.dim
        self.dtype = np.int64 if self.mod < 2**31 else object
        S = ring.structure
        self.terms = [
            (a, b, c, S[a][b][c])
            for a in range(self.dim)
            for b in range(self.dim)
            for c in range(self.dim)
            if S[a][b][c]
        ]
        self.p_over_pi = np.array(ring._inv_pi_over_p.coords, dtype=self.dtype)

    def array(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=self.dtype) % self.mod

    def mul(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        mod = self.mod
        if self.dim == 1:
            return X * Y % mod
        X, Y = np.broadcast_arrays(X, Y)
        out = np.zeros(X.shape, dtype=self.dtype)
        for a, b, c, s in self.terms:
            out[..., c] = (out[..., c] + (X[..., a] * Y[..., b] % mod) * s) % mod
        return out

    def valuation(self, X: np.ndarray) -> np.ndarray:
        """Valuations as integers, with P standing for 'at least P'."""
        ring = self.ring
        p, f, e, s, P = ring.p, ring.f, ring.e, ring.s, ring.P
        vp = np.zeros(X.shape, dtype=np.int64)
        pk = 1
        for _ in range(s):
            pk *= p
            vp += (X % pk == 0)
        best = np.full(X.shape[:-1], P, dtype=np.int64)
        for b in range(e):
            block = vp[..., b * f : (b + 1) * f].min(axis=-1)
            cand = np.where(block >= s, P, e * block + b)
            best = np.minimum(best, cand)
        return best

    def div_pi(self, X: np.ndarray, n: int) -> np.ndarray:
        """Exact quotient by pi^n of entries with valuation >= n."""
        f, p = self.ring.f, self.ring.p
        for _ in range(n):
            low = np.zeros_like(X)
            low[..., :f] = X[..., :f] // p
            shifted = np.zeros_like(X)
            shifted[..., : self.dim - f] = X[..., f:]
            X = (self.mul(low, self.p_over_pi) + shifted) % self.mod
        return X


def array_ops(ring: RingSpec) -> ArrayOps:
    ops = ring._cache.get("array_ops")
    if ops is None:
        ops = ring._cache["array_ops"] = ArrayOps(ring)
    return ops


@dataclass
class LocalMatrix:
    ring: RingSpec
    data: np.ndarray  # (rows, cols, dim)

    @classmethod
    def from_elems(cls, ring: RingSpec, rows: Sequence[Sequence[LocalElem | int]]) -> "LocalMatrix":
        ops = array_ops(ring)
        ncols = len(rows[0]) if rows else 0
        data = np.zeros((len(rows), ncols, ring.dim), dtype=ops.dtype)
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            for j, x in enumerate(row):
                if isinstance(x, int):
                    x = ring.from_int(x)
                elif x.ring != ring:
                    raise ValueError("entries from different rings")
                data[i, j] = x.coords
        return cls(ring, data)

    @classmethod
    def zeros(cls, ring: RingSpec, rows: int, cols: int) -> "LocalMatrix":
        ops = array_ops(ring)
        return cls(ring, np.zeros((rows, cols, ring.dim), dtype=ops.dtype))

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "LocalMatrix":
        M = cls.zeros(ring, n, n)
        for i in range(n):
            M.data[i, i, 0] = 1
        return M

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def entry(self, i: int, j: int) -> LocalElem:
        return self.ring.elem(int(c) for c in self.data[i, j])

    def to_elems(self) -> list[list[LocalElem]]:
        r, c = self.shape
        return [[self.entry(i, j) for j in range(c)] for i in range(r)]

    def __matmul__(self, other: "LocalMatrix") -> "LocalMatrix":
        ops = array_ops(self.ring)
        r, n = self.shape
        n2, c = other.shape
        if n != n2:
            raise ValueError("shape mismatch")
        out = np.zeros((r, c, self.ring.dim), dtype=ops.dtype)
        for k in range(n):
            out = (out + ops.mul(self.data[:, k, None, :], other.data[None, k, :, :])) % ops.mod
        return LocalMatrix(self.ring, out)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Matrix times a batch of vectors x of shape (batch, cols, dim)."""
        ops = array_ops(self.ring)
        prod = ops.mul(self.data[None, :, :, :], x[:, None, :, :])
        return prod.sum(axis=2) % ops.mod

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalMatrix):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self.data, other.data)


# ---------------------------------------------------------------------------
# elementary divisors


@dataclass(frozen=True)
class DivisorProfile:
    divisors: tuple  # non-decreasing ints, INF for entries that vanish at precision P
    rows: int
    cols: int
    P: int

    @property
    def rank(self) -> int:
        return sum(1 for a in self.divisors if a != INF)

    @property
    def kernel_dim(self) -> int:
        """Dimension of the kernel detected at precision P."""
        return self.cols - self.rank

    def as_json(self) -> list:
        return [int(a) if a != INF else ">=P" for a in self.divisors]


@dataclass
class SmithForm:
    profile: DivisorProfile
    U: LocalMatrix
    D: LocalMatrix
    V: LocalMatrix
    V_inv: LocalMatrix


def snf_local(M: LocalMatrix, transforms: bool = False):
    """Elementary divisors of M over O/pi^P.

    Pivots are minimal-valuation entries, first in row-major order.  Returns a
    DivisorProfile, or a SmithForm (with M = U D V) when ``transforms`` is set.
    """
    ring = M.ring
    ops = array_ops(ring)
    P, mod = ring.P, ops.mod
    A = M.data.copy()
    rows, cols = M.shape
    vals = ops.valuation(A) if A.size else np.zeros((rows, cols), dtype=np.int64)
    active = np.ones(rows, dtype=bool)
    if transforms:
        U = LocalMatrix.identity(ring, rows).data
        V = LocalMatrix.identity(ring, cols).data
        W = LocalMatrix.identity(ring, cols).data  # accumulated column operations, V^{-1}
    pivots = []
    for _ in range(min(rows, cols)):
        masked = np.where(active[:, None], vals, P)
        flat = int(np.argmin(masked))
        r, c = divmod(flat, cols)
        v = int(masked[r, c])
        if v >= P:
            break
        pivot = ring.elem(int(x) for x in A[r, c])
        unit = pivot.div_pi(v)
        unit_inv = np.array(unit.inverse().coords, dtype=ops.dtype)
        touched = np.nonzero(active & (vals[:, c] < P))[0]
        touched = touched[touched != r]
        if touched.size:
            mult = ops.mul(ops.div_pi(A[touched, c], v), unit_inv)
            A[touched] = (A[touched] - ops.mul(mult[:, None, :], A[r][None, :, :])) % mod
            vals[touched] = ops.valuation(A[touched])
            if transforms:
                # U <- U E^{-1}: column r gains sum_i mult_i * column i
                U[:, r] = (U[:, r] + ops.mul(U[:, touched], mult[None]).sum(axis=1)) % mod
        if transforms:
            others = np.nonzero(vals[r] < P)[0]
            others = others[others != c]
            if others.size:
                dmult = ops.mul(ops.div_pi(A[r, others], v), unit_inv)
                # column ops only change row r because column c is now clear
                A[r, others] = 0
                V[c] = (V[c] + ops.mul(dmult[:, None, :], V[others]).sum(axis=0)) % mod
                W[:, others] = (W[:, others] - ops.mul(W[:, c, None, :], dmult[None])) % mod
            unit_arr = np.array(unit.coords, dtype=ops.dtype)
            A[r] = ops.mul(A[r], unit_inv[None])
            U[:, r] = ops.mul(U[:, r], unit_arr[None])
        active[r] = False
        vals[r] = P
        pivots.append((r, c, v))
    divisors = [v for _, _, v in pivots] + [INF] * (min(rows, cols) - len(pivots))
    profile = DivisorProfile(tuple(divisors), rows, cols, P)
    if not transforms:
        return profile
    row_order = [r for r, _, _ in pivots] + [i for i in range(rows) if active[i]]
    used_cols = {c for _, c, _ in pivots}
    col_order = [c for _, c, _ in pivots] + [j for j in range(cols) if j not in used_cols]
    D = LocalMatrix.zeros(ring, rows, cols)
    for t, (_, _, v) in enumerate(pivots):
        D.data[t, t] = ring.pi_pow(v).coords
    return SmithForm(
        profile,
        LocalMatrix(ring, U[:, row_order]),
        D,
        LocalMatrix(ring, V[col_order]),
        LocalMatrix(ring, W[:, col_order]),
    )


def preimage_bound(M: LocalMatrix) -> int:
    """Least eps with M x = 0 mod pi^n  =>  x = 0 mod pi^(n - eps)."""
    profile = snf_local(M)
    if profile.kernel_dim:
        raise PrecisionInsufficient(
            f"{profile.kernel_dim} divisor(s) vanish at precision P={M.ring.P}"
        )
    return max(profile.divisors, default=0)


def brute_force_preimage_bound(M: LocalMatrix, limit: int = 2**20, chunk: int = 2**14) -> int:
    """max over nonzero x of min(v(Mx), P) - v(x), by full enumeration."""
    ring = M.ring
    ops = array_ops(ring)
    rows, cols = M.shape
    size = ring.modulus ** (ring.dim * cols)
    if size > limit:
        raise ValueError(f"search space {size} exceeds limit {limit}")
    P = ring.P
    best = 0
    digits = ring.dim * cols
    for start in range(1, size, chunk):
        idx = np.arange(start, min(size, start + chunk), dtype=np.int64)
        coords = np.zeros((idx.size, digits), dtype=ops.dtype)
        rest = idx.copy()
        for t in range(digits):
            coords[:, t] = rest % ring.modulus
            rest //= ring.modulus
        x = coords.reshape(idx.size, cols, ring.dim)
        vx = ops.valuation(x).min(axis=1)
        if rows:
            vmx = ops.valuation(M.apply(x)).min(axis=1)
        else:
            vmx = np.full(idx.size, P)
        best = max(best, int((np.minimum(vmx, P) - vx).max()))
    return best


def random_unimodular(ring: RingSpec, n: int, rng) -> LocalMatrix:
    """Product of a random unit lower and upper triangular matrix."""
    L = [[ring.zero] * n for _ in range(n)]
    R = [[ring.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i > j:
                L[i][j] = ring.random_elem(rng)
            elif i < j:
                R[i][j] = ring.random_elem(rng)
        L[i][i] = ring.one
        unit = ring.random_elem(rng)
        while not unit.is_unit():
            unit = ring.random_elem(rng)
        R[i][i] = unit
    return LocalMatrix.from_elems(ring, L) @ LocalMatrix.from_elems(ring, R)


def planted_matrix(ring: RingSpec, rows: int, cols: int, divisors: Sequence[int], rng) -> LocalMatrix:
    D = [[ring.zero] * cols for _ in range(rows)]
    for t, a in enumerate(divisors):
        D[t][t] = ring.pi_pow(a)
    U = random_unimodular(ring, rows, rng)
    V = random_unimodular(ring, cols, rng)
    return U @ LocalMatrix.from_elems(ring, D) @ V


def matrix_lemma_scan(m_max: int = 8, a_range: int = 10) -> dict[str, Optional[tuple]]:
    """Run the three nonsingularity scans; map scan name to first failure."""
    failures: dict[str, Optional[tuple]] = {"kind1": None, "kind2": None, "kind3": None}
    for m, a in itertools.product(range(1, m_max + 1), range(-a_range, a_range + 1)):
        if failures["kind1"] is None and det_exact(build_binomial_matrix(1, a=a, m=m)) != 1:
            failures["kind1"] = (a, m)
        for t in range(2, m + 1):
            if failures["kind2"] is None and det_exact(build_binomial_matrix(2, a=a, m=m, t=t)) != 1:
                failures["kind2"] = (a, m, t)
    for k, q, m in kind3_cases():
        p, _ = prime_power_decompose(q)
        if det_exact(build_binomial_matrix(3, k=k, q=q, m=m)) % p == 0:
            failures["kind3"] = (k, q, m)
            break
    return failures
