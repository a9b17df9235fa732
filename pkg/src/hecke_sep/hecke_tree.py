"""Functions on the Bruhat-Tits tree with values in Sym^k and the Hecke
operator T = T+ + T-.

Vertices are addressed by keys ``(side, n, digits)``: side 0 holds the
cosets of (pi^n mu; 0 1), side 1 those of (1 0; pi mu pi^(n+1)), and
``digits`` are the residue indices of the Teichmuller expansion of mu.
The two level-0 vertices (0, 0, ()) and (1, 0, ()) are adjacent.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Optional

from .combinat import WeightDecomposition
from .local_arith import INF, LocalElem, RingSpec
from .sym_rep import SymVector, apply_U, tminus_local, tplus_local


class VertexKey(NamedTuple):
    side: int
    n: int
    digits: tuple[int, ...]

    @classmethod
    def make(cls, side: int, digits: Iterable[int]) -> "VertexKey":
        digits = tuple(digits)
        return cls(side, len(digits), digits)


ROOT = VertexKey(0, 0, ())
ROOT_1 = VertexKey(1, 0, ())


class TreeFunction(Mapping):
    """Finitely supported map from vertex keys to SymVectors of one weight.

    Exact zero vectors are never stored.
    """

    __slots__ = ("ring", "k", "_data")

    def __init__(self, ring: RingSpec, k: int, data: Optional[Mapping[VertexKey, SymVector]] = None):
        self.ring = ring
        self.k = k
        clean = {}
        for key, v in (data or {}).items():
            if v.k != k:
                raise ValueError("mixed weights in one tree function")
            if not v.is_zero():
                clean[VertexKey(*key)] = v
        self._data = clean

    def __getitem__(self, key) -> SymVector:
        return self._data[key]

    def get_vec(self, key) -> SymVector:
        return self._data.get(key) or SymVector.zero(self.ring, self.k)

    def __iter__(self) -> Iterator[VertexKey]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __repr__(self) -> str:
        return f"TreeFunction(k={self.k}, support={len(self._data)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeFunction):
            return NotImplemented
        return self.k == other.k and self._data == other._data

    def __add__(self, other: "TreeFunction") -> "TreeFunction":
        acc = _Accumulator(self.ring, self.k)
        for key, v in self.items():
            acc.add(key, v)
        for key, v in other.items():
            acc.add(key, v)
        return acc.result()

    def __sub__(self, other: "TreeFunction") -> "TreeFunction":
        return self + other.scale(-1)

    def scale(self, s: LocalElem | int) -> "TreeFunction":
        return TreeFunction(self.ring, self.k, {key: v.scale(s) for key, v in self.items()})

    def is_zero(self) -> bool:
        return not self._data

    def restrict(self, keep: Callable[[VertexKey], bool]) -> "TreeFunction":
        return TreeFunction(self.ring, self.k, {key: v for key, v in self.items() if keep(key)})

    def valuation(self) -> float:
        return min((v.valuation() for v in self.values()), default=INF)

    @classmethod
    def delta(cls, key: VertexKey, v: SymVector) -> "TreeFunction":
        return cls(v.ring, v.k, {key: v})


class _Accumulator:
    def __init__(self, ring: RingSpec, k: int):
        self.ring = ring
        self.k = k
        self.data: dict[VertexKey, SymVector] = {}

    def add(self, key: VertexKey, v: SymVector) -> None:
        cur = self.data.get(key)
        self.data[key] = v if cur is None else cur + v

    def result(self) -> TreeFunction:
        return TreeFunction(self.ring, self.k, self.data)


@dataclass(frozen=True)
class HeckeContext:
    ring: RingSpec
    k: int
    a: LocalElem

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("weight must be non-negative")
        if self.a.ring != self.ring:
            raise ValueError("eigenvalue lives in another ring")

    @property
    def weight(self) -> WeightDecomposition:
        return WeightDecomposition(self.k, self.ring.q)

    @property
    def d(self) -> int:
        return self.weight.d

    @property
    def r(self) -> int:
        return self.weight.r


# ---------------------------------------------------------------------------
# side-1 local formulas (mirror images of the side-0 ones)


def tplus_right(lam: LocalElem, v: SymVector) -> SymVector:
    """U o rho(w_lam w): coefficient j = pi^(k-j) sum_{i<=j} binom(k-i, j-i) (-lam)^(j-i) c_i."""
    ring, k = v.ring, v.k
    neg = -lam
    pw = [ring.one]
    for _ in range(k):
        pw.append(pw[-1] * neg)
    out = []
    for j in range(k + 1):
        acc = ring.zero
        for i in range(j + 1):
            if not v.coeffs[i].is_zero():
                acc = acc + comb(k - i, j - i) * pw[j - i] * v.coeffs[i]
        out.append(ring.pi_pow(k - j) * acc)
    return SymVector(ring, tuple(out))


def tminus_right(lam_mu: LocalElem, v: SymVector) -> SymVector:
    """rho(w_{-lam_mu}) o U o rho(w): coefficient j =
    sum_{i<=j} pi^i binom(k-i, j-i) lam_mu^(j-i) c_i."""
    ring, k = v.ring, v.k
    pw = [ring.one]
    for _ in range(k):
        pw.append(pw[-1] * lam_mu)
    out = []
    for j in range(k + 1):
        acc = ring.zero
        for i in range(j + 1):
            if not v.coeffs[i].is_zero():
                acc = acc + ring.pi_pow(i) * comb(k - i, j - i) * pw[j - i] * v.coeffs[i]
        out.append(acc)
    return SymVector(ring, tuple(out))


def _cross_right(v: SymVector) -> SymVector:
    """rho(w) o U o rho(w): coefficient j becomes pi^j c_j."""
    ring = v.ring
    return SymVector(ring, tuple(ring.pi_pow(j) * c for j, c in enumerate(v.coeffs)))


# ---------------------------------------------------------------------------
# the operator


def hecke_Tplus(f: TreeFunction) -> TreeFunction:
    ring = f.ring
    acc = _Accumulator(ring, f.k)
    teich = [ring.teichmuller_index(i) for i in range(ring.q)]
    for key, v in f.items():
        for lam in range(ring.q):
            child = VertexKey(key.side, key.n + 1, key.digits + (lam,))
            if key.side == 0:
                acc.add(child, tplus_local(teich[lam], v))
            else:
                acc.add(child, tplus_right(teich[lam], v))
    return acc.result()


def hecke_Tminus(f: TreeFunction) -> TreeFunction:
    ring = f.ring
    acc = _Accumulator(ring, f.k)
    for key, v in f.items():
        if key.n == 0:
            if key.side == 0:
                acc.add(ROOT_1, apply_U(v))
            else:
                acc.add(ROOT, _cross_right(v))
            continue
        lam_mu = ring.teichmuller_index(key.digits[-1])
        parent = VertexKey(key.side, key.n - 1, key.digits[:-1])
        if key.side == 0:
            acc.add(parent, tminus_local(-lam_mu, v))
        else:
            acc.add(parent, tminus_right(lam_mu, v))
    return acc.result()


def hecke_T(f: TreeFunction) -> TreeFunction:
    return hecke_Tplus(f) + hecke_Tminus(f)


def hecke_T_minus_a(ctx: HeckeContext, f: TreeFunction) -> TreeFunction:
    return hecke_T(f) - f.scale(ctx.a)


def beta_conjugate(f: TreeFunction) -> TreeFunction:
    """Translate a side-0 function by beta: (0, n, mu) -> (1, n, mu), v -> w v."""
    if any(key.side != 0 for key in f):
        raise ValueError("beta_conjugate expects a function supported on side 0")
    return beta_act(f)


def beta_act(f: TreeFunction) -> TreeFunction:
    """Translation by beta on either side; beta^2 is central and acts trivially."""
    return TreeFunction(
        f.ring,
        f.k,
        {VertexKey(1 - key.side, key.n, key.digits): v.swap() for key, v in f.items()},
    )


# ---------------------------------------------------------------------------
# geometry


def neighbors(key: VertexKey, q: int) -> list[VertexKey]:
    out = [VertexKey(key.side, key.n + 1, key.digits + (lam,)) for lam in range(q)]
    if key.n:
        out.append(VertexKey(key.side, key.n - 1, key.digits[:-1]))
    else:
        out.append(ROOT_1 if key.side == 0 else ROOT)
    return out


def distance_sphere(center: VertexKey, n: int, q: int) -> set[VertexKey]:
    """Vertices at graph distance exactly n, by breadth-first search."""
    frontier = {center}
    seen = {center}
    for _ in range(n):
        nxt = set()
        for key in frontier:
            for nb in neighbors(key, q):
                if nb not in seen:
                    seen.add(nb)
                    nxt.add(nb)
        frontier = nxt
    return frontier


def in_ball(key: VertexKey, N: int) -> bool:
    """B_N: side 0 up to level N, side 1 up to level N-1."""
    return key.n <= N if key.side == 0 else key.n <= N - 1


def ball_analysis(f: TreeFunction, N: int) -> tuple[bool, float]:
    outside = [v.valuation() for key, v in f.items() if not in_ball(key, N)]
    return not outside, min(outside, default=INF)


def sphere_keys(q: int, n: int, side: int = 0) -> list[VertexKey]:
    from itertools import product

    return [VertexKey(side, n, digits) for digits in product(range(q), repeat=n)]


# ---------------------------------------------------------------------------
# trivial weight


def spherical_T(n: int, f: TreeFunction) -> TreeFunction:
    """T_n via T_1 = adjacency, T_2 = T_1^2 - (q+1), T_n = T_1 T_{n-1} - q T_{n-2}."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if f.k != 0:
        raise ValueError("spherical operators act on weight 0")
    if n == 0:
        return f
    q = f.ring.q
    prev, cur = f, hecke_T(f)
    if n == 1:
        return cur
    prev, cur = cur, hecke_T(cur) - f.scale(q + 1)
    for _ in range(3, n + 1):
        prev, cur = cur, hecke_T(cur) - prev.scale(q)
    return cur


def indicator(ring: RingSpec, keys: Iterable[VertexKey]) -> TreeFunction:
    one = SymVector(ring, (ring.one,))
    return TreeFunction(ring, 0, {key: one for key in keys})


# ---------------------------------------------------------------------------
# sphere recursion


def sphere_coeffs_recursion(
    ctx: HeckeContext,
    f_prev: TreeFunction,
    f_cur: TreeFunction,
    f_next: TreeFunction,
    mu: tuple[int, ...],
) -> list[LocalElem]:
    """Coefficients C^m_{j,mu} of (T - a) f at the side-0 vertex mu of level m = len(mu),
    from the three sphere components at levels m-1, m, m+1."""
    ring, k = ctx.ring, ctx.k
    m = len(mu)
    if m < 1:
        raise ValueError("the recursion needs level m >= 1")
    for fn, level in ((f_prev, m - 1), (f_cur, m), (f_next, m + 1)):
        for key in fn:
            if key.side != 0 or key.n != level:
                raise ValueError(f"component expected on side-0 level {level}, found {key}")
    teich = [ring.teichmuller_index(i) for i in range(ring.q)]
    neg_lam_mu = -teich[mu[-1]]
    children = [f_next.get_vec(VertexKey(0, m + 1, mu + (lam,))) for lam in range(ring.q)]
    parent = f_prev.get_vec(VertexKey(0, m - 1, mu[:-1]))
    here = f_cur.get_vec(VertexKey(0, m, mu))
    out = []
    for j in range(k + 1):
        down = ring.zero
        for i in range(j, k + 1):
            inner = ring.zero
            for lam, vec in enumerate(children):
                inner = inner + vec.coeffs[i] * teich[lam] ** (i - j)
            down = down + ring.pi_pow(k - i) * comb(i, j) * inner
        up = ring.zero
        for i in range(j, k + 1):
            up = up + parent.coeffs[i] * comb(i, j) * neg_lam_mu ** (i - j)
        out.append(down + ring.pi_pow(j) * up - ctx.a * here.coeffs[j])
    return out


def random_tree_function(
    ring: RingSpec,
    k: int,
    rng,
    levels: Iterable[int],
    sides: tuple[int, ...] = (0,),
    density: float = 1.0,
) -> TreeFunction:
    data = {}
    for side in sides:
        for n in levels:
            for key in sphere_keys(ring.q, n, side):
                if rng.random() < density:
                    data[key] = SymVector.random(ring, k, rng)
    return TreeFunction(ring, k, data)
