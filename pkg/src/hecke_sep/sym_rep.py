"""Weight-k module Sym^k in the monomial basis x^(k-i) y^i, the integral
2x2 action, the diagonal operator U and the explicit local formulas for the
two halves of the Hecke operator."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .local_arith import INF, LocalElem, RingSpec, ResidueElem


@dataclass(frozen=True)
class SymVector:
    """Coefficients c_0..c_k on the basis e_{k,i} = x^(k-i) y^i."""

    ring: RingSpec
    coeffs: tuple[LocalElem, ...]

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, ring: RingSpec, k: int) -> "SymVector":
        return cls(ring, (ring.zero,) * (k + 1))

    @classmethod
    def basis(cls, ring: RingSpec, k: int, i: int) -> "SymVector":
        c = [ring.zero] * (k + 1)
        c[i] = ring.one
        return cls(ring, tuple(c))

    @classmethod
    def from_ints(cls, ring: RingSpec, values: Sequence[int]) -> "SymVector":
        return cls(ring, tuple(ring.from_int(v) for v in values))

    @classmethod
    def random(cls, ring: RingSpec, k: int, rng, min_val: int = 0) -> "SymVector":
        return cls(ring, tuple(ring.random_elem(rng, min_val) for _ in range(k + 1)))

    def __add__(self, other: "SymVector") -> "SymVector":
        return SymVector(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "SymVector") -> "SymVector":
        return SymVector(self.ring, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "SymVector":
        return SymVector(self.ring, tuple(-a for a in self.coeffs))

    def scale(self, s: LocalElem | int) -> "SymVector":
        return SymVector(self.ring, tuple(a * s for a in self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def valuation(self) -> float:
        return min((c.valuation() for c in self.coeffs), default=INF)

    def swap(self) -> "SymVector":
        """Action of w = (0 1; 1 0): exchange x and y."""
        return SymVector(self.ring, self.coeffs[::-1])


@dataclass(frozen=True)
class Mat2:
    a: LocalElem
    b: LocalElem
    c: LocalElem
    d: LocalElem

    @classmethod
    def of(cls, ring: RingSpec, a, b, c, d) -> "Mat2":
        conv = lambda x: ring.from_int(x) if isinstance(x, int) else x  # noqa: E731
        return cls(conv(a), conv(b), conv(c), conv(d))

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def det(self) -> LocalElem:
        return self.a * self.d - self.b * self.c

    @property
    def ring(self) -> RingSpec:
        return self.a.ring


def mat_w(ring: RingSpec) -> Mat2:
    return Mat2.of(ring, 0, 1, 1, 0)


def mat_w_lambda(lam: LocalElem) -> Mat2:
    """(0 1; 1 -lam)."""
    ring = lam.ring
    return Mat2(ring.zero, ring.one, ring.one, -lam)


def mat_alpha(ring: RingSpec) -> Mat2:
    return Mat2(ring.one, ring.zero, ring.zero, ring.uniformizer)


def mat_beta(ring: RingSpec) -> Mat2:
    return Mat2(ring.zero, ring.one, ring.uniformizer, ring.zero)


def _linear_powers(u: LocalElem, v: LocalElem, n: int) -> list[list[LocalElem]]:
    """Coefficient lists (by power of y) of (u x + v y)^e for e = 0..n."""
    ring = u.ring
    out = [[ring.one]]
    for _ in range(n):
        prev = out[-1]
        nxt = [ring.zero] * (len(prev) + 1)
        for i, c in enumerate(prev):
            nxt[i] = nxt[i] + c * u
            nxt[i + 1] = nxt[i + 1] + c * v
        out.append(nxt)
    return out


def act(g: Mat2, v: SymVector) -> SymVector:
    """x^(k-i) y^i  ->  (a x + c y)^(k-i) (b x + d y)^i.

    A common power of pi in the entries is central and acts trivially, so it
    is divided out first; the result is then meaningful modulo pi^(P - s).
    """
    ring = v.ring
    entries = (g.a, g.b, g.c, g.d)
    s = min(x.valuation() for x in entries)
    if s == INF:
        raise ValueError("zero matrix does not act")
    if s:
        entries = tuple(x.div_pi(s) if x.valuation() != INF else ring.zero for x in entries)
    a, b, c, d = entries
    if (a * d - b * c).valuation() != 0:
        raise ValueError("matrix is not integral up to a central power of pi")
    k = v.k
    first = _linear_powers(a, c, k)
    second = _linear_powers(b, d, k)
    out = [ring.zero] * (k + 1)
    for i, ci in enumerate(v.coeffs):
        if ci.is_zero():
            continue
        left, right = first[k - i], second[i]
        for s1, x1 in enumerate(left):
            if x1.is_zero():
                continue
            for s2, x2 in enumerate(right):
                out[s1 + s2] = out[s1 + s2] + ci * x1 * x2
    return SymVector(ring, tuple(out))


def apply_U(v: SymVector) -> SymVector:
    ring, k = v.ring, v.k
    return SymVector(ring, tuple(ring.pi_pow(k - j) * c for j, c in enumerate(v.coeffs)))


def _as_local(lam: ResidueElem | LocalElem) -> LocalElem:
    if isinstance(lam, ResidueElem):
        return lam.ring.teichmuller_index(lam.index)
    return lam


def tplus_local(lam: ResidueElem | LocalElem, v: SymVector) -> SymVector:
    """Coefficient j = pi^j sum_{i>=j} binom(i,j) c_i (-lam)^(i-j).

    A residue class is replaced by its Teichmuller lift; any integral element
    is accepted as well.
    """
    ring, k = v.ring, v.k
    pw = _powers(-_as_local(lam), k)
    out = []
    for j in range(k + 1):
        acc = ring.zero
        for i in range(j, k + 1):
            if not v.coeffs[i].is_zero():
                acc = acc + comb(i, j) * v.coeffs[i] * pw[i - j]
        out.append(ring.pi_pow(j) * acc)
    return SymVector(ring, tuple(out))


def tminus_local(lam: ResidueElem | LocalElem, v: SymVector) -> SymVector:
    """Coefficient j = sum_{i>=j} pi^(k-i) binom(i,j) c_i (-lam)^(i-j)."""
    ring, k = v.ring, v.k
    pw = _powers(-_as_local(lam), k)
    out = []
    for j in range(k + 1):
        acc = ring.zero
        for i in range(j, k + 1):
            if not v.coeffs[i].is_zero():
                acc = acc + ring.pi_pow(k - i) * comb(i, j) * v.coeffs[i] * pw[i - j]
        out.append(acc)
    return SymVector(ring, tuple(out))


def _powers(x: LocalElem, n: int) -> list[LocalElem]:
    out = [x.ring.one]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def tplus_oracle(lam: ResidueElem | LocalElem, v: SymVector) -> SymVector:
    lam = _as_local(lam)
    return act(mat_w(v.ring), apply_U(act(mat_w_lambda(lam), v)))


def tminus_oracle(lam: ResidueElem | LocalElem, v: SymVector) -> SymVector:
    lam = _as_local(lam)
    return act(mat_w(v.ring) @ mat_w_lambda(lam), apply_U(v))
