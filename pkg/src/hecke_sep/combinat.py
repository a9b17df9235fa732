"""Exact binomial arithmetic: Kummer carries, Lucas residues, the divisibility
scan used for small weights, and the coefficients of the x^t reduction."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

from .local_arith import is_prime, prime_power_decompose, vp_int


@dataclass(frozen=True)
class WeightDecomposition:
    """k = d*q + r with 0 <= r < q."""

    k: int
    q: int

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("weight must be non-negative")
        prime_power_decompose(self.q)

    @property
    def d(self) -> int:
        return self.k // self.q

    @property
    def r(self) -> int:
        return self.k - self.d * self.q

    @property
    def p(self) -> int:
        return prime_power_decompose(self.q)[0]


def binom(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("binom expects non-negative arguments")
    return comb(n, k)


def _digits(n: int, p: int) -> list[int]:
    out = []
    while n:
        n, r = divmod(n, p)
        out.append(r)
    return out


def carry_valuation(p: int, n: int, k: int) -> int:
    """Number of carries when adding k and n - k in base p."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    a, b = _digits(k, p), _digits(n - k, p)
    width = max(len(a), len(b))
    a += [0] * (width - len(a))
    b += [0] * (width - len(b))
    carry = carries = 0
    for x, y in zip(a, b):
        carry = 1 if x + y + carry >= p else 0
        carries += carry
    return carries


def lucas_residue(p: int, n: int, k: int) -> int:
    """binom(n, k) mod p as a product of digit binomials."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if k < 0 or n < 0:
        raise ValueError("negative arguments")
    result = 1
    while n or k:
        n, ni = divmod(n, p)
        k, ki = divmod(k, p)
        if ki > ni:
            return 0
        result = result * comb(ni, ki) % p
    return result


def check_binom_divisibility_lemma(q: int, d: int, r: int) -> Optional[tuple[int, int, int]]:
    """Check p | binom(k-i, k-j-l(q-1)) for 0<=i<=r, 0<=j<=d, j+1<=l<=d.

    Returns None on success, otherwise the first failing (i, j, l).
    """
    p, _ = prime_power_decompose(q)
    if not (0 <= d < q and 0 <= r < q - d):
        raise ValueError(f"hypothesis d < q, 0 <= r < q - d violated by (q={q}, d={d}, r={r})")
    k = d * q + r
    for i in range(r + 1):
        for j in range(d + 1):
            for l in range(j + 1, d + 1):
                bottom = k - j - l * (q - 1)
                top = k - i
                value = comb(top, bottom) if bottom >= 0 else 0
                if value % p:
                    return (i, j, l)
    return None


def binom_lemma_cases(qmax: int) -> list[tuple[int, int, int]]:
    """All valid (q, d, r) with q a prime power <= qmax."""
    cases = []
    for q in range(2, qmax + 1):
        try:
            prime_power_decompose(q)
        except ValueError:
            continue
        for d in range(q):
            for r in range(q - d):
                cases.append((q, d, r))
    return cases


def gamma_coeff(r: int, l: int, d: int) -> int:
    if not (1 <= r <= d + 1 and l >= d + 1):
        raise ValueError(f"gamma index out of range: r={r}, l={l}, d={d}")
    return (-1) ** (r + 1) * comb(l, r + l - d - 1) * comb(r + l - d - 2, l - d - 1)


def delta_coeff(m: int, l: int, d: int) -> int:
    if not (m >= d + 1 and 0 <= l <= d):
        raise ValueError(f"delta index out of range: m={m}, l={l}, d={d}")
    return (-1) ** (d - l) * comb(m, l) * comb(m - l - 1, d - l)


def reduction_coeffs(kind: str, *args: int) -> int:
    if kind == "gamma":
        return gamma_coeff(*args)
    if kind == "delta":
        return delta_coeff(*args)
    raise ValueError(f"unknown coefficient kind {kind!r}")


def vp_binom(p: int, n: int, k: int) -> float:
    """v_p of the exact binomial (infinite when it vanishes)."""
    return vp_int(comb(n, k), p)
