"""Polynomials over O/pi^P (or plain integers) and over the residue field,
the reduction of monomials modulo (x^q - x)^(d+1), and checkers for the
coefficient-divisibility statements built on that reduction."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Any, Optional, Sequence

from .combinat import delta_coeff
from .local_arith import LocalElem, RingSpec, ResidueElem


def _is_zero(c: Any) -> bool:
    return c == 0


class LocalPoly:
    """Dense univariate polynomial, constant term first, trailing zeros trimmed.

    Coefficients may be ``LocalElem`` values of one ring or plain ints; the
    arithmetic only uses ``+``, ``-``, ``*``, so exact integer polynomials work
    unchanged.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Any] = ()):
        c = list(coeffs)
        while c and _is_zero(c[-1]):
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, t: int, coeff: Any = 1) -> "LocalPoly":
        return cls([0] * t + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> Any:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "LocalPoly") -> "LocalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return LocalPoly([self.coeff(i) + other.coeff(i) for i in range(n)])

    def __sub__(self, other: "LocalPoly") -> "LocalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return LocalPoly([self.coeff(i) - other.coeff(i) for i in range(n)])

    def __neg__(self) -> "LocalPoly":
        return LocalPoly([-c for c in self.coeffs])

    def __mul__(self, other: "LocalPoly | Any") -> "LocalPoly":
        if not isinstance(other, LocalPoly):
            return LocalPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return LocalPoly()
        out: list[Any] = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return LocalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LocalPoly":
        result = LocalPoly([1])
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalPoly):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    def __call__(self, x: Any) -> Any:
        acc: Any = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod_monic(self, divisor: "LocalPoly") -> tuple["LocalPoly", "LocalPoly"]:
        if divisor.coeffs[-1] != 1:
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        dd = divisor.degree
        quot: list[Any] = [0] * max(0, len(rem) - dd)
        for top in range(len(rem) - 1, dd - 1, -1):
            c = rem[top]
            if _is_zero(c):
                continue
            quot[top - dd] = c
            for i, dc in enumerate(divisor.coeffs):
                rem[top - dd + i] = rem[top - dd + i] - c * dc
        return LocalPoly(quot), LocalPoly(rem[:dd])

    def __repr__(self) -> str:
        return f"LocalPoly({list(self.coeffs)})"

    def to_ints(self) -> list[int]:
        return [c if isinstance(c, int) else c.coords[0] for c in self.coeffs]


def frobenius_modulus(q: int, d: int) -> LocalPoly:
    """(x^q - x)^(d+1) with integer coefficients."""
    return LocalPoly([0, -1] + [0] * (q - 2) + [1]) ** (d + 1)


def shift_eval(f: LocalPoly, lam: ResidueElem | LocalElem) -> LocalPoly:
    """f(x + [lam]): coefficient j is sum_{i>=j} binom(i, j) c_i [lam]^(i-j)."""
    shift = _teich(lam)
    n = len(f.coeffs)
    powers = [shift**e for e in range(n)]
    return LocalPoly(
        [sum((comb(i, j) * f.coeffs[i] * powers[i - j] for i in range(j, n)), 0) for j in range(n)]
    )


def _teich(lam: ResidueElem | LocalElem) -> LocalElem:
    if isinstance(lam, ResidueElem):
        return lam.ring.teichmuller_index(lam.index)
    return lam


def remainder_oracle(f: LocalPoly, q: int, d: int) -> LocalPoly:
    return f.divmod_monic(frobenius_modulus(q, d))[1]


def identity_terms(t: int, q: int, d: int, s: int) -> list[tuple[int, int]]:
    """Right-hand side of x^t = sum_l (-1)^(l+1) binom(d+1+s, l+s) binom(l+s-1, s)
    x^(t-(l+s)(q-1)) modulo (x^q-x)^(d+1), as (exponent, integer coefficient)."""
    if not 0 <= s <= max_shift(t, q, d):
        raise ValueError(f"shift s={s} outside its admissible range for t={t}, q={q}, d={d}")
    return [
        (t - (l + s) * (q - 1), (-1) ** (l + 1) * comb(d + 1 + s, l + s) * comb(l + s - 1, s))
        for l in range(1, d + 2)
    ]


def max_shift(t: int, q: int, d: int) -> int:
    """Largest admissible s, or -1 when t < q(d+1)."""
    if t < q * (d + 1):
        return -1
    return (t - d - 1) // (q - 1) - d - 1


def reduce_via_identity(f: LocalPoly, q: int, d: int) -> LocalPoly:
    """Rewrite the top monomial until the degree drops below q(d+1).

    Each step uses the largest admissible shift, which already lands every
    term below the bound; iterating keeps the procedure correct for any s.
    """
    bound = q * (d + 1)
    coeffs = list(f.coeffs)
    while len(coeffs) > bound:
        t = len(coeffs) - 1
        c = coeffs.pop()
        if not _is_zero(c):
            for exp, w in identity_terms(t, q, d, max_shift(t, q, d)):
                coeffs[exp] = coeffs[exp] + c * w
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
    return LocalPoly(coeffs)


def reduce_via_coefficients(f: LocalPoly, q: int, d: int) -> LocalPoly:
    """Closed-form remainder: low coefficients untouched, and for
    d+1 <= j <= d+q-1, 0 <= l <= d the coefficient of x^(j+l(q-1)) is
    c_{j+l(q-1)} + sum_{m>d} delta_{m,l,d} c_{j+m(q-1)}."""
    k = f.degree
    out: list[Any] = [f.coeff(i) for i in range(d + 1)]
    out += [0] * (q * (d + 1) - len(out))
    for j in range(d + 1, d + q):
        top = (k - j) // (q - 1) if k >= j else -1
        for l in range(d + 1):
            acc = f.coeff(j + l * (q - 1))
            for m in range(d + 1, top + 1):
                acc = acc + delta_coeff(m, l, d) * f.coeff(j + m * (q - 1))
            out[j + l * (q - 1)] = acc
    return LocalPoly(out)


# ---------------------------------------------------------------------------
# residue-field polynomials


class ResiduePoly:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingSpec, coeffs: Sequence[ResidueElem | int]):
        c = [x if isinstance(x, ResidueElem) else ring.residue(x % ring.q) for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        self.ring = ring
        self.coeffs = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def _zero(self) -> ResidueElem:
        return self.ring.residue(0)

    def coeff(self, i: int) -> ResidueElem:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self._zero()

    def __add__(self, other: "ResiduePoly") -> "ResiduePoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return ResiduePoly(self.ring, [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __mul__(self, other: "ResiduePoly") -> "ResiduePoly":
        if self.is_zero() or other.is_zero():
            return ResiduePoly(self.ring, [])
        out = [self._zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return ResiduePoly(self.ring, out)

    def __pow__(self, n: int) -> "ResiduePoly":
        result = ResiduePoly(self.ring, [1])
        for _ in range(n):
            result = result * self
        return result

    def divmod(self, divisor: "ResiduePoly") -> tuple["ResiduePoly", "ResiduePoly"]:
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        inv_lead = divisor.coeffs[-1].inverse()
        rem = list(self.coeffs)
        dd = divisor.degree
        quot = [self._zero()] * max(0, len(rem) - dd)
        for top in range(len(rem) - 1, dd - 1, -1):
            c = rem[top] * inv_lead
            if c.is_zero():
                continue
            quot[top - dd] = c
            for i, dc in enumerate(divisor.coeffs):
                rem[top - dd + i] = rem[top - dd + i] - c * dc
        return ResiduePoly(self.ring, quot), ResiduePoly(self.ring, rem[:dd])

    def shift(self, lam: ResidueElem) -> "ResiduePoly":
        """h(x + lam) by Horner's rule."""
        lin = ResiduePoly(self.ring, [lam, self.ring.residue(1)])
        acc = ResiduePoly(self.ring, [])
        for c in reversed(self.coeffs):
            acc = acc * lin + ResiduePoly(self.ring, [c])
        return acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResiduePoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"ResiduePoly({[c.index for c in self.coeffs]})"


def subfield_elements(ring: RingSpec, q: int) -> list[ResidueElem]:
    """Elements of the residue field fixed by x -> x^q."""
    return [x for x in ring.residues() if x**q == x]


def check_shift_divisibility(h: ResiduePoly, j: int, q: int) -> tuple[bool, bool]:
    """(a) h(x+lam) is divisible by x^j for every lam in F_q,
    (b) (x^q - x)^j divides h.  Raises if (a) holds but (b) does not."""
    if j < 1:
        raise ValueError("j must be positive")
    ring = h.ring
    a = all(
        all(shifted.coeff(i).is_zero() for i in range(j))
        for shifted in (h.shift(lam) for lam in subfield_elements(ring, q))
    )
    xq_minus_x = ResiduePoly(ring, [0, ring.p - 1] + [0] * (q - 2) + [1])
    b = h.divmod(xq_minus_x**j)[1].is_zero()
    if a and not b:
        raise AssertionError(f"shift divisibility holds but (x^q-x)^{j} does not divide {h}")
    return a, b


# ---------------------------------------------------------------------------
# coefficient lemmas


@dataclass
class CoefficientReport:
    hypothesis: bool
    all_coeffs: Optional[bool]  # only when deg < q(d+1)
    low_coeffs: Optional[bool]
    weighted_sums: Optional[bool]
    failing_hypothesis: Optional[tuple[int, int]] = None  # (j, lambda index)

    @property
    def applicable(self) -> bool:
        return self.hypothesis

    @property
    def ok(self) -> bool:
        """Conclusions hold whenever the hypothesis does."""
        if not self.hypothesis:
            return True
        return all(x is not False for x in (self.all_coeffs, self.low_coeffs, self.weighted_sums))


def check_coefficient_lemmas(c: LocalPoly, ring: RingSpec, q: int, d: int, n: int) -> CoefficientReport:
    if n > ring.P:
        raise ValueError("n exceeds the working precision")

    def small(x: Any) -> bool:
        x = ring.from_int(x) if isinstance(x, int) else x
        return x.valuation() >= n

    k = c.degree
    failing = None
    for lam in subfield_elements(ring, q):
        shifted = shift_eval(c, lam)
        for j in range(d + 1):
            if not small(shifted.coeff(j)):
                failing = (j, lam.index)
                break
        if failing:
            break
    if failing:
        return CoefficientReport(False, None, None, None, failing)
    all_coeffs = all(small(x) for x in c.coeffs) if k < q * (d + 1) else None
    low = all(small(c.coeff(i)) for i in range(d + 1))
    sums = True
    for j in range(d + 1, d + q):
        if k < j:
            continue
        acc: Any = 0
        for l in range(d, (k - j) // (q - 1) + 1):
            acc = acc + comb(l, d) * c.coeff(j + l * (q - 1))
        sums = sums and small(acc)
    return CoefficientReport(True, all_coeffs, low, sums)


def make_witness(g: LocalPoly, h: LocalPoly, ring: RingSpec, q: int, d: int, n: int) -> LocalPoly:
    """(x^q - x)^(d+1) g + pi^n h."""
    if n > ring.P:
        raise ValueError("n exceeds the working precision")
    modulus = LocalPoly([ring.from_int(x) for x in frobenius_modulus(q, d).coeffs])
    return modulus * g + h * ring.pi_pow(n)
