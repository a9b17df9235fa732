"""Fixed-precision arithmetic in truncated local rings O/pi^P.

A ring is described by a prime ``p``, a residue degree ``f`` (so the residue
field has ``q = p**f`` elements), a ramification index ``e`` and a precision
``P`` measured in powers of the uniformizer.  Internally an element is a
vector of ``e*f`` integers modulo ``p**(P//e)`` in the basis
``t**a * pi**b`` (``0 <= a < f``, ``0 <= b < e``), where ``t`` is a root of a
monic lift of an irreducible polynomial over F_p and ``pi`` is a root of an
Eisenstein polynomial with integer coefficients.  Because ``P`` is a multiple
of ``e`` we have ``pi**P * O = p**(P//e) * O``, so this coordinate vector is
a canonical form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, Union

INF = math.inf
"""Valuation sentinel for elements that vanish at the working precision."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_power_decompose(q: int) -> tuple[int, int]:
    """Return ``(p, f)`` with ``q == p**f``; raise if q is not a prime power."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(c for c in range(2, q + 1) if q % c == 0)
    f, rest = 0, q
    while rest % p == 0:
        rest //= p
        f += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, f


def vp_int(n: int, p: int) -> float:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, constant term first)


def _fp_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _fp_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _fp_trim([x % p for x in a])
    b = _fp_trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bc) % p
        _fp_trim(a)
    return a


def is_irreducible_fp(poly: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= deg/2."""
    poly = _fp_trim([c % p for c in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _fp_mod(poly, list(low) + [1], p):
                return False
    return True


def minimal_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Monic irreducible of degree f over F_p, minimal for the order on
    ``(c_0, ..., c_{f-1})`` read lexicographically."""
    for low in itertools.product(range(p), repeat=f):
        cand = list(low) + [1]
        if is_irreducible_fp(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable


def _int_poly_rem_monic(a: list[int], m: Sequence[int]) -> list[int]:
    """Remainder of an integer polynomial by a monic integer polynomial."""
    a = list(a)
    dm = len(m) - 1
    for top in range(len(a) - 1, dm - 1, -1):
        c = a[top]
        if c:
            for i in range(dm + 1):
                a[top - dm + i] -= c * m[i]
    return (a + [0] * dm)[:dm]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingSpec:
    p: int
    f: int
    e: int
    P: int
    unramified_minpoly: tuple[int, ...]
    eisenstein_poly: tuple[int, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        p, f, e, P = self.p, self.f, self.e, self.P
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if f < 1 or e < 1:
            raise ValueError("f and e must be positive")
        if P <= 0 or P % e:
            raise ValueError(f"precision P={P} must be a positive multiple of e={e}")
        g = tuple(self.unramified_minpoly)
        if len(g) != f + 1 or g[-1] != 1 or not is_irreducible_fp(g, p):
            raise ValueError(f"{g} is not a monic irreducible of degree {f} over F_{p}")
        E = tuple(self.eisenstein_poly)
        if (
            len(E) != e + 1
            or E[-1] != 1
            or vp_int(E[0], p) != 1
            or any(vp_int(c, p) < 1 for c in E[1:-1])
        ):
            raise ValueError(f"{E} is not an Eisenstein polynomial of degree {e}")
        object.__setattr__(self, "unramified_minpoly", g)
        object.__setattr__(self, "eisenstein_poly", E)

    # -- derived constants -------------------------------------------------

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def s(self) -> int:
        """p-adic precision of every coordinate."""
        return self.P // self.e

    @property
    def modulus(self) -> int:
        return self.p**self.s

    @property
    def dim(self) -> int:
        return self.e * self.f

    def __repr__(self) -> str:
        return f"RingSpec(p={self.p}, f={self.f}, e={self.e}, P={self.P})"

    @property
    def structure(self) -> list[list[list[int]]]:
        """``S[a][b][c]``: coordinate c of basis_a * basis_b."""
        S = self._cache.get("S")
        if S is None:
            S = self._structure_constants()
            self._cache["S"] = S
        return S

    def _structure_constants(self) -> list[list[list[int]]]:
        f, e, mod = self.f, self.e, self.modulus
        g = list(self.unramified_minpoly)
        E = list(self.eisenstein_poly)
        n = f * e
        # t^i for i < 2f-1 and pi^j for j < 2e-1 reduced to the basis
        t_pow = [_int_poly_rem_monic([0] * i + [1], g) for i in range(2 * f - 1)]
        pi_pow = [_int_poly_rem_monic([0] * j + [1], E) for j in range(2 * e - 1)]
        S = [[[0] * n for _ in range(n)] for _ in range(n)]
        for x, y in itertools.product(range(n), repeat=2):
            bx, ax = divmod(x, f)
            by, ay = divmod(y, f)
            tv = t_pow[ax + ay]
            pv = pi_pow[bx + by]
            for b, pc in enumerate(pv):
                if pc:
                    for a, tc in enumerate(tv):
                        if tc:
                            S[x][y][b * f + a] = (S[x][y][b * f + a] + pc * tc) % mod
        return S

    # -- element constructors ----------------------------------------------

    def elem(self, coords: Iterable[int]) -> "LocalElem":
        mod = self.modulus
        c = tuple(int(x) % mod for x in coords)
        if len(c) != self.dim:
            raise ValueError("wrong number of coordinates")
        return LocalElem(self, c)

    def from_int(self, n: int) -> "LocalElem":
        return LocalElem(self, (n % self.modulus,) + (0,) * (self.dim - 1))

    @property
    def zero(self) -> "LocalElem":
        return self.from_int(0)

    @property
    def one(self) -> "LocalElem":
        return self.from_int(1)

    @property
    def uniformizer(self) -> "LocalElem":
        pi = self._cache.get("pi")
        if pi is None:
            if self.e == 1:
                pi = self.from_int(-self.eisenstein_poly[0])
            else:
                c = [0] * self.dim
                c[self.f] = 1
                pi = self.elem(c)
            self._cache["pi"] = pi
        return pi

    def pi_pow(self, n: int) -> "LocalElem":
        cache = self._cache.setdefault("pi_pows", {})
        if n not in cache:
            cache[n] = self.uniformizer**n
        return cache[n]

    def residue(self, index: int) -> "ResidueElem":
        """Residue field element with the given index (base-p digits of the
        index are the coordinates in the basis 1, t, ..., t^(f-1))."""
        if not 0 <= index < self.q:
            raise ValueError("residue index out of range")
        digits = []
        for _ in range(self.f):
            index, r = divmod(index, self.p)
            digits.append(r)
        return ResidueElem(self, tuple(digits))

    def residues(self) -> list["ResidueElem"]:
        return [self.residue(i) for i in range(self.q)]

    @property
    def _inv_pi_over_p(self) -> "LocalElem":
        """The element p/pi, used for exact division by pi."""
        c = self._cache.get("p_over_pi")
        if c is None:
            E = self.eisenstein_poly
            # pi^e / p = -sum (E_i / p) pi^i is a unit
            unit = self.zero
            for i in range(self.e):
                unit = unit - self.from_int(E[i] // self.p) * self.uniformizer_basis(i)
            c = self.uniformizer_basis(self.e - 1) * unit.inverse()
            self._cache["p_over_pi"] = c
        return c

    def uniformizer_basis(self, b: int) -> "LocalElem":
        """The basis element pi^b for 0 <= b < e (pi^0 = 1)."""
        if b == 0:
            return self.one
        c = [0] * self.dim
        c[b * self.f] = 1
        return self.elem(c)

    def teichmuller_index(self, index: int) -> "LocalElem":
        table = self._cache.get("teich")
        if table is None:
            table = [teichmuller(self.residue(i)) for i in range(self.q)]
            self._cache["teich"] = table
        return table[index]

    def random_elem(self, rng, min_val: int = 0) -> "LocalElem":
        x = self.elem(rng.randrange(self.modulus) for _ in range(self.dim))
        return x * self.pi_pow(min_val) if min_val else x


def make_ring(
    p: int,
    f: int = 1,
    e: int = 1,
    P: int = 8,
    unramified_minpoly: Sequence[int] | None = None,
    eisenstein_poly: Sequence[int] | None = None,
) -> RingSpec:
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if unramified_minpoly is None:
        unramified_minpoly = minimal_irreducible(p, f)
    if eisenstein_poly is None:
        eisenstein_poly = (-p,) + (0,) * (e - 1) + (1,)
    return _make_ring_cached(p, f, e, P, tuple(unramified_minpoly), tuple(eisenstein_poly))


@lru_cache(maxsize=None)
def _make_ring_cached(p, f, e, P, g, E) -> RingSpec:
    return RingSpec(p, f, e, P, g, E)


Coercible = Union["LocalElem", int]


class LocalElem:
    """Immutable element of O/pi^P, stored as canonical coordinates."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring: RingSpec, coords: tuple[int, ...]):
        self.ring = ring
        self.coords = coords

    def _coerce(self, other: Coercible) -> "LocalElem":
        if isinstance(other, LocalElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("operands belong to different rings")
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other: Coercible) -> "LocalElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        mod = self.ring.modulus
        return LocalElem(self.ring, tuple((a + b) % mod for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self) -> "LocalElem":
        mod = self.ring.modulus
        return LocalElem(self.ring, tuple(-a % mod for a in self.coords))

    def __sub__(self, other: Coercible) -> "LocalElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        mod = self.ring.modulus
        return LocalElem(self.ring, tuple((a - b) % mod for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other: Coercible) -> "LocalElem":
        return (-self) + other

    def __mul__(self, other: Coercible) -> "LocalElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        ring = self.ring
        mod = ring.modulus
        if ring.dim == 1:
            return LocalElem(ring, (self.coords[0] * o.coords[0] % mod,))
        n = ring.dim
        S = ring.structure
        out = [0] * n
        for a, xa in enumerate(self.coords):
            if xa:
                Sa = S[a]
                for b, yb in enumerate(o.coords):
                    if yb:
                        prod = xa * yb
                        for c, sc in enumerate(Sa[b]):
                            if sc:
                                out[c] += prod * sc
        return LocalElem(ring, tuple(x % mod for x in out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LocalElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if not isinstance(other, LocalElem):
            return NotImplemented
        return self.coords == other.coords and (other.ring is self.ring or other.ring == self.ring)

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        if self.ring.dim == 1:
            return f"LocalElem({self.coords[0]} mod {self.ring.modulus})"
        return f"LocalElem({self.coords})"

    def is_zero(self) -> bool:
        return not any(self.coords)

    def valuation(self) -> float:
        """pi-adic valuation, or INF when the element is 0 mod pi^P."""
        ring = self.ring
        p, f, e = ring.p, ring.f, ring.e
        best = INF
        for b in range(e):
            block = self.coords[b * f : (b + 1) * f]
            vb = min(vp_int(c, p) for c in block)
            if vb != INF:
                best = min(best, e * vb + b)
        return best

    def residue(self) -> "ResidueElem":
        p, f = self.ring.p, self.ring.f
        return ResidueElem(self.ring, tuple(c % p for c in self.coords[:f]))

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def inverse(self) -> "LocalElem":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self!r} is not a unit")
        y = self.residue().inverse().lift()
        for _ in range(max(1, self.ring.P).bit_length() + 1):
            y = y * (2 - self * y)
        assert self * y == 1
        return y

    def div_pi(self, n: int = 1) -> "LocalElem":
        """Exact quotient by pi^n; valid modulo pi^(P-n).  Needs valuation >= n."""
        if self.valuation() < n:
            raise ValueError("element is not divisible by the requested power of pi")
        x = self
        ring = self.ring
        f, p = ring.f, ring.p
        for _ in range(n):
            c = x.coords
            low = LocalElem(ring, tuple(a // p for a in c[:f]) + (0,) * (ring.dim - f))
            shifted = LocalElem(ring, c[f:] + (0,) * f)
            x = low * ring._inv_pi_over_p + shifted
        return x


def valuation(x: LocalElem) -> float:
    return x.valuation()


def inv(x: LocalElem) -> LocalElem:
    return x.inverse()


# ---------------------------------------------------------------------------


class ResidueElem:
    """Element of the residue field F_q = F_p[t]/(g)."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring: RingSpec, coords: tuple[int, ...]):
        self.ring = ring
        self.coords = coords

    @property
    def index(self) -> int:
        p = self.ring.p
        return sum(c * p**i for i, c in enumerate(self.coords))

    def __add__(self, other: "ResidueElem") -> "ResidueElem":
        p = self.ring.p
        return ResidueElem(self.ring, tuple((a + b) % p for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "ResidueElem":
        p = self.ring.p
        return ResidueElem(self.ring, tuple(-a % p for a in self.coords))

    def __sub__(self, other: "ResidueElem") -> "ResidueElem":
        return self + (-other)

    def __mul__(self, other: "ResidueElem") -> "ResidueElem":
        p, f = self.ring.p, self.ring.f
        prod = [0] * (2 * f - 1)
        for i, a in enumerate(self.coords):
            for j, b in enumerate(other.coords):
                prod[i + j] += a * b
        rem = _fp_mod(prod, self.ring.unramified_minpoly, p)
        return ResidueElem(self.ring, tuple(rem + [0] * (f - len(rem))))

    def __pow__(self, n: int) -> "ResidueElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.residue(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "ResidueElem":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse in the residue field")
        return self ** (self.ring.q - 2)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def lift(self) -> LocalElem:
        """Naive lift (same coordinates), not the Teichmuller lift."""
        ring = self.ring
        return LocalElem(ring, self.coords + (0,) * (ring.dim - ring.f))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResidueElem):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __repr__(self) -> str:
        return f"ResidueElem({self.index})"


def teichmuller(lam: ResidueElem) -> LocalElem:
    """Teichmuller lift: the unique root of x^q = x reducing to ``lam``.

    Each application of x -> x^p gains at least one digit of agreement, so the
    iteration x -> x^q from any lift stabilises after at most P steps.
    """
    ring = lam.ring
    x = lam.lift()
    for _ in range(ring.P + 1):
        nxt = x ** ring.q
        if nxt == x:
            return x
        x = nxt
    raise AssertionError("Teichmuller iteration did not stabilise")


def enum_digits(ring: RingSpec, n: int) -> list[tuple[int, ...]]:
    """Digit tuples (mu_0, ..., mu_{n-1}) of I_n in lexicographic order."""
    if n < 0 or n > ring.P:
        raise ValueError(f"level n={n} outside [0, P={ring.P}]")
    return list(itertools.product(range(ring.q), repeat=n))


def digits_to_elem(ring: RingSpec, digits: Sequence[int]) -> LocalElem:
    """mu = sum_i pi^i [mu_i]."""
    total = ring.zero
    for i, d in enumerate(digits):
        if d:
            total = total + ring.pi_pow(i) * ring.teichmuller_index(d)
    return total


def elem_to_digits(x: LocalElem, n: int) -> tuple[int, ...]:
    """First n Teichmuller digits of x."""
    ring = x.ring
    if n > ring.P:
        raise ValueError("more digits than the working precision")
    out = []
    for i in range(n):
        d = x.residue().index
        out.append(d)
        x = x - ring.teichmuller_index(d)
        if i + 1 < n:
            x = x.div_pi(1)
    return tuple(out)


def digit_split(digits: Sequence[int], m: int) -> tuple[tuple[int, ...], int]:
    """Truncation [mu]_m and the digit at position m (0 if absent).

    With m = n - 1 the second entry is the last digit lambda_mu.
    """
    digits = tuple(digits)
    if m < 0 or m > len(digits):
        raise ValueError("truncation level exceeds the number of digits")
    nxt = digits[m] if m < len(digits) else 0
    return digits[:m], nxt


def power_sum(ring: RingSpec, i: int) -> LocalElem:
    """Sum of [lambda]^i over the residue field, with 0^0 = 1."""
    if i < 0:
        raise ValueError("exponent must be non-negative")
    total = ring.zero
    for idx in range(ring.q):
        total = total + ring.teichmuller_index(idx) ** i
    return total
