"""Polynomials over the prime field F_q.

A polynomial c_0 + c_1 t + ... + c_n t^n is stored as the byte string
``bytes([c_0, ..., c_n])`` with ``c_n != 0``; the zero polynomial is ``b""``.
Only prime q < 256 is supported.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from itertools import product
from typing import Iterator

from ..errors import DomainError
from .base import WORD_BOUND, Domain
from .integers import factor_int, is_prime_int


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _add(f, g, q):
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, b in enumerate(g):
        out[i] = (out[i] + b) % q
    return _trim(out)


def _neg(f, q):
    return [(-a) % q for a in f]


def _mul(f, g, q):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _trim([x % q for x in out])


def _divmod(f, g, q):
    if not g:
        raise DomainError("polynomial division by zero")
    r = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], q - 2, q)
    if len(r) <= dg:
        return [], _trim(r)
    quo = [0] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i] * inv % q
        if c:
            quo[i - dg] = c
            for j in range(dg + 1):
                r[i - dg + j] = (r[i - dg + j] - c * g[j]) % q
    return _trim(quo), _trim(r[:dg])


def _mulmod(f, g, m, q):
    return _divmod(_mul(f, g, q), m, q)[1]


def _powmod(f, e, m, q):
    result = [1]
    base = _divmod(f, m, q)[1]
    while e:
        if e & 1:
            result = _mulmod(result, base, m, q)
        e >>= 1
        if e:
            base = _mulmod(base, base, m, q)
    return result


def _monic(f, q):
    if not f:
        return []
    inv = pow(f[-1], q - 2, q)
    return [a * inv % q for a in f]


def _gcd(f, g, q):
    while g:
        f, g = g, _divmod(f, g, q)[1]
    return _monic(f, q)


class Poly:
    """Immutable element of F_q[t]."""

    __slots__ = ("q", "c")

    def __init__(self, coeffs=(), q: int = 2):
        if isinstance(coeffs, bytes):
            c = list(coeffs)
        else:
            c = [int(a) % q for a in coeffs]
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", bytes(_trim(c)))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __reduce__(self):
        return (Poly, (self.c, self.q))

    @classmethod
    def _raw(cls, c: list[int], q: int) -> "Poly":
        p = object.__new__(cls)
        object.__setattr__(p, "q", q)
        object.__setattr__(p, "c", bytes(c))
        return p

    @classmethod
    def monomial(cls, n: int, q: int, coeff: int = 1) -> "Poly":
        return cls([0] * n + [coeff], q)

    @classmethod
    def from_int(cls, value: int, q: int) -> "Poly":
        """Inverse of :meth:`to_int` (base-q digits are the coefficients)."""
        c = []
        while value:
            value, d = divmod(value, q)
            c.append(d)
        return cls._raw(c, q)

    def to_int(self) -> int:
        v = 0
        for a in reversed(self.c):
            v = v * self.q + a
        return v

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def lc(self) -> int:
        return self.c[-1] if self.c else 0

    def is_monic(self) -> bool:
        return self.lc == 1

    def monic(self) -> "Poly":
        return Poly._raw(_monic(list(self.c), self.q), self.q)

    def __bool__(self):
        return bool(self.c)

    def __len__(self):
        return len(self.c)

    def __getitem__(self, i):
        return self.c[i] if 0 <= i < len(self.c) else 0

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.q != self.q:
                raise DomainError(f"mixing F_{self.q} and F_{other.q} polynomials")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return Poly([other], self.q)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.q == other.q and self.c == other.c
        if isinstance(other, int) and not isinstance(other, bool):
            return self.c == Poly([other], self.q).c
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.c))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(_add(self.c, other.c, self.q), self.q)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(_neg(self.c, self.q), self.q)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(_add(self.c, _neg(other.c, self.q), self.q), self.q)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._raw(_mul(self.c, other.c, self.q), self.q)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = self._coerce(other)
        quo, rem = _divmod(self.c, other.c, self.q)
        return Poly._raw(quo, self.q), Poly._raw(rem, self.q)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e: int):
        out = Poly._raw([1], self.q)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def pow_mod(self, e: int, m: "Poly") -> "Poly":
        return Poly._raw(_powmod(self.c, e, m.c, self.q), self.q)

    def __call__(self, x: int) -> int:
        v = 0
        for a in reversed(self.c):
            v = (v * x + a) % self.q
        return v

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if not a:
                continue
            if i == 0:
                terms.append(str(a))
                continue
            mono = "t" if i == 1 else f"t^{i}"
            terms.append(mono if a == 1 else f"{a}{mono}")
        return "+".join(terms)

    def __repr__(self):
        return f"Poly({str(self)!r}, q={self.q})"

    def compact(self) -> str:
        return "[" + ",".join(str(a) for a in self.c) + f"]@q={self.q}"


_COMPACT = re.compile(r"^\s*\[([0-9,\s]*)\]\s*@\s*q\s*=\s*(\d+)\s*$")
_TERM = re.compile(r"^(\d*)\*?(t(?:\^(\d+))?)?$")


def parse_poly(text: str, q: int | None = None) -> Poly:
    """Parse ``"t^3+2t+1"`` (needs ``q``) or the compact ``"[1,2,0,1]@q=3"`` form."""
    m = _COMPACT.match(text)
    if m:
        body, qq = m.group(1), int(m.group(2))
        if q is not None and qq != q:
            raise DomainError(f"polynomial {text!r} is over F_{qq}, expected F_{q}")
        coeffs = [int(a) for a in body.split(",") if a.strip()]
        return Poly(coeffs, qq)
    if q is None:
        raise DomainError(f"field size needed to parse {text!r}")
    s = text.replace(" ", "")
    if not s:
        raise DomainError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    coeffs: dict[int, int] = {}
    for sign, term in re.findall(r"([+-])([^+-]+)", s):
        tm = _TERM.match(term)
        if not tm or (not tm.group(1) and not tm.group(2)):
            raise DomainError(f"cannot parse polynomial term {term!r} in {text!r}")
        coef = int(tm.group(1)) if tm.group(1) else 1
        if tm.group(2) is None:
            exp = 0
        else:
            exp = int(tm.group(3)) if tm.group(3) else 1
        coeffs[exp] = coeffs.get(exp, 0) + (coef if sign == "+" else -coef)
    if "".join(sign + term for sign, term in re.findall(r"([+-])([^+-]+)", s)) != s:
        raise DomainError(f"cannot parse polynomial {text!r}")
    deg = max(coeffs)
    return Poly([coeffs.get(i, 0) for i in range(deg + 1)], q)


# -- irreducibility and counting --------------------------------------------

def is_irreducible(f: Poly) -> bool:
    """Rabin-style test: no factor of degree <= deg/2 and t^(q^n) = t mod f."""
    n = f.degree
    if n < 1:
        return False
    q = f.q
    fm = _monic(list(f.c), q)
    if n == 1:
        return True
    t = [0, 1]
    h = t
    for d in range(1, n // 2 + 1):
        h = _powmod(h, q, fm, q)
        g = _gcd(fm, _add(h, _neg(t, q), q), q)
        if len(g) > 1:
            return False
    for _ in range(n // 2, n):
        h = _powmod(h, q, fm, q)
    return h == t


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd (``0`` when both are zero)."""
    if f.q != g.q:
        raise DomainError("mixing fields")
    return Poly._raw(_gcd(list(f.c), list(g.c), f.q), f.q)


def poly_xgcd(f: Poly, g: Poly) -> tuple[Poly, Poly, Poly]:
    return FqX(f.q).xgcd(f, g)


def poly_modinv(f: Poly, m: Poly) -> Poly:
    """Inverse of ``f`` modulo ``m``; raises naming the common factor."""
    return FqX(f.q).modinv(f, m)


def poly_arith(op: str, f: Poly, g: Poly):
    """Dispatcher over the basic operations (``add``, ``sub``, ``mul``,
    ``divmod``, ``gcd``, ``modinv``)."""
    if f.q != g.q:
        raise DomainError("mixing fields")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "divmod":
        return divmod(f, g)
    if op == "gcd":
        return poly_gcd(f, g)
    if op == "modinv":
        return poly_modinv(f, g)
    raise ValueError(f"unknown operation {op!r}")


def _mobius_int(n: int) -> int:
    fac = factor_int(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def count_irreducibles(q: int, n: int) -> int:
    """Number of monic irreducible polynomials of degree ``n`` over F_q,
    via (1/n) sum_{d | n} mu(d) q^(n/d)."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    if q ** n >= WORD_BOUND:
        raise DomainError(f"q^n = {q}^{n} exceeds the 64-bit bound")
    total = sum(_mobius_int(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0)
    assert total % n == 0
    return total // n


def monic_polys(q: int, n: int) -> Iterator[Poly]:
    """Monic polynomials of degree ``n`` ordered by their base-q encoding."""
    for low in product(range(q), repeat=n):
        yield Poly._raw(list(reversed(low)) + [1], q)


@lru_cache(maxsize=None)
def _irreducibles_of_degree(q: int, n: int) -> tuple[Poly, ...]:
    return tuple(f for f in monic_polys(q, n) if is_irreducible(f))


class PolynomialsOverFq(Domain):
    """F_q[t] with monic canonical associates; A(q^n) = monic polynomials of degree n."""

    tag = "fq"

    def __init__(self, q: int):
        if not (2 <= q < 256 and is_prime_int(q)):
            raise DomainError(f"q must be a prime below 256, got {q}")
        self.q = q

    @property
    def zero(self):
        return Poly._raw([], self.q)

    @property
    def one(self):
        return Poly._raw([1], self.q)

    @property
    def t(self):
        return Poly._raw([0, 1], self.q)

    def element(self, payload):
        if isinstance(payload, Poly):
            if payload.q != self.q:
                raise DomainError(f"polynomial over F_{payload.q}, expected F_{self.q}")
            return payload
        if isinstance(payload, str):
            return self.parse(payload)
        if isinstance(payload, int) and not isinstance(payload, bool):
            return Poly([payload], self.q)
        if isinstance(payload, (list, tuple)):
            return Poly(payload, self.q)
        raise DomainError(f"not a polynomial: {payload!r}")

    def degree_of_norm(self, N: int) -> int:
        n = round(math.log(N, self.q)) if N > 0 else -1
        if n < 0 or self.q ** n != N:
            raise DomainError(f"{N} is not a power of {self.q}")
        return n

    def norm(self, x):
        if not x:
            raise DomainError("norm of zero")
        return self.q ** x.degree

    def canonical(self, x):
        return x.monic()

    def is_unit(self, x):
        return x.degree == 0

    def divmod(self, a, b):
        return divmod(a, b)

    def reduce(self, a, m):
        return a % m

    def residues(self, m):
        d = m.degree
        return [Poly.from_int(v, self.q) for v in range(self.q ** d)]

    def gcd(self, a, b):
        return poly_gcd(a, b)

    def is_prime(self, x):
        return is_irreducible(x)

    def factor_element(self, x):
        f = x.monic()
        out = []
        d = 1
        while f.degree >= 2 * d:
            for p in _irreducibles_of_degree(self.q, d):
                e = 0
                while True:
                    quo, rem = divmod(f, p)
                    if rem:
                        break
                    f, e = quo, e + 1
                if e:
                    out.append((p, e))
            d += 1
        if f.degree >= 1:
            out.append((f, 1))
            out.sort(key=lambda pe: self.sort_key(pe[0]))
            merged: list[tuple[Poly, int]] = []
            for p, e in out:
                if merged and merged[-1][0] == p:
                    merged[-1] = (p, merged[-1][1] + e)
                else:
                    merged.append((p, e))
            out = merged
        return out

    def primes_below_norm(self, bound):
        d = 1
        while self.q ** d < bound:
            yield from _irreducibles_of_degree(self.q, d)
            d += 1

    def window_members(self, N, modulus=None, residue=None):
        n = self.degree_of_norm(N)
        members = monic_polys(self.q, n)
        if modulus is None:
            return members
        r = self.reduce(self.element(residue), modulus)
        return (f for f in members if f % modulus == r)

    def window_size(self, N):
        return N if self.degree_of_norm(N) >= 0 else 0

    @property
    def c_A(self):
        return 1.0 / math.log(self.q)

    def sort_key(self, x):
        return (x.degree, x.to_int())

    def parse(self, text):
        return parse_poly(text, self.q)

    def format(self, x):
        return str(x)

    def to_json(self, x):
        return x.compact()

    def from_json(self, value):
        if isinstance(value, str):
            return parse_poly(value, self.q)
        return self.element(value)

    def describe(self):
        return {"tag": "fq", "q": self.q}


@lru_cache(maxsize=None)
def FqX(q: int) -> PolynomialsOverFq:
    return PolynomialsOverFq(q)
