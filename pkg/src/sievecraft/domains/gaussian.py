"""Gaussian integers Z[i]."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..errors import DomainError
from .base import WORD_BOUND, Domain
from .integers import factor_int, is_prime_int, primes_below


@dataclass(frozen=True, slots=True)
class GaussianInt:
    x: int
    y: int = 0

    @staticmethod
    def of(v) -> "GaussianInt":
        if isinstance(v, GaussianInt):
            return v
        if isinstance(v, int) and not isinstance(v, bool):
            return GaussianInt(v, 0)
        return NotImplemented

    def __add__(self, other):
        o = GaussianInt.of(other)
        if o is NotImplemented:
            return o
        return GaussianInt(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return GaussianInt(-self.x, -self.y)

    def __sub__(self, other):
        o = GaussianInt.of(other)
        if o is NotImplemented:
            return o
        return GaussianInt(self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = GaussianInt.of(other)
        if o is NotImplemented:
            return o
        return GaussianInt(self.x * o.x - self.y * o.y, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.x, -self.y)

    def norm(self) -> int:
        return self.x * self.x + self.y * self.y

    def __bool__(self):
        return bool(self.x or self.y)

    def __str__(self):
        x, y = self.x, self.y
        if y == 0:
            return str(x)
        yi = "i" if abs(y) == 1 else f"{abs(y)}i"
        if x == 0:
            return yi if y > 0 else "-" + yi
        return f"{x}{'+' if y > 0 else '-'}{yi}"


I = GaussianInt(0, 1)
_UNITS = (GaussianInt(1, 0), GaussianInt(0, 1), GaussianInt(-1, 0), GaussianInt(0, -1))


def _round_div(n: int, d: int) -> int:
    """Nearest integer to n/d for d > 0 (halves round up)."""
    return (2 * n + d) // (2 * d)


def gaussian_divmod(a: GaussianInt, b: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
    nb = b.norm()
    if nb == 0:
        raise DomainError("division by zero")
    num = a * b.conj()
    quo = GaussianInt(_round_div(num.x, nb), _round_div(num.y, nb))
    return quo, a - quo * b


def canonical_associate(a: GaussianInt) -> GaussianInt:
    """The associate with x > 0, y >= 0."""
    if not a:
        return a
    x, y = a.x, a.y
    while not (x > 0 and y >= 0):
        x, y = -y, x
    return GaussianInt(x, y)


def gaussian_gcd(a, b) -> GaussianInt:
    a, b = GaussianInt.of(a), GaussianInt.of(b)
    if not a and not b:
        raise DomainError("gcd(0, 0) is undefined")
    while b:
        a, b = b, gaussian_divmod(a, b)[1]
    return canonical_associate(a)


def gaussian_is_prime(a) -> bool:
    """Norm is a rational prime, or a is an associate of a prime p = 3 (mod 4)."""
    a = GaussianInt.of(a)
    n = a.norm()
    if n < 2:
        return False
    if a.x == 0 or a.y == 0:
        p = abs(a.x + a.y)
        return p % 4 == 3 and is_prime_int(p)
    return is_prime_int(n)


def _sqrt_minus_one(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise DomainError(f"no square root of -1 mod {p}")


def split_prime(p: int) -> GaussianInt:
    """A Gaussian prime of norm p for a rational prime p = 1 (mod 4), canonical."""
    r = _sqrt_minus_one(p)
    return gaussian_gcd(GaussianInt(p), GaussianInt(r, 1))


def gaussian_factor(a) -> list[tuple[GaussianInt, int]]:
    a = GaussianInt.of(a)
    n = a.norm()
    if n == 0:
        raise DomainError("cannot factor 0")
    if n >= WORD_BOUND:
        raise DomainError(f"norm {n} exceeds the 64-bit bound")
    out: list[tuple[GaussianInt, int]] = []
    rest = a
    for p, e in factor_int(n):
        if p == 2:
            pis = [GaussianInt(1, 1)]
        elif p % 4 == 3:
            pis = [GaussianInt(p)]
        else:
            pi = split_prime(p)
            pis = [pi, canonical_associate(pi.conj())]
        for pi in pis:
            k = 0
            while True:
                quo, rem = gaussian_divmod(rest, pi)
                if rem:
                    break
                rest, k = quo, k + 1
            if k:
                out.append((pi, k))
    assert rest.norm() == 1
    out.sort(key=lambda pe: _sort_key(pe[0]))
    return out


def _sort_key(a: GaussianInt):
    return (a.norm(), a.y, a.x)


_GAUSS = re.compile(r"^([+-]?\d+)?(?:([+-])(\d*)i)?$|^([+-]?)(\d*)i$")


def parse_gaussian(text: str) -> GaussianInt:
    s = str(text).replace(" ", "").replace("*", "")
    m = _GAUSS.match(s)
    if not s or not m:
        raise DomainError(f"cannot parse Gaussian integer {text!r}")
    if m.group(4) is not None or (m.group(1) is None and m.group(2) is None):
        if m.group(4) is None:
            raise DomainError(f"cannot parse Gaussian integer {text!r}")
        y = int(m.group(5)) if m.group(5) else 1
        return GaussianInt(0, -y if m.group(4) == "-" else y)
    x = int(m.group(1)) if m.group(1) else 0
    if m.group(2) is None:
        return GaussianInt(x)
    y = int(m.group(3)) if m.group(3) else 1
    return GaussianInt(x, -y if m.group(2) == "-" else y)


class GaussianIntegers(Domain):
    """Z[i]; A(N) is the annulus N^2 < x^2 + y^2 <= 4N^2."""

    tag = "zi"

    @property
    def zero(self):
        return GaussianInt(0, 0)

    @property
    def one(self):
        return GaussianInt(1, 0)

    def element(self, payload):
        if isinstance(payload, GaussianInt):
            return payload
        if isinstance(payload, int) and not isinstance(payload, bool):
            return GaussianInt(payload)
        if isinstance(payload, str):
            return parse_gaussian(payload)
        if isinstance(payload, (list, tuple)) and len(payload) == 2:
            return GaussianInt(int(payload[0]), int(payload[1]))
        raise DomainError(f"not a Gaussian integer: {payload!r}")

    def norm(self, x):
        x = GaussianInt.of(x)
        if not x:
            raise DomainError("norm of zero")
        return x.norm()

    def canonical(self, x):
        return canonical_associate(GaussianInt.of(x))

    def is_unit(self, x):
        return GaussianInt.of(x).norm() == 1

    def divmod(self, a, b):
        return gaussian_divmod(GaussianInt.of(a), GaussianInt.of(b))

    def _residue_data(self, m: GaussianInt):
        m = canonical_associate(m)
        g = math.gcd(m.x, m.y)
        xp, yp = m.x // g, m.y // g
        n1 = xp * xp + yp * yp
        # i = j in Z[i]/(m') = Z/n1
        j = (-xp * pow(yp, -1, n1)) % n1 if n1 > 1 else 0
        return g, n1, j

    def reduce(self, a, m):
        """Representative a0 + b0*i with 0 <= b0 < g and 0 <= a0 < g*n', where
        m = g*m' with m' primitive of norm n'."""
        a, m = GaussianInt.of(a), GaussianInt.of(m)
        if not m:
            raise DomainError("reduction modulo zero")
        g, n1, j = self._residue_data(m)
        b0 = a.y % g
        c = (a.y - b0) // g
        return GaussianInt((a.x + g * c * j) % (g * n1), b0)

    def residues(self, m):
        g, n1, _ = self._residue_data(GaussianInt.of(m))
        return [GaussianInt(a0, b0) for b0 in range(g) for a0 in range(g * n1)]

    def gcd(self, a, b):
        return gaussian_gcd(a, b)

    def is_prime(self, x):
        return gaussian_is_prime(x)

    def factor_element(self, x):
        return gaussian_factor(x)

    def primes_below_norm(self, bound):
        out = []
        for p in primes_below(bound):
            if p == 2:
                out.append(GaussianInt(1, 1))
            elif p % 4 == 1:
                pi = split_prime(p)
                out += [pi, canonical_associate(pi.conj())]
        p = 3
        while p * p < bound:
            if p % 4 == 3 and is_prime_int(p):
                out.append(GaussianInt(p))
            p += 2
        out.sort(key=_sort_key)
        return iter(out)

    def window_members(self, N, modulus=None, residue=None):
        lo, hi = N * N, 4 * N * N
        target = None
        if modulus is not None:
            target = self.reduce(self.element(residue), modulus)

        def gen():
            for x in range(-2 * N, 2 * N + 1):
                ymax = math.isqrt(hi - x * x)
                for y in range(-ymax, ymax + 1):
                    if x * x + y * y > lo:
                        a = GaussianInt(x, y)
                        if target is None or self.reduce(a, modulus) == target:
                            yield a

        return gen()

    def window_size(self, N):
        lo, hi = N * N, 4 * N * N
        total = 0
        for x in range(-2 * N, 2 * N + 1):
            total += 2 * math.isqrt(hi - x * x) + 1
            if x * x <= lo:
                total -= 2 * math.isqrt(lo - x * x) + 1
        return total

    @property
    def c_A(self):
        # class number formula for Q(i): 2^r1 (2 pi)^r2 h R / (w sqrt|d|) = 2 pi / (4 * 2)
        return math.pi / 4

    def sort_key(self, x):
        return _sort_key(GaussianInt.of(x))

    def parse(self, text):
        return parse_gaussian(text)

    def to_json(self, x):
        return [x.x, x.y]

    def from_json(self, value):
        return self.element(value)

    def describe(self):
        return {"tag": "zi"}


ZI = GaussianIntegers()


def gaussian_window(N: int, modulus=None, residue=None):
    return ZI.window_members(N, modulus, residue)
