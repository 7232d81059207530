"""The rational integers, with deterministic 64-bit primality and Pollard-Brent factoring."""

from __future__ import annotations

import math
import random
from typing import Iterator

from ..errors import DomainError
from .base import WORD_BOUND, Domain

# Strong-pseudoprime bases that are deterministic for every n < 3.3 * 10**24.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SIEVE_LIMIT = 1 << 22
_sieve: bytearray | None = None


def sieve_flags(limit: int) -> bytearray:
    """Eratosthenes flags for ``0 <= n < limit``."""
    flags = bytearray(b"\x01") * max(limit, 2)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit - 1) + 1 if limit > 1 else 0):
        if flags[p]:
            flags[p * p::p] = bytes(len(range(p * p, limit, p)))
    return flags[:limit]


def primes_below(limit: int) -> list[int]:
    if limit <= 2:
        return []
    flags = sieve_flags(limit)
    return [i for i in range(limit) if flags[i]]


def _small_flags() -> bytearray:
    global _sieve
    if _sieve is None:
        _sieve = sieve_flags(_SIEVE_LIMIT)
    return _sieve


def miller_rabin(n: int) -> bool:
    """Deterministic strong-pseudoprime test (all bases in ``MR_BASES``)."""
    if n < 2:
        return False
    for p in MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime_int(n: int) -> bool:
    n = abs(n)
    if n < _SIEVE_LIMIT:
        return bool(_small_flags()[n])
    if n >= WORD_BOUND:
        raise DomainError(f"{n} exceeds the 64-bit bound")
    return miller_rabin(n)


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor_int(n: int) -> list[tuple[int, int]]:
    """Prime factorisation of ``|n|`` as sorted ``(p, e)`` pairs."""
    n = abs(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    if n >= WORD_BOUND:
        raise DomainError(f"{n} exceeds the 64-bit bound")
    counts: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    rng = random.Random(n)  # deterministic per input
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime_int(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _pollard_brent(m, rng)
        stack += [d, m // d]
    return sorted(counts.items())


class Integers(Domain):
    """Z with positive canonical associates and A(N) = (N, 2N]."""

    tag = "z"

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def element(self, payload):
        if isinstance(payload, bool) or not isinstance(payload, int):
            if isinstance(payload, str):
                return self.parse(payload)
            raise DomainError(f"not an integer: {payload!r}")
        return payload

    def norm(self, x):
        if x == 0:
            raise DomainError("norm of zero")
        return abs(x)

    def canonical(self, x):
        return abs(x)

    def is_unit(self, x):
        return abs(x) == 1

    def divmod(self, a, b):
        if b == 0:
            raise DomainError("division by zero")
        return divmod(a, b)

    def reduce(self, a, m):
        return a % abs(m)

    def residues(self, m):
        return list(range(abs(m)))

    def xgcd(self, a, b):
        s0, s1, t0, t1 = 1, 0, 0, 1
        while b:
            q, r = divmod(a, b)
            a, b = b, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if a < 0:
            return -a, -s0, -t0
        return a, s0, t0

    def gcd(self, a, b):
        return math.gcd(a, b)

    def is_prime(self, x):
        return is_prime_int(x)

    def factor_element(self, x):
        return factor_int(x)

    def primes_below_norm(self, bound):
        if bound <= _SIEVE_LIMIT:
            flags = _small_flags()
            return (p for p in range(2, max(bound, 2)) if flags[p])
        return iter(primes_below(bound))

    def window_members(self, N, modulus=None, residue=None) -> Iterator[int]:
        if modulus is None:
            return iter(range(N + 1, 2 * N + 1))
        m = abs(modulus)
        r = residue % m
        first = N + 1 + (r - (N + 1)) % m
        return iter(range(first, 2 * N + 1, m))

    def window_size(self, N):
        return N

    def count_in_class(self, N, modulus, residue) -> int:
        """|A(N; m, r)| in O(1)."""
        m = abs(modulus)
        return (2 * N - residue) // m - (N - residue) // m

    @property
    def c_A(self):
        return 1.0

    def sort_key(self, x):
        return (abs(x), x < 0)

    def parse(self, text):
        try:
            return int(str(text).replace(" ", ""))
        except ValueError:
            raise DomainError(f"cannot parse integer {text!r}") from None

    def to_json(self, x):
        return x

    def from_json(self, value):
        return self.element(value)

    def describe(self):
        return {"tag": "z"}


ZZ = Integers()


def primes_in_range(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p < hi using the cached sieve where possible."""
    if hi <= _SIEVE_LIMIT:
        flags = _small_flags()
        return [p for p in range(max(lo, 2), hi) if flags[p]]
    return [p for p in range(max(lo, 2), hi) if is_prime_int(p)]

