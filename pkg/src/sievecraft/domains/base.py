"""The arithmetic-domain contract shared by Z, F_q[t] and Z[i].

Elements are plain Python values (``int``, :class:`~sievecraft.domains.fq.Poly`,
:class:`~sievecraft.domains.gaussian.GaussianInt`).  Ideals are principal in all
three rings, so a :class:`Modulus` is just a canonical generator together with
its norm ``|A/q|``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from ..errors import DomainError, NotCoprimeError

# Norms are kept below this bound so desk-scale loops stay on machine-sized values.
WORD_BOUND = 2**64


@dataclass(frozen=True)
class Modulus:
    """Principal ideal given by its canonical generator."""

    generator: Any
    norm: int

    def __str__(self) -> str:
        return str(self.generator)


class Domain(ABC):
    """A Euclidean ring with finite residue rings, a notion of size window and a
    canonical choice of associate.

    Subclasses supply the ring primitives; everything derived from them
    (factorisation into :class:`Modulus` objects, Moebius, Euler phi, CRT,
    squarefree moduli) lives here.
    """

    tag: str = ""

    # -- ring primitives -------------------------------------------------
    @property
    @abstractmethod
    def zero(self) -> Any: ...

    @property
    @abstractmethod
    def one(self) -> Any: ...

    @abstractmethod
    def element(self, payload) -> Any:
        """Coerce a raw payload (int, coefficient list, pair) into an element."""

    @abstractmethod
    def norm(self, x) -> int: ...

    @abstractmethod
    def canonical(self, x) -> Any:
        """Canonical associate of ``x`` (``0`` maps to ``0``)."""

    @abstractmethod
    def is_unit(self, x) -> bool: ...

    @abstractmethod
    def divmod(self, a, b) -> tuple[Any, Any]: ...

    @abstractmethod
    def reduce(self, a, m) -> Any:
        """Canonical representative of ``a`` modulo the element ``m``."""

    @abstractmethod
    def residues(self, m) -> list:
        """All canonical residues modulo ``m`` in canonical order."""

    @abstractmethod
    def is_prime(self, x) -> bool: ...

    @abstractmethod
    def factor_element(self, x) -> list[tuple[Any, int]]:
        """Prime factorisation of a nonzero element into canonical primes."""

    @abstractmethod
    def primes_below_norm(self, bound: int) -> Iterator[Any]:
        """Canonical prime elements of norm ``< bound`` in canonical order."""

    @abstractmethod
    def window_members(self, N: int, modulus=None, residue=None) -> Iterator[Any]: ...

    @abstractmethod
    def window_size(self, N: int) -> int: ...

    @property
    @abstractmethod
    def c_A(self) -> float:
        """Residue at s = 1 of the zeta function of the ring."""

    @abstractmethod
    def sort_key(self, x): ...

    @abstractmethod
    def parse(self, text: str) -> Any: ...

    def format(self, x) -> str:
        return str(x)

    @abstractmethod
    def to_json(self, x): ...

    @abstractmethod
    def from_json(self, value) -> Any: ...

    @abstractmethod
    def describe(self) -> dict: ...

    # -- derived arithmetic -----------------------------------------------
    def is_zero(self, x) -> bool:
        return x == self.zero

    def xgcd(self, a, b) -> tuple[Any, Any, Any]:
        """Return ``(g, s, t)`` with ``s*a + t*b == g`` and ``g`` canonical."""
        r0, r1 = a, b
        s0, s1 = self.one, self.zero
        t0, t1 = self.zero, self.one
        while not self.is_zero(r1):
            quo, rem = self.divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, s0 - quo * s1
            t0, t1 = t1, t0 - quo * t1
        if self.is_zero(r0):
            return r0, s0, t0
        g = self.canonical(r0)
        # g = u * r0 for a unit u
        u = self.divmod(g, r0)[0]
        return g, u * s0, u * t0

    def gcd(self, a, b):
        return self.xgcd(a, b)[0]

    def divides(self, d, x) -> bool:
        return self.is_zero(self.reduce(x, d))

    def coprime(self, a, b) -> bool:
        return self.is_unit(self.gcd(a, b))

    def modinv(self, a, m):
        g, s, _ = self.xgcd(a, m)
        if not self.is_unit(g):
            raise DomainError(f"{a} is not invertible modulo {m}: common factor {g}")
        return self.reduce(s, m)

    def modulus(self, x) -> Modulus:
        if isinstance(x, Modulus):
            return x
        x = self.element(x)
        if self.is_zero(x):
            raise DomainError("the zero ideal is not a modulus")
        g = self.canonical(x)
        return Modulus(g, self.norm(g))

    def unit_modulus(self) -> Modulus:
        return Modulus(self.one, 1)

    def mod_mul(self, m1: Modulus, m2: Modulus) -> Modulus:
        return Modulus(self.canonical(m1.generator * m2.generator), m1.norm * m2.norm)

    def factorize(self, m) -> list[tuple[Modulus, int]]:
        m = self.modulus(m)
        if m.norm >= WORD_BOUND:
            raise DomainError(f"norm {m.norm} exceeds the 64-bit bound")
        if m.norm == 1:
            return []
        return [(self.modulus(p), e) for p, e in self.factor_element(m.generator)]

    def mobius(self, m) -> int:
        fac = self.factorize(m)
        if any(e > 1 for _, e in fac):
            return 0
        return -1 if len(fac) % 2 else 1

    def euler_phi(self, m) -> int:
        out = 1
        for p, e in self.factorize(m):
            out *= p.norm ** (e - 1) * (p.norm - 1)
        return out

    def crt(self, congruences: Sequence[tuple[Any, Any]]) -> tuple[Any, Modulus]:
        """Solve simultaneous congruences with pairwise coprime moduli."""
        mods = [self.modulus(m) for _, m in congruences]
        for i in range(len(mods)):
            for j in range(i + 1, len(mods)):
                g = self.gcd(mods[i].generator, mods[j].generator)
                if not self.is_unit(g):
                    raise NotCoprimeError(mods[i], mods[j], g)
        res, mod = self.zero, self.unit_modulus()
        for (r, _), m in zip(congruences, mods):
            r = self.element(r)
            # res + mod*s*(r - res) with s = mod^{-1} (mod m)
            s = self.modinv(mod.generator, m.generator)
            new_mod = self.mod_mul(mod, m)
            res = self.reduce(res + mod.generator * s * (r - res), new_mod.generator)
            mod = new_mod
        return self.reduce(res, mod.generator), mod

    def primes_up_to_norm(self, bound: int) -> Iterator[Modulus]:
        """All primes of norm strictly below ``bound``, norm-ascending."""
        for p in self.primes_below_norm(bound):
            yield Modulus(p, self.norm(p))

    def squarefree_moduli(self, bound: int, exclude: Modulus | None = None,
                          strict: bool = True) -> list[tuple[Modulus, tuple[Modulus, ...]]]:
        """Squarefree moduli with norm ``< bound`` (``<=`` when ``strict`` is
        false), coprime to ``exclude``, each paired with its prime factors.

        Sorted by norm, then canonically.
        """
        limit = bound if strict else bound + 1
        primes = [p for p in self.primes_up_to_norm(limit)
                  if exclude is None or not self.divides(p.generator, exclude.generator)]
        out: list[tuple[Modulus, tuple[Modulus, ...]]] = []

        def extend(start: int, cur: Modulus, used: tuple[Modulus, ...]):
            out.append((cur, used))
            for j in range(start, len(primes)):
                p = primes[j]
                if cur.norm * p.norm >= limit:
                    # primes are norm-sorted; later ones are at least as large
                    break
                extend(j + 1, self.mod_mul(cur, p), used + (p,))

        extend(0, self.unit_modulus(), ())
        out.sort(key=lambda item: (item[0].norm, self.sort_key(item[0].generator)))
        return out

    def window(self, N: int, modulus=None, residue=None) -> "Window":
        return Window(self, N, None if modulus is None else self.modulus(modulus),
                      None if residue is None else self.element(residue))

    def __eq__(self, other):
        return isinstance(other, Domain) and self.describe() == other.describe()

    def __hash__(self):
        return hash(tuple(sorted(self.describe().items())))

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"


@dataclass(frozen=True)
class Window:
    """The sampling set A(N), optionally cut down to a residue class."""

    domain: Domain
    N: int
    modulus: Modulus | None = None
    residue: Any = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __iter__(self) -> Iterator[Any]:
        return self.domain.window_members(
            self.N, None if self.modulus is None else self.modulus.generator, self.residue)

    def members(self) -> list:
        if "members" not in self._cache:
            self._cache["members"] = list(self)
        return self._cache["members"]

    @property
    def full_size(self) -> int:
        """|A(N)| ignoring the congruence constraint."""
        return self.domain.window_size(self.N)

    def __len__(self) -> int:
        if self.modulus is None:
            return self.full_size
        return len(self.members())


def squarefree_divisors(domain: Domain, primes: Iterable[Modulus]) -> list[tuple[Modulus, tuple[Modulus, ...]]]:
    """All divisors of the squarefree product of ``primes``."""
    out = [(domain.unit_modulus(), ())]
    for p in primes:
        out += [(domain.mod_mul(d, p), used + (p,)) for d, used in out]
    return out


def log_norm(m: Modulus) -> float:
    return math.log(m.norm)
