from __future__ import annotations

import itertools
import sys
import math

import pytest

from sievecraft.domains import FqX, Poly


def trial_is_prime(n: int) -> bool:
    n = abs(n)
    if n < 2:
        return False
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            return False
    return True


def all_polys(q: int, max_deg: int):
    """Every polynomial over F_q of degree <= max_deg, zero included."""
    for coeffs in itertools.product(range(q), repeat=max_deg + 1):
        yield Poly(coeffs, q)


def monic(q: int, n: int):
    for low in itertools.product(range(q), repeat=n):
        yield Poly(list(low) + [1], q)


def trial_irreducible(f: Poly) -> bool:
    """No monic divisor of degree 1..deg/2, by direct division."""
    n = f.degree
    if n < 1:
        return False
    for d in range(1, n // 2 + 1):
        for g in monic(f.q, d):
            if (f % g).degree < 0:
                return False
    return True


def brute_admissible(tup) -> bool:
    """Admissible iff no prime of norm <= k divides L(r) for every residue r."""
    d = tup.domain
    k = tup.k
    if d.tag == "z":
        primes = [p for p in range(2, k + 1) if trial_is_prime(p)]
        for p in primes:
            if all(math.prod(v for v in tup.values(r)) % p == 0 for r in range(p)):
                return False
        return True
    q = d.q
    for n in range(1, 64):
        if q ** n > k:
            break
        for p in monic(q, n):
            if not trial_irreducible(p):
                continue
            residues = [Poly(c, q) for c in itertools.product(range(q), repeat=n)]
            if all(any((v % p).degree < 0 for v in tup.values(r)) for r in residues):
                return False
    return True


@pytest.fixture
def f2():
    return FqX(2)


@pytest.fixture
def f3():
    return FqX(3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
