"""Arithmetic domains: Z, F_q[t] and Z[i] behind a common contract."""

from __future__ import annotations

from ..errors import DomainError
from .base import WORD_BOUND, Domain, Modulus, Window, squarefree_divisors
from .fq import FqX, Poly, PolynomialsOverFq, count_irreducibles, is_irreducible, parse_poly, poly_arith
from .gaussian import ZI, GaussianInt, GaussianIntegers, gaussian_gcd, gaussian_is_prime, gaussian_window
from .integers import ZZ, Integers, is_prime_int, miller_rabin

__all__ = [
    "WORD_BOUND", "Domain", "Modulus", "Window", "squarefree_divisors",
    "FqX", "Poly", "PolynomialsOverFq", "count_irreducibles", "is_irreducible", "parse_poly", "poly_arith",
    "ZI", "GaussianInt", "GaussianIntegers", "gaussian_gcd", "gaussian_is_prime", "gaussian_window",
    "ZZ", "Integers", "is_prime_int", "miller_rabin",
    "get_domain", "domain_from_json",
]


def get_domain(tag: str, q: int | None = None) -> Domain:
    """Look up a domain by tag: ``z``, ``zi`` or ``fq`` (with ``q``)."""
    tag = tag.lower()
    if tag in ("z", "zz", "integers"):
        return ZZ
    if tag in ("zi", "gaussian", "z[i]"):
        return ZI
    if tag in ("fq", "f_q[t]", "fqt"):
        if q is None:
            raise DomainError("domain fq needs q")
        return FqX(q)
    raise DomainError(f"unknown domain {tag!r}")


def domain_from_json(value) -> Domain:
    if isinstance(value, str):
        return get_domain(value)
    return get_domain(value["tag"], value.get("q"))
