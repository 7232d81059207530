"""Constellation scans, congruence-class constructions and a level-of-distribution probe."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .admissibility import LinearFormTuple, check_admissible
from .domains import Domain, Modulus
from .errors import DomainError, InadmissibleError, SievecraftError


class InadmissibleScanWarning(UserWarning):
    pass


@dataclass(frozen=True)
class HitRecord:
    alpha: Any
    prime_indices: tuple[int, ...]  # 1-based
    values: tuple = ()

    @property
    def count(self) -> int:
        return len(self.prime_indices)

    def to_json(self, domain: Domain) -> dict:
        return {"alpha": domain.to_json(self.alpha),
                "prime_indices": list(self.prime_indices),
                "count": self.count,
                "values": [domain.to_json(v) for v in self.values]}


def window_alphas(domain: Domain, lo: int | None = None, hi: int | None = None,
                  N: int | None = None) -> list:
    """Scan ranges: the interval (lo, hi] over Z, or the window A(N) otherwise."""
    if lo is not None and hi is not None:
        if domain.tag != "z":
            raise ValueError("an interval (lo, hi] only makes sense over Z")
        return list(range(lo + 1, hi + 1))
    if N is None:
        raise ValueError("give either (lo, hi) or N")
    return list(domain.window_members(N))


def _hits_in(tup: LinearFormTuple, alphas: Sequence, m: int) -> list[HitRecord]:
    d = tup.domain
    out = []
    for alpha in alphas:
        vals = tup.values(alpha)
        idx = tuple(i + 1 for i, v in enumerate(vals) if d.is_prime(v))
        if len(idx) >= m:
            out.append(HitRecord(alpha, idx, tuple(vals)))
    return out


def _hits_job(args):
    return _hits_in(*args)


def scan_constellations(tup: LinearFormTuple, alphas: Iterable, m: int,
                        threads: int = 1) -> list[HitRecord]:
    """Every alpha (in the given order) with at least m of the forms prime."""
    if not 1 <= m <= tup.k:
        raise ValueError(f"threshold m must be in 1..{tup.k}")
    cert = check_admissible(tup)
    if not cert.admissible:
        warnings.warn(f"tuple {tup} is inadmissible (every residue mod "
                      f"{tup.domain.format(cert.refuting_prime.generator)} is covered); "
                      "expect only finitely many hits", InadmissibleScanWarning, stacklevel=2)
    alphas = list(alphas)
    if threads > 1 and len(alphas) > 5000:
        size = -(-len(alphas) // threads)
        chunks = [alphas[i:i + size] for i in range(0, len(alphas), size)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(_hits_job, [(tup, ch, m) for ch in chunks])
            return [h for part in parts for h in part]
    return _hits_in(tup, alphas, m)


def verify_hit(tup: LinearFormTuple, hit: HitRecord) -> bool:
    d = tup.domain
    vals = tup.values(hit.alpha)
    return all(d.is_prime(v) == (i + 1 in hit.prime_indices) for i, v in enumerate(vals))


def congruence_forms(domain: Domain, b, h, shifts: Sequence) -> LinearFormTuple:
    """Forms h*x + (h*h_i + b), whose prime values all lie in b (mod h)."""
    b, h = domain.element(b), domain.element(h)
    if domain.is_zero(h) or domain.is_unit(h):
        raise DomainError("the modulus h must be a non-zero non-unit")
    if not domain.coprime(b, h):
        raise DomainError(f"gcd({domain.format(b)}, {domain.format(h)}) is not a unit")
    if domain.tag == "z" and abs(h) < 3:
        raise DomainError("over Z the modulus needs |h| >= 3")
    base = LinearFormTuple.shifts(domain, [domain.element(s) for s in shifts])
    cert = check_admissible(base)
    if not cert.admissible:
        raise InadmissibleError(cert.refuting_prime, cert)
    forms = LinearFormTuple(domain, tuple((h, h * domain.element(s) + b) for s in shifts))
    cert = check_admissible(forms)
    if not cert.admissible:
        raise InadmissibleError(cert.refuting_prime, cert)
    return forms


def congruence_demo(domain: Domain, b, h, shifts: Sequence, m: int, alphas: Iterable,
                    threads: int = 1) -> list[HitRecord]:
    """Scan the forms h*x + h*h_i + b; every prime found is checked to be = b (mod h)."""
    forms = congruence_forms(domain, b, h, shifts)
    b, h = domain.element(b), domain.element(h)
    target = domain.reduce(b, h)
    hits = scan_constellations(forms, alphas, m, threads=threads)
    for hit in hits:
        for i in hit.prime_indices:
            if domain.reduce(hit.values[i - 1], h) != target:
                raise SievecraftError(f"prime {domain.format(hit.values[i - 1])} escaped the class")
    return hits


def hits_to_jsonl(domain: Domain, hits: Iterable[HitRecord]) -> str:
    return "".join(json.dumps(h.to_json(domain), sort_keys=True) + "\n" for h in hits)


# -- level-of-distribution probe ---------------------------------------------------

@dataclass
class ModulusError:
    modulus: Modulus
    phi: int
    max_error: Fraction
    worst_residue: Any
    expected: Fraction
    k0: int
    identity_sum: Fraction

    @property
    def relative(self) -> float:
        return float(self.max_error / self.expected) if self.expected else 0.0

    @property
    def identity_ok(self) -> bool:
        return self.identity_sum == -self.k0


@dataclass
class ProbeReport:
    domain: Domain
    N: int
    window_size: int
    primes: int
    B: float
    moduli: list[ModulusError] = field(default_factory=list)

    @property
    def aggregate(self) -> float:
        return float(sum(e.max_error for e in self.moduli))

    @property
    def envelope(self) -> float:
        return self.window_size / math.log(self.window_size) ** self.B

    def hayes_bound(self, e: ModulusError) -> float:
        """(log 2|q|) |A(N)|^(1/2), the explicit polynomial-ring bound shape."""
        return math.log(2 * e.modulus.norm) * math.sqrt(self.window_size)

    def to_json(self) -> dict:
        d = self.domain
        return {
            "domain": d.describe(),
            "N": self.N,
            "window": self.window_size,
            "primes": self.primes,
            "B": self.B,
            "envelope": self.envelope,
            "aggregate": self.aggregate,
            "moduli": [{
                "modulus": d.to_json(e.modulus.generator),
                "norm": e.modulus.norm,
                "phi": e.phi,
                "max_error": float(e.max_error),
                "worst_residue": None if e.worst_residue is None else d.to_json(e.worst_residue),
                "relative": e.relative,
                "k0": e.k0,
                "identity_ok": e.identity_ok,
                "hayes_bound": self.hayes_bound(e) if d.tag == "fq" else None,
            } for e in self.moduli],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["modulus", "norm", "phi", "max_error", "relative", "k0", "identity_ok"])
        for e in self.moduli:
            w.writerow([self.domain.format(e.modulus.generator), e.modulus.norm, e.phi,
                        repr(float(e.max_error)), repr(e.relative), e.k0, e.identity_ok])
        return buf.getvalue()


def modulus_error(domain: Domain, primes: Sequence, m: Modulus) -> ModulusError:
    """max over coprime residues of | #{p = r (mod m)} - |P|/phi(m) |."""
    counts = Counter(domain.reduce(p, m.generator) for p in primes)
    phi = domain.euler_phi(m) if m.norm > 1 else 1
    expected = Fraction(len(primes), phi)
    worst, worst_r, total, coprime_hits = Fraction(-1), None, Fraction(0), 0
    for r in domain.residues(m.generator):
        if m.norm > 1 and not domain.coprime(r, m.generator):
            continue
        err = counts.get(r, 0) - expected
        total += err
        coprime_hits += counts.get(r, 0)
        if abs(err) > worst:
            worst, worst_r = abs(err), r
    return ModulusError(m, phi, worst, worst_r, expected, len(primes) - coprime_hits, total)


def bv_probe(domain: Domain, N: int, modulus_bound: int, B: float = 1.0) -> ProbeReport:
    """Errors in the prime counts of A(N) over residue classes, for every
    squarefree modulus of norm <= modulus_bound."""
    size = domain.window_size(N)
    if modulus_bound > size:
        raise ValueError(f"modulus bound {modulus_bound} exceeds |A(N)| = {size}")
    primes = [a for a in domain.window_members(N) if domain.is_prime(a)]
    report = ProbeReport(domain, N, size, len(primes), B)
    for m, _ in domain.squarefree_moduli(modulus_bound + 1):
        report.moduli.append(modulus_error(domain, primes, m))
    return report
