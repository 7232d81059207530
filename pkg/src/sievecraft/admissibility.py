"""Admissible tuples of linear forms a_i x + h_i and their certificates."""

from __future__ import annotations

import re
from itertools import count
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .domains import Domain, Modulus, domain_from_json
from .domains.fq import Poly, PolynomialsOverFq
from .domains.gaussian import GaussianInt
from .errors import DomainError, MalformedTupleError


@dataclass(frozen=True)
class LinearFormTuple:
    domain: Domain
    forms: tuple[tuple[Any, Any], ...]

    def __post_init__(self):
        forms = tuple((self.domain.element(a), self.domain.element(h)) for a, h in self.forms)
        object.__setattr__(self, "forms", forms)
        if not forms:
            raise MalformedTupleError(0, "a tuple needs at least one form")
        seen = set()
        for i, (a, h) in enumerate(forms):
            if self.domain.is_zero(a):
                raise MalformedTupleError(i, "leading coefficient is zero")
            if isinstance(self.domain, PolynomialsOverFq) and not a.is_monic():
                raise MalformedTupleError(i, f"leading coefficient {a} is not monic")
            if not self.domain.is_unit(self.domain.gcd(a, h)):
                raise MalformedTupleError(i, f"gcd({a}, {h}) is not a unit")
            if (a, h) in seen:
                raise MalformedTupleError(i, f"duplicate form {self.format_form(i)}")
            seen.add((a, h))

    @classmethod
    def shifts(cls, domain: Domain, hs: Iterable) -> "LinearFormTuple":
        return cls(domain, tuple((domain.one, h) for h in hs))

    @property
    def k(self) -> int:
        return len(self.forms)

    def values(self, alpha) -> list:
        return [a * alpha + h for a, h in self.forms]

    def value(self, i: int, alpha):
        a, h = self.forms[i]
        return a * alpha + h

    def format_form(self, i: int) -> str:
        a, h = self.forms[i]
        d = self.domain
        lead = "x" if a == d.one else f"({d.format(a)})x"
        if d.is_zero(h):
            return lead
        return f"{lead}+{d.format(h)}" if not d.format(h).startswith("-") else f"{lead}{d.format(h)}"

    def __str__(self):
        return "{" + ", ".join(self.format_form(i) for i in range(self.k)) + "}"

    def to_json(self) -> dict:
        d = self.domain
        return {"domain": d.describe(),
                "forms": [{"a": d.to_json(a), "h": d.to_json(h)} for a, h in self.forms]}

    @classmethod
    def from_json(cls, obj: dict) -> "LinearFormTuple":
        d = domain_from_json(obj["domain"])
        return cls(d, tuple((d.from_json(f["a"]), d.from_json(f["h"])) for f in obj["forms"]))

    def sub_tuple(self, indices: Sequence[int]) -> "LinearFormTuple":
        return LinearFormTuple(self.domain, tuple(self.forms[i] for i in indices))


_FORM = re.compile(r"^(?:\((?P<pa>[^()]*)\)|(?P<a>[^()]*?))\*?[xf](?P<h>[+-].*)?$")


def parse_forms(domain: Domain, text: str) -> LinearFormTuple:
    """Parse ``"x, x+2"``, ``"2x+1, 2x+3"``, ``"f, f+t^2+t"`` or ``"(1+i)x+2i"``."""
    forms = []
    for part in text.split(","):
        s = part.replace(" ", "")
        m = _FORM.match(s)
        if not m:
            raise DomainError(f"cannot parse linear form {part!r}")
        a_text = m.group("pa") if m.group("pa") is not None else m.group("a")
        if a_text in ("", "+"):
            a = domain.one
        elif a_text == "-":
            a = -domain.one
        else:
            a = domain.parse(a_text)
        h_text = m.group("h")
        if not h_text:
            h = domain.zero
        elif h_text[1:].startswith("(") and h_text.endswith(")"):
            h = domain.parse(h_text[2:-1])
            if h_text[0] == "-":
                h = -h
        else:
            h = domain.parse(h_text.lstrip("+"))
        forms.append((a, h))
    return LinearFormTuple(domain, tuple(forms))


@dataclass
class AdmissibilityCertificate:
    verdict: str
    witnesses: list[tuple[Modulus, Any]] = field(default_factory=list)
    refuting_prime: Modulus | None = None
    # residue -> index of a form vanishing there
    cover: list[tuple[Any, int]] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.verdict == "admissible"

    def to_json(self, domain: Domain) -> dict:
        out: dict = {"verdict": self.verdict}
        if self.admissible:
            out["witnesses"] = [{"prime": domain.to_json(p.generator), "norm": p.norm,
                                 "alpha": domain.to_json(r)} for p, r in self.witnesses]
        else:
            out["refuting_prime"] = {"prime": domain.to_json(self.refuting_prime.generator),
                                     "norm": self.refuting_prime.norm}
            out["cover"] = [{"residue": domain.to_json(r), "index": i} for r, i in self.cover]
        return out

    @classmethod
    def from_json(cls, domain: Domain, obj: dict) -> "AdmissibilityCertificate":
        if obj["verdict"] == "admissible":
            return cls("admissible", witnesses=[
                (domain.modulus(domain.from_json(w["prime"])), domain.from_json(w["alpha"]))
                for w in obj["witnesses"]])
        rp = obj["refuting_prime"]
        return cls("inadmissible", refuting_prime=domain.modulus(domain.from_json(rp["prime"])),
                   cover=[(domain.from_json(c["residue"]), c["index"]) for c in obj["cover"]])


def residue_cover(tup: LinearFormTuple, p) -> set:
    """Residues r mod p at which some form vanishes mod p."""
    d = tup.domain
    p = d.modulus(p)
    out = set()
    for a, h in tup.forms:
        if d.divides(p.generator, a):
            continue
        inv = d.modinv(a, p.generator)
        out.add(d.reduce(-h * inv, p.generator))
    return out


def _cover_index(tup: LinearFormTuple, p: Modulus, r) -> int | None:
    d = tup.domain
    for i, (a, h) in enumerate(tup.forms):
        if d.divides(p.generator, a * r + h):
            return i
    return None


def check_admissible(tup: LinearFormTuple) -> AdmissibilityCertificate:
    """Decide admissibility; only primes of norm <= k can be fully covered."""
    d = tup.domain
    witnesses = []
    for p in d.primes_up_to_norm(tup.k + 1):
        cover = residue_cover(tup, p)
        residues = d.residues(p.generator)
        if len(cover) == len(residues):
            return AdmissibilityCertificate(
                "inadmissible", refuting_prime=p,
                cover=[(r, _cover_index(tup, p, r)) for r in residues])
        witness = next(r for r in residues if r not in cover)
        witnesses.append((p, witness))
    return AdmissibilityCertificate("admissible", witnesses=witnesses)


def is_admissible(tup: LinearFormTuple) -> bool:
    return check_admissible(tup).admissible


def verify_certificate(tup: LinearFormTuple, cert: AdmissibilityCertificate) -> bool:
    """Check a certificate by direct evaluation of the forms."""
    d = tup.domain

    def divides_product(p: Modulus, alpha) -> bool:
        return any(d.divides(p.generator, v) for v in tup.values(alpha))

    if cert.admissible:
        needed = {p.generator for p in d.primes_up_to_norm(tup.k + 1)}
        given = {p.generator for p, _ in cert.witnesses}
        if needed != given:
            return False
        return all(d.is_prime(p.generator) and not divides_product(p, r) for p, r in cert.witnesses)
    p = cert.refuting_prime
    if p is None or not d.is_prime(p.generator):
        return False
    listed = {d.reduce(r, p.generator): i for r, i in cert.cover}
    for r in d.residues(p.generator):
        i = listed.get(r)
        if i is None or not d.divides(p.generator, tup.value(i, r)):
            return False
    return True


def _candidate_shifts(domain: Domain):
    """Shift candidates in a fixed order, starting from 0."""
    if domain.tag == "z":
        yield from count(0)
    elif domain.tag == "fq":
        for v in count(0):
            yield Poly.from_int(v, domain.q)
    else:
        yield GaussianInt(0, 0)
        for r in count(1):
            ring = [GaussianInt(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)
                    if max(abs(x), abs(y)) == r]
            ring.sort(key=lambda g: (g.norm(), g.y, g.x))
            yield from ring


def generate_admissible(domain: Domain, k: int, style: str = "dense-scan") -> LinearFormTuple:
    """Deterministically produce an admissible tuple of k monic shifts.

    ``shifted-primes`` uses k primes of norm > k as shifts (residue 0 then
    stays uncovered modulo every small prime); ``dense-scan`` greedily adds the
    next shift in a fixed enumeration that keeps the tuple admissible.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return LinearFormTuple.shifts(domain, [domain.zero])
    if style == "shifted-primes":
        bound = 4 * k + 8
        while True:
            shifts = [p.generator for p in domain.primes_up_to_norm(bound) if p.norm > k]
            if len(shifts) >= k:
                return LinearFormTuple.shifts(domain, shifts[:k])
            bound *= 2
    if style != "dense-scan":
        raise ValueError(f"unknown style {style!r}")
    shifts: list = []
    for h in _candidate_shifts(domain):
        trial = LinearFormTuple.shifts(domain, shifts + [h])
        if is_admissible(trial):
            shifts.append(h)
            if len(shifts) == k:
                return trial
    raise AssertionError("unreachable")
