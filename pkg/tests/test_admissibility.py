from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sievecraft.admissibility import (AdmissibilityCertificate, LinearFormTuple, check_admissible,
                                      generate_admissible, is_admissible, parse_forms, residue_cover,
                                      verify_certificate)
from sievecraft.domains import ZI, ZZ, FqX, Poly
from sievecraft.errors import MalformedTupleError

from conftest import brute_admissible, trial_is_prime


def test_residue_cover_examples():
    assert residue_cover(parse_forms(ZZ, "x, x+1"), 2) == {0, 1}
    assert residue_cover(parse_forms(ZZ, "2x+1, 2x+3"), 2) == set()
    assert residue_cover(parse_forms(ZZ, "2x+1, 2x+3"), 3) == {0, 1}


def test_residue_cover_brute_force():
    tup = parse_forms(ZZ, "2x+1, 2x+3")
    assert {r for r in range(3) if any(v % 3 == 0 for v in tup.values(r))} == {0, 1}


def test_check_admissible_examples(f2):
    assert check_admissible(parse_forms(ZZ, "x, x+2")).admissible
    cert = check_admissible(parse_forms(f2, "f, f+1"))
    assert not cert.admissible and str(cert.refuting_prime.generator) == "t"
    assert check_admissible(parse_forms(f2, "f, f+t^2+t")).admissible


def test_malformed_tuples(f2):
    with pytest.raises(MalformedTupleError) as exc:
        parse_forms(ZZ, "x, 2x+4")
    assert exc.value.index == 1
    with pytest.raises(MalformedTupleError):
        parse_forms(ZZ, "x, x")
    with pytest.raises(MalformedTupleError):
        LinearFormTuple(ZZ, ((0, 1),))
    with pytest.raises(MalformedTupleError):
        LinearFormTuple(FqX(3), ((Poly([0, 2], 3), Poly([1], 3)),))


def test_gaussian_forms_parse():
    tup = parse_forms(ZI, "x, x+(1+i)")
    assert tup.k == 2 and check_admissible(tup).admissible


def test_generate_examples(f3):
    assert str(generate_admissible(ZZ, 1)) == "{x}"
    for style in ("shifted-primes", "dense-scan"):
        for k in range(1, 9):
            tup = generate_admissible(ZZ, k, style)
            assert tup.k == k and is_admissible(tup)
    tup = generate_admissible(f3, 2)
    assert tup.k == 2 and check_admissible(tup).admissible
    assert generate_admissible(ZZ, 5) == generate_admissible(ZZ, 5)


def test_certificates_reverify_and_round_trip(f2):
    for tup in (parse_forms(ZZ, "x, x+2, x+6"), parse_forms(ZZ, "x, x+2, x+4"),
                parse_forms(f2, "f, f+1"), parse_forms(f2, "f, f+t^2+t"), parse_forms(ZI, "x, x+1")):
        cert = check_admissible(tup)
        assert verify_certificate(tup, cert)
        blob = json.loads(json.dumps(cert.to_json(tup.domain)))
        assert verify_certificate(tup, AdmissibilityCertificate.from_json(tup.domain, blob))
        assert LinearFormTuple.from_json(json.loads(json.dumps(tup.to_json()))) == tup


def test_forged_certificate_rejected():
    tup = parse_forms(ZZ, "x, x+2")
    cert = check_admissible(tup)
    cert.witnesses = [(ZZ.modulus(2), 0)]
    assert not verify_certificate(tup, cert)


def _random_z_tuple(rng, k):
    forms = set()
    while len(forms) < k:
        a = rng.choice([v for v in range(-50, 51) if v])
        h = rng.randint(-50, 50)
        if ZZ.is_unit(ZZ.gcd(a, h)):
            forms.add((a, h))
    return LinearFormTuple(ZZ, tuple(sorted(forms)))


def test_oracle_equivalence_z():
    rng = random.Random(7)
    for _ in range(300):
        tup = _random_z_tuple(rng, rng.randint(1, 6))
        assert is_admissible(tup) == brute_admissible(tup), tup


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 3), st.data())
def test_oracle_equivalence_fq(q, data):
    F = FqX(q)
    k = data.draw(st.integers(1, 5))
    forms = set()
    for _ in range(k):
        h = Poly(data.draw(st.lists(st.integers(0, q - 1), max_size=3)), q)
        a = Poly(data.draw(st.lists(st.integers(0, q - 1), max_size=2)) + [1], q)
        if F.is_unit(F.gcd(a, h)):
            forms.add((a, h))
    if not forms:
        return
    tup = LinearFormTuple(F, tuple(forms))
    assert is_admissible(tup) == brute_admissible(tup)


def test_sub_tuples_stay_admissible():
    rng = random.Random(11)
    for _ in range(100):
        tup = _random_z_tuple(rng, rng.randint(2, 6))
        if not is_admissible(tup):
            continue
        drop = rng.randrange(tup.k)
        assert is_admissible(tup.sub_tuple([i for i in range(tup.k) if i != drop]))


def test_larger_primes_never_covered():
    rng = random.Random(3)
    for _ in range(50):
        tup = _random_z_tuple(rng, rng.randint(1, 6))
        if not is_admissible(tup):
            continue
        k = tup.k
        primes = [p for p in range(k + 1, 4 * k + 1) if trial_is_prime(p)]
        for p in rng.sample(primes, min(20, len(primes))):
            assert len(residue_cover(tup, p)) < p
