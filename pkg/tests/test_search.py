from __future__ import annotations

import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sievecraft.admissibility import generate_admissible, parse_forms
from sievecraft.domains import ZI, ZZ, is_irreducible
from sievecraft.errors import DomainError, InadmissibleError
from sievecraft.search import (InadmissibleScanWarning, bv_probe, congruence_demo, congruence_forms,
                               hits_to_jsonl, modulus_error, scan_constellations, verify_hit, window_alphas)

from conftest import monic, trial_is_prime


def test_triple_scan_matches_brute_force():
    hits = scan_constellations(parse_forms(ZZ, "x, x+2, x+6"), range(1, 101), 3)
    brute = [a for a in range(1, 101) if all(trial_is_prime(a + h) for h in (0, 2, 6))]
    assert [h.alpha for h in hits] == brute == [5, 11, 17, 41]


def test_inadmissible_pair_warns_and_is_empty():
    with pytest.warns(InadmissibleScanWarning):
        hits = scan_constellations(parse_forms(ZZ, "x, x+1"), range(11, 2000), 2)
    assert hits == []


def test_fq_pair_over_cubics(f2):
    tup = parse_forms(f2, "f, f+t^2+t")
    hits = scan_constellations(tup, monic(2, 3), 2)
    assert hits
    for h in hits:
        assert all(is_irreducible(v) for v in tup.values(h.alpha))


def test_hits_reverify_and_thinning():
    tup = parse_forms(ZZ, "x, x+2, x+6, x+8")
    alphas = range(1, 3000)
    by_m = {m: scan_constellations(tup, alphas, m) for m in range(1, 5)}
    for m, hits in by_m.items():
        assert all(verify_hit(tup, h) and h.count >= m for h in hits)
        if m > 1:
            assert {h.alpha for h in hits} <= {h.alpha for h in by_m[m - 1]}


def test_congruence_examples(f3):
    forms = congruence_forms(ZZ, 1, 4, [0, 6, 30])
    assert [(a, h) for a, h in forms.forms] == [(4, 1), (4, 25), (4, 121)]
    hits = congruence_demo(ZZ, 1, 4, [0, 6, 30], 2, range(1, 500))
    assert len(hits) >= 5
    assert all(v % 4 == 1 for h in hits for i, v in enumerate(h.values) if i + 1 in h.prime_indices)
    with pytest.raises(DomainError):
        congruence_demo(ZZ, 2, 4, [0, 6, 30], 2, range(1, 10))
    with pytest.raises(DomainError):
        congruence_forms(ZZ, 1, 2, [0, 2])
    with pytest.raises(InadmissibleError):
        congruence_forms(ZZ, 1, 4, [0, 1])
    t = f3.parse("t")
    shifts = [h for _, h in generate_admissible(f3, 2).forms]
    hits = congruence_demo(f3, 1, t, shifts, 2, f3.window_members(3**4))
    assert hits
    for h in hits:
        assert all(is_irreducible(v) and v.c[0] == 1 for v in h.values)


def test_jsonl_stream():
    hits = scan_constellations(parse_forms(ZZ, "x, x+2"), range(1, 50), 2)
    lines = hits_to_jsonl(ZZ, hits).splitlines()
    assert len(lines) == len(hits)
    assert json.loads(lines[0]) == {"alpha": 3, "count": 2, "prime_indices": [1, 2], "values": [3, 5]}


def test_window_alphas():
    assert window_alphas(ZZ, lo=0, hi=5) == [1, 2, 3, 4, 5]
    assert len(window_alphas(ZI, N=1)) == 8


def _primes(N):
    return [a for a in range(N + 1, 2 * N + 1) if trial_is_prime(a)]


def test_probe_modulus_three_by_direct_count():
    N = 10**4
    P = _primes(N)
    e = modulus_error(ZZ, P, ZZ.modulus(3))
    direct = max(abs(Fraction(sum(1 for p in P if p % 3 == r)) - Fraction(len(P), 2)) for r in (1, 2))
    assert e.max_error == direct
    assert e.relative < 0.05


def test_probe_trivial_modulus():
    e = modulus_error(ZZ, _primes(1000), ZZ.modulus(1))
    assert e.max_error == 0


def test_probe_fq_degree_ten(f2):
    rep = bv_probe(f2, 2**10, 2)
    assert rep.primes == 99
    t_entry = next(e for e in rep.moduli if str(e.modulus.generator) == "t")
    # the only coprime class mod t is constant term 1, which holds every prime of degree 10
    assert t_entry.phi == 1 and t_entry.max_error == 0
    assert t_entry.max_error <= 2 * rep.hayes_bound(t_entry)


def test_probe_fq_hayes_shape(f3):
    rep = bv_probe(f3, 3**7, 27)
    for e in rep.moduli:
        assert float(e.max_error) <= 2 * rep.hayes_bound(e)


@settings(max_examples=20, deadline=None)
@given(st.integers(100, 3000), st.integers(1, 60))
def test_bookkeeping_identity(N, bound):
    rep = bv_probe(ZZ, N, min(bound, N))
    for e in rep.moduli:
        assert e.identity_ok
        assert -e.k0 <= e.identity_sum <= e.k0


def test_probe_outputs():
    rep = bv_probe(ZZ, 2000, 30, B=2)
    doc = rep.to_json()
    assert doc["envelope"] == pytest.approx(2000 / math.log(2000) ** 2)
    assert rep.to_csv().splitlines()[0].startswith("modulus,norm,phi")
    with pytest.raises(ValueError):
        bv_probe(ZZ, 10, 11)
