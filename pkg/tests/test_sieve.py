from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from sievecraft.admissibility import parse_forms
from sievecraft.domains import ZI, ZZ
from sievecraft.errors import InadmissibleError
from sievecraft.sieve import (SieveParams, WeightTable, build_wtrick, g_function, lambda_from_F,
                              lambda_from_y, predicted_main_terms, run_sieve, s1_empirical,
                              s2_empirical, support_tuples, y_from_lambda, ym_from_lambda)
from sievecraft.variational import SymmetricPolynomial

from conftest import trial_is_prime


def params(domain, forms, N, D0, R, F=None, **kw):
    tup = parse_forms(domain, forms)
    F = F or SymmetricPolynomial.constant(tup.k)
    return SieveParams(domain, tup, N, D0, F, R_override=R, **kw)


def M(n):
    return ZZ.modulus(n)


def test_wtrick_examples(f2):
    ctx = build_wtrick(params(ZZ, "x+1, x+5", 100, 5, 10))
    assert (ctx.w_modulus.generator, ctx.v0) == (6, 0)
    # brute force: smallest v in [0, 6) with v+1, v+5 units mod 6
    assert min(v for v in range(6) if math.gcd(v + 1, 6) == math.gcd(v + 5, 6) == 1) == 0
    ctx = build_wtrick(params(ZZ, "x, x+2", 100, 3, 10))
    assert (ctx.w_modulus.generator, ctx.v0) == (2, 1)
    ctx = build_wtrick(params(f2, "f, f+t^2+t", 64, 3, 10))
    assert str(ctx.w_modulus.generator) == "t^2+t" and str(ctx.v0) == "1"


def test_wtrick_unit_condition_and_rejection():
    p = params(ZZ, "x, x+2, x+6, x+8", 1000, 11, 10)
    ctx = build_wtrick(p)
    for a, h in p.tuple.forms:
        assert math.gcd(a * ctx.v0 + h, ctx.w_modulus.generator) == 1
    with pytest.raises(InadmissibleError) as exc:
        build_wtrick(params(ZZ, "x, x+1", 100, 3, 10))
    assert exc.value.prime.generator == 2


def test_d0_raised_to_cover_leading_coefficients():
    p = params(ZZ, "7x+1, 7x+3", 1000, 3, 10)
    assert p.effective_D0 == 8
    assert build_wtrick(p).w_modulus.generator == 2 * 3 * 5 * 7


def test_lambda_example():
    p = params(ZZ, "x+1", 20, 3, 4)
    ctx = build_wtrick(p)
    lam = lambda_from_F(p, ctx)
    assert lam.entries == {(M(1),): 1.5, (M(3),): -1.5}


def test_y_and_ym_examples():
    p = params(ZZ, "x+1", 20, 3, 4)
    lam = lambda_from_F(p, build_wtrick(p))
    y = y_from_lambda(lam)
    assert y.entries == {(M(1),): 1.0, (M(3),): 1.0}
    ym = ym_from_lambda(lam, 1)
    assert ym.entries == {(M(1),): 1.5}
    assert ym.diagnostics[(M(1),)]["approx"] == pytest.approx(1 + 1 / 2)
    assert g_function(ZZ, M(6)) == 0


def test_trivial_tables():
    empty = WeightTable(ZZ, 2, "lambda", {}, True)
    assert y_from_lambda(empty).entries == {}
    assert lambda_from_y(WeightTable(ZZ, 2, "y", {}, True)).entries == {}
    assert ym_from_lambda(empty, 1).entries == {}
    one = (M(1), M(1))
    single = WeightTable(ZZ, 2, "lambda", {one: Fraction(5, 3)}, True)
    assert y_from_lambda(single).entries == {one: Fraction(5, 3)}
    ys = WeightTable(ZZ, 2, "y", {one: Fraction(2, 7)}, True)
    assert lambda_from_y(ys).entries == {one: Fraction(2, 7)}


def _random_table(rng, domain, k, R, w):
    support = support_tuples(domain, k, R, w)
    entries = {key: Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for key in support}
    return WeightTable(domain, k, "lambda", entries, True)


def test_round_trip_exact():
    rng = random.Random(5)
    for _ in range(20):
        k, R = rng.randint(1, 3), rng.randint(2, 30)
        T = _random_table(rng, ZZ, k, R, M(2))
        back = lambda_from_y(y_from_lambda(T))
        assert {kk: v for kk, v in back.entries.items() if v} == T.nonzero()


def test_round_trip_other_domains(f3):
    rng = random.Random(6)
    for domain, w in ((f3, f3.modulus(f3.parse("t"))), (ZI, ZI.modulus(ZI.parse("1+i")))):
        T = _random_table(rng, domain, 2, 30, w)
        back = lambda_from_y(y_from_lambda(T))
        assert {kk: v for kk, v in back.entries.items() if v} == T.nonzero()


def test_support_law():
    for forms, N, D0, R in (("x, x+2", 1000, 7, 40), ("x, x+2, x+6", 1000, 5, 30)):
        p = params(ZZ, forms, N, D0, R)
        ctx = build_wtrick(p)
        lam = lambda_from_F(p, ctx)
        tables = [lam, y_from_lambda(lam)] + [ym_from_lambda(lam, m) for m in range(1, p.k + 1)]
        for T in tables:
            for key, v in T.nonzero().items():
                prod = math.prod(c.generator for c in key)
                assert prod < R
                assert ZZ.mobius(M(prod)) != 0
                assert math.gcd(prod, ctx.w_modulus.generator) == 1
        for T in tables[2:]:
            m = T.m
            assert all(key[m - 1] == M(1) for key in T.entries)


def test_lambda_vanishes_off_support():
    p = params(ZZ, "x, x+2", 1000, 5, 40)
    lam = lambda_from_F(p, build_wtrick(p))
    assert lam.get((M(3), M(1))) == 0  # shares 3 with w = 6
    assert lam.get((M(7), M(7))) == 0  # 49 is not squarefree


def test_y_recovers_F_on_support():
    F = SymmetricPolynomial(2, {(1, 0): 1, (0, 1): Fraction(1, 2)})
    p = params(ZZ, "x, x+2", 1000, 5, 60, F=F)
    lam = lambda_from_F(p, build_wtrick(p))
    y = y_from_lambda(lam)
    logR = math.log(60)
    for key, v in y.entries.items():
        assert v == pytest.approx(F(*(math.log(c.norm) / logR for c in key)), abs=1e-12)


def test_s1_trivial_and_zero():
    p = params(ZZ, "x, x+2", 500, 5, 10)
    ctx = build_wtrick(p)
    one = (M(1), M(1))
    unit = WeightTable(ZZ, 2, "lambda", {one: 1}, True)
    alphas = [a for a in range(501, 1001) if a % 6 == ctx.v0]
    assert s1_empirical(p, ctx, unit) == len(alphas)
    assert s1_empirical(p, ctx, WeightTable(ZZ, 2, "lambda", {}, True)) == 0
    s2, per_m = s2_empirical(p, ctx, unit)
    assert s2 == sum(trial_is_prime(a) + trial_is_prime(a + 2) for a in alphas)


def test_loop_orders_agree_exactly(f2):
    p = params(ZZ, "x+1", 20, 3, 4)
    ctx = build_wtrick(p)
    lam = lambda_from_F(p, ctx)
    exact = WeightTable(ZZ, 1, "lambda", {k: Fraction(v) for k, v in lam.entries.items()}, True)
    assert s1_empirical(p, ctx, exact) == s1_empirical(p, ctx, exact, loop_order="divisor") == Fraction(63, 4)
    rng = random.Random(9)
    for domain, forms, N, D0, R in ((ZZ, "x, x+2", 3000, 5, 60), (ZZ, "x, x+4, 3x+2", 2000, 3, 40),
                                     (f2, "f, f+t^2+t", 2**9, 3, 64)):
        p = params(domain, forms, N, D0, R)
        ctx = build_wtrick(p)
        T = _random_table(rng, domain, p.k, R, ctx.w_modulus)
        assert s1_empirical(p, ctx, T) == s1_empirical(p, ctx, T, loop_order="divisor")


def test_s2_k1_brute_force():
    p = params(ZZ, "x+1", 20, 3, 4)
    ctx = build_wtrick(p)
    lam = lambda_from_F(p, ctx)
    s2, _ = s2_empirical(p, ctx, lam)
    expected = 0.0
    for a in range(21, 41):
        if a % 2 == ctx.v0 and trial_is_prime(a + 1):
            inner = 1.5 - (1.5 if (a + 1) % 3 == 0 else 0)
            expected += inner**2
    assert s2 == pytest.approx(expected)


def test_threads_give_same_sums():
    p = params(ZZ, "x, x+2", 60000, 7, 25)
    ctx = build_wtrick(p)
    rng = random.Random(2)
    T = _random_table(rng, ZZ, 2, 25, ctx.w_modulus)
    from sievecraft.sieve import window_sums
    assert window_sums(p, ctx, T, threads=1) == window_sums(p, ctx, T, threads=2)


def test_c_A_values(f3):
    assert ZZ.c_A == 1
    assert f3.c_A == pytest.approx(1 / math.log(3))
    assert ZI.c_A == pytest.approx(math.pi / 4)


def test_predicted_terms_k1_and_linearity():
    p = params(ZZ, "x+1", 1000, 5, 30)
    ctx = build_wtrick(p)
    s1, _ = predicted_main_terms(p, ctx, primes_in_window=1)
    assert s1 == pytest.approx(ctx.phi_w * 1000 * math.log(30) / ctx.w_norm**2)
    p2 = params(ZZ, "x+1", 2000, 5, 30)
    s1b, _ = predicted_main_terms(p2, ctx, primes_in_window=1)
    assert s1b / s1 == pytest.approx(ZZ.window_size(2000) / ZZ.window_size(1000))


def test_run_sieve_reports():
    F = SymmetricPolynomial(2, {(1, 0): 1})
    rep = run_sieve(params(ZZ, "x, x+2", 10**5, 7, 25, F=F))
    assert 0 < rep.rho < 2
    doc = rep.to_json()
    assert set(doc) >= {"params", "w", "s1", "s2", "rho", "rho_pred", "counts"}
    assert doc["counts"]["window"] == 10**5
    rep1 = run_sieve(params(ZZ, "x+1", 10**4, 5, 20))
    assert 0 < rep1.rho < 1


def test_run_sieve_empty_slice():
    rep = run_sieve(params(ZZ, "x, x+2", 1, 7, 4))
    assert rep.error and rep.rho is None
    assert rep.to_json()["rho"] is None


def test_s2_positive_with_nonnegative_F():
    F = SymmetricPolynomial(2, {(1, 0): 1})
    rep = run_sieve(params(ZZ, "x, x+2", 5000, 5, 20, F=F))
    assert rep.S2_empirical > 0


def test_diagonal_main_term_tracks_empirical():
    """At fixed R the exact finite sums, not the integral asymptotics, describe S1 and S2."""
    F = SymmetricPolynomial(2, {(1, 0): 1})
    rep = run_sieve(params(ZZ, "x, x+2", 10**5, 7, 25, F=F))
    assert rep.S1_empirical / rep.S1_diagonal == pytest.approx(1, abs=0.05)
    assert rep.S2_empirical / sum(rep.S2_diagonal_per_m) == pytest.approx(1, abs=0.15)


def test_other_domains_run(f2):
    rep = run_sieve(params(f2, "f, f+t^2+t", 2**12, 5, 16))
    assert rep.S1_empirical > 0 and rep.ctx.w_norm == 16
    rep = run_sieve(params(ZI, "x, x+(1+i)", 30, 3, 10))
    assert rep.S1_empirical > 0 and rep.to_json()["window_note"]
