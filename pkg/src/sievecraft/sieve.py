"""Sieve weights, the W-trick, and direct evaluation of the sums S1 and S2."""

from __future__ import annotations

import math
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Any

from .admissibility import LinearFormTuple, check_admissible
from .domains import Domain, Modulus, squarefree_divisors
from .errors import InadmissibleError, SievecraftError
from .variational import I_k, SymmetricPolynomial, sum_J

Key = tuple[Modulus, ...]

V0_SCAN_LIMIT = 10**6


@dataclass
class SieveParams:
    domain: Domain
    tuple: LinearFormTuple
    N: int
    D0: int
    F: SymmetricPolynomial
    theta: float = 0.5
    delta: float = 0.05
    R_override: int | None = None

    def __post_init__(self):
        if self.tuple.domain != self.domain:
            raise ValueError("tuple lives in a different domain")
        if self.F.k != self.tuple.k:
            raise ValueError(f"F has dimension {self.F.k}, tuple has {self.tuple.k} forms")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")
        if not 0 < self.delta < self.theta / 2:
            raise ValueError("delta must lie in (0, theta/2)")
        if self.D0 < 2:
            raise ValueError("D0 must be >= 2")
        if self.R < 2:
            raise ValueError(f"R = {self.R} is below 2")

    @property
    def k(self) -> int:
        return self.tuple.k

    @property
    def window_size(self) -> int:
        return self.domain.window_size(self.N)

    @property
    def R(self) -> int:
        if self.R_override is not None:
            return self.R_override
        return math.floor(self.window_size ** (self.theta / 2 - self.delta))

    @property
    def effective_D0(self) -> int:
        """D0 raised until every prime dividing some a_i lies below it."""
        d0 = self.D0
        for a, _ in self.tuple.forms:
            if self.domain.is_unit(a):
                continue
            for p, _ in self.domain.factorize(a):
                d0 = max(d0, p.norm + 1)
        return d0

    @property
    def nominal_D0(self) -> float | None:
        """log log log N, the asymptotic choice (None when undefined)."""
        try:
            return math.log(math.log(math.log(self.window_size)))
        except ValueError:
            return None

    def to_json(self) -> dict:
        d = self.domain
        return {
            "domain": d.describe(),
            "tuple": self.tuple.to_json()["forms"],
            "N": self.N,
            "D0": self.D0,
            "D0_effective": self.effective_D0,
            "D0_nominal": self.nominal_D0,
            "theta": self.theta,
            "delta": self.delta,
            "R": self.R,
            "F": self.F.to_json()["terms"],
        }


@dataclass(frozen=True)
class WTrickContext:
    w_modulus: Modulus
    v0: Any
    D0: int
    phi_w: int

    @property
    def w_norm(self) -> int:
        return self.w_modulus.norm


def build_wtrick(params: SieveParams) -> WTrickContext:
    """Product of the primes of norm < D0 and the smallest residue v0 with
    every a_i v0 + h_i a unit modulo it."""
    d, tup = params.domain, params.tuple
    cert = check_admissible(tup)
    if not cert.admissible:
        raise InadmissibleError(cert.refuting_prime, cert)
    D0 = params.effective_D0
    primes = list(d.primes_up_to_norm(D0))
    w = d.unit_modulus()
    for p in primes:
        w = d.mod_mul(w, p)

    def good(v) -> bool:
        return all(d.coprime(a * v + h, w.generator) for a, h in tup.forms)

    if w.norm <= V0_SCAN_LIMIT:
        v0 = next((v for v in d.residues(w.generator) if good(v)), None)
        if v0 is None:
            raise InadmissibleError(w)
    else:
        congruences = []
        for p in primes:
            v = next((r for r in d.residues(p.generator)
                      if all(not d.divides(p.generator, a * r + h) for a, h in tup.forms)), None)
            if v is None:
                raise InadmissibleError(p)
            congruences.append((v, p))
        v0, _ = d.crt(congruences)
    return WTrickContext(w, v0, D0, d.euler_phi(w) if w.norm > 1 else 1)


# -- weight tables -------------------------------------------------------------

@lru_cache(maxsize=None)
def _prime_factors(domain: Domain, m: Modulus) -> tuple[Modulus, ...]:
    return tuple(p for p, _ in domain.factorize(m))


@lru_cache(maxsize=None)
def _divisors(domain: Domain, m: Modulus) -> tuple[Modulus, ...]:
    return tuple(dv for dv, _ in squarefree_divisors(domain, _prime_factors(domain, m)))


def _sub_tuples(domain: Domain, key: Key):
    return product(*(_divisors(domain, c) for c in key))


@lru_cache(maxsize=None)
def _mu(domain: Domain, m: Modulus) -> int:
    return domain.mobius(m)


@lru_cache(maxsize=None)
def _phi(domain: Domain, m: Modulus) -> int:
    return domain.euler_phi(m)


@lru_cache(maxsize=None)
def g_function(domain: Domain, m: Modulus) -> int:
    """Totally multiplicative g with g(p) = |p| - 2."""
    out = 1
    for p, e in domain.factorize(m):
        out *= (p.norm - 2) ** e
    return out


@dataclass
class WeightTable:
    domain: Domain
    k: int
    layer: str
    entries: dict[Key, Any]
    exact: bool
    m: int | None = None
    diagnostics: dict | None = field(default=None, repr=False)

    def nonzero(self) -> dict[Key, Any]:
        return {key: v for key, v in self.entries.items() if v}

    def get(self, key: Key):
        return self.entries.get(key, 0)

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.entries.values()), default=0.0)

    def to_json(self) -> dict:
        d = self.domain
        return {
            "layer": self.layer,
            "m": self.m,
            "k": self.k,
            "exact": self.exact,
            "entries": [{"key": [d.to_json(c.generator) for c in key],
                         "value": str(v) if self.exact else float(v)}
                        for key, v in sorted(self.entries.items(), key=lambda kv: _key_order(d, kv[0]))],
        }


def _key_order(domain: Domain, key: Key):
    return tuple((c.norm, domain.sort_key(c.generator)) for c in key)


def support_tuples(domain: Domain, k: int, R: int, w: Modulus) -> list[Key]:
    """Tuples (d_1..d_k) with prod d_i squarefree, norm < R, coprime to w."""
    out = []
    for _, primes in domain.squarefree_moduli(R, exclude=w):
        for assignment in product(range(k), repeat=len(primes)):
            comps = [domain.unit_modulus()] * k
            for p, i in zip(primes, assignment):
                comps[i] = domain.mod_mul(comps[i], p)
            out.append(tuple(comps))
    out.sort(key=lambda key: _key_order(domain, key))
    return out


def _divides_key(d: Key, r: Key, domain: Domain) -> bool:
    return all(domain.divides(di.generator, ri.generator) for di, ri in zip(d, r))


def lambda_from_F(params: SieveParams, ctx: WTrickContext) -> WeightTable:
    """lambda_d = prod(mu(d_i)|d_i|) * sum_{r : d_i | r_i} mu(prod r)^2 / prod phi(r_i)
    * F(log|r_1|/log R, ..., log|r_k|/log R) on the support, 0 elsewhere."""
    d, k, F = params.domain, params.k, params.F
    R = params.R
    support = support_tuples(d, k, R, ctx.w_modulus)
    log_r = math.log(R)
    weight = {}
    for r in support:
        f = F(*(math.log(c.norm) / log_r for c in r))
        weight[r] = f / math.prod(_phi(d, c) for c in r)
    entries = {}
    for dk in support:
        total = sum(v for r, v in weight.items() if _divides_key(dk, r, d))
        sign_norm = math.prod(_mu(d, c) * c.norm for c in dk)
        entries[dk] = sign_norm * total
    return WeightTable(d, k, "lambda", entries, exact=False)


def _require(table: WeightTable, layer: str):
    if table.layer != layer:
        raise ValueError(f"expected a {layer} table, got {table.layer}")


def _zero(exact: bool):
    return Fraction(0) if exact else 0.0


def _div(x, n: int, exact: bool):
    return Fraction(x) / n if exact else x / n


def y_from_lambda(table: WeightTable) -> WeightTable:
    """y_r = prod(mu(r_i) phi(r_i)) * sum_{d : r_i | d_i} lambda_d / prod|d_i|."""
    _require(table, "lambda")
    d, exact = table.domain, table.exact
    acc: dict[Key, Any] = defaultdict(lambda: _zero(exact))
    for key, lam in table.entries.items():
        if not lam:
            continue
        v = _div(lam, math.prod(c.norm for c in key), exact)
        for r in _sub_tuples(d, key):
            acc[r] += v
    entries = {r: math.prod(_mu(d, c) * _phi(d, c) for c in r) * v for r, v in acc.items()}
    return WeightTable(d, table.k, "y", entries, exact)


def lambda_from_y(table: WeightTable) -> WeightTable:
    """Inverse change of variables:
    lambda_d = prod(mu(d_i)|d_i|) * sum_{r : d_i | r_i} y_r / prod phi(r_i)."""
    _require(table, "y")
    d, exact = table.domain, table.exact
    acc: dict[Key, Any] = defaultdict(lambda: _zero(exact))
    for key, y in table.entries.items():
        if not y:
            continue
        v = _div(y, math.prod(_phi(d, c) for c in key), exact)
        for dk in _sub_tuples(d, key):
            acc[dk] += v
    entries = {dk: math.prod(_mu(d, c) * c.norm for c in dk) * v for dk, v in acc.items()}
    return WeightTable(d, table.k, "lambda", entries, exact)


def ym_from_lambda(table: WeightTable, m: int) -> WeightTable:
    """y^(m)_r = prod(mu(r_i) g(r_i)) * sum_{d : r_i | d_i, d_m = 1} lambda_d / prod phi(d_i)
    on tuples with trivial m-th component.

    ``diagnostics`` holds, per entry, the approximation
    sum_t y_{r_1..t..r_k} / phi(t) and its difference from y^(m).
    """
    _require(table, "lambda")
    if not 1 <= m <= table.k:
        raise ValueError(f"m must be in 1..{table.k}")
    d, exact, idx = table.domain, table.exact, m - 1
    one = d.unit_modulus()
    acc: dict[Key, Any] = defaultdict(lambda: _zero(exact))
    for key, lam in table.entries.items():
        if not lam or key[idx] != one:
            continue
        v = _div(lam, math.prod(_phi(d, c) for c in key), exact)
        for r in _sub_tuples(d, key):
            acc[r] += v
    entries = {r: math.prod(_mu(d, c) * g_function(d, c) for c in r) * v for r, v in acc.items()}

    y = y_from_lambda(table)
    approx: dict[Key, Any] = defaultdict(lambda: _zero(exact))
    for key, val in y.entries.items():
        r = key[:idx] + (one,) + key[idx + 1:]
        approx[r] += _div(val, _phi(d, key[idx]), exact)
    keys = set(entries) | set(approx)
    diagnostics = {r: {"y_m": entries.get(r, _zero(exact)), "approx": approx.get(r, _zero(exact)),
                       "difference": entries.get(r, _zero(exact)) - approx.get(r, _zero(exact))}
                   for r in keys}
    return WeightTable(d, table.k, "y_m", entries, exact, m=m, diagnostics=diagnostics)


# -- window sums -----------------------------------------------------------------

def sieve_slice(params: SieveParams, ctx: WTrickContext) -> list:
    """alpha in A(N) with alpha = v0 (mod w)."""
    return list(params.domain.window_members(params.N, ctx.w_modulus.generator, ctx.v0))


def _inner_sums(domain: Domain, tup: LinearFormTuple, entries, alphas, with_primes: bool):
    """For each alpha: (sum of lambda_d over d_i | L_i(alpha), prime flags)."""
    s1 = None
    per_m = [None] * tup.k
    for alpha in alphas:
        vals = tup.values(alpha)
        inner = 0
        for key, lam in entries:
            for i, c in key:
                if not domain.divides(c, vals[i]):
                    break
            else:
                inner += lam
        sq = inner * inner
        s1 = sq if s1 is None else s1 + sq
        if with_primes:
            for i, v in enumerate(vals):
                if domain.is_prime(v):
                    per_m[i] = sq if per_m[i] is None else per_m[i] + sq
    return s1, per_m


def _chunk_job(args):
    return _inner_sums(*args)


def window_sums(params: SieveParams, ctx: WTrickContext, table: WeightTable,
                with_primes: bool = True, threads: int | None = None):
    """(S1, [S2^(1), ..., S2^(k)], slice size) by direct alpha-major summation."""
    _require(table, "lambda")
    d, tup = params.domain, params.tuple
    one = d.unit_modulus()
    entries = [(tuple((i, c.generator) for i, c in enumerate(key) if c != one), lam)
               for key, lam in table.entries.items() if lam]
    alphas = sieve_slice(params, ctx)
    zero = _zero(table.exact)
    threads = resolve_threads(threads)
    if threads > 1 and len(alphas) > 1000:
        size = -(-len(alphas) // threads)
        chunks = [alphas[i:i + size] for i in range(0, len(alphas), size)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_chunk_job, [(d, tup, entries, ch, with_primes) for ch in chunks]))
    else:
        parts = [_inner_sums(d, tup, entries, alphas, with_primes)]
    s1 = zero
    per_m = [zero] * tup.k
    for p_s1, p_m in parts:
        if p_s1 is not None:
            s1 += p_s1
        for i, v in enumerate(p_m):
            if v is not None:
                per_m[i] += v
    return s1, per_m, len(alphas)


def s1_empirical(params: SieveParams, ctx: WTrickContext, table: WeightTable,
                 loop_order: str = "alpha", threads: int | None = None):
    """S1 = sum over the slice of (sum_{d_i | L_i(alpha)} lambda_d)^2.

    ``loop_order="divisor"`` exchanges the summations and counts each
    residue class of alpha directly.
    """
    if loop_order == "alpha":
        return window_sums(params, ctx, table, with_primes=False, threads=threads)[0]
    if loop_order != "divisor":
        raise ValueError(f"unknown loop order {loop_order!r}")
    _require(table, "lambda")
    d, tup = params.domain, params.tuple
    items = [(key, lam) for key, lam in table.entries.items() if lam]
    alphas = None
    total = _zero(table.exact)
    for key1, lam1 in items:
        for key2, lam2 in items:
            cls = _joint_class(d, tup, ctx, key1, key2)
            if cls is None:
                continue
            residue, modulus = cls
            if hasattr(d, "count_in_class"):
                n = d.count_in_class(params.N, modulus.generator, residue)
            else:
                if alphas is None:
                    alphas = sieve_slice(params, ctx)
                n = sum(1 for a in alphas if d.reduce(a, modulus.generator) == residue)
            total += lam1 * lam2 * n
    return total


def _joint_class(d: Domain, tup: LinearFormTuple, ctx: WTrickContext, key1: Key, key2: Key):
    """The residue class of alpha (mod w * prod [d_i, e_i]) on which every
    [d_i, e_i] divides L_i(alpha) and alpha = v0 (mod w), or None if empty."""
    need: dict[Modulus, Any] = {}
    for i, (c1, c2) in enumerate(zip(key1, key2)):
        primes = set(_prime_factors(d, c1)) | set(_prime_factors(d, c2))
        a, h = tup.forms[i]
        for p in primes:
            r = d.reduce(-h * d.modinv(a, p.generator), p.generator)
            if need.setdefault(p, r) != r:
                return None
    congruences = [(ctx.v0, ctx.w_modulus)] + [(r, p) for p, r in need.items()]
    return d.crt(congruences)


def s2_empirical(params: SieveParams, ctx: WTrickContext, table: WeightTable, threads: int | None = None):
    """(S2, [S2^(m)]) where S2^(m) weights alpha by [L_m(alpha) is prime]."""
    _, per_m, _ = window_sums(params, ctx, table, threads=threads)
    return sum(per_m, _zero(table.exact)), per_m


def count_window_primes(domain: Domain, N: int) -> int:
    """|P(N)|: primes among the members of A(N)."""
    return sum(1 for a in domain.window_members(N) if domain.is_prime(a))


def predicted_main_terms(params: SieveParams, ctx: WTrickContext, F: SymmetricPolynomial | None = None,
                         primes_in_window: int | None = None) -> tuple[float, float]:
    """Main terms phi(w)^k |A(N)| (c_A log R)^k I_k(F) / |w|^(k+1) for S1 and
    phi(w)^k |P(N)| (c_A log R)^(k+1) sum_m J_k^(m)(F) / |w|^(k+1) for S2."""
    F = params.F if F is None else F
    d, k = params.domain, params.k
    if primes_in_window is None:
        primes_in_window = count_window_primes(d, params.N)
    cl = d.c_A * math.log(params.R)
    base = ctx.phi_w ** k / ctx.w_norm ** (k + 1)
    s1 = base * params.window_size * cl ** k * float(I_k(F))
    s2 = base * primes_in_window * cl ** (k + 1) * float(sum_J(F))
    return s1, s2


def diagonal_main_terms(params: SieveParams, ctx: WTrickContext, table: WeightTable,
                        primes_in_window: int) -> tuple[float, list[float]]:
    """The finite-R main terms obtained by diagonalising the quadratic forms:
    |A(N)|/|w| sum y_r^2 / prod phi(r_i) and, per m,
    |P(N)|/phi(w) sum (y^(m)_r)^2 / prod g(r_i)."""
    d = params.domain
    y = y_from_lambda(table)
    s1 = params.window_size / ctx.w_norm * sum(
        float(v) ** 2 / math.prod(_phi(d, c) for c in key) for key, v in y.entries.items())
    per_m = []
    for m in range(1, params.k + 1):
        ym = ym_from_lambda(table, m)
        total = 0.0
        for key, v in ym.entries.items():
            g = math.prod(g_function(d, c) for c in key)
            if g:
                total += float(v) ** 2 / g
        per_m.append(primes_in_window / ctx.phi_w * total)
    return s1, per_m


@dataclass
class SieveReport:
    params: SieveParams
    ctx: WTrickContext | None
    S1_empirical: float = 0.0
    S2_empirical: float = 0.0
    S2_per_m: list[float] = field(default_factory=list)
    S1_predicted: float = 0.0
    S2_predicted: float = 0.0
    S1_diagonal: float | None = None
    S2_diagonal_per_m: list[float] = field(default_factory=list)
    c_A: float = 0.0
    slice_size: int = 0
    primes_in_window: int = 0
    I: Fraction | None = None
    sum_J: Fraction | None = None
    error: str | None = None

    @property
    def rho(self) -> float | None:
        return self.S2_empirical / self.S1_empirical if self.S1_empirical else None

    @property
    def rho_pred(self) -> float | None:
        if self.I is None or not self.I:
            return None
        p = self.params
        return (self.c_A * math.log(p.R) * self.primes_in_window / p.window_size
                * float(self.sum_J) / float(self.I))

    @staticmethod
    def _ratio(a, b):
        return a / b if b else None

    def to_json(self) -> dict:
        d = self.params.domain
        out = {
            "params": self.params.to_json(),
            "w": None if self.ctx is None else {
                "modulus": d.to_json(self.ctx.w_modulus.generator),
                "norm": self.ctx.w_norm,
                "phi": self.ctx.phi_w,
                "v0": d.to_json(self.ctx.v0),
            },
            "s1": {
                "empirical": float(self.S1_empirical),
                "predicted": self.S1_predicted,
                "ratio": self._ratio(float(self.S1_empirical), self.S1_predicted),
                "diagonal": self.S1_diagonal,
            },
            "s2": {
                "empirical": float(self.S2_empirical),
                "predicted": self.S2_predicted,
                "ratio": self._ratio(float(self.S2_empirical), self.S2_predicted),
                "per_m": [float(v) for v in self.S2_per_m],
                "diagonal_per_m": self.S2_diagonal_per_m,
            },
            "rho": self.rho,
            "rho_pred": self.rho_pred,
            "c_A": self.c_A,
            "I": None if self.I is None else float(self.I),
            "sum_J": None if self.sum_J is None else float(self.sum_J),
            "counts": {"window": self.params.window_size, "slice": self.slice_size,
                       "primes": self.primes_in_window},
            "window_note": ("A(N) counts every lattice point of the annulus, associates included"
                            if d.tag == "zi" else None),
        }
        if self.error:
            out["error"] = self.error
        return out


class EmptySliceError(SievecraftError):
    pass


def run_sieve(params: SieveParams, threads: int | None = None) -> SieveReport:
    """Full empirical-versus-predicted comparison for one window."""
    ctx = build_wtrick(params)
    d = params.domain
    report = SieveReport(params, ctx, c_A=d.c_A)
    table = lambda_from_F(params, ctx)
    s1, per_m, n_slice = window_sums(params, ctx, table, threads=threads)
    report.slice_size = n_slice
    if n_slice == 0:
        report.error = "empty slice: no alpha in A(N) is congruent to v0 modulo w"
        return report
    report.primes_in_window = count_window_primes(d, params.N)
    report.S1_empirical = s1
    report.S2_per_m = per_m
    report.S2_empirical = sum(per_m)
    report.S1_predicted, report.S2_predicted = predicted_main_terms(
        params, ctx, primes_in_window=report.primes_in_window)
    report.I = I_k(params.F)
    report.sum_J = sum_J(params.F)
    report.S1_diagonal, report.S2_diagonal_per_m = diagonal_main_terms(
        params, ctx, table, report.primes_in_window)
    return report


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("SIEVECRAFT_THREADS", "1") or 1)
    return max(1, threads)
