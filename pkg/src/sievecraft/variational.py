"""Exact simplex integrals of symmetric polynomials and lower bounds for M_k.

Functions on the simplex R_k = {t in [0,1]^k : t_1 + ... + t_k <= 1} are
written in the basis (1 - P1)^a * P2^b with P1 = sum t_i and P2 = sum t_i^2.
Every integral needed here has a closed form through the Dirichlet integral

    int_{R_k} (1 - P1)^A prod t_i^{e_i} dt = A! prod e_i! / (k + A + sum e_i)!

so the quadratic forms I_k and sum_m J_k^(m) are assembled exactly over the
rationals; only the final generalized eigenproblem runs in floating point
(mpmath, 50 digits).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import mpmath

Pair = tuple[int, int]

_EIG_DPS = 50


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


def simplex_monomial_integral(k: int, exponents: Sequence[int]) -> Fraction:
    """int_{R_k} prod t_i^{a_i} dt = prod a_i! / (k + sum a_i)!."""
    if len(exponents) != k:
        raise ValueError(f"expected {k} exponents, got {len(exponents)}")
    if any(a < 0 for a in exponents):
        raise ValueError("exponents must be >= 0")
    num = 1
    for a in exponents:
        num *= _fact(a)
    return Fraction(num, _fact(k + sum(exponents)))


def _partitions(n: int, max_parts: int, largest: int | None = None):
    """Partitions of n into at most ``max_parts`` positive parts, non-increasing."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, max_parts - 1, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def basis_integral(k: int, A: int, B: int) -> Fraction:
    """int_{R_k} (1 - P1)^A P2^B dt (for k = 0 the integral is evaluation at the origin)."""
    total = Fraction(0)
    denom = _fact(k + A + 2 * B)
    for part in _partitions(B, k):
        # number of exponent vectors (b_1..b_k) that are rearrangements of this partition
        mult = Counter(part)
        arrangements = _fact(k) // _fact(k - len(part))
        for c in mult.values():
            arrangements //= _fact(c)
        multinom = _fact(B)
        dirichlet = _fact(A)
        for b in part:
            multinom //= _fact(b)
            dirichlet *= _fact(2 * b)
        total += Fraction(arrangements * multinom * dirichlet, denom)
    return total


@dataclass(frozen=True)
class SymmetricPolynomial:
    """F = sum c_(a,b) (1 - P1)^a P2^b on R_k (and 0 off the simplex)."""

    k: int
    coeffs: Mapping[Pair, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (a, b), c in dict(self.coeffs).items():
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent in basis pair {(a, b)}")
            c = Fraction(c)
            if c:
                clean[(int(a), int(b))] = clean.get((int(a), int(b)), Fraction(0)) + c
        object.__setattr__(self, "coeffs", {p: c for p, c in sorted(clean.items()) if c})

    @classmethod
    def constant(cls, k: int, value=1) -> "SymmetricPolynomial":
        return cls(k, {(0, 0): Fraction(value)})

    @classmethod
    def from_basis(cls, k: int, basis: Sequence[Pair], coefficients: Sequence) -> "SymmetricPolynomial":
        return cls(k, {p: Fraction(c) for p, c in zip(basis, coefficients)})

    @property
    def degree(self) -> int:
        return max((a + 2 * b for a, b in self.coeffs), default=0)

    def __mul__(self, other):
        if isinstance(other, SymmetricPolynomial):
            if other.k != self.k:
                raise ValueError("dimension mismatch")
            out: dict[Pair, Fraction] = {}
            for (a, b), c in self.coeffs.items():
                for (a2, b2), c2 in other.coeffs.items():
                    key = (a + a2, b + b2)
                    out[key] = out.get(key, Fraction(0)) + c * c2
            return SymmetricPolynomial(self.k, out)
        c = Fraction(other)
        return SymmetricPolynomial(self.k, {p: c * v for p, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __add__(self, other: "SymmetricPolynomial"):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, Fraction(0)) + c
        return SymmetricPolynomial(self.k, out)

    def __call__(self, *t: float) -> float:
        if len(t) == 1 and isinstance(t[0], (list, tuple)):
            t = tuple(t[0])
        if len(t) != self.k:
            raise ValueError(f"expected {self.k} coordinates")
        p1 = sum(t)
        if p1 > 1 or any(x < 0 for x in t):
            return 0.0
        u = 1.0 - p1
        p2 = sum(x * x for x in t)
        return sum(float(c) * u ** a * p2 ** b for (a, b), c in self.coeffs.items())

    def to_json(self) -> dict:
        return {"k": self.k,
                "terms": [{"a": a, "b": b, "coeff": str(c)} for (a, b), c in self.coeffs.items()]}

    @classmethod
    def from_json(cls, obj: dict) -> "SymmetricPolynomial":
        return cls(obj["k"], {(t["a"], t["b"]): Fraction(t["coeff"]) for t in obj["terms"]})

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b), c in self.coeffs.items():
            factors = []
            if a:
                factors.append("(1-P1)" + (f"^{a}" if a > 1 else ""))
            if b:
                factors.append("P2" + (f"^{b}" if b > 1 else ""))
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)


def inner_integral(F: SymmetricPolynomial) -> SymmetricPolynomial:
    """int_0^{1 - sum_{i != m} t_i} F dt_m, as a symmetric polynomial in k - 1 variables.

    With P1 = s + t, P2 = Q + t^2:
    int_0^{1-s} (1-s-t)^a t^{2j} dt = (1-s)^{a+2j+1} a! (2j)! / (a+2j+1)!.
    """
    out: dict[Pair, Fraction] = {}
    for (a, b), c in F.coeffs.items():
        for j in range(b + 1):
            w = Fraction(math.comb(b, j) * _fact(a) * _fact(2 * j), _fact(a + 2 * j + 1))
            key = (a + 2 * j + 1, b - j)
            out[key] = out.get(key, Fraction(0)) + c * w
    return SymmetricPolynomial(F.k - 1, out)


def integrate(F: SymmetricPolynomial) -> Fraction:
    """int_{R_k} F dt."""
    return sum((c * basis_integral(F.k, a, b) for (a, b), c in F.coeffs.items()), Fraction(0))


def I_k(F: SymmetricPolynomial) -> Fraction:
    """int_{R_k} F^2 dt."""
    return integrate(F * F)


def J_k_m(F: SymmetricPolynomial, m: int) -> Fraction:
    """int over the remaining k-1 coordinates of (int F dt_m)^2.

    The basis is symmetric, so the value does not depend on m.
    """
    if not 1 <= m <= F.k:
        raise ValueError(f"m must be in 1..{F.k}")
    G = inner_integral(F)
    return integrate(G * G)


def sum_J(F: SymmetricPolynomial) -> Fraction:
    return F.k * J_k_m(F, 1)


# -- monomial route -----------------------------------------------------------

Monomials = dict[tuple[int, ...], Fraction]


def _mono_mul(f: Monomials, g: Monomials) -> Monomials:
    out: Monomials = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _mono_pow(f: Monomials, n: int, k: int) -> Monomials:
    out: Monomials = {(0,) * k: Fraction(1)}
    for _ in range(n):
        out = _mono_mul(out, f)
    return out


def to_monomials(F: SymmetricPolynomial) -> Monomials:
    """Expand F into monomials prod t_i^{e_i}."""
    k = F.k
    one_minus_p1: Monomials = {(0,) * k: Fraction(1)}
    p2: Monomials = {}
    for i in range(k):
        e = [0] * k
        e[i] = 1
        one_minus_p1[tuple(e)] = Fraction(-1)
        e[i] = 2
        p2[tuple(e)] = Fraction(1)
    out: Monomials = {}
    for (a, b), c in F.coeffs.items():
        term = _mono_mul(_mono_pow(one_minus_p1, a, k), _mono_pow(p2, b, k))
        for e, v in term.items():
            out[e] = out.get(e, Fraction(0)) + c * v
    return {e: c for e, c in out.items() if c}


def I_k_monomial(F: SymmetricPolynomial) -> Fraction:
    """I_k computed by full monomial expansion of F^2."""
    mono = to_monomials(F)
    sq = _mono_mul(mono, mono)
    return sum((c * simplex_monomial_integral(F.k, e) for e, c in sq.items()), Fraction(0))


def J_k_m_monomial(F: SymmetricPolynomial, m: int) -> Fraction:
    """J_k^(m) by monomial expansion, integrating t_m explicitly over [0, 1 - s]."""
    k = F.k
    if not 1 <= m <= k:
        raise ValueError(f"m must be in 1..{k}")
    idx = m - 1
    rest = k - 1
    one_minus_s: Monomials = {(0,) * rest: Fraction(1)}
    for i in range(rest):
        e = [0] * rest
        e[i] = 1
        one_minus_s[tuple(e)] = Fraction(-1)
    inner: Monomials = {}
    for e, c in to_monomials(F).items():
        n = e[idx]
        others = e[:idx] + e[idx + 1:]
        base: Monomials = {others: c / (n + 1)}
        for e2, c2 in _mono_mul(base, _mono_pow(one_minus_s, n + 1, rest)).items():
            inner[e2] = inner.get(e2, Fraction(0)) + c2
    sq = _mono_mul(inner, inner)
    return sum((c * simplex_monomial_integral(rest, e) for e, c in sq.items()), Fraction(0))


# -- optimisation ------------------------------------------------------------

def basis_pairs(degree_cap: int) -> list[Pair]:
    """(a, b) with a + 2b <= degree_cap, ordered by degree then b."""
    pairs = [(a, b) for b in range(degree_cap // 2 + 1) for a in range(degree_cap - 2 * b + 1)]
    pairs.sort(key=lambda p: (p[0] + 2 * p[1], p[1]))
    return pairs


def gram_matrices(k: int, basis: Sequence[Pair]) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Exact Gram matrices of I_k and sum_m J_k^(m) over ``basis``."""
    n = len(basis)
    inners = [inner_integral(SymmetricPolynomial(k, {p: 1})) for p in basis]
    M1 = [[Fraction(0)] * n for _ in range(n)]
    M2 = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        a, b = basis[i]
        for j in range(i, n):
            a2, b2 = basis[j]
            M1[i][j] = M1[j][i] = basis_integral(k, a + a2, b + b2)
            M2[i][j] = M2[j][i] = k * integrate(inners[i] * inners[j])
    return M1, M2


def independent_subset(M1: list[list[Fraction]]) -> list[int]:
    """Indices of a maximal linearly independent prefix-greedy subset of the
    basis, from exact elimination on the (positive semidefinite) Gram matrix."""
    keep: list[int] = []
    # LDL^T over the kept indices, extended one candidate at a time
    L: list[list[Fraction]] = []
    D: list[Fraction] = []
    for j in range(len(M1)):
        row = []
        for r, i in enumerate(keep):
            s = M1[j][i] - sum(row[c] * L[r][c] * D[c] for c in range(r))
            row.append(s / D[r])
        d = M1[j][j] - sum(row[c] * row[c] * D[c] for c in range(len(keep)))
        if d > 0:
            keep.append(j)
            L.append(row + [Fraction(1)])
            D.append(d)
    return keep


def _jacobi_eigh(A):
    """Cyclic Jacobi eigen-decomposition of a symmetric mpmath matrix.

    Returns (eigenvalues, eigenvector matrix with eigenvectors as columns).
    """
    n = A.rows
    A = A.copy()
    V = mpmath.eye(n)
    tol = mpmath.mpf(10) ** (-(mpmath.mp.dps - 8))
    scale = mpmath.mnorm(A, "f") or mpmath.mpf(1)
    for _ in range(100):
        off = mpmath.sqrt(sum(A[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= tol * scale * mpmath.mpf(10) ** -4:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                t = mpmath.sign(theta) / (abs(theta) + mpmath.sqrt(theta * theta + 1))
                if theta == 0:
                    t = mpmath.mpf(1)
                c = 1 / mpmath.sqrt(t * t + 1)
                s = t * c
                for r in range(n):
                    arp, arq = A[r, p], A[r, q]
                    A[r, p] = c * arp - s * arq
                    A[r, q] = s * arp + c * arq
                for r in range(n):
                    apr, aqr = A[p, r], A[q, r]
                    A[p, r] = c * apr - s * aqr
                    A[q, r] = s * apr + c * aqr
                for r in range(n):
                    vrp, vrq = V[r, p], V[r, q]
                    V[r, p] = c * vrp - s * vrq
                    V[r, q] = s * vrp + c * vrq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return [A[i, i] for i in range(n)], V


def _to_mp(M):
    return mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in M])


def generalized_top_eigen(M1, M2):
    """Largest lambda with M2 c = lambda M1 c (M1 positive definite), via a
    Cholesky reduction to a standard symmetric problem."""
    n = len(M1)
    A1, A2 = _to_mp(M1), _to_mp(M2)
    # equilibrate: Gram entries span many orders of magnitude for large k
    S = [1 / mpmath.sqrt(A1[i, i]) for i in range(n)]
    E1, E2 = A1.copy(), A2.copy()
    for i in range(n):
        for j in range(n):
            E1[i, j] *= S[i] * S[j]
            E2[i, j] *= S[i] * S[j]
    L = mpmath.cholesky(E1)
    A2 = E2
    # X = L^{-1} M2, then B = L^{-1} X^T = L^{-1} M2 L^{-T}
    X = mpmath.matrix(n, n)
    for col in range(n):
        x = _forward(L, A2[:, col])
        for r in range(n):
            X[r, col] = x[r]
    Bm = mpmath.matrix(n, n)
    XT = X.T
    for col in range(n):
        x = _forward(L, XT[:, col])
        for r in range(n):
            Bm[r, col] = x[r]
    Bm = (Bm + Bm.T) / 2
    vals, V = _jacobi_eigh(Bm)
    top = max(range(n), key=lambda i: vals[i])
    z = V[:, top]
    c = [x * S[i] for i, x in enumerate(_backward_transpose(L, z))]
    return vals[top], c, A1, _to_mp(M2)


def _forward(L, b):
    n = L.rows
    x = [mpmath.mpf(0)] * n
    for i in range(n):
        x[i] = (b[i] - sum(L[i, j] * x[j] for j in range(i))) / L[i, i]
    return x


def _backward_transpose(L, b):
    """Solve L^T x = b."""
    n = L.rows
    x = [mpmath.mpf(0)] * n
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - sum(L[j, i] * x[j] for j in range(i + 1, n))) / L[i, i]
    return x


def _quad(M, c) -> Fraction:
    n = len(c)
    return sum((c[i] * M[i][j] * c[j] for i in range(n) for j in range(n)), Fraction(0))


def _round_down(x: Fraction) -> float:
    f = float(x)
    if Fraction(f) > x:
        f = math.nextafter(f, -math.inf)
    return f


@dataclass
class VariationalResult:
    k: int
    degree_cap: int
    mk_bound: float
    basis: list[Pair]
    coefficients: list[Fraction]
    eigenvalue: float
    residual: float
    I: Fraction
    J: list[Fraction]
    pruned: list[Pair]
    r_k: dict[float, int]

    @property
    def F(self) -> SymmetricPolynomial:
        return SymmetricPolynomial.from_basis(self.k, self.basis, self.coefficients)

    @property
    def quotient(self) -> Fraction:
        return sum(self.J, Fraction(0)) / self.I

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "degree_cap": self.degree_cap,
            "mk_bound": self.mk_bound,
            "formula_bound": maynard_formula(self.k) if self.k >= 2 else None,
            "coefficients": [{"a": a, "b": b, "coeff": float(c), "exact": str(c)}
                             for (a, b), c in zip(self.basis, self.coefficients)],
            "residual": self.residual,
            "eigenvalue": self.eigenvalue,
            "I": float(self.I),
            "J": [float(j) for j in self.J],
            "pruned": [list(p) for p in self.pruned],
            "r_k": {str(theta): r for theta, r in self.r_k.items()},
        }


def mk_lower_bound(k: int, degree_cap: int, thetas: Iterable[float] = (0.5, 1.0)) -> VariationalResult:
    """Certified lower bound for M_k from the best F in the capped basis."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if degree_cap < 0:
        raise ValueError("degree_cap must be >= 0")
    full = basis_pairs(degree_cap)
    M1, M2 = gram_matrices(k, full)
    keep = independent_subset(M1)
    basis = [full[i] for i in keep]
    pruned = [full[i] for i in range(len(full)) if i not in set(keep)]
    M1 = [[M1[i][j] for j in keep] for i in keep]
    M2 = [[M2[i][j] for j in keep] for i in keep]
    dps = _EIG_DPS
    while True:
        try:
            with mpmath.workdps(dps):
                return _finish(k, degree_cap, thetas, basis, pruned, M1, M2)
        except ValueError:
            # Cholesky lost definiteness to rounding: retry with more digits
            if dps >= 8 * _EIG_DPS:
                raise
            dps *= 2


def _finish(k, degree_cap, thetas, basis, pruned, M1, M2) -> VariationalResult:
    lam, c, A1, A2 = generalized_top_eigen(M1, M2)
    big = max(abs(x) for x in c)
    c = [x / big for x in c]
    n = len(c)
    r = [sum(A2[i, j] * c[j] for j in range(n)) - lam * sum(A1[i, j] * c[j] for j in range(n))
         for i in range(n)]
    residual = float(mpmath.sqrt(sum(x * x for x in r))
                     / (mpmath.mnorm(A2, "f") * mpmath.sqrt(sum(x * x for x in c))))
    coeffs = [Fraction(mpmath.nstr(x, 40, min_fixed=-mpmath.inf, max_fixed=mpmath.inf))
              if x != 0 else Fraction(0) for x in c]
    I = _quad(M1, coeffs)
    total_J = _quad(M2, coeffs)
    bound = _round_down(total_J / I)
    J = [total_J / k] * k
    return VariationalResult(k, degree_cap, bound, basis, coeffs, float(lam), residual, I, J, pruned,
                             {float(th): r_k(th, bound) for th in thetas})


def r_k(theta, mk_bound) -> int:
    """ceil(theta * M / 2): how many forms the sieve guarantees prime."""
    if mk_bound <= 0:
        raise ValueError("mk_bound must be positive")
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    return math.ceil(Fraction(theta) * Fraction(mk_bound) / 2)


def maynard_formula(k: int) -> float:
    """log k - 2 log log k - 2."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return math.log(k) - 2 * math.log(math.log(k)) - 2


def maynard_bound_check(k: int, computed: float | None = None) -> dict:
    formula = maynard_formula(k)
    out = {"k": k, "formula": formula, "computed": computed}
    out["exceeds"] = None if computed is None else computed > formula
    return out


def parse_symmetric(text: str, k: int) -> SymmetricPolynomial:
    """Read F from text: a polynomial in P1 and P2 (``1``, ``1-P1``,
    ``(1-P1)^2 + P2/3``), or ``degN`` for the optimiser's best F with
    degree cap N."""
    s = text.strip()
    if s.lower().startswith("deg") and s[3:].isdigit():
        return mk_lower_bound(k, int(s[3:]), thetas=()).F
    import sympy

    u, p1, p2 = sympy.symbols("u P1 P2")
    try:
        expr = sympy.sympify(s.replace("^", "**"), locals={"P1": p1, "P2": p2})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ValueError(f"cannot parse F = {text!r}") from exc
    extra = expr.free_symbols - {p1, p2}
    if extra:
        raise ValueError(f"F may only use P1 and P2, found {sorted(map(str, extra))}")
    poly = sympy.Poly(sympy.expand(expr.subs(p1, 1 - u)), u, p2)
    coeffs = {}
    for (a, b), c in poly.terms():
        c = sympy.Rational(c)
        coeffs[(a, b)] = Fraction(int(c.p), int(c.q))
    return SymmetricPolynomial(k, coeffs)
