"""Isomorphism classes of elliptic curves y^2 = x^3 + a x + b over F_q, q = p^r, p > 3.

Field elements are encoded as integers 0 <= x < q whose base-p digits are the
coefficients c0 + c1 X + ... modulo a fixed irreducible polynomial, so constants
of F_p keep their usual integer value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np

from ._parallel import chunk, pmap
from .exactnum import factorize, is_prime, kronecker_symbol
from .hurwitz import HurwitzTable
from .moments import h_moment

EXHAUSTIVE_BUDGET = 400
TWIST_BUDGET_PRIME = 200_000
TWIST_BUDGET_POWER = 10_000
_BATCH_CELLS = 1 << 21


class BudgetExceeded(ValueError):
    pass


# ---------------------------------------------------------------- polynomials over F_p
# Coefficient lists, lowest degree first, no trailing zeros (zero poly = []).


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    inv_lead = pow(f[-1], -1, p)
    while len(a) >= len(f):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(f)
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _ppowmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result, base = [1], _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(f: list[int], p: int) -> bool:
    """Ben-Or test: gcd(x^(p^i) - x, f) = 1 for 1 <= i <= deg f / 2."""
    r = len(f) - 1
    h = [0, 1]
    for _ in range(r // 2):
        h = _ppowmod(h, p, f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) > 1:
            return False
    return True


def _find_irreducible(p: int, r: int) -> list[int]:
    # deterministic: first monic candidate in lexicographic order of the lower coefficients
    for code in range(p**r):
        lower = [(code // p**i) % p for i in range(r)]
        if lower[0] == 0:
            continue
        f = lower + [1]
        if _is_irreducible(f, p):
            return f
    raise RuntimeError(f"no irreducible polynomial of degree {r} over F_{p}")


# ---------------------------------------------------------------- the field


class PrimePowerField:
    """Arithmetic in F_{p^r} on integer-encoded elements, scalar or numpy arrays."""

    def __init__(self, p: int, r: int = 1, budget: int | None = None):
        if p <= 3 or not is_prime(p):
            raise ValueError(f"p must be a prime > 3, got {p}")
        if r < 1:
            raise ValueError("r must be >= 1")
        self.p, self.r, self.q = p, r, p**r
        if budget is None:
            budget = TWIST_BUDGET_PRIME if r == 1 else TWIST_BUDGET_POWER
        if self.q > budget:
            raise BudgetExceeded(f"q = {self.q} exceeds the field budget {budget}")
        self.modulus = (0, 1) if r == 1 else tuple(_find_irreducible(p, r))
        self._pw = p ** np.arange(r, dtype=np.int64)
        xs = np.arange(self.q, dtype=np.int64)
        self._digits = np.stack([(xs // self._pw[i]) % p for i in range(r)], axis=-1)
        self.generator = self._find_generator()
        if r > 1:
            self._build_log_tables()
        chi = np.full(self.q, -1, dtype=np.int8)
        chi[self.mul(xs[1:], xs[1:])] = 1
        chi[0] = 0
        self.chi = chi
        if chi[self.generator] != -1:
            raise AssertionError("generator is a square; field tables inconsistent")

    def __repr__(self) -> str:
        return f"PrimePowerField(p={self.p}, r={self.r})"

    # -- scalar helpers used while bootstrapping
    def _poly(self, x: int) -> list[int]:
        return _trim([(x // self.p**i) % self.p for i in range(self.r)])

    def _elem(self, poly: list[int]) -> int:
        return sum(c * self.p**i for i, c in enumerate(poly))

    def _slow_pow(self, x: int, e: int) -> int:
        if self.r == 1:
            return pow(x, e, self.p)
        return self._elem(_ppowmod(self._poly(x), e, list(self.modulus), self.p))

    def _find_generator(self) -> int:
        primes = list(factorize(self.q - 1))
        for g in range(2, self.q):
            if all(self._slow_pow(g, (self.q - 1) // ell) != 1 for ell in primes):
                return g
        raise RuntimeError("no generator found")

    def _build_log_tables(self) -> None:
        q, p, f = self.q, self.p, list(self.modulus)
        exp = np.zeros(q - 1, dtype=np.int64)
        g = self._poly(self.generator)
        cur = [1]
        for i in range(q - 1):
            exp[i] = self._elem(cur)
            cur = _pmod(_pmul(cur, g, p), f, p)
        if self._elem(cur) != 1 or len(set(exp.tolist())) != q - 1:
            raise AssertionError("generator does not have order q - 1")
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1, dtype=np.int64)
        self._exp, self._log = exp, log

    # -- vectorized arithmetic
    @staticmethod
    def _out(x):
        return int(x) if np.ndim(x) == 0 else x

    def add(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        if self.r == 1:
            return self._out((x + y) % self.p)
        return self._out(((self._digits[x] + self._digits[y]) % self.p) @ self._pw)

    def neg(self, x):
        x = np.asarray(x, dtype=np.int64)
        if self.r == 1:
            return self._out((-x) % self.p)
        return self._out(((-self._digits[x]) % self.p) @ self._pw)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        if self.r == 1:
            return self._out((x * y) % self.p)
        prod = self._exp[(self._log[x] + self._log[y]) % (self.q - 1)]
        return self._out(np.where((x == 0) | (y == 0), 0, prod))

    def power(self, x: int, e: int) -> int:
        if self.r == 1:
            return pow(int(x), e, self.p)
        if x == 0:
            if e <= 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        return int(self._exp[(int(self._log[x]) * e) % (self.q - 1)])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.power(x, -1)

    def const(self, c: int) -> int:
        """Image of the integer c in F_q."""
        return c % self.p

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    @cached_property
    def cubes(self) -> np.ndarray:
        xs = self.elements()
        return self.mul(self.mul(xs, xs), xs)

    def format(self, x: int) -> str:
        return ",".join(str(int(c)) for c in self._digits[x])


def field_build(p: int, r: int = 1, budget: int | None = None) -> PrimePowerField:
    return PrimePowerField(p, r, budget)


# ---------------------------------------------------------------- curves


def discriminant_part(field: PrimePowerField, a, b):
    """4a^3 + 27b^2 (zero exactly for singular curves)."""
    a3 = field.mul(field.mul(a, a), a)
    b2 = field.mul(b, b)
    return field.add(field.mul(field.const(4), a3), field.mul(field.const(27), b2))


def j_invariant(field: PrimePowerField, a: int, b: int) -> int:
    den = discriminant_part(field, a, b)
    if den == 0:
        raise ValueError("singular curve")
    a3 = field.mul(field.mul(a, a), a)
    num = field.mul(field.const(1728 * 4), a3)
    return field.mul(num, field.inv(den))


def _batch_traces(field: PrimePowerField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """t = -sum_x chi(x^3 + a x + b) for each pair, batched to bound memory."""
    A, B = np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)
    xs = field.elements()
    out = np.empty(len(A), dtype=np.int64)
    rows = max(1, _BATCH_CELLS // (field.q * field.r))
    for s in range(0, len(A), rows):
        a, b = A[s : s + rows, None], B[s : s + rows, None]
        vals = field.add(field.add(field.cubes[None, :], field.mul(a, xs[None, :])), b)
        out[s : s + rows] = -field.chi[vals].sum(axis=1, dtype=np.int64)
    return out


def point_trace(field: PrimePowerField, a: int, b: int) -> int:
    """Trace of Frobenius q + 1 - #E(F_q) by a quadratic-character sum."""
    if discriminant_part(field, a, b) == 0:
        raise ValueError(f"singular curve a={a}, b={b}")
    return int(_batch_traces(field, [a], [b])[0])


@dataclass(frozen=True, order=True)
class CurveClass:
    t: int
    j: int
    omega: int
    a: int
    b: int

    @property
    def weight(self) -> Fraction:
        return Fraction(1, self.omega)


@dataclass(frozen=True)
class Census:
    field: PrimePowerField
    classes: tuple[CurveClass, ...]
    mode: str

    def __iter__(self) -> Iterator[CurveClass]:
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def q(self) -> int:
        return self.field.q

    def mass(self) -> Fraction:
        return sum((c.weight for c in self.classes), Fraction(0))

    def signature(self) -> list[tuple[int, int, int]]:
        """Sorted (j, t, omega) multiset; independent of representatives."""
        return sorted((c.j, c.t, c.omega) for c in self.classes)

    def to_json(self) -> dict:
        fmt = self.field.format
        return {
            "p": self.field.p,
            "r": self.field.r,
            "q": self.field.q,
            "mode": self.mode,
            "classes": [
                {"j": fmt(c.j), "a": fmt(c.a), "b": fmt(c.b), "t": c.t, "omega": c.omega}
                for c in self.classes
            ],
        }


def _make_census(field, rows, mode) -> Census:
    return Census(field, tuple(sorted(rows)), mode)


def census_exhaustive(field: PrimePowerField, budget: int = EXHAUSTIVE_BUDGET) -> Census:
    """Orbits of all nonsingular (a, b) under (a, b) -> (u^4 a, u^6 b)."""
    q = field.q
    if q > budget:
        raise BudgetExceeded(f"q = {q} exceeds the exhaustive budget {budget}")
    xs = field.elements()
    units = xs[1:]
    u2 = field.mul(units, units)
    u4 = field.mul(u2, u2)
    u6 = field.mul(u4, u2)
    disc = discriminant_part(field, xs[:, None], xs[None, :])
    seen = disc == 0
    reps = []
    for flat in np.flatnonzero(~seen):
        a, b = divmod(int(flat), q)
        if seen[a, b]:
            continue
        oa, ob = field.mul(u4, a), field.mul(u6, b)
        codes = oa * q + ob
        stab = int(np.count_nonzero((oa == a) & (ob == b)))
        if len(np.unique(codes)) * stab != q - 1:
            raise AssertionError("orbit-stabilizer count failed")
        seen[oa, ob] = True
        rep = int(codes.min())
        reps.append((rep // q, rep % q, stab))
    A = np.array([r[0] for r in reps], dtype=np.int64)
    B = np.array([r[1] for r in reps], dtype=np.int64)
    traces = _batch_traces(field, A, B)
    rows = [
        CurveClass(int(t), j_invariant(field, a, b), stab, a, b)
        for (a, b, stab), t in zip(reps, traces)
    ]
    return _make_census(field, rows, "exhaustive")


def _twist_traces(args) -> np.ndarray:
    field, A, B = args
    return _batch_traces(field, A, B)


def census_twist(field: PrimePowerField, budget: int | None = None, workers: int = 1) -> Census:
    """One class per j-invariant and twist: quadratic twists for generic j,
    sextic/quartic twist families at j = 0 and j = 1728."""
    q, p = field.q, field.p
    if budget is None:
        budget = TWIST_BUDGET_PRIME if field.r == 1 else TWIST_BUDGET_POWER
    if q > budget:
        raise BudgetExceeded(f"q = {q} exceeds the twist budget {budget}")
    j1728 = field.const(1728)
    js = np.array([j for j in range(q) if j not in (0, j1728)], dtype=np.int64)
    c = field.sub(j1728, js)  # 1728 - j
    jc = field.mul(js, c)
    A = field.mul(field.const(3), jc)
    B = field.mul(field.const(2), field.mul(jc, c))
    parts = chunk(np.arange(len(js)), workers)
    traces = np.concatenate(
        pmap(_twist_traces, [(field, A[ix], B[ix]) for ix in parts], workers)
    ) if len(js) else np.zeros(0, dtype=np.int64)
    d = field.generator  # a non-square
    d2 = field.mul(d, d)
    d3 = field.mul(d2, d)
    At, Bt = field.mul(d2, A), field.mul(d3, B)
    rows = []
    for i, j in enumerate(js.tolist()):
        t = int(traces[i])
        rows.append(CurveClass(t, j, 2, int(A[i]), int(B[i])))
        rows.append(CurveClass(-t, j, 2, int(At[i]), int(Bt[i])))
    g = field.generator
    n6, n4 = math.gcd(6, q - 1), math.gcd(4, q - 1)
    b0 = np.array([field.power(g, i) for i in range(n6)], dtype=np.int64)
    for b, t in zip(b0.tolist(), _batch_traces(field, np.zeros(n6, dtype=np.int64), b0).tolist()):
        rows.append(CurveClass(int(t), 0, n6, 0, b))
    a0 = np.array([field.power(g, i) for i in range(n4)], dtype=np.int64)
    for a, t in zip(a0.tolist(), _batch_traces(field, a0, np.zeros(n4, dtype=np.int64)).tolist()):
        rows.append(CurveClass(int(t), j1728, n4, a, 0))
    return _make_census(field, rows, "twist")


def build_census(field: PrimePowerField, mode: str = "twist", workers: int = 1) -> Census:
    if mode == "twist":
        return census_twist(field, workers=workers)
    if mode == "exhaustive":
        return census_exhaustive(field)
    raise ValueError(f"unknown census mode {mode!r}")


# ---------------------------------------------------------------- moments of the census


def s_moment(census: Census, nu: int, m: int, M: int) -> Fraction:
    """sum over classes with t = m (mod M) of t^nu / omega."""
    if M < 1:
        raise ValueError("M must be positive")
    return sum(
        (Fraction(c.t**nu, c.omega) for c in census.classes if (c.t - m) % M == 0),
        Fraction(0),
    )


def _signed_count(m: int, M: int, square: int, nu: int) -> int:
    """sum of sgn(t)^nu over t = m (mod M) with t^2 = square."""
    root = math.isqrt(square)
    if root * root != square or root == 0:
        return 0
    return sum((1 if t > 0 else -1) ** nu for t in (root, -root) if (t - m) % M == 0)


def error_term(nu: int, m: int, M: int, p: int, r: int, table: HurwitzTable) -> Fraction:
    """Supersingular correction E_{nu,m,M}(p^r) to the class-number side."""
    q = p**r
    e = Fraction(0)
    if m % M == 0 and nu == 0:
        if r % 2:
            e += table.h(4 * p)
        else:
            e += Fraction(1, 2) * (1 - kronecker_symbol(-1, p))
    rho = _signed_count(m, M, q, nu)
    sigma = _signed_count(m, M, 4 * q, nu)
    if rho or sigma:
        # rho, sigma vanish unless r is even, so p^(nu r / 2) is an integer here
        scale = p ** (nu * r // 2)
        e += Fraction(1, 3) * (1 - kronecker_symbol(-3, p)) * scale * rho
        e += Fraction(p - 1, 3) * Fraction(2) ** (nu - 2) * scale * sigma
    return e


def deuring_check(
    p: int,
    r: int,
    nu: int,
    m: int,
    M: int,
    table: HurwitzTable,
    census: Census | None = None,
) -> tuple[Fraction, Fraction, Fraction]:
    """(2 S_{nu,m,M}(q), H-sum over t coprime to p, E); expected 2S = H + E."""
    q = p**r
    table.require(4 * q)
    if census is None:
        census = census_for(p, r)
    elif census.q != q:
        raise ValueError("census is over a different field")
    two_s = 2 * s_moment(census, nu, m, M)
    h_flat = h_moment(nu, m, M, q, table, coprime_to=p)
    return two_s, h_flat, error_term(nu, m, M, p, r, table)


def census_for(p: int, r: int, cross_check: bool = True, workers: int = 1) -> Census:
    """Twist census, verified against the exhaustive one when q is small enough."""
    field = PrimePowerField(p, r)
    census = census_twist(field, workers=workers)
    if cross_check and field.q <= EXHAUSTIVE_BUDGET:
        if census.signature() != census_exhaustive(field).signature():
            raise AssertionError(f"twist and exhaustive censuses disagree at q = {field.q}")
    return census
