"""Truncated q-series with exact rational coefficients.

Derivatives are normalized as q d/dq (q^n -> n q^n), which absorbs the 1/(2 pi i)
factors of the Rankin-Cohen bracket, so every object here stays rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .exactnum import gen_binomial
from .hurwitz import HurwitzTable

HALF = Fraction(1, 2)


class QSeries:
    """sum_{n=0}^{N} a_n q^n; coefficients past N are unknown, not zero."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int]):
        self._coeffs = tuple(Fraction(c) for c in coeffs)
        if not self._coeffs:
            raise ValueError("a QSeries needs at least the constant coefficient")

    @classmethod
    def from_dict(cls, terms: Mapping[int, Fraction | int], N: int) -> "QSeries":
        coeffs = [Fraction(0)] * (N + 1)
        for n, c in terms.items():
            if 0 <= n <= N:
                coeffs[n] += Fraction(c)
        return cls(coeffs)

    @classmethod
    def zero(cls, N: int) -> "QSeries":
        return cls([0] * (N + 1))

    @property
    def N(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    def __getitem__(self, n: int) -> Fraction:
        if n < 0:
            return Fraction(0)
        if n > self.N:
            raise IndexError(f"coefficient q^{n} requested beyond truncation N={self.N}")
        return self._coeffs[n]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __repr__(self) -> str:
        shown = ", ".join(f"{n}: {c}" for n, c in self.nonzero()[:6])
        return f"QSeries(N={self.N}, {{{shown}{', ...' if len(self.nonzero()) > 6 else ''}}})"

    def nonzero(self) -> list[tuple[int, Fraction]]:
        return [(n, c) for n, c in enumerate(self._coeffs) if c]

    def truncate(self, N: int) -> "QSeries":
        if N > self.N:
            raise ValueError(f"cannot extend a series truncated at {self.N} to {N}")
        return QSeries(self._coeffs[: N + 1])

    def __add__(self, other: "QSeries") -> "QSeries":
        N = min(self.N, other.N)
        return QSeries(a + b for a, b in zip(self._coeffs[: N + 1], other._coeffs[: N + 1]))

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + other.scale(-1)

    def __neg__(self) -> "QSeries":
        return self.scale(-1)

    def scale(self, c: Fraction | int) -> "QSeries":
        c = Fraction(c)
        return QSeries(c * a for a in self._coeffs)

    def __mul__(self, other: "QSeries | Fraction | int") -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(other)
        N = min(self.N, other.N)
        left = [(n, c) for n, c in self.nonzero() if n <= N]
        right = [(n, c) for n, c in other.nonzero() if n <= N]
        if len(left) > len(right):
            left, right = right, left
        out = [Fraction(0)] * (N + 1)
        for i, a in left:
            for j, b in right:
                if i + j > N:
                    break
                out[i + j] += a * b
        return QSeries(out)

    __rmul__ = __mul__


def theta_series(nu: int, m: int, M: int, N: int) -> QSeries:
    """sum over integers n = m (mod M) of n^nu q^(n^2), n = 0 included."""
    if M < 1:
        raise ValueError("M must be positive")
    coeffs = [Fraction(0)] * (N + 1)
    r = math.isqrt(N)
    for n in range(-r, r + 1):
        if (n - m) % M == 0:
            coeffs[n * n] += n**nu
    return QSeries(coeffs)


def hurwitz_series(table: HurwitzTable, N: int) -> QSeries:
    table.require(N)
    return QSeries(Fraction(int(v), 12) for v in table.values[: N + 1])


def q_derivative(F: QSeries, times: int = 1) -> QSeries:
    return QSeries(c * n**times for n, c in enumerate(F.coeffs))


def rankin_cohen(F: QSeries, k1: Fraction | int, G: QSeries, k2: Fraction | int, k: int) -> QSeries:
    """k-th Rankin-Cohen bracket [F, G]_k for weights k1, k2."""
    k1, k2 = Fraction(k1), Fraction(k2)
    N = min(F.N, G.N)
    out = QSeries.zero(N)
    for j in range(k + 1):
        coef = (-1) ** j * gen_binomial(k1 + k - 1, k - j) * gen_binomial(k2 + k - 1, j)
        if coef:
            out = out + (q_derivative(F, j) * q_derivative(G, k - j)).scale(coef)
    return out


def u_operator(F: QSeries, ell: int) -> QSeries:
    if ell < 1:
        raise ValueError("U_ell needs ell >= 1")
    return QSeries(F.coeffs[ell * n] for n in range(F.N // ell + 1))


def bracket_constants(k: int) -> tuple[list[Fraction], Fraction]:
    """d_{k,j} = (-1)^j C(k+1/2, j) C(k+1/2, k-j) and their alternating sum."""
    w = k + HALF
    d = [(-1) ** j * gen_binomial(w, j) * gen_binomial(w, k - j) for j in range(k + 1)]
    script_c = sum(((-1) ** j * dj for j, dj in enumerate(d)), Fraction(0))
    return d, script_c


def p_poly(a: int, b: Fraction | int, X: Fraction | int, Y: Fraction | int) -> Fraction:
    """P_{a,b}(X, Y) = sum_{j=0}^{a-2} C(j+b-2, j) X^j (X+Y)^(a-j-2)."""
    if a < 2:
        raise ValueError("P_{a,b} needs a >= 2")
    b = Fraction(b)
    total = Fraction(0)
    for j in range(a - 1):
        total += gen_binomial(j + b - 2, j) * (X**j * (X + Y) ** (a - j - 2))
    return total


@dataclass(frozen=True)
class SqrtPiMultiple:
    """coefficient * sqrt(pi)."""

    coefficient: Fraction

    def __float__(self) -> float:
        return float(self.coefficient) * math.sqrt(math.pi)


def gamma_half_integer(x: Fraction | int) -> tuple[Fraction, int]:
    """Gamma(x) for x in (1/2)Z away from the poles, as (c, e) meaning c * sqrt(pi)**e."""
    x = Fraction(x)
    if x.denominator == 1:
        if x <= 0:
            raise ValueError(f"Gamma has a pole at {x}")
        return Fraction(math.factorial(int(x) - 1)), 0
    if x.denominator != 2:
        raise ValueError("only integer and half-integer arguments")
    c, y = Fraction(1), HALF
    while y < x:
        c *= y
        y += 1
    while y > x:
        y -= 1
        c /= y
    return c, 1


def alpha_const(k: int) -> SqrtPiMultiple:
    """Holomorphic-projection constant alpha_{3/2,3/2,k} as a multiple of sqrt(pi)."""
    w = k + HALF
    total = Fraction(0)
    for mu in range(k + 1):
        # Gamma(1/2)/Gamma(1/2 - mu) = prod_{i=1}^{mu} (1/2 - i)
        lower = math.prod((HALF - i for i in range(1, mu + 1)), start=Fraction(1))
        # Gamma(3/2 + 2k - mu) / sqrt(pi) = prod_{i=0}^{2k-mu} (i + 1/2)
        upper = math.prod((i + HALF for i in range(2 * k - mu + 1)), start=Fraction(1))
        total += lower * upper * gen_binomial(w, k - mu) * gen_binomial(w, mu)
    prefactor = 1 / (math.factorial(2 * k + 1) * HALF)
    return SqrtPiMultiple(prefactor * total)


def f_poly(k: int, t: int, s: int) -> Fraction:
    """F_{k,t}(s) = 2^(-2k) (2k+1)/(2k+2) C(2k, k) (t - s)^(2k+2)."""
    const = Fraction(math.comb(2 * k, k) * (2 * k + 1), 4**k * (2 * k + 2))
    return const * (t - s) ** (2 * k + 2)


def osaka_check(k: int, t: int, s: int) -> tuple[Fraction, Fraction]:
    """mu-sum form of F_{k,t}(s) (with n = t^2 - s^2) against the closed form."""
    if not 0 < s < t:
        raise ValueError("need 0 < s < t")
    w = k + HALF
    n = t * t - s * s
    # t^(2k-2mu+1) * t^(2mu-4k-1) = t^(-2k): scale the whole sum by t^(2k)
    scaled = Fraction(0)
    for mu in range(k + 1):
        inner = p_poly(2 * k + 3, HALF - mu, n, s * s) - t ** (4 * k - 2 * mu + 1) * s ** (2 * mu + 1)
        scaled += gen_binomial(w, k - mu) * gen_binomial(w, mu) * inner
    return scaled / t ** (2 * k), f_poly(k, t, s)
