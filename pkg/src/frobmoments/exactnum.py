"""Exact integer/rational helpers: primes, divisors, Legendre symbols, Catalan numbers.

Rationals are :class:`fractions.Fraction` throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

Rational = Fraction

__all__ = [
    "Rational",
    "PrimeList",
    "primes_up_to",
    "is_prime",
    "factorize",
    "kronecker_symbol",
    "catalan",
    "divisors",
    "divisor_sum",
    "gen_binomial",
    "isqrt_exact",
]


def primes_up_to(bound: int) -> list[int]:
    """Sieve of Eratosthenes; all primes ``<= bound``."""
    if bound < 2:
        return []
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


@dataclass(frozen=True)
class PrimeList:
    bound: int
    primes: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "primes", tuple(primes_up_to(self.bound)))

    def __iter__(self):
        return iter(self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def in_range(self, lo: int, hi: int) -> list[int]:
        """Primes with ``lo <= p <= hi`` (``hi`` must not exceed the bound)."""
        if hi > self.bound:
            raise ValueError(f"range end {hi} exceeds sieve bound {self.bound}")
        return [p for p in self.primes if lo <= p <= hi]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization, ``{prime: exponent}``."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def kronecker_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, via Euler's criterion."""
    if p <= 2 or not is_prime(p):
        raise ValueError(f"kronecker_symbol needs an odd prime, got {p}")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def catalan(k: int) -> int:
    if k < 0:
        raise ValueError("catalan needs k >= 0")
    return math.comb(2 * k, k) // (k + 1)


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError("divisors needs n >= 1")
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def divisor_sum(n: int, r: int) -> int:
    """sigma_r(n) = sum of d**r over the divisors d of n."""
    return sum(d**r for d in divisors(n))


def gen_binomial(alpha: Fraction | int, j: int) -> Fraction:
    """Generalized binomial alpha(alpha-1)...(alpha-j+1)/j!, exact."""
    return _gen_binomial(Fraction(alpha), j)


@lru_cache(maxsize=4096)
def _gen_binomial(alpha: Fraction, j: int) -> Fraction:
    if j < 0:
        return Fraction(0)
    num = Fraction(1)
    for i in range(j):
        num *= alpha - i
    return num / math.factorial(j)


def isqrt_exact(n: int) -> int | None:
    """Integer square root if n is a perfect square, else None."""
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None
