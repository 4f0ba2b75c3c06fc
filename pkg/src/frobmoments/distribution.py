"""Sato-Tate measure and weighted distributions of normalized traces t / (2 sqrt(q))."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._parallel import chunk, pmap
from .census import Census, error_term
from .exactnum import catalan, primes_up_to
from .hurwitz import HurwitzTable
from .moments import h_moment


def st_density(x: float) -> float:
    if x < -1 or x > 1:
        return 0.0
    return 2 / math.pi * math.sqrt(1 - x * x)


def st_cdf(x: float) -> float:
    if x <= -1:
        return 0.0
    if x >= 1:
        return 1.0
    return 0.5 + (x * math.sqrt(1 - x * x) + math.asin(x)) / math.pi


def st_moment(nu: int) -> Fraction:
    """nu-th Sato-Tate moment: C_{nu/2} / 2^nu for even nu, 0 for odd."""
    if nu < 0:
        raise ValueError("nu must be >= 0")
    if nu % 2:
        return Fraction(0)
    return Fraction(catalan(nu // 2), 2**nu)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Weighted normalized traces of one residue class; x = t / (2 sqrt(q))."""

    q: int
    points: tuple[tuple[int, Fraction], ...]  # (t, 1/omega), sorted by t

    @classmethod
    def from_census(cls, census: Census, m: int = 0, M: int = 1) -> "EmpiricalDistribution":
        pts = sorted((c.t, c.weight) for c in census.classes if (c.t - m) % M == 0)
        return cls(census.q, tuple(pts))

    @property
    def total_mass(self) -> Fraction:
        return sum((w for _, w in self.points), Fraction(0))

    def x(self, t: int) -> float:
        return t / (2 * math.sqrt(self.q))


def _q_power_half(q: int, nu: int) -> tuple[int, bool]:
    """q^(nu/2) as (integer, exact) when possible, else (q^((nu-1)/2), False)."""
    if nu % 2 == 0:
        return q ** (nu // 2), True
    root = math.isqrt(q)
    if root * root == q:
        return root**nu, True
    return q ** ((nu - 1) // 2), False


def empirical_moment(census: Census, nu: int, m: int = 0, M: int = 1) -> float:
    """Weighted nu-th moment of x over the classes with t = m (mod M)."""
    dist = EmpiricalDistribution.from_census(census, m, M)
    mass = dist.total_mass
    if mass == 0:
        raise ValueError(f"no classes with t = {m} (mod {M})")
    s_nu = sum((w * t**nu for t, w in dist.points), Fraction(0))
    scale, exact = _q_power_half(census.q, nu)
    ratio = s_nu / (mass * 2**nu * scale)
    return float(ratio) if exact else float(ratio) / math.sqrt(census.q)


def ks_discrepancy(census: Census, m: int = 0, M: int = 1) -> float:
    """sup_x |weighted empirical CDF - Sato-Tate CDF| over the sample points."""
    dist = EmpiricalDistribution.from_census(census, m, M)
    mass = dist.total_mass
    if mass == 0:
        raise ValueError(f"no classes with t = {m} (mod {M})")
    # x is monotone in t for fixed q, so sorting by t is exact
    grouped: dict[int, Fraction] = {}
    for t, w in dist.points:
        grouped[t] = grouped.get(t, Fraction(0)) + w
    below, worst = Fraction(0), 0.0
    for t in sorted(grouped):
        above = below + grouped[t]
        ref = st_cdf(dist.x(t))
        worst = max(worst, abs(float(below / mass) - ref), abs(float(above / mass) - ref))
        below = above
    return worst


def weighted_unweighted_gap(census: Census, nu: int, m: int = 0, M: int = 1) -> Fraction | float:
    """|S_{nu,m,M} - 2^(nu-1) q^(nu/2) sum x^nu| / q^(nu/2).

    Only classes with omega != 2 contribute. Exact unless nu is odd and q is not
    a square, in which case a float is returned.
    """
    excess = sum(
        (Fraction(c.t**nu) * (c.weight - Fraction(1, 2))
         for c in census.classes if c.omega != 2 and (c.t - m) % M == 0),
        Fraction(0),
    )
    scale, exact = _q_power_half(census.q, nu)
    gap = abs(excess) / scale
    return gap if exact else float(gap) / math.sqrt(census.q)


def progression_mass(p: int, m: int, M: int, table: HurwitzTable) -> Fraction:
    """S_{m,M}(p) from the class-number side: (H-sum over p not dividing t + E) / 2."""
    return (h_moment(0, m, M, p, table, coprime_to=p) + error_term(0, m, M, p, 1, table)) / 2


@dataclass(frozen=True)
class RatioScan:
    M: int
    j: int
    m: int
    rows: tuple[tuple[int, Fraction], ...]
    split: int
    mean_low: float
    mean_high: float

    @property
    def batch_gap(self) -> float:
        return abs(self.mean_high - self.mean_low)


def _ratio_rows(args) -> list[tuple[int, Fraction]]:
    primes, m, M, table = args
    return [
        (p, progression_mass(p, m, M, table) / progression_mass(p, 0, 1, table))
        for p in primes
    ]


def ratio_scan(
    M: int,
    j: int,
    m: int,
    p_range: tuple[int, int],
    table: HurwitzTable,
    split: int | None = None,
    workers: int = 1,
) -> RatioScan:
    """S_{m,M}(p) / S_{1,1}(p) over primes p = j (mod 4M^2) in p_range.

    Batches are [lo, split) and [split, hi]; split defaults to sqrt(lo * hi).
    """
    if math.gcd(j, 2 * M) != 1:
        raise ValueError(f"gcd({j}, {2 * M}) != 1")
    lo, hi = p_range
    table.require(4 * hi)
    mod = 4 * M * M
    primes = [p for p in primes_up_to(hi) if p >= max(lo, 5) and (p - j) % mod == 0]
    if not primes:
        raise ValueError("no primes in the requested range and class")
    if split is None:
        split = math.isqrt(lo * hi)
    parts = pmap(_ratio_rows, [(c, m, M, table) for c in chunk(primes, workers)], workers)
    rows = tuple(row for part in parts for row in part)
    low = [float(r) for p, r in rows if p < split]
    high = [float(r) for p, r in rows if p >= split]
    if not low or not high:
        raise ValueError("a batch is empty; widen the range or move the split")
    return RatioScan(M, j, m, rows, split, sum(low) / len(low), sum(high) / len(high))
