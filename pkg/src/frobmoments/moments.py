"""Hurwitz class-number moments restricted to a residue class of t.

    H_{nu,m,M}(n) = sum_{t = m (mod M)} H(4n - t^2) t^nu

plus the coefficients of [H, theta_{1,m,M}]_k and the recursion that recovers the
odd moments from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._parallel import chunk, pmap
from .exactnum import divisors, isqrt_exact
from .hurwitz import HurwitzTable
from .qseries import bracket_constants, hurwitz_series, rankin_cohen, theta_series

THREE_HALVES = Fraction(3, 2)


def _residue_ts(m: int, M: int, t_max: int, coprime_to: int | None = None) -> list[int]:
    if M < 1:
        raise ValueError("M must be positive")
    start = -t_max + (m + t_max) % M
    ts = range(start, t_max + 1, M)
    if coprime_to is None:
        return list(ts)
    return [t for t in ts if t % coprime_to]


def h_moment(
    nu: int,
    m: int,
    M: int,
    n: int,
    table: HurwitzTable,
    coprime_to: int | None = None,
) -> Fraction:
    """H_{nu,m,M}(n); with ``coprime_to=p`` the terms with p | t are dropped."""
    if n < 0:
        raise ValueError("n must be >= 0")
    table.require(4 * n)
    total = 0
    for t in _residue_ts(m, M, math.isqrt(4 * n), coprime_to):
        total += table.twelve_h(4 * n - t * t) * t**nu
    return Fraction(total, 12)


def _sweep_part(args) -> np.ndarray:
    values, nu, ts, n_lo, n_hi, dtype = args
    out = np.zeros(n_hi - n_lo + 1, dtype=dtype)
    for t in ts:
        n_min = max(n_lo, -(-t * t // 4))
        if n_min > n_hi:
            continue
        seg = values[4 * n_min - t * t : 4 * n_hi - t * t + 1 : 4]
        if dtype is object:
            seg = seg.astype(object)
        out[n_min - n_lo :] += seg * (t**nu)
    return out


def h_moment_sweep(
    nu: int,
    m: int,
    M: int,
    n_lo: int,
    n_hi: int,
    table: HurwitzTable,
    workers: int = 1,
) -> np.ndarray:
    """12 * H_{nu,m,M}(n) for every n_lo <= n <= n_hi (exact integers).

    Uses int64 when a crude magnitude bound allows it, Python ints otherwise.
    """
    if not 0 <= n_lo <= n_hi:
        raise ValueError("need 0 <= n_lo <= n_hi")
    table.require(4 * n_hi)
    ts = _residue_ts(m, M, math.isqrt(4 * n_hi))
    peak = int(np.abs(table.values[: 4 * n_hi + 1]).max())
    bound = peak * sum(abs(t) ** nu for t in ts)
    dtype = np.int64 if bound < 2**62 else object
    parts = pmap(
        _sweep_part,
        [(table.values, nu, list(c), n_lo, n_hi, dtype) for c in chunk(ts, workers)],
        workers,
    )
    total = parts[0].copy()
    for part in parts[1:]:
        total += part
    return total


@dataclass(frozen=True)
class MomentReport:
    nu: int
    m: int
    M: int
    n: int
    value: Fraction
    base: Fraction  # H_{m,M}(n), same coprimality convention as value
    coprime_to: int | None = None

    @property
    def normalized(self) -> float | None:
        """value / n^(nu/2) / H_{m,M}(n), or None when the base vanishes."""
        if self.base == 0 or self.n == 0:
            return None
        return float(self.value / self.base) / self.n ** (self.nu / 2)


def moment_report(nu, m, M, n, table, coprime_to=None) -> MomentReport:
    return MomentReport(
        nu, m, M, n,
        h_moment(nu, m, M, n, table, coprime_to),
        h_moment(0, m, M, n, table, coprime_to),
        coprime_to,
    )


@dataclass(frozen=True)
class BracketCoefficient:
    k: int
    m: int
    M: int
    n: int
    value: Fraction


def bracket_coeff(k: int, m: int, M: int, n: int, table: HurwitzTable) -> Fraction:
    """q^n coefficient of [H, theta_{1,m,M}]_k by direct summation over t."""
    table.require(n)
    d, _ = bracket_constants(k)
    den = math.lcm(*(x.denominator for x in d))
    d_int = [int(x * den) for x in d]
    total = 0
    if n >= 0:
        for t in _residue_ts(m, M, math.isqrt(n)):
            u = n - t * t
            h12 = table.twelve_h(u)
            if h12:
                tt = t * t
                total += h12 * t * sum(dj * u**j * tt ** (k - j) for j, dj in enumerate(d_int))
    return Fraction(total, 12 * den)


def bracket_series(k: int, m: int, M: int, N: int, table: HurwitzTable) -> list[BracketCoefficient]:
    """All coefficients up to q^N of [H, theta_{1,m,M}]_k via the q-series ring."""
    series = rankin_cohen(hurwitz_series(table, N), THREE_HALVES, theta_series(1, m, M, N), THREE_HALVES, k)
    return [BracketCoefficient(k, m, M, n, series[n]) for n in range(N + 1)]


def hgtilde_check(k: int, m: int, M: int, n: int, table: HurwitzTable) -> tuple[Fraction, Fraction]:
    """H_{2k+1,m,M}(n) directly, and rebuilt from c_{k,m,M}(4n) and lower odd moments."""
    d, script_c = bracket_constants(k)
    if script_c == 0:
        raise ZeroDivisionError(f"alternating sum of bracket constants vanishes at k={k}")
    lhs = h_moment(2 * k + 1, m, M, n, table)
    correction = Fraction(0)
    for j in range(1, k + 1):
        for ell in range(1, j + 1):
            correction += (
                d[j] * (-1) ** (j + ell) * math.comb(j, ell) * (4 * n) ** ell
                * h_moment(2 * k - 2 * ell + 1, m, M, n, table)
            )
    rhs = (bracket_coeff(k, m, M, 4 * n, table) - correction) / script_c
    return lhs, rhs


def main_term(k: int, m: int, M: int, n: int, signed: bool = False) -> Fraction:
    """Divisor-sum main term of c_{k,m,M}(n); a d = sqrt(n) divisor counts 1/2.

    Divisors d <= sqrt(n) qualify when d + n/d = +-2m (mod 2M). By default both
    classes count +1. With ``signed=True`` the -2m class counts -1 (and a d in
    both classes cancels), matching the q^(t^2) coefficient
    t([t = m] - [t = -m]) of theta_{1,m,M}; that form is what tracks c_{k,m,M}.
    """
    if n < 1:
        raise ValueError("n must be positive")
    root = isqrt_exact(n)
    total = Fraction(0)
    for d in divisors(n):
        if d * d > n:
            break
        s = d + n // d
        plus = (s - 2 * m) % (2 * M) == 0
        minus = (s + 2 * m) % (2 * M) == 0
        if signed:
            sign = int(plus) - int(minus)
        else:
            sign = int(plus or minus)
        if sign:
            weight = Fraction(1, 2) if d == root else 1
            total += sign * weight * d ** (2 * k + 2)
    const = Fraction((2 * k + 1) * math.comb(2 * k, k), 2 ** (2 * k + 1) * (2 * k + 2))
    return -const * total


def envelope_slope(ns, magnitudes) -> float:
    """Least-squares slope of log(running max |value|) against log n."""
    ns = np.asarray(ns, dtype=float)
    mags = np.abs(np.asarray(magnitudes, dtype=float))
    env = np.maximum.accumulate(mags)
    keep = env > 0
    if np.count_nonzero(mags) < 10:
        raise ValueError("fewer than 10 points with a nonzero residual; slope undefined")
    slope, _ = np.polyfit(np.log(ns[keep]), np.log(env[keep]), 1)
    return float(slope)


def residual_exponent(
    k: int,
    m: int,
    M: int,
    n_range: tuple[int, int] | tuple[int, int, int],
    table: HurwitzTable,
    kind: str = "moment",
    workers: int = 1,
) -> float:
    """Growth exponent of |H_{2k+1,m,M}(n)| (``kind="moment"``) or of
    |c_{k,m,M}(4n) - main term| (``kind="bracket"``) over the range."""
    lo, hi, *rest = n_range
    step = rest[0] if rest else 1
    ns = list(range(lo, hi + 1, step))
    if kind == "moment":
        sweep = h_moment_sweep(2 * k + 1, m, M, lo, hi, table, workers)[::step]
        mags = [abs(int(v)) / 12 for v in sweep]
    elif kind == "bracket":
        mags = [
            abs(bracket_coeff(k, m, M, 4 * n, table) - main_term(k, m, M, 4 * n, signed=True))
            for n in ns
        ]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return envelope_slope(ns, mags)


def even_ratio(k: int, m: int, M: int, n: int, table: HurwitzTable) -> float:
    """H_{2k,m,M}(n) / (n^k H_{m,M}(n)); tends to the k-th Catalan number."""
    base = h_moment(0, m, M, n, table)
    if base == 0:
        raise ZeroDivisionError(f"H_{{{m},{M}}}({n}) = 0")
    return float(h_moment(2 * k, m, M, n, table) / (base * n**k))
