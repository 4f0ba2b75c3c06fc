"""Hurwitz class numbers H(n).

Values are kept as the integers 12*H(n): every reduced-form weight (1, 1/2, 1/3)
and H(0) = -1/12 has denominator dividing 12.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._parallel import chunk, pmap
from .exactnum import divisor_sum, divisors

MAGIC = b"HURWITZ1"
_INT64_MAX = 2**63 - 1


def reduced_forms(n: int) -> list[tuple[int, int, int]]:
    """Reduced positive-definite forms [a, b, c] of discriminant -n (n > 0)."""
    forms = []
    if n <= 0 or n % 4 in (1, 2):
        return forms
    for a in range(1, math.isqrt(n // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b - n) % 2:
                continue
            num = n + b * b
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            forms.append((a, b, c))
    return forms


def _form_weight(a: int, b: int, c: int) -> Fraction:
    if b == 0 and a == c:
        return Fraction(1, 2)
    if b == a == c:
        return Fraction(1, 3)
    return Fraction(1)


def hurwitz_single(n: int) -> Fraction:
    """H(n) by direct enumeration of reduced forms."""
    if n == 0:
        return Fraction(-1, 12)
    if n < 0 or n % 4 in (1, 2):
        return Fraction(0)
    return sum((_form_weight(*f) for f in reduced_forms(n)), Fraction(0))


@dataclass(frozen=True, eq=False)
class HurwitzTable:
    """12*H(n) for 0 <= n <= n_max, as a read-only int64 array."""

    n_max: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.n_max + 1,):
            raise ValueError("values length does not match n_max")
        self.values.setflags(write=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HurwitzTable):
            return NotImplemented
        return self.n_max == other.n_max and np.array_equal(self.values, other.values)

    def twelve_h(self, n: int) -> int:
        if n < 0:
            return 0
        if n > self.n_max:
            raise IndexError(f"H({n}) requested from a table with n_max={self.n_max}")
        return int(self.values[n])

    def h(self, n: int) -> Fraction:
        return Fraction(self.twelve_h(n), 12)

    def require(self, n: int) -> None:
        if n > self.n_max:
            raise ValueError(f"Hurwitz table too small: need n_max >= {n}, have {self.n_max}")

    def truncated(self, n_max: int) -> "HurwitzTable":
        self.require(n_max)
        return HurwitzTable(n_max, self.values[: n_max + 1].copy())

    def to_bytes(self) -> bytes:
        head = MAGIC + struct.pack("<Q", self.n_max)
        return head + self.values.astype("<i8").tobytes()

    def checksum(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()


def _sieve_slice(args: tuple[int, list[int]]) -> np.ndarray:
    n_max, a_values = args
    acc = np.zeros(n_max + 1, dtype=np.int64)
    for a in a_values:
        step = 4 * a
        for b in range(0, a + 1):
            # c == a: b >= 0 on this boundary
            n = 4 * a * a - b * b
            if n <= n_max:
                acc[n] += 6 if b == 0 else 4 if b == a else 12
            # c > a: both signs of b unless |b| == a or b == 0
            mult = 12 if b in (0, a) else 24
            start = 4 * a * (a + 1) - b * b
            if start <= n_max:
                acc[start::step] += mult
    return acc


def build_table(n_max: int, workers: int = 1) -> HurwitzTable:
    """Sieve 12*H(n) for all n <= n_max over reduced forms [a, b, c]."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    # 12*H(n) <= 12 * #{reduced forms} <= 24*n; refuse anything that could wrap
    if 24 * max(n_max, 1) > _INT64_MAX:
        bits = (24 * n_max).bit_length() + 1
        raise OverflowError(f"12*H(n) for n <= {n_max} may need {bits}-bit entries")
    a_max = math.isqrt(n_max // 3)
    a_values = list(range(1, a_max + 1))
    values = np.zeros(n_max + 1, dtype=np.int64)
    if a_values:
        # interleave so each worker gets a similar mix of small and large a
        parts = [a_values[i::workers] for i in range(workers)] if workers > 1 else [a_values]
        parts = [p for p in parts if p]
        for acc in pmap(_sieve_slice, [(n_max, p) for p in parts], workers):
            values += acc
    values[0] = -1
    return HurwitzTable(n_max, values)


def save_table(table: HurwitzTable, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(table.to_bytes())
    tmp.replace(path)


def load_table(path: str | Path) -> HurwitzTable:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != MAGIC:
        raise ValueError(f"{path}: not a HURWITZ1 cache file")
    (n_max,) = struct.unpack("<Q", data[8:16])
    if len(data) != 16 + 8 * (n_max + 1):
        raise ValueError(f"{path}: length {len(data)} does not match n_max={n_max}")
    values = np.frombuffer(data, dtype="<i8", offset=16).astype(np.int64)
    return HurwitzTable(int(n_max), values)


def cached_table(n_max: int, cache_dir: str | Path | None, workers: int = 1) -> HurwitzTable:
    """Load the smallest cached table covering n_max, or build and store one."""
    if cache_dir is None:
        return build_table(n_max, workers)
    cache_dir = Path(cache_dir)
    best = None
    if cache_dir.is_dir():
        for f in cache_dir.glob("hurwitz_*.bin"):
            try:
                size = int(f.stem.split("_", 1)[1])
            except ValueError:
                continue
            if size >= n_max and (best is None or size < best[0]):
                best = (size, f)
    if best is not None:
        table = load_table(best[1])
        return table if table.n_max == n_max else table.truncated(n_max)
    table = build_table(n_max, workers)
    save_table(table, cache_dir / f"hurwitz_{n_max}.bin")
    return table


def kronecker_hurwitz_check(n: int, table: HurwitzTable) -> tuple[Fraction, Fraction]:
    """Both sides of sum_t H(4n - t^2) = 2 sigma_1(n) - sum_{d | n} min(d, n/d)."""
    if n < 1:
        raise ValueError("n must be positive")
    table.require(4 * n)
    t_max = math.isqrt(4 * n)
    lhs12 = table.twelve_h(4 * n) + 2 * sum(table.twelve_h(4 * n - t * t) for t in range(1, t_max + 1))
    rhs = 2 * divisor_sum(n, 1) - sum(min(d, n // d) for d in divisors(n))
    return Fraction(lhs12, 12), Fraction(rhs)
