from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frobmoments.moments import (
    bracket_coeff, bracket_series, envelope_slope, even_ratio, h_moment, h_moment_sweep,
    hgtilde_check, main_term, moment_report, residual_exponent,
)
from frobmoments.qseries import osaka_check


def test_h_moment_examples(small_table):
    assert h_moment(0, 0, 1, 1, small_table) == 1
    assert h_moment(1, 1, 3, 1, small_table) == Fraction(1, 2)
    assert all(h_moment(1, 0, 1, n, small_table) == 0 for n in range(1, 60))
    assert h_moment(0, 0, 1, 25, small_table, coprime_to=5) == 48


def test_h_moment_table_too_small(small_table):
    with pytest.raises(ValueError, match="too small"):
        h_moment(0, 0, 1, 2001, small_table)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(1, 6), st.integers(1, 500))
def test_partition(small_table, nu, M, n):
    parts = sum(h_moment(nu, m, M, n, small_table) for m in range(M))
    assert parts == h_moment(nu, 0, 1, n, small_table)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.integers(-10, 10), st.integers(1, 7), st.integers(1, 500))
def test_reflection(small_table, nu, m, M, n):
    assert h_moment(nu, m, M, n, small_table) == (-1) ** nu * h_moment(nu, -m, M, n, small_table)


@pytest.mark.parametrize("m, M", [(0, 1), (1, 2), (2, 4), (3, 6), (0, 5)])
def test_odd_vanishing(small_table, m, M):
    for k in range(3):
        assert all(h_moment(2 * k + 1, m, M, n, small_table) == 0 for n in range(1, 200))


def test_sweep_matches_pointwise(small_table):
    sweep = h_moment_sweep(3, 1, 4, 10, 400, small_table)
    assert [Fraction(int(v), 12) for v in sweep] == [h_moment(3, 1, 4, n, small_table) for n in range(10, 401)]
    assert np.array_equal(sweep, h_moment_sweep(3, 1, 4, 10, 400, small_table, workers=3))


def test_sweep_big_values_use_python_ints(small_table):
    sweep = h_moment_sweep(15, 1, 3, 1900, 2000, small_table)
    assert sweep.dtype == object
    assert Fraction(sweep[-1], 12) == h_moment(15, 1, 3, 2000, small_table)


def test_moment_report(small_table):
    rep = moment_report(1, 1, 3, 1, small_table)
    assert rep.value == Fraction(1, 2) and rep.base == Fraction(1, 4)
    assert rep.normalized == 2.0


def test_bracket_coeff_examples(small_table):
    assert bracket_coeff(0, 1, 3, 4, small_table) == Fraction(1, 2)
    series = bracket_series(2, 1, 4, 300, small_table)
    assert all(c.value == bracket_coeff(2, 1, 4, c.n, small_table) for c in series)


def test_hgtilde_examples(small_table):
    assert hgtilde_check(0, 1, 3, 1, small_table) == (Fraction(1, 2), Fraction(1, 2))
    for n in range(1, 301):
        lhs, rhs = hgtilde_check(1, 1, 3, n, small_table)
        assert lhs == rhs
    for k, m, M in [(0, 0, 1), (2, 1, 2), (3, 2, 4)]:
        assert hgtilde_check(k, m, M, 37, small_table) == (0, 0)


def test_main_term_examples():
    assert main_term(0, 1, 3, 4) == Fraction(-1, 2)
    assert main_term(0, 1, 3, 7) == Fraction(-1, 4)
    assert main_term(0, 0, 5, 3) == 0  # 1 + 3 = 4 is not 0 mod 10
    with pytest.raises(ValueError):
        main_term(0, 1, 3, 0)


def test_signed_main_term_tracks_bracket_k0(small_table):
    # at k = 0 the q^{4n} bracket coefficient equals the signed divisor sum exactly
    for n in range(1, 400):
        assert bracket_coeff(0, 1, 3, 4 * n, small_table) == main_term(0, 1, 3, 4 * n, signed=True)


def test_residual_exponent_rejects_zero(small_table):
    with pytest.raises(ValueError, match="slope undefined"):
        residual_exponent(0, 0, 1, (10, 200), small_table)
    with pytest.raises(ValueError):
        envelope_slope(range(1, 50), [0] * 49)


def test_envelope_slope_power_law():
    ns = np.arange(100, 2000)
    assert envelope_slope(ns, 3.0 * ns**1.5) == pytest.approx(1.5)


def test_even_ratio(small_table):
    for m, M, n in [(0, 1, 17), (1, 3, 500), (2, 5, 301)]:
        assert even_ratio(0, m, M, n, small_table) == 1.0
    assert abs(even_ratio(1, 0, 1, 1999, small_table) - 1) < 0.1


def _aggregate(k, m, M, n):
    left = right = Fraction(0)
    for s in range(1, n):
        t2 = n + s * s
        t = int(t2**0.5 + 0.5)
        if t * t != t2 or t <= s or ((t - m) % M and (t + m) % M):
            continue
        lhs, rhs = osaka_check(k, t, s)
        left += lhs
        right += rhs
    return left / 2, right / 2


@pytest.mark.parametrize("k", [0, 1, 3])
def test_aggregated_osaka(k):
    for n in (15, 45, 105, 240, 315):
        a, b = _aggregate(k, 1, 3, n)
        assert a == b
