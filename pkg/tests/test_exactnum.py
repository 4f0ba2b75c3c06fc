from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from frobmoments.exactnum import (
    catalan, divisor_sum, divisors, factorize, gen_binomial, is_prime, isqrt_exact,
    kronecker_symbol, primes_up_to,
)

rationals = st.fractions(max_denominator=10**6)


@pytest.mark.parametrize("a, p, expected", [(-1, 5, 1), (-3, 5, -1), (2, 7, 1), (0, 7, 0), (3, 7, -1)])
def test_kronecker_examples(a, p, expected):
    assert kronecker_symbol(a, p) == expected


@pytest.mark.parametrize("p", [2, 1, 0, -3, 9, 15])
def test_kronecker_rejects(p):
    with pytest.raises(ValueError):
        kronecker_symbol(1, p)


@given(st.integers(-10**6, 10**6), st.sampled_from([3, 5, 7, 11, 101, 10007]))
def test_kronecker_periodic(a, p):
    assert kronecker_symbol(a, p) == kronecker_symbol(a % p, p)


def test_kronecker_counts_half_squares():
    p = 101
    assert sum(kronecker_symbol(a, p) for a in range(p)) == 0


@pytest.mark.parametrize("k, c", [(0, 1), (3, 5), (5, 42)])
def test_catalan(k, c):
    assert catalan(k) == c


def test_catalan_recurrence():
    for k in range(21):
        assert catalan(k + 1) * (k + 2) == catalan(k) * 2 * (2 * k + 1)


@pytest.mark.parametrize("n, r, s", [(6, 1, 12), (1, 1, 1), (25, 1, 31), (12, 0, 6), (4, 2, 21)])
def test_divisor_sum(n, r, s):
    assert divisor_sum(n, r) == s


def test_divisors_sorted():
    assert divisors(36) == [1, 2, 3, 4, 6, 9, 12, 18, 36]


def test_primes():
    ps = primes_up_to(100)
    assert list(ps) == [p for p in range(101) if is_prime(p)]
    assert len(primes_up_to(10**6)) == 78498
    assert list(primes_up_to(1)) == []


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(10007) == {10007: 1}


def test_gen_binomial():
    assert gen_binomial(Fraction(3, 2), 1) == Fraction(3, 2)
    assert gen_binomial(Fraction(-1, 2), 2) == Fraction(3, 8)
    assert gen_binomial(5, 2) == 10
    assert gen_binomial(2, 3) == 0
    assert gen_binomial(Fraction(1, 3), 0) == 1


def test_isqrt_exact():
    assert isqrt_exact(49) == 7
    assert isqrt_exact(50) is None


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
