import cmath
import math
import random
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixedmoments.arith import (gl3_coeff, gl3_first_row, kloosterman, rs_coeffs, satake,
                                sym2_coeffs, sym2_lambda_stream, triple_coeffs)
from mixedmoments.errors import DataExhaustedError, DeligneViolationError
from mixedmoments.modforms import hecke_eigenforms
from mixedmoments.numtheory import (divisors, factorize, is_prime, mobius, multiplicative_array,
                                    num_divisors, primes_upto, spf_sieve)


def kloosterman_naive(m, n, c):
    total = 0j
    for d in range(c):
        if math.gcd(d, c) == 1:
            dbar = pow(d, -1, c) if c > 1 else 0
            total += cmath.exp(2j * math.pi * (m * d + n * dbar) / c)
    return total


@dataclass
class Fixed:
    values: dict

    def lam(self, n):
        return self.values[n]


# -- numtheory ---------------------------------------------------------------

def test_primes():
    assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_upto(10000)) == 1229


def test_spf():
    spf = spf_sieve(100)
    for n in range(2, 101):
        assert spf[n] == factorize(n)[0][0]


@settings(max_examples=200)
@given(st.integers(1, 10**6))
def test_factorize_roundtrip(n):
    fac = factorize(n)
    assert math.prod(p**e for p, e in fac) == n
    assert all(is_prime(p) for p, _ in fac)
    assert num_divisors(n) == len(divisors(n))


def test_mobius_sum():
    for n in range(1, 200):
        assert sum(mobius(d) for d in divisors(n)) == (n == 1)


def test_multiplicative_array_divisor_function():
    arr = multiplicative_array(lambda p, e: e + 1, 500)
    assert arr[0] == 0
    assert [int(arr[n]) for n in range(1, 501)] == [num_divisors(n) for n in range(1, 501)]


# -- Kloosterman -------------------------------------------------------------

@pytest.mark.parametrize("m,n,c,expected", [(1, 1, 1, 1.0), (1, 1, 3, -1.0), (0, 0, 7, 6.0), (1, 0, 12, 0.0)])
def test_kloosterman_examples(m, n, c, expected):
    assert kloosterman(m, n, c) == pytest.approx(expected, abs=1e-12)


def test_kloosterman_modulus():
    with pytest.raises(ValueError):
        kloosterman(1, 1, 0)


def test_kloosterman_against_naive():
    rng = random.Random(1)
    for _ in range(60):
        m, n, c = rng.randint(-30, 30), rng.randint(-30, 30), rng.randint(1, 150)
        naive = kloosterman_naive(m, n, c)
        assert abs(naive.imag) < 1e-9
        assert kloosterman(m, n, c) == pytest.approx(naive.real, abs=1e-9)


def test_kloosterman_symmetry():
    rng = random.Random(7)
    for _ in range(100):
        m, n, c = rng.randint(1, 100), rng.randint(1, 100), rng.randint(1, 400)
        assert kloosterman(m, n, c) == pytest.approx(kloosterman(n, m, c), abs=1e-10)


def test_weil_bound():
    for c in range(1, 501):
        dc = num_divisors(c)
        for m in range(1, 21):
            for n in range(m, 21):
                bound = dc * math.sqrt(c) * math.sqrt(math.gcd(math.gcd(m, n), c))
                assert abs(kloosterman(m, n, c)) <= bound + 1e-9


def test_twisted_multiplicativity():
    checked = 0
    for c1 in range(2, 50):
        for c2 in range(2, 200 // c1 + 1):
            if math.gcd(c1, c2) != 1:
                continue
            for m, n in ((1, 1), (2, 5), (7, 3)):
                inv1, inv2 = pow(c1, -1, c2), pow(c2, -1, c1)
                rhs = kloosterman(m * inv2 * inv2, n, c1) * kloosterman(m * inv1 * inv1, n, c2)
                assert kloosterman(m, n, c1 * c2) == pytest.approx(rhs, abs=1e-8)
                checked += 1
    assert checked > 100


# -- GL(3) coefficients ------------------------------------------------------

def brute_gl3(f, m, n):
    def row(x):
        return sum(f.lam((x // (a * a)) ** 2) for a in range(1, x + 1) if x % (a * a) == 0)

    total = 0.0
    for d in range(1, math.gcd(m, n) + 1):
        if m % d == 0 and n % d == 0:
            total += mobius(d) * row(m // d) * row(n // d)
    return total


def test_gl3_examples(delta):
    assert gl3_coeff(delta, 1, 1) == 1
    assert gl3_coeff(delta, 4, 1) == pytest.approx(delta.lam(16) + 1, abs=1e-14)
    assert gl3_coeff(delta, 2, 2) == pytest.approx(gl3_first_row(delta, 2) ** 2 - 1, abs=1e-14)


def test_gl3_symmetry_and_brute_force():
    for f in hecke_eigenforms(24) + hecke_eigenforms(12):
        for m in range(1, 21):
            for n in range(1, 21):
                a = gl3_coeff(f, m, n)
                assert a == pytest.approx(gl3_coeff(f, n, m), abs=1e-12)
                assert a == pytest.approx(brute_gl3(f, m, n), abs=1e-12)


def test_gl3_domain(delta):
    with pytest.raises(ValueError):
        gl3_coeff(delta, 0, 3)


# -- coefficient streams -----------------------------------------------------

def test_sym2_examples(delta):
    s = sym2_coeffs(delta)
    assert s.degree == 3
    assert s.coeff(1) == 1
    # (d, m) in {(1, 4), (2, 1)}: lambda(16) + lambda(1)
    assert s.coeff(4) == pytest.approx(delta.lam(16) + 1, abs=1e-14)


def test_sym2_is_zeta2_times_lambda_squares(delta):
    # formal Dirichlet-series product zeta(2s) * sum lambda(n^2) n^{-s}
    N = 50
    b = sym2_lambda_stream(delta).array(N)
    z = np.zeros(N + 1)
    for d in range(1, int(math.isqrt(N)) + 1):
        z[d * d] = 1
    prod = np.zeros(N + 1)
    for i in range(1, N + 1):
        for j in range(1, N // i + 1):
            prod[i * j] += z[i] * b[j]
    assert sym2_coeffs(delta).array(N)[1:] == pytest.approx(prod[1:], abs=1e-12)


def test_sym2_equals_gl3_row(delta):
    # L(s, sym^2 f) = sum A(1, n) n^{-s}
    s = sym2_coeffs(delta)
    for n in range(1, 80):
        assert s.coeff(n) == pytest.approx(gl3_first_row(delta, n), abs=1e-12)


def test_rs_examples(delta, even_maass):
    phi = even_maass[0]
    rs = rs_coeffs(delta, phi)
    assert rs.degree == 6
    assert rs.coeff(1) == 1
    for p in (2, 3, 5, 7, 101):
        assert rs.coeff(p) == pytest.approx(gl3_coeff(delta, 1, p) * phi.lam(p), abs=1e-12)
    assert rs.coeff(4) == pytest.approx(
        gl3_coeff(delta, 2, 1) + gl3_coeff(delta, 1, 4) * phi.lam(4), abs=1e-12)


def test_rs_brute_force(delta, even_maass):
    phi = even_maass[1]
    rs = rs_coeffs(delta, phi)
    for N in range(1, 120):
        brute = sum(gl3_coeff(delta, m, N // (m * m)) * phi.lam(N // (m * m))
                    for m in range(1, math.isqrt(N) + 1) if N % (m * m) == 0)
        assert rs.coeff(N) == pytest.approx(brute, abs=1e-10)


def test_rs_exhausted(delta, odd_maass):
    phi = odd_maass[0]
    rs = rs_coeffs(delta, phi)
    with pytest.raises(DataExhaustedError):
        rs.coeff(phi.nmax + 1 if is_prime(phi.nmax + 1) else primes_upto(2 * phi.nmax)[-1])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 200), st.integers(1, 200))
def test_streams_multiplicative(m, n):
    if math.gcd(m, n) != 1:
        return
    f = hecke_eigenforms(24)[0]
    for stream in (sym2_coeffs(f), triple_coeffs(f, f, hecke_eigenforms(12)[0])):
        assert stream.coeff(m * n) == pytest.approx(stream.coeff(m) * stream.coeff(n), abs=1e-10)


# -- Satake / triple product -------------------------------------------------

def test_satake_examples():
    assert satake(Fixed({2: 2.0}), 2) == pytest.approx(1)
    assert satake(Fixed({2: 0.0}), 2) == pytest.approx(1j)
    assert satake(Fixed({2: -2.0}), 2) == pytest.approx(-1)
    with pytest.raises(DeligneViolationError):
        satake(Fixed({2: 2.1}), 2)


def test_satake_inverse(delta):
    for f in (delta, *hecke_eigenforms(36)):
        for p in primes_upto(100):
            a = satake(f, p)
            assert abs(a) == pytest.approx(1, abs=1e-15)
            assert 0 <= cmath.phase(a) <= math.pi
            assert (a + 1 / a).real == pytest.approx(f.lam(p), abs=1e-12)


def test_triple_first_order():
    f, g = hecke_eigenforms(24)
    h = hecke_eigenforms(12)[0]
    t = triple_coeffs(f, g, h)
    assert t.degree == 8
    assert t.coeff(1) == 1
    for p in primes_upto(50):
        assert t.coeff(p) == pytest.approx(f.lam(p) * g.lam(p) * h.lam(p), abs=1e-12)


def test_triple_second_order():
    # coefficient of p^{-2s} is h_2 of the 8 roots: (e1^2 + p2) / 2 with p2 = sum of squares
    f, g = hecke_eigenforms(24)
    h = hecke_eigenforms(12)[0]
    t = triple_coeffs(f, g, h)
    for p in (2, 3, 5):
        roots = [satake(f, p) ** a * satake(g, p) ** b * satake(h, p) ** c
                 for a in (1, -1) for b in (1, -1) for c in (1, -1)]
        e1 = sum(roots)
        p2 = sum(r * r for r in roots)
        assert t.coeff(p * p) == pytest.approx(((e1 * e1 + p2) / 2).real, abs=1e-12)
