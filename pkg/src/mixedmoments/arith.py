"""Kloosterman sums and the Dirichlet-coefficient streams of every L-function
used here: sym^2 f, sym^2 f x phi, f x g x h, plus GL(3) coefficients."""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Protocol

import numpy as np

from .errors import DataExhaustedError, DeligneViolationError
from .numtheory import divisors, factorize, mobius, multiplicative_array

__all__ = [
    "CoefficientStream",
    "kloosterman",
    "gl3_coeff",
    "gl3_first_row",
    "sym2_coeffs",
    "sym2_lambda_stream",
    "rs_coeffs",
    "satake",
    "triple_coeffs",
    "maass_stream",
]

DELIGNE_TOL = 1e-10


class HasLambda(Protocol):
    def lam(self, n: int) -> float: ...


# --------------------------------------------------------------------------
# coefficient streams
# --------------------------------------------------------------------------

class CoefficientStream:
    """Multiplicative Dirichlet coefficients a(n), memoised.

    ``local(p, e)`` gives a(p^e).  Values are cached per stream object, so
    re-reading the same coefficients across a scan costs nothing.
    """

    def __init__(self, degree: int, local: Callable[[int, int], float], description: str):
        self.degree = degree
        self.description = description
        self._local = local
        self._local_cache: dict[tuple[int, int], float] = {}
        self._array = np.array([0.0, 1.0])
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"CoefficientStream({self.description!r}, degree={self.degree})"

    def local(self, p: int, e: int) -> float:
        key = (p, e)
        val = self._local_cache.get(key)
        if val is None:
            val = self._local(p, e) if e else 1.0
            self._local_cache[key] = val
        return val

    def coeff(self, n: int) -> float:
        if n < 1:
            raise ValueError("coefficients are indexed from n = 1")
        if n < len(self._array):
            return float(self._array[n])
        out = 1.0
        for p, e in factorize(n):
            out *= self.local(p, e)
        return out

    __call__ = coeff

    def array(self, nmax: int) -> np.ndarray:
        """[0, a(1), ..., a(nmax)] as a read-only float array."""
        if nmax >= len(self._array):
            with self._lock:
                if nmax >= len(self._array):
                    arr = multiplicative_array(self.local, nmax)
                    arr.setflags(write=False)
                    self._array = arr
        return self._array[:nmax + 1]


# --------------------------------------------------------------------------
# Kloosterman sums
# --------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    d = np.array([x for x in range(c) if math.gcd(x, c) == 1], dtype=np.int64)
    inv = np.array([pow(int(x), -1, c) for x in d], dtype=np.int64) if c > 1 else np.zeros(1, dtype=np.int64)
    if c == 1:
        d = np.zeros(1, dtype=np.int64)
    return d, inv


def kloosterman(m: int, n: int, c: int) -> float:
    """S(m, n; c) = sum over d mod c, (d, c) = 1 of e((m d + n dbar) / c).

    Enumerated exactly: the residues (m d + n dbar) mod c are integers, only
    the final cosines are floating point.
    """
    if c < 1:
        raise ValueError("Kloosterman modulus must be >= 1")
    d, inv = _units_and_inverses(c)
    res = (m % c * d + n % c * inv) % c
    counts = np.bincount(res, minlength=c)
    angles = 2 * np.pi * np.arange(c) / c
    real = math.fsum(counts * np.cos(angles))
    imag = math.fsum(counts * np.sin(angles))
    if abs(imag) > 1e-12 * max(1.0, math.sqrt(c)):
        raise ArithmeticError(f"S({m},{n};{c}) has imaginary residue {imag:g}")
    return real


# --------------------------------------------------------------------------
# GL(3) coefficients of sym^2 f
# --------------------------------------------------------------------------

def gl3_first_row(f: HasLambda, n: int) -> float:
    """A(n, 1) = A(1, n) = sum_{a^2 b = n} lambda_f(b^2)."""
    total = 0.0
    a = 1
    while a * a <= n:
        if n % (a * a) == 0:
            b = n // (a * a)
            total += f.lam(b * b)
        a += 1
    return total


def gl3_coeff(f: HasLambda, m: int, n: int) -> float:
    """A(m, n) = sum_{d | (m, n)} mu(d) A(m/d, 1) A(1, n/d)."""
    if m < 1 or n < 1:
        raise ValueError("A(m, n) needs m, n >= 1")
    total = 0.0
    for d in divisors(math.gcd(m, n)):
        mu = mobius(d)
        if mu:
            total += mu * gl3_first_row(f, m // d) * gl3_first_row(f, n // d)
    return total


def sym2_lambda_stream(f) -> CoefficientStream:
    """lambda_f(n^2): the Dirichlet series of L(s, sym^2 f) / zeta(2s)."""
    return CoefficientStream(3, lambda p, e: f.lam_prime_power(p, 2 * e),
                             f"lambda(n^2) of weight {f.weight} #{f.index}")


def sym2_coeffs(f) -> CoefficientStream:
    """Coefficients of L(s, sym^2 f) = zeta(2s) sum lambda_f(n^2) n^{-s}."""

    def local(p, e):
        return sum(f.lam_prime_power(p, 2 * (e - 2 * j)) for j in range(e // 2 + 1))

    return CoefficientStream(3, local, f"sym2(f) weight {f.weight} #{f.index}")


def maass_stream(phi) -> CoefficientStream:
    """lambda_phi(n) with data-exhaustion checks."""
    return CoefficientStream(2, lambda p, e: phi.lam(p**e), f"phi t={phi.t_phi:.6f}")


def rs_coeffs(f, phi) -> CoefficientStream:
    """Coefficients of L(s, sym^2 f x phi) = sum A(m,n) lambda_phi(n) (m^2 n)^{-s}.

    At a prime power, coeff(p^e) = sum_{2a + b = e} A(p^a, p^b) lambda_phi(p^b).
    """

    def local(p, e):
        total = 0.0
        for a in range(e // 2 + 1):
            b = e - 2 * a
            total += gl3_coeff(f, p**a, p**b) * phi.lam(p**b)
        return total

    return CoefficientStream(6, local, f"sym2(f)xphi weight {f.weight} #{f.index}, t={phi.t_phi:.6f}")


# --------------------------------------------------------------------------
# Satake parameters and the triple product
# --------------------------------------------------------------------------

def satake(f: HasLambda, p: int) -> complex:
    """alpha_f(p) = e^{i theta}, theta in [0, pi], with 2 cos(theta) = lambda_f(p)."""
    lam = f.lam(p)
    if abs(lam) > 2 + DELIGNE_TOL:
        raise DeligneViolationError(f"|lambda({p})| = {abs(lam):.15g} > 2")
    lam = max(-2.0, min(2.0, lam))
    return cmath.exp(1j * math.acos(lam / 2))


def _complete_homogeneous(roots: list[complex], emax: int) -> list[complex]:
    """h_0..h_emax of the roots: coefficients of prod (1 - r X)^{-1}."""
    h = [1.0 + 0j] + [0j] * emax
    for r in roots:
        # multiply by 1/(1 - r X): h_e += r h_{e-1}, in increasing e
        for e in range(1, emax + 1):
            h[e] = h[e] + r * h[e - 1]
    return h


def triple_coeffs(f, g, h) -> CoefficientStream:
    """Degree-8 coefficients of L(s, f x g x h) from the Satake parameters."""
    cache: dict[int, list[complex]] = {}

    def local(p, e):
        series = cache.get(p)
        if series is None or len(series) <= e:
            af, ag, ah = satake(f, p), satake(g, p), satake(h, p)
            roots = [af**a * ag**b * ah**c for a in (1, -1) for b in (1, -1) for c in (1, -1)]
            series = _complete_homogeneous(roots, max(e, 8))
            cache[p] = series
        val = series[e]
        if abs(val.imag) > 1e-10:
            raise ArithmeticError(f"triple coefficient at {p}^{e} not real: {val}")
        return val.real

    return CoefficientStream(8, local, f"f x g x h weights {f.weight},{g.weight},{h.weight}")
