"""Small elementary number theory helpers (sieves, factorisation, divisors)."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "spf_sieve",
    "primes_upto",
    "factorize",
    "divisors",
    "mobius",
    "num_divisors",
    "is_prime",
    "multiplicative_array",
]


@lru_cache(maxsize=8)
def spf_sieve(n: int) -> np.ndarray:
    """Smallest prime factor of every integer <= n (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if spf[p] == 0:
            spf[p] = p
            if p * p <= n:
                block = spf[p * p::p]
                block[block == 0] = p
    spf.setflags(write=False)
    return spf


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    spf = spf_sieve(n)
    return [int(p) for p in np.nonzero(spf == np.arange(n + 1))[0] if p >= 2]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation as a sorted list of (p, e)."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == [(n, 1)]


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


def num_divisors(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n))


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def multiplicative_array(local: Callable[[int, int], float], nmax: int,
                         dtype=float) -> np.ndarray:
    """Values f(0..nmax) of the multiplicative f with f(p^e) = local(p, e).

    Index 0 is left as 0.  Uses a smallest-prime-factor sieve so each entry
    costs one multiplication.
    """
    out = np.zeros(nmax + 1, dtype=dtype)
    if nmax >= 1:
        out[1] = 1
    spf = spf_sieve(max(nmax, 2))
    cache: dict[tuple[int, int], float] = {}
    for n in range(2, nmax + 1):
        p = int(spf[n])
        m = n
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        key = (p, e)
        val = cache.get(key)
        if val is None:
            val = local(p, e)
            cache[key] = val
        out[n] = val * out[m]
    return out
