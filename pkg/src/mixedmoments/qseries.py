"""Exact integer power-series arithmetic truncated at a fixed length.

Series are plain lists of Python ints ``[a0, a1, ..., a_{N-1}]``.  Products
use Kronecker substitution: both series are packed into one big integer,
multiplied by GMP, and unpacked, which is far faster than schoolbook
convolution at the lengths needed for L-function coefficients.
"""

from __future__ import annotations

import gmpy2

__all__ = ["mul", "power", "eisenstein", "delta", "sigma_table"]


def _pack(coeffs: list[int], width: int) -> gmpy2.mpz:
    """Return sum c_i 2^(width*i) for signed coefficients."""
    nbytes = width // 8
    pos = bytearray(nbytes * len(coeffs))
    neg = bytearray(nbytes * len(coeffs))
    for i, c in enumerate(coeffs):
        if c > 0:
            pos[i * nbytes:(i + 1) * nbytes] = c.to_bytes(nbytes, "little")
        elif c < 0:
            neg[i * nbytes:(i + 1) * nbytes] = (-c).to_bytes(nbytes, "little")
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))


def _unpack(value: gmpy2.mpz, width: int, count: int) -> list[int]:
    nbytes = width // 8
    half = 1 << (width - 1)
    # Adding half to every digit makes them all nonnegative.
    offset = int.from_bytes((half.to_bytes(nbytes, "little")) * count, "little")
    raw = int(value) + offset
    if raw < 0:
        raise OverflowError("Kronecker unpack underflow")
    data = raw.to_bytes(nbytes * count + nbytes, "little")
    out = []
    for i in range(count):
        out.append(int.from_bytes(data[i * nbytes:(i + 1) * nbytes], "little") - half)
    return out


def _bits(coeffs: list[int]) -> int:
    return max((abs(c).bit_length() for c in coeffs), default=0)


def mul(a: list[int], b: list[int], length: int | None = None) -> list[int]:
    """Product of two integer series truncated to ``length`` terms."""
    if length is None:
        length = min(len(a), len(b))
    a = a[:length]
    b = b[:length]
    if not a or not b:
        return [0] * length
    bound = _bits(a) + _bits(b) + max(len(a), len(b)).bit_length() + 2
    width = ((bound + 7) // 8) * 8
    prod = _pack(a, width) * _pack(b, width)
    out = _unpack(prod, width, len(a) + len(b) - 1)
    out = out[:length]
    return out + [0] * (length - len(out))


def power(a: list[int], e: int, length: int | None = None) -> list[int]:
    if length is None:
        length = len(a)
    result = [1] + [0] * (length - 1)
    base = a[:length]
    while e:
        if e & 1:
            result = mul(result, base, length)
        e >>= 1
        if e:
            base = mul(base, base, length)
    return result


def sigma_table(power_: int, length: int) -> list[int]:
    """sigma_power(n) for n < length (index 0 is 0)."""
    sig = [0] * length
    for d in range(1, length):
        dp = d ** power_
        for m in range(d, length, d):
            sig[m] += dp
    return sig


def eisenstein(weight: int, length: int) -> list[int]:
    """E_4 or E_6 with constant term 1, integer-normalised."""
    if weight == 4:
        factor = 240
    elif weight == 6:
        factor = -504
    else:
        raise ValueError("only E4 and E6 are needed")
    sig = sigma_table(weight - 1, length)
    return [1] + [factor * s for s in sig[1:]]


def delta(length: int) -> list[int]:
    """Ramanujan Delta = q * (eta^3 / q^{1/8})^8 via Jacobi's triple product.

    eta(q)^3 = sum_{n>=0} (-1)^n (2n+1) q^{n(n+1)/2 + 1/8}.
    """
    eta3 = [0] * length
    n = 0
    while n * (n + 1) // 2 < length:
        eta3[n * (n + 1) // 2] = (-1) ** n * (2 * n + 1)
        n += 1
    body = power(eta3, 8, length)
    return [0] + body[:length - 1]
