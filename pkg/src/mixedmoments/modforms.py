"""Cusp forms of level one: Miller bases, Hecke eigenbases, eigenvalues.

q-expansions are exact (Python integers) all the way through the Miller
basis.  Floating point only enters at the eigen-decomposition of T_2, which
is carried out with mpmath at extended precision.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from . import qseries
from .errors import DegenerateSpectrumError, EmptySpaceError
from .numtheory import multiplicative_array, primes_upto, factorize

__all__ = [
    "QExpansion",
    "HeckeEigenform",
    "dim_cusp_space",
    "miller_basis",
    "hecke_matrix",
    "hecke_eigenforms",
    "hecke_eigenvalue",
    "default_length",
    "dumps_eigenforms",
    "loads_eigenforms",
]

DEFAULT_PRECISION_BITS = 192
SEPARATION_TOL = 1e-20


def dim_cusp_space(k: int) -> int:
    """Dimension of S_k(SL_2(Z))."""
    if not isinstance(k, (int, np.integer)) or k < 0 or k % 2:
        raise ValueError(f"weight must be a nonnegative even integer, got {k!r}")
    k = int(k)
    if k < 12:
        return 0
    d = k // 12
    return d - 1 if k % 12 == 2 else d


def default_length(k: int) -> int:
    return max(64, 2 * dim_cusp_space(k) + 16)


@dataclass(frozen=True)
class QExpansion:
    """Exact q-expansion a(1), ..., a(N) of a cusp form (a(0) = 0)."""

    weight: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.weight < 4 or self.weight % 2:
            raise ValueError(f"weight must be even and >= 4, got {self.weight}")

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> int:
        """a(n) for 1 <= n <= N; a(0) = 0."""
        if n == 0:
            return 0
        if not 1 <= n <= self.length:
            raise IndexError(f"coefficient {n} outside 0..{self.length}")
        return self.coeffs[n - 1]

    def series(self) -> list[int]:
        """Coefficient list starting at q^0."""
        return [0, *self.coeffs]

    def __mul__(self, other: "QExpansion") -> "QExpansion":
        n = min(self.length, other.length)
        prod = qseries.mul(self.series(), other.series(), n + 1)
        return QExpansion(self.weight + other.weight, tuple(prod[1:]))

    def scale(self, c: int) -> "QExpansion":
        return QExpansion(self.weight, tuple(c * a for a in self.coeffs))


# --------------------------------------------------------------------------
# Miller basis
# --------------------------------------------------------------------------

def _eisenstein_exponents(m: int) -> tuple[int, int]:
    """(a, b) with 4a + 6b = m, a <= 2; m even, m != 2."""
    if m == 0:
        return 0, 0
    a = {0: 0, 4: 1, 2: 2}[m % 6]
    b = (m - 4 * a) // 6
    if b < 0:
        raise ValueError(f"no E4^a E6^b of weight {m}")
    return a, b


@lru_cache(maxsize=64)
def _miller_basis_cached(k: int, length: int) -> tuple[QExpansion, ...]:
    d = dim_cusp_space(k)
    n = length + 1
    dlt = qseries.delta(n)
    e4 = qseries.eisenstein(4, n)
    e6 = qseries.eisenstein(6, n)
    rows = []
    delta_pow = dlt
    for j in range(1, d + 1):
        a, b = _eisenstein_exponents(k - 12 * j)
        s = delta_pow
        if a:
            s = qseries.mul(s, qseries.power(e4, a, n), n)
        if b:
            s = qseries.mul(s, qseries.power(e6, b, n), n)
        rows.append(s)
        delta_pow = qseries.mul(delta_pow, dlt, n)
    # rows[j-1] = q^j + O(q^{j+1}); clear above the diagonal
    for i in range(d - 1, -1, -1):
        for r in range(i):
            c = rows[r][i + 1]
            if c:
                rows[r] = [x - c * y for x, y in zip(rows[r], rows[i])]
    return tuple(QExpansion(k, tuple(r[1:])) for r in rows)


def miller_basis(k: int, N: int) -> list[QExpansion]:
    """Echelon integral basis of S_k: element i has a(j) = delta_ij, j <= dim."""
    d = dim_cusp_space(k)
    if d == 0:
        raise EmptySpaceError(f"S_{k} is zero-dimensional")
    if N < d:
        raise ValueError(f"need N >= dim S_k = {d}, got {N}")
    return list(_miller_basis_cached(k, N))


def hecke_matrix(basis: Sequence[QExpansion], p: int) -> list[list[int]]:
    """Integer matrix M with T_p b_i = sum_j M[i][j] b_j on a Miller basis."""
    d = len(basis)
    k = basis[0].weight
    if basis[0].length < p * d:
        raise ValueError(f"basis length {basis[0].length} too short for T_{p}")
    pk = p ** (k - 1)
    mat = []
    for b in basis:
        row = []
        for j in range(1, d + 1):
            val = b[p * j]
            if j % p == 0:
                val += pk * b[j // p]
            row.append(val)
        mat.append(row)
    return mat


# --------------------------------------------------------------------------
# Hecke eigenforms
# --------------------------------------------------------------------------

class HeckeEigenform:
    """A normalised Hecke eigenform in S_k.

    The q-expansion is held as a real combination of an exact Miller basis,
    ``a(n) = sum_i coords[i] * basis[i][n]``, with the combination known to
    ``precision`` bits.  Hecke eigenvalues are normalised by n^{(k-1)/2}, so
    lambda(1) = 1 and Deligne's bound reads |lambda(p)| <= 2.
    """

    def __init__(self, weight: int, coords: Sequence, index: int = 0,
                 precision: int = DEFAULT_PRECISION_BITS,
                 prime_lambdas: dict[int, float] | None = None):
        self.weight = int(weight)
        self.index = index
        self.precision = precision
        self.coords = tuple(coords)
        self._lock = threading.Lock()
        self._prime_lambda: dict[int, float] = dict(prime_lambdas or {})
        self._prime_limit = max(self._prime_lambda, default=1)
        self._ppow: dict[tuple[int, int], float] = {}
        self._dense = np.array([0.0, 1.0])

    def __repr__(self) -> str:
        return f"HeckeEigenform(weight={self.weight}, index={self.index}, lambda2={self.lam(2):.12f})"

    @property
    def dim(self) -> int:
        return dim_cusp_space(self.weight)

    # -- q-expansion --------------------------------------------------------

    def _basis(self, length: int) -> tuple[QExpansion, ...]:
        return _miller_basis_cached(self.weight, length)

    def coefficient_mp(self, n: int):
        """a(n) of the arithmetically normalised form, as an mpmath real."""
        if not self.coords:
            raise ValueError("form was loaded without q-expansion data")
        if n == 0:
            return mpmath.mpf(0)
        length = max(default_length(self.weight), 1 << max(n - 1, 1).bit_length())
        basis = self._basis(length)
        with mpmath.workprec(self.precision):
            return mpmath.fsum(c * b[n] for c, b in zip(self.coords, basis))

    def _fill_primes(self, limit: int) -> None:
        if limit <= self._prime_limit:
            return
        if not self.coords:
            from .errors import DataExhaustedError
            raise DataExhaustedError(limit, self._prime_limit, "Hecke eigenvalues")
        length = max(limit, default_length(self.weight))
        basis = self._basis(length)
        shift = self.precision + 32
        scaled = [int(mpmath.nint(mpmath.ldexp(c, shift))) for c in self.coords]
        half = (self.weight - 1) / 2
        with mpmath.workprec(self.precision):
            for p in primes_upto(limit):
                if p in self._prime_lambda:
                    continue
                a = sum(s * b[p] for s, b in zip(scaled, basis))
                lam = mpmath.ldexp(mpmath.mpf(a), -shift) / mpmath.power(p, half)
                self._prime_lambda[p] = float(lam)
        self._prime_limit = limit

    def ensure_primes(self, limit: int) -> None:
        """Make lambda(p) available for all primes p <= limit."""
        if limit > self._prime_limit:
            if not self.coords:
                from .errors import DataExhaustedError
                raise DataExhaustedError(limit, self._prime_limit, "Hecke eigenvalues")
            # grow in powers of two so the exact basis is rebuilt O(log) times
            target = 1 << max(limit - 1, 1).bit_length()
            with self._lock:
                self._fill_primes(target)

    # -- eigenvalues --------------------------------------------------------

    def lam_prime_power(self, p: int, e: int) -> float:
        key = (p, e)
        val = self._ppow.get(key)
        if val is not None:
            return val
        if e == 0:
            return 1.0
        self.ensure_primes(p)
        lp = self._prime_lambda[p]
        prev, cur = 1.0, lp
        for j in range(1, e):
            prev, cur = cur, lp * cur - prev
        self._ppow[key] = cur
        return cur

    def lam(self, n: int) -> float:
        """lambda_f(n) by multiplicativity and the prime-power recursion."""
        if n < 1:
            raise ValueError("lambda_f(n) needs n >= 1")
        if n < len(self._dense):
            return float(self._dense[n])
        out = 1.0
        for p, e in factorize(n):
            out *= self.lam_prime_power(p, e)
        return out

    def lambdas(self, nmax: int) -> np.ndarray:
        """Array [0, lambda(1), ..., lambda(nmax)]."""
        if nmax < len(self._dense):
            return self._dense[:nmax + 1]
        self.ensure_primes(nmax)
        arr = multiplicative_array(self.lam_prime_power, nmax)
        arr.setflags(write=False)
        self._dense = arr
        return arr

    def lambda_squares(self, nmax: int) -> np.ndarray:
        """Array [0, lambda(1), lambda(4), ..., lambda(nmax^2)]."""
        self.ensure_primes(nmax)
        return multiplicative_array(lambda p, e: self.lam_prime_power(p, 2 * e), nmax)

    def prime_lambdas(self) -> dict[int, float]:
        return dict(self._prime_lambda)

    # -- analytic data (computed lazily by other modules) -------------------

    @cached_property
    def l1_sym2(self) -> float:
        """L(1, sym^2 f), from the approximate functional equation."""
        from .lfun import L_one_sym2
        return L_one_sym2(self).value

    @cached_property
    def petersson_norm(self) -> float:
        """<f, f> (measure dx dy / y^2) of the a(1) = 1 form.

        Uses <f, f> = (k-1)! L(1, sym^2 f) / (2^{2k-1} pi^{k+1}); the
        quadrature in ``geometry.petersson_norm`` is an independent check.
        """
        k = self.weight
        log_norm = (math.lgamma(k) - (2 * k - 1) * math.log(2) - (k + 1) * math.log(math.pi))
        return math.exp(log_norm) * self.l1_sym2


def _eigen_decompose(mat: list[list[int]], precision: int):
    d = len(mat)
    with mpmath.workprec(precision):
        if d == 1:
            return [mpmath.mpf(mat[0][0])], [[mpmath.mpf(1)]]
        # f = sum v_i b_i is an eigenform iff v^T M = lambda v^T
        mt = mpmath.matrix(d, d)
        for i in range(d):
            for j in range(d):
                mt[i, j] = mat[j][i]
        evals, evecs = mpmath.eig(mt)
        vals, vecs = [], []
        for idx in range(d):
            lam = evals[idx]
            if abs(mpmath.im(lam)) > mpmath.mpf(10) ** (-30) * max(1, abs(lam)):
                raise DegenerateSpectrumError("T_2 has a non-real eigenvalue")
            v = [evecs[i, idx] for i in range(d)]
            v = [mpmath.re(x / v[0]) for x in v]
            # one step of inverse-free refinement: v^T M / lambda
            vals.append(mpmath.re(lam))
            vecs.append(v)
        return vals, vecs


@lru_cache(maxsize=128)
def _eigenforms_cached(k: int, N: int, precision: int) -> tuple[HeckeEigenform, ...]:
    d = dim_cusp_space(k)
    basis = miller_basis(k, N)
    mat = hecke_matrix(basis, 2)
    vals, vecs = _eigen_decompose(mat, precision)
    order = sorted(range(d), key=lambda i: vals[i])
    with mpmath.workprec(precision):
        for a, b in zip(order, order[1:]):
            gap = abs(vals[b] - vals[a])
            if gap <= SEPARATION_TOL * max(abs(vals[a]), abs(vals[b])):
                raise DegenerateSpectrumError(
                    f"T_2 eigenvalues of weight {k} closer than {SEPARATION_TOL:g} relative")
    forms = []
    for pos, i in enumerate(order):
        f = HeckeEigenform(k, vecs[i], index=pos, precision=precision)
        f.ensure_primes(N)
        f.lambdas(N)
        forms.append(f)
    return tuple(forms)


def hecke_eigenforms(k: int, N: int | None = None,
                     precision: int | None = None) -> list[HeckeEigenform]:
    """The Hecke basis H_k, sorted by lambda_f(2) ascending.

    ``N`` is the q-expansion length used to build the basis and the initial
    eigenvalue table; later requests extend it on demand.  ``precision``
    defaults to the module-level ``DEFAULT_PRECISION_BITS`` at call time.
    """
    if precision is None:
        precision = DEFAULT_PRECISION_BITS
    d = dim_cusp_space(k)
    if d == 0:
        raise EmptySpaceError(f"S_{k} is zero-dimensional")
    if N is None:
        N = default_length(k)
    if N < 2 * d + 2:
        raise ValueError(f"N = {N} too small to determine T_2 on S_{k}; need >= {2 * d + 2}")
    return list(_eigenforms_cached(int(k), int(N), int(precision)))


def hecke_eigenvalue(f: HeckeEigenform, n: int) -> float:
    return f.lam(n)


# --------------------------------------------------------------------------
# text serialisation
# --------------------------------------------------------------------------

def dumps_eigenforms(forms: Iterable[HeckeEigenform], nmax: int = 100) -> str:
    """``weight=<k> dim=<d>`` header per form, then ``lambda <n> <value>`` lines."""
    lines = []
    for f in forms:
        lines.append(f"weight={f.weight} dim={f.dim}")
        lam = f.lambdas(nmax)
        for n in range(1, nmax + 1):
            lines.append(f"lambda {n} {float(lam[n])!r}")
    return "\n".join(lines) + "\n"


def loads_eigenforms(text: str) -> list[HeckeEigenform]:
    """Inverse of :func:`dumps_eigenforms`; the forms carry eigenvalues only."""
    forms: list[HeckeEigenform] = []
    header = None
    table: dict[int, float] = {}

    def flush():
        if header is None:
            return
        k, _ = header
        primes = {n: v for n, v in table.items() if factorize(n) == [(n, 1)]}
        f = HeckeEigenform(k, (), index=len([g for g in forms if g.weight == k]),
                           prime_lambdas=primes)
        dense = np.zeros(max(table) + 1 if table else 2)
        for n, v in table.items():
            dense[n] = v
        dense.setflags(write=False)
        f._dense = dense
        forms.append(f)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("weight="):
            flush()
            parts = dict(tok.split("=") for tok in line.split())
            header = (int(parts["weight"]), int(parts["dim"]))
            table = {}
        elif line.startswith("lambda "):
            _, n, v = line.split()
            table[int(n)] = float(v)
        else:
            from .errors import ParseError
            raise ParseError(lineno, f"unrecognised line {line!r}")
    flush()
    return forms
