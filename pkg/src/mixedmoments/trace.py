"""Exact-identity checks: the Petersson trace formula and the J-Bessel average."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .arith import kloosterman
from .modforms import dim_cusp_space, hecke_eigenforms
from .special import Window, bessel_j, default_window, gauss_legendre_panels, w_breve, w_hat

__all__ = [
    "PeterssonReport",
    "petersson_lhs",
    "petersson_rhs",
    "petersson_tail_bound",
    "default_c_max",
    "petersson_check",
    "reports_to_csv",
    "BesselAverage",
    "bessel_average",
    "fourth_moment_of_w_hat",
]

PETERSSON_TAIL_TARGET = 1e-15
PETERSSON_TOL = 1e-8


@dataclass(frozen=True)
class PeterssonReport:
    k: int
    m: int
    n: int
    lhs: float
    rhs: float
    residual: float
    tail_bound: float
    c_max: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.tail_bound + PETERSSON_TOL


def petersson_lhs(k: int, m: int, n: int) -> float:
    """12 zeta(2)/(k-1) sum_f lambda_f(m) lambda_f(n) / L(1, sym^2 f)."""
    if dim_cusp_space(k) == 0:
        return 0.0
    total = math.fsum(f.lam(m) * f.lam(n) / f.l1_sym2 for f in hecke_eigenforms(k))
    return 2 * math.pi**2 / (k - 1) * total


def petersson_tail_bound(k: int, m: int, n: int, c_max: int) -> float:
    """Bound for the neglected c > c_max part of the Kloosterman-Bessel sum.

    Uses J_{k-1}(x) <= (x/2)^{k-1}/(k-1)!, Weil's bound
    |S(m,n;c)| <= d(c) sqrt(c) sqrt((m,n,c)) with d(c) <= 2 sqrt(c) and
    (m,n,c) <= (m,n), and sum_{c>C} c^{1-k} <= C^{2-k}/(k-2).
    """
    if k < 4:
        raise ValueError("the tail bound needs k >= 4")
    g = math.gcd(m, n)
    log_b = (math.log(4 * math.pi * math.sqrt(g)) + (k - 1) * math.log(2 * math.pi * math.sqrt(m * n))
             - math.lgamma(k) - (k - 2) * math.log(c_max) - math.log(k - 2))
    return math.exp(log_b)


def default_c_max(k: int, m: int, n: int, target: float = PETERSSON_TAIL_TARGET) -> int:
    """Smallest c_max whose tail bound is below ``target``."""
    c = 1
    while petersson_tail_bound(k, m, n, c) >= target:
        c *= 2
    lo, hi = c // 2, c
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if petersson_tail_bound(k, m, n, mid) < target:
            hi = mid
        else:
            lo = mid
    return max(hi, 1)


_ROWS: dict[tuple[int, int], np.ndarray] = {}


def _kloosterman_row(m: int, n: int, c_max: int) -> np.ndarray:
    """S(m, n; c) for c = 1..c_max, extending a per-(m, n) cache."""
    row = _ROWS.get((m, n), np.zeros(0))
    if len(row) < c_max:
        extra = [kloosterman(m, n, c) for c in range(len(row) + 1, c_max + 1)]
        row = np.concatenate([row, extra])
        _ROWS[(m, n)] = row
    return row[:c_max]


def petersson_rhs(k: int, m: int, n: int, c_max: int | None = None) -> tuple[float, float]:
    """delta_{m,n} + 2 pi i^{-k} sum_{c <= c_max} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c).

    Returns (value, tail_bound).
    """
    if k % 2:
        raise ValueError("k must be even")
    if c_max is None:
        c_max = default_c_max(k, m, n)
    if c_max < 1:
        raise ValueError("c_max must be >= 1")
    a, b = min(m, n), max(m, n)  # S is symmetric; share the cache
    sums = _kloosterman_row(a, b, c_max)
    c = np.arange(1, c_max + 1, dtype=float)
    terms = sums / c * bessel_j(k - 1, 4 * math.pi * math.sqrt(m * n) / c)
    sign = -1.0 if (k // 2) % 2 else 1.0
    value = float(m == n) + 2 * math.pi * sign * math.fsum(terms)
    return value, petersson_tail_bound(k, m, n, c_max)


def petersson_check(k: int, m: int, n: int, c_max: int | None = None) -> PeterssonReport:
    if c_max is None:
        c_max = default_c_max(k, m, n)
    lhs = petersson_lhs(k, m, n)
    rhs, tail = petersson_rhs(k, m, n, c_max)
    return PeterssonReport(k, m, n, lhs, rhs, abs(lhs - rhs), tail, c_max)


def reports_to_csv(reports: Iterable[PeterssonReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "m", "n", "lhs", "rhs", "residual", "tail_bound"])
    for r in reports:
        writer.writerow([r.k, r.m, r.n, repr(r.lhs), repr(r.rhs), repr(r.residual), repr(r.tail_bound)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# J-Bessel average over the weight
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BesselAverage:
    lhs: float
    main_term: float
    error_budget: float
    imag_residue: float

    @property
    def ratio(self) -> float:
        """|lhs - main| in units of the error budget."""
        return abs(self.lhs - self.main_term) / self.error_budget


@lru_cache(maxsize=16)
def fourth_moment_of_w_hat(window: Window, tol: float = 1e-10, floor: float = 1e-13) -> float:
    """int_R v^4 |W^(v)| dv (|W^| is even since W is real).

    Integrates outward in panels and stops once a panel is negligible or
    |W^| has reached the quadrature noise floor (W^ decays faster than any
    power, so the rest is below the floor times a polynomial factor).
    """
    total = 0.0
    lo, width = 0.0, 2.0
    while True:
        nodes, weights = gauss_legendre_panels(lo, lo + width, 4, order=16)
        vals = np.array([abs(w_hat(window, v)[0]) for v in nodes])
        piece = float(weights @ (nodes**4 * vals))
        total += piece
        lo += width
        if piece < tol * total or vals.max() < floor:
            break
    return 2 * total


def bessel_average(K: float, x: float, window: Window | None = None) -> BesselAverage:
    """Both sides of the weight-averaged J-Bessel asymptotic.

    lhs = sum_{k even} 2 i^k W((k-1)/K) J_{k-1}(x) (finite: W has compact
    support); main = -(K/sqrt x) Im{e(-1/8) e^{ix} W~(K^2/2x)};
    error_budget = (x/K^4) int v^4 |W^(v)| dv.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    window = window or default_window()
    a, b = window.support
    k_lo = 2 * max(1, math.floor((a * K + 1) / 2))
    k_hi = 2 * math.ceil((b * K + 1) / 2)
    ks = np.arange(k_lo, k_hi + 1, 2)
    weights = window.evaluate((ks - 1) / K)
    phases = np.array([1j**int(k) for k in ks])
    terms = 2 * phases * weights * bessel_j(ks - 1, np.full(len(ks), float(x)))
    lhs = math.fsum(terms.real)
    imag = abs(math.fsum(terms.imag))
    breve, _ = w_breve(window, K * K / (2 * x))
    main = -(K / math.sqrt(x)) * (np.exp(-1j * math.pi / 4) * np.exp(1j * x) * breve).imag
    budget = x / K**4 * fourth_moment_of_w_hat(window)
    return BesselAverage(lhs, float(main), budget, imag)
