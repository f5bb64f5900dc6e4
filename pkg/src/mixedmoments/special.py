"""Special functions: log-gamma, integer-order J-Bessel, zeta on vertical lines,
and the two window transforms used by the Bessel-average lemma."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import special as sp

from .errors import AccuracyError, PoleError, RangeError

__all__ = [
    "log_gamma",
    "bessel_j",
    "zeta_line",
    "Window",
    "default_window",
    "w_hat",
    "w_breve",
    "gauss_legendre_panels",
]


# --------------------------------------------------------------------------
# log-gamma
# --------------------------------------------------------------------------

def log_gamma(z):
    """Principal branch of log Gamma(z), vectorised over numpy arrays."""
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"log_gamma has a pole at {z[bad].ravel()[0].real:g}")
    out = sp.loggamma(z)
    return out if out.ndim else complex(out)


# --------------------------------------------------------------------------
# J-Bessel
# --------------------------------------------------------------------------

_BESSEL_MAX_ORDER = 10**5
_BESSEL_MAX_ARG = 1e6


def bessel_j(order, x):
    """J_order(x) for integer order >= 0 and real x >= 0.

    Backed by the AMOS routines in scipy; the argument range is restricted
    to where those are accurate to ~1e-15 absolute.
    """
    order_arr = np.asarray(order)
    x_arr = np.asarray(x, dtype=float)
    if np.any(order_arr < 0) or np.any(order_arr != np.round(order_arr)):
        raise ValueError("bessel_j needs a nonnegative integer order")
    if np.any(x_arr < 0):
        raise ValueError("bessel_j needs x >= 0")
    if np.any(order_arr > _BESSEL_MAX_ORDER) or np.any(x_arr > _BESSEL_MAX_ARG):
        raise RangeError("bessel_j outside order <= 1e5, x <= 1e6")
    out = sp.jv(order_arr.astype(float), x_arr)
    if np.any(~np.isfinite(out)):
        raise RangeError("bessel_j overflowed")
    return out if np.ndim(out) else float(out)


# --------------------------------------------------------------------------
# Riemann zeta by Euler-Maclaurin
# --------------------------------------------------------------------------

# B_{2j}/(2j)! for j = 1..15
_B2J_OVER_FACT = [
    float(sp.bernoulli(2 * j)[2 * j] / math.factorial(2 * j)) for j in range(1, 16)
]


def zeta_line(s):
    """Riemann zeta(s) by Euler-Maclaurin summation, vectorised.

    Accurate to ~1e-13 relative for Re s >= 1/2 and |Im s| <= 1e3 (and
    well beyond that in Re s).  The cutoff N grows with |s| so the
    Bernoulli remainder stays below double precision.
    """
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    if np.any(s == 1):
        raise PoleError("zeta has a pole at s = 1")
    n_terms = int(max(20, math.ceil(np.max(np.abs(s))) + 10))
    p = 15
    n = np.arange(1, n_terms, dtype=float)
    log_n = np.log(n)
    head = np.exp(-np.multiply.outer(s, log_n)).sum(axis=-1)
    big_n = float(n_terms)
    log_big_n = math.log(big_n)
    tail = np.exp((1 - s) * log_big_n) / (s - 1) + 0.5 * np.exp(-s * log_big_n)
    # rising factorial s(s+1)...(s+2j-2) times N^{-s-2j+1}
    rising = s.copy()
    power = np.exp(-(s + 1) * log_big_n)
    for j in range(1, p + 1):
        tail = tail + _B2J_OVER_FACT[j - 1] * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (big_n * big_n)
    out = head + tail
    return complex(out[0]) if scalar else out


# --------------------------------------------------------------------------
# quadrature helper
# --------------------------------------------------------------------------

def gauss_legendre_panels(a: float, b: float, panels: int, order: int = 20):
    """Nodes and weights of composite Gauss-Legendre on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


# --------------------------------------------------------------------------
# windows
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """A smooth function compactly supported in (0, inf).

    ``func`` must be vectorised and vanish outside ``support``.
    """

    support: tuple[float, float]
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    name: str = "window"

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.support
        out = np.zeros_like(x)
        inside = (x > a) & (x < b)
        out[inside] = self.func(x[inside])
        return out if out.ndim else float(out)

    __call__ = evaluate

    @cached_property
    def derivative_bounds(self) -> tuple[float, ...]:
        """Observed max |W^(j)| for j = 0..4 on a fine grid."""
        a, b = self.support
        grid = np.linspace(a, b, 40001)
        h = grid[1] - grid[0]
        vals = self.evaluate(grid)
        bounds = [float(np.max(np.abs(vals)))]
        for _ in range(4):
            vals = np.gradient(vals, h, edge_order=2)
            bounds.append(float(np.max(np.abs(vals))))
        return tuple(bounds)

    @cached_property
    def integral(self) -> float:
        a, b = self.support
        nodes, weights = gauss_legendre_panels(a, b, 64)
        return float(weights @ self.evaluate(nodes))


def _bump(a: float, b: float) -> Callable[[np.ndarray], np.ndarray]:
    peak = 4.0 / (b - a)

    def f(x):
        return np.exp(peak - 1.0 / (x - a) - 1.0 / (b - x))

    return f


def default_window() -> Window:
    """exp(-1/t)-type bump on [1/2, 3] with maximum 1 at the midpoint."""
    return _DEFAULT_WINDOW


_DEFAULT_WINDOW = Window((0.5, 3.0), _bump(0.5, 3.0), name="bump[1/2,3]")


def _oscillatory_integral(window: Window, phase: Callable, amp: Callable, freq: float,
                          tol: float, a: float, b: float) -> tuple[complex, float]:
    """Integrate amp(u) W-like * exp(i phase(u)) over [a, b] with panel doubling."""
    panels = max(32, int(math.ceil(abs(freq) * (b - a) / math.pi)) + 32)
    prev = None
    for _ in range(8):
        nodes, weights = gauss_legendre_panels(a, b, panels)
        val = complex(np.sum(weights * amp(nodes) * np.exp(1j * phase(nodes))))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol:
                return val, err
        prev = val
        panels *= 2
    raise AccuracyError(f"window transform did not converge at frequency {freq:g}")


def w_hat(window: Window, v: float, tol: float = 1e-14) -> tuple[complex, float]:
    """Fourier transform int W(u) e(-u v) du; returns (value, error estimate)."""
    a, b = window.support
    return _oscillatory_integral(window, lambda u: -2 * math.pi * v * u, window.evaluate,
                                 2 * math.pi * v, tol, a, b)


def w_breve(window: Window, v: float, tol: float = 1e-14) -> tuple[complex, float]:
    """int_0^inf W(sqrt u) / sqrt(2 pi u) e^{i u v} du; returns (value, error estimate).

    Computed after the substitution u = w^2, which removes the 1/sqrt(u)
    factor: the integral becomes sqrt(2/pi) int W(w) e^{i v w^2} dw.
    """
    a, b = window.support
    scale = math.sqrt(2.0 / math.pi)
    return _oscillatory_integral(window, lambda w: v * w * w,
                                 lambda w: scale * window.evaluate(w),
                                 v * 2 * b, tol, a, b)
