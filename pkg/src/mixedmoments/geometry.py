"""The modular surface side: reduction to the fundamental domain, evaluation of
F(z) = y^{k/2} f(z) for the form normalised to <f, f> = vol = pi/3,
quadrature of Petersson-type integrals, and the spectral (Parseval) form of
the mixed moment <|F|^2, |G|^2>.

Quadrature runs over the standard fundamental domain directly: Gauss-Legendre
in x on [0, 1/2] (every integrand here is even in x because all forms have
real coefficients) and, for each x node, Gauss-Legendre panels in y from
sqrt(1 - x^2) up to a cutoff where the integrand is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .errors import AccuracyError
from .modforms import (HeckeEigenform, QExpansion, _miller_basis_cached, dim_cusp_space,
                       hecke_eigenforms)
from .special import gauss_legendre_panels

__all__ = [
    "VOLUME",
    "UpperHalfPoint",
    "reduce",
    "normalization_constant",
    "eval_form",
    "fd_integral",
    "petersson_norm",
    "normalized_norm",
    "inner_product",
    "mixed_moment_geometric",
    "product_coordinates",
    "parseval_spectral",
    "triple_inner",
    "l4_norm",
]

VOLUME = math.pi / 3
GL_ORDER = 20
TERM_TOL = 1e-18


@dataclass(frozen=True)
class UpperHalfPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"points of the upper half plane need y > 0, got {self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def act(self, a: int, b: int, c: int, d: int) -> "UpperHalfPoint":
        """Image under (a b; c d) in SL2(Z)."""
        if a * d - b * c != 1:
            raise ValueError("matrix must have determinant 1")
        w = (a * self.z + b) / (c * self.z + d)
        return UpperHalfPoint(w.real, w.imag)

    def is_reduced(self, tol: float = 1e-14) -> bool:
        return abs(self.x) <= 0.5 + tol and self.x * self.x + self.y * self.y >= 1 - tol


def reduce(z: UpperHalfPoint) -> tuple[UpperHalfPoint, int]:
    """Move z into |x| <= 1/2, |z| >= 1; returns the point and the word length
    (|translation| counts each T, each inversion counts one S)."""
    x, y = z.x, z.y
    word = 0
    while True:
        n = math.floor(x + 0.5)
        x -= n
        word += abs(n)
        r2 = x * x + y * y
        if r2 >= 1 - 1e-15:
            return UpperHalfPoint(x, y), word
        x, y = -x / r2, y / r2
        word += 1


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def _qexp_lambdas(form: QExpansion) -> np.ndarray:
    """[0, a(1)/1, a(2)/2^{(k-1)/2}, ...] for an exact q-expansion."""
    n = np.arange(1, form.length + 1, dtype=float)
    a = np.array([float(c) for c in form.coeffs])
    return np.concatenate([[0.0], a / n ** ((form.weight - 1) / 2)])


def _terms_needed(k: int, y_min: float, tol: float = TERM_TOL) -> int:
    """Smallest N with n^{(k-1)/2} e^{-2 pi n y} below tol of the peak term for n > N."""
    half = (k - 1) / 2
    n = np.arange(1, 100000)
    logs = half * np.log(n) - 2 * math.pi * n * y_min
    peak = logs.max()
    above = np.nonzero(logs > peak + math.log(tol))[0]
    return int(above[-1]) + 2


def _coefficients(form, N: int) -> np.ndarray:
    if isinstance(form, QExpansion):
        if N > form.length:
            raise AccuracyError(f"q-expansion has {form.length} terms, {N} needed")
        return _qexp_lambdas(form)[:N + 1]
    return np.asarray(form.lambdas(N))


def normalization_constant(f) -> float:
    """c with <c f, c f> = pi/3, from the norm of the a(1) = 1 form."""
    return math.sqrt(VOLUME / f.petersson_norm)


def _series(k: int, lam: np.ndarray, scale: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """scale * y^{k/2} sum_n lambda(n) n^{(k-1)/2} e(n z) on a grid."""
    half = (k - 1) / 2
    base = math.log(scale) + 0.5 * k * np.log(Y)
    out = np.zeros(X.shape, dtype=complex)
    for n in range(1, len(lam)):
        if lam[n] == 0:
            continue
        out += lam[n] * np.exp(base + half * math.log(n) - 2 * math.pi * n * Y + 2j * math.pi * n * X)
    return out


def eval_form(f, z: UpperHalfPoint, reduce_first: bool = True, normalize: bool = True) -> complex:
    """F(z) = y^{k/2} f(z) for f scaled to <f, f> = pi/3.

    With ``reduce_first`` the point is moved into the fundamental domain
    first (|F| is invariant; the phase is that of the reduced point).
    """
    if reduce_first:
        z, _ = reduce(z)
    k = f.weight
    N = _terms_needed(k, z.y)
    lam = _coefficients(f, N)
    scale = normalization_constant(f) if normalize else 1.0
    val = _series(k, lam, scale, np.array([z.x]), np.array([z.y]))
    return complex(val[0])


# --------------------------------------------------------------------------
# quadrature over the fundamental domain
# --------------------------------------------------------------------------

def _y_cutoff(weight: int, order: int, rel: float = 1e-22) -> float:
    """y beyond which y^{w-2} e^{-4 pi m y} is below rel times its maximum on y >= sqrt3/2."""
    a, b = weight - 2, 4 * math.pi * order
    y_peak = max(a / b, math.sqrt(3) / 2)

    def log_shape(y):
        return a * math.log(y) - b * y

    target = log_shape(y_peak) + math.log(rel)
    lo, hi = y_peak, y_peak + 1
    while log_shape(hi) > target:
        hi *= 2
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if log_shape(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def fd_integral(integrand: Callable[[np.ndarray, np.ndarray], np.ndarray], weight: int, order: int = 1,
                x_panels: int | None = None, y_panels: int | None = None,
                check: bool = True) -> tuple[float, float]:
    """int over the fundamental domain of integrand(x, y) dx dy / y^2.

    ``integrand`` must be even in x; ``weight``/``order`` describe its
    decay (y^weight e^{-4 pi order y}) and fix the y cutoff.  Returns
    (value, error) where the error is the change under doubling both panel
    counts.
    """
    y_top = _y_cutoff(weight, order)
    if x_panels is None:
        x_panels = max(4, int(math.ceil(weight / 6)))
    if y_panels is None:
        y_panels = max(8, int(math.ceil(2 * (y_top - 0.8))))

    def run(px, py):
        xs, wx = gauss_legendre_panels(0.0, 0.5, px, GL_ORDER)
        t, wt = gauss_legendre_panels(0.0, 1.0, py, GL_ORDER)
        y0 = np.sqrt(1 - xs * xs)
        Y = y0[:, None] + (y_top - y0)[:, None] * t[None, :]
        WY = (y_top - y0)[:, None] * wt[None, :]
        X = np.broadcast_to(xs[:, None], Y.shape)
        vals = np.real(integrand(X, Y)) / (Y * Y)
        return 2 * float(np.sum(wx[:, None] * WY * vals))

    value = run(x_panels, y_panels)
    if not check:
        return value, float("nan")
    finer = run(2 * x_panels, 2 * y_panels)
    return finer, abs(finer - value)


def _grid_values(f, X: np.ndarray, Y: np.ndarray, normalize: bool) -> np.ndarray:
    k = f.weight
    N = _terms_needed(k, float(Y.min()))
    lam = _coefficients(f, N)
    scale = normalization_constant(f) if normalize else 1.0
    return _series(k, lam, scale, X, Y)


def petersson_norm(form, x_panels: int | None = None, y_panels: int | None = None,
                   with_error: bool = False):
    """<f, f> = int y^k |f|^2 dmu of the form as given (no normalisation).

    Accepts an exact QExpansion or a HeckeEigenform (a(1) = 1 scaling).
    """
    k = form.weight

    def integrand(X, Y):
        F = _grid_values(form, X, Y, normalize=False)
        return (F * F.conj()).real

    value, err = fd_integral(integrand, k, 1, x_panels, y_panels)
    return (value, err) if with_error else value


def normalized_norm(f, with_error: bool = False, **kw):
    """int |F|^2 dmu for F normalised via L(1, sym^2 f); should be pi/3."""

    def integrand(X, Y):
        F = _grid_values(f, X, Y, normalize=True)
        return (F * F.conj()).real

    value, err = fd_integral(integrand, f.weight, 1, **kw)
    return (value, err) if with_error else value


def inner_product(f, g, with_error: bool = False, **kw):
    """<f, g> (unnormalised) by quadrature; both of the same weight."""
    if f.weight != g.weight:
        raise ValueError("inner product needs equal weights")

    def integrand(X, Y):
        return (_grid_values(f, X, Y, False) * _grid_values(g, X, Y, False).conj()).real

    value, err = fd_integral(integrand, f.weight, 1, **kw)
    return (value, err) if with_error else value


def mixed_moment_geometric(f, g, with_error: bool = False, **kw):
    """(1/vol) int |F|^2 |G|^2 dmu by quadrature over the fundamental domain."""

    def integrand(X, Y):
        F = _grid_values(f, X, Y, True)
        G = _grid_values(g, X, Y, True)
        return (F * F.conj()).real * (G * G.conj()).real

    value, err = fd_integral(integrand, f.weight + g.weight, 2, **kw)
    value /= VOLUME
    err /= VOLUME
    return (value, err) if with_error else value


# --------------------------------------------------------------------------
# spectral side
# --------------------------------------------------------------------------

def product_coordinates(f: HeckeEigenform, g: HeckeEigenform) -> list:
    """Coefficients c_h (mpmath) of f g = sum_h c_h h over the Hecke basis of S_{k+l}.

    The products of Miller basis elements are formed in exact integers;
    the eigenform coordinates enter only afterwards.
    """
    w = f.weight + g.weight
    d = dim_cusp_space(w)
    if not f.coords or not g.coords:
        raise ValueError("product expansion needs forms with q-expansion data")
    bf = _miller_basis_cached(f.weight, d + 1)
    bg = _miller_basis_cached(g.weight, d + 1)
    hs = hecke_eigenforms(w)
    prec = max(f.precision, g.precision, hs[0].precision)
    with mpmath.workprec(prec):
        prod = [mpmath.mpf(0)] * (d + 1)
        for a, bi in zip(f.coords, bf):
            for b, bj in zip(g.coords, bg):
                cross = (bi * bj).series()  # exact integers
                for n in range(1, d + 1):
                    if cross[n]:
                        prod[n] += a * b * cross[n]
        # Miller coordinates of fg are its first d coefficients; change basis
        gamma = mpmath.matrix(d, d)
        for r, h in enumerate(hs):
            for i in range(d):
                gamma[i, r] = h.coords[i]
        rhs = mpmath.matrix([prod[n] for n in range(1, d + 1)])
        coeffs = mpmath.lu_solve(gamma, rhs)
        return [coeffs[r] for r in range(d)]


def parseval_spectral(f: HeckeEigenform, g: HeckeEigenform, terms: bool = False):
    """(1/vol) <|F|^2, |G|^2> = (1/vol) c_f^2 c_g^2 sum_h |c_h|^2 <h, h>.

    With ``terms`` the per-h contributions are returned as well.
    """
    coeffs = product_coordinates(f, g)
    hs = hecke_eigenforms(f.weight + g.weight)
    scale = VOLUME / (f.petersson_norm * g.petersson_norm)
    contributions = [scale * float(c) ** 2 * h.petersson_norm for c, h in zip(coeffs, hs)]
    total = math.fsum(contributions)
    return (total, contributions) if terms else total


def triple_inner(f: HeckeEigenform, g: HeckeEigenform, h: HeckeEigenform) -> float:
    """<f g, h> for the a(1) = 1 forms, via the Hecke-basis expansion of f g."""
    if h.weight != f.weight + g.weight:
        raise ValueError(f"h has weight {h.weight}, expected {f.weight + g.weight}")
    coeffs = product_coordinates(f, g)
    hs = hecke_eigenforms(h.weight)
    idx = next(i for i, other in enumerate(hs) if other is h or
               (other.index == h.index and other.weight == h.weight))
    return float(coeffs[idx]) * h.petersson_norm


def l4_norm(f: HeckeEigenform, geometric: bool = False) -> float:
    """||F||_4^4 / vol."""
    return mixed_moment_geometric(f, f) if geometric else parseval_spectral(f, f)
