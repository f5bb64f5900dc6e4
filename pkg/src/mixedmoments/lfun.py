"""Approximate functional equations: smoothing kernels by contour quadrature and
the central / edge L-values built from them.

Every L-function here is self-dual with root number +1 and completed as

    Lambda(s) = L_inf(s) L(s),   L_inf(s) = pi^{-d s/2} prod_j Gamma((s + mu_j)/2).

For a point s0 the identity used is

    L(s0) = sum_n a(n) n^{-s0} V(s0; n) + sum_n a(n) n^{-(1-s0)} V(1-s0; n),

    V(w; y) = (1/2 pi i) int_(sigma) L_inf(w+s)/L_inf(s0) Z(w+s) y^{-s} G(s) ds/s,

where Z(u) = zeta(2u) when the coefficients are lambda(n^2) (the symmetric
square split) and 1 otherwise, and G(s) = exp(c s^2).  The value of L(s0)
does not depend on c; the kernels do.  ``kernel_v3``/``kernel_v6`` default
to c = 1; the L-value evaluators default to ``DEFAULT_DAMPING``, whose
kernels decay much faster in y (see ``L_half_sym2``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special as sp

from .arith import CoefficientStream, maass_stream, rs_coeffs, sym2_lambda_stream
from .errors import AccuracyError, AnomalyError, DataExhaustedError
from .special import log_gamma, zeta_line

__all__ = [
    "DEFAULT_DAMPING",
    "PAPER_DAMPING",
    "GammaFactor",
    "AFEDescriptor",
    "ContourKernel",
    "LValue",
    "PreconditionWarning",
    "contour_kernel",
    "kernel_v3",
    "kernel_v3_minus",
    "kernel_v6",
    "kernel_v6_stirling",
    "afe_value",
    "L_half_sym2",
    "L_half_rs",
    "L_one_sym2",
    "L_half_maass",
    "L_one_sym2_maass",
    "sym2_gamma",
    "rs_gamma",
    "maass_gamma",
    "sym2_maass_gamma",
]

PAPER_DAMPING = 1.0
DEFAULT_DAMPING = 1.0 / 16
QUAD_TOL = 1e-12
TRUNCATION_REL = 1e-12
GL_ORDER = 16
MAX_HEIGHT = 4000.0


class PreconditionWarning(UserWarning):
    """An asymptotic-regime precondition (e.g. t_phi <= sqrt(k)) is violated.

    The numerics stay valid; only the trend interpretation is affected.
    """


# --------------------------------------------------------------------------
# gamma factors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaFactor:
    """pi^{-d s/2} prod Gamma((s + mu_j)/2) for the shifts mu_j."""

    shifts: tuple[complex, ...]

    @property
    def degree(self) -> int:
        return len(self.shifts)

    @property
    def conjugate_closed(self) -> bool:
        a = sorted((complex(m).real, complex(m).imag) for m in self.shifts)
        b = sorted((complex(m).real, -complex(m).imag) for m in self.shifts)
        return np.allclose(a, b, rtol=0, atol=1e-14)

    def log(self, s):
        s = np.asarray(s, dtype=complex)
        out = -0.5 * self.degree * math.log(math.pi) * s
        for mu in self.shifts:
            out = out + log_gamma((s + mu) / 2)
        return out

    def scale(self, s0: complex) -> float:
        """exp of d/ds log L_inf at s0: the y at which V(y) turns over."""
        total = -0.5 * self.degree * math.log(math.pi)
        for mu in self.shifts:
            total += 0.5 * sp.digamma((s0 + mu) / 2).real
        return math.exp(total)


def sym2_gamma(k: int) -> GammaFactor:
    return GammaFactor((1.0, k - 1.0, float(k)))


def rs_gamma(k: int, t_phi: float) -> GammaFactor:
    it = 1j * t_phi
    return GammaFactor(tuple(base + sign * it for base in (1.0, k - 1.0, float(k)) for sign in (1, -1)))


def maass_gamma(t_phi: float, parity: str = "even") -> GammaFactor:
    base = 0.0 if parity == "even" else 1.0
    return GammaFactor((base + 1j * t_phi, base - 1j * t_phi))


def sym2_maass_gamma(t_phi: float) -> GammaFactor:
    return GammaFactor((0.0, 2j * t_phi, -2j * t_phi))


# --------------------------------------------------------------------------
# contour kernels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ContourKernel:
    """V(y) = (1/2 pi i) int F(s) y^{-s} ds on Re s = sigma, |Im s| <= height.

    ``nodes``/``weights`` hold s_j and w_j F(s_j) / (2 pi) (already folded
    for the symmetric case), so V(y) = sum_j weights_j y^{-s_j}.
    """

    center: complex
    reference: complex
    sigma: float
    damping: float
    height: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    symmetric: bool
    quad_error: float
    tail_error: float

    def __call__(self, y, chunk: int = 4096):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        flat = np.atleast_1d(y).ravel()
        if np.any(flat <= 0):
            raise ValueError("kernels are defined for y > 0")
        out = np.empty(flat.shape, dtype=complex)
        logs = np.log(flat)
        for lo in range(0, len(flat), chunk):
            block = logs[lo:lo + chunk]
            out[lo:lo + chunk] = np.exp(-np.multiply.outer(block, self.nodes)) @ self.weights
        if self.symmetric:
            out = 2 * out.real
        out = out.reshape(np.shape(y)) if not scalar else out[0]
        return out

    @property
    def error(self) -> float:
        return self.quad_error + self.tail_error


def _integrand(gamma: GammaFactor, center: complex, reference: complex, zeta_factor: bool,
               damping: float, s: np.ndarray) -> np.ndarray:
    log_f = gamma.log(center + s) - gamma.log(reference) + damping * s * s
    out = np.exp(log_f) / s
    if zeta_factor:
        out = out * zeta_line(2 * (center + s))
    return out


def _sigma_for(gamma: GammaFactor, center: complex, zeta_factor: bool, sigma: float | None) -> float:
    lower = 0.0
    if zeta_factor:
        lower = max(lower, 0.5 - center.real)
    for mu in gamma.shifts:
        lower = max(lower, -(center + mu).real)
    if sigma is None:
        sigma = lower + 0.5
    if sigma <= lower:
        raise ValueError(f"contour Re s = {sigma} is not right of all poles (need > {lower})")
    return sigma


def _tail_mass(gamma, center, reference, zeta_factor, damping, sigma, height, symmetric) -> float:
    tau, w = _panels(height, 2 * height, max(4, int(math.ceil(height / 2))))
    total = np.sum(w * np.abs(_integrand(gamma, center, reference, zeta_factor, damping, sigma + 1j * tau)))
    if not symmetric:
        total += np.sum(w * np.abs(_integrand(gamma, center, reference, zeta_factor, damping, sigma - 1j * tau)))
    else:
        total *= 2
    return float(total) / (2 * math.pi)


def _panels(a: float, b: float, count: int, order: int = GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, count + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


@lru_cache(maxsize=256)
def contour_kernel(gamma: GammaFactor, center: complex, reference: complex | None = None,
                   zeta_factor: bool = False, damping: float = PAPER_DAMPING,
                   sigma: float | None = None, y_range: tuple[float, float] = (1e-6, 1e8),
                   tol: float = QUAD_TOL) -> ContourKernel:
    """Build a converged quadrature rule for one kernel.

    Convergence is checked at probe points spread over ``y_range``: the
    panel width is halved until the kernel values move by less than ``tol``,
    and the height is raised until the neglected integrand mass beyond it
    is below ``tol`` (times the worst y^{-sigma}).
    """
    if damping <= 0:
        raise ValueError("damping must be positive for the contour integral to converge")
    center = complex(center)
    reference = center if reference is None else complex(reference)
    sigma = _sigma_for(gamma, center, zeta_factor, sigma)
    symmetric = (center.imag == 0 and reference.imag == 0 and gamma.conjugate_closed)
    y_lo, y_hi = y_range
    probes = np.exp(np.linspace(math.log(y_lo), math.log(y_hi), 13))
    y_weight = max(y_lo ** -sigma, y_hi ** -sigma)
    log_scale = abs(math.log(max(gamma.scale(reference.real + 0j if symmetric else reference), 1e-300)))
    height = max(30.0, 4 * math.log1p(math.exp(log_scale)))

    while True:
        tail = _tail_mass(gamma, center, reference, zeta_factor, damping, sigma, height, symmetric) * y_weight
        if tail < tol:
            break
        height *= 1.5
        if height > MAX_HEIGHT:
            raise AccuracyError(f"contour tail {tail:.3g} still above {tol:g} at height {height:.0f}")

    def rule(panels):
        if symmetric:
            tau, w = _panels(0.0, height, panels)
        else:
            tau, w = _panels(-height, height, 2 * panels)
        s = sigma + 1j * tau
        vals = _integrand(gamma, center, reference, zeta_factor, damping, s)
        return s, w * vals / (2 * math.pi)

    def evaluate(s, w):
        v = np.exp(-np.multiply.outer(np.log(probes), s)) @ w
        return 2 * v.real if symmetric else v

    panels = int(math.ceil(height))
    s, w = rule(panels)
    prev = evaluate(s, w)
    for _ in range(8):
        panels *= 2
        s_new, w_new = rule(panels)
        cur = evaluate(s_new, w_new)
        diff = float(np.max(np.abs(cur - prev)))
        s, w = s_new, w_new
        # y^{-sigma} amplifies rounding at the small-y probes
        floor = 64 * np.finfo(float).eps * y_weight * float(np.sum(np.abs(w)))
        if diff < max(tol, floor):
            break
        prev = cur
    else:
        raise AccuracyError(f"contour quadrature did not converge (last change {diff:.3g})")
    return ContourKernel(center, reference, sigma, damping, height, s, w, symmetric, diff, tail)


def _warn_regime(condition: bool, message: str) -> None:
    if not condition:
        warnings.warn(message, PreconditionWarning, stacklevel=3)


def kernel_v3(y, t: float, k: int, damping: float = PAPER_DAMPING, sigma: float | None = None):
    """V_3^+(y; t): the direct-side kernel of L(1/2 + it, sym^2 f).

    With the default damping this is the kernel with exp(s^2).  The zeta(1 +
    2it + 2s) factor has its pole at s = -it, so any sigma > 0 is allowed.
    """
    _warn_regime(abs(t) <= math.sqrt(k), f"|t| = {abs(t):g} exceeds sqrt(k) = {math.sqrt(k):.3g}")
    y_max = float(np.max(y)) if np.size(y) else 1.0
    kern = contour_kernel(sym2_gamma(k), 0.5 + 1j * t, None, True, damping, sigma,
                          (min(1e-6, float(np.min(y))), max(1e8, y_max)))
    return kern(y)


def kernel_v3_minus(y, t: float, k: int, damping: float = PAPER_DAMPING, sigma: float | None = None):
    """V_3^-(y; t) = L_inf(1/2 - it)/L_inf(1/2 + it) V_3^+(y; -t), built directly
    as the kernel centred at 1/2 - it normalised at 1/2 + it."""
    y_max = float(np.max(y)) if np.size(y) else 1.0
    kern = contour_kernel(sym2_gamma(k), 0.5 - 1j * t, 0.5 + 1j * t, True, damping, sigma,
                          (min(1e-6, float(np.min(y))), max(1e8, y_max)))
    return kern(y)


def kernel_v6(y, k: int, t_phi: float, damping: float = PAPER_DAMPING, sigma: float | None = None):
    """V_6(y): the kernel of L(1/2, sym^2 f x phi) (real for real y)."""
    _warn_regime(t_phi <= math.sqrt(k), f"t_phi = {t_phi:g} exceeds sqrt(k) = {math.sqrt(k):.3g}")
    y_max = float(np.max(y)) if np.size(y) else 1.0
    kern = contour_kernel(rs_gamma(k, t_phi), 0.5, None, False, damping, sigma,
                          (min(1e-6, float(np.min(y))), max(1e8, y_max)))
    return kern(y)


# -- Stirling form of V_6 -----------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_poly_coeffs(n: int) -> np.ndarray:
    """Coefficients of B_n(x), highest power first."""
    b = sp.bernoulli(n)
    return np.array([math.comb(n, j) * b[j] for j in range(n + 1)], dtype=float)


def _stirling_log_ratio(z: float, a: complex, s: np.ndarray, terms: int) -> np.ndarray:
    """log Gamma(z + a + s/2) - log Gamma(z + a) as an expansion in 1/z."""
    out = 0.5 * s * math.log(z)
    x1 = a + s / 2
    for n in range(1, terms + 1):
        poly = _bernoulli_poly_coeffs(n + 1)
        out = out + (-1) ** (n + 1) * (np.polyval(poly, x1) - np.polyval(poly, a)) / (n * (n + 1) * z**n)
    return out


def kernel_v6_stirling(y, k: int, t_phi: float, terms: int = 12,
                       damping: float = PAPER_DAMPING, sigma: float = 0.5) -> np.ndarray:
    """V_6 with the four weight-dependent Gamma ratios replaced by their
    large-k expansion around z = k/2 (``terms`` orders in 1/k).

    The leading order is (k/2)^{2s}; the small-shift Gammas
    Gamma((s + 3/2 +- i t_phi)/2) stay exact.  A cross-check of
    ``kernel_v6``, not a production path.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    z = k / 2
    shifts = [(-0.5 + 1j * t_phi) / 2, (-0.5 - 1j * t_phi) / 2,
              (0.5 + 1j * t_phi) / 2, (0.5 - 1j * t_phi) / 2]
    small = GammaFactor((1.5 + 1j * t_phi, 1.5 - 1j * t_phi))

    def integrand(s):
        log_f = small.log(0.0 + s) - small.log(0.0) - 2 * math.log(math.pi) * s + damping * s * s
        # small.log carries pi^{-s}; the full degree-6 factor is pi^{-3s}
        for a in shifts:
            log_f = log_f + _stirling_log_ratio(z, a, s, terms)
        return np.exp(log_f) / s

    height = 40.0
    prev = None
    for panels in (64, 128, 256, 512, 1024):
        tau, w = _panels(0.0, height, panels)
        s = sigma + 1j * tau
        vals = w * integrand(s) / (2 * math.pi)
        cur = 2 * (np.exp(-np.multiply.outer(np.log(y), s)) @ vals).real
        if prev is not None and np.max(np.abs(cur - prev)) < QUAD_TOL:
            return cur
        prev = cur
    raise AccuracyError("Stirling-form V6 quadrature did not converge")


# --------------------------------------------------------------------------
# L-values
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AFEDescriptor:
    """Everything that defines one approximate functional equation.

    ``gamma_ratio(s)`` is L_inf(center + s)/L_inf(center) (times Z when the
    zeta factor is on); ``conductor_scale`` is the y where the kernel turns
    over.
    """

    coefficients: CoefficientStream
    gamma: GammaFactor
    center: complex = 0.5
    zeta_factor: bool = False
    limit: int | None = None  # largest n with known coefficients

    def gamma_ratio(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.exp(self.gamma.log(self.center + s) - self.gamma.log(self.center))
        if self.zeta_factor:
            out = out * zeta_line(2 * (self.center + s))
        return out

    @property
    def conductor_scale(self) -> float:
        return self.gamma.scale(self.center)


@dataclass(frozen=True)
class LValue:
    """An L-value with its error estimate and the coefficient cutoff used."""

    value: complex
    error: float
    cutoff: int
    description: str = ""

    def __float__(self) -> float:
        return float(self.value.real)

    @property
    def real(self) -> float:
        return float(self.value.real)


def _find_cutoff(kernels: Sequence[ContourKernel], rel: float) -> int:
    """Smallest grid point 2^{j/4} beyond which all kernels stay below rel * peak."""
    ys = 2.0 ** (np.arange(0, 321) / 4)  # up to 2^80
    mags = np.max([np.abs(kern(ys)) for kern in kernels], axis=0)
    peak = float(np.max(mags))
    below = mags < rel * peak
    # last index that is above threshold
    above = np.nonzero(~below)[0]
    if len(above) == 0:
        return 1
    last = above[-1]
    if last + 1 >= len(ys):
        raise AccuracyError("kernel does not decay below the truncation threshold by y = 2^80")
    return int(math.ceil(ys[last + 1]))


def afe_value(desc: AFEDescriptor, damping: float = DEFAULT_DAMPING, cutoff_factor: float = 1.0,
              sigma: float | None = None, truncation: float = TRUNCATION_REL) -> LValue:
    """L(center) of a self-dual L-function with root number +1.

    The sum is truncated at the first n beyond which both kernels stay
    below ``truncation`` times their peak; ``cutoff_factor`` scales that
    point (used for truncation-invariance checks).
    """
    s0 = complex(desc.center)
    direct = contour_kernel(desc.gamma, s0, s0, desc.zeta_factor, damping, sigma, (1e-3, 2.0**80))
    dual_sigma = None if sigma is None else sigma
    dual = contour_kernel(desc.gamma, 1 - s0, s0, desc.zeta_factor, damping, dual_sigma, (1e-3, 2.0**80))
    cutoff = max(1, int(math.ceil(_find_cutoff([direct, dual], truncation) * cutoff_factor)))
    if desc.limit is not None and cutoff > desc.limit:
        raise DataExhaustedError(cutoff, desc.limit, desc.coefficients.description)
    check_to = 2 * cutoff if desc.limit is None else min(2 * cutoff, desc.limit)

    a = desc.coefficients.array(check_to)[1:]
    n = np.arange(1, check_to + 1, dtype=float)
    log_n = np.log(n)
    terms = a * (np.exp(-s0 * log_n) * direct(n) + np.exp(-(1 - s0) * log_n) * dual(n))
    value = complex(np.sum(terms[:cutoff]))
    truncation_err = float(np.sum(np.abs(terms[cutoff:])))
    if check_to == cutoff:
        # no coefficients beyond the cutoff: bound the rest by the threshold itself
        truncation_err = truncation * float(np.sum(np.abs(a)))
    weight_sum = float(np.sum(np.abs(a[:cutoff]) * (np.exp(-s0.real * log_n[:cutoff])
                                                    + np.exp(-(1 - s0.real) * log_n[:cutoff]))))
    quad_err = max(direct.error, dual.error) * weight_sum
    rounding = 1e-15 * float(np.sum(np.abs(terms[:cutoff])))
    return LValue(value, quad_err + truncation_err + rounding, cutoff, desc.coefficients.description)


def L_half_sym2(f, t: float = 0.0, damping: float = DEFAULT_DAMPING, cutoff_factor: float = 1.0,
                sigma: float | None = None) -> LValue:
    """L(1/2 + it, sym^2 f) from the two-sided smoothed sum over lambda_f(n^2)."""
    _warn_regime(abs(t) <= math.sqrt(f.weight), f"|t| = {abs(t):g} exceeds sqrt(k)")
    desc = AFEDescriptor(sym2_lambda_stream(f), sym2_gamma(f.weight), 0.5 + 1j * t, zeta_factor=True)
    return afe_value(desc, damping, cutoff_factor, sigma)


def L_one_sym2(f, damping: float = DEFAULT_DAMPING, cutoff_factor: float = 1.0) -> LValue:
    """L(1, sym^2 f), the edge value, from the same machinery centred at s = 1.

    The dual kernel is centred at 0 with zeta(2s) in the integrand, so its
    contour runs right of s = 1/2.
    """
    desc = AFEDescriptor(sym2_lambda_stream(f), sym2_gamma(f.weight), 1.0, zeta_factor=True)
    res = afe_value(desc, damping, cutoff_factor)
    if not res.real > 0:
        raise AnomalyError(f"L(1, sym^2 f) = {res.real:g} is not positive (weight {f.weight})")
    return LValue(res.real, res.error, res.cutoff, res.description)


def L_half_rs(f, phi, damping: float = DEFAULT_DAMPING, cutoff_factor: float = 1.0,
              sigma: float | None = None) -> LValue:
    """L(1/2, sym^2 f x phi) (real), with the nonnegativity sanity check.

    Only even phi: for odd phi the Archimedean factor and the root number
    differ from what the engine assumes.
    """
    if not getattr(phi, "is_even", True):
        raise ValueError("L(1/2, sym^2 f x phi) is implemented for even phi only")
    _warn_regime(phi.t_phi <= math.sqrt(f.weight),
                 f"t_phi = {phi.t_phi:g} exceeds sqrt(k) = {math.sqrt(f.weight):.3g}")
    desc = AFEDescriptor(rs_coeffs(f, phi), rs_gamma(f.weight, phi.t_phi), 0.5,
                         limit=getattr(phi, "nmax", None))
    res = afe_value(desc, damping, cutoff_factor, sigma)
    value = res.real
    if value < -1e-6:
        raise AnomalyError(f"L(1/2, sym^2 f x phi) = {value:g} < 0 (weight {f.weight}, t_phi {phi.t_phi:g})")
    return LValue(value, res.error, res.cutoff, res.description)


def L_half_maass(phi, damping: float = DEFAULT_DAMPING, cutoff_factor: float = 1.0) -> LValue:
    """L(1/2, phi) for a Hecke-Maass form (vanishes identically for odd phi)."""
    if not phi.is_even:
        return LValue(0.0, 0.0, 0, "odd phi: root number -1")
    desc = AFEDescriptor(maass_stream(phi), maass_gamma(phi.t_phi, "even"), 0.5, limit=phi.nmax)
    res = afe_value(desc, damping, cutoff_factor)
    if res.real < -1e-6:
        raise AnomalyError(f"L(1/2, phi) = {res.real:g} < 0 (t_phi {phi.t_phi:g})")
    return LValue(res.real, res.error, res.cutoff, res.description)


def _maass_square_stream(phi) -> CoefficientStream:
    return CoefficientStream(3, lambda p, e: phi.lam(p ** (2 * e)), f"lambda_phi(n^2) t={phi.t_phi:.6f}")


def L_one_sym2_maass(phi, damping: float = DEFAULT_DAMPING, cutoff_factor: float = 1.0) -> LValue:
    """L(1, sym^2 phi); needs lambda_phi up to the square of the cutoff."""
    stream = _maass_square_stream(phi)
    desc = AFEDescriptor(stream, sym2_maass_gamma(phi.t_phi), 1.0, zeta_factor=True,
                         limit=math.isqrt(phi.nmax))
    res = afe_value(desc, damping, cutoff_factor)
    if not res.real > 0:
        raise AnomalyError(f"L(1, sym^2 phi) = {res.real:g} is not positive (t_phi {phi.t_phi:g})")
    return LValue(res.real, res.error, res.cutoff, res.description)
