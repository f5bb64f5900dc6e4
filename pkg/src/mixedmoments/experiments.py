"""Desk-scale versions of the asymptotic statements: variance and expectation of
the mixed moment over a weight range, first and second moments of the
symmetric-square family, the spectral mixed-moment sum, exponential sums of
Maass coefficients, and the triple-product extraction.

Every experiment returns an ``ExperimentRecord`` whose ``terms`` enumerate
the summands in the fixed order they were added, so any total can be
re-assembled (and any term re-evaluated) independently.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from . import geometry
from .lfun import (L_half_maass, L_half_rs, L_half_sym2, L_one_sym2_maass, PreconditionWarning)
from .maass import MaassFormData, weyl_count
from .modforms import HeckeEigenform, dim_cusp_space, hecke_eigenforms
from .special import Window, default_window, gauss_legendre_panels, zeta_line

__all__ = [
    "DESK_K",
    "DESK_L",
    "ExperimentRecord",
    "MaassFormData",
    "form_label",
    "weight_range",
    "variance_stat",
    "expectation_stat",
    "moment1_scan",
    "harmonic_moment1",
    "moment2_scan",
    "sym2_t_moment",
    "mixed_moment_sum",
    "exp_sum_ratio",
    "extract_triple_lvalue",
    "first_moment_identity",
    "sc_se_eval",
    "se_integrand",
    "nonvanishing_scan",
    "records_to_csv",
    "terms_to_csv",
]

DESK_K = (12, 16, 20, 24, 32, 40)
DESK_L = (12, 16, 20)
ZETA2 = math.pi**2 / 6
NONNEG_TOL = 1e-6
SPECTRAL_EPS = 0.1  # the epsilon in the t-ranges l^{1/2 + eps}


def _freeze(mapping: Mapping[str, Any] | None) -> Mapping[str, Any]:
    return MappingProxyType(dict(mapping or {}))


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    """One experiment result; ``terms`` lists (label, value) summands in order."""

    experiment: str
    params: Mapping[str, Any]
    value: float
    error: float
    diagnostics: Mapping[str, Any] = field(default_factory=dict)
    terms: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if not self.error >= 0:
            raise ValueError(f"error estimate must be nonnegative, got {self.error}")
        object.__setattr__(self, "params", _freeze(self.params))
        object.__setattr__(self, "diagnostics", _freeze(self.diagnostics))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error", float(self.error))

    def __eq__(self, other):
        if not isinstance(other, ExperimentRecord):
            return NotImplemented
        return (self.experiment == other.experiment and dict(self.params) == dict(other.params)
                and self.value == other.value and self.error == other.error
                and dict(self.diagnostics) == dict(other.diagnostics) and self.terms == other.terms)

    def term_values(self) -> np.ndarray:
        return np.array([v for _, v in self.terms])


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def form_label(f) -> str:
    if isinstance(f, MaassFormData):
        return f"maass[{f.parity}]t={f.t_phi:.10f}"
    return f"{f.weight}.{f.index}"


def weight_range(K: int, lo_factor: float = 1.0, hi_factor: float = 2.0) -> list[int]:
    """Even k with lo_factor*K < k <= hi_factor*K and S_k != 0."""
    ks = [k for k in range(2, int(hi_factor * K) + 1, 2) if k > lo_factor * K]
    return [k for k in ks if dim_cusp_space(k) > 0]


def _forms(K: int) -> list[HeckeEigenform]:
    return [f for k in weight_range(K) for f in hecke_eigenforms(k)]


def _pmap(func: Callable, items: Sequence, threads: int = 1) -> list:
    """Ordered map, optionally on a thread pool (results keep input order)."""
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def _quiet(func, *args, **kw):
    """Call ``func`` with precondition warnings silenced (callers record them)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PreconditionWarning)
        return func(*args, **kw)


# --------------------------------------------------------------------------
# variance and expectation of the mixed moment
# --------------------------------------------------------------------------

def _pair_moments(K: int, g: HeckeEigenform, spot_checks: int, threads: int):
    forms = _forms(K)
    values = _pmap(lambda f: geometry.parseval_spectral(f, g), forms, threads)
    worst = 0.0
    for f, spectral in list(zip(forms, values))[:spot_checks]:
        geometric = geometry.mixed_moment_geometric(f, g)
        worst = max(worst, abs(geometric - spectral) / abs(spectral))
    return forms, values, worst


def variance_stat(K: int, g: HeckeEigenform, spot_checks: int = 1, threads: int = 1) -> ExperimentRecord:
    """(1/K^2) sum_{K<k<=2K} sum_{f in H_k} |<|F|^2,|G|^2>/vol - 1|^2.

    Mixed moments come from the Parseval expansion; the first ``spot_checks``
    pairs are also integrated over the fundamental domain and the worst
    relative disagreement sets the error estimate.
    """
    forms, values, worst = _pair_moments(K, g, spot_checks, threads)
    rel = max(worst, 1e-12)
    terms = tuple((form_label(f), (m - 1) ** 2) for f, m in zip(forms, values))
    value = math.fsum(t for _, t in terms) / K**2
    error = math.fsum(2 * abs(m - 1) * abs(m) * rel for m in values) / K**2
    return ExperimentRecord(
        "variance", {"K": K, "g": form_label(g)}, value, error,
        {"pairs": len(forms), "spot_checks": spot_checks, "max_spot_residual": worst}, terms)


def expectation_stat(K: int, g: HeckeEigenform, spot_checks: int = 1, threads: int = 1) -> ExperimentRecord:
    """(2/K) sum_{K<k<=2K} (1/|H_k|) sum_{f in H_k} <|F|^2,|G|^2>/vol.

    Weights k with S_k = 0 (only k = 14) contribute an empty sum.
    """
    forms, values, worst = _pair_moments(K, g, spot_checks, threads)
    rel = max(worst, 1e-12)
    counts = {k: dim_cusp_space(k) for k in weight_range(K)}
    terms = tuple((form_label(f), 2 / K * m / counts[f.weight]) for f, m in zip(forms, values))
    value = math.fsum(t for _, t in terms)
    error = rel * math.fsum(abs(t) for _, t in terms)
    ks = [k for k in range(2, 2 * K + 1, 2) if k > K]
    return ExperimentRecord(
        "expectation", {"K": K, "g": form_label(g)}, value, error,
        {"pairs": len(forms), "empty_weights": len(ks) - len(counts), "max_spot_residual": worst},
        terms)


# --------------------------------------------------------------------------
# moments of the symmetric-square family
# --------------------------------------------------------------------------

def _check_even(phi: MaassFormData) -> None:
    if not phi.is_even:
        raise ValueError("this moment needs an even Maass form")


def _precondition(ok: bool, message: str) -> bool:
    if not ok:
        warnings.warn(message, PreconditionWarning, stacklevel=3)
    return ok


def harmonic_moment1(K: int, phi: MaassFormData, window: Window | None = None,
                     threads: int = 1) -> ExperimentRecord:
    """sum_k W((k-1)/K) 2 pi^2/(k-1) sum_f L(1/2, sym^2 f x phi)/L(1, sym^2 f)."""
    _check_even(phi)
    window = window or default_window()
    a, b = window.support
    ks = [k for k in range(12, int(b * K) + 2, 2)
          if a < (k - 1) / K < b and dim_cusp_space(k) > 0]
    forms = [f for k in ks for f in hecke_eigenforms(k)]
    lvals = _pmap(lambda f: _quiet(L_half_rs, f, phi), forms, threads)
    terms, errs = [], []
    for f, lv in zip(forms, lvals):
        w = float(window.evaluate((f.weight - 1) / K))
        c = w * 2 * math.pi**2 / (f.weight - 1) / f.l1_sym2
        terms.append((form_label(f), c * lv.real))
        errs.append(abs(c) * lv.error)
    value = math.fsum(t for _, t in terms)
    return ExperimentRecord(
        "moment1_harmonic", {"K": K, "t_phi": phi.t_phi}, value, math.fsum(errs),
        {"weights": f"{ks[0]}..{ks[-1]}" if ks else "", "ratio_K": value / K}, tuple(terms))


def moment1_scan(K: int, phi: MaassFormData, harmonic: bool = False, threads: int = 1) -> ExperimentRecord:
    """sum_{K<k<=2K} sum_{f in H_k} L(1/2, sym^2 f x phi), with value/K^2 recorded.

    With ``harmonic`` the windowed, harmonically weighted first moment is
    added to the diagnostics.
    """
    _check_even(phi)
    in_regime = _precondition(phi.t_phi <= math.sqrt(K), f"t_phi = {phi.t_phi:g} exceeds sqrt(K)")
    forms = _forms(K)
    lvals = _pmap(lambda f: _quiet(L_half_rs, f, phi), forms, threads)
    terms = tuple((form_label(f), lv.real) for f, lv in zip(forms, lvals))
    value = math.fsum(t for _, t in terms)
    diag: dict[str, Any] = {
        "ratio_K2": value / K**2,
        "min_term": min((t for _, t in terms), default=0.0),
        "max_cutoff": max((lv.cutoff for lv in lvals), default=0),
        "in_regime": in_regime,
    }
    if harmonic:
        h = harmonic_moment1(K, phi, threads=threads)
        diag["M1"] = h.value
        diag["M1_error"] = h.error
    return ExperimentRecord("moment1", {"K": K, "t_phi": phi.t_phi}, value,
                            math.fsum(lv.error for lv in lvals), diag, terms)


def moment2_scan(K: int, t: float = 0.0, threads: int = 1) -> ExperimentRecord:
    """sum_{K<k<=2K} sum_{f in H_k} |L(1/2 + it, sym^2 f)|^2."""
    in_regime = _precondition(abs(t) <= math.sqrt(K), f"|t| = {abs(t):g} exceeds sqrt(K)")
    forms = _forms(K)
    lvals = _pmap(lambda f: _quiet(L_half_sym2, f, t), forms, threads)
    terms = tuple((form_label(f), abs(lv.value) ** 2) for f, lv in zip(forms, lvals))
    value = math.fsum(v for _, v in terms)
    error = math.fsum(2 * abs(lv.value) * lv.error + lv.error**2 for lv in lvals)
    return ExperimentRecord("moment2", {"K": K, "t": t}, value, error,
                            {"ratio_K2": value / K**2, "in_regime": in_regime}, terms)


def _even_integral(func: Callable[[float], float], T: float, panels: int, order: int = 8):
    nodes, weights = gauss_legendre_panels(0.0, T, panels, order)
    vals = np.array([func(float(t)) for t in nodes])
    return 2 * float(weights @ vals), nodes, vals


def sym2_t_moment(g: HeckeEigenform, T: float, panels: int | None = None) -> ExperimentRecord:
    """int_{-T}^{T} |L(1/2 + it, sym^2 g)|^2 dt (the integrand is even in t).

    The error estimate is the change from ``panels`` to 2 * ``panels``.
    """
    ell = g.weight
    in_regime = _precondition(T <= ell**0.6, f"T = {T:g} exceeds l^0.6")
    if panels is None:
        panels = max(2, math.ceil(T))

    def integrand(t):
        return abs(_quiet(L_half_sym2, g, t).value) ** 2

    coarse, _, _ = _even_integral(integrand, T, panels)
    fine, nodes, vals = _even_integral(integrand, T, 2 * panels)
    terms = tuple((f"t={t:.12f}", float(v)) for t, v in zip(nodes, vals))
    return ExperimentRecord("sym2_t_moment", {"g": form_label(g), "T": T}, fine, abs(fine - coarse),
                            {"ratio_l54": fine / ell**1.25, "panels": 2 * panels,
                             "in_regime": in_regime}, terms)


# --------------------------------------------------------------------------
# the spectral mixed-moment sum
# --------------------------------------------------------------------------

def _coverage(spectrum: Sequence[MaassFormData], T: float) -> dict[str, Any]:
    inside = [phi for phi in spectrum if phi.t_phi <= T]
    return {"t_range": T, "forms_in_range": len(inside),
            "even_in_range": sum(phi.is_even for phi in inside), "weyl_estimate": weyl_count(T),
            "max_t": max((phi.t_phi for phi in spectrum), default=0.0)}


def mixed_moment_sum(g: HeckeEigenform, spectrum: Sequence[MaassFormData],
                     threads: int = 1) -> ExperimentRecord:
    """sum_phi L(1/2, phi) L(1/2, sym^2 g x phi) exp(-t_phi^2 / l).

    Odd forms contribute zero (L(1/2, phi) vanishes) and are not evaluated.
    """
    ell = g.weight
    diag = _coverage(spectrum, ell ** (0.5 + SPECTRAL_EPS))
    if not spectrum:
        warnings.warn("empty Maass spectrum: mixed-moment sum is 0", RuntimeWarning, stacklevel=2)
        return ExperimentRecord("mixed_sum", {"g": form_label(g)}, 0.0, 0.0, diag, ())

    def term(phi):
        if not phi.is_even:
            return 0.0, 0.0
        a = L_half_maass(phi)
        b = _quiet(L_half_rs, g, phi)
        w = math.exp(-phi.t_phi**2 / ell)
        return w * a.real * b.real, w * (abs(a.real) * b.error + abs(b.real) * a.error)

    results = _pmap(term, list(spectrum), threads)
    terms = tuple((form_label(phi), v) for phi, (v, _) in zip(spectrum, results))
    value = math.fsum(v for _, v in terms)
    diag["ratio_l43"] = value / ell ** (4 / 3)
    return ExperimentRecord("mixed_sum", {"g": form_label(g)}, value,
                            math.fsum(e for _, e in results), diag, terms)


# --------------------------------------------------------------------------
# exponential sums of Maass coefficients
# --------------------------------------------------------------------------

def exp_sum_ratio(phi: MaassFormData, N: int, alphas: Iterable[float] | None = None,
                  grid: int = 512) -> ExperimentRecord:
    """max over alpha of |sum_{n<=N} lambda_phi(n) e(n alpha)| / (N t_phi)^{1/2}.

    ``alphas`` defaults to j/grid, j = 0..grid-1.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    lam = phi.lambdas(N)[1:]
    alphas = np.arange(grid) / grid if alphas is None else np.asarray(list(alphas), dtype=float)
    n = np.arange(1, N + 1)
    sums = np.empty(len(alphas), dtype=complex)
    chunk = max(1, 2_000_000 // N)
    for i in range(0, len(alphas), chunk):
        a = alphas[i:i + chunk]
        sums[i:i + chunk] = np.exp(2j * math.pi * np.outer(a, n)) @ lam
    scale = math.sqrt(N * phi.t_phi)
    ratios = np.abs(sums) / scale
    j = int(np.argmax(ratios))
    terms = tuple((f"alpha={a:.12f}", float(r)) for a, r in zip(alphas, ratios))
    return ExperimentRecord("expsum", {"t_phi": phi.t_phi, "N": N, "grid": len(alphas)},
                            float(ratios[j]), float(N * 1e-15 / scale),
                            {"argmax_alpha": float(alphas[j]), "max_abs_sum": float(abs(sums[j]))},
                            terms)


# --------------------------------------------------------------------------
# triple products
# --------------------------------------------------------------------------

def _triple_values(f: HeckeEigenform, g: HeckeEigenform) -> list[tuple[HeckeEigenform, float, float]]:
    """(h, Parseval contribution, extracted L(1/2, f x g x h)) for h in H_{k+l}."""
    _, contributions = geometry.parseval_spectral(f, g, terms=True)
    w = f.weight + g.weight
    outer = 2 * f.l1_sym2 * g.l1_sym2 / ZETA2
    return [(h, p, p * (w - 1) / (2 * math.pi**2) * h.l1_sym2 * outer)
            for h, p in zip(hecke_eigenforms(w), contributions)]


def extract_triple_lvalue(f: HeckeEigenform, g: HeckeEigenform, h: HeckeEigenform) -> float:
    """L(1/2, f x g x h) read off from the Parseval expansion of f g.

    This inverts the identity expressing <|F|^2, |G|^2>/vol as a sum of
    L(1/2, f x g x h)/L(1, sym^2 h) term by term; it is definitional and
    nonnegative by construction.
    """
    if h.weight != f.weight + g.weight:
        raise ValueError(f"h has weight {h.weight}, expected {f.weight + g.weight}")
    for other, _, value in _triple_values(f, g):
        if other.index == h.index:
            return value
    raise ValueError("h is not in the Hecke basis of its weight")


def first_moment_identity(f: HeckeEigenform, g: HeckeEigenform) -> ExperimentRecord:
    """2 pi^2/(k+l-1) sum_h L(1/2, f x g x h)/L(1, sym^2 h) against
    2 L(1, sym^2 f) L(1, sym^2 g)/zeta(2); value is their ratio, which equals
    the mixed moment <|F|^2, |G|^2>/vol."""
    w = f.weight + g.weight
    rows = _triple_values(f, g)
    terms = tuple((form_label(h), 2 * math.pi**2 / (w - 1) * v / h.l1_sym2) for h, _, v in rows)
    lhs = math.fsum(t for _, t in terms)
    rhs = 2 * f.l1_sym2 * g.l1_sym2 / ZETA2
    moment = math.fsum(p for _, p, _ in rows)
    return ExperimentRecord("first_moment", {"f": form_label(f), "g": form_label(g)}, lhs / rhs,
                            abs(lhs / rhs - moment),
                            {"lhs": lhs, "rhs": rhs, "mixed_moment": moment,
                             "min_triple": min(v for _, _, v in rows)}, terms)


def nonvanishing_scan(pairs: Iterable[tuple[int, int]] | None = None,
                      threshold: float = 1e-10) -> list[ExperimentRecord]:
    """For each (k, l) and each f in H_k, g in H_l: the largest extracted
    L(1/2, f x g x h) over h in H_{k+l}; value is the smallest such maximum,
    and ``all_nonvanishing`` says whether it exceeds ``threshold``."""
    if pairs is None:
        pairs = [(k, ell) for k in DESK_K for ell in DESK_L]
    records = []
    for k, ell in pairs:
        if dim_cusp_space(k) == 0 or dim_cusp_space(ell) == 0:
            continue
        terms = []
        for f in hecke_eigenforms(k):
            for g in hecke_eigenforms(ell):
                best = max(v for _, _, v in _triple_values(f, g))
                terms.append((f"{form_label(f)}x{form_label(g)}", best))
        worst = min(v for _, v in terms)
        records.append(ExperimentRecord(
            "nonvanish", {"k": k, "l": ell}, worst, 0.0,
            {"all_nonvanishing": worst > threshold, "threshold": threshold}, tuple(terms)))
    return records


# --------------------------------------------------------------------------
# the cuspidal and Eisenstein bounding quantities
# --------------------------------------------------------------------------

def sc_se_eval(K: int, g: HeckeEigenform, spectrum: Sequence[MaassFormData],
               panels: int | None = None, threads: int = 1) -> tuple[ExperimentRecord, ExperimentRecord]:
    """The cuspidal and Eisenstein quantities that bound the variance.

    Sc = 1/(K^3 l) sum_k sum_f |sum_phi L(1/2,phi) L(1/2,sym^2 f x phi)^{1/2}
         L(1/2,sym^2 g x phi)^{1/2} / (L(1,sym^2 f) L(1,sym^2 g) L(1,sym^2 phi))
         exp(-t_phi^2/2l)|^2
    Se = 1/(K^3 l) sum_k sum_f |int_{|t|<=T} |zeta(1/2+it)|^2
         |L(1/2+it,sym^2 f) L(1/2+it,sym^2 g)| / (L(1,sym^2 f) L(1,sym^2 g) |zeta(1+2it)|^2) dt|^2
    with T = l^{1/2 + eps}.  The whole supplied spectrum enters Sc (the
    Gaussian weight does the truncation); coverage is recorded.
    """
    ell = g.weight
    T = ell ** (0.5 + SPECTRAL_EPS)
    forms = _forms(K)
    norm = 1 / (K**3 * ell)
    params = {"K": K, "g": form_label(g)}

    # cuspidal part: only even forms have L(1/2, phi) != 0
    even = [phi for phi in spectrum if phi.is_even]
    phi_data = []
    for phi in even:
        a = L_half_maass(phi).real
        b = L_one_sym2_maass(phi).real
        c = _quiet(L_half_rs, g, phi).real
        phi_data.append((phi, a * math.sqrt(max(c, 0.0)) / b * math.exp(-phi.t_phi**2 / (2 * ell))))

    def cusp_term(f):
        inner = math.fsum(w * math.sqrt(max(_quiet(L_half_rs, f, phi).real, 0.0))
                          for phi, w in phi_data)
        return (inner / (f.l1_sym2 * g.l1_sym2)) ** 2

    cusp = _pmap(cusp_term, forms, threads)
    c_terms = tuple((form_label(f), norm * v) for f, v in zip(forms, cusp))
    sc_value = math.fsum(v for _, v in c_terms)
    sc = ExperimentRecord("Sc", params, sc_value, 1e-9 * sc_value,
                          {**_coverage(spectrum, T), "ratio_l43_K": sc_value / (ell ** (4 / 3) / K)},
                          c_terms)

    # Eisenstein part
    if panels is None:
        panels = max(2, math.ceil(T))

    # the g-side of the integrand is shared by every f
    rules = {}
    for n in (panels, 2 * panels):
        nodes, weights = gauss_legendre_panels(0.0, T, n, 8)
        g_side = np.array([eis_weight(t) * abs(_quiet(L_half_sym2, g, t).value) for t in nodes])
        rules[n] = (nodes, weights * g_side)

    def integrate(f, n):
        nodes, weights = rules[n]
        vals = np.array([abs(_quiet(L_half_sym2, f, t).value) for t in nodes])
        return 2 * float(weights @ vals) / (f.l1_sym2 * g.l1_sym2)

    def eis_term(f):
        fine, coarse = integrate(f, 2 * panels), integrate(f, panels)
        return fine**2, abs(fine**2 - coarse**2)

    eis = _pmap(eis_term, forms, threads)
    e_terms = tuple((form_label(f), norm * v) for f, (v, _) in zip(forms, eis))
    se_value = math.fsum(v for _, v in e_terms)
    se = ExperimentRecord("Se", params, se_value, norm * math.fsum(e for _, e in eis),
                          {"T": T, "panels": 2 * panels, "ratio_l34_K": se_value / (ell**0.75 / K)},
                          e_terms)
    return sc, se


def eis_weight(t: float) -> float:
    """|zeta(1/2+it)|^2 / |zeta(1+2it)|^2, continued by its limit 0 at t = 0."""
    if t == 0:
        return 0.0
    return abs(zeta_line(0.5 + 1j * t)) ** 2 / abs(zeta_line(1 + 2j * t)) ** 2


def se_integrand(f: HeckeEigenform, g: HeckeEigenform, t: float) -> float:
    """The Eisenstein integrand at one t (for standalone re-evaluation)."""
    return (eis_weight(t) * abs(_quiet(L_half_sym2, f, t).value) * abs(_quiet(L_half_sym2, g, t).value)
            / (f.l1_sym2 * g.l1_sym2))


# --------------------------------------------------------------------------
# CSV output
# --------------------------------------------------------------------------

def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _pairs(mapping: Mapping[str, Any]) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(mapping.items()))


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    """Long format, one record per row: experiment,params,value,error,diagnostics.

    ``params`` and ``diagnostics`` are ``key=value`` lists joined by ``;``
    with sorted keys; floats use their shortest round-trip repr.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["experiment", "params", "value", "error", "diagnostics"])
    for r in records:
        writer.writerow([r.experiment, _pairs(r.params), _fmt(r.value), _fmt(r.error),
                         _pairs(r.diagnostics)])
    return buf.getvalue()


def terms_to_csv(record: ExperimentRecord) -> str:
    """The per-term breakdown of one record: experiment,params,index,label,value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["experiment", "params", "index", "label", "value"])
    params = _pairs(record.params)
    for i, (label, value) in enumerate(record.terms):
        writer.writerow([record.experiment, params, i, label, _fmt(value)])
    return buf.getvalue()
