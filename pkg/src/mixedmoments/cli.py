"""Command-line interface.

Every subcommand writes CSV, to stdout or to ``<out>/<subcommand>.csv`` when
``--out`` is given.  Exit status: 0 success, 1 computation error (or a
failed check for the checking subcommands), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

from . import experiments, geometry, lfun, modforms, trace
from .errors import MixedMomentsError
from .maass import MaassFormData, ingest_maass

EXPERIMENT_COLUMNS = "experiment,params,value,error,diagnostics"


class UsageError(Exception):
    """Bad configuration or arguments (exit status 2)."""


@dataclass(frozen=True)
class Config:
    precision: int = modforms.DEFAULT_PRECISION_BITS
    damping: float = lfun.DEFAULT_DAMPING
    cutoff_factor: float = 1.0
    parseval_tol: float = 1e-6
    bessel_ratio: float = 10.0
    k_grid: tuple[int, ...] = experiments.DESK_K
    l_grid: tuple[int, ...] = experiments.DESK_L
    maass: tuple[str, ...] = ()
    out: str | None = None
    threads: int = 1

    def validate(self) -> "Config":
        for name in ("damping", "cutoff_factor", "parseval_tol", "bessel_ratio"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if self.precision < 53:
            raise UsageError("precision must be at least 53 bits")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        if not self.k_grid or not self.l_grid:
            raise UsageError("grid ranges must be nonempty")
        for path in self.maass:
            if not Path(path).is_file():
                raise UsageError(f"Maass data file not found: {path}")
        return self


def _parse_value(name: str, text: str):
    kinds = {f.name: f.type for f in fields(Config)}
    kind = kinds[name]
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind.startswith("tuple[int"):
            return tuple(int(x) for x in text.replace(",", " ").split())
        if kind.startswith("tuple[str"):
            return tuple(text.replace(",", " ").split())
        return text or None
    except ValueError as exc:
        raise UsageError(f"bad value for {name}: {text!r}") from exc


def load_config(path: str | Path | None) -> Config:
    """Read ``key = value`` lines (``#`` comments) into a Config."""
    cfg = Config()
    if path is None:
        return cfg
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    known = {f.name for f in fields(Config)}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise UsageError(f"{path}:{lineno}: expected 'key = value' with a known key")
        updates[key] = _parse_value(key, value.strip())
    return replace(cfg, **updates)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _form(weight: int, index: int) -> modforms.HeckeEigenform:
    forms = modforms.hecke_eigenforms(weight)
    if not 0 <= index < len(forms):
        raise UsageError(f"weight {weight} has {len(forms)} eigenforms; index {index} is out of range")
    return forms[index]


def _spectrum(cfg: Config, files: Sequence[str] | None) -> list[MaassFormData]:
    paths = list(files or cfg.maass)
    if not paths:
        raise UsageError("no Maass data: pass --maass FILE or set 'maass' in the config")
    forms = []
    for p in paths:
        if not Path(p).is_file():
            raise UsageError(f"Maass data file not found: {p}")
        forms.extend(ingest_maass(p))
    return sorted(forms, key=lambda phi: (phi.t_phi, phi.parity))


def _phi(cfg: Config, args) -> MaassFormData:
    spectrum = [phi for phi in _spectrum(cfg, args.maass) if phi.is_even or not args.even_only]
    if not 0 <= args.phi_index < len(spectrum):
        raise UsageError(f"{len(spectrum)} Maass forms available; index {args.phi_index} is out of range")
    return spectrum[args.phi_index]


def _pairs(text: str) -> list[tuple[int, int]]:
    try:
        return [tuple(int(x) for x in item.split(":")) for item in text.split(",") if item]
    except ValueError as exc:
        raise UsageError(f"pairs must look like 12:12,12:16 (got {text!r})") from exc


# --------------------------------------------------------------------------
# subcommands: each returns (csv text, ok flag)
# --------------------------------------------------------------------------

def cmd_eigenforms(cfg, args):
    forms = modforms.hecke_eigenforms(args.weight)
    rows = [(args.weight, f.index, n, f.lam(n)) for f in forms for n in range(1, args.terms + 1)]
    return _csv(["weight", "form", "n", "lambda"], rows), True


def cmd_ptf_check(cfg, args):
    reports = [trace.petersson_check(k, m, n, args.c_max)
               for k in range(args.kmin, args.kmax + 1, 2)
               for m in range(1, args.mnmax + 1) for n in range(m, args.mnmax + 1)]
    return trace.reports_to_csv(reports), all(r.passed for r in reports)


def cmd_bessel_avg(cfg, args):
    grid = []
    for K in args.K:
        xs = args.x or [K / 10, K, K * K / 10, K * K / 2]
        grid.extend((K, x) for x in xs)
    rows, ok = [], True
    for K, x in grid:
        b = trace.bessel_average(K, x)
        ok &= b.ratio <= cfg.bessel_ratio
        rows.append((float(K), float(x), b.lhs, b.main_term, b.error_budget, b.ratio))
    return _csv(["K", "x", "lhs", "main_term", "error_budget", "ratio"], rows), ok


def cmd_afe(cfg, args):
    kernels = {
        "v3": lambda y: lfun.kernel_v3(y, args.t, args.weight, damping=cfg.damping),
        "v3minus": lambda y: lfun.kernel_v3_minus(y, args.t, args.weight, damping=cfg.damping),
        "v6": lambda y: lfun.kernel_v6(y, args.weight, args.t, damping=cfg.damping),
        "v6-stirling": lambda y: lfun.kernel_v6_stirling(y, args.weight, args.t, damping=cfg.damping),
    }
    rows = []
    for y in args.y:
        val = complex(kernels[args.kernel](y))
        rows.append((args.kernel, args.weight, float(args.t), float(y), val.real, val.imag))
    return _csv(["kernel", "k", "t", "y", "value_re", "value_im"], rows), True


def cmd_lvalue(cfg, args):
    opts = dict(damping=cfg.damping, cutoff_factor=cfg.cutoff_factor)
    if args.kind in ("sym2", "sym2-one", "rs"):
        f = _form(args.weight, args.index)
    if args.kind == "sym2":
        res = lfun.L_half_sym2(f, args.t, **opts)
    elif args.kind == "sym2-one":
        res = lfun.L_one_sym2(f, **opts)
    elif args.kind == "rs":
        res = lfun.L_half_rs(f, _phi(cfg, args), **opts)
    elif args.kind == "maass":
        res = lfun.L_half_maass(_phi(cfg, args), **opts)
    else:
        res = lfun.L_one_sym2_maass(_phi(cfg, args), **opts)
    value = complex(res.value)
    row = (res.description, value.real, value.imag, res.error, res.cutoff)
    return _csv(["description", "value_re", "value_im", "error", "cutoff"], [row]), True


def _mixed_rows(pairs, cfg):
    rows, ok = [], True
    for k, ell in pairs:
        for f in modforms.hecke_eigenforms(k):
            for g in modforms.hecke_eigenforms(ell):
                geo, err = geometry.mixed_moment_geometric(f, g, with_error=True)
                spec = geometry.parseval_spectral(f, g)
                resid = abs(geo - spec) / abs(spec)
                ok &= resid < cfg.parseval_tol
                rows.append((k, ell, experiments.form_label(f), experiments.form_label(g),
                             geo, err, spec, resid))
    header = ["k", "l", "f", "g", "geometric", "geometric_error", "parseval", "residual"]
    return _csv(header, rows), ok


def cmd_mixed(cfg, args):
    f, g = _form(args.k, args.f_index), _form(args.l, args.g_index)
    geo, err = geometry.mixed_moment_geometric(f, g, with_error=True)
    spec = geometry.parseval_spectral(f, g)
    row = (args.k, args.l, experiments.form_label(f), experiments.form_label(g), geo, err, spec,
           abs(geo - spec) / abs(spec))
    header = ["k", "l", "f", "g", "geometric", "geometric_error", "parseval", "residual"]
    return _csv(header, [row]), True


def cmd_parseval_check(cfg, args):
    return _mixed_rows(_pairs(args.pairs), cfg)


def cmd_variance(cfg, args):
    g = _form(args.ell, args.g_index)
    recs = [experiments.variance_stat(K, g, threads=cfg.threads) for K in args.K]
    return experiments.records_to_csv(recs), True


def cmd_expectation(cfg, args):
    g = _form(args.ell, args.g_index)
    recs = [experiments.expectation_stat(K, g, threads=cfg.threads) for K in args.K]
    return experiments.records_to_csv(recs), True


def cmd_moment1(cfg, args):
    phi = _phi(cfg, args)
    recs = [experiments.moment1_scan(K, phi, harmonic=args.harmonic, threads=cfg.threads)
            for K in args.K]
    return experiments.records_to_csv(recs), True


def cmd_moment2(cfg, args):
    recs = [experiments.moment2_scan(K, t, threads=cfg.threads) for K in args.K for t in args.t]
    return experiments.records_to_csv(recs), True


def cmd_mixed_sum(cfg, args):
    g = _form(args.ell, args.g_index)
    rec = experiments.mixed_moment_sum(g, _spectrum(cfg, args.maass), threads=cfg.threads)
    return experiments.records_to_csv([rec]), True


def cmd_expsum(cfg, args):
    phi = _phi(cfg, args)
    recs = [experiments.exp_sum_ratio(phi, N, grid=args.grid) for N in args.N]
    return experiments.records_to_csv(recs), True


def cmd_scse(cfg, args):
    g = _form(args.ell, args.g_index)
    spectrum = _spectrum(cfg, args.maass)
    recs = []
    for K in args.K:
        recs.extend(experiments.sc_se_eval(K, g, spectrum, threads=cfg.threads))
    return experiments.records_to_csv(recs), True


def cmd_nonvanish(cfg, args):
    pairs = _pairs(args.pairs) if args.pairs else [(k, l) for k in cfg.k_grid for l in cfg.l_grid]
    recs = experiments.nonvanishing_scan(pairs)
    return experiments.records_to_csv(recs), all(r.diagnostics["all_nonvanishing"] for r in recs)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--config", metavar="PATH", help="'key = value' file; flags override it")
    g.add_argument("--out", metavar="DIR", help="write <DIR>/<subcommand>.csv instead of stdout")
    g.add_argument("--threads", type=int, metavar="N", help="worker threads for scans")
    g.add_argument("--precision", type=int, metavar="BITS", help="eigenvector precision in bits")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="mixedmoments", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_, columns):
        p = sub.add_parser(name, parents=[common], help=help_,
                           description=f"{help_}\n\nCSV columns: {columns}",
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    def maass_opts(p, index=True):
        p.add_argument("--maass", action="append", metavar="FILE", help="Maass data file (repeatable)")
        if index:
            p.add_argument("--phi-index", type=int, default=0,
                           help="index into the spectrum sorted by t_phi")
            p.add_argument("--even-only", action=argparse.BooleanOptionalAction, default=True,
                           help="index among even forms only (default)")

    p = add("eigenforms", cmd_eigenforms, "Hecke eigenvalues lambda_f(n) of S_k", "weight,form,n,lambda")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--terms", type=int, default=10)

    p = add("ptf-check", cmd_ptf_check, "Petersson formula residuals (exit 1 if any check fails)",
            "k,m,n,lhs,rhs,residual,tail_bound")
    p.add_argument("--kmin", type=int, default=12)
    p.add_argument("--kmax", type=int, default=30)
    p.add_argument("--mnmax", type=int, default=10)
    p.add_argument("--c-max", type=int, default=None, help="Kloosterman cutoff (default: tail < 1e-15)")

    p = add("bessel-avg", cmd_bessel_avg, "weight-averaged J-Bessel sum against its main term",
            "K,x,lhs,main_term,error_budget,ratio")
    p.add_argument("--K", type=float, nargs="+", default=[50.0, 100.0])
    p.add_argument("--x", type=float, nargs="+", default=None, help="default K/10, K, K^2/10, K^2/2")

    p = add("afe", cmd_afe, "approximate-functional-equation kernels", "kernel,k,t,y,value_re,value_im")
    p.add_argument("--kernel", choices=["v3", "v3minus", "v6", "v6-stirling"], default="v3")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--t", type=float, default=0.0, help="t for V3, t_phi for V6")
    p.add_argument("--y", type=float, nargs="+", required=True)

    p = add("lvalue", cmd_lvalue, "one L-value", "description,value_re,value_im,error,cutoff")
    p.add_argument("--kind", choices=["sym2", "sym2-one", "rs", "maass", "maass-sym2-one"],
                   default="sym2")
    p.add_argument("--weight", type=int, default=12)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--t", type=float, default=0.0)
    maass_opts(p)

    header = "k,l,f,g,geometric,geometric_error,parseval,residual"
    p = add("mixed", cmd_mixed, "mixed moment by quadrature and by Parseval", header)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--f-index", type=int, default=0)
    p.add_argument("--g-index", type=int, default=0)

    p = add("parseval-check", cmd_parseval_check,
            "quadrature vs Parseval on all form pairs (exit 1 above tolerance)", header)
    p.add_argument("--pairs", default="12:12,12:16,16:16,12:24")

    for name, func, help_ in [("variance", cmd_variance, "variance of the mixed moment"),
                              ("expectation", cmd_expectation, "average of the mixed moment")]:
        p = add(name, func, help_, EXPERIMENT_COLUMNS)
        p.add_argument("--K", type=int, nargs="+", default=[12, 24])
        p.add_argument("--ell", type=int, default=12)
        p.add_argument("--g-index", type=int, default=0)

    p = add("moment1", cmd_moment1, "first moment of L(1/2, sym^2 f x phi)", EXPERIMENT_COLUMNS)
    p.add_argument("--K", type=int, nargs="+", default=[12])
    p.add_argument("--harmonic", action="store_true", help="also the windowed harmonic moment")
    maass_opts(p)

    p = add("moment2", cmd_moment2, "second moment of L(1/2+it, sym^2 f)", EXPERIMENT_COLUMNS)
    p.add_argument("--K", type=int, nargs="+", default=[12])
    p.add_argument("--t", type=float, nargs="+", default=[0.0])

    p = add("mixed-sum", cmd_mixed_sum, "spectral sum of L(1/2,phi) L(1/2,sym^2 g x phi)",
            EXPERIMENT_COLUMNS)
    p.add_argument("--ell", type=int, default=12)
    p.add_argument("--g-index", type=int, default=0)
    maass_opts(p, index=False)

    p = add("expsum", cmd_expsum, "exponential sums of Maass coefficients", EXPERIMENT_COLUMNS)
    p.add_argument("--N", type=int, nargs="+", default=[100, 1000])
    p.add_argument("--grid", type=int, default=512)
    maass_opts(p)

    p = add("scse", cmd_scse, "cuspidal and Eisenstein bounding quantities", EXPERIMENT_COLUMNS)
    p.add_argument("--K", type=int, nargs="+", default=[12])
    p.add_argument("--ell", type=int, default=12)
    p.add_argument("--g-index", type=int, default=0)
    maass_opts(p, index=False)

    p = add("nonvanish", cmd_nonvanish, "largest extracted triple value per form pair "
            "(exit 1 if some pair has none above 1e-10)", EXPERIMENT_COLUMNS)
    p.add_argument("--pairs", default=None, help="k:l list; default the config grids")
    return parser


def _resolve(args) -> Config:
    cfg = load_config(args.config)
    overrides = {name: getattr(args, name) for name in ("out", "threads", "precision")
                 if getattr(args, name, None) is not None}
    return replace(cfg, **overrides).validate()


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve(args)
    except UsageError as exc:
        print(f"mixedmoments: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    previous = modforms.DEFAULT_PRECISION_BITS
    modforms.DEFAULT_PRECISION_BITS = cfg.precision
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", lfun.PreconditionWarning)
            text, ok = args.func(cfg, args)
    except UsageError as exc:
        print(f"mixedmoments: error: {exc}", file=sys.stderr)
        return 2
    except (MixedMomentsError, ArithmeticError, ValueError) as exc:
        print(f"mixedmoments: computation failed: {exc}", file=sys.stderr)
        return 1
    finally:
        modforms.DEFAULT_PRECISION_BITS = previous

    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.csv").write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
