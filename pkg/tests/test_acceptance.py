"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""

import math
import subprocess
import sys
import warnings
from pathlib import Path

import pytest

from conftest import ACCEPTANCE, DATA
from mixedmoments import geometry
from mixedmoments.arith import kloosterman
from mixedmoments.experiments import (DESK_K, DESK_L, expectation_stat, extract_triple_lvalue,
                                      nonvanishing_scan, records_to_csv, variance_stat)
from mixedmoments.lfun import (DEFAULT_DAMPING, L_half_maass, L_half_rs, kernel_v3, kernel_v6)
from mixedmoments.modforms import dim_cusp_space, hecke_eigenforms
from mixedmoments.numtheory import divisors, num_divisors, primes_upto
from mixedmoments.trace import bessel_average, petersson_check

pytestmark = pytest.mark.usefixtures("quiet")


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = ("PASS" if ok else "FAIL", detail)
    assert ok, f"criterion {number}: {detail}"


def test_criterion_01_petersson():
    worst, failures, count = 0.0, [], 0
    for k in range(12, 31, 2):
        for m in range(1, 11):
            for n in range(1, 11):
                rep = petersson_check(k, m, n)
                count += 1
                worst = max(worst, rep.residual)
                if rep.residual > rep.tail_bound + 1e-8:
                    failures.append((k, m, n))
    record(1, not failures, f"{count} checks, worst residual {worst:.2e}, failures {failures[:3]}")


def test_criterion_02_parseval():
    worst, rows = 0.0, 0
    for k, ell in ((12, 12), (12, 16), (16, 16), (12, 24)):
        for f in hecke_eigenforms(k):
            for g in hecke_eigenforms(ell):
                geo = geometry.mixed_moment_geometric(f, g)
                spec = geometry.parseval_spectral(f, g)
                worst = max(worst, abs(geo - spec) / spec)
                rows += 1
    record(2, worst < 1e-6, f"{rows} form pairs, worst relative residual {worst:.2e}")


def test_criterion_03_normalization():
    worst = 0.0
    for k in range(12, 41, 2):
        if dim_cusp_space(k) == 0:
            continue
        for f in hecke_eigenforms(k):
            worst = max(worst, abs(geometry.normalized_norm(f) - geometry.VOLUME))
    record(3, worst < 1e-6, f"max |int |F|^2 - pi/3| over k <= 40: {worst:.2e}")


def test_criterion_04_kernels():
    shift = 0.0
    for k in (12, 20, 30):
        for t in (0.0, 1.5):
            for y in (0.1, 1.0, float(k), 100.0):
                a = kernel_v3(y, t, k, sigma=0.3)
                b = kernel_v3(y, t, k, sigma=0.7)
                shift = max(shift, abs(a - b))
        for y in (0.1, float(k), 1e3):
            shift = max(shift, abs(kernel_v6(y, k, 2.0, sigma=0.3) - kernel_v6(y, k, 2.0, sigma=0.7)))
    near_zero = abs(kernel_v6(1e-6, 12, 13.78) - 1)
    v6_decay = max(abs(kernel_v6(10 * k * k * max(t, 1.0), k, t))
                   for k, t in ((12, 13.78), (24, 4.0), (40, 6.0), (40, 0.5)))
    v3_decay = max(abs(kernel_v3(k**1.2 * (1 + t), t, k, damping=DEFAULT_DAMPING))
                   for k, t in ((12, 0.0), (24, 2.0), (40, 3.0)))
    v3_unit = abs(kernel_v3(12**1.2, 0.0, 12))
    ok = shift < 1e-9 and near_zero < 1e-4 and v6_decay < 1e-6 and v3_decay < 1e-6
    record(4, ok, f"shift {shift:.1e}, |V6(1e-6)-1| {near_zero:.1e}, V6 decay {v6_decay:.1e}, "
                  f"V3 decay {v3_decay:.1e} (exp(s^2/16)); exp(s^2) V3 at k^1.2: {v3_unit:.1e}")


def test_criterion_05_bessel_average():
    results = []
    for K in (50, 100):
        for x in (K / 10, K, K * K / 10, K * K / 2):
            avg = bessel_average(K, x)
            results.append((K, x, avg.ratio))
    bad = [(K, x, round(r, 2)) for K, x, r in results if r > 10]
    worst = max(results, key=lambda r: r[2])
    record(5, not bad, f"worst |lhs-main|/budget = {worst[2]:.2f} at K={worst[0]}, x={worst[1]:g}; "
                       f"over 10: {bad}")


def test_criterion_06_properties():
    hecke = 0.0
    deligne = 0.0
    for k in range(12, 62, 2):
        if dim_cusp_space(k) == 0:
            continue
        for f in hecke_eigenforms(k):
            for m in range(1, 41):
                for n in range(m, 41):
                    rhs = math.fsum(f.lam(m * n // (d * d)) for d in divisors(math.gcd(m, n)))
                    hecke = max(hecke, abs(f.lam(m) * f.lam(n) - rhs))
            deligne = max(deligne, max(abs(f.lam(p)) for p in primes_upto(200)))
    weil_excess = -math.inf
    for c in range(1, 501):
        dc = num_divisors(c)
        for m in range(1, 21):
            for n in range(m, 21):
                bound = dc * math.sqrt(c * math.gcd(math.gcd(m, n), c))
                weil_excess = max(weil_excess, abs(kloosterman(m, n, c)) - bound)
    ok = hecke < 1e-12 and deligne <= 2 + 1e-10 and weil_excess <= 1e-9
    record(6, ok, f"Hecke residual {hecke:.1e}, max |lambda(p)| {deligne:.6f}, "
                  f"max(|S| - Weil) {weil_excess:.2f}")


def test_criterion_07_nonnegativity(even_maass):
    values = []
    for k in (12, 16, 20, 24):
        for f in hecke_eigenforms(k):
            for phi in even_maass:
                values.append(("rs", L_half_rs(f, phi).real))
    for phi in even_maass:
        values.append(("maass", L_half_maass(phi).real))
    for k in DESK_K:
        for ell in DESK_L:
            for f in hecke_eigenforms(k):
                for g in hecke_eigenforms(ell):
                    for h in hecke_eigenforms(k + ell):
                        values.append(("triple", extract_triple_lvalue(f, g, h)))
    low = min(values, key=lambda v: v[1])
    record(7, low[1] >= -1e-6, f"{len(values)} central values, minimum {low[1]:.3e} ({low[0]})")


def test_criterion_08_nonvanishing():
    records = nonvanishing_scan([(k, ell) for k in DESK_K for ell in DESK_L], threshold=1e-10)
    worst = min(records, key=lambda r: r.value)
    ok = all(r.diagnostics["all_nonvanishing"] for r in records) and len(records) == len(DESK_K) * len(DESK_L)
    record(8, ok, f"{len(records)} (k,l) pairs; smallest max-over-h triple value {worst.value:.3e} "
                  f"at {dict(worst.params)}")


def test_criterion_09_trends(delta, tmp_path):
    var = [variance_stat(K, delta, spot_checks=0) for K in (12, 24)]
    exp = [expectation_stat(K, delta, spot_checks=0) for K in (12, 24)]
    (tmp_path / "trends.csv").write_text(records_to_csv(var + exp))
    var_ok = var[1].value < var[0].value
    exp_ok = abs(exp[1].value - 1) < abs(exp[0].value - 1)
    detail = (f"variance {var[0].value:.6f} -> {var[1].value:.6f}; "
              f"|E-1| {abs(exp[0].value - 1):.5f} -> {abs(exp[1].value - 1):.5f}")
    if var_ok and exp_ok:
        ACCEPTANCE[9] = ("PASS", detail)
    else:
        ACCEPTANCE[9] = ("WARN", detail)
        warnings.warn(f"trend criterion not met: {detail}", UserWarning)


def _cli_run(out_dir: Path) -> None:
    commands = [
        ["eigenforms", "--weight", "24", "--terms", "20"],
        ["ptf-check", "--kmin", "12", "--kmax", "16", "--mnmax", "4"],
        ["variance", "--K", "12"],
        ["nonvanish", "--pairs", "12:12,12:16,16:20"],
        ["expsum", "--maass", str(DATA / "maass_even.txt"), "--N", "200", "--grid", "64"],
        ["mixed-sum", "--maass", str(DATA / "maass_even.txt"), "--maass", str(DATA / "maass_odd.txt")],
    ]
    for cmd in commands:
        subprocess.run([sys.executable, "-m", "mixedmoments.cli", *cmd, "--out", str(out_dir)],
                       check=True, capture_output=True)


def test_criterion_10_determinism(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    _cli_run(first)
    _cli_run(second)
    names = sorted(p.name for p in first.iterdir())
    same = names == sorted(p.name for p in second.iterdir()) and all(
        (first / n).read_bytes() == (second / n).read_bytes() for n in names)
    record(10, same and len(names) == 6, f"{len(names)} CSV files compared byte for byte")
