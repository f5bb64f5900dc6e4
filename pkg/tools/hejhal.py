"""Generate Hecke-Maass cusp form data for SL2(Z) by Hejhal's method.

Not part of the installed package: the package only ingests data files.
This script produces them when no published table is at hand.

    python tools/hejhal.py --rmin 13 --rmax 23 --parity even --terms 20000 \
        --out data/maass_even.txt

Outline:
  1. K~(x) = e^{pi R/2} K_{iR}(x) on [x_lo, x_hi] by integrating the Bessel
     ODE backwards from mpmath start values at x_hi (the decaying solution
     is the stable direction).
  2. For a trial R, the classical linear system on a horocycle below the
     fundamental domain gives c_2..c_M (c_1 = 1).  Eigenvalues are the R
     where two horocycle heights give the same c_2; located by a scan and
     refined by the secant method.
  3. Higher coefficients by Fourier inversion of phi on lower horocycles,
     phi itself evaluated at the pulled-back points from the first M
     coefficients.  Each n is read from the level where |K~(2 pi n Y)| is
     largest.
  4. The table written out is the multiplicative completion of the prime
     values (lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1})),
     the Hecke residual of the raw values is recorded in the header.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

SQRT3_2 = math.sqrt(3) / 2


class KTilde:
    """x -> e^{pi R/2} K_{iR}(x) on [x_lo, x_hi], vectorised."""

    def __init__(self, R: float, x_lo: float, x_hi: float | None = None):
        self.R = R
        x_hi = x_hi or (R + 70.0)
        mpmath.mp.dps = 30
        scale = mpmath.exp(mpmath.pi * R / 2)
        k0 = mpmath.besselk(1j * R, x_hi) * scale
        dk0 = mpmath.diff(lambda x: mpmath.besselk(1j * R, x), x_hi) * scale
        y0 = [float(mpmath.re(k0)), float(mpmath.re(dk0))]

        def rhs(x, y):
            return [y[1], -y[1] / x + (1 - (R / x) ** 2) * y[0]]

        sol = solve_ivp(rhs, (x_hi, x_lo), y0, method="DOP853", rtol=1e-13, atol=1e-300,
                        dense_output=True)
        if not sol.success:
            raise RuntimeError(sol.message)
        self.sol = sol.sol
        self.x_lo, self.x_hi = x_lo, x_hi

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        inside = x <= self.x_hi
        if np.any(x[inside] < self.x_lo * (1 - 1e-12)):
            raise ValueError("K~ requested below its table range")
        if np.any(inside):
            out[inside] = self.sol(np.clip(x[inside], self.x_lo, self.x_hi))[0]
        return out


def pullback(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = x.copy()
    y = y.copy()
    for _ in range(10000):
        x -= np.round(x)
        r2 = x * x + y * y
        move = r2 < 1 - 1e-15
        if not np.any(move):
            return x, y
        x[move], y[move] = -x[move] / r2[move], y[move] / r2[move]
    raise RuntimeError("pullback did not terminate")


def _trig(parity: str):
    return np.cos if parity == "even" else np.sin


def phi_values(coeffs: np.ndarray, kt: KTilde, xs: np.ndarray, ys: np.ndarray, parity: str,
               chunk: int = 200000) -> np.ndarray:
    """sum_{n>=1} c_n sqrt(y) K~(2 pi n y) trig(2 pi n x), coeffs[0] = c_1."""
    trig = _trig(parity)
    out = np.empty(len(xs))
    for lo in range(0, len(xs), chunk):
        x = xs[lo:lo + chunk]
        y = ys[lo:lo + chunk]
        acc = np.zeros(len(x))
        for n, c in enumerate(coeffs, 1):
            acc += c * kt(2 * np.pi * n * y) * trig(2 * np.pi * n * x)
        out[lo:lo + chunk] = np.sqrt(y) * acc
    return out


def solve_first(R: float, Y: float, M: int, parity: str, kt: KTilde | None = None) -> np.ndarray:
    """c_1..c_M from the horocycle at height Y (c_1 = 1)."""
    kt = kt or KTilde(R, 2 * np.pi * Y * 0.99)
    Q = M + 10
    trig = _trig(parity)
    xj = (np.arange(1, 2 * Q + 1) - 0.5) / (2 * Q) - 0.5
    xs, ys = pullback(xj, np.full_like(xj, Y))
    n = np.arange(1, M + 1)
    # V[m, n] = (1/Q) sum_j sqrt(y*) K~(2 pi n y*) trig(2 pi n x*) trig(2 pi m x_j)
    kn = np.sqrt(ys)[None, :] * kt(2 * np.pi * np.outer(n, ys)) * trig(2 * np.pi * np.outer(n, xs))
    tm = trig(2 * np.pi * np.outer(n, xj))
    V = tm @ kn.T / Q
    V -= np.diag(math.sqrt(Y) * kt(2 * np.pi * n * Y))
    # drop the m = 1 equation, move the c_1 column to the right-hand side
    A = V[1:, 1:]
    b = -V[1:, 0]
    c = np.linalg.solve(A, b)
    return np.concatenate([[1.0], c])


def system_size(R: float, Y: float = 0.70) -> int:
    """Number of unknowns: terms with K~(2 pi n Y) above ~1e-16."""
    return int(math.ceil((R + 36) / (2 * np.pi * Y)))


def mismatch(R: float, parity: str, M: int, Ys=(0.70, 0.80)) -> float:
    kt = KTilde(R, 2 * np.pi * min(Ys) * 0.99)
    c1 = solve_first(R, Ys[0], M, parity, kt)
    c2 = solve_first(R, Ys[1], M, parity, kt)
    return c1[1] - c2[1]


def refine(R0: float, R1: float, parity: str, M: int, tol: float = 1e-12) -> float:
    f0, f1 = mismatch(R0, parity, M), mismatch(R1, parity, M)
    for _ in range(60):
        if f1 == f0:
            break
        R2 = R1 - f1 * (R1 - R0) / (f1 - f0)
        R0, f0 = R1, f1
        R1, f1 = R2, mismatch(R2, parity, M)
        if abs(R1 - R0) < tol:
            break
    return R1


def scan(rmin: float, rmax: float, parity: str, M: int, step: float = 0.01) -> list[float]:
    """Candidate eigenvalues: sign changes of the c_2 mismatch that are not poles."""
    grid = np.arange(rmin, rmax + step / 2, step)
    vals = np.array([mismatch(R, parity, M) for R in grid])
    found = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a * b < 0:
            R = refine(grid[i], grid[i + 1], parity, M)
            c = solve_first(R, 0.75, M, parity)
            hecke = abs(c[1] * c[2] - c[5])
            if hecke < 1e-6 and grid[i] - step <= R <= grid[i + 1] + step:
                if not found or abs(R - found[-1]) > 1e-6:
                    found.append(R)
    return found


def high_coefficients(R: float, first: np.ndarray, N: int, parity: str) -> np.ndarray:
    """c_1..c_N by inverting phi on a ladder of horocycles."""
    trig = _trig(parity)
    x_window = (min(0.3 * R, 4.5), R + 3.0)
    Y_top = min(0.8, x_window[1] / (2 * np.pi))
    levels = []
    Y = Y_top
    while True:
        levels.append(Y)
        if 2 * np.pi * N * Y < x_window[1]:
            break
        Y *= 0.85
    kt = KTilde(R, min(2 * np.pi * min(levels) * 0.99, x_window[0]))
    n = np.arange(1, N + 1)
    best = np.full(N, -1.0)
    which = np.full(N, -1)
    for l, Y in enumerate(levels):
        x = 2 * np.pi * n * Y
        ok = (x >= x_window[0]) & (x <= x_window[1])
        mag = np.where(ok, np.abs(kt(np.clip(x, kt.x_lo, None))), -1.0)
        better = mag > best
        best[better] = mag[better]
        which[better] = l
    if np.any(which < 0):
        raise RuntimeError("some coefficients have no usable level")
    out = np.zeros(N)
    for l, Y in enumerate(levels):
        idx = np.nonzero(which == l)[0]
        if len(idx) == 0:
            continue
        n_max = int(n[idx].max())
        # aliasing from n' = 2Q - n must be negligible: K~ tiny there
        Q = int(math.ceil((n_max + (R + 45) / (2 * np.pi * Y)) / 2)) + 8
        xj = (np.arange(1, 2 * Q + 1) - 0.5) / (2 * Q) - 0.5
        xs, ys = pullback(xj, np.full_like(xj, Y))
        vals = phi_values(first, kt, xs, ys, parity)
        # direct projection: (1/Q) sum_j phi(z_j) trig(2 pi m x_j)
        m = n[idx]
        proj = np.empty(len(m))
        for lo in range(0, len(m), 256):
            mm = m[lo:lo + 256]
            proj[lo:lo + 256] = trig(2 * np.pi * np.outer(mm, xj)) @ vals / Q
        out[idx] = proj / (math.sqrt(Y) * kt(2 * np.pi * m * Y))
    return out


def multiplicative_completion(raw: np.ndarray) -> tuple[np.ndarray, float]:
    """Rebuild lambda(n) from lambda(p); return it and the max raw deviation."""
    N = len(raw) - 1
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, N + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    lam = np.zeros(N + 1)
    lam[1] = 1.0
    for m in range(2, N + 1):
        p = int(spf[m])
        q, e = m, 0
        while q % p == 0:
            q //= p
            e += 1
        pe = m // q
        if q == 1:
            if e == 1:
                lam[m] = raw[m]
            else:
                lam[m] = lam[p] * lam[pe // p] - lam[pe // (p * p)]
        else:
            lam[m] = lam[pe] * lam[q]
    return lam, float(np.max(np.abs(lam[1:] - raw[1:])))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rmin", type=float, default=13.0)
    ap.add_argument("--rmax", type=float, default=23.0)
    ap.add_argument("--parity", choices=["even", "odd"], default="even")
    ap.add_argument("--terms", type=int, default=20000)
    ap.add_argument("--first", type=int, default=0, help="size of the linear system (0: automatic)")
    ap.add_argument("--R", type=float, action="append", help="known approximate eigenvalue(s); skips the scan")
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)

    t0 = time.time()
    if not args.first:
        args.first = system_size(args.rmax if not args.R else max(args.R))
    if args.R:
        Rs = [refine(r - 1e-4, r + 1e-4, args.parity, args.first) for r in args.R]
    else:
        Rs = scan(args.rmin, args.rmax, args.parity, args.first)
    print(f"eigenvalues: {Rs} ({time.time() - t0:.1f}s)", file=sys.stderr)

    blocks = []
    for R in Rs:
        first = solve_first(R, 0.75, args.first, args.parity)
        raw = np.concatenate([[0.0], high_coefficients(R, first, args.terms, args.parity)])
        lam, dev = multiplicative_completion(raw)
        hecke = abs(raw[2] * raw[3] - raw[6])
        print(f"R={float(R)!r}: raw-vs-multiplicative {dev:.2e}, lambda(2)lambda(3)-lambda(6) {hecke:.2e}"
              f" ({time.time() - t0:.1f}s)", file=sys.stderr)
        lines = [f"# R={float(R)!r} first-system size {args.first}; max |raw - multiplicative| = {dev:.3e}",
                 f"form t={float(R)!r} parity={args.parity}"]
        lines += [f"{n} {lam[n]!r}" for n in range(1, args.terms + 1)]
        blocks.append("\n".join(lines))
    header = ("# Hecke-Maass forms for SL2(Z), computed by tools/hejhal.py\n"
              "# lambda(n) is the multiplicative completion of the computed prime values\n")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(header + "\n\n".join(blocks) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
