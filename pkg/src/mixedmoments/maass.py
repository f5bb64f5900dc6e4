"""Hecke-Maass cusp form data: the container and the line-oriented text format.

Format::

    # comment
    form t=13.779751351890738 parity=even
    1 1.0
    2 1.5493...
    ...
    <blank line between forms>

Coefficient lines are ``<n> <lambda_phi(n)>``, Hecke-normalised so that
lambda_phi(1) = 1.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataExhaustedError, DataIntegrityError, ParseError

__all__ = ["MaassFormData", "ingest_maass", "parse_maass", "serialize_maass", "weyl_count"]

HECKE_TOL = 1e-6

_HEADER = re.compile(r"^form\s+t=(\S+)\s+parity=(\S+)\s*$")


@dataclass(frozen=True)
class MaassFormData:
    """Spectral parameter, parity and Hecke eigenvalues of one Maass form."""

    t_phi: float
    parity: str
    coeffs: np.ndarray = field(repr=False, compare=False)  # index n -> lambda(n); coeffs[0] unused
    source: str = ""

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __eq__(self, other):
        if not isinstance(other, MaassFormData):
            return NotImplemented
        return (self.t_phi == other.t_phi and self.parity == other.parity
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.t_phi, self.parity, len(self.coeffs)))

    @property
    def nmax(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_even(self) -> bool:
        return self.parity == "even"

    def lam(self, n: int) -> float:
        if n < 1:
            raise ValueError("lambda_phi(n) needs n >= 1")
        if n > self.nmax:
            raise DataExhaustedError(n, self.nmax, f"lambda_phi (t={self.t_phi:.6f})")
        return float(self.coeffs[n])

    def lam_prime_power(self, p: int, e: int) -> float:
        return self.lam(p**e)

    def lambdas(self, nmax: int) -> np.ndarray:
        if nmax > self.nmax:
            raise DataExhaustedError(nmax, self.nmax, f"lambda_phi (t={self.t_phi:.6f})")
        return self.coeffs[:nmax + 1]

    def validate(self) -> None:
        """Raise DataIntegrityError if a basic check fails."""
        if not self.t_phi > 0:
            raise DataIntegrityError(f"t_phi must be positive, got {self.t_phi}")
        if self.parity not in ("even", "odd"):
            raise DataIntegrityError(f"parity must be even or odd, got {self.parity!r}")
        if self.nmax < 1 or abs(self.coeffs[1] - 1) > HECKE_TOL:
            raise DataIntegrityError("lambda(1) != 1")
        if self.nmax >= 6:
            resid = abs(self.coeffs[2] * self.coeffs[3] - self.coeffs[6])
            if resid > HECKE_TOL:
                raise DataIntegrityError(
                    f"Hecke relation lambda(2)lambda(3) = lambda(6) fails by {resid:.3g}")


def parse_maass(text: str, source: str = "") -> list[MaassFormData]:
    forms: list[MaassFormData] = []
    header: tuple[float, str, int] | None = None
    table: dict[int, float] = {}

    def flush():
        nonlocal header, table
        if header is None:
            return
        t, parity, lineno = header
        nmax = max(table, default=0)
        missing = [n for n in range(1, nmax + 1) if n not in table]
        if missing:
            raise ParseError(lineno, f"form t={t} is missing coefficient n={missing[0]}")
        coeffs = np.zeros(nmax + 1)
        for n, v in table.items():
            coeffs[n] = v
        form = MaassFormData(t, parity, coeffs, source)
        try:
            form.validate()
        except DataIntegrityError as exc:
            raise DataIntegrityError(f"form at line {lineno}: {exc}") from None
        forms.append(form)
        header, table = None, {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            flush()
            continue
        m = _HEADER.match(line)
        if m:
            flush()
            try:
                t = float(m.group(1))
            except ValueError:
                raise ParseError(lineno, f"bad spectral parameter {m.group(1)!r}") from None
            header = (t, m.group(2), lineno)
            continue
        if header is None:
            raise ParseError(lineno, "coefficient line before any 'form' header")
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(lineno, f"expected '<n> <value>', got {line!r}")
        try:
            n = int(parts[0])
            v = float(parts[1])
        except ValueError:
            raise ParseError(lineno, f"expected '<n> <value>', got {line!r}") from None
        if n < 1 or n in table:
            raise ParseError(lineno, f"bad or repeated index {n}")
        table[n] = v
    flush()
    return forms


def ingest_maass(path: str | Path) -> list[MaassFormData]:
    """Read and validate every form in a Maass data file."""
    path = Path(path)
    return parse_maass(path.read_text(encoding="utf-8"), source=str(path))


def serialize_maass(forms: Iterable[MaassFormData]) -> str:
    blocks = []
    for f in forms:
        lines = [f"form t={f.t_phi!r} parity={f.parity}"]
        lines += [f"{n} {float(f.coeffs[n])!r}" for n in range(1, f.nmax + 1)]
        blocks.append("\n".join(lines))
    return "# Hecke-Maass forms for SL2(Z)\n" + "\n\n".join(blocks) + ("\n" if blocks else "")


def weyl_count(T: float) -> float:
    """Weyl-law estimate of #{t_phi <= T} over all Maass cusp forms for SL2(Z)."""
    return T * T / 12.0
