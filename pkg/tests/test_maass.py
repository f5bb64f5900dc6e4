import math

import numpy as np
import pytest

from mixedmoments.errors import DataExhaustedError, DataIntegrityError, ParseError
from mixedmoments.maass import MaassFormData, ingest_maass, parse_maass, serialize_maass, weyl_count
from mixedmoments.numtheory import primes_upto

GOOD = """# two forms
form t=1.5 parity=even
1 1.0
2 0.5
3 -0.25
4 0.25
5 0.0
6 -0.125

form t=2.5 parity=odd
1 1.0
2 0.0
"""


def test_parse_good():
    forms = parse_maass(GOOD)
    assert [f.t_phi for f in forms] == [1.5, 2.5]
    assert forms[0].is_even and not forms[1].is_even
    assert forms[0].lam(6) == -0.125
    assert forms[1].nmax == 2


def test_header_only_is_empty():
    assert parse_maass("# nothing here\n") == []
    assert parse_maass("") == []


@pytest.mark.parametrize("text,line", [
    ("1 1.0\n", 1),
    ("form t=abc parity=even\n1 1\n", 1),
    ("form t=1 parity=even\n1 1.0 2\n", 2),
    ("form t=1 parity=even\n1 one\n", 2),
    ("form t=1 parity=even\n1 1.0\n1 1.0\n", 3),
    ("form t=1 parity=even\n1 1.0\n3 0.5\n", 1),
])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_maass(text)
    assert exc.value.lineno == line


@pytest.mark.parametrize("text", [
    "form t=1 parity=even\n1 0.9\n",
    "form t=-1 parity=even\n1 1.0\n",
    "form t=1 parity=sideways\n1 1.0\n",
    "form t=1 parity=even\n1 1\n2 0.5\n3 0.5\n4 0\n5 0\n6 0.3\n",
])
def test_integrity_errors(text):
    with pytest.raises(DataIntegrityError):
        parse_maass(text)


def test_round_trip(tmp_path):
    forms = parse_maass(GOOD)
    path = tmp_path / "forms.txt"
    path.write_text(serialize_maass(forms))
    back = ingest_maass(path)
    assert back == forms
    assert serialize_maass(back) == serialize_maass(forms)


def test_exhaustion():
    form = parse_maass(GOOD)[1]
    with pytest.raises(DataExhaustedError):
        form.lam(3)
    with pytest.raises(ValueError):
        form.lam(0)


def test_shipped_data(even_maass, odd_maass):
    assert [round(f.t_phi, 6) for f in even_maass] == [13.779751, 17.738563, 19.423481, 21.315796, 22.785908]
    assert [round(f.t_phi, 6) for f in odd_maass] == [9.533695, 12.173008]
    assert all(f.is_even for f in even_maass) and not any(f.is_even for f in odd_maass)
    assert even_maass[0].nmax == 20000 and odd_maass[0].nmax == 2000
    # first even form: lambda(2) from the literature
    assert even_maass[0].lam(2) == pytest.approx(1.5493044779413943, abs=1e-9)


def test_shipped_data_hecke(even_maass, odd_maass):
    for f in even_maass + odd_maass:
        for p in primes_upto(40):
            e = 1
            while p ** (e + 1) <= f.nmax:
                assert f.lam(p ** (e + 1)) == pytest.approx(f.lam(p) * f.lam(p**e) - f.lam(p ** (e - 1)), abs=1e-9)
                e += 1
        for m, n in ((2, 3), (5, 7), (4, 9), (11, 13)):
            assert f.lam(m * n) == pytest.approx(f.lam(m) * f.lam(n), abs=1e-9)


def test_weyl_count():
    # T^2/12 for SL2(Z); the first even form sits well inside the count at its own height
    assert weyl_count(12.0) == pytest.approx(12.0)
    assert weyl_count(13.78) > 1


def test_equality_uses_values():
    a = MaassFormData(1.0, "even", np.array([0, 1.0, 0.5]))
    b = MaassFormData(1.0, "even", [0, 1.0, 0.5])
    c = MaassFormData(1.0, "even", [0, 1.0, 0.25])
    assert a == b and a != c
    assert not a.coeffs.flags.writeable
    assert math.isclose(a.lam(2), 0.5)
