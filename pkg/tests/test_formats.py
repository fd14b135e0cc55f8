from __future__ import annotations

import pytest

from pmainv.calculus import legendre_map
from pmainv.errors import ExprSyntaxError, UnknownVariable
from pmainv.formats import (
    FileFormatError,
    format_diffeo,
    format_equation,
    load_diffeo,
    load_equation,
    parse_diffeo,
    parse_equation,
)
from pmainv.pma import example_equation, heat_equation

HEAT = """# heat
N = 0
A = 1   # leading term
B = 0
C = 0
D = -q
"""


def test_parse_equation():
    assert parse_equation(HEAT) == heat_equation()


def test_equation_round_trip():
    E = example_equation()
    assert parse_equation(format_equation(E)) == E


def test_diffeo_round_trip():
    phi = legendre_map()
    psi = parse_diffeo(format_diffeo(phi))
    assert psi.images == phi.images and psi.inverse == phi.inverse


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse_equation("N = 0\nA = 1 + * x\nB = 0\nC = 0\nD = 0\n")
    assert exc.value.line == 2
    assert exc.value.position + 1 == 9


def test_unknown_variable_is_reported_with_line():
    with pytest.raises(UnknownVariable) as exc:
        parse_equation("N = 0\nA = 1\nB = 0\nC = z\nD = 0\n")
    assert exc.value.line == 4


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("N = 0\nA = 1\nB = 0\nC = 0\n", "lacks D"),
        ("N = 0\nN = 1\nA = 1\nB = 0\nC = 0\nD = 0\n", "duplicate"),
        ("N = 0\nE = 1\n", "unknown key"),
        ("N 0\n", "expected"),
    ],
)
def test_malformed_files(text, fragment):
    with pytest.raises((FileFormatError, ExprSyntaxError)) as exc:
        parse_equation(text)
    assert fragment in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(FileFormatError):
        load_equation(tmp_path / "nope.eq")


def test_load_files(tmp_path):
    p = tmp_path / "heat.eq"
    p.write_text(HEAT)
    assert load_equation(p).name == "heat"
    m = tmp_path / "leg.map"
    m.write_text(format_diffeo(legendre_map()))
    assert load_diffeo(m).images == legendre_map().images
