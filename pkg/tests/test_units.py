import math

import pytest

from src.common.errors import ParseError
from src.processing import units


@pytest.mark.parametrize("text, kind, expected", [
    ("812 nm", "length", 812e-9),
    ("24 mm", "length", 0.024),
    ("1.5e-3 m", "length", 1.5e-3),
    ("20 um", "length", 20e-6),
    ("3.43 µm", "length", 3.43e-6),
    ("2 cm", "length", 0.02),
    ("120 mW", "power", 0.120),
    ("27 pm/V", "nonlinear", 27e-12),
    ("0.04 1/cm", "inverse_length", 4.0),
    ("2 1/mm", "inverse_length", 2000.0),
    ("-3 1/m", "inverse_length", -3.0),
])
def test_parse_quantity(text, kind, expected):
    assert units.parse_quantity(text, kind) == pytest.approx(expected, rel=1e-12)


def test_missing_unit_is_error():
    with pytest.raises(ParseError) as info:
        units.parse_quantity("812", "length", line=4, column=14)
    assert info.value.line == 4
    assert info.value.column == 14


def test_unit_of_wrong_kind_points_at_unit():
    with pytest.raises(ParseError) as info:
        units.parse_quantity("812 mW", "length", line=2, column=14)
    assert info.value.column == 18


@pytest.mark.parametrize("text", ["abc nm", "nan m", "1..2 m", ""])
def test_malformed_quantity(text):
    with pytest.raises(ParseError):
        units.parse_quantity(text, "length")


def test_parse_number():
    assert units.parse_number("7.74e-7") == 7.74e-7
    assert math.isinf(units.parse_number("inf"))
    with pytest.raises(ParseError):
        units.parse_number("nan")
    with pytest.raises(ParseError):
        units.parse_number("seven")


@pytest.mark.parametrize("value", [812e-9, 0.1 + 0.2, -1.0 / 3.0, 1e-300])
def test_format_quantity_reparses_exactly(value):
    assert units.parse_quantity(units.format_quantity(value, "length"), "length") == value


def test_unknown_unit_points_at_unit():
    with pytest.raises(ParseError) as info:
        units.parse_quantity("812 furlongz", "length", line=3, column=14)
    assert info.value.line == 3
    assert info.value.column == 18


@pytest.mark.parametrize("text, kind", [
    ("27 pm", "nonlinear"),
    ("1 m", "inverse_length"),
    ("0.04 1/cm", "length"),
    ("120 mW", "nonlinear"),
])
def test_dimension_mismatch_rejected(text, kind):
    with pytest.raises(ParseError):
        units.parse_quantity(text, kind)
