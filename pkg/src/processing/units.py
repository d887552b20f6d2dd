# src/processing/units.py
"""
带单位数值的解析与格式化。场景文档中的物理量必须显式带单位后缀，
单位由 pint 解析并换算到国际单位制基本单位。
"""
import math
import re
from typing import Dict

import pint

from src.common.errors import ParseError

ureg = pint.UnitRegistry()
Q_ = ureg.Quantity

# 物理量类别 -> 国际单位制基本单位 (同时用于量纲检查与序列化)
BASE_UNITS: Dict[str, str] = {
    "length": "m",
    "power": "W",
    "nonlinear": "m/V",
    "inverse_length": "1/m",
}

_QUANTITY = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*(\S*)$")


def parse_number(text: str, line: int = 0, column: int = 1) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"无法解析数值 '{text}'", line, column) from None
    if math.isnan(value):
        raise ParseError("数值不能为 NaN", line, column)
    return value


def parse_unit(unit: str, line: int = 0, column: int = 1) -> pint.Unit:
    try:
        return ureg.parse_units(unit)
    except Exception as e:
        raise ParseError(f"无法识别单位 '{unit}': {e}", line, column) from None


def parse_quantity(text: str, kind: str, line: int = 0, column: int = 1) -> float:
    """
    将 '812 nm'、'27 pm/V'、'0.04 1/cm' 这类文本换算为国际单位制数值。

    Raises:
        ParseError: 数值格式错误、缺少单位、单位无法识别或量纲与物理量不匹配。
    """
    base = BASE_UNITS[kind]
    stripped = text.strip()
    match = _QUANTITY.match(stripped)
    if not match:
        raise ParseError(f"无法解析物理量 '{text}'", line, column)
    number, unit_text = match.groups()
    value = parse_number(number, line, column)
    if not unit_text:
        raise ParseError(f"物理量 '{text}' 缺少单位后缀 (应可换算为 {base})", line, column)

    unit_column = column + text.find(unit_text)
    unit = parse_unit(unit_text, line, unit_column)
    try:
        return float(Q_(value, unit).to(base).magnitude)
    except pint.DimensionalityError:
        raise ParseError(f"单位 '{unit_text}' 不适用于{kind}量 (应可换算为 {base})",
                         line, unit_column) from None


def format_quantity(value: float, kind: str) -> str:
    """以基本单位和 repr 精度输出，保证重新解析后数值完全相同。"""
    return f"{float(value)!r} {BASE_UNITS[kind]}"
