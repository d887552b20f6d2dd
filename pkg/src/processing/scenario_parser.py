# src/processing/scenario_parser.py
"""
场景文档解析器与规范化序列化器。

文档为 INI 风格的段落/键值文本：
    [run] [pump] [crystal] [arm.signal] [arm.idler] [detector] [sweep]
两臂中可重复出现 `element = <kind> <参数>`，顺序即传播顺序；
量子镜隐含位于信号臂与闲频臂之间。严格模式下未知段落或键均为错误。
"""
import math
import os
import re
from dataclasses import replace
from typing import Dict, List, NamedTuple, Optional, Tuple

from src.common.data_models import (ArmSection, CrystalSection, DetectorSection, ElementSpec,
                                    PumpSection, RunSection, Scenario, SweepSection)
from src.common.errors import ParseError, ValidationError
from src.processing.units import format_quantity, parse_number, parse_quantity

ENGINES = ("ray", "wave", "dfg", "focusing", "visibility")
FRAMES = ("unfolded", "folded")
DETECTION_MODES = ("singles", "coincidence")
VARIANTS = ("canonical", "centered")
SOURCES = ("plane", "point", "gaussian")
ELEMENT_KINDS = ("free", "lens", "slit", "slits", "file")


class Key(NamedTuple):
    kind: str
    choices: Tuple[str, ...] = ()


SCHEMA: Dict[str, Dict[str, Key]] = {
    "run": {
        "name": Key("text"),
        "engine": Key("choice", ENGINES),
        "seed": Key("int"),
        "rays": Key("int"),
        "grid": Key("int"),
        "frame": Key("choice", FRAMES),
        "exact": Key("bool"),
        "fan": Key("float"),
    },
    "pump": {
        "wavelength": Key("length"),
        "radius": Key("radius"),
        "power": Key("power"),
        "confocal": Key("length"),
        "beam_quality": Key("float"),
    },
    "crystal": {
        "length": Key("length"),
        "n_p": Key("float"),
        "n_s": Key("float"),
        "n_i": Key("float"),
        "d_raw": Key("nonlinear"),
        "miller": Key("float"),
        "alpha": Key("inverse_length"),
        "calibration": Key("float"),
        "mismatch": Key("inverse_length"),
        "variant": Key("choice", VARIANTS),
    },
    "arm.signal": {
        "wavelength": Key("length"),
        "power": Key("power"),
        "beam_quality": Key("float"),
        "source": Key("choice", SOURCES),
        "waist": Key("length"),
        "object_x": Key("length"),
    },
    "arm.idler": {},
    "detector": {
        "mode": Key("choice", DETECTION_MODES),
        "background": Key("float"),
        "half_width": Key("length"),
        "dx": Key("length"),
        "search_min": Key("length"),
        "search_max": Key("length"),
        "z_min": Key("length"),
        "z_max": Key("length"),
        "z_points": Key("int"),
        "reference_power": Key("power"),
    },
    "sweep": {
        "mu": Key("float"),
        "xi_min": Key("float"),
        "xi_max": Key("float"),
        "points": Key("int"),
        "optimize_dk": Key("bool"),
        "beta": Key("float"),
        "mean_photon_min": Key("float"),
        "mean_photon_max": Key("float"),
    },
}

SECTION_TYPES = {
    "run": RunSection,
    "pump": PumpSection,
    "crystal": CrystalSection,
    "arm.signal": ArmSection,
    "arm.idler": ArmSection,
    "detector": DetectorSection,
    "sweep": SweepSection,
}

SECTION_FIELDS = {
    "run": "run",
    "pump": "pump",
    "crystal": "crystal",
    "arm.signal": "signal",
    "arm.idler": "idler",
    "detector": "detector",
    "sweep": "sweep",
}

ARM_SECTIONS = ("arm.signal", "arm.idler")
_NAME = re.compile(r"^[A-Za-z0-9_.\-]+$")
_ELEMENT_QUANTITY = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?\s*[A-Za-zµ]+")


def _convert(key: Key, value: str, line: int, column: int):
    if key.kind == "text":
        if not _NAME.match(value):
            raise ParseError(f"名称 '{value}' 只能包含字母、数字、'_'、'.'、'-'", line, column)
        return value
    if key.kind == "choice":
        if value not in key.choices:
            raise ParseError(f"取值 '{value}' 无效 (可选: {', '.join(key.choices)})", line, column)
        return value
    if key.kind == "int":
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"无法解析整数 '{value}'", line, column) from None
    if key.kind == "bool":
        lowered = value.lower()
        if lowered not in ("true", "false", "yes", "no", "on", "off"):
            raise ParseError(f"无法解析布尔值 '{value}'", line, column)
        return lowered in ("true", "yes", "on")
    if key.kind == "float":
        return parse_number(value, line, column)
    if key.kind == "radius":
        if value == "plane":
            return math.inf
        radius = parse_quantity(value, "length", line, column)
        if radius == 0:
            raise ParseError("泵浦曲率半径不能为零", line, column)
        return radius
    return parse_quantity(value, key.kind, line, column)


def _parse_element(value: str, line: int, column: int) -> ElementSpec:
    parts = value.split(None, 1)
    kind = parts[0] if parts else ""
    rest = parts[1] if len(parts) > 1 else ""
    if kind not in ELEMENT_KINDS:
        raise ParseError(f"未知元件 '{kind}' (可选: {', '.join(ELEMENT_KINDS)})", line, column)
    if kind == "file":
        if not rest.strip():
            raise ParseError("掩模文件元件需要文件路径", line, column)
        return ElementSpec("file", (), rest.strip())

    rest_column = column + value.find(rest) if rest else column + len(value)
    quantities = _ELEMENT_QUANTITY.findall(rest)
    leftover = _ELEMENT_QUANTITY.sub("", rest).strip()
    if leftover:
        raise ParseError(f"无法解析元件参数 '{leftover}'", line, rest_column + rest.find(leftover))
    expected = {"free": (1,), "lens": (1,), "slit": (1, 2), "slits": (2,)}[kind]
    if len(quantities) not in expected:
        raise ParseError(f"元件 '{kind}' 需要 {' 或 '.join(map(str, expected))} 个带单位长度参数",
                         line, rest_column)
    values = tuple(parse_quantity(q, "length", line, rest_column) for q in quantities)
    if kind == "slit" and len(values) == 1:
        values = values + (0.0,)
    return ElementSpec(kind, values)


def parse_scenario(text: str, base_dir: Optional[str] = None, strict: bool = True) -> Scenario:
    """
    解析场景文档。

    Args:
        text: 文档内容。
        base_dir: 掩模文件相对路径的基准目录；为空时不检查文件是否存在。
        strict: 严格模式下未知键为错误，否则忽略。

    Raises:
        ParseError: 语法错误 (带行号/列号)。
        ValidationError: 语义校验失败。
    """
    values: Dict[str, Dict[str, object]] = {}
    elements: Dict[str, List[ElementSpec]] = {name: [] for name in ARM_SECTIONS}
    element_lines: Dict[str, List[int]] = {name: [] for name in ARM_SECTIONS}
    section: Optional[str] = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        indent = len(raw) - len(raw.lstrip())

        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("段落标题缺少 ']'", line_no, indent + len(stripped))
            name = stripped[1:-1].strip()
            if name not in SCHEMA:
                raise ParseError(f"未知段落 [{name}]", line_no, indent + 2)
            if name in values:
                raise ParseError(f"段落 [{name}] 重复出现", line_no, indent + 1)
            values[name] = {}
            section = name
            continue

        if section is None:
            raise ParseError("键值对必须位于某个段落之内", line_no, indent + 1)
        if "=" not in raw:
            raise ParseError("缺少 '='", line_no, indent + 1)
        eq = raw.index("=")
        key = raw[:eq].strip()
        value_raw = raw[eq + 1:]
        comment = value_raw.find(" #")
        if comment >= 0:
            value_raw = value_raw[:comment]
        value = value_raw.strip()
        value_column = eq + 2 + (len(value_raw) - len(value_raw.lstrip()))
        if not value:
            raise ParseError(f"键 '{key}' 缺少取值", line_no, eq + 2)

        if key == "element" and section in ARM_SECTIONS:
            elements[section].append(_parse_element(value, line_no, value_column))
            element_lines[section].append(line_no)
            continue
        if key not in SCHEMA[section]:
            if strict:
                raise ParseError(f"段落 [{section}] 中的未知键 '{key}'", line_no, indent + 1)
            continue
        if key in values[section]:
            raise ParseError(f"键 '{key}' 重复出现", line_no, indent + 1)
        values[section][key] = _convert(SCHEMA[section][key], value, line_no, value_column)

    sections = {}
    for name, section_type in SECTION_TYPES.items():
        entries = dict(values.get(name, {}))
        if name in ARM_SECTIONS:
            entries["elements"] = tuple(elements[name])
        sections[SECTION_FIELDS[name]] = section_type(**entries)
    scenario = Scenario(**sections)
    validate_scenario(scenario, base_dir, element_lines)
    return scenario


def _require(condition: bool, message: str, invariant: str, line: Optional[int] = None):
    if not condition:
        raise ValidationError(message, invariant, line)


def validate_scenario(scenario: Scenario, base_dir: Optional[str] = None,
                      element_lines: Optional[Dict[str, List[int]]] = None):
    """场景语义校验，违反时抛出 ValidationError 并指明不变量。"""
    run, pump, crystal, signal = scenario.run, scenario.pump, scenario.crystal, scenario.signal
    detector, sweep = scenario.detector, scenario.sweep

    _require(run.grid >= 2 and run.grid % 2 == 0, f"网格点数必须为不小于 2 的偶数: {run.grid}", "grid-even")
    _require(run.rays >= 1, f"光线数必须为正: {run.rays}", "positive-ray-count")
    _require(run.fan > 0, f"光线扇半角必须为正: {run.fan}", "positive-fan")
    _require(detector.background >= 0, "背景强度不能为负", "non-negative-background")
    _require(pump.beam_quality >= 1 and signal.beam_quality >= 1, "M² 必须不小于 1", "beam-quality")

    if run.engine in ("ray", "wave", "dfg"):
        _require(pump.wavelength is not None, "缺少泵浦波长", "pump-wavelength")
        _require(signal.wavelength is not None, "缺少信号波长", "signal-wavelength")
        _require(pump.wavelength > 0 and signal.wavelength > 0, "波长必须为正", "positive-wavelength")
        _require(signal.wavelength > pump.wavelength,
                 "信号波长必须长于泵浦波长 (闲频频率为正)", "energy-conservation")

    if run.engine == "ray":
        _require(run.rays >= 100, "光线追迹至少需要 100 条光线", "ray-count")
        if detector.search_min is not None and detector.search_max is not None:
            _require(detector.search_min < detector.search_max, "搜索区间无效", "search-range")

    if run.engine == "wave":
        _require(detector.z_points == 0 or (detector.z_min is not None and detector.z_max is not None
                                             and detector.z_min < detector.z_max),
                 "z 扫描需要有效的 z_min < z_max", "z-scan-range")
        if signal.source == "gaussian":
            _require(signal.waist is not None, "高斯光源需要束腰", "gaussian-waist")

    if run.engine == "dfg":
        _require(crystal.length is not None and crystal.length > 0, "缺少晶体长度", "crystal-length")
        _require(crystal.d_raw is not None and crystal.d_raw > 0, "缺少非线性系数 d_raw", "nonlinear-coefficient")
        _require(pump.power is not None and signal.power is not None, "缺少泵浦/信号功率", "beam-power")
        _require(pump.confocal is not None and pump.confocal > 0, "缺少共焦参数", "confocal-parameter")
        _require(min(crystal.n_p, crystal.n_s, crystal.n_i) >= 1, "折射率必须不小于 1", "refractive-index")
        _require(crystal.alpha >= 0, "吸收系数不能为负", "non-negative-absorption")
        _require(0 < crystal.miller <= 1, "Miller 因子必须位于 (0, 1]", "miller-range")

    if run.engine == "focusing":
        _require(sweep.mu is not None and 0 < sweep.mu < 1, "μ 必须位于 (0, 1)", "mu-range")
        _require(0 < sweep.xi_min < sweep.xi_max, "ξ 扫描区间无效", "xi-range")
        _require(sweep.points >= 3, "扫描点数至少为 3", "scan-points")

    if run.engine == "visibility":
        _require(sweep.beta > 0, "β 必须为正", "beta-positive")
        _require(0 <= sweep.mean_photon_min < sweep.mean_photon_max, "⟨n⟩ 扫描区间无效", "photon-range")

    for arm_name, arm in (("arm.signal", scenario.signal), ("arm.idler", scenario.idler)):
        lines = (element_lines or {}).get(arm_name, [])
        for index, element in enumerate(arm.elements):
            line = lines[index] if index < len(lines) else None
            if element.kind in ("free", "lens", "slit", "slits"):
                _require(all(math.isfinite(v) for v in element.values), "元件参数必须有限", "finite-element", line)
            if element.kind == "free":
                _require(element.values[0] >= 0, "自由传播距离不能为负", "non-negative-distance", line)
            if element.kind == "lens":
                _require(element.values[0] != 0, "焦距不能为零", "non-zero-focal-length", line)
            if element.kind in ("slit", "slits"):
                _require(element.values[-1 if element.kind == "slits" else 0] > 0, "狭缝宽度必须为正",
                         "positive-slit-width", line)
            if element.kind == "file" and base_dir is not None:
                path = element.path if os.path.isabs(element.path) else os.path.join(base_dir, element.path)
                _require(os.path.isfile(path), f"掩模文件不存在: {element.path}", "referenced-files-exist", line)


# --- 序列化 ---

def _format_value(key: Key, value) -> str:
    if key.kind in ("text", "choice"):
        return str(value)
    if key.kind == "int":
        return str(int(value))
    if key.kind == "bool":
        return "true" if value else "false"
    if key.kind == "float":
        return repr(float(value))
    if key.kind == "radius":
        return "plane" if math.isinf(value) else format_quantity(value, "length")
    return format_quantity(value, key.kind)


def _format_element(element: ElementSpec) -> str:
    if element.kind == "file":
        return f"file {element.path}"
    return " ".join([element.kind] + [format_quantity(v, "length") for v in element.values])


def serialize_scenario(scenario: Scenario) -> str:
    """
    规范化输出：固定段落顺序，所有物理量以国际单位制基本单位和 repr 精度写出，
    因此 parse(serialize(s)) == s。
    """
    lines: List[str] = [f"# {scenario.run.name}"]
    for name, schema in SCHEMA.items():
        section = getattr(scenario, SECTION_FIELDS[name])
        lines.append("")
        lines.append(f"[{name}]")
        for key_name, key in schema.items():
            value = getattr(section, key_name)
            if value is None:
                continue
            lines.append(f"{key_name} = {_format_value(key, value)}")
        if name in ARM_SECTIONS:
            for element in section.elements:
                lines.append(f"element = {_format_element(element)}")
    return "\n".join(lines) + "\n"


def with_seed(scenario: Scenario, seed: int) -> Scenario:
    return replace(scenario, run=replace(scenario.run, seed=seed))

