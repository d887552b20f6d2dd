# src/pipeline/scenario_runner.py
"""
场景运行流程：由场景文档构建光路或晶体模型，调用对应引擎，汇总运行报告。
"""
import math
import os
import time
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.analysis.fringes import fringe_analysis, visibility_vs_occupation
from src.common import config
from src.common.data_models import (CrystalConfig, DetectorSettings, Element, ElementSpec,
                                    FocusingVariant, Frame, FreeSpace, OutputImage, OutputTable,
                                    QuantumMirror, RunReport, RunSection, Scenario, Scene, SourceSpec,
                                    SweepSection, ThinLens)
from src.common.errors import (EngineError, ImageAtInfinity, NoConvergence, NoFringes, OutputError,
                               ParseError, QMirrorError, ValidationError)
from src.common.logger import logger
from src.common.rng import STREAM_RAY_FAN, make_generator
from src.common.scenarios import CANNED_SCENARIOS, EXPECTATIONS
from src.common.utils import is_unimodal, log_duration
from src.optics import ray_engine, wave_engine
from src.optics.imaging_laws import ghost_image_distance, ghost_thin_lens, sqm_image_distance
from src.physics import dfg, focusing, kinematics
from src.processing.scenario_parser import parse_scenario, validate_scenario, with_seed
from src.storage.output_writer import emit_outputs

# 光线追迹默认搜索区间 (m)
DEFAULT_SEARCH_RANGE: Tuple[float, float] = (-2.0, 2.0)
# 两物点放大率测量的半间距 (m)
MAGNIFICATION_OFFSET = 1e-3


# --- 光路构建 ---

def build_element(spec: ElementSpec, base_dir: Optional[str] = None) -> Element:
    if spec.kind == "free":
        return FreeSpace(spec.values[0])
    if spec.kind == "lens":
        return ThinLens(spec.values[0])
    if spec.kind == "slit":
        width, centre = spec.values
        return wave_engine.slit_mask((centre,), width, label="slit")
    if spec.kind == "slits":
        separation, width = spec.values
        return wave_engine.double_slit_mask(separation, width)
    if spec.kind == "file":
        path = spec.path if os.path.isabs(spec.path) or base_dir is None else os.path.join(base_dir, spec.path)
        try:
            table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except OSError as e:
            raise OutputError(f"无法读取掩模文件 {path}: {e}") from e
        except ValueError as e:
            raise ValidationError(f"掩模文件 {path} 格式错误: {e}", "mask-file-format") from e
        return wave_engine.tabulated_mask(table[:, 0], table[:, 1], label=os.path.basename(path))
    raise ValidationError(f"未知元件类型 {spec.kind}", "known-element")


def build_scene(scenario: Scenario, base_dir: Optional[str] = None) -> Scene:
    """信号臂元件 + 量子镜 + 闲频臂元件。"""
    pump, signal, detector, run = scenario.pump, scenario.signal, scenario.detector, scenario.run
    elements: List[Element] = [build_element(e, base_dir) for e in signal.elements]
    elements.append(QuantumMirror(pump.wavelength, pump.radius))
    elements += [build_element(e, base_dir) for e in scenario.idler.elements]
    return Scene(elements=tuple(elements),
                 source=SourceSpec(signal.source, signal.wavelength, signal.waist, signal.object_x),
                 detector=DetectorSettings(detector.mode, detector.background, detector.half_width),
                 grid_size=run.grid,
                 dx=detector.dx or config.DEFAULT_GRID_STEP,
                 frame=Frame(run.frame),
                 exact=run.exact,
                 fan_half_angle=run.fan)


# --- 各引擎 ---

def _run_dfg(scenario: Scenario, report: RunReport, base_dir: Optional[str]):
    pump_sec, crystal_sec, signal_sec = scenario.pump, scenario.crystal, scenario.signal
    crystal = CrystalConfig(length=crystal_sec.length, n_p=crystal_sec.n_p, n_s=crystal_sec.n_s,
                            n_i=crystal_sec.n_i, d_eff=dfg.qpm_effective_d(crystal_sec.d_raw, crystal_sec.miller),
                            alpha=crystal_sec.alpha, miller=crystal_sec.miller)
    pump = dfg.gaussian_beam_for_confocal(pump_sec.power, pump_sec.wavelength, crystal.n_p,
                                          pump_sec.confocal, pump_sec.beam_quality)
    signal = dfg.gaussian_beam_for_confocal(signal_sec.power, signal_sec.wavelength, crystal.n_s,
                                            pump_sec.confocal, signal_sec.beam_quality)
    breakdown = dfg.dfg_power_breakdown(pump, signal, crystal, crystal_sec.mismatch,
                                        FocusingVariant(crystal_sec.variant), crystal_sec.calibration)
    lambda_i = kinematics.omega_to_wavelength(breakdown.omega_i)
    k_p = kinematics.wavevector_magnitude(pump.wavelength_vac, crystal.n_p)
    k_s = kinematics.wavevector_magnitude(signal.wavelength_vac, crystal.n_s)
    k_i = kinematics.wavevector_magnitude(lambda_i, crystal.n_i)
    bulk = kinematics.phase_mismatch(k_p, k_s, k_i)
    plane = dfg.dfg_power_planewave(pump.power, signal.power, crystal, breakdown.omega_i, crystal_sec.mismatch)

    q = report.quantities
    q.update({
        "idler_wavelength": lambda_i,
        "omega_i": breakdown.omega_i,
        "d_eff": crystal.d_eff,
        "mu": breakdown.mu,
        "confocal": breakdown.confocal,
        "xi": breakdown.xi,
        "dk_half_b": breakdown.dk_half_b,
        "h": breakdown.h,
        "idler_power": breakdown.power,
        "efficiency_model": dfg.conversion_efficiency(breakdown.power, pump.power, signal.power, crystal.length),
        "bulk_mismatch": bulk,
        "planewave_factor": plane.normalized,
    })
    if bulk > 0:
        q["qpm_period"] = kinematics.qpm_period_for_matching(k_p, k_s, k_i)

    reference = scenario.detector.reference_power
    if reference is not None and reference > 0:
        q["reference_power"] = reference
        q["efficiency_reference"] = dfg.conversion_efficiency(reference, pump.power, signal.power, crystal.length)
        q["power_ratio"] = breakdown.power / reference

    report.checks["idler_power_positive"] = breakdown.power > 0
    dk_grid = np.linspace(-4 * math.pi / crystal.length, 4 * math.pi / crystal.length, 401)
    report.tables["phase_matching"] = OutputTable(
        ["dk_per_m", "sinc_squared"], np.column_stack([dk_grid, dfg.phase_matching_curve(crystal, dk_grid)]))


def _run_focusing(scenario: Scenario, report: RunReport, base_dir: Optional[str]):
    sweep = scenario.sweep
    variant = FocusingVariant(scenario.crystal.variant)
    optimum = focusing.optimize_focusing(sweep.mu, sweep.optimize_dk, xi_min=sweep.xi_min,
                                         xi_max=sweep.xi_max, points=sweep.points, variant=variant)
    heights = [p.h for p in optimum.scan]
    report.quantities.update({
        "mu": sweep.mu,
        "xi_star": optimum.xi,
        "h_star": optimum.h,
        "dk_half_b_star": optimum.dk_half_b,
        "h_scan_first": heights[0],
        "h_scan_last": heights[-1],
    })
    report.checks["optimum_interior"] = optimum.h > heights[0] and optimum.h > heights[-1]
    report.checks["scan_unimodal"] = is_unimodal(heights)
    report.tables["xi_scan"] = OutputTable(
        ["xi", "h", "dk_half_b"], np.array([[p.xi, p.h, p.dk_half_b] for p in optimum.scan]))

    xi_axis = np.geomspace(sweep.xi_min, sweep.xi_max, 20)
    lo, hi = config.DK_SCAN_RANGE
    dk_axis = np.linspace(lo, hi, 21)
    report.images["focusing_map"] = OutputImage(
        focusing.focusing_map(sweep.mu, xi_axis, dk_axis, variant),
        axes={"xi": (float(xi_axis[0]), float(xi_axis[-1])), "dk_half_b": (lo, hi)})


def _match_layout(scenario: Scenario) -> str:
    kinds = [e.kind for e in scenario.signal.elements]
    if scenario.idler.elements:
        return "custom"
    if kinds == ["free"]:
        return "sqm"
    if kinds == ["free", "lens", "free"] and math.isinf(scenario.pump.radius):
        return "lens"
    return "custom"


def _run_ray(scenario: Scenario, report: RunReport, base_dir: Optional[str]):
    scene = build_scene(scenario, base_dir)
    signal, detector, pump = scenario.signal, scenario.detector, scenario.pump
    search = (detector.search_min if detector.search_min is not None else DEFAULT_SEARCH_RANGE[0],
              detector.search_max if detector.search_max is not None else DEFAULT_SEARCH_RANGE[1])
    rng = make_generator(scenario.run.seed, STREAM_RAY_FAN)
    focus = ray_engine.trace_best_focus(scene, signal.object_x, scenario.run.rays, search, rng)
    object_points = (signal.object_x - MAGNIFICATION_OFFSET, signal.object_x + MAGNIFICATION_OFFSET)
    magnification = ray_engine.trace_magnification(scene, focus.distance, object_points, scenario.run.rays)
    lambda_i = kinematics.idler_wavelength(pump.wavelength, signal.wavelength)

    q = report.quantities
    q.update({
        "idler_wavelength": lambda_i,
        "image_distance": focus.distance,
        "rms_spot": focus.rms_spot,
        "magnification": magnification,
        "magnification_abs": abs(magnification),
    })

    layout = _match_layout(scenario)
    if scene.frame != Frame.UNFOLDED:
        report.notes.append("折叠坐标系下不比较展开图成像公式")
    elif layout == "sqm":
        a = scenario.signal.elements[0].values[0]
        try:
            b_law = sqm_image_distance(signal.wavelength, lambda_i, pump.wavelength, a, pump.radius)
            q["image_distance_law"] = b_law
            report.checks["sqm_law_agreement"] = abs(focus.distance - b_law) <= 1e-5
        except ImageAtInfinity as e:
            report.notes.append(f"成像公式: {e}")
    elif layout == "lens":
        S1, f, d1 = (e.values[0] for e in scenario.signal.elements)
        ratio = lambda_i / signal.wavelength
        residual, m_law = ghost_thin_lens(S1, d1, focus.distance, f, signal.wavelength, lambda_i)
        q["image_distance_law"] = ghost_image_distance(S1, d1, f, signal.wavelength, lambda_i)
        q["image_distance_unfolded"] = d1 + ratio * focus.distance
        q["ghost_lens_residual"] = residual
        q["magnification_law"] = m_law
        report.checks["ghost_lens_agreement"] = abs(focus.distance - q["image_distance_law"]) <= 1e-5
        report.checks["magnification_agreement"] = abs(abs(magnification) - m_law) <= 1e-3 * m_law

    distances = np.linspace(search[0], search[1], 201)
    bundle = ray_engine.trace_scene(scene, signal.object_x, scenario.run.rays,
                                    make_generator(scenario.run.seed, STREAM_RAY_FAN))
    report.tables["best_focus"] = OutputTable(
        ["distance_m", "rms_spot_m"], np.column_stack([distances, ray_engine.best_focus_curve(bundle, distances)]))


def _predicted_period(scenario: Scenario, lambda_i: float) -> Optional[float]:
    signal_elements = scenario.signal.elements
    idler_elements = scenario.idler.elements
    if not signal_elements or signal_elements[-1].kind != "slits":
        return None
    if not idler_elements or any(e.kind != "free" for e in idler_elements):
        return None
    distance = sum(e.values[0] for e in idler_elements)
    return lambda_i * distance / signal_elements[-1].values[0]


def _compare_ray_focus(scenario: Scenario, prefix: Scene, distances: np.ndarray, sharpest: float,
                       report: RunReport):
    """点源场景：以折叠坐标系光线追迹的最佳聚焦与波动扫描的像平面互相印证。"""
    search = (float(distances[0]), float(distances[-1]))
    rays = max(scenario.run.rays, config.MIN_RAY_COUNT)
    rng = make_generator(scenario.run.seed, STREAM_RAY_FAN)
    try:
        focus = ray_engine.trace_best_focus(replace(prefix, frame=Frame.FOLDED),
                                            scenario.signal.object_x, rays, search, rng)
    except NoConvergence as e:
        report.notes.append(f"光线追迹对照: {e}")
        return
    step = float(distances[1] - distances[0])
    report.quantities["ray_best_focus"] = focus.distance
    report.checks["ray_wave_focus_agreement"] = abs(sharpest - focus.distance) <= step


def _run_wave(scenario: Scenario, report: RunReport, base_dir: Optional[str]):
    scene = build_scene(scenario, base_dir)
    field = wave_engine.run_field_chain(scene)
    coincidence = wave_engine.detect(field, scene.detector, "coincidence")
    singles = wave_engine.detect(field, scene.detector, "singles")

    q = report.quantities
    q["idler_wavelength"] = field.wavelength_vac
    if coincidence.fringes is not None:
        q["fringe_period"] = coincidence.fringes.period
        q["visibility_coincidence"] = coincidence.fringes.visibility
    if singles.fringes is not None:
        q["visibility_singles"] = singles.fringes.visibility
    if coincidence.fringes is not None and singles.fringes is not None:
        report.checks["coincidence_visibility_not_lower"] = (
            coincidence.fringes.visibility >= singles.fringes.visibility)

    predicted = _predicted_period(scenario, field.wavelength_vac)
    if predicted is not None:
        q["fringe_period_predicted"] = predicted
        if coincidence.fringes is not None:
            report.checks["fringe_period_agreement"] = abs(coincidence.fringes.period - predicted) <= field.dx

    report.tables["intensity"] = OutputTable(
        ["x_m", "coincidence", "singles"],
        np.column_stack([coincidence.x, coincidence.intensity, singles.intensity]))

    detector = scenario.detector
    if detector.z_points > 0:
        prefix = scene
        if isinstance(scene.elements[-1], FreeSpace) and scene.mirror_index < len(scene.elements) - 1:
            prefix = replace(scene, elements=scene.elements[:-1])
        start = wave_engine.run_field_chain(prefix)
        distances = np.linspace(detector.z_min, detector.z_max, detector.z_points)
        intensity_map = wave_engine.z_scan(start, distances)
        x = start.x
        columns = np.abs(x) <= detector.half_width if detector.half_width is not None else np.ones(x.size, bool)
        try:
            sharpest, _ = wave_engine.locate_sharpest_plane(start, distances)
        except NoConvergence as e:
            report.notes.append(f"像平面扫描: {e}")
        else:
            q["sharpest_plane"] = sharpest
            if scenario.signal.source == "point":
                _compare_ray_focus(scenario, prefix, distances, sharpest, report)
        report.images["z_scan"] = OutputImage(
            intensity_map[:, columns],
            axes={"x": (float(x[columns][0]), float(x[columns][-1])),
                  "z": (float(distances[0]), float(distances[-1]))})


def _run_visibility(scenario: Scenario, report: RunReport, base_dir: Optional[str]):
    sweep = scenario.sweep
    if sweep.mean_photon_min > 0:
        mean_photon = np.geomspace(sweep.mean_photon_min, sweep.mean_photon_max, sweep.points)
    else:
        mean_photon = np.concatenate([[0.0], np.geomspace(sweep.mean_photon_max * 1e-6,
                                                          sweep.mean_photon_max, sweep.points - 1)])
    curve = visibility_vs_occupation(mean_photon, sweep.beta)
    report.tables["visibility_curve"] = OutputTable(
        ["mean_photon", "occupation", "visibility"],
        np.column_stack([mean_photon, sweep.beta * mean_photon, curve]))
    report.quantities["beta"] = sweep.beta
    report.quantities["visibility_at_unit_occupation"] = visibility_vs_occupation(1.0 / sweep.beta, sweep.beta)
    report.checks["visibility_monotonic"] = bool(np.all(np.diff(curve) > 0))

    slits = [e for e in scenario.signal.elements if e.kind == "slits"]
    idler_free = [e.values[0] for e in scenario.idler.elements if e.kind == "free"]
    if not slits or not idler_free or scenario.signal.wavelength is None:
        report.notes.append("未定义双缝几何，跳过受激条纹模拟")
        return

    separation, width = slits[0].values
    dx = scenario.detector.dx or config.DEFAULT_GRID_STEP
    half_width = scenario.detector.half_width
    columns: Dict[str, np.ndarray] = {}
    x_window = None
    for occupation in (0.1, 1.0, 10.0):
        x, intensity = wave_engine.stimulated_fringe_pattern(
            scenario.run.grid, dx, scenario.signal.wavelength, separation, width, sum(idler_free),
            occupation / sweep.beta, sweep.beta)
        window = np.abs(x) <= half_width if half_width is not None else np.ones(x.size, bool)
        x_window = x[window]
        columns[f"N={occupation:g}"] = intensity[window]
        label = f"{occupation:g}".replace(".", "p")
        expected = visibility_vs_occupation(occupation / sweep.beta, sweep.beta)
        try:
            measured = fringe_analysis(intensity[window], dx).visibility
        except NoFringes as e:
            report.notes.append(f"N={occupation:g}: {e}")
            continue
        report.quantities[f"measured_visibility_N{label}"] = measured
        report.checks[f"measured_visibility_N{label}"] = abs(measured - expected) <= 0.02
    report.tables["stimulated_patterns"] = OutputTable(
        ["x_m"] + list(columns), np.column_stack([x_window] + list(columns.values())))


ENGINE_RUNNERS: Dict[str, Callable[[Scenario, RunReport, Optional[str]], None]] = {
    "dfg": _run_dfg,
    "focusing": _run_focusing,
    "ray": _run_ray,
    "wave": _run_wave,
    "visibility": _run_visibility,
}


# --- 流程入口 ---

@log_duration("场景运行")
def run_scenario(scenario: Scenario, base_dir: Optional[str] = None) -> RunReport:
    """
    运行一个场景并返回报告。引擎内部的领域错误包装为 EngineError，附带场景名。
    """
    name = scenario.run.name
    started = time.perf_counter()
    report = RunReport(scenario=name, engine=scenario.run.engine, version=config.VERSION,
                       seed=scenario.run.seed)
    logger.info(f"开始运行场景 '{name}' (引擎: {scenario.run.engine})")
    try:
        ENGINE_RUNNERS[scenario.run.engine](scenario, report, base_dir)
    except (ParseError, ValidationError, OutputError, EngineError):
        raise
    except QMirrorError as e:
        raise EngineError(f"{type(e).__name__}: {e}", name) from e

    bad = [key for key, value in report.quantities.items() if not math.isfinite(value)]
    if bad:
        raise EngineError(f"报告中存在非有限数值: {', '.join(bad)}", name)
    report.wall_time = time.perf_counter() - started
    return report


def apply_expectations(report: RunReport, expectations: Dict[str, Tuple[float, float]]):
    """把声明的验收区间写入报告的 checks。"""
    for key, (lo, hi) in expectations.items():
        value = report.quantities.get(key)
        report.checks[f"expected_{key}"] = value is not None and lo <= value <= hi


def load_canned(name: str) -> Scenario:
    if name not in CANNED_SCENARIOS:
        raise ValidationError(f"未知的内置场景 '{name}' (可选: {', '.join(CANNED_SCENARIOS)})",
                              "known-scenario")
    return parse_scenario(CANNED_SCENARIOS[name])


def default_prefix(name: str) -> str:
    return os.path.join(config.OUTPUT_DIR, name)


def reproduce(name: str, prefix: Optional[str] = None,
              seed: Optional[int] = None) -> Tuple[RunReport, List[str]]:
    """运行内置场景并写出结果。"""
    scenario = load_canned(name)
    if seed is not None:
        scenario = with_seed(scenario, seed)
    report = run_scenario(scenario)
    apply_expectations(report, EXPECTATIONS.get(name, {}))
    paths = emit_outputs(report, prefix or default_prefix(name))
    return report, paths


def run_file(path: str, prefix: Optional[str] = None,
             seed: Optional[int] = None) -> Tuple[RunReport, List[str]]:
    """运行场景文件并写出结果。"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise OutputError(f"无法读取场景文件 {path}: {e}") from e
    scenario = parse_scenario(text, base_dir=os.path.dirname(os.path.abspath(path)))
    if seed is not None:
        scenario = with_seed(scenario, seed)
    report = run_scenario(scenario, os.path.dirname(os.path.abspath(path)))
    paths = emit_outputs(report, prefix or default_prefix(scenario.run.name))
    return report, paths


def scan_xi(mu: float, xi_min: float = config.XI_SCAN_MIN, xi_max: float = config.XI_SCAN_MAX,
            points: int = config.XI_COARSE_POINTS, optimize_dk: bool = False,
            prefix: Optional[str] = None) -> Tuple[RunReport, List[str]]:
    """命令行 ξ 扫描：构造聚焦引擎场景并运行。"""
    scenario = Scenario(run=RunSection(name="dfg-scan-xi", engine="focusing"),
                        sweep=SweepSection(mu=mu, xi_min=xi_min, xi_max=xi_max, points=points,
                                           optimize_dk=optimize_dk))
    validate_scenario(scenario)
    report = run_scenario(scenario)
    paths = emit_outputs(report, prefix or default_prefix(scenario.run.name))
    return report, paths
