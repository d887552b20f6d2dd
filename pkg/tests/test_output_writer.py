import os

import numpy as np
import pytest

from src.common.data_models import OutputImage, OutputTable, RunReport
from src.common.errors import OutputError
from src.storage.output_writer import OutputWriter, emit_outputs


def _report() -> RunReport:
    report = RunReport(scenario="demo", engine="ray", version="1.0.0", seed=7, wall_time=12.5)
    report.quantities = {"image_distance": 0.1985, "magnification": -2.0}
    report.checks = {"image_distance_law": True, "scan_unimodal": False}
    report.tables = {"best_focus": OutputTable(["distance_m", "rms_spot_m"], np.array([[0.1, 1e-4], [0.2, 1e-6]]))}
    report.images = {"map": OutputImage(np.array([[0.0, 1.0], [1.0, 0.0]]), {"x": (0.0, 1.0)})}
    report.notes = ["folded frame"]
    return report


def test_pgm_golden_two_by_two(tmp_path):
    writer = OutputWriter(str(tmp_path / "run"))
    path, sidecar = writer.write_pgm("map", OutputImage(np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert open(path).read() == "P2\n2 2\n65535\n0 65535\n65535 0\n"
    assert "min = 0.0" in open(sidecar).read()


def test_constant_image_is_black(tmp_path):
    writer = OutputWriter(str(tmp_path / "run"))
    path, _ = writer.write_pgm("flat", OutputImage(np.full((2, 3), 4.2)))
    assert open(path).read().splitlines()[3:] == ["0 0 0", "0 0 0"]
    with pytest.raises(OutputError):
        writer.write_pgm("line", OutputImage(np.zeros(3)))


def test_empty_table_writes_header_only(tmp_path):
    writer = OutputWriter(str(tmp_path / "run"))
    path = writer.write_csv("empty", OutputTable(["a", "b"], np.empty((0, 2))))
    assert open(path).read() == "a,b\n"


def test_csv_full_precision(tmp_path):
    writer = OutputWriter(str(tmp_path / "run"))
    value = 0.1 + 0.2
    path = writer.write_csv("one", OutputTable(["v"], np.array([[value]])))
    assert float(open(path).read().splitlines()[1]) == value


def test_report_omits_wall_time(tmp_path):
    paths = emit_outputs(_report(), str(tmp_path / "sub" / "demo"))
    report_path = paths[-1]
    assert report_path.endswith("demo_report.txt")
    text = open(report_path, encoding="utf-8").read()
    assert "12.5" not in text
    assert "image_distance = 0.1985" in text
    assert "scan_unimodal = FAIL" in text
    assert "demo_best_focus.csv" in text
    assert os.path.isfile(str(tmp_path / "sub" / "demo_map.pgm"))


def test_outputs_byte_identical_on_rerun(tmp_path):
    first = emit_outputs(_report(), str(tmp_path / "a" / "demo"))
    second = emit_outputs(_report(), str(tmp_path / "b" / "demo"))
    for p, q in zip(first, second):
        assert open(p, "rb").read() == open(q, "rb").read()


def test_unwritable_prefix_raises_output_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError) as info:
        emit_outputs(_report(), str(blocker / "demo"))
    assert info.value.exit_code == 4
