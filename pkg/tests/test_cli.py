import os

import pytest

import main
from src.common import config
from src.common.logger import set_level


@pytest.fixture(autouse=True)
def _restore_log_level():
    yield
    set_level(config.LOG_LEVEL)


def test_no_command_prints_help(capsys):
    assert main.main([]) == 2
    assert "qmirror" in capsys.readouterr().out


def test_dfg_without_subcommand():
    assert main.main(["dfg"]) == 2


def test_list_and_show(capsys):
    assert main.main(["list"]) == 0
    assert "sqm-law" in capsys.readouterr().out
    assert main.main(["show", "sqm-law"]) == 0
    assert "radius = 100 mm" in capsys.readouterr().out


def test_unknown_scenario_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main.main(["reproduce", "nope"])
    assert info.value.code == 2


def test_kinematics(capsys):
    assert main.main(["kinematics", "--pump", "812 nm", "--signal", "1064 nm"]) == 0
    assert "3428" in capsys.readouterr().out


def test_kinematics_errors():
    assert main.main(["kinematics", "--pump", "812", "--signal", "1064 nm"]) == 2
    assert main.main(["kinematics", "--pump", "1064 nm", "--signal", "812 nm"]) == 3


def test_reproduce_writes_files(tmp_path):
    prefix = str(tmp_path / "sqm")
    assert main.main(["--quiet", "reproduce", "sqm-law", "--out", prefix, "--seed", "5"]) == 0
    assert os.path.isfile(prefix + "_report.txt")
    assert "seed = 5" in open(prefix + "_report.txt", encoding="utf-8").read()


def test_run_exit_codes(tmp_path):
    assert main.main(["run", str(tmp_path / "absent.ini")]) == 4

    broken = tmp_path / "broken.ini"
    broken.write_text("[run]\nengine = laser\n")
    assert main.main(["run", str(broken)]) == 2

    unreachable = tmp_path / "unreachable.ini"
    unreachable.write_text("""
[run]
name = unreachable
engine = ray
rays = 200

[pump]
wavelength = 400 nm

[arm.signal]
wavelength = 800 nm
element = free 150 mm

[detector]
search_min = 100 mm
search_max = 1000 mm
""")
    assert main.main(["run", str(unreachable), "--out", str(tmp_path / "u")]) == 3


def test_scan_xi_command(tmp_path):
    prefix = str(tmp_path / "scan")
    argv = ["--threads", "2", "dfg", "scan-xi", "--mu", "0.5", "--xi-min", "0.5", "--xi-max", "3",
            "--points", "6", "--out", prefix]
    assert main.main(argv) == 0
    assert os.path.isfile(prefix + "_xi_scan.csv")
    assert main.main(["dfg", "scan-xi", "--mu", "1.5", "--out", prefix]) == 2
