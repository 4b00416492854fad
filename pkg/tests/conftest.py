import json

import pytest

from quadshift.model import Grid, PhysicalParams

REFERENCE_GRID = Grid(-20.0, 20.0, 1024)


@pytest.fixture
def grid():
    return REFERENCE_GRID


@pytest.fixture
def small_grid():
    return Grid(-20.0, 20.0, 256)


@pytest.fixture
def params():
    return PhysicalParams()


def base_config(**sections):
    cfg = {
        "schema": 1,
        "name": "test",
        "grid": {"x_min": -20, "x_max": 20, "n": 512},
        "time": {"t0": 0, "t_end": 0.5, "dt": 0.005, "output_stride": 10},
        "coefficients": {"a": 1, "g": 1},
        "packet": {"x0": 0, "p0": 0, "sigma": 1},
    }
    cfg.update(sections)
    return cfg


@pytest.fixture
def write_config(tmp_path):
    def _write(cfg, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(cfg))
        return str(path)
    return _write


ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    """Record a one-line acceptance verdict; all lines are echoed in the terminal summary."""
    def _report(number, title, passed, detail):
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
