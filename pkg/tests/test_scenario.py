import copy

import pytest

from quadshift.errors import ConfigError
from quadshift.scenario import deep_merge, parse_config, scenario_to_dict

from conftest import base_config


def field_of(cfg):
    with pytest.raises(ConfigError) as info:
        parse_config(cfg)
    return info.value.field


def test_defaults_are_filled():
    sc = parse_config(base_config())
    assert sc.params.hbar == 1.0
    assert sc.propagator.method == "expm"
    assert sc.propagator.stencil_order == 10
    assert sc.tolerances.moment_delta == 1e-8
    assert sc.outputs.verify_modes == ("position", "momentum")


def test_resolved_echo_round_trips():
    sc = parse_config(base_config(coefficients={
        "a": 1, "g": {"segments": [{"t_start": 0, "poly": [0.5, 1], "sin": [{"amp": 1, "omega": 2, "phase": 0.1}]},
                                   {"t_start": 0.3, "poly": [2]}]}}))
    again = parse_config(scenario_to_dict(sc))
    assert scenario_to_dict(again) == scenario_to_dict(sc)
    assert again.coefficients(0.4) == sc.coefficients(0.4)


@pytest.mark.parametrize("patch, field", [
    ({"grid": {"x_min": -20, "x_max": 20, "n": 100}}, "grid.n"),
    ({"grid": {"x_min": 20, "x_max": -20, "n": 256}}, "grid.x_max"),
    ({"time": {"t0": 0, "t_end": 1, "dt": -0.1}}, "time.dt"),
    ({"time": {"t0": 1, "t_end": 0.5, "dt": 0.1}}, "time.t_end"),
    ({"time": {"t0": 0, "t_end": 1, "dt": 0.1, "output_stride": 0}}, "time.output_stride"),
    ({"coefficients": {"g": 1}}, "coefficients.a"),
    ({"coefficients": {"a": -1}}, "coefficients.a"),
    ({"coefficients": {"a": 1, "h": 2}}, "coefficients.h"),
    ({"coefficients": {"a": 1, "g": {"segments": [{"t_start": 0, "poly": [1, 2, 3, 4, 5]}]}}},
     "coefficients.g.segments[0].poly"),
    ({"packet": {"sigma": 0}}, "packet.sigma"),
    ({"packet": {"sigma": 1, "hermite_n": 11}}, "packet.hermite_n"),
    ({"propagator": {"method": "rk4"}}, "propagator.method"),
    ({"propagator": {"stencil_order": 3}}, "propagator.stencil_order"),
    ({"outputs": {"snapshots": [5.0]}}, "outputs.snapshots"),
    ({"outputs": {"verify_modes": ["wigner"]}}, "outputs.verify_modes"),
    ({"schema": 2}, "schema"),
    ({"colour": "blue"}, "colour"),
])
def test_config_errors_name_the_field(patch, field):
    cfg = base_config()
    cfg.update(patch)
    assert field_of(cfg) == field


def test_deep_merge_does_not_mutate():
    base = base_config()
    frozen = copy.deepcopy(base)
    merged = deep_merge(base, {"grid": {"n": 256}, "coefficients": {"g": 2}})
    assert merged["grid"] == {"x_min": -20, "x_max": 20, "n": 256}
    assert merged["coefficients"] == {"a": 1, "g": 2}
    assert base == frozen
