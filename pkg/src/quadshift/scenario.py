"""Scenario configs: JSON documents with ``"schema": 1``.

Example::

    {
      "schema": 1,
      "name": "forced_oscillator",
      "grid": {"x_min": -20, "x_max": 20, "n": 1024},
      "time": {"t0": 0, "t_end": 3.14159, "dt": 0.001, "output_stride": 10},
      "params": {"hbar": 1.0},
      "coefficients": {
        "a": 1, "c": 1,
        "g": {"segments": [{"t_start": 0, "poly": [0], "sin": [{"amp": 1, "omega": 2, "phase": 0}]}]}
      },
      "packet": {"x0": 0, "p0": 0, "sigma": 1, "hermite_n": 0, "chirp": 0},
      "propagator": {"method": "expm", "stencil_order": 10},
      "outputs": {"series": true, "snapshots": [1.0], "verify_modes": ["position", "momentum"]},
      "tolerances": {"position_residual": 1e-4}
    }

A coefficient is a number (constant) or ``{"segments": [...]}``; each
segment is ``c0 + c1 u + c2 u^2 + c3 u^3 + sum amp sin(omega u + phase)``
with ``u = t - t_start``. Missing coefficients default to 0 except ``a``,
which is required.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .model import (
    COEFFICIENT_NAMES,
    CoefficientFunction,
    CoefficientSet,
    GaussianPacketSpec,
    Grid,
    PhysicalParams,
    Segment,
    Sinusoid,
    time_grid,
)
from .propagator import DEFAULT_STENCIL_ORDER, METHODS, STENCIL_ORDERS

SCHEMA_VERSION = 1
VERIFY_MODES = ("position", "momentum")


@dataclass(frozen=True)
class TimeWindow:
    t0: float
    t_end: float
    dt: float
    output_stride: int = 1


@dataclass(frozen=True)
class PropagatorSettings:
    method: str = "expm"
    stencil_order: int = DEFAULT_STENCIL_ORDER


@dataclass(frozen=True)
class OutputSelection:
    series: bool = True
    snapshots: tuple = ()
    verify_modes: tuple = VERIFY_MODES


@dataclass(frozen=True)
class Tolerances:
    position_residual: float = 1e-4
    momentum_residual: float = 1e-4
    moment_delta: float = 1e-8
    norm_drift: float = 1e-9
    boundary_leak: float = 1e-6
    convergence_floor: float = 1e-10


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: Grid
    time: TimeWindow
    coefficients: CoefficientSet
    packet: GaussianPacketSpec
    params: PhysicalParams = PhysicalParams()
    propagator: PropagatorSettings = PropagatorSettings()
    outputs: OutputSelection = OutputSelection()
    tolerances: Tolerances = Tolerances()
    corrupt_beta: float = 0.0

    def with_dt(self, dt):
        return replace(self, time=replace(self.time, dt=dt))

    def sample_times(self):
        return time_grid(self.time.t0, self.time.t_end, self.time.dt)


_TOP_KEYS = {"schema", "name", "grid", "time", "params", "coefficients", "packet",
             "propagator", "outputs", "tolerances", "debug"}


def _section(cfg, key, required=True):
    if key not in cfg:
        if required:
            raise ConfigError(key, "missing section")
        return {}
    sec = cfg[key]
    if not isinstance(sec, dict):
        raise ConfigError(key, "must be an object")
    return sec


def _unknown(sec, allowed, prefix):
    extra = sorted(set(sec) - set(allowed))
    if extra:
        raise ConfigError(f"{prefix}.{extra[0]}" if prefix else extra[0], "unknown field")


def _number(sec, key, prefix, default=None, positive=False, integer=False):
    name = f"{prefix}.{key}"
    if key not in sec:
        if default is None:
            raise ConfigError(name, "missing")
        return default
    val = sec[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(name, f"must be a number, got {val!r}")
    if integer and int(val) != val:
        raise ConfigError(name, f"must be an integer, got {val!r}")
    if not math.isfinite(val):
        raise ConfigError(name, "must be finite")
    if positive and not val > 0:
        raise ConfigError(name, f"must be positive, got {val!r}")
    return int(val) if integer else float(val)


def _coefficient(spec, name, t0):
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return CoefficientFunction.constant(float(spec), t0)
    if not isinstance(spec, dict) or "segments" not in spec:
        raise ConfigError(name, "must be a number or an object with 'segments'")
    _unknown(spec, {"segments"}, name)
    segs_in = spec["segments"]
    if not isinstance(segs_in, list) or not segs_in:
        raise ConfigError(f"{name}.segments", "must be a non-empty list")
    segs = []
    for i, seg in enumerate(segs_in):
        where = f"{name}.segments[{i}]"
        if not isinstance(seg, dict):
            raise ConfigError(where, "must be an object")
        _unknown(seg, {"t_start", "poly", "sin"}, where)
        t_start = _number(seg, "t_start", where, default=t0 if i == 0 else None)
        poly = seg.get("poly", [0.0])
        if not isinstance(poly, list) or not 1 <= len(poly) <= 4:
            raise ConfigError(f"{where}.poly", "must list 1 to 4 coefficients c0..c3")
        poly = [_number({"c": c}, "c", f"{where}.poly") for c in poly]
        sins = []
        for j, s in enumerate(seg.get("sin", [])):
            sw = f"{where}.sin[{j}]"
            if not isinstance(s, dict):
                raise ConfigError(sw, "must be an object")
            _unknown(s, {"amp", "omega", "phase"}, sw)
            sins.append(Sinusoid(_number(s, "amp", sw), _number(s, "omega", sw), _number(s, "phase", sw, 0.0)))
        segs.append(Segment(t_start, tuple(poly), tuple(sins)))
    try:
        fn = CoefficientFunction(tuple(segs))
    except ValueError as exc:
        raise ConfigError(f"{name}.segments", str(exc)) from None
    if fn.t_first > t0:
        raise ConfigError(f"{name}.segments[0].t_start", f"must not exceed time.t0={t0}")
    return fn


def parse_config(cfg: dict) -> Scenario:
    if not isinstance(cfg, dict):
        raise ConfigError("", "config must be a JSON object")
    _unknown(cfg, _TOP_KEYS, "")
    if cfg.get("schema") != SCHEMA_VERSION:
        raise ConfigError("schema", f"must be {SCHEMA_VERSION}, got {cfg.get('schema')!r}")
    name = cfg.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "must be a non-empty string")

    g = _section(cfg, "grid")
    _unknown(g, {"x_min", "x_max", "n"}, "grid")
    n = _number(g, "n", "grid", integer=True)
    if n < 64 or n & (n - 1):
        raise ConfigError("grid.n", f"must be a power of two >= 64, got {n}")
    x_min, x_max = _number(g, "x_min", "grid"), _number(g, "x_max", "grid")
    if not x_max > x_min:
        raise ConfigError("grid.x_max", "must exceed grid.x_min")
    grid = Grid(x_min, x_max, n)

    tm = _section(cfg, "time")
    _unknown(tm, {"t0", "t_end", "dt", "output_stride"}, "time")
    t0 = _number(tm, "t0", "time", default=0.0)
    t_end = _number(tm, "t_end", "time")
    if not t_end > t0:
        raise ConfigError("time.t_end", f"must exceed time.t0={t0}")
    dt = _number(tm, "dt", "time", positive=True)
    stride = _number(tm, "output_stride", "time", default=1, integer=True)
    if stride < 1:
        raise ConfigError("time.output_stride", "must be >= 1")
    window = TimeWindow(t0, t_end, dt, stride)

    pr = _section(cfg, "params", required=False)
    _unknown(pr, {"hbar"}, "params")
    params = PhysicalParams(_number(pr, "hbar", "params", default=1.0, positive=True))

    co = _section(cfg, "coefficients")
    _unknown(co, set(COEFFICIENT_NAMES), "coefficients")
    if "a" not in co:
        raise ConfigError("coefficients.a", "missing (kinetic coefficient is required)")
    fns = {k: _coefficient(co.get(k, 0.0), f"coefficients.{k}", t0) for k in COEFFICIENT_NAMES}
    coeffs = CoefficientSet(t0=t0, **fns)
    times = time_grid(t0, t_end, dt)
    check_times = np.concatenate([times, 0.5 * (times[1:] + times[:-1])])
    try:
        coeffs.check_window(check_times)
    except ValueError as exc:
        raise ConfigError("coefficients.a", str(exc)) from None

    pk = _section(cfg, "packet")
    _unknown(pk, {"x0", "p0", "sigma", "hermite_n", "chirp"}, "packet")
    try:
        packet = GaussianPacketSpec(
            x0=_number(pk, "x0", "packet", default=0.0),
            p0=_number(pk, "p0", "packet", default=0.0),
            sigma=_number(pk, "sigma", "packet", positive=True),
            hermite_n=_number(pk, "hermite_n", "packet", default=0, integer=True),
            chirp=_number(pk, "chirp", "packet", default=0.0),
        )
    except ValueError as exc:
        raise ConfigError("packet.hermite_n", str(exc)) from None

    pg = _section(cfg, "propagator", required=False)
    _unknown(pg, {"method", "stencil_order"}, "propagator")
    method = pg.get("method", "expm")
    if method not in METHODS:
        raise ConfigError("propagator.method", f"must be one of {METHODS}, got {method!r}")
    order = _number(pg, "stencil_order", "propagator", default=DEFAULT_STENCIL_ORDER, integer=True)
    if order not in STENCIL_ORDERS:
        raise ConfigError("propagator.stencil_order", f"must be one of {STENCIL_ORDERS}, got {order}")

    out = _section(cfg, "outputs", required=False)
    _unknown(out, {"series", "snapshots", "verify_modes"}, "outputs")
    snaps = out.get("snapshots", [])
    if not isinstance(snaps, list):
        raise ConfigError("outputs.snapshots", "must be a list of times")
    snaps = tuple(_number({"t": s}, "t", "outputs.snapshots") for s in snaps)
    for s in snaps:
        if not t0 <= s <= t_end:
            raise ConfigError("outputs.snapshots", f"time {s} outside [{t0}, {t_end}]")
    modes = out.get("verify_modes", list(VERIFY_MODES))
    if not isinstance(modes, list) or not modes or any(m not in VERIFY_MODES for m in modes):
        raise ConfigError("outputs.verify_modes", f"must be a non-empty subset of {VERIFY_MODES}")
    series = out.get("series", True)
    if not isinstance(series, bool):
        raise ConfigError("outputs.series", "must be true or false")
    outputs = OutputSelection(series, snaps, tuple(modes))

    tl = _section(cfg, "tolerances", required=False)
    _unknown(tl, Tolerances.__dataclass_fields__.keys(), "tolerances")
    tol = Tolerances(**{
        k: _number(tl, k, "tolerances", default=getattr(Tolerances, k), positive=True)
        for k in Tolerances.__dataclass_fields__
    })

    dbg = _section(cfg, "debug", required=False)
    _unknown(dbg, {"corrupt_beta"}, "debug")
    corrupt = _number(dbg, "corrupt_beta", "debug", default=0.0)

    return Scenario(name, grid, window, coeffs, packet, params,
                    PropagatorSettings(method, order), outputs, tol, corrupt)


def load_config(path) -> Scenario:
    return parse_config(read_json(path))


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError("", f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON in {path}: {exc}") from None


def scenario_to_dict(sc: Scenario) -> dict:
    """Fully resolved config (defaults filled in); parses back to an equal scenario."""
    coeffs = sc.coefficients.to_dict()
    coeffs.pop("t0")
    return {
        "schema": SCHEMA_VERSION,
        "name": sc.name,
        "grid": {"x_min": sc.grid.x_min, "x_max": sc.grid.x_max, "n": sc.grid.n},
        "time": {"t0": sc.time.t0, "t_end": sc.time.t_end, "dt": sc.time.dt,
                 "output_stride": sc.time.output_stride},
        "params": {"hbar": sc.params.hbar},
        "coefficients": coeffs,
        "packet": {"x0": sc.packet.x0, "p0": sc.packet.p0, "sigma": sc.packet.sigma,
                   "hermite_n": sc.packet.hermite_n, "chirp": sc.packet.chirp},
        "propagator": {"method": sc.propagator.method, "stencil_order": sc.propagator.stencil_order},
        "outputs": {"series": sc.outputs.series, "snapshots": list(sc.outputs.snapshots),
                    "verify_modes": list(sc.outputs.verify_modes)},
        "tolerances": {k: getattr(sc.tolerances, k) for k in Tolerances.__dataclass_fields__},
        "debug": {"corrupt_beta": sc.corrupt_beta},
    }


def deep_merge(base: dict, patch: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in patch.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out
