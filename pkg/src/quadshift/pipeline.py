"""Scenario pipelines behind the CLI: run, verify, convergence, sweep.

Each pipeline returns plain Python data and, given an output directory,
writes its artifacts there. Numbers go to CSV with 17 significant digits
and to JSON via ``repr``, so re-running a config reproduces the files
bit for bit on the same platform.
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from . import kernels
from .classical import integrate_shift
from .errors import ConfigError, QuadShiftError
from .model import MOMENTUM, POSITION
from .moments import centered_moment, covariance
from .propagator import SERIES_COLUMNS, evolve, evolve_pair, record_indices
from .scenario import Scenario, deep_merge, parse_config, scenario_to_dict
from .transform import theorem_residual

MOMENT_ORDERS = range(2, 7)
CONVENTION_NOTES = (
    "cov is the half-symmetrised covariance <PX+XP>/2; delta_xp = 2 cov is the fully symmetrised value",
    "g is the Hamiltonian coefficient (force -g); a forced oscillator is displaced by "
    "x_bar = -S/(m omega) with S(t) = int g(s) sin(omega (t - s)) ds",
)


def fmt(v):
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, str) else fmt(r) for r in row])


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def snapshot_name(t):
    return f"psi_{format(float(t), '.10g')}.csv"


# --------------------------------------------------------------------- run

def run(scenario: Scenario, out_dir=None):
    """Evolve the scenario and write series.csv, snapshots/ and summary.json."""
    started = time.perf_counter()
    evo = evolve(scenario)
    runtime = time.perf_counter() - started
    final = evo.records[-1]
    summary = {
        "inputs": scenario_to_dict(scenario),
        "backend": kernels.BACKEND,
        "n_steps": int(len(evo.sample_times) - 1),
        "n_records": len(evo.records),
        "final": asdict(final),
        "max_norm_drift": max(abs(r.norm - 1.0) for r in evo.records),
        "max_leak": max(r.leak for r in evo.records),
        "snapshots": {format(t, ".10g"): snapshot_name(t) for t in scenario.outputs.snapshots},
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if scenario.outputs.series:
            write_csv(os.path.join(out_dir, "series.csv"), SERIES_COLUMNS,
                      [[getattr(r, c) for c in SERIES_COLUMNS] for r in evo.records])
        if evo.snapshots:
            snap_dir = os.path.join(out_dir, "snapshots")
            os.makedirs(snap_dir, exist_ok=True)
            for ts, psi in evo.snapshots.items():
                amp = psi.amplitudes
                write_csv(os.path.join(snap_dir, snapshot_name(ts)), ("x", "re", "im"),
                          zip(psi.grid.x, amp.real, amp.imag))
        write_json(os.path.join(out_dir, "summary.json"), summary)
        write_json(os.path.join(out_dir, "timing.json"), {"runtime_seconds": runtime})
    return summary, evo


# ------------------------------------------------------------------ verify

@dataclass
class VerifyRecord:
    t: float
    position_residual: float
    momentum_residual: float
    moment_delta: float
    moment_deltas: dict
    x_bar: float
    p_bar: float
    beta: float
    gamma: float
    norm_full: float
    norm_reduced: float
    leak: float


@dataclass
class VerifyReport:
    name: str
    records: list
    tolerances: dict
    summary: dict = field(default_factory=dict)
    passed: bool = False
    notes: tuple = CONVENTION_NOTES

    def to_dict(self):
        return {
            "name": self.name,
            "pass": self.passed,
            "summary": self.summary,
            "tolerances": self.tolerances,
            "notes": list(self.notes),
            "records": [asdict(r) for r in self.records],
        }


def moment_profile(psi):
    """Centred moments of orders 2..6 on both axes plus the covariance."""
    out = {}
    for n in MOMENT_ORDERS:
        out[f"x{n}"] = centered_moment(psi, POSITION, n)
        out[f"p{n}"] = centered_moment(psi, MOMENTUM, n, check=False)
    out["cov"] = covariance(psi)
    return out


def verify(scenario: Scenario, corrupt_beta=None, out_dir=None, pair=None) -> VerifyReport:
    """Compare direct evolution with the shift-and-phase image of the stripped evolution.

    ``pair`` may pass in ``evolve_pair(scenario)`` computed earlier, so that
    several checks (say, with and without a corrupted beta) share one run.
    """
    if not scenario.coefficients.has_linear_terms():
        raise ConfigError("coefficients", "verify requires linear terms (f or g nonzero)")
    corrupt = scenario.corrupt_beta if corrupt_beta is None else corrupt_beta
    full, reduced = evolve_pair(scenario) if pair is None else pair
    tw = scenario.time
    shifts = integrate_shift(scenario.coefficients, (tw.t0, tw.t_end), tw.dt)
    idx = record_indices(len(shifts), tw.output_stride)
    tol = scenario.tolerances
    modes = scenario.outputs.verify_modes
    hbar = scenario.params.hbar

    records = []
    for k, psi, Psi, obs_f, obs_r in zip(idx, full.states, reduced.states, full.records, reduced.records):
        shift = shifts[k]
        if corrupt:
            shift = shift.with_beta_offset(corrupt * hbar)
        res = {m: theorem_residual(psi, Psi, shift, scenario.params, m).l2_residual for m in modes}
        mf, mr = moment_profile(psi), moment_profile(Psi)
        deltas = {key: abs(mf[key] - mr[key]) for key in mf}
        records.append(VerifyRecord(
            t=float(psi.t),
            position_residual=res.get(POSITION, float("nan")),
            momentum_residual=res.get(MOMENTUM, float("nan")),
            moment_delta=max(deltas.values()),
            moment_deltas=deltas,
            x_bar=shift.x_bar, p_bar=shift.p_bar, beta=shift.beta, gamma=shift.gamma,
            norm_full=obs_f.norm, norm_reduced=obs_r.norm,
            leak=max(obs_f.leak, obs_r.leak),
        ))

    def peak(attr):
        vals = [getattr(r, attr) for r in records]
        return max(vals) if not any(math.isnan(v) for v in vals) else None

    summary = {
        "max_position_residual": peak("position_residual"),
        "max_momentum_residual": peak("momentum_residual"),
        "max_moment_delta": peak("moment_delta"),
        "max_norm_drift": max(max(abs(r.norm_full - 1), abs(r.norm_reduced - 1)) for r in records),
        "max_leak": peak("leak"),
        "corrupt_beta": corrupt,
        "method": scenario.propagator.method,
        "stencil_order": scenario.propagator.stencil_order,
        "backend": kernels.BACKEND,
    }
    checks = {
        "max_position_residual": tol.position_residual,
        "max_momentum_residual": tol.momentum_residual,
        "max_moment_delta": tol.moment_delta,
        "max_norm_drift": tol.norm_drift,
        "max_leak": tol.boundary_leak,
    }
    passed = all(summary[k] is None or summary[k] <= v for k, v in checks.items())
    report = VerifyReport(scenario.name, records, dict(checks), summary, passed)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        data = report.to_dict()
        data["inputs"] = scenario_to_dict(scenario)
        write_json(os.path.join(out_dir, "verify.json"), data)
    return report


def reverify(data: dict) -> bool:
    """Recompute pass/fail from a verify.json document alone."""
    summary, tol = data["summary"], data["tolerances"]
    return all(summary[k] is None or summary[k] <= v for k, v in tol.items())


# ------------------------------------------------------------- convergence

CONVERGENCE_COLUMNS = ("level", "dt", "position_residual", "momentum_residual",
                       "position_order", "momentum_order")


PLATEAU_RTOL = 1e-2


def observed_order(coarse, fine, floor):
    """log2 of the error ratio, or "floor" once the error stops depending on dt.

    That is either error at or below the arithmetic ``floor``, or a plateau
    where halving dt changes the error by less than 1% (a dt-independent
    spatial error dominates).
    """
    if coarse is None or fine is None:
        return ""
    if coarse <= floor or fine <= floor:
        return "floor"
    if abs(coarse - fine) <= PLATEAU_RTOL * max(coarse, fine):
        return "floor"
    return math.log2(coarse / fine)


def convergence(scenario: Scenario, levels: int, out_dir=None):
    """Rerun verify with dt halved per level; residuals are taken at the same times."""
    if levels < 3:
        raise ConfigError("levels", f"convergence needs at least 3 levels, got {levels}")
    floor = scenario.tolerances.convergence_floor
    rows = []
    prev = None
    for level in range(levels):
        factor = 2 ** level
        tw = scenario.time
        sc = replace(scenario, time=replace(tw, dt=tw.dt / factor, output_stride=tw.output_stride * factor))
        rep = verify(sc)
        cur = (rep.summary["max_position_residual"], rep.summary["max_momentum_residual"])
        orders = ("", "") if prev is None else tuple(observed_order(p, c, floor) for p, c in zip(prev, cur))
        rows.append({
            "level": level, "dt": sc.time.dt,
            "position_residual": cur[0], "momentum_residual": cur[1],
            "position_order": orders[0], "momentum_order": orders[1],
        })
        prev = cur
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, "convergence.csv"), CONVERGENCE_COLUMNS,
                  [[_cell(r[c]) for c in CONVERGENCE_COLUMNS] for r in rows])
    return rows


def _cell(v):
    if v is None:
        return "nan"
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return fmt(v)


# ------------------------------------------------------------------- sweep

def plan_sweep(template: dict, overrides):
    """Validate the override list and return ``[(name, patched_config), ...]``."""
    if not isinstance(overrides, list):
        raise ConfigError("overrides", "must be a JSON list of patches")
    plan, seen = [], set()
    for i, entry in enumerate(overrides):
        if not isinstance(entry, dict):
            raise ConfigError(f"overrides[{i}]", "must be an object")
        name = entry.get("name", f"case_{i:03d}")
        if not isinstance(name, str) or not name or os.sep in name or name in (".", ".."):
            raise ConfigError(f"overrides[{i}].name", f"invalid output name {name!r}")
        if name in seen:
            raise ConfigError(f"overrides[{i}].name", f"duplicate output name {name!r}")
        seen.add(name)
        patch = entry.get("patch", {})
        if not isinstance(patch, dict):
            raise ConfigError(f"overrides[{i}].patch", "must be an object")
        cfg = deep_merge(template, patch)
        cfg["name"] = name
        plan.append((name, cfg))
    return plan


def _sweep_one(args):
    name, cfg, out_dir, mode = args
    entry = {"name": name, "out_dir": os.path.basename(out_dir), "mode": mode}
    try:
        scenario = parse_config(cfg)
        if mode == "verify":
            rep = verify(scenario, out_dir=out_dir)
            entry.update(status="ok" if rep.passed else "fail", exit_code=0 if rep.passed else 1)
        else:
            run(scenario, out_dir)
            entry.update(status="ok", exit_code=0)
    except ConfigError as exc:
        entry.update(status="failed", exit_code=2, error=str(exc))
    except QuadShiftError as exc:
        entry.update(status="failed", exit_code=3, error=f"{type(exc).__name__}: {exc}")
    return entry


def sweep(template: dict, overrides, out_dir, mode="run", jobs=1):
    """Run every patched scenario in its own directory and index them in manifest.json."""
    if mode not in ("run", "verify"):
        raise ConfigError("mode", f"must be 'run' or 'verify', got {mode!r}")
    plan = plan_sweep(template, overrides)
    os.makedirs(out_dir, exist_ok=True)
    tasks = [(name, cfg, os.path.join(out_dir, name), mode) for name, cfg in plan]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_sweep_one, tasks))
    else:
        entries = [_sweep_one(t) for t in tasks]
    manifest = {"mode": mode, "count": len(entries), "entries": entries}
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest
