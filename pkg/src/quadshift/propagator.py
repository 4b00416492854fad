"""Wave-function propagation under the full quadratic Hamiltonian.

H(t) is discretised on the grid as a Hermitian banded matrix: central
differences of selectable order for p and p^2, the diagonal x for the
potential terms, and the symmetrised product for b (p x + x p)/2, so the
matrix is Hermitian entry by entry. Dirichlet boundaries; a leak monitor
rejects runs where the packet reaches the margins. Steps are split at
coefficient breakpoints so no step straddles a jump.

Two steppers, both second order with midpoint coefficients:

``expm``  psi <- exp(-i dt H(t + dt/2)/hbar) psi via a Chebyshev series.
          Exact propagator of the piecewise-constant Hamiltonian, so the
          linear-term shift is reproduced step by step (default).
``cn``    Crank-Nicolson (Cayley) step solved by banded elimination;
          the tridiagonal case (stencil_order=2) is the Thomas algorithm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import jv

from . import kernels
from .errors import BoundaryLeak
from .model import (
    POSITION,
    CoefficientSet,
    Grid,
    PhysicalParams,
    WaveFunction,
    make_packet,
    step_pieces,
    strip_linear,
    time_grid,
)
from .moments import MomentState, centered_moment, covariance, mean_momentum, mean_position

DEFAULT_STENCIL_ORDER = 10
STENCIL_ORDERS = (2, 4, 6, 8, 10)
METHODS = ("expm", "cn")
LEAK_MARGIN = 0.05
LEAK_LIMIT = 1e-6
CHEBYSHEV_EPS = 1e-17


@lru_cache(maxsize=None)
def stencil_weights(order):
    """Exact central-difference weights of the given (even) accuracy order.

    Returns ``(w0, w2, w1)``: ``f'' ~ (w0 f_0 + sum_s w2[s-1] (f_s + f_-s)) / dx^2`` and
    ``f' ~ sum_s w1[s-1] (f_s - f_-s) / dx``.
    """
    if order not in STENCIL_ORDERS:
        raise ValueError(f"stencil order must be one of {STENCIL_ORDERS}, got {order}")
    m = order // 2
    fm = math.factorial(m) ** 2
    w1, w2 = [], []
    for s in range(1, m + 1):
        base = Fraction((-1) ** (s + 1) * fm, math.factorial(m - s) * math.factorial(m + s))
        w1.append(base / s)
        w2.append(2 * base / (s * s))
    w0 = -2 * sum(w2)
    return float(w0), tuple(map(float, w2)), tuple(map(float, w1))


@dataclass(frozen=True, eq=False)
class BandedOperator:
    """Hermitian banded matrix; only the diagonal and the upper bands are stored.

    ``upper[s-1, j] = H[j, j+s]`` for ``j < n - s`` (trailing entries are zero).
    The lower bands are their conjugates by definition, so Hermiticity holds
    bit-for-bit.
    """

    diag: np.ndarray
    upper: np.ndarray
    t: float = 0.0

    @property
    def n(self):
        return self.diag.shape[0]

    @property
    def bandwidth(self):
        return self.upper.shape[0]

    def band(self, s):
        """Upper band ``s`` (1-based) as an array of length n - s."""
        return self.upper[s - 1, : self.n - s]

    def lower_band(self, s):
        return np.conj(self.band(s))

    @property
    def off_upper(self):
        return self.band(1)

    @property
    def off_lower(self):
        return self.lower_band(1)

    def to_dense(self):
        out = np.diag(self.diag.astype(complex))
        for s in range(1, self.bandwidth + 1):
            out += np.diag(self.band(s), s) + np.diag(self.lower_band(s), -s)
        return out

    def matvec(self, v):
        return kernels.band_matvec(self.diag, self.upper, v)

    def spectral_bounds(self):
        """Gershgorin enclosure ``(lo, hi)`` of the spectrum."""
        radius = np.zeros(self.n)
        for s in range(1, self.bandwidth + 1):
            mag = np.abs(self.band(s))
            radius[: self.n - s] += mag
            radius[s:] += mag
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))


# Kept for readers looking for the 3-point case by name.
TridiagonalOperator = BandedOperator


@lru_cache(maxsize=32)
def _stencil_layout(grid: Grid, order: int):
    x = grid.x
    m = order // 2
    pair_sum = np.zeros((m, grid.n))
    valid = np.zeros((m, grid.n), dtype=bool)
    for s in range(1, m + 1):
        pair_sum[s - 1, : grid.n - s] = x[:-s] + x[s:]
        valid[s - 1, : grid.n - s] = True
    return x, pair_sum, valid


def build_generator(coeffs: CoefficientSet, grid: Grid, t, params: PhysicalParams = PhysicalParams(),
                    stencil_order: int = DEFAULT_STENCIL_ORDER) -> BandedOperator:
    """Assemble H(t) on ``grid``."""
    a, b, c, f, g = coeffs(t)
    return _assemble(a, b, c, f, g, grid, t, params.hbar, stencil_order)


def _assemble(a, b, c, f, g, grid, t, hbar, order):
    w0, w2, w1 = stencil_weights(order)
    x, pair_sum, valid = _stencil_layout(grid, order)
    dx = grid.dx
    diag = (-0.5 * a * hbar * hbar * w0 / (dx * dx)) + 0.5 * c * x * x + g * x
    w2a = np.asarray(w2)[:, None]
    w1a = np.asarray(w1)[:, None]
    upper = (-0.5 * a * hbar * hbar / (dx * dx)) * w2a + (-1j * hbar * f / dx) * w1a
    upper = upper + (-0.5j * hbar * b / dx) * w1a * pair_sum
    upper = np.where(valid, upper, 0.0).astype(complex)
    return BandedOperator(np.ascontiguousarray(diag, dtype=float), np.ascontiguousarray(upper), float(t))


def chebyshev_coefficients(op: BandedOperator, dt, hbar):
    """Series coefficients and scaling for exp(-i dt H / hbar) on the Gershgorin interval."""
    lo, hi = op.spectral_bounds()
    center = 0.5 * (hi + lo)
    half = max(0.5 * (hi - lo), 1e-300)
    z = dt * half / hbar
    k_max = int(abs(z) + 10.0 * abs(z) ** (1.0 / 3.0) + 30)
    ks = np.arange(k_max + 1)
    bessel = jv(ks, z)
    significant = np.nonzero(np.abs(bessel) > CHEBYSHEV_EPS)[0]
    k_last = int(significant[-1]) if significant.size else 0
    ks = ks[: k_last + 1]
    coef = (-1j) ** ks * bessel[: k_last + 1]
    coef[1:] *= 2.0
    coef *= np.exp(-1j * dt * center / hbar)
    return coef, center, half


def exponential_propagate(op: BandedOperator, amplitudes, dt, hbar=1.0):
    """``exp(-i dt H / hbar) v``; dt may be negative."""
    coef, center, half = chebyshev_coefficients(op, dt, hbar)
    return kernels.chebyshev_apply(op.diag, op.upper, amplitudes, center, half, coef)


def cayley_propagate(op: BandedOperator, amplitudes, dt, hbar=1.0):
    """``(1 + i dt H/2hbar)^-1 (1 - i dt H/2hbar) v``; dt may be negative."""
    return kernels.cayley_solve(op.diag, op.upper, amplitudes, dt / (2.0 * hbar))


def _step(psi, coeffs, dt, params, stencil_order, propagate):
    if psi.representation != POSITION:
        raise ValueError("propagation works on position-space wave functions")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    op = build_generator(coeffs, psi.grid, psi.t + 0.5 * dt, params, stencil_order)
    return psi.replace(propagate(op, psi.amplitudes, dt, params.hbar), t=psi.t + dt)


def cn_step(psi: WaveFunction, coeffs: CoefficientSet, dt, params: PhysicalParams = PhysicalParams(),
            stencil_order: int = DEFAULT_STENCIL_ORDER) -> WaveFunction:
    """One Crank-Nicolson step with coefficients at the midpoint."""
    return _step(psi, coeffs, dt, params, stencil_order, cayley_propagate)


def expm_step(psi: WaveFunction, coeffs: CoefficientSet, dt, params: PhysicalParams = PhysicalParams(),
              stencil_order: int = DEFAULT_STENCIL_ORDER) -> WaveFunction:
    """One exponential-midpoint step."""
    return _step(psi, coeffs, dt, params, stencil_order, exponential_propagate)


STEPPERS = {"expm": exponential_propagate, "cn": cayley_propagate}


def boundary_leak(psi: WaveFunction) -> float:
    """Probability in the outer 5% of cells on each side."""
    if psi.representation != POSITION:
        raise ValueError("boundary_leak expects a position-space wave function")
    k = max(1, int(math.ceil(LEAK_MARGIN * psi.grid.n)))
    dens = psi.density()
    return float((np.sum(dens[:k]) + np.sum(dens[-k:])) * psi.grid.dx)


@dataclass(frozen=True)
class Observables:
    t: float
    norm: float
    mean_x: float
    mean_p: float
    var_x: float
    cov: float
    var_p: float
    leak: float

    @property
    def moments(self):
        return MomentState(self.var_x, self.cov, self.var_p)


SERIES_COLUMNS = ("t", "norm", "mean_x", "mean_p", "var_x", "cov", "var_p", "leak")


def observe(psi: WaveFunction) -> Observables:
    return Observables(
        t=float(psi.t),
        norm=psi.norm(),
        mean_x=mean_position(psi),
        mean_p=mean_momentum(psi),
        var_x=centered_moment(psi, "position", 2),
        cov=covariance(psi),
        var_p=centered_moment(psi, "momentum", 2, check=False),
        leak=boundary_leak(psi),
    )


def iter_evolution(psi0: WaveFunction, coeffs: CoefficientSet, times, params: PhysicalParams,
                   method: str = "expm", stencil_order: int = DEFAULT_STENCIL_ORDER):
    """Yield ``(k, psi_k)`` for every sample time, starting with ``(0, psi0)``."""
    try:
        propagate = STEPPERS[method]
    except KeyError:
        raise ValueError(f"unknown propagation method {method!r}; choose from {METHODS}") from None
    grid, hbar = psi0.grid, params.hbar
    amp = np.array(psi0.amplitudes)
    yield 0, psi0
    breaks = coeffs.breakpoints
    for k in range(1, len(times)):
        for t_prev, t_next in step_pieces(float(times[k - 1]), float(times[k]), breaks):
            h = t_next - t_prev
            a, b, c, f, g = coeffs(t_prev + 0.5 * h)
            op = _assemble(a, b, c, f, g, grid, t_prev + 0.5 * h, hbar, stencil_order)
            amp = propagate(op, amp, h, hbar)
        yield k, WaveFunction(amp, grid, float(times[k]), POSITION, hbar)


@dataclass
class Evolution:
    records: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    states: list = field(default_factory=list)
    final: WaveFunction | None = None
    sample_times: np.ndarray | None = None


def record_indices(n_samples, stride):
    idx = list(range(0, n_samples, stride))
    if idx[-1] != n_samples - 1:
        idx.append(n_samples - 1)
    return idx


def snapshot_indices(times, requested):
    """Map each requested time to the nearest sample index."""
    t0, dt = times[0], (times[1] - times[0]) if len(times) > 1 else 1.0
    out = {}
    for ts in requested:
        k = int(round((ts - t0) / dt))
        out[ts] = min(max(k, 0), len(times) - 1)
    return out


def evolve(scenario, coefficients: CoefficientSet | None = None, keep_states: bool = False,
           leak_limit: float | None = None) -> Evolution:
    """Run the scenario's propagation, recording observables every ``output_stride`` steps.

    ``coefficients`` overrides the scenario's (used to run the stripped
    Hamiltonian). With ``keep_states`` the wave functions at record times
    are kept in ``Evolution.states``.
    """
    coeffs = scenario.coefficients if coefficients is None else coefficients
    tw = scenario.time
    times = time_grid(tw.t0, tw.t_end, tw.dt)
    psi0 = make_packet(scenario.packet, scenario.grid, scenario.params, t=tw.t0)
    records = set(record_indices(len(times), tw.output_stride))
    snaps = snapshot_indices(times, scenario.outputs.snapshots)
    wanted_snaps = {}
    for ts, k in snaps.items():
        wanted_snaps.setdefault(k, []).append(ts)
    if leak_limit is None:
        leak_limit = getattr(getattr(scenario, "tolerances", None), "boundary_leak", LEAK_LIMIT)

    result = Evolution(sample_times=times)
    for k, psi in iter_evolution(psi0, coeffs, times, scenario.params,
                                 scenario.propagator.method, scenario.propagator.stencil_order):
        if k in records:
            obs = observe(psi)
            if obs.leak > leak_limit:
                raise BoundaryLeak(
                    f"leaked probability {obs.leak:.3e} at t={obs.t:.6g} exceeds {leak_limit:g}; widen the grid"
                )
            result.records.append(obs)
            if keep_states:
                result.states.append(psi)
        for ts in wanted_snaps.get(k, ()):
            result.snapshots[ts] = psi
        result.final = psi
    return result


def evolve_pair(scenario, keep_states: bool = True):
    """Evolve under the full Hamiltonian and under its linear-term-free part."""
    full = evolve(scenario, keep_states=keep_states)
    reduced = evolve(scenario, coefficients=strip_linear(scenario.coefficients), keep_states=keep_states)
    return full, reduced
