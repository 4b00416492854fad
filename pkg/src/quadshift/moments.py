"""Centred moments of wave packets and the closed second-moment flow.

Covariance convention: ``cov = <P X + X P>/2`` with X = x - <x>, P = p - <p>.
With this (half-symmetrised) definition the second moments obey

    d var_x/dt = 2 a cov + 2 b var_x
    d cov/dt   = a var_p - c var_x
    d var_p/dt = -2 b var_p - 2 c cov

which involves neither f nor g. ``MomentState.delta_xp`` gives the fully
symmetrised value ``<P X + X P>`` (twice ``cov``) for reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import rk4_solve
from .errors import UnderResolved
from .model import MOMENTUM, POSITION, CoefficientFunction, WaveFunction, time_grid
from .transform import to_momentum, to_position

MIN_MOMENTUM_SPREAD = 4  # in units of the momentum lattice spacing


@dataclass(frozen=True)
class MomentState:
    var_x: float
    cov: float
    var_p: float

    @property
    def delta_xp(self):
        return 2.0 * self.cov

    def as_array(self):
        return np.array([self.var_x, self.cov, self.var_p])


def _weights(psi):
    return psi.density() * psi.spacing


def mean_position(psi: WaveFunction) -> float:
    psi = to_position(psi)
    return float(np.sum(psi.grid.x * _weights(psi)))


def mean_momentum(psi: WaveFunction) -> float:
    phi = to_momentum(psi)
    return float(np.sum(phi.coordinates * _weights(phi)))


def centered_moment(psi: WaveFunction, axis: str, n: int, check: bool = True) -> float:
    """``<(x - <x>)^n>`` for axis="position", ``<(p - <p>)^n>`` for axis="momentum".

    Momentum moments require the spread to cover at least four lattice
    spacings unless ``check`` is off.
    """
    if n < 1:
        raise ValueError(f"moment order must be >= 1, got {n}")
    if axis == POSITION:
        rep = to_position(psi)
    elif axis == MOMENTUM:
        rep = to_momentum(psi)
    else:
        raise ValueError(f"unknown axis {axis!r}")
    w = _weights(rep)
    u = rep.coordinates
    dev = u - np.sum(u * w)
    if axis == MOMENTUM and check:
        spread = math.sqrt(float(np.sum(dev**2 * w)))
        if spread < MIN_MOMENTUM_SPREAD * rep.spacing:
            raise UnderResolved(
                f"momentum spread {spread:.3g} is below {MIN_MOMENTUM_SPREAD} lattice spacings "
                f"({rep.spacing:.3g}); enlarge the grid span"
            )
    return float(np.sum(dev**n * w))


def _apply_p(amplitudes, dx, hbar):
    q = 2.0 * np.pi * np.fft.fftfreq(amplitudes.shape[0], dx)
    return np.fft.ifft(hbar * q * np.fft.fft(amplitudes))


def covariance(psi: WaveFunction, params=None) -> float:
    """Half-symmetrised covariance ``<P X + X P>/2``, with P applied spectrally."""
    psi = to_position(psi)
    hbar = psi.hbar if params is None else params.hbar
    dx = psi.grid.dx
    amp = psi.amplitudes
    w = np.abs(amp) ** 2 * dx
    X = psi.grid.x - np.sum(psi.grid.x * w)
    p_mean = float(np.real(np.sum(np.conj(amp) * _apply_p(amp, dx, hbar)) * dx))

    def P(v):
        return _apply_p(v, dx, hbar) - p_mean * v

    total = np.sum(np.conj(amp) * (P(X * amp) + X * P(amp))) * dx
    scale = math.sqrt(float(np.sum(X**2 * w))) * math.sqrt(max(float(np.sum(np.abs(P(amp)) ** 2) * dx), 1e-300))
    if abs(total.imag) > 1e-10 * max(1.0, scale):
        raise ArithmeticError(f"covariance has imaginary part {total.imag:.3e}")
    return 0.5 * float(total.real)


def extract_moments(psi: WaveFunction, params=None, check: bool = True) -> MomentState:
    psi = to_position(psi)
    return MomentState(
        centered_moment(psi, POSITION, 2),
        covariance(psi, params),
        centered_moment(psi, MOMENTUM, 2, check),
    )


def evolve_second_moments(a: CoefficientFunction, b: CoefficientFunction, c: CoefficientFunction,
                          init: MomentState, t_span, dt):
    """RK4 on the closed second-moment equations, sampled on ``time_grid(*t_span, dt)``.

    Only a, b, c are inputs: the linear terms cannot influence the result.
    """
    if not (init.var_x > 0 and init.var_p > 0):
        raise ValueError("initial variances must be positive")
    times = time_grid(t_span[0], t_span[1], dt)

    def rhs(t, y):
        at, bt, ct = a(t), b(t), c(t)
        vx, cv, vp = y
        return np.array([
            2.0 * at * cv + 2.0 * bt * vx,
            at * vp - ct * vx,
            -2.0 * bt * vp - 2.0 * ct * cv,
        ])

    breaks = sorted(set(a.breakpoints) | set(b.breakpoints) | set(c.breakpoints))
    ys = rk4_solve(rhs, init.as_array(), times, breaks)
    return [MomentState(*map(float, y)) for y in ys]


def symplectic_invariant(m: MomentState) -> float:
    """``var_x var_p - cov^2``; conserved by the flow, at least hbar^2/4 for pure states."""
    return m.var_x * m.var_p - m.cov * m.cov
