"""Shift-and-phase map between linear-term-free and full solutions.

If ``Psi`` solves the Schroedinger equation for the Hamiltonian without
f and g, then

    psi(x, t) = exp[i (p_bar x - beta) / hbar] Psi(x - x_bar, t)

solves it with them, and in momentum space

    phi(p, t) = exp[-i (x_bar p - gamma) / hbar] Phi(p - p_bar, t).

Translations are done spectrally, so they are exact for band-limited
packets that stay away from the grid edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasedShift
from .model import MOMENTUM, POSITION, PhysicalParams, WaveFunction

ALIAS_FRACTION = 0.25


@dataclass(frozen=True)
class ResidualReport:
    l2_residual: float
    max_pointwise: float
    t: float
    representation: str


def spectral_translate(values, spacing, shift):
    """Samples of ``u -> f(u - shift)`` given samples of f on a uniform lattice."""
    values = np.asarray(values, dtype=complex)
    q = 2.0 * np.pi * np.fft.fftfreq(values.shape[0], spacing)
    return np.fft.ifft(np.fft.fft(values) * np.exp(-1j * q * shift))


def to_momentum(psi: WaveFunction, params: PhysicalParams | None = None) -> WaveFunction:
    """Discrete version of phi(p) = (2 pi hbar)^-1/2 int exp(-i p x / hbar) psi(x) dx."""
    if psi.representation == MOMENTUM:
        return psi
    hbar = psi.hbar if params is None else params.hbar
    grid = psi.grid
    p = grid.p(hbar)
    phi = np.fft.fftshift(np.fft.fft(psi.amplitudes))
    phi *= grid.dx / math.sqrt(2.0 * math.pi * hbar) * np.exp(-1j * p * grid.x_min / hbar)
    return WaveFunction(phi, grid, psi.t, MOMENTUM, hbar)


def to_position(phi: WaveFunction, params: PhysicalParams | None = None) -> WaveFunction:
    """Inverse of :func:`to_momentum`."""
    if phi.representation == POSITION:
        return phi
    hbar = phi.hbar if params is None else params.hbar
    grid = phi.grid
    p = grid.p(hbar)
    scaled = phi.amplitudes * np.exp(1j * p * grid.x_min / hbar) * (math.sqrt(2.0 * math.pi * hbar) / grid.dx)
    psi = np.fft.ifft(np.fft.ifftshift(scaled))
    return WaveFunction(psi, grid, phi.t, POSITION, hbar)


def _check_time(psi, shift):
    if abs(psi.t - shift.t) > 1e-9 * max(1.0, abs(shift.t)):
        raise ValueError(f"wave function at t={psi.t} but shift state at t={shift.t}")


def _check_alias(shift_amount, span, what):
    if abs(shift_amount) > ALIAS_FRACTION * span:
        raise AliasedShift(
            f"{what} shift {shift_amount:.6g} exceeds {ALIAS_FRACTION:.0%} of the lattice span {span:.6g}"
        )


def apply_linear_shift(Psi: WaveFunction, shift, params: PhysicalParams | None = None) -> WaveFunction:
    """Map the linear-term-free solution to the full one at ``shift.t``."""
    if Psi.representation != POSITION:
        raise ValueError("apply_linear_shift expects a position-space wave function")
    _check_time(Psi, shift)
    hbar = Psi.hbar if params is None else params.hbar
    grid = Psi.grid
    _check_alias(shift.x_bar, grid.span, "position")
    moved = spectral_translate(Psi.amplitudes, grid.dx, shift.x_bar)
    moved *= np.exp(1j * (shift.p_bar * grid.x - shift.beta) / hbar)
    return Psi.replace(moved)


def invert_linear_shift(psi: WaveFunction, shift, params: PhysicalParams | None = None) -> WaveFunction:
    """Recover the linear-term-free solution from the full one."""
    if psi.representation != POSITION:
        raise ValueError("invert_linear_shift expects a position-space wave function")
    _check_time(psi, shift)
    hbar = psi.hbar if params is None else params.hbar
    grid = psi.grid
    _check_alias(shift.x_bar, grid.span, "position")
    unphased = psi.amplitudes * np.exp(-1j * (shift.p_bar * grid.x - shift.beta) / hbar)
    return psi.replace(spectral_translate(unphased, grid.dx, -shift.x_bar))


def apply_momentum_shift(Phi: WaveFunction, shift, params: PhysicalParams | None = None) -> WaveFunction:
    """Momentum-space counterpart: Phi(p) -> exp[-i (x_bar p - gamma)/hbar] Phi(p - p_bar).

    gamma is taken as ``p_bar x_bar - beta`` so the two representations can
    never disagree about the phase.
    """
    if Phi.representation != MOMENTUM:
        raise ValueError("apply_momentum_shift expects a momentum-space wave function")
    _check_time(Phi, shift)
    hbar = Phi.hbar if params is None else params.hbar
    grid = Phi.grid
    dp = grid.dp(hbar)
    _check_alias(shift.p_bar, grid.n * dp, "momentum")
    gamma = shift.p_bar * shift.x_bar - shift.beta
    moved = spectral_translate(Phi.amplitudes, dp, shift.p_bar)
    moved *= np.exp(-1j * (shift.x_bar * grid.p(hbar) - gamma) / hbar)
    return Phi.replace(moved)


def residual(reference: WaveFunction, candidate: WaveFunction) -> ResidualReport:
    """Raw L2 distance relative to ``reference``; no global phase is fitted."""
    diff = reference.amplitudes - candidate.amplitudes
    ref_norm = np.sqrt(np.sum(np.abs(reference.amplitudes) ** 2))
    l2 = float(np.sqrt(np.sum(np.abs(diff) ** 2)) / ref_norm)
    peak = float(np.max(np.abs(diff)) / np.max(np.abs(reference.amplitudes)))
    return ResidualReport(l2, peak, reference.t, reference.representation)


def theorem_residual(full: WaveFunction, reduced: WaveFunction, shift,
                     params: PhysicalParams | None = None,
                     representation: str = POSITION) -> ResidualReport:
    """Distance between ``full`` and the shift-and-phase image of ``reduced``."""
    if abs(full.t - reduced.t) > 1e-9 * max(1.0, abs(full.t)):
        raise ValueError(f"full at t={full.t}, reduced at t={reduced.t}")
    if representation == POSITION:
        return residual(full, apply_linear_shift(reduced, shift, params))
    if representation == MOMENTUM:
        phi = to_momentum(full, params)
        predicted = apply_momentum_shift(to_momentum(reduced, params), shift, params)
        return residual(phi, predicted)
    raise ValueError(f"unknown representation {representation!r}")
