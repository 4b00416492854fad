"""Classical trajectories, the shift trajectory and its phase accumulators.

Classical motion under the quadratic Hamiltonian obeys

    dx/dt = a p + b x + f,     dp/dt = -(b p + c x + g).

The shift (x_bar, p_bar) is the solution with zero data at the turn-on
time t0; it is how far the linear terms push any wave packet. The phase
accumulator beta obeys dbeta/dt = a p_bar^2/2 - c x_bar^2/2 + f p_bar, and
gamma = p_bar x_bar - beta is its momentum-space partner.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import CrossCheckFailure, NonFiniteState, QuadratureFailure
from .model import CoefficientFunction, CoefficientSet, step_pieces, time_grid

QUAD_TOL = 1e-12


@dataclass(frozen=True)
class ClassicalState:
    x: float
    p: float
    t: float


@dataclass(frozen=True)
class ShiftState:
    x_bar: float
    p_bar: float
    beta: float
    gamma: float
    t: float

    @classmethod
    def zero(cls, t):
        return cls(0.0, 0.0, 0.0, 0.0, t)

    def with_beta_offset(self, delta):
        """Same shift with beta moved by ``delta`` (gamma follows so that beta + gamma is kept)."""
        return ShiftState(self.x_bar, self.p_bar, self.beta + delta, self.gamma - delta, self.t)


def rk4_solve(rhs, y0, times, breakpoints=()):
    """Classical RK4 on the given sample times.

    Steps are split at ``breakpoints`` and the right-hand side is taken as
    the left limit at a breakpoint ending a piece, so piecewise coefficients
    keep the fourth-order rate.
    """
    y = np.array(y0, dtype=float)
    out = np.empty((len(times), y.size))
    out[0] = y
    breaks = set(breakpoints)
    for k in range(1, len(times)):
        for t, t_next in step_pieces(times[k - 1], times[k], breakpoints):
            h = t_next - t
            t_end = np.nextafter(t_next, -np.inf) if t_next in breaks else t_next
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t_end, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(f"non-finite state at t={times[k]}; reduce dt")
        out[k] = y
    return out


def integrate_trajectory(coeffs: CoefficientSet, x0, p0, t_span, dt):
    """RK4 solution of the classical equations, one sample per step."""
    times = time_grid(t_span[0], t_span[1], dt)

    def rhs(t, y):
        a, b, c, f, g = coeffs(t)
        x, p = y
        return np.array([a * p + b * x + f, -(b * p + c * x + g)])

    ys = rk4_solve(rhs, (x0, p0), times, coeffs.breakpoints)
    return [ClassicalState(float(x), float(p), float(t)) for (x, p), t in zip(ys, times)]


def integrate_shift(coeffs: CoefficientSet, t_span, dt, check=True):
    """Shift trajectory and phase accumulators sampled on the step grid.

    beta is integrated in differential form together with (x_bar, p_bar).
    Unless ``check`` is off, it is compared against the closed form
    ``p_bar x_bar / 2 + (1/2) int (f p_bar + g x_bar)`` evaluated by the
    trapezoid rule on the same samples.
    """
    t_start, t_end = t_span
    if abs(t_start - coeffs.t0) > 1e-12 * max(1.0, abs(coeffs.t0)):
        raise ValueError(f"shift integration must start at the turn-on time t0={coeffs.t0}")
    times = time_grid(t_start, t_end, dt)

    def rhs(t, y):
        a, b, c, f, g = coeffs(t)
        xb, pb, _ = y
        return np.array([
            a * pb + b * xb + f,
            -(b * pb + c * xb + g),
            0.5 * a * pb * pb - 0.5 * c * xb * xb + f * pb,
        ])

    ys = rk4_solve(rhs, (0.0, 0.0, 0.0), times, coeffs.breakpoints)
    xb, pb, beta = ys[:, 0], ys[:, 1], ys[:, 2]
    gamma = pb * xb - beta

    if check and len(times) > 2:
        h = coeffs.f(times) * pb + coeffs.g(times) * xb
        segs = np.concatenate([[0.0], 0.5 * (h[1:] + h[:-1]) * np.diff(times)])
        fine = np.cumsum(segs)
        closed = 0.5 * pb * xb + 0.5 * fine
        # Richardson estimate of the trapezoid error at every even sample
        th, hh = times[::2], h[::2]
        coarse = np.concatenate([[0.0], np.cumsum(0.5 * (hh[1:] + hh[:-1]) * np.diff(th))])
        err_est = np.max(np.abs(fine[::2] - coarse)) / 3.0
        tol = 100.0 * (0.5 * err_est + 1e-12 * (1.0 + np.max(np.abs(beta))))
        worst = float(np.max(np.abs(closed - beta)))
        if worst > tol:
            raise CrossCheckFailure(
                f"differential beta and closed-form beta differ by {worst:.3e} (allowed {tol:.3e})"
            )

    return [
        ShiftState(float(x), float(p), float(bt), float(gm), float(t))
        for x, p, bt, gm, t in zip(xb, pb, beta, gamma, times)
    ]


def _quad(func, lo, hi, points=()):
    if hi == lo:
        return 0.0
    inner = sorted(p for p in points if lo < p < hi)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                func, lo, hi, points=inner or None, epsabs=QUAD_TOL / 10, epsrel=1e-13, limit=200
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from exc
    if not err <= QUAD_TOL * max(1.0, abs(val)):
        raise QuadratureFailure(f"quadrature error estimate {err:.2e} above {QUAD_TOL:g}")
    return val


def _check_window(t0, t, positive):
    if t < t0:
        raise ValueError(f"t={t} precedes turn-on time t0={t0}")
    for name, val in positive.items():
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")


def free_particle_shift(g_fn: CoefficientFunction, m, t0, t):
    """Free particle of mass m with a uniform force -g(t) switched on at t0.

    Returns ``(x_bar, p_bar, beta) = (-G1/m, -G, G2/(2m))`` with G the
    integral of g, G1 the integral of G and G2 the integral of G^2.
    """
    _check_window(t0, t, {"m": m})
    pts = g_fn.breakpoints

    def G(s):
        return _quad(g_fn, t0, s, pts)

    big_g = G(t)
    g1 = _quad(G, t0, t, pts)
    g2 = _quad(lambda s: G(s) ** 2, t0, t, pts)
    return -g1 / m, -big_g, g2 / (2.0 * m)


def forced_oscillator_shift(g_fn: CoefficientFunction, m, omega, t0, t):
    """Oscillator of mass m and frequency omega with a uniform force -g(t) from t0.

    With S(t) = int g(t') sin w(t - t') dt' and C(t) = int g(t') cos w(t - t') dt',
    returns ``(-S/(m w), -C, (S C - int g S) / (2 m w))``.
    """
    _check_window(t0, t, {"m": m, "omega": omega})
    pts = g_fn.breakpoints

    def S(s):
        return _quad(lambda u: g_fn(u) * math.sin(omega * (s - u)), t0, s, pts)

    def C(s):
        return _quad(lambda u: g_fn(u) * math.cos(omega * (s - u)), t0, s, pts)

    s_t, c_t = S(t), C(t)
    gs = _quad(lambda u: g_fn(u) * S(u), t0, t, pts)
    mw = m * omega
    return -s_t / mw, -c_t, (s_t * c_t - gs) / (2.0 * mw)
