"""Domain types: coefficients of the quadratic Hamiltonian, grids, wave functions.

The Hamiltonian handled throughout the package is

    H = a p^2/2 + b (p x + x p)/2 + c x^2/2 + f p + g x

with each of a, b, c, f, g a closed-form function of time. ``g`` is the
Hamiltonian coefficient, so the physical uniform force is ``-g``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numpy.polynomial import hermite as _hermite

from .errors import PacketTooWide

POSITION = "position"
MOMENTUM = "momentum"
_REPRESENTATIONS = (POSITION, MOMENTUM)


@dataclass(frozen=True)
class PhysicalParams:
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive, got {self.hbar}")


@dataclass(frozen=True)
class Sinusoid:
    amp: float
    omega: float
    phase: float = 0.0


@dataclass(frozen=True)
class Segment:
    """One piece of a coefficient: cubic in ``u = t - t_start`` plus sinusoids in ``u``."""

    t_start: float
    poly: tuple = (0.0,)
    sin: tuple = ()

    def __post_init__(self):
        poly = tuple(float(c) for c in self.poly) or (0.0,)
        if len(poly) > 4:
            raise ValueError("segment polynomial has at most 4 coefficients (c0..c3)")
        object.__setattr__(self, "poly", poly)
        sins = tuple(s if isinstance(s, Sinusoid) else Sinusoid(*s) for s in self.sin)
        object.__setattr__(self, "sin", sins)

    def __call__(self, u):
        acc = 0.0
        for c in reversed(self.poly):
            acc = acc * u + c
        for s in self.sin:
            acc = acc + s.amp * np.sin(s.omega * u + s.phase)
        return acc

    def is_zero(self):
        return all(c == 0.0 for c in self.poly) and all(s.amp == 0.0 for s in self.sin)

    def recentred(self, t_new):
        """Same function written in ``t - t_new``."""
        shift = t_new - self.t_start
        # p(u) with u = v + shift, expanded in v
        poly = np.polynomial.Polynomial(self.poly)
        moved = poly(np.polynomial.Polynomial([shift, 1.0]))
        coef = tuple(moved.coef[:4]) if moved.coef.size else (0.0,)
        sins = tuple(Sinusoid(s.amp, s.omega, s.phase + s.omega * shift) for s in self.sin)
        return Segment(t_new, coef, sins)

    def scaled(self, lam):
        return Segment(
            self.t_start,
            tuple(lam * c for c in self.poly),
            tuple(Sinusoid(lam * s.amp, s.omega, s.phase) for s in self.sin),
        )


@dataclass(frozen=True)
class CoefficientFunction:
    """Piecewise closed-form function of time.

    Segment ``k`` is active on ``[t_start_k, t_start_{k+1})``; the last one
    extends to +inf. Evaluation before the first start time is an error.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("coefficient function needs at least one segment")
        starts = [s.t_start for s in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment start times must be strictly increasing")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_starts", starts)

    @classmethod
    def constant(cls, value, t_start=0.0):
        return cls((Segment(t_start, (float(value),)),))

    @classmethod
    def polynomial(cls, coeffs, t_start=0.0):
        return cls((Segment(t_start, tuple(coeffs)),))

    @classmethod
    def sinusoid(cls, amp, omega, phase=0.0, offset=0.0, t_start=0.0):
        return cls((Segment(t_start, (offset,), (Sinusoid(amp, omega, phase),)),))

    @classmethod
    def zero(cls, t_start=0.0):
        return cls.constant(0.0, t_start)

    @property
    def t_first(self):
        return self._starts[0]

    @property
    def breakpoints(self):
        return tuple(self._starts)

    def __call__(self, t):
        if np.ndim(t) == 0:
            t = float(t)
            if t < self._starts[0]:
                raise ValueError(f"t={t} precedes the first segment start {self._starts[0]}")
            seg = self.segments[bisect.bisect_right(self._starts, t) - 1]
            return float(seg(t - seg.t_start))
        t = np.asarray(t, dtype=float)
        if np.any(t < self._starts[0]):
            raise ValueError(f"times precede the first segment start {self._starts[0]}")
        idx = np.searchsorted(self._starts, t, side="right") - 1
        out = np.empty_like(t)
        for k, seg in enumerate(self.segments):
            mask = idx == k
            if np.any(mask):
                out[mask] = seg(t[mask] - seg.t_start)
        return out

    def is_zero(self):
        return all(s.is_zero() for s in self.segments)

    def scaled(self, lam):
        return CoefficientFunction(tuple(s.scaled(lam) for s in self.segments))

    def _segment_at(self, t):
        return self.segments[bisect.bisect_right(self._starts, t) - 1]

    def __add__(self, other):
        if not isinstance(other, CoefficientFunction):
            return NotImplemented
        starts = sorted(set(self._starts) | set(other._starts))
        lo = max(self.t_first, other.t_first)
        starts = [s for s in starts if s > lo]
        starts.insert(0, lo)
        segs = []
        for s in starts:
            p = self._segment_at(s).recentred(s)
            q = other._segment_at(s).recentred(s)
            n = max(len(p.poly), len(q.poly))
            poly = tuple(
                (p.poly[i] if i < len(p.poly) else 0.0) + (q.poly[i] if i < len(q.poly) else 0.0)
                for i in range(n)
            )
            segs.append(Segment(s, poly, p.sin + q.sin))
        return CoefficientFunction(tuple(segs))

    def to_dict(self):
        return {
            "segments": [
                {
                    "t_start": s.t_start,
                    "poly": list(s.poly),
                    "sin": [{"amp": w.amp, "omega": w.omega, "phase": w.phase} for w in s.sin],
                }
                for s in self.segments
            ]
        }


COEFFICIENT_NAMES = ("a", "b", "c", "f", "g")


@dataclass(frozen=True)
class CoefficientSet:
    a: CoefficientFunction
    b: CoefficientFunction
    c: CoefficientFunction
    f: CoefficientFunction
    g: CoefficientFunction
    t0: float = 0.0

    @classmethod
    def from_constants(cls, a=1.0, b=0.0, c=0.0, f=0.0, g=0.0, t0=0.0):
        mk = lambda v: v if isinstance(v, CoefficientFunction) else CoefficientFunction.constant(v, t0)
        return cls(mk(a), mk(b), mk(c), mk(f), mk(g), t0)

    def __call__(self, t):
        """Return ``(a, b, c, f, g)`` at time ``t``."""
        return tuple(getattr(self, k)(t) for k in COEFFICIENT_NAMES)

    def quadratic(self, t):
        return self.a(t), self.b(t), self.c(t)

    @property
    def breakpoints(self):
        """Sorted segment start times of all five coefficients."""
        return tuple(sorted({t for k in COEFFICIENT_NAMES for t in getattr(self, k).breakpoints}))

    def has_linear_terms(self):
        return not (self.f.is_zero() and self.g.is_zero())

    def check_window(self, times: Iterable[float]):
        """Raise ValueError unless a(t) > 0 at every sampled time."""
        times = np.asarray(list(times), dtype=float)
        for name in COEFFICIENT_NAMES:
            vals = getattr(self, name)(times)
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"coefficient {name} is not finite on the time window")
        a = self.a(times)
        if np.any(a <= 0):
            bad = times[np.argmax(a <= 0)]
            raise ValueError(f"a(t) must be positive; a({bad}) = {self.a(bad)}")

    def with_linear(self, f, g):
        return CoefficientSet(self.a, self.b, self.c, f, g, self.t0)

    def to_dict(self):
        out = {k: getattr(self, k).to_dict() for k in COEFFICIENT_NAMES}
        out["t0"] = self.t0
        return out


def strip_linear(coeffs: CoefficientSet) -> CoefficientSet:
    """Copy of ``coeffs`` with the linear terms f and g removed."""
    zero = CoefficientFunction.zero(min(coeffs.f.t_first, coeffs.g.t_first))
    return coeffs.with_linear(zero, zero)


def step_pieces(t_start, t_end, breakpoints=()):
    """Split ``[t_start, t_end]`` at the breakpoints strictly inside it.

    Fixed-step integrators call this so no step straddles a jump in a
    coefficient; within each piece the coefficients are smooth.
    """
    inner = [b for b in breakpoints if t_start < b < t_end]
    edges = [t_start, *inner, t_end]
    return list(zip(edges[:-1], edges[1:]))


def time_grid(t_start, t_end, dt):
    """Sample times ``t_start + k dt`` ending exactly at ``t_end`` (last step may be partial)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < t_start:
        raise ValueError(f"t_end={t_end} precedes t_start={t_start}")
    n_full = int(math.floor((t_end - t_start) / dt + 1e-9))
    times = t_start + dt * np.arange(n_full + 1)
    if t_end - times[-1] > 1e-12 * max(1.0, abs(t_end)):
        times = np.append(times, t_end)
    else:
        times[-1] = t_end
    return times


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 64 or n & (n - 1):
            raise ValueError(f"grid.n must be a power of two >= 64, got {n}")
        if not self.x_max > self.x_min:
            raise ValueError("grid needs x_max > x_min")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n

    @property
    def span(self):
        return self.x_max - self.x_min

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n)

    def dp(self, hbar=1.0):
        return 2.0 * np.pi * hbar / (self.n * self.dx)

    def p(self, hbar=1.0):
        """Momentum lattice in ascending order, k = -n/2 .. n/2-1."""
        return self.dp(hbar) * np.arange(-self.n // 2, self.n // 2)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    amplitudes: np.ndarray
    grid: Grid
    t: float = 0.0
    representation: str = POSITION
    hbar: float = 1.0

    def __post_init__(self):
        if self.representation not in _REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.shape != (self.grid.n,):
            raise ValueError(f"amplitudes must have shape ({self.grid.n},), got {amp.shape}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def spacing(self):
        return self.grid.dx if self.representation == POSITION else self.grid.dp(self.hbar)

    @property
    def coordinates(self):
        return self.grid.x if self.representation == POSITION else self.grid.p(self.hbar)

    def density(self):
        return np.abs(self.amplitudes) ** 2

    def norm(self):
        return math.sqrt(float(np.sum(self.density())) * self.spacing)

    def replace(self, amplitudes, t=None, representation=None):
        return WaveFunction(
            amplitudes,
            self.grid,
            self.t if t is None else t,
            self.representation if representation is None else representation,
            self.hbar,
        )


@dataclass(frozen=True)
class GaussianPacketSpec:
    x0: float = 0.0
    p0: float = 0.0
    sigma: float = 1.0
    hermite_n: int = 0
    chirp: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"packet.sigma must be positive, got {self.sigma}")
        if int(self.hermite_n) != self.hermite_n or not 0 <= self.hermite_n <= 10:
            raise ValueError(f"packet.hermite_n must be an integer in [0, 10], got {self.hermite_n}")

    @property
    def half_support(self):
        return 6.0 * self.sigma * math.sqrt(2 * self.hermite_n + 1)


def make_packet(spec: GaussianPacketSpec, grid: Grid, params: PhysicalParams = PhysicalParams(),
                t: float = 0.0) -> WaveFunction:
    """Normalised Hermite-Gaussian packet; ``|psi|^2`` has variance ``(2n+1) sigma^2 / 2``."""
    reach = spec.half_support
    if spec.x0 - grid.x_min < reach or grid.x_max - spec.x0 < reach:
        raise PacketTooWide(
            f"packet at x0={spec.x0} needs {reach:.3g} of room on each side inside "
            f"[{grid.x_min}, {grid.x_max}]; enlarge the grid"
        )
    hbar = params.hbar
    u = (grid.x - spec.x0) / spec.sigma
    coef = np.zeros(spec.hermite_n + 1)
    coef[-1] = 1.0
    envelope = _hermite.hermval(u, coef) * np.exp(-0.5 * u**2)
    phase = (spec.chirp * (grid.x - spec.x0) ** 2 + spec.p0 * (grid.x - spec.x0)) / hbar
    psi = envelope * np.exp(1j * phase)
    psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dx)
    return WaveFunction(psi, grid, t, POSITION, hbar)
