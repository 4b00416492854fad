import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from quadshift.classical import ShiftState
from quadshift.errors import UnderResolved
from quadshift.model import CoefficientFunction, GaussianPacketSpec, Grid, PhysicalParams, make_packet
from quadshift.moments import (
    MomentState,
    centered_moment,
    covariance,
    evolve_second_moments,
    extract_moments,
    symplectic_invariant,
)
from quadshift.propagator import evolve
from quadshift.scenario import parse_config
from quadshift.transform import apply_linear_shift

from conftest import base_config

GRID = Grid(-20.0, 20.0, 1024)
const = CoefficientFunction.constant


def test_gaussian_centered_moments():
    psi = make_packet(GaussianPacketSpec(x0=0.7, p0=-0.4, sigma=1.0), GRID)
    assert centered_moment(psi, "position", 2) == pytest.approx(0.5, abs=1e-12)
    assert centered_moment(psi, "position", 3) == pytest.approx(0.0, abs=1e-10)
    assert centered_moment(psi, "position", 4) == pytest.approx(0.75, abs=1e-12)
    assert centered_moment(psi, "momentum", 3) == pytest.approx(0.0, abs=1e-10)


def test_odd_moments_vanish_for_hermite_packet():
    psi = make_packet(GaussianPacketSpec(sigma=1.0, hermite_n=3), GRID)
    for n in (1, 3, 5):
        assert centered_moment(psi, "position", n) == pytest.approx(0.0, abs=1e-10)


def test_momentum_moment_requires_resolution():
    psi = make_packet(GaussianPacketSpec(sigma=3.0), GRID)  # spread 0.24 < 4 dp = 0.63
    with pytest.raises(UnderResolved):
        centered_moment(psi, "momentum", 2)
    assert centered_moment(psi, "momentum", 2, check=False) == pytest.approx(1 / 18, rel=1e-6)


def test_covariance_examples():
    assert covariance(make_packet(GaussianPacketSpec(), GRID)) == pytest.approx(0.0, abs=1e-10)
    assert covariance(make_packet(GaussianPacketSpec(p0=3.0), GRID)) == pytest.approx(0.0, abs=1e-10)


def test_chirped_covariance_against_quadrature():
    # psi = pi^-1/4 exp(-x^2/2 + i k x^2); <PX+XP>/2 = Re int conj(psi) x (-i psi') dx
    k = 0.5

    def integrand(x):
        density = math.exp(-x * x) / math.pi**0.5
        return x * (2 * k * x) * density  # x times the phase gradient; imaginary parts cancel

    oracle, _ = integrate.quad(integrand, -np.inf, np.inf)
    psi = make_packet(GaussianPacketSpec(sigma=1.0, chirp=k), GRID)
    assert covariance(psi) == pytest.approx(oracle, abs=1e-8)
    assert oracle == pytest.approx(0.5, abs=1e-12)


def test_free_moment_flow():
    z = const(0.0)
    out = evolve_second_moments(const(1.0), z, z, MomentState(0.5, 0.0, 0.5), (0.0, 1.0), 0.01)
    assert out[-1].as_array() == pytest.approx([1.0, 0.5, 0.5], abs=1e-12)


def test_matched_oscillator_is_fixed_point():
    out = evolve_second_moments(const(1.0), const(0.0), const(1.0), MomentState(0.5, 0.0, 0.5), (0.0, 5.0), 0.01)
    for m in out:
        assert m.as_array() == pytest.approx([0.5, 0.0, 0.5], abs=1e-10)


def test_symplectic_invariant_values():
    assert symplectic_invariant(MomentState(0.5, 0.0, 0.5)) == 0.25
    assert symplectic_invariant(MomentState(1.0, 0.5, 0.5)) == 0.25
    assert symplectic_invariant(MomentState(2.0, 0.0, 1.0)) == 2.0


def test_delta_xp_is_twice_cov():
    assert MomentState(1.0, 0.3, 2.0).delta_xp == pytest.approx(0.6)


def test_moment_flow_rejects_bad_initial_state():
    with pytest.raises(ValueError):
        evolve_second_moments(const(1.0), const(0.0), const(0.0), MomentState(0.0, 0.0, 1.0), (0, 1), 0.1)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.2, 2), b=st.floats(-0.5, 0.5), c=st.floats(-1, 2), om=st.floats(0.1, 3),
       vx=st.floats(0.2, 2), cv=st.floats(-0.5, 0.5), vp=st.floats(0.3, 2))
def test_symplectic_invariant_is_conserved(a, b, c, om, vx, cv, vp):
    init = MomentState(vx, cv, max(vp, (cv * cv + 0.01) / vx))
    out = evolve_second_moments(CoefficientFunction.sinusoid(0.3 * a, om, offset=a), const(b),
                                CoefficientFunction.sinusoid(0.5, om, 1.0, offset=c), init, (0.0, 2.0), 0.005)
    i0 = symplectic_invariant(init)
    for m in out:
        assert symplectic_invariant(m) == pytest.approx(i0, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(x0=st.floats(-3, 3), p0=st.floats(-2, 2), sigma=st.floats(0.7, 1.1), n=st.integers(0, 2),
       chirp=st.floats(-0.4, 0.4))
def test_robertson_schroedinger(x0, p0, sigma, n, chirp):
    psi = make_packet(GaussianPacketSpec(x0, p0, sigma, n, chirp), GRID)
    assert symplectic_invariant(extract_moments(psi)) >= 0.25 - 1e-10


@settings(max_examples=25, deadline=None)
@given(xb=st.floats(-4, 4), pb=st.floats(-2, 2), beta=st.floats(-5, 5), chirp=st.floats(-0.4, 0.4),
       hbar=st.floats(0.5, 2))
def test_covariance_unchanged_by_shift_and_phase(xb, pb, beta, chirp, hbar):
    params = PhysicalParams(hbar)
    psi = make_packet(GaussianPacketSpec(0.5, 0.3, 1.0, 1, chirp), GRID, params)
    moved = apply_linear_shift(psi, ShiftState(xb, pb, beta, pb * xb - beta, 0.0), params)
    assert covariance(moved, params) == pytest.approx(covariance(psi, params), abs=1e-9)


def test_ode_matches_wavefunction_moments_with_linear_terms():
    cfg = base_config(
        grid={"x_min": -20, "x_max": 20, "n": 1024},
        time={"t0": 0, "t_end": 2.0, "dt": 1e-3, "output_stride": 100},
        coefficients={
            "a": {"segments": [{"t_start": 0, "poly": [1], "sin": [{"amp": 0.3, "omega": 1, "phase": 0}]}]},
            "b": 0.15, "c": {"segments": [{"t_start": 0, "poly": [0.5, 0.2]}]},
            "f": 0.4, "g": {"segments": [{"t_start": 0, "poly": [0.3], "sin": [{"amp": 0.8, "omega": 0.7, "phase": 0}]}]},
        },
        packet={"x0": -1, "p0": 0.5, "sigma": 1, "chirp": 0.1},
    )
    sc = parse_config(cfg)
    evo = evolve(sc)
    co = sc.coefficients
    ode = evolve_second_moments(co.a, co.b, co.c, evo.records[0].moments, (0.0, 2.0), 1e-3)
    for r in evo.records:
        k = int(round(r.t / 1e-3))
        assert r.moments.as_array() == pytest.approx(ode[k].as_array(), abs=1e-5)
