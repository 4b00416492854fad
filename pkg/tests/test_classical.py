import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadshift.classical import (
    ShiftState,
    free_particle_shift,
    forced_oscillator_shift,
    integrate_shift,
    integrate_trajectory,
)
from quadshift.model import CoefficientFunction, CoefficientSet, Segment, Sinusoid


def free(m=1.0, g=None, f=None):
    g = g or CoefficientFunction.zero()
    f = f or CoefficientFunction.zero()
    z = CoefficientFunction.zero()
    return CoefficientSet(CoefficientFunction.constant(1.0 / m), z, z, f, g, 0.0)


def oscillator(m, omega, g):
    z = CoefficientFunction.zero()
    return CoefficientSet(CoefficientFunction.constant(1.0 / m), z,
                          CoefficientFunction.constant(m * omega * omega), z, g, 0.0)


def test_free_trajectory():
    co = CoefficientSet.from_constants(a=1.0)
    traj = integrate_trajectory(co, 1.0, 2.0, (0.0, 3.0), 0.01)
    assert traj[-1].x == pytest.approx(7.0, abs=1e-12)
    assert traj[-1].p == pytest.approx(2.0, abs=1e-12)


def test_oscillator_trajectory():
    co = CoefficientSet.from_constants(a=1.0, c=1.0)
    traj = integrate_trajectory(co, 1.0, 0.0, (0.0, math.pi), 0.001)
    assert traj[-1].x == pytest.approx(-1.0, abs=1e-10)
    assert traj[-1].p == pytest.approx(0.0, abs=1e-10)


def test_rk4_order():
    co = CoefficientSet.from_constants(a=1.0, c=4.0)
    errs = []
    for dt in (0.02, 0.01, 0.005):
        x = integrate_trajectory(co, 1.0, 0.0, (0.0, 2.0), dt)[-1].x
        errs.append(abs(x - math.cos(4.0)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 4.0) < 0.3)


def test_constant_force_shift():
    sh = integrate_shift(free(g=CoefficientFunction.constant(1.0)), (0.0, 1.0), 0.001)[-1]
    assert (sh.x_bar, sh.p_bar) == pytest.approx((-0.5, -1.0), abs=1e-12)
    assert sh.beta == pytest.approx(1 / 6, abs=1e-12)
    assert sh.gamma == pytest.approx(1 / 3, abs=1e-12)


def test_free_particle_closed_form_values():
    assert free_particle_shift(CoefficientFunction.constant(1.0), 1.0, 0.0, 1.0) == pytest.approx(
        (-0.5, -1.0, 1 / 6), abs=1e-12)
    # g = t, m = 2: G = t^2/2, G1 = t^3/6, G2 = t^5/20
    got = free_particle_shift(CoefficientFunction.polynomial((0.0, 1.0)), 2.0, 0.0, 2.0)
    assert got == pytest.approx((-2 / 3, -2.0, 0.4), abs=1e-12)


def test_forced_oscillator_closed_form_values():
    g = CoefficientFunction.constant(1.0)
    xb, pb, beta = forced_oscillator_shift(g, 1.0, 1.0, 0.0, math.pi)
    assert (xb, pb) == pytest.approx((-2.0, 0.0), abs=1e-12)
    assert beta == pytest.approx(-math.pi / 2, abs=1e-12)
    assert forced_oscillator_shift(g, 1.0, 1.0, 0.0, math.pi / 2)[2] == pytest.approx(1 - math.pi / 4, abs=1e-12)


def test_shift_must_start_at_turn_on():
    with pytest.raises(ValueError):
        integrate_shift(free(g=CoefficientFunction.constant(1.0)), (0.5, 1.0), 0.01)


def test_zero_linear_terms_give_zero_shift():
    co = CoefficientSet.from_constants(a=1.3, b=0.2, c=0.7)
    for s in integrate_shift(co, (0.0, 2.0), 0.01):
        assert s == ShiftState.zero(s.t)


def random_g(draw_amps, omegas, phases, c0, c1, t_break):
    return CoefficientFunction((
        Segment(0.0, (c0, c1), tuple(Sinusoid(a, w, p) for a, w, p in zip(draw_amps, omegas, phases))),
        Segment(t_break, (c1 - c0,), (Sinusoid(draw_amps[0], 2 * omegas[0], 0.0),)),
    ))


g_strategy = st.builds(
    random_g,
    st.lists(st.floats(-2, 2), min_size=2, max_size=2),
    st.lists(st.floats(0.2, 3), min_size=2, max_size=2),
    st.lists(st.floats(-3, 3), min_size=2, max_size=2),
    st.floats(-1, 1), st.floats(-1, 1), st.floats(0.3, 1.2),
)


@settings(max_examples=15, deadline=None)
@given(g=g_strategy, m=st.floats(0.5, 3))
def test_free_particle_matches_integrated_shift(g, m):
    T = 1.5
    s = integrate_shift(free(m, g), (0.0, T), 0.0005)[-1]
    assert (s.x_bar, s.p_bar, s.beta) == pytest.approx(free_particle_shift(g, m, 0.0, T), abs=1e-9)


@settings(max_examples=10, deadline=None)
@given(g=g_strategy, m=st.floats(0.5, 2), omega=st.floats(0.5, 2))
def test_forced_oscillator_matches_integrated_shift(g, m, omega):
    T = 1.5
    s = integrate_shift(oscillator(m, omega, g), (0.0, T), 0.0005)[-1]
    assert (s.x_bar, s.p_bar, s.beta) == pytest.approx(forced_oscillator_shift(g, m, omega, 0.0, T), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(f0=st.floats(-2, 2), g0=st.floats(-2, 2), b=st.floats(-0.5, 0.5), c=st.floats(-1, 2))
def test_beta_plus_gamma_identity(f0, g0, b, c):
    co = CoefficientSet.from_constants(a=1.0, b=b, c=c, f=f0, g=g0)
    for s in integrate_shift(co, (0.0, 2.0), 0.01):
        assert s.beta + s.gamma == pytest.approx(s.p_bar * s.x_bar, abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(g1=st.floats(-2, 2), g2=st.floats(-2, 2), lam=st.floats(-3, 3))
def test_shift_is_linear_in_the_force(g1, g2, lam):
    def shift(g):
        co = CoefficientSet.from_constants(a=1.0, c=0.5, g=g)
        s = integrate_shift(co, (0.0, 1.0), 0.01)[-1]
        return np.array([s.x_bar, s.p_bar])

    assert np.allclose(shift(g1 + lam * g2), shift(g1) + lam * shift(g2), atol=1e-12)


def test_differential_and_closed_form_beta_agree_for_general_coefficients():
    co = CoefficientSet(
        CoefficientFunction.sinusoid(0.3, 1.0, offset=1.0),
        CoefficientFunction.sinusoid(0.2, 1.3, math.pi / 2),
        CoefficientFunction.polynomial((0.5, 0.2)),
        CoefficientFunction.sinusoid(0.4, 1.0, math.pi / 2),
        CoefficientFunction.sinusoid(0.8, 0.7, offset=0.3),
        0.0,
    )
    shifts = integrate_shift(co, (0.0, 3.0), 0.001)
    assert len(shifts) == 3001
