import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gen import x_states
from oracles import wootters
from otqe.analytics import (cmax_scan, concurrence_x, symmetric_concurrence,
                            symmetric_rate_matrix, symmetric_steady, thermal_state,
                            thermal_state_n)
from otqe.correlators import ChannelParams, RateSet
from otqe.dynamics import steady_state
from otqe.states import XState

photon = st.floats(0.0, 50.0)
rate = st.floats(1e-4, 10.0)


def rates_from_channels(ch, lam=0.0):
    """Symmetric-configuration rate blocks with the given channel parameters."""
    ga, gs, na, ns = ch.gamma_a, ch.gamma_s, ch.n_a, ch.n_s
    d11 = 0.5 * (ga * (1 + na) + gs * (1 + ns))
    d12 = 0.5 * (gs * (1 + ns) - ga * (1 + na))
    u11 = 0.5 * (ga * na + gs * ns)
    u12 = 0.5 * (gs * ns - ga * na)
    return RateSet(np.array([[d11, d12], [d12, d11]]), np.array([[u11, u12], [u12, u11]]), lam)


# -- concurrence ---------------------------------------------------------------------

@given(x_states())
def test_x_formula_matches_wootters(rho):
    # square roots of near-zero eigenvalues limit the oracle to ~sqrt(eps)
    assert concurrence_x(rho).C == pytest.approx(wootters(rho.matrix()), abs=1e-7)


def test_antisymmetric_admixture_reaches_one_third():
    rho = XState.from_coupled(2 / 3, 1 / 3, 0.0, 0.0)
    assert concurrence_x(rho).C == pytest.approx(1 / 3, abs=1e-15)
    assert wootters(rho.matrix()) == pytest.approx(1 / 3, abs=1e-12)


@given(st.floats(0.0, 1e4))
def test_thermal_product_states_are_separable(n):
    rho = thermal_state_n(n)
    assert rho.trace == pytest.approx(1.0)
    assert concurrence_x(rho).C == 0


def test_thermal_state_at_zero_temperature_is_ground():
    assert thermal_state(4.5e13, 0.0) == XState.ground()
    with pytest.raises(ValueError):
        thermal_state(4.5e13, -1.0)


# -- symmetric configuration ------------------------------------------------------------

@given(rate, rate, photon, photon)
def test_rate_matrix_conserves_probability(ga, gs, na, ns):
    W = symmetric_rate_matrix(ChannelParams(ga, gs, na, ns))
    assert np.allclose(W.sum(axis=0), 0, atol=1e-12 * np.max(np.abs(W)))
    off = W - np.diag(np.diag(W))
    assert np.all(off >= 0)


@given(rate, rate, photon, photon)
def test_closed_form_is_rate_matrix_fixed_point(ga, gs, na, ns):
    ch = ChannelParams(ga, gs, na, ns)
    rho = symmetric_steady(ch)
    pops = np.array([rho.coupled()[k] for k in "GASE"])
    W = symmetric_rate_matrix(ch)
    assert np.max(np.abs(W @ pops)) < 1e-12 * np.max(np.abs(W))
    assert pops.sum() == pytest.approx(1.0) and np.all(pops >= 0)


@settings(max_examples=60)
@given(rate, rate, photon, photon, st.floats(-100, 100))
def test_closed_form_matches_master_equation_steady_state(ga, gs, na, ns, lam):
    ch = ChannelParams(ga, gs, na, ns)
    num = steady_state(rates_from_channels(ch, lam))
    assert np.allclose(num.vector(), symmetric_steady(ch).vector(), atol=1e-9)


@given(rate, rate, photon, photon)
def test_closed_form_concurrence_matches_state(ga, gs, na, ns):
    ch = ChannelParams(ga, gs, na, ns)
    res = symmetric_concurrence(ch)
    direct = concurrence_x(symmetric_steady(ch))
    assert res.C == pytest.approx(direct.C, abs=1e-12)
    assert res.K1 == pytest.approx(direct.K1, abs=1e-12)
    assert res.K2 == pytest.approx(direct.K2, abs=1e-12)
    assert res.K2 <= 0


@given(rate, rate, photon, photon, st.floats(1e-3, 1e3))
def test_concurrence_depends_only_on_rate_ratio(ga, gs, na, ns, scale):
    a = symmetric_concurrence(ChannelParams(ga, gs, na, ns)).C
    b = symmetric_concurrence(ChannelParams(scale * ga, scale * gs, na, ns)).C
    assert a == pytest.approx(b, abs=1e-12)


@given(rate, photon)
def test_equal_photon_numbers_give_no_entanglement(ga, n):
    assert symmetric_concurrence(ChannelParams(ga, 2 * ga, n, n)).C == 0


@given(rate, rate, photon, photon)
def test_steady_concurrence_bounded_by_one_third(ga, gs, na, ns):
    assert symmetric_concurrence(ChannelParams(ga, gs, na, ns)).C <= 1 / 3 + 1e-12


# -- C_max landscape ------------------------------------------------------------------------

def test_cmax_vanishes_for_equal_rates():
    res = cmax_scan(1.0)
    assert res.c_max == 0.0 and res.converged


@pytest.mark.parametrize("ratio", [1e-3, 0.1, 0.5])
def test_cmax_symmetric_under_channel_exchange(ratio):
    a, b = cmax_scan(ratio), cmax_scan(1 / ratio)
    assert a.c_max == pytest.approx(b.c_max, abs=1e-9)
    assert a.n_a == pytest.approx(b.n_s, rel=1e-4)
    assert a.n_s == pytest.approx(b.n_a, rel=1e-4)


def test_cmax_grows_as_rates_separate():
    values = [cmax_scan(r).c_max for r in (0.5, 0.1, 1e-2, 1e-4)]
    assert all(x < y for x, y in zip(values, values[1:]))


def test_cmax_at_white_line_ratio():
    assert cmax_scan(2.8e-4).c_max == pytest.approx(0.27734420403310794, abs=1e-7)


def test_cmax_optimum_is_a_stationary_point():
    res = cmax_scan(1e-2)
    ch = lambda na, ns: symmetric_concurrence(ChannelParams(1e-2, 1.0, na, ns)).C
    assert ch(res.n_a, res.n_s) == pytest.approx(res.c_max, abs=1e-12)
    for dna, dns in ((1.01, 1), (0.99, 1), (1, 1.01), (1, 0.99)):
        assert ch(res.n_a * dna, res.n_s * dns) <= res.c_max + 1e-12


def test_cmax_rejects_non_positive_ratio():
    with pytest.raises(ValueError):
        cmax_scan(0.0)
