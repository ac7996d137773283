import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import free_alpha12_perp, free_lambda_perp_kernel, wavenumber
from otqe.correlators import (AlphaCache, AsymmetricConfiguration, EnvTemperatures, QubitPair,
                              SpectralAlphas, alpha_pair, alpha_pair_bruteforce, bose_n,
                              bose_temperature, channel_params, free_alpha, gamma_rates,
                              reflected_green)
from otqe.quadrature import QuadratureError
from otqe.slab_optics import SlabModel

OMEGA_R = 1.495e14
OMEGA = 0.3 * OMEGA_R

# alpha blocks at z1 = z2 = 1 um, r12 = 0.25 um, 0.01 um SiC, 0.3 omega_r, z dipoles;
# cross-checked against the brute-force 2D quadrature (agreement ~3e-8)
REF_ALPHA_W = 0.9986610573535382
REF_ALPHA_W12 = 0.998381833769846
REF_ALPHA_M = 0.007682432274581958
REF_ALPHA_M12 = 0.0073712279848685445


def unit(v):
    v = np.asarray(v, dtype=complex)
    return tuple(v / np.linalg.norm(v))


@st.composite
def qubit_pairs(draw, complex_dipoles=True):
    omega = draw(st.floats(0.1, 1.5)) * OMEGA_R
    z = (draw(st.floats(0.3, 3.0)), draw(st.floats(0.3, 3.0)))
    pos = ((0.0, 0.0), (draw(st.floats(-2.0, 2.0)), draw(st.floats(-2.0, 2.0))))
    dips = []
    for _ in range(2):
        re = [draw(st.floats(-1, 1)) for _ in range(3)]
        im = [draw(st.floats(-1, 1)) if complex_dipoles else 0.0 for _ in range(3)]
        v = np.array(re) + 1j * np.array(im)
        if np.linalg.norm(v) < 0.1:
            v = np.array([0, 0, 1.0])
        dips.append(unit(v))
    return QubitPair(omega, z, pos, tuple(dips))


# -- thermal occupation ---------------------------------------------------------

def test_bose_zero_temperature_is_exactly_zero():
    assert bose_n(OMEGA, 0.0) == 0.0


def test_bose_unit_occupation():
    from otqe.constants import HBAR, K_B
    T = HBAR * OMEGA / (K_B * math.log(2))
    assert bose_n(OMEGA, T) == pytest.approx(1.0, rel=1e-12)


def test_bose_reference_value():
    assert bose_n(OMEGA, 1200.0) == pytest.approx(3.026642988357548, rel=1e-12)


@given(st.floats(1e-3, 1e3))
def test_bose_temperature_inverts_occupation(n):
    assert bose_n(OMEGA, bose_temperature(OMEGA, n)) == pytest.approx(n, rel=1e-10)


# -- free space -------------------------------------------------------------------

def test_vacuum_sum_rule_diagonal(ref_pair):
    a = alpha_pair(SlabModel.vacuum(), ref_pair)
    assert a.total[0, 0].real == pytest.approx(1.0, rel=1e-6)
    assert a.total[1, 1].real == pytest.approx(1.0, rel=1e-6)
    assert np.all(a.slab == 0)


@pytest.mark.parametrize("r12", [0.1, 0.25, 1.0, 3.0, 10.0])
def test_vacuum_cross_term_matches_dyadic_kernel(r12):
    q = QubitPair.planar(OMEGA, 1.0, 1.0, r12)
    a = alpha_pair(SlabModel.vacuum(), q)
    x = wavenumber(OMEGA) * r12
    assert a.total[0, 1].real == pytest.approx(free_alpha12_perp(x), abs=1e-7)
    assert free_alpha(q)[0, 1].real == pytest.approx(free_alpha12_perp(x), rel=1e-12)


def test_zero_thickness_equals_vacuum(ref_pair):
    a = alpha_pair(SlabModel(thickness=0.0), ref_pair)
    b = alpha_pair(SlabModel.vacuum(), ref_pair)
    assert np.array_equal(a.wall, b.wall) and np.array_equal(a.slab, b.slab)


# -- slab ---------------------------------------------------------------------------

def test_reference_configuration_regression(ref_slab, ref_pair):
    a = alpha_pair(ref_slab, ref_pair)
    assert a.wall[0, 0].real == pytest.approx(REF_ALPHA_W, rel=1e-8)
    assert a.wall[0, 1].real == pytest.approx(REF_ALPHA_W12, rel=1e-8)
    assert a.slab[0, 0].real == pytest.approx(REF_ALPHA_M, rel=1e-7)
    assert a.slab[0, 1].real == pytest.approx(REF_ALPHA_M12, rel=1e-7)


def test_reference_configuration_against_bruteforce(ref_slab, ref_pair):
    a = alpha_pair(ref_slab, ref_pair)
    b = alpha_pair_bruteforce(ref_slab, ref_pair)
    assert np.max(np.abs(a.wall - b.wall)) < 1e-6
    assert np.max(np.abs(a.slab - b.slab)) < 1e-6


@settings(max_examples=50)
@given(qubit_pairs(), st.floats(0.002, 2.0))
def test_reduced_integral_matches_bruteforce(qubits, thickness):
    slab = SlabModel(thickness=thickness)
    a = alpha_pair(slab, qubits)
    b = alpha_pair_bruteforce(slab, qubits)
    scale = max(np.max(np.abs(a.wall)), np.max(np.abs(a.slab)))
    assert np.max(np.abs(a.wall - b.wall)) <= 1e-4 * scale
    assert np.max(np.abs(a.slab - b.slab)) <= 1e-4 * scale


@settings(max_examples=25)
@given(qubit_pairs(), st.floats(0.002, 2.0))
def test_alpha_blocks_hermitian_with_real_nonnegative_diagonal(qubits, thickness):
    a = alpha_pair(SlabModel(thickness=thickness), qubits)
    for block in (a.wall, a.slab):
        assert np.allclose(block, block.conj().T, atol=1e-9)
        assert np.all(np.abs(np.diag(block).imag) < 1e-12)
        assert np.all(np.diag(block).real >= -1e-12)


@settings(max_examples=25)
@given(qubit_pairs(), st.floats(0.002, 2.0))
def test_total_alpha_equals_im_green_function(qubits, thickness):
    # equilibrium identity: alpha_W + alpha_M = Im(g_free + g_reflected)
    slab = SlabModel(thickness=thickness)
    a = alpha_pair(slab, qubits, tol=1e-10)
    g = reflected_green(slab, qubits)
    expected = free_alpha(qubits) + (g - g.conj().T) / 2j
    assert np.max(np.abs(a.total - expected)) < 1e-7


@settings(max_examples=25)
@given(qubit_pairs(), st.floats(0.002, 2.0), st.floats(0, 2000), st.floats(0, 2000))
def test_rate_blocks_positive_semidefinite(qubits, thickness, tw, tm):
    a = alpha_pair(SlabModel(thickness=thickness), qubits)
    r = gamma_rates(a, EnvTemperatures(tw, tm), qubits)
    for block in (r.down, r.up):
        assert np.allclose(block, block.conj().T, atol=1e-9)
        assert np.min(np.linalg.eigvalsh(block)) >= -1e-9


def test_evanescent_integrand_decays_with_height():
    from otqe.correlators import _alpha_integrands
    slab = SlabModel()
    q = QubitPair.planar(OMEGA, 1.0, 1.0, 0.0)
    _, evan = _alpha_integrands(slab, q, ((0, 0),))
    u = np.linspace(1.0, 6.0, 50)
    kap = np.sinh(u)
    vals = np.abs(evan(u)[:, 1])
    bound = np.exp(-2 * kap * wavenumber(OMEGA) * 1.0) * 10 * np.cosh(u) ** 3
    assert np.all(vals <= bound)


def test_quadrature_budget_error_carries_worst_panel(ref_slab, ref_pair):
    with pytest.raises(QuadratureError) as info:
        alpha_pair(ref_slab, ref_pair, tol=1e-15, max_panels=10)
    assert info.value.worst_interval[0] < info.value.worst_interval[1]


# -- rates and channels -----------------------------------------------------------------

def test_zero_temperature_has_no_upward_rates(ref_slab, ref_pair):
    r = gamma_rates(alpha_pair(ref_slab, ref_pair), EnvTemperatures(0, 0), ref_pair)
    assert np.all(r.up == 0)
    assert not r.lambda_included and r.lambda12 == 0


def test_vacuum_rate_is_gamma0_at_zero_temperature(ref_pair):
    r = gamma_rates(alpha_pair(SlabModel.vacuum(), ref_pair), EnvTemperatures(0, 0), ref_pair)
    assert r.down[0, 0].real == pytest.approx(1.0, rel=1e-6)


def test_equal_temperatures_give_equilibrium_combination(ref_slab, ref_pair):
    a = alpha_pair(ref_slab, ref_pair)
    r = gamma_rates(a, EnvTemperatures(400, 400), ref_pair)
    n = bose_n(OMEGA, 400)
    assert np.allclose(r.down, (1 + n) * a.total, rtol=1e-14)
    assert np.allclose(r.up, n * a.total.conj(), rtol=1e-14)


def test_white_line_channel_parameters(ref_slab, ref_pair):
    ch = channel_params(alpha_pair(ref_slab, ref_pair), EnvTemperatures(30, 1200), OMEGA)
    assert ch.n_a == pytest.approx(1.53, abs=0.15)
    assert ch.n_s == pytest.approx(0.02, abs=0.01)
    assert ch.ratio == pytest.approx(2.8e-4, abs=0.6e-4)
    assert ch.temperature_s == pytest.approx(90, abs=10)


def test_equal_temperatures_equal_photon_numbers(ref_slab, ref_pair):
    ch = channel_params(alpha_pair(ref_slab, ref_pair), EnvTemperatures(500, 500), OMEGA)
    n = bose_n(OMEGA, 500)
    assert ch.n_a == pytest.approx(n, rel=1e-12) and ch.n_s == pytest.approx(n, rel=1e-12)


def test_uncorrelated_channels_coincide():
    a = SpectralAlphas(np.diag([0.9, 0.9]).astype(complex), np.diag([0.1, 0.1]).astype(complex))
    ch = channel_params(a, EnvTemperatures(30, 900), OMEGA)
    assert ch.gamma_a == ch.gamma_s and ch.n_a == ch.n_s


@settings(max_examples=30)
@given(st.floats(0.3, 3.0), st.floats(0.01, 3.0), st.floats(0.002, 1.0),
       st.floats(0, 2000), st.floats(0, 2000), st.sampled_from(["z", "x"]))
def test_photon_numbers_confined_between_bath_occupations(z, r12, thickness, tw, tm, axis):
    d = (0.0, 0.0, 1.0) if axis == "z" else (0.0, 1.0, 0.0)
    q = QubitPair.planar(OMEGA, z, z, r12, d)
    ch = channel_params(alpha_pair(SlabModel(thickness=thickness), q), EnvTemperatures(tw, tm),
                        OMEGA)
    lo, hi = sorted((bose_n(OMEGA, tw), bose_n(OMEGA, tm)))
    assert ch.gamma_a >= 0 and ch.gamma_s >= 0
    for n in (ch.n_a, ch.n_s):
        assert lo - 1e-9 * (1 + hi) <= n <= hi + 1e-9 * (1 + hi)


def test_asymmetric_configuration_rejected(ref_slab):
    q = QubitPair.planar(OMEGA, 1.0, 1.3, 0.25)
    with pytest.raises(AsymmetricConfiguration):
        channel_params(alpha_pair(ref_slab, q), EnvTemperatures(30, 1200), OMEGA)


def test_qubits_must_sit_above_slab():
    with pytest.raises(ValueError):
        QubitPair.planar(OMEGA, -0.1, 1.0, 0.25)
    with pytest.raises(ValueError):
        QubitPair(OMEGA, dipoles=((0, 0, 2.0), (0, 0, 1.0)))


# -- cache ---------------------------------------------------------------------------------

def test_cache_round_trip_is_bit_exact(tmp_path, ref_slab, ref_pair):
    cache = AlphaCache(tmp_path)
    first = cache.get(ref_slab, ref_pair)
    again = AlphaCache(tmp_path).load(ref_slab, ref_pair, 1e-8)
    assert again.wall.tobytes() == first.wall.tobytes()
    assert again.slab.tobytes() == first.slab.tobytes()
    lines = [l for l in cache.path(ref_slab, ref_pair, 1e-8).read_text().splitlines()
             if not l.startswith("#")]
    assert len(lines) == 8 and all(l.split()[2] in "WM" for l in lines)
