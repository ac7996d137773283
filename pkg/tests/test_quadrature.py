import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from otqe.quadrature import (GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS, QuadratureError,
                             adaptive_quad)


@pytest.mark.parametrize("degree", range(0, 24))
def test_kronrod_rule_exact_to_degree_23(degree):
    exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
    assert np.dot(KRONROD_WEIGHTS, KRONROD_NODES**degree) == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("degree", range(0, 14))
def test_embedded_gauss_rule_exact_to_degree_13(degree):
    exact = (1 - (-1) ** (degree + 1)) / (degree + 1)
    assert np.dot(GAUSS_WEIGHTS, KRONROD_NODES**degree) == pytest.approx(exact, abs=1e-14)


def test_vector_complex_integrand():
    res = adaptive_quad(lambda x: np.stack([np.exp(1j * x), x**2], axis=1), 0.0, math.pi)
    assert res.value[0] == pytest.approx(2j, abs=1e-12)
    assert res.value[1] == pytest.approx(math.pi**3 / 3, rel=1e-12)


@given(st.floats(0.5, 50.0))
def test_oscillatory_integrand_meets_tolerance(freq):
    res = adaptive_quad(lambda x: np.cos(freq * x)[:, None], 0.0, 3.0, epsabs=1e-10, epsrel=1e-10)
    assert res.value[0] == pytest.approx(math.sin(3 * freq) / freq, abs=1e-9)


def test_breakpoints_resolve_narrow_peak():
    w = 1e-7
    f = lambda x: (w / ((x - 0.3) ** 2 + w * w))[:, None]
    res = adaptive_quad(f, 0.0, 1.0, breakpoints=[0.3 - 1e-6, 0.3, 0.3 + 1e-6],
                        epsabs=1e-9, epsrel=1e-9)
    exact = math.atan(0.7 / w) + math.atan(0.3 / w)
    assert res.value[0] == pytest.approx(exact, rel=1e-8)


def test_budget_exhaustion_reports_worst_panel():
    with pytest.raises(QuadratureError) as info:
        adaptive_quad(lambda x: (1 / np.sqrt(np.abs(x - 0.5)))[:, None], 0.0, 1.0,
                      epsabs=1e-14, epsrel=1e-14, max_panels=20)
    lo, hi = info.value.worst_interval
    assert lo <= 0.5 <= hi


def test_result_is_reproducible():
    f = lambda x: np.sin(1 / (x + 0.01))[:, None]
    a = adaptive_quad(f, 0.0, 1.0).value
    b = adaptive_quad(f, 0.0, 1.0).value
    assert a.tobytes() == b.tobytes()
