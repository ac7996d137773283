"""Concurrence of X states and closed-form steady states.

The symmetric-configuration results use the channel parameters
``Gamma_A, Gamma_S, n_A, n_S`` of :class:`otqe.correlators.ChannelParams`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .correlators import ChannelParams, bose_n
from .states import XState


@dataclass(frozen=True)
class ConcurrenceResult:
    C: float
    K1: float
    K2: float


def concurrence_x(rho: XState) -> ConcurrenceResult:
    k1 = abs(rho.rho23) - math.sqrt(max(rho.p1 * rho.p4, 0.0))
    k2 = abs(rho.rho14) - math.sqrt(max(rho.p2 * rho.p3, 0.0))
    return ConcurrenceResult(min(2.0 * max(0.0, k1, k2), 1.0), k1, k2)


def thermal_state(omega, T) -> XState:
    """Product Gibbs state of two identical qubits."""
    if T < 0:
        raise ValueError("temperature must be >= 0")
    n = bose_n(omega, T)
    return thermal_state_n(n)


def thermal_state_n(n) -> XState:
    z = (1 + 2 * n) ** 2
    return XState((1 + n) ** 2 / z, n * (1 + n) / z, n * (1 + n) / z, n * n / z)


# -- symmetric configuration ------------------------------------------------------

def symmetric_rate_matrix(ch: ChannelParams) -> np.ndarray:
    """Rate matrix on the coupled populations (G, A, S, E); columns sum to zero."""
    ga, gs, na, ns = ch.gamma_a, ch.gamma_s, ch.n_a, ch.n_s
    up_a, dn_a = ga * na, ga * (1 + na)
    up_s, dn_s = gs * ns, gs * (1 + ns)
    W = np.array([
        [0.0, dn_a, dn_s, 0.0],
        [up_a, 0.0, 0.0, dn_a],
        [up_s, 0.0, 0.0, dn_s],
        [0.0, up_a, up_s, 0.0],
    ])
    return W - np.diag(W.sum(axis=0))


def _numerators(na, ns, ga, gs):
    g = (1 + na) ** 2 * (1 + 2 * ns) * ga + (1 + 2 * na) * (1 + ns) ** 2 * gs
    a = na * (1 + na) * (1 + 2 * ns) * ga + (na * (1 + 2 * ns) + ns**2 * (1 + 2 * na)) * gs
    s = ns * (1 + ns) * (1 + 2 * na) * gs + (ns * (1 + 2 * na) + na**2 * (1 + 2 * ns)) * ga
    e = na**2 * (1 + 2 * ns) * ga + (1 + 2 * na) * ns**2 * gs
    return g, a, s, e


def symmetric_steady(ch: ChannelParams) -> XState:
    """Stationary state of the coupled-basis rate equations (closed form)."""
    if not ch.gamma_a + ch.gamma_s > 0:
        raise ValueError("need Gamma_A + Gamma_S > 0")
    g, a, s, e = _numerators(ch.n_a, ch.n_s, ch.gamma_a, ch.gamma_s)
    z = g + a + s + e
    return XState.from_coupled(g / z, a / z, s / z, e / z)


def _k1(na, ns, ga, gs):
    g, a, s, e = _numerators(na, ns, ga, gs)
    z = g + a + s + e
    return (np.abs(ns - na) * (gs + ga) / 2 - np.sqrt(g) * np.sqrt(e)) / z


def symmetric_concurrence(ch: ChannelParams) -> ConcurrenceResult:
    """Steady concurrence in closed form; ``K2`` is that of the steady state."""
    k1 = float(_k1(ch.n_a, ch.n_s, ch.gamma_a, ch.gamma_s))
    g, a, s, e = _numerators(ch.n_a, ch.n_s, ch.gamma_a, ch.gamma_s)
    z = g + a + s + e
    # steady rho22 = rho33 = (a + s) / 2z and rho14 = 0
    k2 = -(a + s) / (2 * z)
    return ConcurrenceResult(2.0 * max(0.0, k1), k1, k2)


# -- C_max landscape ------------------------------------------------------------------

@dataclass(frozen=True)
class CmaxResult:
    ratio: float
    c_max: float
    n_a: float
    n_s: float
    converged: bool
    evaluations: int


def cmax_scan(ratio, *, n_hi=1e3, n_lo=1e-6, grid=81, starts=4, max_iter=500) -> CmaxResult:
    """Maximum of the steady concurrence over ``(n_A, n_S) in [0, n_hi]^2``.

    Coarse log grid (plus the ``n = 0`` edge) in both photon numbers, then
    bounded quasi-Newton polishing in ``log n`` from the best ``starts``
    cells. The flag is False if any polish fails or the best point sits on
    the ``n_hi`` boundary.
    """
    if not ratio > 0:
        raise ValueError("ratio must be positive")
    # normalize so the larger rate is 1; the concurrence is scale invariant
    ga, gs = (ratio, 1.0) if ratio <= 1 else (1.0, 1.0 / ratio)
    axis = np.concatenate([[0.0], np.logspace(math.log10(n_lo), math.log10(n_hi), grid - 1)])
    NA, NS = np.meshgrid(axis, axis, indexing="ij")
    C = 2 * np.maximum(0.0, _k1(NA, NS, ga, gs))
    evals = C.size
    order = np.argsort(C, axis=None)[::-1][:starts]
    best = (float(C.flat[order[0]]), float(NA.flat[order[0]]), float(NS.flat[order[0]]))
    converged = True
    lo, hi = math.log(n_lo * 1e-3), math.log(n_hi)

    def neg(v):
        return -2 * float(_k1(math.exp(v[0]), math.exp(v[1]), ga, gs))

    for idx in order:
        if C.flat[idx] <= 0:
            continue
        x0 = [math.log(max(NA.flat[idx], n_lo)), math.log(max(NS.flat[idx], n_lo))]
        res = minimize(neg, x0, method="L-BFGS-B", bounds=[(lo, hi), (lo, hi)],
                       options={"ftol": 1e-15, "gtol": 1e-13, "maxiter": max_iter})
        res2 = minimize(neg, res.x, method="Nelder-Mead",
                        options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": max_iter})
        evals += res.nfev + res2.nfev
        x = np.clip(res2.x, lo, hi)
        na, ns = math.exp(x[0]), math.exp(x[1])
        # optima pinned at the lower bound belong to the n = 0 edge
        na = 0.0 if x[0] <= lo + 1e-6 else na
        ns = 0.0 if x[1] <= lo + 1e-6 else ns
        c = 2 * float(_k1(na, ns, ga, gs))
        if c > best[0]:
            best = (c, na, ns)
        converged &= bool(res.success or res2.success)
    if max(best[1], best[2]) >= 0.999 * n_hi:
        converged = False
    return CmaxResult(float(ratio), best[0], best[1], best[2], converged, evals)
