"""Two-qubit master equation: generators, time evolution and steady states.

Interaction picture; rates in units of Gamma_0 so that time is Gamma_0 t.
Lowering operators ``s1 = |1><2| + |3><4|`` and ``s2 = |1><3| + |2><4|``
in the decoupled basis ``|gg>, |eg>, |ge>, |ee>``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .analytics import concurrence_x
from .correlators import RateSet
from .states import XState

SIGMA = (
    np.array([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]], dtype=complex),
    np.array([[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]], dtype=complex),
)

ROUNDOFF_FLOOR = 16 * np.finfo(float).eps

CSV_COLUMNS = ("G0t", "rho11", "rho22", "rho33", "rho44",
               "Re_rho23", "Im_rho23", "Re_rho14", "Im_rho14", "C")


class DegenerateGenerator(RuntimeError):
    """The generator has more than one stationary state."""

    def __init__(self, message, basis):
        super().__init__(message)
        self.basis = basis


class StiffnessDiagnostic(RuntimeError):
    """Explicit integration gave up; carries the generator spectrum."""

    def __init__(self, message, eigenvalues):
        super().__init__(message)
        self.eigenvalues = eigenvalues


# -- generators ---------------------------------------------------------------

def _xdot(rates: RateSet, p, r23, r14):
    D, U = np.asarray(rates.down), np.asarray(rates.up)
    lam12 = rates.lambda12
    lam21 = np.conj(lam12)
    r32 = np.conj(r23)
    p1, p2, p3, p4 = p
    k11 = U[0, 0] + U[1, 1]
    k22 = D[0, 0] + U[1, 1]
    k33 = D[1, 1] + U[0, 0]
    k44 = D[0, 0] + D[1, 1]
    k23 = D[0, 1] + U[1, 0]
    k32 = D[1, 0] + U[0, 1]
    d1 = (D[0, 0] * p2 + D[1, 1] * p3 + D[0, 1] * r32 + D[1, 0] * r23
          - k11 * p1)
    d2 = (D[1, 1] * p4 + U[0, 0] * p1 - k22 * p2 - 0.5 * (k23 * r32 + r23 * k32)
          - 1j * (lam12 * r32 - lam21 * r23))
    d3 = (D[0, 0] * p4 + U[1, 1] * p1 - k33 * p3 - 0.5 * (k32 * r23 + r32 * k23)
          - 1j * (lam21 * r23 - lam12 * r32))
    d4 = (U[0, 0] * p3 + U[1, 1] * p2 + U[0, 1] * r23 + U[1, 0] * r32
          - k44 * p4)
    d23 = (D[0, 1] * p4 + U[1, 0] * p1 - 0.5 * (k22 + k33) * r23 - 0.5 * k23 * (p2 + p3)
           - 1j * lam12 * (p3 - p2))
    d14 = -0.5 * (k11 + k44) * r14
    return np.array([d1, d2, d3, d4]), d23, d14


def generator_x(rates: RateSet) -> np.ndarray:
    """Real 8x8 matrix ``M`` with ``d/dt v = M v`` for ``v = XState.vector()``."""
    M = np.empty((8, 8))
    for j in range(8):
        e = np.zeros(8)
        e[j] = 1.0
        dp, d23, d14 = _xdot(rates, e[:4], complex(e[4], e[5]), complex(e[6], e[7]))
        # populations are real for Hermitian input; keep the real part only
        M[:, j] = np.concatenate([dp.real, [d23.real, d23.imag, d14.real, d14.imag]])
    return M


def _superop(left, right):
    # row-major vec(A rho B) = kron(A, B^T) vec(rho)
    return np.kron(left, right.T)


def generator_full(rates: RateSet, hamiltonian=None) -> np.ndarray:
    """Complex 16x16 Liouvillian on ``rho.ravel()`` (row-major), term by term.

    ``hamiltonian`` is an optional extra 4x4 Hermitian term (units of
    Gamma_0) added as ``-i[H, rho]``.
    """
    eye = np.eye(4)
    D, U = np.asarray(rates.down), np.asarray(rates.up)
    H = rates.lambda12 * SIGMA[0].conj().T @ SIGMA[1]
    H = H + H.conj().T
    if hamiltonian is not None:
        H = H + np.asarray(hamiltonian)
    L = -1j * (_superop(H, eye) - _superop(eye, H))
    for q in range(2):
        for qq in range(2):
            sq, sqq = SIGMA[q], SIGMA[qq]
            down_k = sq.conj().T @ sqq
            L += D[q, qq] * (_superop(sqq, sq.conj().T)
                             - 0.5 * (_superop(down_k, eye) + _superop(eye, down_k)))
            up_k = sq @ sqq.conj().T
            L += U[q, qq] * (_superop(sqq.conj().T, sq)
                             - 0.5 * (_superop(up_k, eye) + _superop(eye, up_k)))
    return L


# -- trajectories ---------------------------------------------------------------

@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    digest: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("time grid must be strictly increasing")

    def array(self):
        return np.array([s.vector() for s in self.states])

    def concurrence(self):
        return np.array([concurrence_x(s).C for s in self.states])

    def rows(self):
        for t, s, c in zip(self.times, self.states, self.concurrence()):
            yield [float(t), *s.vector().tolist(), float(c)]

    def to_csv(self, path=None, header_lines=()):
        """CSV text (and optionally a file) with ``#``-prefixed header lines."""
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows():
            w.writerow([repr(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="\n") as fh:
                fh.write(text)
        return text


def evolve(rho0: XState, rates: RateSet, horizon, *, n_points=201, times=None,
           method="expm", rtol=1e-9, atol=1e-12, max_steps=200_000,
           validate_atol=1e-10) -> Trajectory:
    """Propagate ``rho0`` over ``[0, horizon]`` (units of 1/Gamma_0).

    ``method="expm"`` applies the exact propagator at every output time
    (trace eliminated, affine part carried along). ``method="rk"``
    integrates with an adaptive explicit 8(5,3) Runge-Kutta pair and raises :class:`StiffnessDiagnostic` when it
    fails or needs more than ``max_steps`` steps; the large coherent
    coupling near a slab makes that the usual outcome for long horizons.
    """
    rho0.validate(validate_atol)
    if times is None:
        times = np.array([0.0]) if horizon == 0 else np.linspace(0.0, horizon, n_points)
    times = np.asarray(times, dtype=float)
    M = generator_x(rates)
    v0 = rho0.vector()
    if method == "expm":
        vs = _propagate_exact(M, v0, times)
    elif method == "rk":
        vs = _integrate_rk(M, v0, times, rtol, atol, max_steps)
    else:
        raise ValueError(f"unknown method {method!r}")
    states = [XState.from_vector(v).validate(validate_atol) for v in vs]
    return Trajectory(times, states, rates.digest(), {"method": method})


def _propagate_exact(M, v0, times):
    # Eliminate p1 = 1 - p2 - p3 - p4 and carry the affine part as an extra
    # coordinate pinned at 1, so the trace is conserved exactly and the
    # conserved direction never goes through the matrix exponential.
    aug = np.zeros((8, 8))
    aug[:7, :7] = M[1:, 1:] - np.outer(M[1:, 0], [1, 1, 1, 0, 0, 0, 0])
    aug[:7, 7] = M[1:, 0]
    y0 = np.append(v0[1:], 1.0)
    out = []
    for t in times:
        y = y0 if t == 0 else expm(aug * t) @ y0
        out.append(np.concatenate([[1.0 - y[0] - y[1] - y[2]], y[:7]]))
    return out


def _integrate_rk(M, v0, times, rtol, atol, max_steps):
    if len(times) == 1:
        return [v0]
    budget = {"n": 0}
    # DOP853 uses 12 evaluations per step
    limit = 12 * max_steps

    class _Budget(Exception):
        pass

    def rhs(_, v):
        budget["n"] += 1
        if budget["n"] > limit:
            raise _Budget
        return M @ v

    try:
        sol = solve_ivp(rhs, (times[0], times[-1]), v0, method="DOP853", t_eval=times,
                        rtol=rtol, atol=atol)
    except _Budget:
        raise StiffnessDiagnostic(f"step budget of {max_steps} exhausted",
                                  np.linalg.eigvals(M)) from None
    if not sol.success:
        raise StiffnessDiagnostic(sol.message, np.linalg.eigvals(M))
    return list(sol.y.T)


# -- steady state -------------------------------------------------------------------

def steady_state(rates: RateSet, null_rtol=1e-11) -> XState:
    """Unique fixed point of :func:`generator_x`.

    Raises :class:`DegenerateGenerator` (with the null-space basis as
    ``XState``-shaped vectors) when more than one singular value of the
    generator falls below ``null_rtol`` times the dissipative rate scale
    (or the SVD round-off level, if larger). The coherent coupling only
    rotates and can exceed the rates by many orders of magnitude, so it
    does not set the scale.
    """
    M = generator_x(rates)
    _, sv, vt = np.linalg.svd(M)
    rate_scale = np.abs(rates.down).sum() + np.abs(rates.up).sum()
    null = sv <= max(null_rtol * rate_scale, 64 * np.finfo(float).eps * sv[0])
    if np.count_nonzero(null) > 1:
        raise DegenerateGenerator(
            f"null space has dimension {np.count_nonzero(null)}", vt[null])
    A = np.vstack([M, [1, 1, 1, 1, 0, 0, 0, 0]])
    b = np.zeros(9)
    b[-1] = 1.0
    x = np.linalg.lstsq(A, b, rcond=None)[0]
    x += np.linalg.lstsq(A, b - A @ x, rcond=None)[0]
    # entries at the round-off floor of a unit-trace state are zero
    x[np.abs(x) < ROUNDOFF_FLOOR] = 0.0
    return XState.from_vector(x)
