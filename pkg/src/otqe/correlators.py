"""Field correlations seen by two qubits near a slab out of thermal equilibrium.

The temperature-independent coefficients ``alpha_W`` (wall radiation, after
reflection and transmission by the slab) and ``alpha_M`` (radiation emitted
by the slab itself) are mode integrals over the transverse wavevector. For a
planar slab the scattering operators are diagonal in ``(k, p)``, so the
double ``k`` integral collapses to one; the azimuthal integral is then done
in closed form with Bessel functions of order 0, 1, 2, leaving a radial
quadrature split at ``k = omega/c``.

Term list per mode (``E_pm`` are the plane-wave phase factors, ``rho``/``tau``
the slab amplitudes, ``e^+`` / ``e^-`` the up/down polarization vectors)::

    alpha_W, propagative:   (|rho|^2+|tau|^2) e+ e+*  + rho e+ e-*
                            + rho* e- e+*  + e- e-*
    alpha_M, propagative:   (1 - |rho|^2 - |tau|^2) e+ e+*
    alpha_M, evanescent:    (rho - rho*) / k_z  e+ e+*

each weighted by ``1/k_z``. The slab-emission bracket acts only on upgoing
modes; this fixes the ambiguous grouping of the printed operator expression
and is the unique choice for which ``alpha_W + alpha_M`` equals
``Im`` of the total Green function (free + Sommerfeld reflected part). That
identity is checked in the test suite against :func:`reflected_green`.

All lengths are micrometres at the API, all rates are in units of the
vacuum spontaneous emission rate ``Gamma_0(omega)``.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import jv

from .constants import C_LIGHT, HBAR, K_B, UM
from .quadrature import adaptive_quad
from .slab_optics import SlabModel, permittivity, slab_coefficients

PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


class AsymmetricConfiguration(ValueError):
    """Channel parameters requested for a non-symmetric qubit configuration."""


@dataclass(frozen=True)
class QubitPair:
    """Two identical-frequency qubits on the vacuum side (z > 0) of the slab.

    ``z`` and ``positions`` are in micrometres; ``dipoles`` are unit vectors
    (complex allowed); ``gamma0`` are vacuum emission rates in units of a
    common reference ``Gamma_0``.
    """

    omega: float
    z: tuple = (1.0, 1.0)
    positions: tuple = ((0.0, 0.0), (0.25, 0.0))
    dipoles: tuple = ((0.0, 0.0, 1.0), (0.0, 0.0, 1.0))
    gamma0: tuple = (1.0, 1.0)

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if min(self.z) <= 0:
            raise ValueError("both qubits must sit above the slab (z > 0)")
        for d in self.dipoles:
            if abs(np.linalg.norm(np.asarray(d, dtype=complex)) - 1) > 1e-12:
                raise ValueError("dipole directions must be unit vectors")
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        object.__setattr__(self, "positions",
                           tuple(tuple(float(c) for c in p) for p in self.positions))
        object.__setattr__(self, "dipoles", tuple(tuple(d) for d in self.dipoles))
        object.__setattr__(self, "gamma0", tuple(float(g) for g in self.gamma0))

    @classmethod
    def planar(cls, omega, z1, z2, r12, dipole=(0.0, 0.0, 1.0), dipole2=None):
        """Qubits separated by ``r12`` along x, with the given heights."""
        d2 = dipole if dipole2 is None else dipole2
        return cls(omega, (z1, z2), ((0.0, 0.0), (r12, 0.0)), (tuple(dipole), tuple(d2)))

    @property
    def wavenumber(self):
        """omega/c in 1/um."""
        return self.omega / C_LIGHT * UM

    @property
    def r12(self):
        return float(np.hypot(*np.subtract(self.positions[0], self.positions[1])))

    def dipole_array(self):
        return np.array(self.dipoles, dtype=complex)

    @property
    def real_dipoles(self):
        return not np.any(np.imag(self.dipole_array()))

    def with_omega(self, omega):
        return QubitPair(omega, self.z, self.positions, self.dipoles, self.gamma0)


@dataclass(frozen=True)
class EnvTemperatures:
    wall: float
    slab: float

    def __post_init__(self):
        if self.wall < 0 or self.slab < 0:
            raise ValueError("temperatures must be >= 0")


@dataclass
class SpectralAlphas:
    """Contracted 2x2 blocks ``alpha[q, q']`` for the wall and slab sources."""

    wall: np.ndarray
    slab: np.ndarray
    error: float = 0.0

    @property
    def total(self):
        return self.wall + self.slab


@dataclass
class RateSet:
    """Rates entering the master equation, in units of Gamma_0.

    ``down[q, q'] = Gamma^{qq'}(omega)``, ``up[q, q'] = Gamma^{qq'}(-omega)``.
    """

    down: np.ndarray
    up: np.ndarray
    lambda12: float = 0.0
    gamma0: tuple = (1.0, 1.0)
    lambda_included: bool = False

    def __post_init__(self):
        self.down = np.asarray(self.down, dtype=complex)
        self.up = np.asarray(self.up, dtype=complex)
        for m in (self.down, self.up):
            if m.shape != (2, 2) or np.max(np.abs(m - m.conj().T)) > 1e-12 * (1 + np.max(np.abs(m))):
                raise ValueError("rate blocks must be Hermitian 2x2 matrices")

    def digest(self):
        payload = np.concatenate([self.down.ravel(), self.up.ravel(), [self.lambda12]])
        return hashlib.sha256(payload.astype(complex).tobytes()).hexdigest()[:16]


@dataclass
class ChannelParams:
    gamma_a: float
    gamma_s: float
    n_a: float
    n_s: float
    temperature_a: float = float("nan")
    temperature_s: float = float("nan")

    @property
    def ratio(self):
        return self.gamma_a / self.gamma_s


# -- thermal occupation -----------------------------------------------------

def bose_n(omega, T):
    """Mean photon number (exp(hbar w / k_B T) - 1)^-1, exactly 0 at T = 0."""
    T = np.asarray(T, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        x = HBAR * np.asarray(omega) / (K_B * T)
        n = np.where(T > 0, 1.0 / np.expm1(np.where(T > 0, x, 1.0)), 0.0)
    return n if n.ndim else float(n)


def bose_temperature(omega, n):
    """Inverse of :func:`bose_n`: the temperature giving occupation ``n``."""
    if n <= 0:
        return 0.0
    return HBAR * omega / (K_B * math.log1p(1.0 / n))


# -- free space -------------------------------------------------------------

def free_green(wavenumber, sep):
    """Dimensionless free-space dyadic ``g`` with ``Im g -> identity`` at contact.

    ``g = (6 pi eps0 c^3 / omega^3) G`` so that ``Im g`` is the vacuum part of
    ``alpha_W + alpha_M`` and ``-Re g / 2`` the dipole-dipole shift in units
    of Gamma_0. ``sep`` is the 3-vector between the points in micrometres.
    """
    sep = np.asarray(sep, dtype=float)
    dist = np.linalg.norm(sep)
    if dist == 0:
        return np.eye(3) * (np.nan + 1j)
    x = wavenumber * dist
    rr = np.outer(sep, sep) / dist**2
    a = 1 + 1j / x - 1 / x**2
    b = -1 - 3j / x + 3 / x**2
    return 1.5 * np.exp(1j * x) / x * (a * np.eye(3) + b * rr)


def free_alpha(qubits: QubitPair):
    """Vacuum ``alpha_W + alpha_M`` blocks (closed form)."""
    d = qubits.dipole_array()
    out = np.zeros((2, 2), dtype=complex)
    pos = _positions3(qubits)
    for q, qq in PAIRS:
        if q == qq or np.all(pos[q] == pos[qq]):
            # Im g is the identity at contact; only Re g diverges
            out[q, qq] = np.vdot(d[q], d[qq])
        else:
            g = free_green(qubits.wavenumber, pos[q] - pos[qq])
            out[q, qq] = d[q].conj() @ g.imag @ d[qq]
    return out


def _positions3(qubits):
    return np.array([[*qubits.positions[i], qubits.z[i]] for i in range(2)])


# -- azimuthally reduced integrand -------------------------------------------

class _PairGeometry:
    """Per-pair constants for the Bessel-reduced angular average."""

    def __init__(self, qubits, q, qq):
        kw = qubits.wavenumber
        d = qubits.dipole_array()
        dl, dr = d[q].conj(), d[qq]
        rvec = np.subtract(qubits.positions[q], qubits.positions[qq])
        self.rho = kw * float(np.hypot(*rvec))
        psi = math.atan2(rvec[1], rvec[0]) if self.rho > 0 else 0.0
        c2, s2 = math.cos(2 * psi), math.sin(2 * psi)
        rhat = np.array([math.cos(psi), math.sin(psi), 0.0])
        # d_l . M . d_r for the in-plane tensors, as coefficients of J0 and J2
        xx, xy, yx, yy = dl[0] * dr[0], dl[0] * dr[1], dl[1] * dr[0], dl[1] * dr[1]
        self.kk0 = 0.5 * (xx + yy)
        self.kk2 = -0.5 * (c2 * (xx - yy) + s2 * (xy + yx))
        self.tt2 = -self.kk2
        self.kz1 = 1j * (dl @ rhat) * dr[2]
        self.zk1 = 1j * dl[2] * (rhat @ dr)
        self.zz0 = dl[2] * dr[2]
        self.zsum = kw * (qubits.z[q] + qubits.z[qq])
        self.zdiff = kw * (qubits.z[q] - qubits.z[qq])

    def bessels(self, kt):
        x = kt * self.rho
        if self.rho == 0:
            one = np.ones_like(kt)
            return one, 0 * one, 0 * one
        return jv(0, x), jv(1, x), jv(2, x)

    def contract(self, kt):
        j0, j1, j2 = self.bessels(kt)
        c_kk = self.kk0 * j0 + self.kk2 * j2
        c_tt = self.kk0 * j0 + self.tt2 * j2
        return c_tt, c_kk, self.kz1 * j1, self.zk1 * j1, self.zz0 * j0


def _tm(c, ak, az, bk, bz):
    _, c_kk, c_kz, c_zk, c_zz = c
    return ak * bk * c_kk + ak * bz * c_kz + az * bk * c_zk + az * bz * c_zz


def _alpha_integrands(slab, qubits, pairs):
    geo = [_PairGeometry(qubits, q, qq) for q, qq in pairs]
    omega = qubits.omega
    n = len(pairs)

    def propagative(t):
        kt, kz = np.sin(t), np.cos(t)
        r_te, t_te, r_tm, t_tm = slab_coefficients(slab, omega, kt, kz + 0j)
        out = np.empty((t.size, 2 * n), dtype=complex)
        for j, g in enumerate(geo):
            c = g.contract(kt)
            epp = np.exp(1j * kz * g.zdiff)
            epm = np.exp(1j * kz * g.zsum)
            emm, emp = epp.conj(), epm.conj()
            wall = slab_part = 0
            for p, (r, tt) in enumerate(((r_te, t_te), (r_tm, t_tm))):
                if p == 0:
                    tpp = tpm = tmp = tmm = c[0]
                else:
                    # e^+ = (kz, -kt), e^- = (-kz, -kt) in the (k_hat, z_hat) plane
                    tpp = _tm(c, kz, -kt, kz, -kt)
                    tpm = _tm(c, kz, -kt, -kz, -kt)
                    tmp = _tm(c, -kz, -kt, kz, -kt)
                    tmm = _tm(c, -kz, -kt, -kz, -kt)
                refl = np.abs(r) ** 2 + np.abs(tt) ** 2
                wall = wall + (epp * refl * tpp + epm * r * tpm + emp * r.conj() * tmp + emm * tmm)
                slab_part = slab_part + epp * (1 - refl) * tpp
            out[:, j] = wall * kt
            out[:, n + j] = slab_part * kt
        return 0.75 * out

    def evanescent(u):
        kt, kap = np.cosh(u), np.sinh(u)
        r_te, _, r_tm, _ = slab_coefficients(slab, omega, kt, 1j * kap)
        out = np.zeros((u.size, 2 * n), dtype=complex)
        for j, g in enumerate(geo):
            c = g.contract(kt)
            decay = np.exp(-kap * g.zsum)
            # e^+ = (i kap, -kt); conjugate on the right index
            val = 2 * r_te.imag * c[0] + 2 * r_tm.imag * _tm(c, 1j * kap, -kt, -1j * kap, -kt)
            out[:, n + j] = val * decay * kt
        return 0.75 * out

    return propagative, evanescent


def mode_breakpoints(slab: SlabModel, omega, kt_max, samples=4000):
    """Evanescent-sector breakpoints (in ``u = acosh(kt)``) around slab modes.

    Guided and surface modes of a weakly lossy film make the reflection
    coefficients sharply peaked, sometimes within 1e-7 of the light line.
    Peaks are located as local minima of the Fabry-Perot denominator
    ``|1 - r^2 exp(2 i k_zm d)|`` on a log grid in ``kt - 1``, polished with a
    bounded scalar search, and surrounded by edges spaced geometrically from
    the estimated half-width outwards. The medium branch point
    ``kt = sqrt(Re eps)`` is added as a kink.
    """
    if slab.is_transparent:
        return []
    eps = complex(permittivity(slab, omega))
    thick = slab.thickness * UM * omega / C_LIGHT

    def denom(kt):
        kt = np.asarray(kt, dtype=float)
        kz = 1j * np.sqrt(np.maximum(kt * kt - 1.0, 0.0))
        kzm = np.sqrt(eps - kt * kt + 0j)
        kzm = np.where(kzm.imag < 0, -kzm, kzm)
        ph2 = np.exp(2j * kzm * thick)
        r_te = (kz - kzm) / (kz + kzm)
        r_tm = (eps * kz - kzm) / (eps * kz + kzm)
        return np.stack([1 - r_te * r_te * ph2, 1 - r_tm * r_tm * ph2])

    x = np.logspace(-12, math.log10(kt_max - 1.0), samples)
    mags = np.abs(denom(1.0 + x))
    kts = []
    for m in mags:
        idx = np.where((m[1:-1] < m[:-2]) & (m[1:-1] <= m[2:]))[0] + 1
        for i in idx:
            lo, hi = math.log(x[i - 1]), math.log(x[i + 1])
            res = minimize_scalar(lambda v: float(np.min(np.abs(denom(1.0 + math.exp(v))))),
                                  bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-10})
            kts.append(1.0 + math.exp(res.x))
    if eps.real > 1:
        kts.append(math.sqrt(eps.real))
    edges = set()
    for k0 in kts:
        if not (1.0 < k0 < kt_max):
            continue
        d0 = denom(k0)
        h = 1e-6 * (k0 - 1.0)
        slope = np.abs(denom(k0 + h) - denom(k0 - h)) / (2 * h)
        width = float(np.min(np.abs(d0) / np.maximum(slope, 1e-300)))
        width = min(max(width, 1e-3 * (k0 - 1.0)), 0.5 * (k0 - 1.0))
        step = 0.25 * width
        edges.add(k0)
        while step < 0.9 * (k0 - 1.0) or k0 + step < kt_max:
            for kk in (k0 - step, k0 + step):
                if 1.0 < kk < kt_max:
                    edges.add(kk)
            step *= 2.0
    return sorted(math.acosh(k) for k in edges)


def evanescent_cutoff(qubits: QubitPair):
    """Upper transverse wavenumber (units of omega/c): k_max = w/c + 20 / min z."""
    return 1.0 + 20.0 / (qubits.wavenumber * min(qubits.z))


def alpha_pair(slab: SlabModel, qubits: QubitPair, *, tol=1e-8, pairs=PAIRS,
               max_panels=4000) -> SpectralAlphas:
    """Contracted ``alpha_W`` and ``alpha_M`` blocks at the qubit frequency.

    Raises :class:`otqe.quadrature.QuadratureError` (carrying the worst
    panel) when the adaptive budget is exhausted.
    """
    pairs = tuple(pairs)
    prop, evan = _alpha_integrands(slab, qubits, pairs)
    res_p = adaptive_quad(prop, 0.0, 0.5 * math.pi, epsabs=tol, epsrel=tol,
                          max_panels=max_panels)
    value = res_p.value
    error = res_p.error
    if not slab.is_transparent:
        ktmax = evanescent_cutoff(qubits)
        bps = mode_breakpoints(slab, qubits.omega, ktmax)
        res_e = adaptive_quad(evan, 0.0, math.acosh(ktmax), epsabs=tol, epsrel=tol,
                              breakpoints=bps, max_panels=max_panels,
                              initial_panels=1 if bps else 8)
        value = value + res_e.value
        error += res_e.error
    n = len(pairs)
    wall = np.full((2, 2), np.nan + 0j)
    slab_block = np.full((2, 2), np.nan + 0j)
    for j, (q, qq) in enumerate(pairs):
        wall[q, qq] = value[j]
        slab_block[q, qq] = value[n + j]
    return SpectralAlphas(wall, slab_block, error)


def _composite_gl(edges, order, sub):
    x, w = np.polynomial.legendre.leggauss(order)
    e = np.asarray(edges, dtype=float)
    fine = np.concatenate([np.linspace(a, b, sub + 1)[:-1] for a, b in zip(e[:-1], e[1:])]
                          + [e[-1:]])
    lo, hi = fine[:-1], fine[1:]
    half = 0.5 * (hi - lo)
    nodes = ((0.5 * (hi + lo))[:, None] + half[:, None] * x).ravel()
    return nodes, (half[:, None] * w).ravel()


def alpha_pair_bruteforce(slab: SlabModel, qubits: QubitPair, *, n_theta=96, order=16,
                          sub_prop=96, sub_evan=4) -> SpectralAlphas:
    """Reference ``alpha`` blocks from the literal two-dimensional k integral.

    Fixed composite Gauss-Legendre in the radial variable and the periodic
    trapezoid rule in the azimuth; polarization vectors, phases and the
    scattering term list are built mode by mode in Cartesian components.
    Meant as a test oracle.
    """
    kw = qubits.wavenumber
    d = qubits.dipole_array()
    pos = _positions3(qubits)
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    khat = np.stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)], axis=-1)
    zhat = np.array([0.0, 0.0, 1.0])
    e_te = np.cross(zhat, khat)
    pref = 3.0 / (8 * math.pi) * (2 * math.pi / n_theta)
    wall = np.zeros((2, 2), dtype=complex)
    emit = np.zeros((2, 2), dtype=complex)

    def sector(kt, kz, weight, propagating):
        # arrays over radial nodes (n,) and azimuths (m,)
        r_te, t_te, r_tm, t_tm = slab_coefficients(slab, qubits.omega, kt, kz)
        kt_, kz_ = kt[:, None, None], kz[:, None, None]
        modes = (
            (r_te, t_te, np.broadcast_to(e_te, (kt.size, n_theta, 3)),
             np.broadcast_to(e_te, (kt.size, n_theta, 3))),
            (r_tm, t_tm, -kt_ * zhat + kz_ * khat, -kt_ * zhat - kz_ * khat),
        )
        for q in range(2):
            for qq in range(2):
                lat = np.exp(1j * kw * kt[:, None] * (khat @ (pos[q] - pos[qq])))
                zq, zqq = kw * pos[q][2], kw * pos[qq][2]
                epp = np.exp(1j * (kz * zq - np.conj(kz) * zqq))[:, None]
                for r, tt, ep, em in modes:
                    r = r[:, None]
                    lp, lm = ep @ d[q].conj(), em @ d[q].conj()
                    rp, rm = ep.conj() @ d[qq], em.conj() @ d[qq]
                    if propagating:
                        epm = np.exp(1j * (kz * zq + np.conj(kz) * zqq))[:, None]
                        emp = np.exp(-1j * (kz * zq + np.conj(kz) * zqq))[:, None]
                        emm = np.exp(-1j * (kz * zq - np.conj(kz) * zqq))[:, None]
                        refl = np.abs(r) ** 2 + np.abs(tt[:, None]) ** 2
                        w_term = (epp * refl * lp * rp + epm * r * lp * rm
                                  + emp * np.conj(r) * lm * rp + emm * lm * rm)
                        m_term = epp * (1 - refl) * lp * rp
                        wall[q, qq] += np.sum(weight[:, None] * lat * w_term / kz[:, None])
                        emit[q, qq] += np.sum(weight[:, None] * lat * m_term / kz[:, None])
                    else:
                        m_term = (r - np.conj(r)) / kz[:, None] * epp * lp * rp
                        emit[q, qq] += np.sum(weight[:, None] * lat * m_term)

    t, wt = _composite_gl([0.0, 0.5 * math.pi], order, sub_prop)
    kt, kz = np.sin(t), np.cos(t)
    # kt dkt = kt kz dt
    sector(kt, kz + 0j, pref * wt * kt * kz, True)
    if not slab.is_transparent:
        ktmax = evanescent_cutoff(qubits)
        umax = math.acosh(ktmax)
        edges = sorted({0.0, umax, *mode_breakpoints(slab, qubits.omega, ktmax),
                        *np.linspace(0.0, umax, 17).tolist()})
        u, wu = _composite_gl(edges, order, sub_evan)
        kt, kap = np.cosh(u), np.sinh(u)
        # kt dkt = kt sinh(u) du
        sector(kt, 1j * kap, pref * wu * kt * kap, False)
    return SpectralAlphas(wall, emit)


def reflected_green(slab: SlabModel, qubits: QubitPair, *, tol=1e-9):
    """Contracted Sommerfeld reflected Green function ``d_q^* . g_ref . d_q'``.

    Same normalization as :func:`free_green`: ``Im`` gives the slab part of
    ``alpha_W + alpha_M`` and ``-Re/2`` the slab part of the coherent
    coupling. Used as an independent cross-check of both.
    """
    geo = [_PairGeometry(qubits, q, qq) for q, qq in PAIRS]
    omega = qubits.omega
    if slab.is_transparent:
        return np.zeros((2, 2), dtype=complex)

    def prop(t):
        kt, kz = np.sin(t), np.cos(t)
        r_te, _, r_tm, _ = slab_coefficients(slab, omega, kt, kz + 0j)
        out = np.empty((t.size, 4), dtype=complex)
        for j, g in enumerate(geo):
            c = g.contract(kt)
            val = r_te * c[0] + r_tm * _tm(c, kz, -kt, -kz, -kt)
            out[:, j] = 1.5j * val * np.exp(1j * kz * g.zsum) * kt
        return out

    def evan(u):
        kt, kap = np.cosh(u), np.sinh(u)
        r_te, _, r_tm, _ = slab_coefficients(slab, omega, kt, 1j * kap)
        out = np.empty((u.size, 4), dtype=complex)
        for j, g in enumerate(geo):
            c = g.contract(kt)
            val = r_te * c[0] + r_tm * _tm(c, 1j * kap, -kt, -1j * kap, -kt)
            out[:, j] = 1.5 * val * np.exp(-kap * g.zsum) * kt
        return out

    ktmax = evanescent_cutoff(qubits)
    bps = mode_breakpoints(slab, omega, ktmax)
    v = (adaptive_quad(prop, 0, 0.5 * math.pi, epsabs=tol, epsrel=tol, max_panels=4000).value
         + adaptive_quad(evan, 0, math.acosh(ktmax), epsabs=tol, epsrel=tol, breakpoints=bps,
                         initial_panels=1 if bps else 8, max_panels=4000).value)
    return v.reshape(2, 2)


# -- rates ------------------------------------------------------------------

def gamma_rates(alphas: SpectralAlphas, temps: EnvTemperatures, qubits: QubitPair,
                lambda12=None) -> RateSet:
    """Assemble Gamma^{qq'}(+-omega) from the alphas and the Bose factors.

    ``lambda12`` (units of Gamma_0, e.g. from :func:`lambda_shift`) is stored
    as given; when omitted the coherent coupling is zero and
    ``lambda_included`` is False.
    """
    nw = bose_n(qubits.omega, temps.wall)
    nm = bose_n(qubits.omega, temps.slab)
    g0 = np.asarray(qubits.gamma0)
    scale = np.sqrt(np.outer(g0, g0))
    down = scale * ((1 + nw) * alphas.wall + (1 + nm) * alphas.slab)
    up = scale * (nw * alphas.wall.conj() + nm * alphas.slab.conj())
    included = lambda12 is not None
    return RateSet(down, up, float(lambda12) if included else 0.0, tuple(g0), included)


def channel_params(alphas: SpectralAlphas, temps: EnvTemperatures, omega,
                   atol=1e-9) -> ChannelParams:
    """Antisymmetric/symmetric channel rates and effective photon numbers.

    Requires a symmetric configuration: equal diagonal alphas and real
    off-diagonal ones (per source), within ``atol``.
    """
    for a in (alphas.wall, alphas.slab):
        if (abs(a[0, 0] - a[1, 1]) > atol or np.max(np.abs(a.imag)) > atol
                or abs(a[0, 1] - a[1, 0]) > atol):
            raise AsymmetricConfiguration(
                "channel parameters need alpha^11 = alpha^22 and real alpha^12")
    aw, aw12 = alphas.wall[0, 0].real, alphas.wall[0, 1].real
    am, am12 = alphas.slab[0, 0].real, alphas.slab[0, 1].real
    nw, nm = bose_n(omega, temps.wall), bose_n(omega, temps.slab)
    ga = aw - aw12 + am - am12
    gs = aw + aw12 + am + am12
    na = ((aw - aw12) * nw + (am - am12) * nm) / ga if ga > 0 else float("nan")
    ns = ((aw + aw12) * nw + (am + am12) * nm) / gs if gs > 0 else float("nan")
    ga, gs, na, ns = float(ga), float(gs), float(na), float(ns)
    return ChannelParams(ga, gs, na, ns, bose_temperature(omega, na), bose_temperature(omega, ns))


# -- coherent dipole-dipole coupling -------------------------------------------

@dataclass(frozen=True)
class FrequencyGrid:
    """Tabulation of omega'/omega for the principal-value integral.

    Log-spaced panels over ``[1/r_cut, r_cut]`` (Gauss-Legendre nodes inside
    each), a panel edge exactly at the pole ``s = 1``, and geometric
    clustering of edges around ``features`` (material resonances, in units
    of omega) down to ``feature_width``.
    """

    r_cut: float = 50.0
    panels_per_decade: int = 12
    nodes: int = 8
    features: tuple = ()
    feature_width: float = 1e-3

    def refined(self):
        """Twice the panel density and twice the range."""
        return FrequencyGrid(2 * self.r_cut, 2 * self.panels_per_decade, self.nodes,
                             self.features, self.feature_width)

    def edges(self):
        lo, hi = -math.log10(self.r_cut), math.log10(self.r_cut)
        n = max(2, int(math.ceil((hi - lo) * self.panels_per_decade)))
        e = set(np.round(np.logspace(lo, hi, n + 1), 14).tolist())
        e.add(1.0)
        for s0 in self.features:
            if not (1 / self.r_cut < s0 < self.r_cut):
                continue
            h = self.feature_width
            while h < 0.5 * s0:
                e.update((s0 - h, s0 + h))
                h *= 2 ** (4 / self.panels_per_decade)
            e.add(s0)
        return np.array(sorted(v for v in e if 1 / self.r_cut <= v <= self.r_cut))

    def nodes_weights(self):
        x, w = np.polynomial.legendre.leggauss(self.nodes)
        e = self.edges()
        lo, hi = e[:-1], e[1:]
        half = 0.5 * (hi - lo)
        s = (0.5 * (hi + lo))[:, None] + half[:, None] * x[None, :]
        return s.ravel(), (half[:, None] * w[None, :]).ravel()


def default_grid(slab: SlabModel, omega, **kw):
    feats = ()
    if not slab.is_transparent:
        # bulk resonance, longitudinal frequency and the eps = -1 surface mode
        w_sp = math.sqrt((slab.eps_inf * slab.omega_p**2 + slab.omega_r**2) / (slab.eps_inf + 1))
        feats = tuple(w / omega for w in (slab.omega_r, w_sp, slab.omega_p))
        kw.setdefault("feature_width", 0.25 * slab.gamma / omega)
    return FrequencyGrid(features=feats, **kw)


@dataclass
class LambdaResult:
    value: float
    free: float
    slab: float
    converged: bool = True
    history: list = field(default_factory=list)


class RefinementDiagnostic(RuntimeError):
    """Principal-value tabulation did not self-converge."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


def _taper(s, r_cut):
    # Gaussian regulator for the oscillatory high-frequency tail; the PV
    # integral is its r_cut -> infinity limit.
    return np.exp(-(s / (0.25 * r_cut)) ** 2)


def pv_slab_shift(slab: SlabModel, qubits: QubitPair, grid: FrequencyGrid, tol=1e-8):
    """Slab part of Lambda^{12} / sqrt(G0^1 G0^2) from a tabulated alpha^{12}.

    Evaluates ``(1/2pi) PV int_0^inf f(s) [1/(1-s) - 1/(1+s)] ds`` with
    ``f(s) = s^3 alpha_slab(s omega)`` (``alpha`` is even in frequency),
    subtracting ``f(1)`` at the pole and adding its log remainder.
    """
    s, w = grid.nodes_weights()
    f = np.empty(s.size)
    for i, si in enumerate(s):
        f[i] = si**3 * _alpha12_slab(slab, qubits.with_omega(si * qubits.omega), tol)
    f1 = _alpha12_slab(slab, qubits, tol)
    taper = _taper(s, grid.r_cut)
    edges = grid.edges()
    a, b = edges[0], edges[-1]
    smooth = (f * taper - f1) / (1 - s)
    integral = np.sum(w * smooth) + f1 * math.log((1 - a) / (b - 1))
    integral -= np.sum(w * f * taper / (1 + s))
    return integral / (2 * math.pi)


def _alpha12_slab(slab, qubits, tol):
    a = alpha_pair(slab, qubits, tol=tol, pairs=((0, 1),))
    return (a.total[0, 1] - free_alpha(qubits)[0, 1]).real


def free_shift(qubits: QubitPair):
    """Vacuum dipole-dipole coupling -Re(d1 . g . d2)/2 in units of Gamma_0."""
    pos = _positions3(qubits)
    g = free_green(qubits.wavenumber, pos[0] - pos[1])
    d = qubits.dipole_array()
    return -0.5 * float((d[0].conj() @ g.real @ d[1]).real)


def lambda_shift(slab: SlabModel, qubits: QubitPair, grid: FrequencyGrid | None = None,
                 *, method="pv", rtol=1e-4, atol=1e-3, max_doublings=3, tol=1e-8,
                 raise_on_fail=False) -> LambdaResult:
    """Coherent coupling Lambda^{12} in units of sqrt(Gamma_0^1 Gamma_0^2).

    The vacuum part is closed form. With ``method="pv"`` the slab remainder
    is the principal-value integral of the tabulated ``alpha^{12}`` over
    frequency; the tabulation (range and density) is doubled until two
    successive slab estimates differ by at most ``max(atol, rtol |Lambda|)``.
    ``max_doublings=0`` evaluates the starting grid once and reports it as
    unconverged. ``method="green"`` takes the real part of the reflected
    Green function instead (one k-space quadrature, much cheaper).
    """
    if not qubits.real_dipoles:
        raise ValueError("coherent coupling is implemented for real dipole vectors")
    free = free_shift(qubits)
    if slab.is_transparent:
        return LambdaResult(free, free, 0.0)
    if method == "green":
        part = -0.5 * float(reflected_green(slab, qubits)[0, 1].real)
        return LambdaResult(free + part, free, part)
    if method != "pv":
        raise ValueError(f"unknown method {method!r}")
    grid = grid or default_grid(slab, qubits.omega)
    history = [(grid.r_cut, grid.panels_per_decade, pv_slab_shift(slab, qubits, grid, tol))]
    for _ in range(max_doublings):
        grid = grid.refined()
        history.append((grid.r_cut, grid.panels_per_decade, pv_slab_shift(slab, qubits, grid, tol)))
        prev, cur = history[-2][2], history[-1][2]
        if abs(cur - prev) <= max(atol, rtol * abs(free + cur)):
            return LambdaResult(free + cur, free, cur, True, history)
    if raise_on_fail:
        raise RefinementDiagnostic("principal-value tabulation did not converge", history)
    cur = history[-1][2]
    return LambdaResult(free + cur, free, cur, False, history)


# -- on-disk cache ----------------------------------------------------------

class AlphaCache:
    """Plain-text store of :class:`SpectralAlphas` keyed by a content hash.

    One record per line: ``q q' W|M re im`` with float.hex() values.
    """

    def __init__(self, directory):
        self.directory = Path(directory)

    @staticmethod
    def key(slab, qubits, tol):
        return hashlib.sha256(repr((slab, qubits, tol)).encode()).hexdigest()[:24]

    def path(self, slab, qubits, tol):
        return self.directory / f"alphas-{self.key(slab, qubits, tol)}.txt"

    def load(self, slab, qubits, tol):
        p = self.path(slab, qubits, tol)
        if not p.exists():
            return None
        wall = np.zeros((2, 2), dtype=complex)
        slab_block = np.zeros((2, 2), dtype=complex)
        for line in p.read_text().splitlines():
            if not line or line.startswith("#"):
                continue
            q, qq, src, re_, im_ = line.split()
            target = wall if src == "W" else slab_block
            target[int(q) - 1, int(qq) - 1] = complex(float.fromhex(re_), float.fromhex(im_))
        return SpectralAlphas(wall, slab_block)

    def store(self, slab, qubits, tol, alphas: SpectralAlphas):
        self.directory.mkdir(parents=True, exist_ok=True)
        lines = [f"# {slab!r}", f"# {qubits!r}", f"# tol={tol!r}"]
        for src, block in (("W", alphas.wall), ("M", alphas.slab)):
            for q, qq in PAIRS:
                v = complex(block[q, qq])
                lines.append(f"{q + 1} {qq + 1} {src} {v.real.hex()} {v.imag.hex()}")
        self.path(slab, qubits, tol).write_text("\n".join(lines) + "\n")

    def get(self, slab, qubits, tol=1e-8):
        hit = self.load(slab, qubits, tol)
        if hit is None:
            hit = alpha_pair(slab, qubits, tol=tol)
            self.store(slab, qubits, tol, hit)
        return hit
