"""Drude-Lorentz slab: permittivity and finite-thickness Fresnel coefficients.

Conventions: fields vary as ``exp(-i omega t)``, so passive media have
``Im eps > 0``; every square root is taken on the branch with non-negative
imaginary part. The slab occupies ``-thickness < z < 0`` with vacuum on both
sides. TM amplitudes refer to the polarization vectors

    e_TE = z x k_hat,   e_TM^phi = (c / omega) (-k z_hat + phi k_z k_hat),

which makes the TM reflection coefficient tend to +1 and the TE one to -1 for
a perfect conductor.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import C_LIGHT, SIC_EPS_INF, SIC_GAMMA, SIC_OMEGA_P, SIC_OMEGA_R, UM


class Polarization(str, Enum):
    TE = "TE"
    TM = "TM"


@dataclass(frozen=True)
class SlabModel:
    """Slab geometry and Drude-Lorentz parameters.

    ``thickness`` is in micrometres, frequencies in rad/s. A slab of zero
    thickness is transparent; :meth:`vacuum` removes it altogether and
    skips the material checks.
    """

    thickness: float = 0.01
    omega_r: float = SIC_OMEGA_R
    omega_p: float = SIC_OMEGA_P
    eps_inf: float = SIC_EPS_INF
    gamma: float = SIC_GAMMA
    absent: bool = False

    def __post_init__(self):
        if self.thickness < 0:
            raise ValueError("slab thickness must be >= 0")
        if self.absent:
            return
        if not (self.omega_p > self.omega_r > 0):
            raise ValueError("need omega_p > omega_r > 0")
        if self.eps_inf < 1:
            raise ValueError("eps_inf must be >= 1")
        if self.gamma <= 0:
            raise ValueError("damping must be positive")

    @classmethod
    def vacuum(cls):
        """A slab with eps = 1: reflection 0, transmission 1 exactly."""
        return cls(thickness=0.0, absent=True)

    @property
    def is_transparent(self):
        return self.absent or self.thickness == 0.0


@dataclass(frozen=True)
class ModeCoordinates:
    omega: float
    k: float
    polarization: Polarization = Polarization.TM
    direction: int = 1

    @property
    def propagative(self):
        return C_LIGHT * self.k < self.omega


@dataclass(frozen=True)
class FresnelPair:
    reflection: complex
    transmission: complex


def permittivity(model: SlabModel, omega):
    """eps(omega) = eps_inf (w_p^2 - w^2 - i g w) / (w_r^2 - w^2 - i g w)."""
    omega = np.asarray(omega, dtype=float)
    if model.absent:
        return np.ones_like(omega, dtype=complex)
    iw = 1j * model.gamma * omega
    return model.eps_inf * (model.omega_p**2 - omega**2 - iw) / (model.omega_r**2 - omega**2 - iw)


def _sqrt_upper(x):
    s = np.sqrt(np.asarray(x, dtype=complex))
    return np.where(s.imag < 0, -s, s)


def axial_wavenumber(omega, k, eps=1.0):
    """k_z = sqrt(eps omega^2/c^2 - k^2) with Im k_z >= 0 (units of k)."""
    return _sqrt_upper(eps * (np.asarray(omega) / C_LIGHT) ** 2 - np.asarray(k) ** 2 + 0j)


def slab_coefficients(model: SlabModel, omega, kt, kz=None):
    """Vectorized (rho_TE, tau_TE, rho_TM, tau_TM).

    ``kt`` is the transverse wavenumber in units of omega/c (dimensionless);
    ``kz`` may be supplied (same units) to keep the caller's branch for the
    vacuum wavenumber, e.g. when it comes from a contour substitution.
    """
    kt = np.asarray(kt, dtype=float)
    if kz is None:
        kz = _sqrt_upper(1.0 - kt**2 + 0j)
    if model.is_transparent:
        zero = np.zeros(np.broadcast(kt, kz).shape, dtype=complex)
        return zero, zero + 1, zero, zero + 1
    eps = permittivity(model, omega)
    kzm = _sqrt_upper(eps - kt**2 + 0j)
    r_te = (kz - kzm) / (kz + kzm)
    r_tm = (eps * kz - kzm) / (eps * kz + kzm)
    # Fabry-Perot phase across the slab, thickness in units of c/omega
    ph = np.exp(1j * kzm * (model.thickness * UM * omega / C_LIGHT))
    ph2 = ph * ph
    out = []
    for r in (r_te, r_tm):
        den = 1.0 - r * r * ph2
        out.append(r * (1.0 - ph2) / den)
        out.append((1.0 - r * r) * ph / den)
    return tuple(out)


def fresnel(model: SlabModel, mode: ModeCoordinates) -> FresnelPair:
    """Reflection and transmission amplitudes of the slab for one mode.

    The slab is mirror-symmetric, so both incidence directions give the same
    pair.
    """
    if mode.omega <= 0:
        raise ValueError("omega must be positive")
    if mode.k < 0:
        raise ValueError("k must be >= 0")
    kt = mode.k * C_LIGHT / mode.omega
    r_te, t_te, r_tm, t_tm = slab_coefficients(model, mode.omega, kt)
    if Polarization(mode.polarization) is Polarization.TE:
        return FresnelPair(complex(r_te), complex(t_te))
    return FresnelPair(complex(r_tm), complex(t_tm))
