"""Independent reference implementations used only by the tests."""
import math

import numpy as np

from otqe.constants import C_LIGHT, UM


def transfer_matrix_slab(eps, kt, thickness_k, polarization):
    """Slab (r, t) from interface and propagation matrices.

    Tangential field U (E_y for TE, H_y for TM) written as
    ``a exp(i kz z) + b exp(-i kz z)`` in each layer; ``U`` and
    ``Y (a - b)`` are continuous with ``Y = kz`` (TE) or ``kz / eps`` (TM).
    Incidence from z > 0 travelling downwards; ``thickness_k`` is the
    thickness in units of c/omega. Returns the reflected amplitude at z = 0
    and the transmitted amplitude at z = -d, per unit incident amplitude at
    z = 0.
    """
    def kz_of(e):
        s = np.sqrt(complex(e - kt * kt))
        return -s if s.imag < 0 else s

    layers = [(1.0, kz_of(1.0)), (eps, kz_of(eps)), (1.0, kz_of(1.0))]

    def admittance(e, kz):
        return kz if polarization == "TE" else kz / e

    def field_matrix(e, kz, z):
        # maps (a, b) to (U, Y*(a e^{ikz z} - b e^{-ikz z})) at height z
        y = admittance(e, kz)
        p, m = np.exp(1j * kz * z), np.exp(-1j * kz * z)
        return np.array([[p, m], [y * p, -y * m]])

    # unknowns: region 0 (a0 = r, b0 = 1), region 1 (a1, b1), region 2 (a2 = 0, b2 = t)
    F0 = field_matrix(*layers[0], 0.0)
    F1_top = field_matrix(*layers[1], 0.0)
    F1_bot = field_matrix(*layers[1], -thickness_k)
    F2 = field_matrix(*layers[2], -thickness_k)
    # transmitted wave referenced to z = -d: b2 exp(-ikz (z + d)) -> scale F2 column
    F2 = F2 * np.array([[1.0, np.exp(-1j * layers[2][1] * thickness_k)]])
    M = np.zeros((4, 4), dtype=complex)
    rhs = np.zeros(4, dtype=complex)
    # top interface: F0 (r, 1) = F1_top (a1, b1)
    M[0:2, 0] = F0[:, 0]
    rhs[0:2] = -F0[:, 1]
    M[0:2, 1:3] = -F1_top
    # bottom interface: F1_bot (a1, b1) = F2 (0, t)
    M[2:4, 1:3] = F1_bot
    M[2:4, 3] = -F2[:, 1]
    r, _, _, t = np.linalg.solve(M, rhs)
    return r, t


def wootters(rho):
    """Concurrence of an arbitrary two-qubit density matrix."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    R = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.abs(np.sort(np.linalg.eigvals(R).real)[::-1]))
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def free_alpha12_perp(x):
    """Vacuum alpha^12 for parallel dipoles perpendicular to the separation."""
    return 1.5 * (math.sin(x) / x + math.cos(x) / x**2 - math.sin(x) / x**3)


def free_lambda_perp_kernel(x):
    """Bracket -cos x/x + sin x/x^2 + cos x/x^3 of the vacuum dipole-dipole shift."""
    return -math.cos(x) / x + math.sin(x) / x**2 + math.cos(x) / x**3


def wavenumber(omega):
    return omega / C_LIGHT * UM
