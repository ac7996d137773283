"""
Optical response of a thin SiC slab
===================================

The slab enters the qubit rates only through its reflection and
transmission amplitudes. Here we look at the permittivity around the
phonon resonance, the reflection of evanescent waves at the qubit
frequency, and the resulting correlation blocks for two qubits 1 um
above a 10 nm film.
"""

import numpy as np

from otqe.correlators import QubitPair, alpha_pair, mode_breakpoints, evanescent_cutoff
from otqe.slab_optics import SlabModel, permittivity, slab_coefficients

slab = SlabModel(thickness=0.01)

# Drude-Lorentz permittivity: negative real part between omega_r and omega_p
# (the reststrahlen band), where surface phonon-polaritons live.
for f in (0.3, 0.9, 1.0, 1.1, 1.2, 1.5):
    eps = complex(permittivity(slab, f * slab.omega_r))
    print(f"omega = {f:.1f} omega_r   eps = {eps.real:10.3f} {eps.imag:+10.3f}j")

# At the working frequency 0.3 omega_r the film is a weak dielectric, but
# evanescent waves (kt > 1, in units of omega/c) still see a strongly
# dispersive reflection, with a guided-mode pole far out in kt.
omega = 0.3 * slab.omega_r
kt = np.array([0.0, 0.5, 0.99, 1.5, 10.0, 100.0])
r_te, _, r_tm, _ = slab_coefficients(slab, omega, kt)
for k, a, b in zip(kt, r_te, r_tm):
    print(f"kt = {k:6.2f}   |r_TE| = {abs(a):.3e}   Im r_TM = {b.imag:+.3e}")

qubits = QubitPair.planar(omega, 1.0, 1.0, 0.25)
# The radial quadrature is split at the slab's guided-mode poles and
# clustered around them; the count shows how structured the integrand is.
bps = mode_breakpoints(slab, omega, evanescent_cutoff(qubits))
print(f"{len(bps)} quadrature breakpoints up to kt = {evanescent_cutoff(qubits):.0f}")

# Correlation blocks: alpha_W is fed by the 30 K walls, alpha_M by the slab.
# alpha_W + alpha_M is temperature independent and close to its vacuum value.
alphas = alpha_pair(slab, qubits)
print("alpha_W =\n", alphas.wall.real)
print("alpha_M =\n", alphas.slab.real)
print("quadrature error estimate:", alphas.error)
