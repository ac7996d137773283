"""Physical constants (CODATA via scipy) and unit helpers."""
from scipy import constants as _c

C_LIGHT = _c.c
HBAR = _c.hbar
K_B = _c.k
EPS0 = _c.epsilon_0

UM = 1e-6  # metres per micrometre

# SiC resonances used in the reference configuration
SIC_OMEGA_R = 1.495e14
SIC_OMEGA_P = 1.787e14
# conventional Drude-Lorentz completion for SiC (not fixed by the resonances alone)
SIC_EPS_INF = 6.7
SIC_GAMMA = 0.9e12
