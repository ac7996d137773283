"""
Relaxation towards the steady entangled state
=============================================

Start from the antisymmetric, symmetric and 30 K thermal states at the
map maximum and follow the concurrence in time. All three end at the same
value; the generator spectrum sets how fast.
"""

import math
from pathlib import Path

import numpy as np

from otqe.config import load_config
from otqe.correlators import gamma_rates
from otqe.dynamics import generator_x
from otqe.runner import geometry_response, run_trace

cfg = load_config(Path(__file__).parent / "configs" / "relaxation.ini")
trajs = run_trace(cfg)

for label, tr in trajs.items():
    c = tr.concurrence()
    print(f"{label:14s} C(0) = {c[0]:.3f}   C(1e4) = {c[-1]:.6f}")

# time for the thermal start to reach 1 - 1/e of the steady value
tr = trajs["thermal(30)"]
c = tr.concurrence()
k = int(np.argmax(c >= (1 - 1 / math.e) * c[-1]))
print(f"thermal start reaches 1 - 1/e of C(inf) at Gamma_0 t ~ {tr.times[k]:.0f}")

# The decay rates are the real parts of the generator eigenvalues. The
# coherent coupling shows up as a large imaginary pair.
geo = geometry_response(cfg.base, cfg.numerics)
rates = gamma_rates(geo.alphas, cfg.base.temperatures(), cfg.base.qubits(), geo.lambda12)
ev = np.linalg.eigvals(generator_x(rates))
for v in sorted(ev, key=lambda v: -v.real):
    print(f"  {v.real:+.3e} {v.imag:+.3e}j")
