"""
Best achievable steady concurrence
==================================

For two equivalent qubits the steady state depends only on the two
channel photon numbers and the ratio of the channel rates. Maximizing
over the photon numbers shows how much entanglement a given rate ratio
can support, and that equal rates support none.
"""

from pathlib import Path

from otqe.analytics import cmax_scan, symmetric_concurrence
from otqe.config import load_config
from otqe.correlators import ChannelParams
from otqe.runner import run_cmax

cfg = load_config(Path(__file__).parent / "configs" / "cmax.ini")
for r in run_cmax(cfg):
    flag = "" if r.converged else "  (optimum on the n = 1e3 edge)"
    print(f"ratio {r.ratio:9.2e}  C_max = {r.c_max:.4f}  n_A = {r.n_a:9.3g}  n_S = {r.n_s:9.3g}{flag}")

# The limit for a vanishing ratio is approached slowly.
for ratio in (1e-4, 1e-6, 1e-8, 1e-10):
    print(f"ratio {ratio:.0e}: C_max = {cmax_scan(ratio, n_hi=1e5).c_max:.5f}")

# The channel point found near the slab (see concurrence_map.py)
print("C at n_A = 1.53, n_S = 0.02, ratio 2.8e-4:",
      round(symmetric_concurrence(ChannelParams(2.8e-4, 1.0, 1.53, 0.02)).C, 4))
