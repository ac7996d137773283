"""
No entanglement in thermal equilibrium
======================================

With walls and slab at the same temperature every geometry relaxes to
the same product Gibbs state, whatever the distance to the slab, the
qubit separation or the dipole orientation.
"""

from pathlib import Path

from otqe.config import load_config
from otqe.runner import run_equilibrium_check

cfg = load_config(Path(__file__).parent / "configs" / "eqcheck.ini")
report = run_equilibrium_check(cfg)
print("\n".join(report.lines()))
for v in report.variants:
    print(f"  z1 = {v.z1:.2f}  z2 = {v.z2:.2f}  r12 = {v.r12:.2f}  thickness = {v.thickness:.3f}")
