"""How often does a significant result replicate in a new lab?

A two-sample experiment with 11 units per arm and a true effect size of 1
has about 88% power. Run the same experiment somewhere else and a
treatment-by-environment interaction gets added to each arm.
"""
import numpy as np

from replicore import DesignSpec, EffectContext, replicability_power_exact
from replicore.profiles import build_profile, emit_svg

design = DesignSpec(11, 11, alpha=0.05)

# Power of the original study, where the environment was held fixed.
print("initial power:", round(replicability_power_exact(EffectContext(1.0, 0.0), design).p_rep, 3))

# omega is the interaction SD in units of the error SD
for omega in (0.25, 0.5, 1.0, 2.0, 5.0):
    pb = replicability_power_exact(EffectContext(1.0, omega), design)
    print(f"omega={omega:<5} replicate={pb.p_rep:.3f} wrong sign={pb.p_wrong_direction:.3f} "
          f"non-significant={pb.p_nonsig:.3f}")

# As omega grows both directions become equally likely.
big = replicability_power_exact(EffectContext(1.0, 1e4), design)
print("omega=1e4:", np.round([big.p_rep, big.p_wrong_direction], 4))

grid = build_profile(1.0, design, omega_max=2.0, steps=81)
emit_svg(grid, "replicability_power.svg", columns=("p_rep", "p_wrong_direction", "p_nonsig"),
         reference_lines=(), title="Delta = 1, n = 11 per arm")
print("wrote replicability_power.svg")
