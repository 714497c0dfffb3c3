"""Where a value of omega can come from.

1. An intraclass correlation reported elsewhere bounds omega from above.
2. Published shares of variance for interaction and error give omega directly.
3. A randomized complete block study with replicated cells lets you estimate it.
"""
import numpy as np

from replicore import RcbLayout, eer_bound_from_icc, eer_from_variance_proportions, rcb_variance_components, simulate_rcb
from replicore.eer import MULTILAB_EER

for rho in (0.07, 0.12, 0.23, 0.30, 0.34):
    print(f"rho={rho:.2f} -> omega < {eer_bound_from_icc(rho).omega_upper:.3f}")

print("\ninteraction 12% / error 30% of total variance -> omega =",
      round(eer_from_variance_proportions(0.12, 0.30), 3))

print("\nmulti-lab endpoints, largest EER first:")
for name, w in sorted(MULTILAB_EER.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {name:<22} {w:.2f}")

# blocks play the role of environments
rng = np.random.default_rng(7)
layout = RcbLayout(b=5, t=3, r=4)
y = simulate_rcb(layout, 1.0, 4.0, 9.0, rng)
vc = rcb_variance_components(y)
print(f"\n5 blocks x 3 treatments x 4 reps: block {vc.sigma2_block:.2f}, interaction "
      f"{vc.sigma2_interaction:.2f}, error {vc.sigma2_error:.2f}, omega-hat {vc.eer_hat:.3f}")

# five blocks is not much information about a variance; repeat to see the spread
hats = [rcb_variance_components(simulate_rcb(layout, 1.0, 4.0, 9.0, rng), warn=False).eer_hat for _ in range(2000)]
print("omega-hat over 2000 repeats: quartiles", np.round(np.percentile(hats, [25, 50, 75]), 3), "truth", round(2 / 3, 3))
