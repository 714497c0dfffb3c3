"""Planning a follow-up study.

The usual formula sizes the initial study. A follow-up in a different
environment needs more units per arm for the same power, and sometimes no
number of units is enough.
"""
import numpy as np

from replicore import EffectContext, followup_sample_size, initial_sample_size, relative_efficiency
from replicore.profiles import line_chart_svg

for delta in (0.25, 0.5):
    n_i = initial_sample_size(delta, 0.05, 0.8).n_per_arm
    ctx = EffectContext(delta, 0.2)
    f = followup_sample_size(ctx, 0.05, 0.8)
    print(f"delta={delta}: n_I={n_i}, n_F={f.n_per_arm} (exact t: "
          f"{followup_sample_size(ctx, 0.05, 0.8, exact=True).n_per_arm}), "
          f"efficiency {relative_efficiency(ctx, 0.05, 0.8):.2f}")

r = followup_sample_size(EffectContext(0.25, 0.5), 0.05, 0.8)
print("delta=.25, omega=.5:", "attainable" if r.attainable else f"unattainable, limit {r.limit:.3f}")

# efficiency falls to zero once Phi(delta / omega) drops below the target power
omegas = np.linspace(0, 1, 201)
curves = {}
for delta in (0.25, 0.5, 1.0):
    curves[f"delta {delta}"] = [
        relative_efficiency(EffectContext(delta, w), 0.05, 0.8, rounded=False) for w in omegas
    ]
with open("relative_efficiency.svg", "wb") as fh:
    fh.write(line_chart_svg(omegas, curves, y_label="n_I / n_F", title="power .8, alpha .05"))
print("wrote relative_efficiency.svg")
