"""More units do not fix an environment problem.

With 300 units per arm and alpha = .005 the initial test is very powerful,
but the chance of a same-direction significant result in a new environment
levels off at Phi(delta / omega) however large n gets.
"""
from replicore import (
    DesignSpec,
    EffectContext,
    initial_power,
    limiting_power,
    replicability_power_exact,
    replicability_power_normal_approx,
)

d = DesignSpec(300, 300, alpha=0.005)
print("delta  initial  p_rep  wrong  nonsig  (omega = .5)")
for delta in (0.25, 1.0):
    pb = replicability_power_exact(EffectContext(delta, 0.5), d)
    print(f"{delta:<6} {initial_power(delta, d):.3f}    {pb.p_rep:.3f}  {pb.p_wrong_direction:.3f}  {pb.p_nonsig:.3f}")

# the exact initial power for delta = .25 rounds to .93, the normal approximation to .94
print("normal approximation, delta=.25:", round(replicability_power_normal_approx(EffectContext(0.25, 0), d), 4))

for delta in (0.25, 1.0):
    ctx = EffectContext(delta, 0.5)
    print(f"\ndelta={delta}: limit {limiting_power(ctx):.4f}")
    for n in (300, 3_000, 30_000, 300_000, 1_000_000):
        p = replicability_power_exact(ctx, DesignSpec(n, n, 0.005)).p_rep
        print(f"  n={n:<9} p_rep={p:.4f}")
