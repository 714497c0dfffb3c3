"""Check the closed forms by brute force.

Each simulated follow-up draws a common environment shift, one interaction
per arm and an error per unit, then runs the pooled t test.
"""
from replicore import DesignSpec, EffectContext, MixedModelParams, SimConfig, replicability_power_exact, run_tally
from replicore.broad import bi_confidence_level
from replicore.simulate import binomial_se

reps = 200_000
for delta, omega, n, alpha in ((1.0, 0.5, 11, 0.05), (0.25, 0.5, 300, 0.005), (0.5, 1.0, 50, 0.05)):
    design = DesignSpec(n, n, alpha)
    # sigma_theta shifts both arms alike and should not matter
    params = MixedModelParams.from_effect(delta, omega, sigma_e=3.0, sigma_theta=10.0)
    tally = run_tally(SimConfig(params, design, reps, seed=1), threads=2)
    r = tally.rates()
    pb = replicability_power_exact(EffectContext(delta, omega), design)
    print(f"delta={delta} omega={omega} n={n} alpha={alpha}")
    for name, exact in (("p_rep", pb.p_rep), ("p_wrong_direction", pb.p_wrong_direction), ("p_nonsig", pb.p_nonsig),
                        ("coverage_naive", bi_confidence_level(design, omega)), ("coverage_bi", 1 - alpha)):
        z = (r[name] - exact) / max(binomial_se(exact, reps), 1e-12)
        print(f"  {name:<18} simulated {r[name]:.4f}  exact {exact:.4f}  z {z:+.2f}")
