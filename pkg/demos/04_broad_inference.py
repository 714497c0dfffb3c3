"""Broad-inference p-values: how much environment variation can a finding survive?

An observed effect size of 1.0 with 11 units per arm gives p = .003. If the
finding is meant to hold across labs, the p-value has to account for an
assumed EER omega.
"""
from replicore import DesignSpec, TwoSampleSummary, bi_confidence_interval, bi_p_value, bi_p_value_asymptotic
from replicore.broad import bi_confidence_level, min_detectable_effect
from replicore.profiles import build_profile, crossing_point, emit_csv, emit_svg

d = DesignSpec(11, 11, 0.05)
for omega in (0.0, 0.2, 0.38, 0.65):
    print(f"omega={omega:<5} BI p={bi_p_value(1.0, d, omega):.4f}  "
          f"coverage of the classical 95% interval={bi_confidence_level(d, omega):.3f}")

grid = build_profile(1.0, d, omega_max=1.0, steps=101)
w = crossing_point(grid, "bi_p_value", 0.05)
print(f"significance at 5% is lost once omega > {w:.4f}")
print(f"the classical interval's coverage drops below .80 at omega = {crossing_point(grid, 'bi_conf_level', 0.8):.4f}")
emit_csv(grid, "bi_profile.csv")
emit_svg(grid, "bi_profile.svg", title="Delta* = 1, n = 11 per arm")
print("wrote bi_profile.csv and bi_profile.svg")

# no sample size gets below the asymptotic value
print("\nasymptotic BI p for delta*=.7, omega=.36:", round(bi_p_value_asymptotic(0.7, 0.36), 4))
print("smallest detectable delta* at omega=.36:", round(min_detectable_effect(0.05, 0.36), 4))

# widened interval for a raw-scale summary
s = TwoSampleSummary(97.0, 56.0, 12.14, 11, 11)
for omega in (0.0, 0.5):
    lo, hi = bi_confidence_interval(s, 0.05, omega)
    print(f"omega={omega}: 95% interval for mu1 - mu2 = ({lo:.2f}, {hi:.2f})")
