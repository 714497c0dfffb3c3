"""Replicability of two-sample t-test inferences across research environments.

A changing environment adds a random treatment-by-environment interaction to
a follow-up experiment. Its size relative to the error SD, the environmental
effect ratio ``omega``, governs how often a significant finding replicates
and how much a classical p-value or interval overstates its own precision.
"""

from .broad import (
    BroadInferenceReport,
    bi_confidence_interval,
    bi_confidence_level,
    bi_p_value,
    bi_p_value_asymptotic,
    broad_inference_report,
    classical_interval,
    min_detectable_effect,
)
from .dist import (
    central_t_cdf,
    central_t_quantile,
    noncentral_t_cdf,
    normal_cdf,
    normal_quantile,
)
from .eer import (
    IccBound,
    RcbLayout,
    VarianceComponents,
    eer_bound_from_icc,
    eer_from_variance_proportions,
    intraclass_correlation,
    rcb_variance_components,
    simulate_rcb,
)
from .errors import DomainError, StructureError
from .model import (
    DesignSpec,
    EffectContext,
    MixedModelParams,
    TwoSampleSummary,
    cdf_t_under_m2,
    cohens_d,
    harmonic_mean_n,
    noncentrality,
    observed_effect_size,
    t_statistic,
)
from .power import (
    PowerBreakdown,
    SampleSizeResult,
    followup_sample_size,
    initial_power,
    initial_sample_size,
    limiting_power,
    relative_efficiency,
    replicability_power_exact,
    replicability_power_normal_approx,
)
from .profiles import ProfileGrid, build_profile, crossing_point, emit_csv, emit_svg
from .simulate import SimConfig, SimOutcomeTally, run_tally, simulate_experiment

__version__ = "0.1.0"
