"""Patch robustness certification for ensembles of ablation-smoothed classifiers."""
from majorcert.certifiers import (
    Certificate,
    EnsembleVotes,
    Method,
    StrategyVerdict,
    certify_sample,
    compute_label,
    drs_certify,
    drs_predict,
    enumerate_combinations,
    majority_certify,
    majority_invariant_certify,
    region_certify,
    theta,
)
from majorcert.geometry import (
    AblationKind,
    AblationRegion,
    AblationSpec,
    ConfigurationError,
    Geometry,
    PatchRegion,
    delta_closed_form,
    enumerate_ablations,
    enumerate_patches,
    overlapping_ablations,
    overlaps,
)
from majorcert.oracle import achievable_winners, brute_force_robust, conservativeness_report
from majorcert.votes import (
    ABSTAIN,
    BoundPair,
    VoteGrid,
    bounds_for_patch,
    count_votes,
    local_malicious,
    make_grid,
    may_set,
)

__version__ = "0.1.0"
