"""Wasserstein rates for empirical measures on tori and compact groups."""

from ._core import (
    BoundReport,
    CriterionResult,
    MCEstimate,
    MeasureSpec,
    ProcessSpec,
    SemiDiscreteResult,
    SpaceModel,
    circle_bound,
    cosine_mixture,
    execute_config,
    list_experiments,
    lps_generators,
    lps_spectral_radius,
    mc_expected_w2sq,
    mean_square_optimized,
    q_w2_bound,
    quantization_floor,
    run_criterion,
    rw_empirical_bound,
    sample,
    semisimple_pipeline,
    smoothing_rhs,
    w2_circle_exact,
    w2_semidiscrete,
    walk_budget,
)

__all__ = [name for name in dir() if not name.startswith("_")]
