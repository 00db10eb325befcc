"""Sparse discrete-time full-order models inferred from snapshot data."""

from ._core import (
    AdvectionConfig,
    AugmentationPlan,
    BurgersConfig,
    CoefficientVector,
    DiffusionConfig,
    DiscreteModel,
    FeatureKind,
    FeatureMap,
    Grid1D,
    Grid2D,
    GramProblem,
    LCurveResult,
    LocalProblem,
    RidgeConfig,
    RolloutResult,
    SnapshotSet,
    SparseLinearOperator,
    SpectralMode,
    StabilityReport,
    Stencil,
    SupportSet,
    accumulate_gram,
    advection_analytic,
    assemble_local,
    assemble_per_dof,
    assemble_shared,
    augment,
    average_error,
    build_block_stencil_2d,
    build_stencil_1d,
    burgers_initial,
    burgers_solve,
    consistency_sum,
    diffusion_analytic,
    diffusion_closed_form_beta,
    diffusion_taylor_beta,
    feature_vector,
    gershgorin_check,
    l_curve_select,
    lin_spaced,
    load_model,
    log_spaced,
    make_grid_1d,
    make_grid_2d,
    min_norm_solve,
    ridge_solve,
    rollout,
    sample_augmentation_fraction,
    sample_augmentation_indices,
    sampling_cfl_bound,
    save_model,
    spectral_radius,
    step,
    sufficient_stability_check,
    support_set,
    taylor_data_coeffs,
    taylor_first_order_beta,
    taylor_geometry,
    to_gram,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
