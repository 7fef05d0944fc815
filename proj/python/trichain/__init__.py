"""Simulation and verification toolkit for a three-species food chain.

The heavy lifting lives in the C++ extension module `trichain._core`;
this package re-exports its public surface.
"""

from ._core import (  # noqa: F401
    BlowUpMethod,
    BlowUpReport,
    BoundaryKind,
    ConditionReport,
    Domination,
    Field,
    FieldNorms,
    GenericResult,
    GenericTrajectory,
    GridSpec,
    IntegratorConfig,
    LargeData,
    ModelParams,
    NormHistory,
    OdeResult,
    OracleConfig,
    PdeRunResult,
    PdeState,
    PdeStatus,
    PsiTrace,
    Rates,
    RegionClass,
    RunControl,
    Snapshot,
    State,
    TerminalStatus,
    TimeValue,
    Trajectory,
    VThreshold,
    __version__,
    check_condition,
    check_domination,
    choose_blowup_data,
    choose_delta,
    classify_region,
    discrete_mass,
    estimate_blowup_time,
    estimate_blowup_time_from_pairs,
    eval_rhs,
    exact_r1,
    exact_v1,
    field_norms,
    integrate,
    integrate_generic,
    laplacian,
    make_oracle_config,
    psi_trace,
    run,
    semi_discrete_rhs,
    step,
    step_rk4,
    v_threshold,
)
