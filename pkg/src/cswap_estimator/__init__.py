"""Controlled-SWAP interferometric estimator.

One fixed circuit (Hadamard, controlled-U, phase, Hadamard, measure) whose
input states decide the task: overlaps, state tomography, observable
expectations, purity, extremal eigenvalues and channel tests.
"""
from .channels import (
    ChoiState,
    KrausChannel,
    apply_channel,
    channel_from_choi,
    channel_tomography,
    choi_state,
    distillability_operator_test,
    is_bistochastic,
    two_way_capacity_positive,
)
from .interferometer import (
    InterferometerRun,
    VisibilityEstimate,
    estimate_tr_rho_u,
    overlap,
    prob_zero_exact,
    run,
)
from .linalg import (
    DensityOperator,
    InvalidStateError,
    PureState,
    eig_hermitian,
    kron,
    max_entangled_state,
    partial_trace,
    partial_transpose,
    swap_operator,
    trace_distance,
    validate_density,
)
from .observables import Observable, embed_observable, expectation
from .spectral import (
    ExtremalResult,
    OptimizerConfig,
    bloch_length,
    extremal_eigen,
    maximally_mixed_subsystem_separability_check,
    purity,
    visibility_at,
)
from .tomography import (
    ProbeSpec,
    ReconstructionReport,
    TomographySchedule,
    default_schedule,
    measure_probe,
    probe_state,
    project_to_physical,
    reconstruct,
    tomography,
)

__version__ = "0.1.0"
