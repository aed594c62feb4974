"""Adaptive-coupling-strength synchronization of oscillator networks."""

from .analysis import SyncReport, summarize, sync_error, sync_error_pairwise
from .coupling import (
    CouplingMatrix,
    LeftEigenvector,
    ProjectionMatrix,
    TimeVaryingCoupling,
    bilinear_form,
    build_projection,
    generate_complete,
    generate_random_symmetric,
    generate_small_world_weighted,
    is_irreducible,
    lambda2,
    left_eigenvector,
    read_matrix,
    scaled_time_varying,
    three_node_time_varying,
    validate_condition,
    write_matrix,
)
from .dynamics import (
    AugmentedState,
    InnerCoupling,
    MonotoneCoupling,
    SchemeConfig,
    SchemeKind,
    adaptation_rate,
    augmented_rhs,
    identity_coupling,
    identity_inner,
    linear_coupling_term,
    lyapunov_value,
    network_drift,
    nonlinear_coupling_term,
    tanh_coupling,
)
from .experiment import (
    ExperimentConfig,
    build_experiment,
    initial_network_state,
)
from .integrate import (
    DivergenceError,
    IntegratorConfig,
    Trajectory,
    integrate,
    step_rk4,
)
from .oscillators import (
    OscillatorModel,
    QuadCertificate,
    chen,
    chen_field,
    chua,
    chua_field,
    get_model,
    lorenz,
    lorenz_field,
    quad_probe,
    rossler,
    rossler_field,
)

__version__ = "0.1.0"
