"""fracdyn: Caputo fractional-order dynamics of the Newton-Leipnik system.

Simulation (ODE and 1-D reaction-diffusion), equilibrium and stability
analysis for commensurate and incommensurate orders, and controlled
master-slave synchronisation.
"""

__version__ = "0.1.0"

from .fractional import (
    DivergenceError,
    FractionalOrder,
    HistoryBuffer,
    InsufficientHistoryError,
    OdeResult,
    TimeGrid,
    abm_solve,
    caputo_eval,
    gamma_fn,
    l1_weights,
    mittag_leffler,
)
from .newton_leipnik import (
    Equilibrium,
    EquilibriaResult,
    SystemParams,
    divergence,
    equilibria,
    jacobian,
    vector_field,
    volume_factor,
)
from .stability import (
    DengResult,
    ModeEigen,
    StabilityReport,
    SyncModeReport,
    deng_stable,
    matignon_margin,
    neumann_spectrum,
    sync_condition_check,
    sync_mode_eigen,
)
from .pde import (
    CaputoDiffusionStepper,
    Field,
    Grid1D,
    RDConfig,
    RDTrajectory,
    default_initial_conditions,
    laplacian_neumann,
    probe,
    simulate_rd,
)
from .synchronization import (
    SyncConfig,
    SyncResult,
    SyncState,
    control_law,
    error_l2,
    error_sup,
    linear_error_rhs,
    lyapunov_V,
    run_sync,
)

__all__ = [name for name in dir() if not name.startswith("_")]
