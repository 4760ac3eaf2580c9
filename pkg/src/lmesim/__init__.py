"""Local-master-equation simulator for a driven two-qubit chain between
two bosonic baths: dynamics, thermodynamic observables, a Gaussian
covariance fast path, and reproducible scenario sweeps.
"""

from .baths import (
    BathParams,
    QuadratureConfig,
    correlation_function,
    decay_rate,
    decay_rate_quadrature,
    lamb_shift,
    lamb_shift_quadrature,
    memory_correction_rate,
    one_sided_rate,
    spectral_density,
)
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    default_step,
    integrate,
    rk4_step,
    steady_state_by_integration,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    IntegrationError,
    PositivityError,
    QuadratureError,
    StabilityError,
    UnsupportedConfigError,
)
from .gaussian import (
    DriftDiffusion,
    covariance_from_density,
    covariance_rhs,
    drift_diffusion,
    integrate_covariance,
    relaxation_time,
    steady_covariance,
    steady_heat_currents,
)
from .linalg import embed_qubit_op, herm_eig, kron, lyapunov_solve, matrix_log_hermitian
from .model import (
    QubitParams,
    SystemConfig,
    bare_hamiltonian,
    dissipation_rates,
    dissipator,
    drive,
    dynamic_phase_diff,
    gibbs_product_state,
    hamiltonian,
    instantaneous_gap,
    instantaneous_jump_ops,
    interaction_hamiltonian,
    liouvillian_matrix,
    lme_rhs,
    maximum_entropy_state,
    mixing_angle,
    tdlme_rhs,
    validate_density,
)
from .scenarios import (
    CsvTable,
    ScenarioConfig,
    emit_csv,
    load_config,
    run_scenario,
)
from .thermo import (
    CrossingResult,
    PowerLawFit,
    ThermoRecord,
    effective_temperature_check,
    entropy,
    entropy_production_rate,
    entropy_time_derivative,
    find_tau0,
    fit_power_law,
    heat_current,
    thermo_record,
)

__version__ = "0.1.0"
