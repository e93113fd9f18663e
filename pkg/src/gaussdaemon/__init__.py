"""Ergotropy and daemonic ergotropy of Gaussian states.

Work extraction from Gaussian continuous-variable states: closed forms for
the daemonic ergotropy of two-mode states under general-dyne measurements of
one mode, and conditional/unconditional dynamics of continuously monitored
open Gaussian systems, with the below-threshold OPO as the worked model.

Conventions: quadratures are ordered (x_1, p_1, ..., x_n, p_n), covariance
matrices are defined without the conventional 1/2 so the vacuum CM is the
identity, and energies are in units of hbar omega.
"""

from .bipartite import (
    DaemonicResult,
    OptimalPhase,
    TwoModeStandardForm,
    conditional_determinant,
    daemonic_ergotropy,
    daemonic_heterodyne,
    max_daemonic,
    max_daemonic_homodyne,
    optimal_phase,
    standard_form,
    tmsts,
    tmsts_heterodyne,
    tmsts_homodyne,
    unconditional_ergotropy_a,
)
from .dynamics import (
    DiffusiveModel,
    DriftDiffusion,
    MonitoredModel,
    TrajectoryBatch,
    daemonic_ergotropy_path,
    daemonic_ergotropy_t,
    drift_diffusion,
    evolve_conditional_cm,
    excess_noise,
    is_hurwitz,
    monitored,
    riccati_residual,
    simulate_trajectories,
    steady_state_conditional,
    steady_state_unconditional,
    unconditional_path,
)
from .ergotropy import (
    ErgotropyReport,
    ExtractionUnitary,
    ergotropy,
    ergotropy_report,
    extraction_unitary,
)
from .exceptions import (
    ConvergenceError,
    GaussDaemonError,
    NoSteadyStateError,
    NumericError,
    ParseError,
    StepSizeError,
    SymmetryError,
    SymplecticityError,
    UnphysicalStateError,
)
from .fileio import read_model, read_state, write_csv
from .measurement import (
    GeneralDyneSetting,
    Partition,
    condition,
    heterodyne,
    homodyne,
    inverse_sum,
    measured_quadrature,
    measurement_cm,
    sample_outcome,
)
from .opo import (
    ZSweepData,
    OpoParams,
    TransientTable,
    zsweep_table,
    transient_table,
    opo_conditional_ss,
    opo_model,
    opo_steady_daemonic,
    opo_unconditional_ergotropy,
    opo_unconditional_ss,
    opo_zopt,
    opo_zopt_numeric,
    strategy_setting,
)
from .randomized import (
    SuiteResult,
    invariant_suite,
    random_orthogonal_symplectic,
    random_rotation,
    random_setting,
    random_stable_model,
    random_standard_form,
    random_state,
    random_symplectic,
    random_two_mode_state,
)
from .symplectic import (
    GaussianState,
    apply_symplectic,
    check_symplectic,
    displace,
    energy,
    purity,
    reduce,
    rotation,
    squeezer,
    symplectic_eigenvalues,
    symplectic_form,
    thermal,
    vacuum,
    validate_state,
    williamson_single_mode,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # states and symplectic geometry
    "GaussianState",
    "validate_state",
    "vacuum",
    "thermal",
    "symplectic_form",
    "rotation",
    "squeezer",
    "check_symplectic",
    "apply_symplectic",
    "displace",
    "reduce",
    "symplectic_eigenvalues",
    "energy",
    "purity",
    "williamson_single_mode",
    # ergotropy
    "ErgotropyReport",
    "ergotropy_report",
    "ergotropy",
    "ExtractionUnitary",
    "extraction_unitary",
    # general-dyne measurements
    "GeneralDyneSetting",
    "heterodyne",
    "homodyne",
    "measurement_cm",
    "measured_quadrature",
    "inverse_sum",
    "Partition",
    "condition",
    "sample_outcome",
    # bipartite daemonic ergotropy
    "TwoModeStandardForm",
    "standard_form",
    "conditional_determinant",
    "OptimalPhase",
    "optimal_phase",
    "DaemonicResult",
    "daemonic_ergotropy",
    "unconditional_ergotropy_a",
    "daemonic_heterodyne",
    "max_daemonic_homodyne",
    "max_daemonic",
    "tmsts",
    "tmsts_heterodyne",
    "tmsts_homodyne",
    # monitored dynamics
    "DiffusiveModel",
    "DriftDiffusion",
    "drift_diffusion",
    "is_hurwitz",
    "steady_state_unconditional",
    "MonitoredModel",
    "monitored",
    "evolve_conditional_cm",
    "riccati_residual",
    "steady_state_conditional",
    "unconditional_path",
    "TrajectoryBatch",
    "simulate_trajectories",
    "excess_noise",
    "daemonic_ergotropy_path",
    "daemonic_ergotropy_t",
    # OPO
    "OpoParams",
    "opo_model",
    "strategy_setting",
    "opo_unconditional_ss",
    "opo_unconditional_ergotropy",
    "opo_conditional_ss",
    "opo_steady_daemonic",
    "opo_zopt",
    "opo_zopt_numeric",
    "ZSweepData",
    "zsweep_table",
    "TransientTable",
    "transient_table",
    # randomized invariant suites
    "SuiteResult",
    "invariant_suite",
    "random_rotation",
    "random_orthogonal_symplectic",
    "random_symplectic",
    "random_state",
    "random_two_mode_state",
    "random_standard_form",
    "random_setting",
    "random_stable_model",
    # file formats
    "read_state",
    "read_model",
    "write_csv",
    # exceptions
    "GaussDaemonError",
    "SymmetryError",
    "UnphysicalStateError",
    "SymplecticityError",
    "NoSteadyStateError",
    "StepSizeError",
    "ParseError",
    "NumericError",
    "ConvergenceError",
]
