"""Gaussian-state simulator of harmonic-oscillator detectors in a 1-D cavity.

The package evolves the joint detector-field covariance matrix through the
symplectic propagator of the time-dependent quadratic Hamiltonian and
reports two-detector correlation measures (logarithmic negativity, mutual
information, Gaussian discord) across equilibrium and nonequilibrium
scenarios.
"""

from .errors import (
    ConfigError,
    DegeneracyError,
    DriftError,
    NumericalError,
    UnphysicalStateError,
)
from .evolution import (
    EvolutionTrace,
    IntegratorConfig,
    backend_name,
    evolve_covariance,
    integrate_s,
    matrix_exponential_oracle,
)
from .gaussian import (
    PhaseSpaceIndex,
    detector,
    entropy_kernel,
    field_mode,
    make_squeezed_cov,
    make_thermal_cov,
    make_vacuum_cov,
    propagate_cov,
    reduce_cov,
    symplectic_eigenvalues,
    symplectic_form,
    vn_entropy,
)
from .measures import (
    SymplecticInvariants,
    TwoModeBlocks,
    block_determinants,
    excitation_probability,
    gaussian_discord,
    log_negativity,
    mutual_information,
)
from .model import (
    CavitySpec,
    ConstantSwitching,
    DetectorSpec,
    FieldInitial,
    GaussianSwitching,
    ModeSpec,
    StationaryWorldline,
    SystemSpec,
    UniformAccelerationWorldline,
    assemble_f_sys,
    cavity_modes,
    initial_state,
    mode_function,
    unruh_temperature,
    worldline_eval,
)
from .runner import (
    CausalityReport,
    CorrelationRecord,
    Scenario,
    SweepResult,
    apply_sweep,
    catalog,
    causality_check,
    convergence_check,
    get_scenario,
    run_sweep,
    write_records_csv,
)

__version__ = "0.1.0"
