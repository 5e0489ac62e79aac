"""Coherence recovery of a dephased polarization qubit by mid-evolution measurement."""

from .channel import (
    Channel,
    evolve_conditional,
    gamma_from_retardation,
    gamma_from_thickness,
    reduced_state,
    survival_probability,
)
from .errors import (
    ContractError,
    QuadratureError,
    ResolutionError,
    UnsupportedSpectrumError,
)
from .measurement import (
    BranchWeights,
    MeasurementScenario,
    asymptotic_with_measurement,
    asymptotic_without_measurement,
    branch_states,
    branch_weights,
    classical_limit,
    closed_form_probability,
    recovered_probability_closed,
    recovered_probability_general,
    recovered_probability_quadrature,
    recovery_crossings,
    recovery_window,
)
from .montecarlo import CountingConfig, CountRecord, NoMeasurementScenario, simulate_counts
from .quadrature import quadrature
from .scans import (
    Physics,
    ScanRow,
    ScanSpec,
    default_grid,
    fidelity_trajectory,
    landscape,
    oscillation_period,
    run_scan,
    tilt_grid,
    tilt_oscillation,
    visibility_scan,
)
from .spectrum import (
    DecoherenceFactor,
    Gaussian,
    Tabulated,
    decoherence_factor,
    gaussian_from_experiment,
    sample_frequency,
)
from .states import (
    DensityMatrix,
    PureState,
    density_of,
    detect_probability,
    make_pure,
    pauli_x,
    visibility,
)

__version__ = "0.1.0"
