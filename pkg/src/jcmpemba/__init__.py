"""Dissipative Jaynes-Cummings relaxation and the two-step (Pontus-Mpemba) speed-up."""

__version__ = "0.1.0"

from .hilbert import (
    BasisLabel,
    DensityMatrix,
    DistancePair,
    InvalidStateError,
    ModelParams,
    atomic_excitation,
    basis_index,
    hs_distance,
    photon_number,
    trace_distance,
)
from .integrator import IntegrationError, QuenchSchedule, Trajectory, integrate, make_schedule
from .liouvillian import (
    DegenerateNullSpaceError,
    Generator,
    GeneratorKind,
    rhs_n_manifold,
    rhs_single_excitation,
    rhs_thermal,
    stationary_state,
)
from .protocol import (
    Axis,
    MpembaVerdict,
    PhaseDiagram,
    ProtocolKind,
    ProtocolSpec,
    RelaxationRecord,
    compare_protocols,
    detect_pontus_mpemba,
    half_rabi_time,
    run_protocol,
    sweep_phase_diagram,
)
from .spectral import (
    DynamicalMatrix,
    ExceptionalPointError,
    Regime,
    SpectralDecomposition,
    build_dynamical_matrix,
    classify_regime,
    closed_form_eigenvalues,
    eigen_decompose,
    mode_overlaps,
    propagate_spectral,
)
