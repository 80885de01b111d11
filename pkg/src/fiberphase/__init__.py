"""Geometric phases of photons guided along noncoplanar fibre paths.

The package builds explicit matrix representations of the photon spin
algebra on truncated Fock spaces, turns fibre geometry into spherical
tangent kinematics, and computes geometric phases two independent ways:
closed-form quadrature and direct time-dependent Schrodinger evolution.
"""

from .fock import (
    FockSpace,
    OperatorMatrix,
    StateVector,
    annihilation,
    basis_state,
    build_photon_state,
    build_space,
    circular_operators,
    commutator,
    creation,
    helicity_operator,
    identity,
    operator_from_json,
    polarization_triad,
    s3_split,
    spin_fixed,
    state_from_json,
    vacuum_state,
)
from .geometry import (
    AngleTrajectory,
    FiberPath,
    TangentTrajectory,
    cone_trajectory,
    helix_points,
    load_path_csv,
    make_helix,
    motion_identity_residual,
    sampled_path,
    save_angles_csv,
    solid_angle,
    spherical_angles,
    tangent_trajectory,
    trajectory_from_tangents,
)
from .media import (
    DispersionVerdict,
    GyrotropicMedium,
    circular_combination_check,
    classify,
    refractive_indices,
)
from .phases import (
    EvolutionResult,
    PhaseBreakdown,
    anholonomy_integral,
    berry_phase_cyclic,
    closed_form_phase,
    effective_hamiltonian,
    evolution_operator_V,
    evolve_state,
    extract_phases,
    lvn_residual,
    phase_series,
    wrap_angle,
)
from .scenario import (
    BUILTIN_SCENARIOS,
    ConfigError,
    ScenarioConfig,
    evaluate_scenario,
    parse_config,
    run_builtin,
    run_scenario,
    sweep,
)

__version__ = "0.1.0"
