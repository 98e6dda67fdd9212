"""neurochan: linear control with many more input channels than states.

Library + CLI for designing resilient feedback gains that survive channel
dropouts, classifying controllability over the dropout lattice, simulating
Markov channel intermittency and channel noise, constructing evenly spaced
input frames, and emulating continuous flows with binary inputs.
"""

from .channels import ChannelSet, projection_matrix
from .design import (
    GainDesign,
    ResilienceCertificate,
    certify_resilience,
    goal_equilibrium_check,
    make_gain,
    problem_a_scan,
    problem_b_solve,
)
from .frames import (
    FrameSpec,
    circle_frame,
    circle_gram_radius,
    gram_spectrum,
    sphere_frame,
    sphere_gram_peak,
)
from .intermittency import (
    AvailabilityPath,
    MarkovChannelModel,
    Trajectory,
    sample_availability,
    simulate_switched,
)
from .lattice import (
    LatticeReport,
    SubsetRecord,
    classify_controllability,
    enumerate_subsets,
    enumerate_supersets,
)
from .lifting import (
    LiftFamily,
    invariant_family_dim,
    lift_invariant,
    lift_nullspace_basis,
    lift_particular,
)
from .numerics import (
    HURWITZ_TOL,
    Spectrum,
    ctrb_rank,
    eigenvalues,
    gramian,
    hurwitz_margin,
    is_hurwitz,
    mat_exp,
    nullspace,
)
from .plant import Plant
from .quantize import (
    CellMap,
    Discretization,
    EmulationTarget,
    SelectionResult,
    cell_map,
    discretize,
    select_gated,
    select_input,
    simulate_emulation,
)
from .uncertainty import (
    NoiseModel,
    augment_channel,
    monte_carlo_sse,
    sample_squared_errors,
    steady_state_error,
)

__version__ = "0.1.0"

__all__ = [
    "AvailabilityPath",
    "CellMap",
    "ChannelSet",
    "Discretization",
    "EmulationTarget",
    "FrameSpec",
    "GainDesign",
    "HURWITZ_TOL",
    "LatticeReport",
    "LiftFamily",
    "MarkovChannelModel",
    "NoiseModel",
    "Plant",
    "ResilienceCertificate",
    "SelectionResult",
    "Spectrum",
    "SubsetRecord",
    "Trajectory",
    "augment_channel",
    "cell_map",
    "certify_resilience",
    "circle_frame",
    "circle_gram_radius",
    "classify_controllability",
    "ctrb_rank",
    "discretize",
    "eigenvalues",
    "enumerate_subsets",
    "enumerate_supersets",
    "goal_equilibrium_check",
    "gram_spectrum",
    "gramian",
    "hurwitz_margin",
    "invariant_family_dim",
    "is_hurwitz",
    "lift_invariant",
    "lift_nullspace_basis",
    "lift_particular",
    "make_gain",
    "mat_exp",
    "monte_carlo_sse",
    "nullspace",
    "problem_a_scan",
    "problem_b_solve",
    "projection_matrix",
    "sample_availability",
    "sample_squared_errors",
    "select_gated",
    "select_input",
    "simulate_emulation",
    "simulate_switched",
    "sphere_frame",
    "sphere_gram_peak",
    "steady_state_error",
]
