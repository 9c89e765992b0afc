"""Geometric discord of N-qubit Pauli-diagonal states and its phase-flip dynamics."""

from .discord import DiscordResult, OptimizerConfig, closed_form, discord_formula, minimize_numeric
from .dynamics import (
    PhaseFlipParams,
    TrajectoryPoint,
    detect_sudden_change,
    evolved_discord,
    phase_flip_kraus,
    sudden_change_time,
    trajectory,
)
from .family import PauliFamilyState, is_physical, purity, to_density_matrix
from .measurement import (
    MeasurementNode,
    MeasurementTree,
    PostMeasurementState,
    apply_chain,
    direction_coeffs,
    projector,
    residual_analytic,
)
from .qcore import (
    ParameterError,
    ValidationError,
    apply_kraus,
    hs_distance_sq,
    hs_inner,
    min_eigenvalue,
    pauli_tensor,
)
from .surface import SurfaceGridSpec, surface_points

__version__ = "0.1.0"
