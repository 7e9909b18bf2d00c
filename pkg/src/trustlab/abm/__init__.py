"""Agent-based model of trust formation among biased agents."""

from .backend import ACTIVE as BACKEND, AVAILABLE as BACKENDS, get_kernel
from .sweep import SweepGrid, SweepResult, run_sweep
from .world import (
    AgentState,
    BiasIndicator,
    Draws,
    EmptyGroupError,
    FeedbackEstimate,
    Group,
    PartnerSelection,
    Topology,
    WorldConfig,
    WorldResult,
    bias_update,
    clustering,
    clustering_matrix,
    draw_signal,
    estimated_feedback,
    make_draws,
    perceive_abm,
    run_world,
    run_world_draws,
    select_partner,
    social_update,
    trust_update,
)
