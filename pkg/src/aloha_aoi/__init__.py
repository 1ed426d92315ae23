"""Age of Information analysis for feedback-free slotted ALOHA with retransmissions."""

from .analytics import AoiReport, avg_aoi_closed_form, avg_aoi_decomposition, avg_aoi_from_chain
from .errors import (
    AlohaAoiError,
    ConfigurationError,
    DegenerateProcessError,
    ImproperDistributionError,
    NoPathError,
    NotBracketedError,
    PoleAtOneError,
)
from .lambertw import lambert_w0
from .model import (
    AccessPolicy,
    ApproxMode,
    SystemConfig,
    access_prob,
    channel_load,
    mean_reset_value,
    reset_prob,
    reset_value_pmf,
    success_prob,
    throughput,
)
from .policy import (
    OptimizationResult,
    Strategy,
    aoi_derivative,
    numeric_min_aoi,
    optimal_policy,
    optimal_rho_star,
    retention_inverse,
    throughput_retention,
)
from .recurrence import inter_refresh_pgf, inter_refresh_ratio, inter_refresh_stats
from .sfg import FlowGraph, MarkovChain, mason_transfer, pgf_moments, pgf_series
from .simulator import SimConfig, SimMode, SimStats, interference_equivalence_check, run_simulation

__version__ = "0.1.0"
