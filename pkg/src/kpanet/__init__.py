"""kpanet: K-groups preferential attachment networks.

Simulation of rich-get-richer growth with group homophily, plus maximum
likelihood inference of the model parameters from full event histories or
single snapshots, and detection of a change point in the homophily level.
"""

from ._backend import BACKEND as backend_name
from .changepoint import ChangepointReport, detect, split_loglik
from .estimate import (
    EstimateReport,
    EstimationError,
    EventFeature,
    EventFeatures,
    SnapshotIngestError,
    SnapshotSummary,
    estimate_history,
    estimate_snapshot,
    features_from_log,
    loglik_theta,
    score_theta,
    snapshot_loglik,
    summarize_snapshot,
)
from .model import (
    Changepoint,
    EventLog,
    EventRecord,
    GraphState,
    InvalidParamsError,
    KPAError,
    MechanisticParams,
    ModelParams,
    ReplayError,
    SimConfig,
    initial_group_counts,
    replay_group_degrees,
    theta_from_mechanistic,
    validate_params,
)
from .probability import (
    FisherMatrix,
    SingularInformationError,
    edge_connect_prob,
    expected_degree_fraction,
    expected_same_group_rate,
    degree_fraction_series,
    fisher_information,
    plugin_fisher,
    power_law_exponent,
    vertex_connect_prob,
)
from .simulate import (
    TrialResult,
    aggregate_trials,
    degree_histogram,
    fit_log_log_slope,
    run_trials,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "Changepoint",
    "ChangepointReport",
    "EstimateReport",
    "EstimationError",
    "EventFeature",
    "EventFeatures",
    "EventLog",
    "EventRecord",
    "FisherMatrix",
    "GraphState",
    "InvalidParamsError",
    "KPAError",
    "MechanisticParams",
    "ModelParams",
    "ReplayError",
    "SimConfig",
    "SingularInformationError",
    "SnapshotIngestError",
    "SnapshotSummary",
    "TrialResult",
    "aggregate_trials",
    "degree_fraction_series",
    "degree_histogram",
    "detect",
    "edge_connect_prob",
    "estimate_history",
    "estimate_snapshot",
    "expected_degree_fraction",
    "expected_same_group_rate",
    "features_from_log",
    "fisher_information",
    "fit_log_log_slope",
    "initial_group_counts",
    "loglik_theta",
    "plugin_fisher",
    "power_law_exponent",
    "replay_group_degrees",
    "run_trials",
    "score_theta",
    "simulate",
    "snapshot_loglik",
    "split_loglik",
    "summarize_snapshot",
    "theta_from_mechanistic",
    "validate_params",
    "vertex_connect_prob",
]
