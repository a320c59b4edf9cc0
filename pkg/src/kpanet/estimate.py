"""Parameter estimation from event histories and from single snapshots.

History estimation: q and the arrival probabilities have closed-form count
estimators; theta maximizes the homophily part of the likelihood, whose
score is strictly decreasing on (0, 1], so the MLE is the unique root found
by bisection. Standard errors come from the plug-in Fisher information and
give normal-quantile confidence intervals.

Snapshot estimation uses only the present graph: node/edge counts, per-group
degree totals, and per-group same/cross edge counts. It treats edges as
exchangeable draws from the limiting kernel; the estimator is consistent
but has no distribution theory, so snapshot reports carry no intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from . import _backend
from .model import EventLog, GraphState, KPAError, ModelParams, replay_group_degrees
from .probability import theta_information

THETA_FLOOR = _backend.THETA_FLOOR
_FLAG_NAMES = {_backend.ROOT_LOW: "boundary_low", _backend.ROOT_HIGH: "boundary_high"}


class EstimationError(KPAError):
    pass


class SnapshotIngestError(KPAError):
    pass


@dataclass(frozen=True)
class EventFeature:
    """Sufficient statistics of one event: step type, whether the endpoint
    groups match, the initiator's group, and P = D^k_{t-1}/(2(t-1)+n0)."""

    v: int
    same: bool
    k: int
    P: float


class EventFeatures:
    """Array-backed sequence of EventFeature, in time order."""

    def __init__(self, v, same, k, P):
        self.v = np.asarray(v, dtype=np.uint8)
        self.same = np.asarray(same, dtype=np.uint8)
        self.k = np.asarray(k, dtype=np.int32)
        self.P = np.asarray(P, dtype=np.float64)
        if not (len(self.v) == len(self.same) == len(self.k) == len(self.P)):
            raise ValueError("feature arrays must have equal length")

    def __len__(self) -> int:
        return len(self.v)

    def __getitem__(self, i: int) -> EventFeature:
        return EventFeature(int(self.v[i]), bool(self.same[i]), int(self.k[i]), float(self.P[i]))

    def slice(self, start: int, stop: int) -> "EventFeatures":
        return EventFeatures(self.v[start:stop], self.same[start:stop], self.k[start:stop], self.P[start:stop])

    @property
    def P_same(self) -> np.ndarray:
        return self.P[self.same == 1]

    @property
    def n_cross(self) -> int:
        return int(np.sum(self.same == 0))

    @classmethod
    def from_list(cls, feats: Sequence[EventFeature]) -> "EventFeatures":
        return cls(
            [f.v for f in feats],
            [1 if f.same else 0 for f in feats],
            [f.k for f in feats],
            [f.P for f in feats],
        )


def features_from_log(log: EventLog) -> EventFeatures:
    """One feature per record; P uses the replayed degree totals at t-1."""
    traj = replay_group_degrees(log)
    T = log.T
    if T == 0:
        return EventFeatures([], [], [], [])
    t_idx = np.arange(T)
    denom = 2.0 * t_idx + log.n0  # 2(t-1)+n0 for t = 1..T
    P = traj[t_idx, log.g_w.astype(np.int64) - 1] / denom
    return EventFeatures(log.v, (log.g_w == log.g_u).astype(np.uint8), log.g_w, P)


def loglik_theta(features: EventFeatures, theta: float) -> float:
    """Homophily log-likelihood of the history at theta.

    Same-group events contribute log(P + (1-theta)(1-P)) and cross-group
    events log((1-P) theta); edge-step events add their theta-free log P
    term so the value matches the model likelihood exactly. Returns -inf
    for theta <= 0 when any cross-group event is present.
    """
    if theta > 1.0:
        raise ValueError("theta must be <= 1")
    same = features.same == 1
    P = features.P
    if theta <= 0.0 and int(np.sum(~same)) > 0:
        return float("-inf")
    with np.errstate(divide="ignore"):
        val = float(np.sum(np.log(P[same] + (1.0 - theta) * (1.0 - P[same]))))
        cross = ~same
        if np.any(cross):
            val += float(np.sum(np.log((1.0 - P[cross]) * theta)))
        edge_step = features.v == 0
        if np.any(edge_step):
            val += float(np.sum(np.log(P[edge_step])))
    return val


def score_theta(features: EventFeatures, theta: float) -> float:
    """Derivative of loglik_theta in theta; strictly decreasing on (0, 1)."""
    return features.n_cross / theta - _backend.score_same_sum(features.P_same, theta)


def solve_theta_mle(features: EventFeatures) -> tuple[float, tuple[str, ...]]:
    """Root of the theta score with boundary flags ("boundary_low" when no
    cross-group events exist, "boundary_high" when the score is positive at
    theta = 1 and the estimate is clamped there)."""
    th, flag = _backend.solve_theta(features.P_same, features.n_cross)
    return float(th), ((_FLAG_NAMES[flag],) if flag in _FLAG_NAMES else ())


@dataclass
class EstimateReport:
    """Point estimates with per-parameter standard errors and intervals.

    Snapshot reports (method == "snapshot") have no distribution theory;
    their se and ci fields are None.
    """

    method: str
    T: int
    theta_hat: float
    p_hat: np.ndarray
    q_hat: float
    ci_level: float = 0.95
    theta_se: Optional[float] = None
    p_se: Optional[np.ndarray] = None
    q_se: Optional[float] = None
    theta_ci: Optional[tuple[float, float]] = None
    p_ci: Optional[list[tuple[float, float]]] = None
    q_ci: Optional[tuple[float, float]] = None
    flags: tuple[str, ...] = field(default=())

    @property
    def K(self) -> int:
        return len(self.p_hat)


def estimate_history(log: EventLog, ci_level: float = 0.95) -> EstimateReport:
    """Full MLE from an event history.

    q_hat is the vertex-step fraction, p_hat the per-group share of
    vertex-steps, theta_hat the unique score root. Standard errors are
    sqrt(diag(inverse plug-in information)/T); intervals are normal.
    """
    T = log.T
    if T < 1:
        raise EstimationError("empty log: nothing to estimate")
    if not (0.0 < ci_level < 1.0):
        raise ValueError("ci_level must be in (0,1)")
    features = features_from_log(log)
    K = log.K

    n_vertex = int(np.sum(log.v == 1))
    if n_vertex == 0:
        raise EstimationError("no vertex-steps in the log: p is not estimable")
    q_hat = n_vertex / T
    vertex_groups = log.g_w[log.v == 1].astype(np.int64)
    p_hat = np.bincount(vertex_groups, minlength=K + 1)[1:] / n_vertex

    flags: list[str] = []
    if np.any(p_hat == 0.0):
        flags.append("p_small_sample")

    theta_hat, theta_flags = solve_theta_mle(features)
    flags.extend(theta_flags)

    z = NormalDist().inv_cdf(0.5 + ci_level / 2.0)
    info = theta_information(theta_hat, p_hat)
    if info > 0.0 and theta_hat > 0.0:
        theta_se = 1.0 / math.sqrt(T * info)
    else:
        theta_se = float("nan")
        flags.append("theta_no_information")
    p_se = np.sqrt(p_hat * (1.0 - p_hat) / (q_hat * T))
    if q_hat == 0.0 or q_hat == 1.0:
        q_se = float("nan")
        flags.append("q_boundary")
    else:
        q_se = math.sqrt(q_hat * (1.0 - q_hat) / T)

    return EstimateReport(
        method="history",
        T=T,
        theta_hat=theta_hat,
        p_hat=p_hat,
        q_hat=q_hat,
        ci_level=ci_level,
        theta_se=theta_se,
        p_se=p_se,
        q_se=q_se,
        theta_ci=(theta_hat - z * theta_se, theta_hat + z * theta_se),
        p_ci=[(ph - z * s, ph + z * s) for ph, s in zip(p_hat, p_se)],
        q_ci=(q_hat - z * q_se, q_hat + z * q_se),
        flags=tuple(flags),
    )


@dataclass
class SnapshotSummary:
    """Sufficient statistics of a single graph.

    E_same[k] counts edges with both endpoints in group k. E_cross[k] is the
    number of cross-group edges attributed to group k, each cross edge
    counted once in total: by its initiator's group when the history is
    known (simulated states), and half to each endpoint group when only an
    undirected edge list is observed. Both attributions have the same
    limiting value, which is what the snapshot likelihood weights require;
    E_cross may therefore hold half-integers. Dk are observed degree totals
    (phantom stubs of a simulated initial graph excluded), so sum(Dk) == 2E
    and sum(E_same) + sum(E_cross) == E.
    """

    V: int
    E: int
    Vk: np.ndarray
    Dk: np.ndarray
    E_same: np.ndarray
    E_cross: np.ndarray

    @property
    def K(self) -> int:
        return len(self.Vk)

    def validate(self) -> None:
        if int(self.Vk.sum()) != self.V:
            raise SnapshotIngestError("group node counts do not sum to V")
        if int(self.Dk.sum()) != 2 * self.E:
            raise SnapshotIngestError("degree totals must sum to 2E")
        if abs(float(self.E_same.sum()) + float(self.E_cross.sum()) - self.E) > 1e-9:
            raise SnapshotIngestError("same/cross edge counts do not account for E")


def summarize_snapshot(
    source: Union[GraphState, Iterable[tuple]],
    labels: Optional[Mapping] = None,
) -> SnapshotSummary:
    """Build a SnapshotSummary from a simulated GraphState or a labeled
    edge list.

    For a GraphState, only real edges count: each initial node's phantom
    stub is excluded from the degree totals. For an edge list, `labels` must
    map every endpoint to a 1-based group; V covers all labeled nodes, so
    isolated labeled nodes contribute to V but not to the degrees.
    """
    if isinstance(source, GraphState):
        state = source
        ga = state.groups[state.edge_a].astype(np.int64)  # initiator side
        gb = state.groups[state.edge_b].astype(np.int64)
        K = state.K
        same = ga == gb
        E_same = np.bincount(ga[same], minlength=K + 1)[1:]
        E_cross = np.bincount(ga[~same], minlength=K + 1)[1:]
        summary = SnapshotSummary(
            V=state.num_nodes,
            E=state.real_edge_count,
            Vk=state.group_node_counts(),
            Dk=state.group_degree_totals - state.per_group_initial,
            E_same=E_same.astype(np.int64),
            E_cross=E_cross.astype(np.float64),
        )
        summary.validate()
        return summary

    if labels is None:
        raise SnapshotIngestError("an edge list needs a node -> group mapping")
    groups = dict(labels)
    K = max(groups.values(), default=0)
    Vk = np.zeros(K, dtype=np.int64)
    for g in groups.values():
        if not (1 <= g <= K):
            raise SnapshotIngestError(f"group label {g} out of range 1..{K}")
        Vk[g - 1] += 1
    Dk = np.zeros(K, dtype=np.int64)
    E_same = np.zeros(K, dtype=np.int64)
    E_cross = np.zeros(K, dtype=np.float64)
    E = 0
    for a, b in source:
        try:
            ga, gb = groups[a], groups[b]
        except KeyError as exc:
            raise SnapshotIngestError(f"node {exc.args[0]!r} has no group label") from None
        E += 1
        Dk[ga - 1] += 1
        Dk[gb - 1] += 1
        if ga == gb:
            E_same[ga - 1] += 1
        else:
            # direction unobserved: split the attribution across the endpoints
            E_cross[ga - 1] += 0.5
            E_cross[gb - 1] += 0.5
    summary = SnapshotSummary(V=len(groups), E=E, Vk=Vk, Dk=Dk, E_same=E_same, E_cross=E_cross)
    summary.validate()
    return summary


def snapshot_loglik(s: SnapshotSummary, theta: float) -> float:
    """Snapshot log-likelihood of theta given the edge-count summary."""
    if not (0.0 < theta <= 1.0):
        raise ValueError("theta must be in (0,1]")
    if s.E < 1:
        raise EstimationError("snapshot has no edges")
    P = s.Dk / (2.0 * s.E)
    active = (s.E_same > 0) | (s.E_cross > 0)
    if np.any(active & (s.Dk == 0)):
        k = int(np.nonzero(active & (s.Dk == 0))[0][0]) + 1
        raise EstimationError(f"group {k} has edges recorded but zero degree total")
    val = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t_same = np.log(P * (P + (1.0 - theta) * (1.0 - P)))
        t_cross = np.log(P * theta * (1.0 - P))
    val += float(np.sum(np.where(s.E_same > 0, s.E_same * t_same, 0.0)))
    val += float(np.sum(np.where(s.E_cross > 0, s.E_cross * t_cross, 0.0)))
    return val


def _snapshot_score(s: SnapshotSummary, theta: float) -> float:
    P = s.Dk / (2.0 * s.E)
    same_part = float(np.sum(s.E_same * (1.0 - P) / (P + (1.0 - theta) * (1.0 - P))))
    return float(s.E_cross.sum()) / theta - same_part


def estimate_snapshot(s: SnapshotSummary) -> EstimateReport:
    """Estimates from a single snapshot: p from node shares, q from the
    node/edge ratio (clamped at 1), theta from the snapshot likelihood.
    No standard errors: the snapshot estimator has no proven CLT.
    """
    if s.V < 1 or s.E < 1:
        raise EstimationError("snapshot estimation needs at least one node and one edge")
    s.validate()
    flags: list[str] = []
    p_hat = s.Vk / s.V
    q_raw = s.V / s.E
    q_hat = min(q_raw, 1.0)
    if q_raw > 1.0:
        flags.append("q_clamped")

    n_cross = float(s.E_cross.sum())
    if n_cross == 0.0:
        theta_hat = THETA_FLOOR
        flags.append("boundary_low")
    else:
        s_at_1 = _snapshot_score(s, 1.0)
        if s_at_1 >= 0.0:
            theta_hat = 1.0
            if s_at_1 > 0.0:
                flags.append("boundary_high")
        else:
            lo, hi = THETA_FLOOR, 1.0
            it = 0
            while hi - lo > 1e-10 and it < 200:
                mid = 0.5 * (lo + hi)
                if _snapshot_score(s, mid) > 0.0:
                    lo = mid
                else:
                    hi = mid
                it += 1
            theta_hat = 0.5 * (lo + hi)

    return EstimateReport(
        method="snapshot",
        T=s.E,
        theta_hat=float(theta_hat),
        p_hat=p_hat,
        q_hat=float(q_hat),
        flags=tuple(flags),
    )
