"""Core types for the K-groups preferential attachment (KPA) model.

A KPA network evolves in unit time steps from an initial graph of n0
degree-one nodes split across K groups. Each step is either a vertex-step
(a new node arrives and connects once, probability q) or an edge-step (an
edge is added between existing nodes, probability 1-q). Attachment mixes
degree-proportional choice with a homophily parameter theta in (0, 1]:
theta = 1 removes any group preference.

Group labels are 1-based everywhere. Per-group vectors (arrival
probabilities p, degree totals D^k) are indexed positionally, so entry 0
belongs to group 1.

The initial graph carries "phantom stubs": every initial node has degree 1
but no recorded edge, which keeps the total degree exactly 2t + n0 at every
time t without inventing a wiring the model never uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

P_SUM_TOL = 1e-12


class KPAError(Exception):
    """Base class for errors raised by this package."""


class InvalidParamsError(KPAError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ReplayError(KPAError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Collapsed KPA parameter vector (theta, p_1..p_K, q) plus K and n0."""

    theta: float
    p: tuple[float, ...]
    q: float
    n0: int

    def __init__(self, theta: float, p: Iterable[float], q: float, n0: int):
        object.__setattr__(self, "theta", float(theta))
        object.__setattr__(self, "p", tuple(float(x) for x in p))
        object.__setattr__(self, "q", float(q))
        object.__setattr__(self, "n0", int(n0))

    @property
    def K(self) -> int:
        return len(self.p)

    def p_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=np.float64)


@dataclass(frozen=True)
class MechanisticParams:
    """Uncollapsed homophily pair: gamma is the cross-group acceptance
    probability, alpha the same-group redirect probability after a first
    rejection. Both lie in (0, 1]."""

    gamma: float
    alpha: float


def theta_from_mechanistic(m: MechanisticParams) -> float:
    """Collapse (gamma, alpha) into the single homophily parameter.

    theta = gamma / (gamma + alpha * (1 - gamma)); equivalently 1 - theta is
    the mass of the geometric redirect process that ends on a same-group
    node after a first cross-group rejection.
    """
    if not (0.0 < m.gamma <= 1.0) or not (0.0 < m.alpha <= 1.0):
        raise ValueError(f"gamma and alpha must be in (0, 1], got {m.gamma}, {m.alpha}")
    return m.gamma / (m.gamma + m.alpha * (1.0 - m.gamma))


def initial_group_counts(params: ModelParams) -> np.ndarray:
    """Number of initial nodes per group: round(p_k * n0), residue to argmax p.

    Rounding is half-up so the result does not depend on the platform's
    bankers rounding; any leftover after rounding is assigned to the
    largest-p group (first such group on ties).
    """
    p = params.p_array()
    counts = np.floor(p * params.n0 + 0.5).astype(np.int64)
    counts[p == 0.0] = 0
    residue = params.n0 - int(counts.sum())
    if residue != 0:
        counts[int(np.argmax(p))] += residue
    return counts


def validate_params(params: ModelParams) -> list[str]:
    """Return all invariant violations of a parameter vector (empty = ok)."""
    violations = []
    if not (0.0 < params.theta <= 1.0):
        violations.append("theta out of (0,1]")
    if not (0.0 < params.q <= 1.0):
        violations.append("q out of (0,1]")
    if params.K < 1:
        violations.append("K must be >= 1")
    for k, pk in enumerate(params.p, start=1):
        if not (0.0 <= pk <= 1.0):
            violations.append(f"p_{k} out of [0,1]")
    if abs(sum(params.p) - 1.0) > P_SUM_TOL:
        violations.append("p does not sum to 1")
    if params.n0 < params.K:
        violations.append("n0 must be >= K")
    else:
        counts = initial_group_counts(params)
        if any(c < 1 for c, pk in zip(counts, params.p) if pk > 0.0):
            violations.append("n0 too small: some group with p_k > 0 rounds to 0 initial nodes")
        if any(c < 0 for c in counts):
            violations.append("initial group counts underflow (p too skewed for n0)")
    return violations


def require_valid_params(params: ModelParams) -> None:
    violations = validate_params(params)
    if violations:
        raise InvalidParamsError(violations)


@dataclass(frozen=True)
class EventRecord:
    """One step of the history: time, vertex-step indicator, and the group
    labels of the initiating node w and the chosen node u."""

    t: int
    v: int
    g_w: int
    g_u: int


@dataclass
class EventLog:
    """Replayable history of a run.

    Node identities are deliberately absent: every likelihood in the model
    depends only on (v_t, g_w, g_u) and the per-group degree totals, and the
    latter are reconstructed exactly by `replay_group_degrees` from
    `per_group_initial`.
    """

    n0: int
    per_group_initial: np.ndarray  # int64[K]
    v: np.ndarray  # uint8[T]
    g_w: np.ndarray  # int32[T], values 1..K
    g_u: np.ndarray  # int32[T]
    params_hint: Optional[ModelParams] = None

    def __post_init__(self):
        self.per_group_initial = np.asarray(self.per_group_initial, dtype=np.int64)
        self.v = np.asarray(self.v, dtype=np.uint8)
        self.g_w = np.asarray(self.g_w, dtype=np.int32)
        self.g_u = np.asarray(self.g_u, dtype=np.int32)

    @property
    def T(self) -> int:
        return len(self.v)

    @property
    def K(self) -> int:
        return len(self.per_group_initial)

    def __len__(self) -> int:
        return self.T

    def records(self) -> Iterator[EventRecord]:
        for i in range(self.T):
            yield EventRecord(i + 1, int(self.v[i]), int(self.g_w[i]), int(self.g_u[i]))

    @classmethod
    def from_records(
        cls,
        records: Iterable[EventRecord],
        n0: int,
        per_group_initial: Sequence[int],
        params_hint: Optional[ModelParams] = None,
    ) -> "EventLog":
        recs = list(records)
        for i, r in enumerate(recs):
            if r.t != i + 1:
                raise ReplayError(f"record times must be 1..T without gaps; got t={r.t} at position {i}")
        return cls(
            n0=int(n0),
            per_group_initial=np.asarray(per_group_initial, dtype=np.int64),
            v=np.array([r.v for r in recs], dtype=np.uint8),
            g_w=np.array([r.g_w for r in recs], dtype=np.int32),
            g_u=np.array([r.g_u for r in recs], dtype=np.int32),
            params_hint=params_hint,
        )


def replay_group_degrees(log: EventLog) -> np.ndarray:
    """Reconstruct the per-group degree totals D^k_t for t = 0..T.

    Returns an int64 array of shape (T+1, K). A same-group record adds 2 to
    its group; a cross-group record adds 1 to each endpoint group. The total
    satisfies sum_k D^k_t = 2t + n0 exactly.
    """
    K = log.K
    if int(log.per_group_initial.sum()) != log.n0:
        raise ReplayError("per_group_initial does not sum to n0")
    for name, arr in (("v", log.v), ("g_w", log.g_w), ("g_u", log.g_u)):
        if len(arr) != log.T:
            raise ReplayError(f"field {name} has length {len(arr)}, expected {log.T}")
    bad = np.nonzero(
        (log.g_w < 1) | (log.g_w > K) | (log.g_u < 1) | (log.g_u > K) | (log.v > 1)
    )[0]
    if bad.size:
        raise ReplayError(f"malformed record at t={int(bad[0]) + 1}")

    traj = np.empty((log.T + 1, K), dtype=np.int64)
    traj[0] = log.per_group_initial
    if log.T:
        inc = np.zeros((log.T, K), dtype=np.int64)
        rows = np.arange(log.T)
        np.add.at(inc, (rows, log.g_w.astype(np.int64) - 1), 1)
        np.add.at(inc, (rows, log.g_u.astype(np.int64) - 1), 1)
        traj[1:] = log.per_group_initial + np.cumsum(inc, axis=0)
    return traj


@dataclass
class GraphState:
    """Snapshot of the evolving graph at time t.

    Degrees include the phantom stub of each initial node, so
    sum(degrees) == sum(group_degree_totals) == 2t + n0 while
    real_edge_count == t (phantom stubs are not edges). Edges are stored as
    endpoint arrays; self-loops (a == b) contribute 2 to their node's degree.
    """

    t: int
    n0: int
    per_group_initial: np.ndarray  # int64[K]
    groups: np.ndarray  # int32[V], values 1..K
    degrees: np.ndarray  # int64[V]
    group_degree_totals: np.ndarray  # int64[K]
    edge_a: np.ndarray  # int32[t]
    edge_b: np.ndarray  # int32[t]

    @property
    def K(self) -> int:
        return len(self.group_degree_totals)

    @property
    def num_nodes(self) -> int:
        return len(self.degrees)

    @property
    def real_edge_count(self) -> int:
        return len(self.edge_a)

    def group_node_counts(self) -> np.ndarray:
        return np.bincount(self.groups, minlength=self.K + 1)[1:].astype(np.int64)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as (min, max) pairs; multiplicity preserved."""
        for a, b in zip(self.edge_a, self.edge_b):
            a, b = int(a), int(b)
            yield (a, b) if a <= b else (b, a)

    def check(self) -> None:
        """Assert the structural invariants; raises AssertionError on breakage."""
        assert self.degrees.min(initial=1) >= 1, "every node must have degree >= 1"
        total = int(self.group_degree_totals.sum())
        assert total == 2 * self.t + self.n0, "sum_k D^k must equal 2t + n0"
        per_group = np.zeros(self.K, dtype=np.int64)
        np.add.at(per_group, self.groups.astype(np.int64) - 1, self.degrees)
        assert np.array_equal(per_group, self.group_degree_totals), "D^k must match degree sums"
        assert self.real_edge_count == self.t, "one recorded edge per step"
        if self.t:
            m = max(int(self.edge_a.max()), int(self.edge_b.max()))
            assert m < self.num_nodes, "edge endpoints must be existing nodes"


@dataclass(frozen=True)
class Changepoint:
    """A single switch of theta at time tau: steps t <= tau use the base
    theta, steps t > tau use theta2. Arrival probabilities and q are fixed."""

    tau: int
    theta2: float


@dataclass(frozen=True)
class SimConfig:
    """Run configuration for the simulator.

    mode "collapsed" samples targets through the theta kernel directly;
    "mechanistic" runs the literal accept/redirect process and requires
    `mech`, whose collapse must agree with params.theta.
    """

    T: int
    seed: int
    mode: str = "collapsed"
    changepoint: Optional[Changepoint] = None
    mech: Optional[MechanisticParams] = None
    forbid_self_loops: bool = False
