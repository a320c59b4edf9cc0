"""Closed-form connection probabilities and limit quantities of the model.

Covers the one-step attachment kernels (vertex-step and edge-step), the
limiting same-group edge rate, the limiting degree-fraction recursion with
its power-law exponent, and the Fisher information of the parameter vector
(theta, p_1..p_{K-1}, q) used for confidence intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import KPAError, ModelParams, require_valid_params


class SingularInformationError(KPAError):
    """Raised when the Fisher information is singular or non-finite."""


def vertex_connect_prob(
    Dk,
    total_degree: int,
    d_u: int,
    g_w: int,
    g_u: int,
    theta: float,
) -> float:
    """Probability that a vertex-step initiated by a group-g_w node connects
    to a given existing node u of degree d_u in group g_u.

    Same group:  d_u/total + (1-theta) * (1 - D^g/total) * d_u/D^g
    Cross group: theta * d_u/total
    """
    Dk = np.asarray(Dk, dtype=np.int64)
    if total_degree <= 0:
        raise ValueError("total_degree must be positive")
    if int(Dk.sum()) != total_degree:
        raise ValueError("total_degree must equal sum(Dk)")
    if not (0.0 < theta <= 1.0):
        raise ValueError("theta must be in (0,1]")
    if d_u < 1:
        raise ValueError("d_u must be >= 1")
    if g_w == g_u:
        same_total = int(Dk[g_w - 1])
        if same_total <= 0:
            raise ValueError(f"group {g_w} has zero total degree")
        P = same_total / total_degree
        return d_u / total_degree + (1.0 - theta) * (1.0 - P) * (d_u / same_total)
    return theta * d_u / total_degree


def edge_connect_prob(
    Dk,
    total_degree: int,
    d_w: int,
    d_u: int,
    g_w: int,
    g_u: int,
    theta: float,
) -> float:
    """Probability of an edge-step adding the ordered pair (w, u): the
    degree-proportional pick of the initiator w times the vertex-step kernel
    for u. w == u (a self-loop) is a legitimate same-group pair."""
    if d_w < 1:
        raise ValueError("d_w must be >= 1")
    return (d_w / total_degree) * vertex_connect_prob(Dk, total_degree, d_u, g_w, g_u, theta)


def expected_same_group_rate(params: ModelParams) -> float:
    """Almost-sure limit of S_t/t, the fraction of edges joining same-group
    endpoints: 1 + theta * (sum_k p_k^2 - 1)."""
    require_valid_params(params)
    p = params.p_array()
    return 1.0 + params.theta * (float(np.sum(p * p)) - 1.0)


def degree_fraction_series(d_max: int, k: int, params: ModelParams) -> np.ndarray:
    """M_d^k for d = 1..d_max as an array, via the stable ratio recursion.

    M_1^k = 2 q p_k / (4 - q);  M_d^k / M_{d-1}^k = (d-1)(2-q) / (2 + d(2-q)).
    """
    require_valid_params(params)
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    q = params.q
    pk = params.p[k - 1]
    out = np.empty(d_max, dtype=np.float64)
    out[0] = 2.0 * q * pk / (4.0 - q)
    if d_max > 1:
        d = np.arange(2, d_max + 1, dtype=np.float64)
        ratios = (d - 1.0) * (2.0 - q) / (2.0 + d * (2.0 - q))
        out[1:] = out[0] * np.cumprod(ratios)
    return out


def expected_degree_fraction(d: int, k: int, params: ModelParams) -> float:
    """Limiting number of degree-d nodes in group k per unit time, M_d^k."""
    return float(degree_fraction_series(d, k, params)[-1])


def power_law_exponent(q: float) -> float:
    """Tail exponent of the per-group degree distribution: 1 + 2/(2-q).

    Does not depend on the group or on theta; q = 1 recovers the classical
    preferential-attachment value 3.
    """
    if not (0.0 < q <= 1.0):
        raise ValueError("q must be in (0,1]")
    return 1.0 + 2.0 / (2.0 - q)


@dataclass
class FisherMatrix:
    """Fisher information of (theta, p_1..p_{K-1}, q), in that order.

    Block diagonal: a scalar theta block, a (K-1)x(K-1) arrival block, and a
    scalar q block. `flags` carries non-fatal boundary notes (theta == 1).
    """

    matrix: np.ndarray
    K: int
    flags: tuple[str, ...] = field(default=())

    @property
    def theta_entry(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def p_block(self) -> np.ndarray:
        return self.matrix[1 : self.K, 1 : self.K]

    @property
    def q_entry(self) -> float:
        return float(self.matrix[-1, -1])


def theta_information(theta: float, p) -> float:
    """Scalar information for theta:
    sum_k [ p_k(1-p_k)/theta + p_k(1-p_k)^2 / (p_k + (1-p_k)(1-theta)) ]."""
    p = np.asarray(p, dtype=np.float64)
    return float(
        np.sum(p * (1.0 - p) / theta + p * (1.0 - p) ** 2 / (p + (1.0 - p) * (1.0 - theta)))
    )


def fisher_information(params: ModelParams) -> FisherMatrix:
    """Fisher information at a parameter point.

    Requires q strictly inside (0,1) and every p_k strictly inside (0,1);
    otherwise some entry is infinite or the matrix is singular. theta = 1 is
    allowed (information stays finite) and is reported in flags.
    """
    require_valid_params(params)
    K = params.K
    p = params.p_array()
    q = params.q
    if q >= 1.0 or q <= 0.0:
        raise SingularInformationError("q information 1/(q(1-q)) is singular at q in {0,1}")
    if K == 1:
        raise SingularInformationError("theta carries no information when K == 1")
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise SingularInformationError("arrival-probability block requires every p_k in (0,1)")

    flags = ()
    if params.theta == 1.0:
        flags = ("theta_boundary",)

    m = np.zeros((K + 1, K + 1), dtype=np.float64)
    m[0, 0] = theta_information(params.theta, p)
    pK = p[-1]
    block = np.full((K - 1, K - 1), q / pK)
    np.fill_diagonal(block, q * (pK + p[:-1]) / (p[:-1] * pK))
    m[1:K, 1:K] = block
    m[K, K] = 1.0 / (q * (1.0 - q))
    return FisherMatrix(matrix=m, K=K, flags=flags)


def plugin_fisher(estimates: ModelParams) -> FisherMatrix:
    """Fisher information evaluated at estimated parameters (the plug-in
    matrix used for standard errors and studentized statistics)."""
    return fisher_information(estimates)
