"""Detection of a single switch in the homophily parameter.

The change time is estimated by maximizing, over candidate split points,
the sum of the separately maximized segment log-likelihoods. A coarse
strided scan locates the peak and a stride-1 pass refines it; the margin
fraction c0 keeps both segments long enough to estimate theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend
from .estimate import EventFeatures


@dataclass
class ChangepointReport:
    """Estimated change time with the two segment estimates of theta.

    `curve` holds the evaluated (tau, split log-likelihood) pairs when the
    caller asked to keep them; values include the theta-free likelihood
    terms, so they match the sum of the two segment log-likelihoods exactly.
    """

    tau_hat: int
    theta1_hat: float
    theta2_hat: float
    c0: float
    stride: int
    t0: int
    curve: Optional[list[tuple[int, float]]] = None


def _theta_free_total(features: EventFeatures) -> float:
    """Likelihood terms that do not involve theta: log P for every edge-step
    event plus log(1-P) for every cross-group event. Their total is the same
    however the history is split, so the scan adds it as a constant."""
    P = features.P
    val = 0.0
    edge_step = features.v == 0
    if np.any(edge_step):
        val += float(np.sum(np.log(P[edge_step])))
    cross = features.same == 0
    if np.any(cross):
        val += float(np.sum(np.log(1.0 - P[cross])))
    return val


def _scan(features: EventFeatures, taus: np.ndarray):
    cum_same = np.concatenate(([0], np.cumsum(features.same, dtype=np.int64)))
    return _backend.scan_split_loglik(features.P_same, cum_same, taus.astype(np.int64), len(features))


def split_loglik(features: EventFeatures, tau: int) -> float:
    """Maximized two-segment log-likelihood for a split after event tau."""
    T = len(features)
    if not (1 <= tau < T):
        raise ValueError(f"tau must satisfy 1 <= tau < T; got {tau} with T={T}")
    values, _, _ = _scan(features, np.array([tau]))
    return float(values[0]) + _theta_free_total(features)


def detect(
    features: EventFeatures,
    c0: float = 0.2,
    stride: Optional[int] = None,
    keep_curve: bool = False,
) -> ChangepointReport:
    """Locate the change point on the grid {t0, t0+stride, ..., T-t0} and
    refine within one stride of the coarse argmax. Ties break toward the
    smallest tau."""
    T = len(features)
    if not (0.0 < c0 < 0.5):
        raise ValueError("c0 must be in (0, 0.5)")
    t0 = math.ceil(c0 * T)
    if T < 2 * t0 + 1:
        raise ValueError(f"history too short: need T >= {2 * t0 + 1} for c0={c0}")
    if stride is None:
        stride = max(1, T // 200)
    if stride < 1:
        raise ValueError("stride must be >= 1")

    taus = np.arange(t0, T - t0 + 1, stride, dtype=np.int64)
    if taus[-1] != T - t0:
        taus = np.append(taus, T - t0)
    values, th1, th2 = _scan(features, taus)
    best = int(np.argmax(values))  # first max = smallest tau on ties

    lo = max(t0, int(taus[best]) - stride)
    hi = min(T - t0, int(taus[best]) + stride)
    fine = np.arange(lo, hi + 1, dtype=np.int64)
    f_values, f_th1, f_th2 = _scan(features, fine)
    f_best = int(np.argmax(f_values))

    # the refinement window contains the coarse argmax, so its max can only improve
    tau_hat = int(fine[f_best])
    report = ChangepointReport(
        tau_hat=tau_hat,
        theta1_hat=float(f_th1[f_best]),
        theta2_hat=float(f_th2[f_best]),
        c0=c0,
        stride=stride,
        t0=t0,
    )
    if keep_curve:
        const = _theta_free_total(features)
        pairs = {int(t): float(v) + const for t, v in zip(taus, values)}
        pairs.update({int(t): float(v) + const for t, v in zip(fine, f_values)})
        report.curve = sorted(pairs.items())
    return report
