"""Trajectory generation for the KPA model.

`simulate` runs either the collapsed theta kernel or the literal
mechanistic accept/redirect process and returns the final GraphState plus
the replayable EventLog. `run_trials` drives independent seeded runs (the
batch layout used by the convergence and estimator studies) with
deterministic per-trial seeds, so results do not depend on worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend
from .model import (
    Changepoint,
    EventLog,
    GraphState,
    InvalidParamsError,
    MechanisticParams,
    ModelParams,
    SimConfig,
    initial_group_counts,
    require_valid_params,
    theta_from_mechanistic,
)
from .rng import trial_seeds

MECH_THETA_TOL = 1e-9


def _validate_config(params: ModelParams, cfg: SimConfig) -> None:
    require_valid_params(params)
    if cfg.T < 0:
        raise ValueError("T must be >= 0")
    if cfg.mode not in ("collapsed", "mechanistic"):
        raise ValueError(f"unknown mode {cfg.mode!r}")
    if cfg.mode == "mechanistic":
        if cfg.mech is None:
            raise ValueError("mechanistic mode requires MechanisticParams")
        collapsed = theta_from_mechanistic(cfg.mech)
        if abs(collapsed - params.theta) > MECH_THETA_TOL:
            raise InvalidParamsError(
                [f"params.theta={params.theta} does not match collapse of (gamma, alpha)={collapsed}"]
            )
        if cfg.changepoint is not None:
            raise ValueError("changepoint runs are defined for the collapsed mode only")
    if cfg.changepoint is not None:
        cp = cfg.changepoint
        if not (1 <= cp.tau <= cfg.T):
            raise ValueError("changepoint tau must satisfy 1 <= tau <= T")
        if not (0.0 < cp.theta2 <= 1.0):
            raise ValueError("theta2 out of (0,1]")


def simulate(params: ModelParams, cfg: SimConfig) -> tuple[GraphState, EventLog]:
    """Generate a T-step trajectory; deterministic given cfg.seed."""
    _validate_config(params, cfg)
    counts = initial_group_counts(params)
    cp = cfg.changepoint
    res = _backend.simulate_events(
        counts,
        params.p_array(),
        params.q,
        params.theta,
        cfg.T,
        cfg.seed,
        mode=0 if cfg.mode == "collapsed" else 1,
        gamma=cfg.mech.gamma if cfg.mech else 0.0,
        alpha=cfg.mech.alpha if cfg.mech else 0.0,
        tau=cp.tau if cp else 0,
        theta2=cp.theta2 if cp else 0.0,
        forbid_self_loops=cfg.forbid_self_loops,
    )
    state = GraphState(
        t=cfg.T,
        n0=params.n0,
        per_group_initial=counts,
        groups=res["node_group"],
        degrees=res["node_degree"],
        group_degree_totals=res["Dk"],
        edge_a=res["edge_a"],
        edge_b=res["edge_b"],
    )
    log = EventLog(
        n0=params.n0,
        per_group_initial=counts,
        v=res["v"],
        g_w=res["g_w"],
        g_u=res["g_u"],
        params_hint=params,
    )
    return state, log


def degree_histogram(state: GraphState, k: int) -> dict[int, int]:
    """Exact degree -> count map for group k; sum of d*count equals D^k."""
    if not (1 <= k <= state.K):
        raise ValueError(f"group {k} out of 1..{state.K}")
    degs = state.degrees[state.groups == k]
    counts = np.bincount(degs)
    return {int(d): int(c) for d, c in enumerate(counts) if c > 0}


def fit_log_log_slope(hist: dict[int, int], d_min: int = 2, d_max: Optional[int] = None) -> float:
    """Least-squares slope of log(count) against log(degree) over
    [d_min, d_max]; the plain diagnostic used alongside the histogram."""
    pts = [(d, c) for d, c in sorted(hist.items()) if d >= d_min and (d_max is None or d <= d_max)]
    if len(pts) < 2:
        raise ValueError("need at least two degree classes to fit a slope")
    x = np.log([d for d, _ in pts])
    y = np.log([c for _, c in pts])
    return float(np.polyfit(x, y, 1)[0])


def group_degree_percentile(state: GraphState, k: int, pct: float) -> int:
    """Percentile of the degree sequence of group k's nodes."""
    degs = state.degrees[state.groups == k]
    return int(np.percentile(degs, pct))


@dataclass
class TrialResult:
    """Per-trial summary used by the batch tables."""

    seed: int
    Dk_over_2T: np.ndarray
    same_rate: float  # S_T / T
    q_hat: float
    p_hat: np.ndarray
    theta_hat: float
    theta_se: float
    theta_flags: tuple[str, ...]
    theta_snap: float


def _run_one_trial(args) -> TrialResult:
    params, cfg_dict, seed = args
    # imported here so worker processes resolve the module after fork/spawn
    from .estimate import estimate_history, estimate_snapshot, summarize_snapshot

    cfg = SimConfig(seed=seed, **cfg_dict)
    state, log = simulate(params, cfg)
    T = cfg.T
    report = estimate_history(log)
    snap = estimate_snapshot(summarize_snapshot(state))
    return TrialResult(
        seed=seed,
        Dk_over_2T=state.group_degree_totals / (2.0 * T),
        same_rate=float(np.sum(log.g_w == log.g_u)) / T,
        q_hat=report.q_hat,
        p_hat=report.p_hat,
        theta_hat=report.theta_hat,
        theta_se=report.theta_se,
        theta_flags=report.flags,
        theta_snap=snap.theta_hat,
    )


def run_trials(
    params: ModelParams,
    cfg: SimConfig,
    B: int,
    n_jobs: int = 1,
) -> list[TrialResult]:
    """B independent runs with seeds derived from cfg.seed.

    Trial b uses the b-th splitmix64 output of the master seed, so the
    result list is identical for any n_jobs. Runs are sequential for
    n_jobs == 1, otherwise distributed over a process pool.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    _validate_config(params, cfg)
    cfg_dict = dict(
        T=cfg.T,
        mode=cfg.mode,
        changepoint=cfg.changepoint,
        mech=cfg.mech,
        forbid_self_loops=cfg.forbid_self_loops,
    )
    jobs = [(params, cfg_dict, s) for s in trial_seeds(cfg.seed, B)]
    if n_jobs == 1:
        return [_run_one_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as ex:
        return list(ex.map(_run_one_trial, jobs, chunksize=max(1, B // (4 * n_jobs))))


def aggregate_trials(results: list[TrialResult], params: ModelParams, ci_level: float = 0.95):
    """Bias/MSE table over a trial batch, in the layout of the simulation
    studies: degree-ratio moments per group, same-edge rate, and the theta
    estimators with CI coverage against the generating parameters."""
    from statistics import NormalDist

    from .probability import expected_same_group_rate

    z = NormalDist().inv_cdf(0.5 + ci_level / 2.0)
    theta = params.theta
    dk = np.stack([r.Dk_over_2T for r in results])
    same = np.array([r.same_rate for r in results])
    th = np.array([r.theta_hat for r in results])
    se = np.array([r.theta_se for r in results])
    th_snap = np.array([r.theta_snap for r in results])
    p_true = params.p_array()
    s_star = expected_same_group_rate(params)
    with np.errstate(invalid="ignore", divide="ignore"):
        studentized = (th - theta) / se
        covered = np.abs(studentized) <= z
    return {
        "B": len(results),
        "dk_bias": (dk.mean(axis=0) - p_true),
        "dk_mse": ((dk - p_true) ** 2).mean(axis=0),
        "same_rate_limit": s_star,
        "same_rate_mean": float(same.mean()),
        "same_rate_mse": float(((same - s_star) ** 2).mean()),
        "theta_mean": float(th.mean()),
        "theta_bias": float(th.mean() - theta),
        "theta_mse": float(((th - theta) ** 2).mean()),
        "theta_mae": float(np.abs(th - theta).mean()),
        "ci_level": ci_level,
        "ci_coverage": float(np.mean(covered)),
        "studentized_var": float(np.mean(studentized**2)),
        "snap_mean": float(th_snap.mean()),
        "snap_mse": float(((th_snap - theta) ** 2).mean()),
        "snap_mae": float(np.abs(th_snap - theta).mean()),
        "mle_vs_snap_mae": float(np.abs(th - th_snap).mean()),
    }


def empirical_target_distribution(
    groups,
    degrees,
    g_w: int,
    n_draws: int,
    seed: int,
    theta: Optional[float] = None,
    mech: Optional[MechanisticParams] = None,
):
    """Monte Carlo target-choice frequencies on a frozen state.

    Exactly one of theta (collapsed kernel) or mech (mechanistic process)
    must be given. Returns the length-V frequency vector; for the
    mechanistic process also the redirect-round histogram.
    """
    groups = np.asarray(groups, dtype=np.int64)
    degrees = np.asarray(degrees, dtype=np.int64)
    if (theta is None) == (mech is None):
        raise ValueError("give exactly one of theta or mech")
    if theta is not None:
        counts = _backend.count_targets_collapsed(groups, degrees, g_w, theta, n_draws, seed)
        return counts / n_draws
    counts, hist = _backend.count_targets_mechanistic(
        groups, degrees, g_w, mech.gamma, mech.alpha, n_draws, seed
    )
    return counts / n_draws, hist


def theoretical_target_distribution(groups, degrees, g_w: int, theta: float) -> np.ndarray:
    """Closed-form vertex-step target distribution on a frozen state."""
    from .probability import vertex_connect_prob

    groups = np.asarray(groups, dtype=np.int64)
    degrees = np.asarray(degrees, dtype=np.int64)
    K = int(groups.max())
    Dk = np.zeros(K, dtype=np.int64)
    np.add.at(Dk, groups - 1, degrees)
    total = int(Dk.sum())
    return np.array(
        [
            vertex_connect_prob(Dk, total, int(d), g_w, int(g), theta)
            for g, d in zip(groups, degrees)
        ]
    )


def tv_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Total variation distance between two distributions on the same support."""
    return 0.5 * float(np.abs(np.asarray(a) - np.asarray(b)).sum())
