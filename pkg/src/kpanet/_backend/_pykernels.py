"""Pure Python/NumPy backend for the hot kernels.

This is the reference implementation: the compiled backend must consume
randomness in exactly the same order and with the same arithmetic, so that
`simulate_events` yields bit-identical event logs on either backend.

Randomness draw order per simulated step:

1. one double for the step type (vertex if u < q),
2. vertex-step: one double for the new node's group (cumulative walk over p);
   edge-step: one uint64 index into the global stub list for w,
3. target kernel, collapsed mode: one uint64 global stub index for the first
   candidate; if its group differs from g_w, one double against theta; on
   rejection one uint64 index into g_w's stub list.
   Mechanistic mode: one uint64 global index; if cross-group, one double
   against gamma; then per redirect round one double against alpha, one
   uint64 index (same-group list or the complement walk), and for
   cross-group candidates one double against gamma.
4. with self-loops forbidden, step 3 repeats while u == w in an edge-step.

Stub lists hold one node id per unit of degree, so a uniform index realizes
degree-proportional sampling in O(1).
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import Xoshiro256StarStar

BACKEND_NAME = "python"

THETA_FLOOR = 1e-9
THETA_TOL = 1e-10

# solve_theta boundary flags
ROOT_INTERIOR = 0
ROOT_LOW = 1  # no cross-group events: likelihood increases as theta -> 0
ROOT_HIGH = 2  # score still positive at theta = 1: clamped

MECH_ITER_CAP = 1_000_000


class StubIndex:
    """Degree-proportional sampling index.

    `global_stubs` has one entry per unit of degree over the whole graph;
    `per_group` restricts to one group. Appending a node id once raises its
    sampled mass by one degree unit.
    """

    def __init__(self, K: int):
        self.global_stubs: list[int] = []
        self.per_group: list[list[int]] = [[] for _ in range(K)]

    def add(self, node: int, group: int) -> None:
        self.global_stubs.append(node)
        self.per_group[group - 1].append(node)

    def check_against(self, degrees, groups) -> None:
        assert len(self.global_stubs) == int(np.sum(degrees))
        for k, stubs in enumerate(self.per_group, start=1):
            assert len(stubs) == int(np.sum(np.asarray(degrees)[np.asarray(groups) == k]))


def _pick_group(rng: Xoshiro256StarStar, p: np.ndarray) -> int:
    r = rng.next_double()
    acc = 0.0
    for k in range(len(p) - 1):
        acc += p[k]
        if r < acc:
            return k + 1
    return len(p)


def _draw_target_collapsed(rng, stubs: StubIndex, groups, g_w: int, theta: float) -> int:
    cand = stubs.global_stubs[rng.next_index(len(stubs.global_stubs))]
    if groups[cand] == g_w:
        return cand
    if rng.next_double() < theta:
        return cand
    group_list = stubs.per_group[g_w - 1]
    return group_list[rng.next_index(len(group_list))]


def _draw_target_mechanistic(rng, stubs: StubIndex, groups, g_w: int, gamma: float, alpha: float):
    """Returns (node, redirect_rounds). Follows the literal accept/redirect
    process; redirect_rounds counts the post-rejection picks."""
    cand = stubs.global_stubs[rng.next_index(len(stubs.global_stubs))]
    if groups[cand] == g_w:
        return cand, 0
    if rng.next_double() < gamma:
        return cand, 0
    total = len(stubs.global_stubs)
    same_list = stubs.per_group[g_w - 1]
    cross_total = total - len(same_list)
    rounds = 0
    while rounds < MECH_ITER_CAP:
        rounds += 1
        if rng.next_double() < alpha:
            return same_list[rng.next_index(len(same_list))], rounds
        r = rng.next_index(cross_total)
        for k, lst in enumerate(stubs.per_group, start=1):
            if k == g_w:
                continue
            if r < len(lst):
                cand = lst[r]
                break
            r -= len(lst)
        if rng.next_double() < gamma:
            return cand, rounds
    raise RuntimeError("mechanistic redirect loop exceeded iteration cap")


def simulate_events(
    per_group_initial: np.ndarray,
    p: np.ndarray,
    q: float,
    theta: float,
    T: int,
    seed: int,
    mode: int = 0,
    gamma: float = 0.0,
    alpha: float = 0.0,
    tau: int = 0,
    theta2: float = 0.0,
    forbid_self_loops: bool = False,
):
    """Run T steps from the phantom-stub initial graph.

    mode 0 = collapsed kernel, 1 = mechanistic process. tau > 0 switches the
    collapsed theta to theta2 for steps t > tau. Returns a dict of arrays:
    events (v, g_w, g_u), edges (edge_a, edge_b), final node groups/degrees,
    and final per-group degree totals.
    """
    per_group_initial = np.asarray(per_group_initial, dtype=np.int64)
    p = np.asarray(p, dtype=np.float64)
    K = len(per_group_initial)
    n0 = int(per_group_initial.sum())
    rng = Xoshiro256StarStar(seed)

    groups: list[int] = []
    for k in range(K):
        groups.extend([k + 1] * int(per_group_initial[k]))
    degrees = [1] * n0

    stubs = StubIndex(K)
    for node, g in enumerate(groups):
        stubs.add(node, g)
    Dk = per_group_initial.astype(np.int64).copy()

    v_arr = np.empty(T, dtype=np.uint8)
    gw_arr = np.empty(T, dtype=np.int32)
    gu_arr = np.empty(T, dtype=np.int32)
    edge_a = np.empty(T, dtype=np.int32)
    edge_b = np.empty(T, dtype=np.int32)

    for t in range(1, T + 1):
        th = theta2 if (tau > 0 and t > tau) else theta
        is_vertex = rng.next_double() < q
        if is_vertex:
            g_w = _pick_group(rng, p)
            w = -1  # assigned after the target resolves
        else:
            w = stubs.global_stubs[rng.next_index(len(stubs.global_stubs))]
            g_w = groups[w]

        if mode == 0:
            u = _draw_target_collapsed(rng, stubs, groups, g_w, th)
            if not is_vertex and forbid_self_loops:
                while u == w:
                    u = _draw_target_collapsed(rng, stubs, groups, g_w, th)
        else:
            u, _ = _draw_target_mechanistic(rng, stubs, groups, g_w, gamma, alpha)
            if not is_vertex and forbid_self_loops:
                while u == w:
                    u, _ = _draw_target_mechanistic(rng, stubs, groups, g_w, gamma, alpha)

        g_u = groups[u]
        if is_vertex:
            w = len(groups)
            groups.append(g_w)
            degrees.append(1)
        else:
            degrees[w] += 1
        degrees[u] += 1
        stubs.add(w, g_w)
        stubs.add(u, g_u)
        Dk[g_w - 1] += 1
        Dk[g_u - 1] += 1

        i = t - 1
        v_arr[i] = 1 if is_vertex else 0
        gw_arr[i] = g_w
        gu_arr[i] = g_u
        edge_a[i] = w
        edge_b[i] = u

    return {
        "v": v_arr,
        "g_w": gw_arr,
        "g_u": gu_arr,
        "edge_a": edge_a,
        "edge_b": edge_b,
        "node_group": np.asarray(groups, dtype=np.int32),
        "node_degree": np.asarray(degrees, dtype=np.int64),
        "Dk": Dk,
    }


def _build_frozen_stubs(node_group, node_degree) -> tuple[StubIndex, list[int]]:
    K = int(max(node_group))
    stubs = StubIndex(K)
    groups = [int(g) for g in node_group]
    for node, (g, d) in enumerate(zip(groups, node_degree)):
        for _ in range(int(d)):
            stubs.add(node, g)
    return stubs, groups


def count_targets_collapsed(
    node_group,
    node_degree,
    g_w: int,
    theta: float,
    n_draws: int,
    seed: int,
) -> np.ndarray:
    """Sample the collapsed vertex-step target kernel n_draws times on a
    frozen state; returns per-node selection counts."""
    stubs, groups = _build_frozen_stubs(node_group, node_degree)
    rng = Xoshiro256StarStar(seed)
    counts = np.zeros(len(groups), dtype=np.int64)
    for _ in range(n_draws):
        counts[_draw_target_collapsed(rng, stubs, groups, g_w, theta)] += 1
    return counts


def count_targets_mechanistic(
    node_group,
    node_degree,
    g_w: int,
    gamma: float,
    alpha: float,
    n_draws: int,
    seed: int,
    hist_size: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the mechanistic target process; returns (per-node counts,
    histogram of redirect-round counts with overflow in the last bin)."""
    stubs, groups = _build_frozen_stubs(node_group, node_degree)
    rng = Xoshiro256StarStar(seed)
    counts = np.zeros(len(groups), dtype=np.int64)
    hist = np.zeros(hist_size, dtype=np.int64)
    for _ in range(n_draws):
        u, rounds = _draw_target_mechanistic(rng, stubs, groups, g_w, gamma, alpha)
        counts[u] += 1
        hist[min(rounds, hist_size - 1)] += 1
    return counts, hist


def score_same_sum(P_same, theta: float) -> float:
    """sum over same-group events of (1-P) / (P + (1-theta)(1-P))."""
    P = np.asarray(P_same, dtype=np.float64)
    return float(np.sum((1.0 - P) / (P + (1.0 - theta) * (1.0 - P))))


def loglik_same_sum(P_same, theta: float) -> float:
    """sum over same-group events of log(P + (1-theta)(1-P))."""
    P = np.asarray(P_same, dtype=np.float64)
    return float(np.sum(np.log(P + (1.0 - theta) * (1.0 - P))))


def solve_theta(P_same, n_cross: int, tol: float = THETA_TOL):
    """Unique root of the theta score on [THETA_FLOOR, 1] by bisection.

    The score n_cross/theta - score_same_sum(theta) is strictly decreasing;
    with no cross-group events it is negative everywhere (flag ROOT_LOW),
    and if still nonnegative at theta = 1 the maximizer is the boundary
    (flag ROOT_HIGH when strictly positive). Returns (theta_hat, flag).
    """
    P = np.asarray(P_same, dtype=np.float64)
    if n_cross == 0:
        return THETA_FLOOR, ROOT_LOW
    s1 = n_cross / 1.0 - score_same_sum(P, 1.0)
    if s1 >= 0.0:
        return 1.0, (ROOT_HIGH if s1 > 0.0 else ROOT_INTERIOR)
    lo, hi = THETA_FLOOR, 1.0
    it = 0
    while hi - lo > tol and it < 200:
        mid = 0.5 * (lo + hi)
        if n_cross / mid - score_same_sum(P, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), ROOT_INTERIOR


def _segment_value(P_seg, n_cross: int) -> tuple[float, float]:
    """Maximized theta-dependent log-likelihood part of one segment:
    returns (theta_hat, loglik_same_sum + n_cross*log(theta_hat))."""
    th, _ = solve_theta(P_seg, n_cross)
    val = loglik_same_sum(P_seg, th)
    if n_cross:
        val += n_cross * math.log(th)
    return th, val


def scan_split_loglik(P_same, cum_same, taus, T: int):
    """Evaluate the split criterion at each tau in `taus`.

    P_same holds the P values of same-group events in time order; cum_same[t]
    is the number of same-group events among the first t. The returned value
    is the theta-dependent part only (the theta-free terms are the same for
    every tau); theta1/theta2 are the per-segment maximizers.
    """
    P = np.asarray(P_same, dtype=np.float64)
    m = len(P)
    values = np.empty(len(taus), dtype=np.float64)
    th1 = np.empty(len(taus), dtype=np.float64)
    th2 = np.empty(len(taus), dtype=np.float64)
    for i, tau in enumerate(taus):
        c = int(cum_same[tau])
        t1, v1 = _segment_value(P[:c], int(tau) - c)
        t2, v2 = _segment_value(P[c:], (T - int(tau)) - (m - c))
        values[i] = v1 + v2
        th1[i] = t1
        th2[i] = t2
    return values, th1, th2
