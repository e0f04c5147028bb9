"""Irregular bipartite pooling graphs sampled from an edge-degree profile.

Left nodes are items, right nodes are pools.  Every right node has exactly r
distinct left neighbors; left degrees are drawn i.i.d. from the node-perspective
distribution of the profile and then repaired so the stub counts balance.  The
ascending order of each right adjacency list is semantic: it defines which
signature column an item occupies in that pool.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_PROFILE_DEGREE = 32


@dataclass
class DegreeProfile:
    """Edge-perspective degree distribution lambda_1..lambda_d.

    node_probs is the induced node-perspective distribution L_1..L_d and
    avg_degree its mean, avg_degree = 1 / sum_i lambda_i / i.
    """

    d: int
    lam: np.ndarray
    avg_degree: float
    node_probs: np.ndarray = field(repr=False)


def profile_from_lambda(d: int, lam) -> DegreeProfile:
    """Validate and normalize an edge-degree profile."""
    if not 1 <= d <= MAX_PROFILE_DEGREE:
        raise ValueError(f"max degree {d} outside [1, {MAX_PROFILE_DEGREE}]")
    arr = np.asarray(lam, dtype=float).copy()
    if arr.shape != (d,):
        raise ValueError(f"profile length {arr.shape} does not match d={d}")
    arr[(arr < 0) & (arr > -1e-11)] = 0.0
    if (arr < 0).any():
        raise ValueError("negative profile entry")
    total = arr.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"profile sums to {total}, not 1")
    arr /= total
    degrees = np.arange(1, d + 1, dtype=float)
    inv_avg = float((arr / degrees).sum())
    if inv_avg <= 0:
        raise ValueError("profile has no mass")
    avg = 1.0 / inv_avg
    node = (arr / degrees) * avg
    return DegreeProfile(d=d, lam=arr, avg_degree=avg, node_probs=node)


class BipartiteGraph:
    """Adjacency of N items and M pools with constant right degree r.

    right_adj has shape (M, r) with ascending, distinct entries per row.
    The left incidence is kept in CSR form: for item v, the incident
    (pool, position) pairs sit at slots left_ptr[v]..left_ptr[v+1].
    """

    def __init__(self, N: int, M: int, r: int, right_adj: np.ndarray):
        right_adj = np.asarray(right_adj, dtype=np.int64)
        if right_adj.shape != (M, r):
            raise ValueError(f"adjacency shape {right_adj.shape} does not match ({M}, {r})")
        if right_adj.size and (right_adj.min() < 0 or right_adj.max() >= N):
            raise ValueError("adjacency entry out of range")
        if (np.diff(right_adj, axis=1) <= 0).any():
            raise ValueError("right adjacency rows must be strictly ascending")
        self.N = N
        self.M = M
        self.r = r
        self.right_adj = right_adj

        flat = right_adj.ravel()
        order = np.argsort(flat, kind="stable")
        self.left_ptr = np.zeros(N + 1, dtype=np.int64)
        np.add.at(self.left_ptr, flat + 1, 1)
        np.cumsum(self.left_ptr, out=self.left_ptr)
        self.left_node = (order // r).astype(np.int64)
        self.left_pos = (order % r).astype(np.int64)

    def degree(self, v: int) -> int:
        return int(self.left_ptr[v + 1] - self.left_ptr[v])

    def incidences(self, v: int):
        """(pool, position) pairs of item v."""
        lo, hi = self.left_ptr[v], self.left_ptr[v + 1]
        return zip(self.left_node[lo:hi].tolist(), self.left_pos[lo:hi].tolist())

    def degree_histogram(self) -> np.ndarray:
        degs = np.diff(self.left_ptr)
        return np.bincount(degs, minlength=int(degs.max(initial=0)) + 1)


def _repair_degrees(degs: np.ndarray, target: int, d: int, rng) -> np.ndarray:
    diff = target - int(degs.sum())
    while diff != 0:
        if diff > 0:
            cand = np.flatnonzero(degs < d)
            take = min(diff, cand.size)
            picks = rng.choice(cand, size=take, replace=False)
            degs[picks] += 1
            diff -= take
        else:
            cand = np.flatnonzero(degs > 1)
            take = min(-diff, cand.size)
            picks = rng.choice(cand, size=take, replace=False)
            degs[picks] -= 1
            diff += take
    return degs


def _try_assemble(N, M, r, degs, rng, max_passes=200):
    stubs = np.repeat(np.arange(N, dtype=np.int64), degs)
    rng.shuffle(stubs)
    arr = stubs.reshape(M, r)
    for _ in range(max_passes):
        srt = np.sort(arr, axis=1)
        bad_rows = np.flatnonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))
        if bad_rows.size == 0:
            return np.sort(arr, axis=1)
        for g in bad_rows:
            row = arr[g]
            seen = {}
            for j, v in enumerate(row.tolist()):
                if v in seen:
                    k = int(rng.integers(M * r))
                    arr[g, j], arr[k // r, k % r] = arr[k // r, k % r], arr[g, j]
                else:
                    seen[v] = j
    return None


def sample_graph(N: int, M: int, r: int, profile: DegreeProfile, seed) -> BipartiteGraph:
    """Sample a pooling graph via the configuration model.

    Left degrees are i.i.d. from profile.node_probs, repaired within [1, d] so
    the stub total equals M * r; multi-edges are removed by bounded swap
    passes, resampling with a derived seed if a pass budget runs out.
    """
    if N < 1 or M < 1:
        raise ValueError("need at least one node on each side")
    if r < 1 or r > N:
        raise ValueError(f"pool size r={r} outside [1, {N}]")
    total = M * r
    if not N <= total <= N * profile.d:
        raise ValueError(
            f"stub total M*r={total} outside [{N}, {N * profile.d}]; degree repair infeasible"
        )
    if isinstance(seed, np.random.SeedSequence):
        root = seed
    else:
        root = np.random.SeedSequence(seed)
    for attempt_seq in root.spawn(8):
        rng = np.random.default_rng(attempt_seq)
        degs = rng.choice(np.arange(1, profile.d + 1), size=N, p=profile.node_probs)
        degs = _repair_degrees(degs.astype(np.int64), total, profile.d, rng)
        arr = _try_assemble(N, M, r, degs, rng)
        if arr is not None:
            return BipartiteGraph(N, M, r, arr)
    raise RuntimeError("could not remove multi-edges; graph too dense for r distinct neighbors")
