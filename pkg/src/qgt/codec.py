"""Test plans, integer-count encoding, and the iterative peeling decoder.

A test plan is a pooling graph plus a signature matrix shared by all pools.
The signature for capability t and pool size r stacks an all-ones counting row
on top of the BCH parity-check rows, so a pool's measurement block holds the
number of its defective members and, mod 2, their BCH syndrome.  The full
m x N measurement matrix is never materialized.

Decoding peels: any pool whose residual count is at most t is resolved by BCH
syndrome decoding, the identified items' signature columns are subtracted from
their other pools, and the process repeats until nothing changes.  Pool
eligibility within a pass is fixed by the counts at the start of the pass, so
the pass index matches the round-by-round schedule that density evolution
tracks; subtractions themselves are applied immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bch import DecodeFailure, ParityCheckMatrix, build_parity_check, syndrome_decode
from .graphs import BipartiteGraph

PLAN_FORMAT_VERSION = 1


class FormatError(ValueError):
    """Malformed or wrong-version serialized artifact."""


@dataclass
class SignatureMatrix:
    """All-ones counting row stacked on the BCH parity rows; shape (s, r)."""

    t: int
    q: int
    s: int
    r: int
    matrix: np.ndarray = field(repr=False)
    parity: ParityCheckMatrix = field(repr=False)


def build_signature(t: int, r: int) -> SignatureMatrix:
    pcm = build_parity_check(t, r)
    mat = np.vstack([np.ones((1, r), dtype=np.uint8), pcm.rows])
    return SignatureMatrix(t=t, q=pcm.q, s=pcm.num_rows + 1, r=r, matrix=mat, parity=pcm)


class TestPlan:
    """Pooling graph plus signature; the complete description of one design."""

    def __init__(self, graph: BipartiteGraph, signature: SignatureMatrix, seed=None):
        if signature.r != graph.r:
            raise ValueError("signature width does not match pool size")
        self.graph = graph
        self.signature = signature
        self.t = signature.t
        self.seed = seed

    @property
    def N(self) -> int:
        return self.graph.N

    @property
    def M(self) -> int:
        return self.graph.M

    @property
    def r(self) -> int:
        return self.graph.r

    @property
    def num_tests(self) -> int:
        return self.graph.M * self.signature.s

    def to_dict(self) -> dict:
        return {
            "version": PLAN_FORMAT_VERSION,
            "N": self.N,
            "M": self.M,
            "r": self.r,
            "t": self.t,
            "q": self.signature.q,
            "seed": self.seed,
            "right_adj": self.graph.right_adj.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TestPlan":
        try:
            version = data["version"]
            N, M, r, t, q = (int(data[k]) for k in ("N", "M", "r", "t", "q"))
            adj = data["right_adj"]
            seed = data.get("seed")
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad plan object: {exc}") from exc
        if version != PLAN_FORMAT_VERSION:
            raise FormatError(f"unknown plan format version {version}")
        if q != r.bit_length():
            raise FormatError(f"stored q={q} inconsistent with r={r}")
        try:
            graph = BipartiteGraph(N, M, r, np.asarray(adj, dtype=np.int64))
        except ValueError as exc:
            raise FormatError(f"bad adjacency: {exc}") from exc
        sig = build_signature(t, r)
        return cls(graph, sig, seed=seed)


@dataclass
class SupportVector:
    """Defective item indices, 0-based and sorted."""

    N: int
    items: np.ndarray

    def __post_init__(self):
        arr = np.unique(np.asarray(self.items, dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= self.N):
            raise ValueError("support index out of range")
        self.items = arr

    def to_dict(self) -> dict:
        # Files carry 1-based item ids; the library is 0-based throughout.
        return {"version": 1, "N": self.N, "defective": (self.items + 1).tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "SupportVector":
        try:
            version = data["version"]
            N = int(data["N"])
            items = [int(v) for v in data["defective"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad support object: {exc}") from exc
        if version != 1:
            raise FormatError(f"unknown support format version {version}")
        if any(not 1 <= v <= N for v in items):
            raise FormatError("support ids must be in [1, N]")
        return cls(N=N, items=np.asarray(items, dtype=np.int64) - 1)


@dataclass
class TestResults:
    """Flat length-m measurement vector, viewed as M blocks of s entries."""

    M: int
    s: int
    values: np.ndarray

    @property
    def blocks(self) -> np.ndarray:
        return self.values.reshape(self.M, self.s)

    def to_dict(self) -> dict:
        return {"version": 1, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict, M: int, s: int) -> "TestResults":
        try:
            version = data["version"]
            values = np.asarray([int(v) for v in data["values"]], dtype=np.int64)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad results object: {exc}") from exc
        if version != 1:
            raise FormatError(f"unknown results format version {version}")
        if values.shape != (M * s,):
            raise FormatError(f"expected {M * s} measurements, got {values.size}")
        if (values < 0).any():
            raise FormatError("negative measurement value")
        return cls(M=M, s=s, values=values)


@dataclass
class DecodeOutcome:
    identified: np.ndarray
    iterations: int
    resolved_nodes: int
    stalled: bool
    failed_nodes: int
    identified_per_iteration: list

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "identified": (np.asarray(self.identified) + 1).tolist(),
            "iterations": self.iterations,
            "resolved_nodes": self.resolved_nodes,
            "stalled": self.stalled,
            "failed_nodes": self.failed_nodes,
            "identified_per_iteration": list(self.identified_per_iteration),
        }


def encode(plan: TestPlan, support: SupportVector) -> TestResults:
    """Measurement blocks: per pool, the sum of its defective members' columns."""
    if support.N != plan.N:
        raise ValueError("support universe does not match plan")
    g, sig = plan.graph, plan.signature
    Y = np.zeros((g.M, sig.s), dtype=np.int64)
    if support.items.size:
        slots = np.concatenate(
            [np.arange(g.left_ptr[v], g.left_ptr[v + 1]) for v in support.items.tolist()]
        )
        cols = sig.matrix.T[g.left_pos[slots]].astype(np.int64)
        np.add.at(Y, g.left_node[slots], cols)
    return TestResults(M=g.M, s=sig.s, values=Y.ravel())


def peel_decode(
    plan: TestPlan,
    results: TestResults,
    max_iterations: int | None = None,
    iteration_hook=None,
) -> DecodeOutcome:
    """Iterative peeling recovery.

    Each pass resolves the pools whose residual count was <= t when the pass
    started: count 0 is trivially done, otherwise the residual parity rows are
    syndrome-decoded and the located items subtracted from all their pools.
    A DecodeFailure leaves the pool unresolved for a later retry.  The decoder
    stops when a pass makes no progress or after max_iterations passes
    (default M + 1, which never truncates a productive run).
    """
    g, sig = plan.graph, plan.signature
    M, s, t = g.M, sig.s, plan.t
    if results.M != M or results.s != s:
        raise ValueError("results shape does not match plan")
    if max_iterations is None:
        max_iterations = M + 1
    Y = results.blocks.astype(np.int64, copy=True)
    U = sig.matrix.astype(np.int64)
    pcm = sig.parity

    is_defective_found = np.zeros(g.N, dtype=bool)
    identified: list[int] = []
    resolved = np.zeros(M, dtype=bool)
    active = np.arange(M, dtype=np.int64)
    iterations = 0
    per_iter: list[int] = []

    while active.size and iterations < max_iterations:
        counts = Y[active, 0]
        eligible = active[(counts <= t) & ~resolved[active]]
        iterations += 1
        next_active: set[int] = set()
        newly = 0
        progress = False
        for n in eligible.tolist():
            if resolved[n]:
                continue
            v = int(Y[n, 0])
            if v < 0:
                # only possible on inconsistent input; the pool can never
                # become valid again, so leave it for the failure accounting
                continue
            if v == 0:
                resolved[n] = True
                progress = True
                continue
            try:
                positions = syndrome_decode(pcm, Y[n, 1:] & 1, v)
            except DecodeFailure:
                next_active.add(n)
                continue
            items = g.right_adj[n, positions]
            if is_defective_found[items].any():
                # residuals inconsistent with earlier peels; treat like a failure
                next_active.add(n)
                continue
            for item in items.tolist():
                is_defective_found[item] = True
                identified.append(item)
                lo, hi = g.left_ptr[item], g.left_ptr[item + 1]
                for node2, pos2 in zip(g.left_node[lo:hi].tolist(), g.left_pos[lo:hi].tolist()):
                    Y[node2] -= U[:, pos2]
                    if node2 != n and not resolved[node2]:
                        next_active.add(node2)
            resolved[n] = True
            progress = True
            newly += len(items)
        per_iter.append(newly)
        if iteration_hook is not None:
            iteration_hook(iterations, Y, identified)
        if not progress:
            break
        active = np.fromiter(sorted(next_active), dtype=np.int64, count=len(next_active))

    open_counts = Y[~resolved, 0]
    return DecodeOutcome(
        identified=np.asarray(sorted(identified), dtype=np.int64),
        iterations=iterations,
        resolved_nodes=int(resolved.sum()),
        stalled=bool((open_counts > t).any()),
        failed_nodes=int((open_counts <= t).sum()),
        identified_per_iteration=per_iter,
    )
