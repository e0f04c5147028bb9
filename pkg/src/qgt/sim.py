"""Monte Carlo harness: fresh graph and fresh support per trial.

Per-trial randomness is derived from the master seed and the trial counter, so
results do not depend on worker scheduling when --jobs splits the work.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codec import SupportVector, TestPlan, build_signature, encode, peel_decode
from .design import DesignResult, Plan, make_plan, optimize_design
from .graphs import sample_graph

log = logging.getLogger(__name__)


@dataclass
class TrialConfig:
    N: int
    K: int
    t: int
    d: int
    trials: int
    seed: int
    margin: float = 1.0
    jobs: int = 1
    max_iterations: int | None = None
    track_rounds: int = 0
    # explicit plan override; both must be set together
    M: int | None = None
    r: int | None = None


@dataclass
class SimReport:
    m: int
    M: int
    r: int
    trials: int
    total_defectives: int
    unidentified: int
    false_positives: int
    error_prob: float
    ci_lo: float
    ci_hi: float
    full_recovery: float
    mean_iterations: float
    wall_time: float
    unidentified_by_round: np.ndarray | None = None

    def csv_row(self) -> str:
        return (
            f"{self.m},{self.error_prob:.6g},{self.ci_lo:.6g},{self.ci_hi:.6g},"
            f"{self.full_recovery:.6g},{self.trials}"
        )


CSV_HEADER = "m,error_prob,ci_lo,ci_hi,full_recovery,trials"


def wilson_interval(successes: int, n: int, z: float = 1.959964) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def sample_support(N: int, gamma: float, seed) -> SupportVector:
    """Each item defective independently with probability gamma."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"defect rate {gamma} outside (0, 1)")
    rng = np.random.default_rng(seed)
    return SupportVector(N=N, items=np.flatnonzero(rng.random(N) < gamma))


def _run_chunk(args):
    (N, K, t, profile, M, r, lo, hi, seed, max_iterations, track_rounds) = args
    sig = build_signature(t, r)
    gamma = K / N
    defect_total = 0
    unidentified = 0
    false_pos = 0
    full = 0
    iters = 0
    by_round = np.zeros(track_rounds, dtype=np.int64)
    for i in range(lo, hi):
        graph_seed, support_seed = np.random.SeedSequence(
            entropy=seed, spawn_key=(i,)
        ).spawn(2)
        graph = sample_graph(N, M, r, profile, graph_seed)
        support = sample_support(N, gamma, support_seed)
        plan = TestPlan(graph, sig)
        out = peel_decode(plan, encode(plan, support), max_iterations=max_iterations)
        truth = set(support.items.tolist())
        found = set(out.identified.tolist())
        defect_total += len(truth)
        unidentified += len(truth - found)
        false_pos += len(found - truth)
        full += truth == found
        iters += out.iterations
        if track_rounds:
            got = np.cumsum(out.identified_per_iteration)
            for j in range(track_rounds):
                done = got[min(j, got.size - 1)] if got.size else 0
                by_round[j] += len(truth) - int(done)
    return defect_total, unidentified, false_pos, full, iters, by_round


def run_plan_trials(
    N: int,
    K: int,
    t: int,
    profile,
    M: int,
    r: int,
    trials: int,
    seed: int,
    jobs: int = 1,
    max_iterations: int | None = None,
    track_rounds: int = 0,
) -> SimReport:
    start = time.perf_counter()
    s = t * r.bit_length() + 1
    bounds = np.linspace(0, trials, min(max(jobs, 1), trials) * 4 + 1 if jobs > 1 else 2).astype(int)
    chunks = [
        (N, K, t, profile, M, r, int(lo), int(hi), seed, max_iterations, track_rounds)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(ch) for ch in chunks]
    defect_total = sum(p[0] for p in parts)
    unidentified = sum(p[1] for p in parts)
    false_pos = sum(p[2] for p in parts)
    full = sum(p[3] for p in parts)
    iters = sum(p[4] for p in parts)
    by_round = sum((p[5] for p in parts), np.zeros(track_rounds, dtype=np.int64))
    lo, hi = wilson_interval(unidentified, max(defect_total, 1))
    return SimReport(
        m=M * s,
        M=M,
        r=r,
        trials=trials,
        total_defectives=defect_total,
        unidentified=unidentified,
        false_positives=false_pos,
        error_prob=unidentified / max(defect_total, 1),
        ci_lo=lo,
        ci_hi=hi,
        full_recovery=full / max(trials, 1),
        mean_iterations=iters / max(trials, 1),
        wall_time=time.perf_counter() - start,
        unidentified_by_round=by_round if track_rounds else None,
    )


def _invert_budget(m: int, N: int, t: int, design: DesignResult) -> tuple[int, int] | None:
    """Find (M, r) realizing about m tests, via the fixed point of
    M = floor(m / s), r = edge balance, s = t * ceil(log2(r + 1)) + 1."""
    ell = design.profile.avg_degree
    s = t * 8 + 1  # neutral start; the fixed point below self-corrects
    M = r = None
    for _ in range(12):
        M = m // s
        if M < 1:
            return None
        r = min(round(ell * N / M), N * design.d // M, N)
        if r < 3:
            return None
        s_new = t * r.bit_length() + 1
        if s_new == s:
            break
        s = s_new
    return int(M), int(r)


def run_sweep(config: TrialConfig, m_values, design: DesignResult | None = None) -> list[SimReport]:
    """One SimReport per realizable m; unrealizable entries are skipped with a
    warning."""
    if design is None:
        design = optimize_design(config.t, config.d)
    reports = []
    for m in m_values:
        inverted = _invert_budget(int(m), config.N, config.t, design)
        if inverted is None:
            log.warning("budget m=%s not realizable at N=%s, t=%s; skipped", m, config.N, config.t)
            continue
        M, r = inverted
        reports.append(
            run_plan_trials(
                config.N,
                config.K,
                config.t,
                design.profile,
                M,
                r,
                config.trials,
                config.seed,
                jobs=config.jobs,
                max_iterations=config.max_iterations,
                track_rounds=config.track_rounds,
            )
        )
    return reports


def planner_report(config: TrialConfig, design: DesignResult | None = None) -> tuple[Plan, SimReport]:
    """Run trials at the planner's operating point, or at an explicit (M, r)."""
    if design is None:
        design = optimize_design(config.t, config.d)
    plan = make_plan(config.N, config.K, design, margin=config.margin)
    M = plan.M if config.M is None else config.M
    r = plan.r if config.r is None else config.r
    report = run_plan_trials(
        config.N,
        config.K,
        config.t,
        design.profile,
        M,
        r,
        config.trials,
        config.seed,
        jobs=config.jobs,
        max_iterations=config.max_iterations,
        track_rounds=config.track_rounds,
    )
    return plan, report
