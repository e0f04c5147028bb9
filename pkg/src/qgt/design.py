"""Density-evolution analysis and test-plan design.

The peeling decoder on a random pooling graph has a sharp asymptotic
threshold.  Tracking the probability that a random defective item is still
unidentified after each round gives a one-dimensional recursion; a degree
profile works at normalized load psi when the recursion, with margin delta,
contracts at every point of a fixed grid.  That feasibility region is a
polytope in the profile, so the best profile at a given load comes from a
linear program, and an outer one-dimensional search over the load yields the
smallest test budget per defective item.

All public quantities use the edge-perspective profile lambda_1..lambda_d
(lambda_1 is forced to zero: a degree-1 defective connected to no other pool
can never be peeled away by information from elsewhere, so any mass there
leaves a residual error floor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .graphs import DegreeProfile, profile_from_lambda
from .simplex import simplex_solve

DEFAULT_PHI_GRID = np.logspace(-6.0, 0.0, 500)
DE_MARGIN = 1e-3
LOAD_SCAN_START = 0.05
LOAD_SCAN_STEP = 0.02
LOAD_SCAN_CAP = 40.0
LOAD_REFINE_TOL = 1e-4
MAX_FIELD_DEGREE_Q = 20


class Infeasible(Exception):
    """No degree profile satisfies the contraction constraints."""


class OutOfRegime(ValueError):
    """Parameters outside the regime the construction supports."""


@dataclass
class DEParams:
    """Finite-size recursion parameters: capability t, defect rate, pool size."""

    t: int
    gamma: float
    r: int

    @property
    def load(self) -> float:
        return self.r * self.gamma


def _pois_upper(t: int, x):
    """P(Poisson(x) >= t) for t in 1..4, elementwise, stable near x = 0."""
    x = np.asarray(x, dtype=float)
    lower = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(t):
        if k > 0:
            term = term * x / k
        lower += term
    exact = -np.expm1(-x) if t == 1 else 1.0 - np.exp(-x) * lower
    # below 1/2 the complement cancels badly for larger t; sum the tail
    # e^{-x} sum_{k>=t} x^k/k! directly instead (30 terms are plenty there)
    xs = np.where(x < 0.5, x, 0.0)
    tail = np.zeros_like(xs)
    term = xs**t / math.factorial(t)
    for k in range(t, t + 30):
        tail += term
        term = term * xs / (k + 1)
    out = np.where(x < 0.5, np.exp(-xs) * tail, exact)
    return np.clip(out, 0.0, 1.0)


def _binom_upper(k_max: int, n: int, p: float) -> float:
    """P(Binomial(n, p) > k_max), with a direct tail sum when cancellation looms."""
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    lower = 0.0
    for k in range(k_max + 1):
        lower += math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    sv = 1.0 - lower
    if sv > 1e-6:
        return sv
    total = 0.0
    for k in range(k_max + 1, min(n, k_max + 80) + 1):
        total += math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    return total


def de_step_exact(p: float, params: DEParams, profile: DegreeProfile) -> float:
    """One round of the finite-pool-size recursion on the joint probability p.

    p is the probability that a random item is defective and still
    unidentified; the step returns the same quantity one peeling round later,
    under the usual tree-neighborhood approximation with pools of exactly r
    items.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p={p} outside [0, 1]")
    unresolved = _binom_upper(params.t - 1, params.r - 1, p)
    acc = 0.0
    for i, lam_i in enumerate(profile.lam, start=1):
        if lam_i:
            acc += lam_i * unresolved ** (i - 1)
    return params.gamma * acc


def de_step_poisson(phi: float, load: float, t: int, profile: DegreeProfile) -> float:
    """Large-pool limit of the recursion on phi = p / gamma at normalized load."""
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"phi={phi} outside [0, 1]")
    unresolved = float(_pois_upper(t, load * phi))
    acc = 0.0
    for i, lam_i in enumerate(profile.lam, start=1):
        if lam_i:
            acc += lam_i * unresolved ** (i - 1)
    return acc


def de_poisson_trajectory(profile: DegreeProfile, load: float, t: int, rounds: int):
    """Iterate the recursion from phi_0 = 1.

    Returns (phis, unidentified) where phis[j] is the edge-message value after
    round j and unidentified[j] the matching node-perspective probability that
    a defective item is still unidentified after round j, i.e. the chance that
    none of its pools has been resolved.  The latter is what a decoder run
    actually exhibits.
    """
    phis = [1.0]
    unid = [1.0]
    phi = 1.0
    for _ in range(rounds):
        q = float(_pois_upper(t, load * phi))  # P(a given pool stays unresolved)
        node = 0.0
        for i, L_i in enumerate(profile.node_probs, start=1):
            if L_i:
                node += L_i * q**i
        phi = de_step_poisson(phi, load, t, profile)
        phis.append(phi)
        unid.append(node)
    return phis, unid


def lp_optimize_profile(
    t: int,
    d: int,
    load: float,
    phi_grid=None,
    margin: float = DE_MARGIN,
) -> tuple[DegreeProfile, float]:
    """Best profile at a fixed load: min -load * sum_i lambda_i / i subject to
    one contraction constraint per grid point.

    Only a handful of grid constraints bind at the optimum, so the LP is
    solved on a growing active subset and the result is certified against the
    full grid before being returned.  Raises Infeasible when no profile
    contracts at this load.
    """
    # A pool correcting a single error cannot separate two items that share
    # both of their pools.  With M proportional to K there are order-one such
    # degree-2 collisions per instance, each of which stalls the decoder, so
    # mass on degree 2 is only usable when t >= 2.  The asymptotic recursion
    # cannot see this: it would happily mix in degree 2 at t = 1.
    lo = 3 if t == 1 else 2
    if d < lo:
        raise Infeasible(f"max degree d={d} below minimum usable degree {lo} at t={t}")
    if load <= 0:
        raise ValueError("load must be positive")
    grid = DEFAULT_PHI_GRID if phi_grid is None else np.asarray(phi_grid, dtype=float)
    unresolved = _pois_upper(t, load * grid)
    # rows scaled by 1/phi: sum_i lambda_i * u^(i-1) / phi <= 1 - margin
    powers = np.arange(lo - 1, d, dtype=float)  # i - 1 for i = lo..d
    A_full = unresolved[:, None] ** powers[None, :] / grid[:, None]
    limit = 1.0 - margin
    cost = -load / np.arange(lo, d + 1, dtype=float)
    A_eq = np.ones((1, d - lo + 1))

    active = list(dict.fromkeys([0, grid.size - 1, *range(0, grid.size, 12)]))
    for _ in range(60):
        res = simplex_solve(cost, A_ub=A_full[active], b_ub=np.full(len(active), limit), A_eq=A_eq, b_eq=[1.0])
        if res.status == "infeasible":
            raise Infeasible(f"no contracting profile at load {load:.4f} (t={t}, d={d})")
        if res.status != "optimal":
            raise RuntimeError(f"simplex returned {res.status}")
        slack = A_full @ res.x - limit
        worst = np.argsort(slack)[-4:]
        violated = [int(g) for g in worst if slack[g] > 1e-9 and g not in active]
        if not violated:
            lam = np.zeros(d)
            lam[lo - 1 :] = res.x
            return profile_from_lambda(d, lam), float(cost @ res.x)
        active.extend(violated)
    raise RuntimeError("active-set loop did not converge")


@dataclass
class DesignResult:
    """Optimized profile for one (t, d) pair.

    nodes_per_defective is the pool budget multiplier: a plan needs about
    nodes_per_defective * K pools.  trace keeps the (load, objective) pairs
    of the outer scan for inspection.
    """

    t: int
    d: int
    load: float
    profile: DegreeProfile
    objective: float
    nodes_per_defective: float
    trace: list = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "t": self.t,
            "d": self.d,
            "psi": self.load,
            "lambda": self.profile.lam.tolist(),
            "avg_left_degree": self.profile.avg_degree,
            "c": self.nodes_per_defective,
        }


def _objective_at(t, d, load):
    try:
        profile, f = lp_optimize_profile(t, d, load)
        return f, profile
    except Infeasible:
        return math.inf, None


@lru_cache(maxsize=None)
def optimize_design(t: int, d: int) -> DesignResult:
    """Scan loads coarsely, then refine the best bracket by golden section.

    The objective f(load) = -load * sum lambda_i / i is evaluated through the
    LP; infeasible loads count as +inf.  The budget multiplier is -1/f at the
    minimizer and the mean left degree is load * that multiplier.
    """
    if not 1 <= t <= 4:
        raise OutOfRegime(f"capability t={t} outside [1, 4]")
    if not 2 <= d <= 32:
        raise ValueError(f"max degree d={d} outside [2, 32]")
    if t == 1 and d < 3:
        raise Infeasible("degree-2 items stall single-error pools; need d >= 3 at t=1")
    # raising the load tightens every contraction constraint, so the feasible
    # loads form an interval starting at zero; scan until the LP gives out
    trace = []
    best_i = -1
    best_f = math.inf
    load = LOAD_SCAN_START
    loads = []
    while load <= LOAD_SCAN_CAP:
        f, _ = _objective_at(t, d, load)
        if not math.isfinite(f):
            break
        loads.append(load)
        trace.append((load, f))
        if f < best_f:
            best_f = f
            best_i = len(loads) - 1
        load = round(load + LOAD_SCAN_STEP, 10)
    if best_i < 0 or not math.isfinite(best_f):
        raise Infeasible(f"no feasible load for t={t}, d={d}")

    lo = loads[max(best_i - 1, 0)]
    hi = loads[min(best_i + 1, len(loads) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, _ = _objective_at(t, d, x1)
    f2, _ = _objective_at(t, d, x2)
    while b - a > LOAD_REFINE_TOL:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1, _ = _objective_at(t, d, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2, _ = _objective_at(t, d, x2)
    load_star = (a + b) / 2.0
    f_star, profile = _objective_at(t, d, load_star)
    if profile is None:
        # golden section collapsed onto the feasibility edge; back off to the
        # best scanned point
        load_star = float(loads[best_i])
        f_star, profile = _objective_at(t, d, load_star)
    return DesignResult(
        t=t,
        d=d,
        load=load_star,
        profile=profile,
        objective=f_star,
        nodes_per_defective=-1.0 / f_star,
        trace=trace,
    )


@dataclass
class Plan:
    """Concrete sizes for one instance, with the pre-rounding targets kept."""

    N: int
    K: int
    t: int
    d: int
    M: int
    r: int
    q: int
    s: int
    m: int
    margin: float
    pools_target: float
    pool_size_target: float

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "N": self.N,
            "K": self.K,
            "t": self.t,
            "d": self.d,
            "M": self.M,
            "r": self.r,
            "q": self.q,
            "s": self.s,
            "m": self.m,
            "margin": self.margin,
            "pools_target": self.pools_target,
            "pool_size_target": self.pool_size_target,
        }


def make_plan(N: int, K: int, design: DesignResult, margin: float = 1.0) -> Plan:
    """Round the asymptotic design to integer sizes for (N, K).

    margin scales the pool count above the asymptotic minimum; the pool size
    follows from edge balance and is capped at floor(N*d/M) so that the left
    degrees, which never exceed d, can supply M*r edge stubs.
    """
    if not 1 <= K < N:
        raise ValueError(f"need 1 <= K < N, got K={K}, N={N}")
    if margin < 1.0:
        raise ValueError("margin below 1 undercuts the designed budget")
    c = design.nodes_per_defective
    ell = design.profile.avg_degree
    pools_target = margin * c * K
    M = math.ceil(pools_target)
    pool_size_target = ell * N / (c * K * margin)
    r = min(round(pool_size_target), N * design.d // M, N)
    r = max(r, 3)
    if M * r > N * design.d or r > N:
        raise OutOfRegime(
            f"K={K} too close to N={N}: no feasible pool size (wanted r={r}, M={M})"
        )
    q = r.bit_length()
    if q > MAX_FIELD_DEGREE_Q:
        raise OutOfRegime(f"pool size r={r} needs field degree {q} > {MAX_FIELD_DEGREE_Q}")
    s = design.t * q + 1
    return Plan(
        N=N,
        K=K,
        t=design.t,
        d=design.d,
        M=M,
        r=r,
        q=q,
        s=s,
        m=M * s,
        margin=margin,
        pools_target=pools_target,
        pool_size_target=pool_size_target,
    )


def proposed_tests(N: float, K: float, design: DesignResult) -> float:
    """Closed-form test count c*K*(t*log2(ell*N/(c*K) + 1) + 1), un-rounded."""
    c = design.nodes_per_defective
    ell = design.profile.avg_degree
    return c * K * (design.t * math.log2(ell * N / (c * K) + 1.0) + 1.0)


def baseline_tests(scheme: str, N: float, K: float) -> float:
    """Test counts of the two reference non-adaptive schemes."""
    if not 1 < K < N:
        raise ValueError(f"need 1 < K < N, got K={K}, N={N}")
    if scheme == "regular-graph":
        return 1.19 * K * math.log2(4.74 * N / K)
    if scheme == "greedy":
        theta = math.log(K) / math.log(N)
        root = math.sqrt(theta)
        if 1.0 - root < 1e-6:
            raise OutOfRegime("greedy baseline diverges as K approaches N")
        return (1.0 + root) / (1.0 - root) * K * math.log(N / K)
    raise ValueError(f"unknown scheme {scheme!r}")
