"""Full-CSI genie for hop 1: the largest set of concurrently successful
source-to-relay links over all source subsets and injective assignments.

Every source in the candidate set transmits, so the interference seen at a
relay depends only on the set, not on the assignment. Sums use ``math.fsum``
(correctly rounded), which makes "adding a source never raises a SINR" hold
exactly in floating point; both searches share that arithmetic and therefore
agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from .channel import RngSpec, draw_realization
from .scheduler import PER_LINK, evaluate_phase1, schedule_phase1

EXHAUSTIVE_MAX_N = 14
EXHAUSTIVE_MAX_M = 5
DEFAULT_NODE_BUDGET = 2_000_000


@dataclass
class GenieResult:
    k_max: int
    witness: dict = field(default_factory=dict)  # source -> relay
    nodes_explored: int = 0
    exact: bool = True

    @property
    def source_set(self) -> tuple:
        return tuple(sorted(self.witness))


def _link_ok(gamma, S, i, r, rho, beta) -> bool:
    interference = math.fsum(gamma[t][r] for t in S if t != i)
    return gamma[i][r] / (1.0 / rho + interference) >= beta


def verify_witness(gamma, witness: dict, rho: float, beta: float = 1.0) -> bool:
    """Recompute every assigned link's SINR with the witness's sources transmitting."""
    g = np.asarray(gamma, dtype=float).tolist()
    relays = list(witness.values())
    if len(set(relays)) != len(relays):
        return False
    S = sorted(witness)
    return all(_link_ok(g, S, i, r, rho, beta) for i, r in witness.items())


def max_concurrent_exhaustive(gamma, rho: float, beta: float = 1.0) -> GenieResult:
    """Enumerate every source subset and every injective relay assignment.

    The witness is the lexicographically smallest (source set, relay tuple)
    among the maxima. Limited to n <= 14, m <= 5.
    """
    gamma = np.asarray(gamma, dtype=float)
    n, m = gamma.shape
    if n > EXHAUSTIVE_MAX_N or m > EXHAUSTIVE_MAX_M:
        raise ValueError(f"exhaustive genie search is limited to n <= {EXHAUSTIVE_MAX_N}, "
                         f"m <= {EXHAUSTIVE_MAX_M}; got n={n}, m={m} (use max_concurrent_bnb)")
    g = gamma.tolist()
    best = GenieResult(0)
    nodes = 0
    for k in range(1, min(n, m) + 1):
        found = None
        for S in combinations(range(n), k):
            ok = [[_link_ok(g, S, i, r, rho, beta) for r in range(m)] for i in S]
            for relays in permutations(range(m), k):
                nodes += 1
                if found is None and all(ok[a][r] for a, r in enumerate(relays)):
                    found = dict(zip(S, relays))
        if found is not None:
            best = GenieResult(k, found)
    best.nodes_explored = nodes
    return best


def max_concurrent_bnb(gamma, rho: float, beta: float = 1.0,
                       node_budget: int = DEFAULT_NODE_BUDGET) -> GenieResult:
    """Depth-first branch and bound over sources in index order.

    At each source the search either assigns it to a free relay or skips it.
    A partial assignment is dropped as soon as any assigned link fails under
    the interference of the sources chosen so far (more sources only add
    interference), or when the sources left cannot beat the incumbent. If the
    node budget runs out the incumbent is returned with ``exact=False``.
    """
    gamma = np.asarray(gamma, dtype=float)
    n, m = gamma.shape
    g = gamma.tolist()
    cap = min(n, m)
    inv_rho = 1.0 / rho
    # A source whose best link fails alone can never take part.
    usable = [i for i in range(n) if max(g[i]) / inv_rho >= beta]

    best = {"k": 0, "w": {}}
    state = {"nodes": 0, "exhausted": False}
    assign: dict = {}
    used = [False] * m

    def feasible(S):
        return all(_link_ok(g, S, i, r, rho, beta) for i, r in assign.items())

    def dfs(pos):
        if state["exhausted"]:
            return
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            state["exhausted"] = True
            return
        k = len(assign)
        if k > best["k"]:
            best["k"], best["w"] = k, dict(assign)
            if k == cap:
                return
        if k + min(len(usable) - pos, m - k) <= best["k"]:
            return
        if pos == len(usable):
            return
        i = usable[pos]
        S = sorted(assign) + [i]
        for r in range(m):
            if used[r] or not _link_ok(g, S, i, r, rho, beta):
                continue
            assign[i] = r
            used[r] = True
            if feasible(S):
                dfs(pos + 1)
            used[r] = False
            del assign[i]
            if best["k"] == cap:
                return
        dfs(pos + 1)

    dfs(0)
    return GenieResult(best["k"], best["w"], state["nodes"], exact=not state["exhausted"])


def max_concurrent(gamma, rho: float, beta: float = 1.0, method: str = "bnb", **kw) -> GenieResult:
    if method == "exhaustive":
        return max_concurrent_exhaustive(gamma, rho, beta)
    if method == "bnb":
        return max_concurrent_bnb(gamma, rho, beta, **kw)
    raise ValueError(f"unknown genie method {method!r}")


@dataclass
class GenieMC:
    mean: float
    stderr: float | None
    opportunistic_mean: float  # distinct-source convention
    k_max: np.ndarray
    opportunistic: np.ndarray
    opportunistic_per_link: np.ndarray
    exact: bool


def genie_throughput_mc(n: int, m: int, rho: float, beta: float, trials: int, seed: int = 0,
                        method: str = "bnb") -> GenieMC:
    """Average genie count over fresh realizations.

    Trial ``t`` uses the same gains as the simulator's trial ``t`` for the same
    seed, and the opportunistic hop-1 success count on those gains is
    recorded alongside for paired comparison under both hop-1 counting
    conventions.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k = np.empty(trials)
    opp = np.empty(trials)
    opp_links = np.empty(trials)
    exact = True
    for t in range(trials):
        gamma = draw_realization(n, m, RngSpec(seed, t)).gamma
        res = max_concurrent(gamma, rho, beta, method)
        exact &= res.exact
        k[t] = res.k_max
        out = evaluate_phase1(schedule_phase1(gamma), gamma, rho, beta, PER_LINK)
        opp[t] = out.distinct_successes
        opp_links[t] = out.successful_links
    stderr = float(k.std(ddof=1) / math.sqrt(trials)) if trials > 1 else None
    return GenieMC(float(k.mean()), stderr, float(opp.mean()), k, opp, opp_links, exact)
