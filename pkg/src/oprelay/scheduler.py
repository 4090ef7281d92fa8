"""Both hops of the decentralized opportunistic relaying protocol.

Phase 1: every relay independently feeds back the index of its strongest
source; the distinct scheduled sources transmit at once and a link succeeds
when its SINR, with all other scheduled sources as interference, clears
``beta``.

Phase 2: every destination evaluates, for each relay, the SINR it would see if
that relay were the sender and all other relays interfered, and feeds back the
relay index that clears ``beta`` (at most one can when ``beta >= 1``). A relay
with several feedbacks serves one of them uniformly at random.

Index-valued fields use ``-1`` for "absent".
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import RngSpec

ARGMAX = "argmax"
THRESHOLD = "threshold"
DISTINCT = "distinct"
PER_LINK = "per-link"


@dataclass
class PhaseOneSchedule:
    chosen_source: np.ndarray  # length m, -1 where the relay declined
    scheduled_set: np.ndarray  # sorted distinct sources (the set K)
    mode: str = ARGMAX
    s_threshold: float = 0.0

    @property
    def feedback_count(self) -> int:
        return int(np.count_nonzero(self.chosen_source >= 0))


@dataclass
class PhaseTwoSchedule:
    feedback: np.ndarray  # length n, relay fed back by destination j or -1
    chosen_destination: np.ndarray  # length m, destination served by relay k or -1
    feedback_sinr: np.ndarray  # length n, SINR of the fed back link (nan if none)
    n_qualifying: np.ndarray  # length n, relays whose SINR cleared beta
    beta: float = 1.0

    @property
    def transmitting_set(self) -> np.ndarray:
        return np.flatnonzero(self.chosen_destination >= 0)

    @property
    def feedback_count(self) -> int:
        return int(np.count_nonzero(self.feedback >= 0))


@dataclass
class SlotOutcome:
    """Result of one hop in one slot.

    ``links`` rows are ``(source, relay)`` for hop 1 and ``(relay, destination)``
    for hop 2. ``sinr`` holds the scheduling-time SINR of each link; for hop 2
    ``realized_sinr`` recomputes it with only the transmitting relays as
    interferers.
    """

    hop: int
    bits_delivered: int
    links: np.ndarray
    sinr: np.ndarray
    success: np.ndarray
    feedback_count: int
    counting: str = DISTINCT
    realized_sinr: np.ndarray | None = None
    uniqueness_violations: int = 0
    max_qualifying: int = 0
    flags: list = field(default_factory=list)

    @property
    def successes(self) -> set:
        return {tuple(int(v) for v in row) for row in self.links[self.success]}

    @property
    def sinr_values(self) -> dict:
        return {tuple(int(v) for v in row): float(s) for row, s in zip(self.links, self.sinr)}

    @property
    def successful_links(self) -> int:
        return int(np.count_nonzero(self.success))

    @property
    def distinct_successes(self) -> int:
        if self.hop != 1:
            return self.successful_links
        return int(np.unique(self.links[self.success, 0]).size)


def schedule_phase1(gamma, mode: str = ARGMAX, s_threshold: float = 0.0) -> PhaseOneSchedule:
    """Each relay picks its strongest source (lowest index on ties).

    In threshold mode a relay schedules nothing unless that gain exceeds
    ``s_threshold``.
    """
    gamma = np.asarray(gamma, dtype=float)
    if mode not in (ARGMAX, THRESHOLD):
        raise ValueError(f"unknown phase-1 mode {mode!r}")
    if mode == THRESHOLD and not s_threshold >= 0:
        raise ValueError(f"threshold mode needs s_threshold >= 0, got {s_threshold}")
    m = gamma.shape[1]
    chosen = np.argmax(gamma, axis=0)
    if mode == THRESHOLD:
        best = gamma[chosen, np.arange(m)]
        chosen = np.where(best > s_threshold, chosen, -1)
    scheduled = np.unique(chosen[chosen >= 0])
    return PhaseOneSchedule(chosen, scheduled, mode, float(s_threshold))


def sinr_phase1(gamma, K, i: int, r: int, rho: float) -> float:
    """SINR of source ``i`` at relay ``r`` when every source in ``K`` transmits."""
    gamma = np.asarray(gamma, dtype=float)
    K = sorted(int(t) for t in K)
    if i not in K:
        raise ValueError(f"source {i} is not in the scheduled set {K}")
    interference = sum(float(gamma[t, r]) for t in K if t != i)
    return float(gamma[i, r]) / (1.0 / rho + interference)


def _phase1_link_sinr(gamma, schedule: PhaseOneSchedule, rho: float):
    relays = np.flatnonzero(schedule.chosen_source >= 0)
    sources = schedule.chosen_source[relays]
    if relays.size == 0:
        return sources, relays, np.empty(0)
    sub = gamma[schedule.scheduled_set][:, relays]  # |K| x (#active relays)
    rows = np.searchsorted(schedule.scheduled_set, sources)
    masked = sub.copy()
    masked[rows, np.arange(relays.size)] = 0.0
    signal = gamma[sources, relays]
    return sources, relays, signal / (1.0 / rho + masked.sum(axis=0))


def evaluate_phase1(schedule: PhaseOneSchedule, gamma, rho: float, beta: float = 1.0,
                    counting: str = DISTINCT) -> SlotOutcome:
    """Success per scheduled (source, relay) link and the bits it delivers.

    With ``counting="distinct"`` a source decoded by several relays still
    delivers one packet; ``"per-link"`` credits every successful link.
    """
    if counting not in (DISTINCT, PER_LINK):
        raise ValueError(f"unknown hop-1 counting {counting!r}")
    gamma = np.asarray(gamma, dtype=float)
    sources, relays, sinr = _phase1_link_sinr(gamma, schedule, rho)
    success = sinr >= beta
    if counting == DISTINCT:
        bits = int(np.unique(sources[success]).size)
    else:
        bits = int(np.count_nonzero(success))
    return SlotOutcome(
        hop=1,
        bits_delivered=bits,
        links=np.column_stack([sources, relays]).astype(int),
        sinr=sinr,
        success=success,
        feedback_count=schedule.feedback_count,
        counting=counting,
    )


def _as_generator(rng, sub: int) -> np.random.Generator:
    if isinstance(rng, RngSpec):
        return rng.generator(sub)
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _sum_excluding(cols: np.ndarray, rows: np.ndarray) -> np.ndarray:
    # Zero-and-sum rather than total-minus-self: floating addition is monotone,
    # so zeroing more terms in the same layout can never increase the result.
    masked = cols.copy()
    masked[rows, np.arange(cols.shape[1])] = 0.0
    return masked.sum(axis=0)


def schedule_phase2(xi, rho_R: float, beta: float = 1.0, rng=None) -> PhaseTwoSchedule:
    """Destination feedback and per-relay destination choice for hop 2."""
    xi = np.asarray(xi, dtype=float)
    m, n = xi.shape
    if beta < 1:
        warnings.warn("beta < 1: a destination may see several qualifying relays; "
                      "the strongest one is fed back", stacklevel=2)
    cols = np.arange(n)
    best = np.argmax(xi, axis=0)
    best_sinr = xi[best, cols] / (1.0 / rho_R + _sum_excluding(xi, best))

    # Diagnostic only: how many relays clear beta at each destination.
    all_sinr = xi / (1.0 / rho_R + (xi.sum(axis=0) - xi))
    n_qualifying = np.count_nonzero(all_sinr >= beta, axis=0)
    n_qualifying = np.where(best_sinr >= beta, np.maximum(n_qualifying, 1), n_qualifying)

    feedback = np.where(best_sinr >= beta, best, -1)
    feedback_sinr = np.where(feedback >= 0, best_sinr, np.nan)

    chosen = np.full(m, -1, dtype=int)
    fed = np.flatnonzero(feedback >= 0)
    if fed.size:
        keys = _as_generator(rng, 1).random(n)
        order = fed[np.argsort(keys[fed], kind="stable")]
        relays, first = np.unique(feedback[order], return_index=True)
        chosen[relays] = order[first]
    return PhaseTwoSchedule(feedback, chosen, feedback_sinr, n_qualifying, float(beta))


def evaluate_phase2(schedule: PhaseTwoSchedule, xi, rho_R: float, beta: float = 1.0) -> SlotOutcome:
    """Bits delivered in hop 2 (one per transmitting relay).

    Each scheduled link's SINR is recomputed twice: against all other relays
    (the destination's scheduling view) and against only the relays that
    actually transmit. Realized SINR below either the scheduling view or
    ``beta`` would mean the scheduler is broken, so it raises.
    """
    xi = np.asarray(xi, dtype=float)
    relays = schedule.transmitting_set
    dests = schedule.chosen_destination[relays]
    flags = ["beta<1: uniqueness not guaranteed"] if beta < 1 else []
    if relays.size == 0:
        empty = np.empty(0)
        return SlotOutcome(2, 0, np.empty((0, 2), dtype=int), empty, np.empty(0, dtype=bool),
                           schedule.feedback_count, realized_sinr=empty,
                           uniqueness_violations=int(np.count_nonzero(schedule.n_qualifying > 1)),
                           max_qualifying=int(schedule.n_qualifying.max(initial=0)),
                           flags=flags)
    cols = xi[:, dests]
    noise = 1.0 / rho_R
    signal = xi[relays, dests]
    assumed = signal / (noise + _sum_excluding(cols, relays))
    silent = np.ones(xi.shape[0], dtype=bool)
    silent[relays] = False
    realized = signal / (noise + _sum_excluding(np.where(silent[:, None], 0.0, cols), relays))
    if np.any(realized < assumed) or np.any(assumed < beta):
        raise RuntimeError("hop-2 link scheduled below its SINR threshold: "
                           f"assumed={assumed}, realized={realized}, beta={beta}")
    return SlotOutcome(
        hop=2,
        bits_delivered=int(relays.size),
        links=np.column_stack([relays, dests]).astype(int),
        sinr=assumed,
        success=np.ones(relays.size, dtype=bool),
        feedback_count=schedule.feedback_count,
        realized_sinr=realized,
        uniqueness_violations=int(np.count_nonzero(schedule.n_qualifying > 1)),
        max_qualifying=int(schedule.n_qualifying.max(initial=0)),
        flags=flags,
    )
