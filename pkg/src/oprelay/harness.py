"""Monte Carlo engine: single cells, optimization over the relay count, and
sweeps over the number of S-D pairs.

Trial ``t`` draws its gains from ``RngSpec(seed, t)``, so results do not depend
on how trials are split across workers. Per-trial outputs are stored by trial
index and reduced in index order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import analytics
from .channel import RngSpec, draw_realization
from .scheduler import (ARGMAX, DISTINCT, PER_LINK, THRESHOLD, SlotOutcome, evaluate_phase1,
                        evaluate_phase2, schedule_phase1, schedule_phase2)

DEFAULT_TRIALS = 2000
DEFAULT_SNR_DB = 10.0

SWEEP_COLUMNS = ["n", "m_star", "r1_mean", "r1_stderr", "r2_mean", "r2_stderr", "r_mean",
                 "r1_lower_half", "genie_upper_half", "r2_closed", "coop_upper_half",
                 "fb_bits_hop1", "fb_bits_hop2", "trials", "seed"]


@dataclass(frozen=True)
class SimConfig:
    n: int
    m: int
    snr1_db: float = DEFAULT_SNR_DB
    snr2_db: float = DEFAULT_SNR_DB
    beta: float = 1.0
    trials: int = DEFAULT_TRIALS
    mode: str = ARGMAX
    s: float | None = None
    master_seed: int = 0
    hop1_counting: str = DISTINCT

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"need n, m >= 1, got n={self.n}, m={self.m}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.mode not in (ARGMAX, THRESHOLD):
            raise ValueError(f"mode must be {ARGMAX!r} or {THRESHOLD!r}")
        if self.hop1_counting not in (DISTINCT, PER_LINK):
            raise ValueError(f"hop1_counting must be {DISTINCT!r} or {PER_LINK!r}")
        if self.mode == THRESHOLD and self.s is None and self.n < 3:
            raise ValueError("threshold mode with the default s needs n >= 3")

    @property
    def rho(self) -> float:
        return analytics.db_to_linear(self.snr1_db)

    @property
    def rho_R(self) -> float:
        return analytics.db_to_linear(self.snr2_db)

    @property
    def threshold(self) -> float:
        """Scheduling threshold for threshold mode and for the hop-1 bound."""
        if self.s is not None:
            return float(self.s)
        return analytics.default_threshold(self.n) if self.n >= 3 else math.nan


@dataclass
class ExperimentRecord:
    n: int
    m: int
    snr1_db: float
    snr2_db: float
    beta: float
    trials: int
    mode: str
    s: float
    seed: int
    hop1_counting: str
    r1_mean: float
    r1_stderr: float | None
    r2_mean: float
    r2_stderr: float | None
    r_mean: float
    r1_lower_half: float
    r2_closed: float
    genie_upper_half: float
    coop_upper_half: float
    fb_bits_hop1: float
    fb_bits_hop2: float
    full_schedule_fraction: float  # trials with |K| = m
    max_qualifying_relays: int  # most relays clearing beta at one destination
    hop2_uniqueness_violations: int
    hop2_min_sinr_ratio: float  # min over scheduled links of realized / scheduling-time SINR
    hop2_min_sinr: float

    def to_dict(self) -> dict:
        return asdict(self)


def run_trial(config: SimConfig, trial_index: int) -> tuple[SlotOutcome, SlotOutcome]:
    """One fading block per hop. Gains for the two hops are independent draws.

    The trial's single stream supplies the S-R gains, then the R-D gains, then
    the hop-2 tie-break keys.
    """
    gen = RngSpec(config.master_seed, trial_index).generator(0)
    ch = draw_realization(config.n, config.m, gen)
    s = config.threshold if config.mode == THRESHOLD else 0.0
    sched1 = schedule_phase1(ch.gamma, config.mode, s)
    hop1 = evaluate_phase1(sched1, ch.gamma, config.rho, config.beta, config.hop1_counting)
    sched2 = schedule_phase2(ch.xi, config.rho_R, config.beta, gen)
    hop2 = evaluate_phase2(sched2, ch.xi, config.rho_R, config.beta)
    return hop1, hop2


# per-trial columns: hop1 bits, hop2 bits, |K|, fb bits hop1, fb bits hop2,
# max feedbacks per destination, uniqueness violations, min sinr ratio, min sinr
_N_COLS = 9


def _trial_row(config: SimConfig, t: int) -> np.ndarray:
    hop1, hop2 = run_trial(config, t)
    fb = analytics.feedback_overhead(config.n, config.m, hop2.feedback_count, hop1.feedback_count)
    if hop2.bits_delivered:
        ratio = float(np.min(hop2.realized_sinr / hop2.sinr))
        low = float(np.min(hop2.sinr))
    else:
        ratio = low = math.inf
    k_size = np.unique(hop1.links[:, 0]).size
    return np.array([hop1.bits_delivered, hop2.bits_delivered, k_size, fb.hop1_bits,
                     fb.hop2_bits, hop2.max_qualifying, hop2.uniqueness_violations, ratio, low])


def _run_rows(config: SimConfig, workers: int) -> np.ndarray:
    rows = np.empty((config.trials, _N_COLS))
    if workers <= 1:
        for t in range(config.trials):
            rows[t] = _trial_row(config, t)
        return rows
    chunks = np.array_split(np.arange(config.trials), workers)

    def work(idx):
        return idx, np.array([_trial_row(config, int(t)) for t in idx]).reshape(-1, _N_COLS)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for idx, block in pool.map(work, chunks):
            rows[idx] = block
    return rows


def _stderr(x: np.ndarray) -> float | None:
    if x.size < 2:
        return None
    return float(x.std(ddof=1) / math.sqrt(x.size))


def run_experiment(config: SimConfig, workers: int = 1) -> ExperimentRecord:
    """Average ``config.trials`` slots and attach the analytic curves.

    ``r_mean`` is half the smaller of the two hop means (buffering at the
    relays decouples the hops), not the mean of per-slot minima.
    """
    rows = _run_rows(config, workers)
    r1, r2 = rows[:, 0], rows[:, 1]
    bounds = analytics.bound_record(config.n, config.m, config.rho, config.rho_R,
                                    config.threshold)
    r1_mean, r2_mean = float(r1.mean()), float(r2.mean())
    return ExperimentRecord(
        n=config.n, m=config.m, snr1_db=config.snr1_db, snr2_db=config.snr2_db,
        beta=config.beta, trials=config.trials, mode=config.mode, s=config.threshold,
        seed=config.master_seed, hop1_counting=config.hop1_counting,
        r1_mean=r1_mean, r1_stderr=_stderr(r1),
        r2_mean=r2_mean, r2_stderr=_stderr(r2),
        r_mean=min(r1_mean, r2_mean) / 2,
        r1_lower_half=bounds.r1_lower / 2,
        r2_closed=bounds.r2_exact,
        genie_upper_half=bounds.genie_upper / 2,
        coop_upper_half=bounds.coop_upper / 2,
        fb_bits_hop1=float(rows[:, 3].mean()),
        fb_bits_hop2=float(rows[:, 4].mean()),
        full_schedule_fraction=float(np.mean(rows[:, 2] == config.m)),
        max_qualifying_relays=int(rows[:, 5].max()),
        hop2_uniqueness_violations=int(rows[:, 6].sum()),
        hop2_min_sinr_ratio=float(rows[:, 7].min()),
        hop2_min_sinr=float(rows[:, 8].min()),
    )


def default_m_grid(n: int) -> list[int]:
    """``1 .. ceil(3 log n)``, widened if needed to cover the hop-2 relay count hint."""
    top = max(1, math.ceil(3 * math.log(n))) if n > 1 else 1
    if n >= 3:
        top = max(top, round(analytics.optimal_m_phase2(n, analytics.db_to_linear(DEFAULT_SNR_DB))) + 3)
    return list(range(1, top + 1))


def scan_m(n: int, m_grid=None, workers: int = 1, **config_kw) -> list[ExperimentRecord]:
    grid = default_m_grid(n) if m_grid is None else sorted(set(int(m) for m in m_grid))
    if not grid:
        raise ValueError("m_grid must be nonempty")
    return [run_experiment(SimConfig(n=n, m=m, **config_kw), workers) for m in grid]


def best_of(records: list[ExperimentRecord]) -> ExperimentRecord:
    """Largest ``r_mean``; ties go to the smaller m."""
    best = records[0]
    for rec in records[1:]:
        if rec.r_mean > best.r_mean or (rec.r_mean == best.r_mean and rec.m < best.m):
            best = rec
    return best


def optimize_m(n: int, snr1_db: float = DEFAULT_SNR_DB, snr2_db: float = DEFAULT_SNR_DB,
               beta: float = 1.0, trials: int = DEFAULT_TRIALS, m_grid=None, seed: int = 0,
               workers: int = 1, **config_kw) -> tuple[int, ExperimentRecord]:
    """Grid search over the relay count for the best end-to-end rate."""
    records = scan_m(n, m_grid, workers, snr1_db=snr1_db, snr2_db=snr2_db, beta=beta,
                     trials=trials, master_seed=seed, **config_kw)
    best = best_of(records)
    return best.m, best


def sweep_scans(n_list, snr1_db: float = DEFAULT_SNR_DB, snr2_db: float = DEFAULT_SNR_DB,
                beta: float = 1.0, trials: int = DEFAULT_TRIALS, seed: int = 0, workers: int = 1,
                m_grid=None, **config_kw) -> list[list[ExperimentRecord]]:
    """Every (n, m) cell of a sweep, one list of records per n."""
    scans = []
    for n in n_list:
        if n < 3:
            raise ValueError(f"sweep needs every n >= 3, got {n}")
        scans.append(scan_m(n, m_grid, workers, snr1_db=snr1_db, snr2_db=snr2_db, beta=beta,
                            trials=trials, master_seed=seed, **config_kw))
    return scans


def sweep_n(n_list, snr1_db: float = DEFAULT_SNR_DB, snr2_db: float = DEFAULT_SNR_DB,
            beta: float = 1.0, trials: int = DEFAULT_TRIALS, seed: int = 0, workers: int = 1,
            m_grid=None, **config_kw) -> list[ExperimentRecord]:
    """Throughput versus n, each point optimized over m, with analytic curves."""
    scans = sweep_scans(n_list, snr1_db, snr2_db, beta, trials, seed, workers, m_grid, **config_kw)
    return [best_of(s) for s in scans]


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def sweep_row(rec: ExperimentRecord) -> dict:
    d = rec.to_dict()
    d["m_star"] = rec.m
    return {k: d[k] for k in SWEEP_COLUMNS}


def records_to_csv(rows: list[dict], columns=None) -> str:
    if not rows:
        return ""
    columns = list(rows[0]) if columns is None else columns
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def sweep_csv(records: list[ExperimentRecord]) -> str:
    return records_to_csv([sweep_row(r) for r in records], SWEEP_COLUMNS)


def records_to_json(rows: list[dict]) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        return v
    return json.dumps([{k: clean(v) for k, v in r.items()} for r in rows], indent=2) + "\n"


RECORD_COLUMNS = [f.name for f in fields(ExperimentRecord)]
