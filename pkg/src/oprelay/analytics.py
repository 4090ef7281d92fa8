"""Closed-form probabilities, throughput bounds and scaling predictors.

All SNRs are linear. Per-hop quantities (genie counts, cooperative bound) are
returned un-halved; the harness halves them when plotting against the
end-to-end rate ``R = min(R1, R2) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

FINITE_SUM_MAX_M = 64


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def prob_exactly_m_distinct(n: int, m: int) -> float:
    """Probability that ``m`` relays pick ``m`` distinct best sources out of ``n``.

    Every source is equally likely to be a given relay's best, so this is
    ``n (n-1) ... (n-m+1) / n**m``.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    p = 1.0
    for k in range(m):
        p *= (n - k) / n
    return p


def cdf_max_exp(x, n: int):
    """CDF of the maximum of ``n`` i.i.d. Exp(1) variables, ``(1 - e^-x)^n``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, -np.expm1(-np.clip(x, 0, None)), 0.0) ** n
    return out.item() if out.ndim == 0 else out


def cdf_interference(y, m: int):
    """CDF of the aggregate interference from ``m - 1`` unit-mean exponentials.

    ``F_Y(y) = 1 - e^-y * sum_{k=0}^{m-2} y^k / k!``, i.e. the Gamma(m-1, 1)
    CDF. ``m = 1`` means no interferers, a unit step at 0. The finite sum runs
    on the recurrence ``t_{k+1} = t_k * y / (k+1)`` starting from ``e^-y``;
    above ``m = 64`` it defers to the regularized incomplete gamma.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    y = np.asarray(y, dtype=float)
    if m == 1:
        out = np.where(y >= 0, 1.0, 0.0)
    elif m > FINITE_SUM_MAX_M:
        out = np.where(y > 0, special.gammainc(m - 1, np.clip(y, 0, None)), 0.0)
    else:
        yc = np.clip(y, 0, None)
        term = np.exp(-yc)
        tail = term.copy()
        for k in range(m - 2):
            term = term * yc / (k + 1)
            tail = tail + term
        out = np.where(y > 0, np.clip(1.0 - tail, 0.0, 1.0), 0.0)
    return out.item() if out.ndim == 0 else out


def gaussian_approx_fy(y, m: int):
    """Normal surrogate for the interference CDF, mean = variance = ``m - 1``."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    out = stats.norm.cdf(np.asarray(y, dtype=float), loc=m - 1, scale=math.sqrt(m - 1))
    return out.item() if np.ndim(out) == 0 else out


def default_threshold(n: int) -> float:
    """Scheduling threshold ``log n - log log n``."""
    if n < 3:
        raise ValueError(f"default threshold needs n >= 3, got {n}")
    return math.log(n) - math.log(math.log(n))


def r1_lower_bound(n: int, m: int, rho: float, s: float) -> float:
    """Hop-1 throughput lower bound.

    Credits only the event that all ``m`` relays pick distinct sources, each
    best gain clears ``s``, and the interference stays below ``s - 1/rho``.
    """
    if not 1 <= m < n:
        raise ValueError(f"the hop-1 lower bound needs 1 <= m < n, got n={n}, m={m}")
    if not s > 0 or not rho > 0:
        raise ValueError(f"need s > 0 and rho > 0, got s={s}, rho={rho}")
    above = 1.0 - cdf_max_exp(s, n)
    return m * prob_exactly_m_distinct(n, m) * above * cdf_interference(s - 1.0 / rho, m)


def p_dest_success(m: int, rho_R: float) -> float:
    """Probability a destination's SINR toward one given relay clears 1.

    Exact for Exp(1) gains: ``P(xi_k >= 1/rho_R + sum of m-1 others)``
    ``= e^{-1/rho_R} / 2^{m-1}``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return math.exp(-1.0 / rho_R) / 2.0 ** (m - 1)


def r2_closed_form(n: int, m: int, rho_R: float) -> float:
    """Mean hop-2 throughput: ``m`` times the chance a relay gets any feedback."""
    if n < 1 or m < 1 or not rho_R > 0:
        raise ValueError(f"need n, m >= 1 and rho_R > 0, got n={n}, m={m}, rho_R={rho_R}")
    p = p_dest_success(m, rho_R)
    if p >= 1.0:
        return float(m)
    # 1 - (1-p)^n evaluated as -expm1(n log1p(-p)) to keep precision near 0 and 1.
    return m * -math.expm1(n * math.log1p(-p))


def r2_variance(n: int, m: int, rho_R: float) -> float:
    """Variance of the hop-2 bits delivered in one slot.

    With beta = 1 each destination feeds back relay ``r`` with probability
    ``p`` and at most one relay, independently of the other destinations, so
    the number of relays hearing any feedback is an occupancy count. With
    ``a = (1-p)^n`` and ``b = (1-2p)^n`` the variance is
    ``m a (1-a) + m (m-1) (b - a^2)``.
    """
    if n < 1 or m < 1 or not rho_R > 0:
        raise ValueError(f"need n, m >= 1 and rho_R > 0, got n={n}, m={m}, rho_R={rho_R}")
    p = p_dest_success(m, rho_R)
    if p >= 1.0:
        return 0.0
    log_a = n * math.log1p(-p)
    a = math.exp(log_a)
    var = m * a * -math.expm1(log_a)
    if m > 1:
        # b - a^2, written to survive a and b both being tiny
        if 2 * p >= 1.0:
            cov = -a * a
        else:
            cov = a * a * math.expm1(n * (math.log1p(-2 * p) - 2 * math.log1p(-p)))
        var += m * (m - 1) * cov
    return max(var, 0.0)


def genie_upper(n: int) -> float:
    """Per-hop count of concurrent successes no scheduler can reach w.h.p."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return math.log(n) / math.log(2) + 2


def genie_lower(n: int, eps: float) -> float:
    """Per-hop count of concurrent successes the genie finds w.h.p."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    return (1 - eps) * math.log(n) / (2 * math.log(2)) + 2


def coop_upper(n: int, m: int) -> float:
    """Cooperative full-CSI sum-rate reference curve ``(m/2) log log n``."""
    if n < 3:
        raise ValueError(f"coop_upper needs n >= 3, got {n}")
    return m / 2 * math.log(math.log(n))


def optimal_m_phase2(n: float, rho_R: float) -> float:
    """Real-valued relay count at which hop 2 still scales linearly in m."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return (math.log(n) - math.log(math.log(n)) - 1.0 / rho_R) / math.log(2) + 1


def index_bits(count: int) -> int:
    """Bits needed to send one index out of ``count``."""
    return max(int(count) - 1, 0).bit_length()


@dataclass(frozen=True)
class FeedbackOverhead:
    hop1_bits: int
    hop2_bits: int
    hop1_order: str = "Theta((log n)^2)"
    hop2_order: str = "Theta(log n * log log n)"
    hop1_predictor: float = float("nan")
    hop2_predictor: float = float("nan")


def feedback_overhead(n: int, m: int, feedback_count: int, hop1_feedbacks: int | None = None) -> FeedbackOverhead:
    """Feedback bits per fading block.

    Hop 1 sends one source index per relay (``hop1_feedbacks`` overrides the
    count when threshold scheduling silences some relays). Hop 2 sends one
    relay index per destination that found a good relay. The predictors are
    ``(log n)^2`` and ``log n * log log n``, the growth orders when the relay
    count is of order ``log n``.
    """
    if not 0 <= feedback_count <= n:
        raise ValueError(f"feedback_count must be in [0, n], got {feedback_count}")
    relays = m if hop1_feedbacks is None else hop1_feedbacks
    ln = math.log(n) if n > 1 else 0.0
    return FeedbackOverhead(
        hop1_bits=relays * index_bits(n),
        hop2_bits=feedback_count * index_bits(m),
        hop1_predictor=ln ** 2,
        hop2_predictor=ln * math.log(ln) if ln > 1 else float("nan"),
    )


@dataclass(frozen=True)
class BoundRecord:
    n: int
    m: int
    rho: float
    rho_R: float
    s: float
    r1_lower: float
    r2_exact: float
    genie_upper: float
    coop_upper: float

    def __post_init__(self):
        if self.r1_lower > self.m or self.r2_exact > self.m:
            raise ValueError("a hop cannot deliver more than m bits/s/Hz")


def bound_record(n: int, m: int, rho: float, rho_R: float, s: float | None = None) -> BoundRecord:
    """Every analytic curve for one (n, m, SNR) cell; NaN where undefined."""
    if s is None:
        s = default_threshold(n) if n >= 3 else float("nan")
    nan = float("nan")
    return BoundRecord(
        n=n, m=m, rho=rho, rho_R=rho_R, s=s,
        r1_lower=r1_lower_bound(n, m, rho, s) if m < n and s > 0 else nan,
        r2_exact=r2_closed_form(n, m, rho_R),
        genie_upper=genie_upper(n) if n >= 2 else nan,
        coop_upper=coop_upper(n, m) if n >= 3 else nan,
    )
