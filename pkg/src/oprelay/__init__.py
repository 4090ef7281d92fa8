"""Decentralized two-hop opportunistic relaying over i.i.d. Rayleigh fading.

Modules:

- ``channel``: reproducible Exp(1) gain matrices per trial.
- ``scheduler``: phase-1 best-source and phase-2 SINR-feedback scheduling.
- ``analytics``: closed forms, bounds and scaling-law predictors.
- ``genie``: exhaustive and branch-and-bound full-CSI hop-1 oracle.
- ``harness``: Monte Carlo cells, optimization over m, sweeps over n.
"""

from .analytics import (cdf_interference, cdf_max_exp, coop_upper, default_threshold,
                        feedback_overhead, gaussian_approx_fy, genie_lower, genie_upper,
                        optimal_m_phase2, p_dest_success, prob_exactly_m_distinct,
                        r1_lower_bound, r2_closed_form, r2_variance)
from .channel import ChannelRealization, RngSpec, draw_realization
from .genie import GenieResult, genie_throughput_mc, max_concurrent_bnb, max_concurrent_exhaustive
from .harness import ExperimentRecord, SimConfig, optimize_m, run_experiment, run_trial, sweep_n
from .scheduler import (PhaseOneSchedule, PhaseTwoSchedule, SlotOutcome, evaluate_phase1,
                        evaluate_phase2, schedule_phase1, schedule_phase2, sinr_phase1)

__version__ = "0.1.0"
