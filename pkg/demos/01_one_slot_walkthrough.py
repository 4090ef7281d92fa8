"""One slot of the two-hop opportunistic relaying protocol, step by step.

Run:  python demos/01_one_slot_walkthrough.py
"""
import numpy as np

from oprelay import (RngSpec, draw_realization, evaluate_phase1, evaluate_phase2, schedule_phase1,
                     schedule_phase2)

np.set_printoptions(precision=3, suppress=True)

n, m = 6, 3
rho = rho_R = 10.0  # 10 dB per hop
spec = RngSpec(master_seed=1, stream_id=0)
ch = draw_realization(n, m, spec)

# %% Phase 1: every relay feeds back the index of its strongest source
print("source -> relay gains (rows: sources)\n", ch.gamma)
s1 = schedule_phase1(ch.gamma)
print("relay picks:", s1.chosen_source, " scheduled set K:", s1.scheduled_set)

out1 = evaluate_phase1(s1, ch.gamma, rho)
for (i, r), sinr in out1.sinr_values.items():
    print(f"  source {i} -> relay {r}: SINR {sinr:.3f} {'ok' if sinr >= 1 else 'lost'}")
print("hop-1 bits delivered:", out1.bits_delivered)

# %% Phase 2: destinations feed back the one relay whose SINR clears 1
print("\nrelay -> destination gains (rows: relays)\n", ch.xi)
s2 = schedule_phase2(ch.xi, rho_R, rng=spec)
print("destination feedback:", s2.feedback)
print("relay -> destination:", s2.chosen_destination)
out2 = evaluate_phase2(s2, ch.xi, rho_R)
print("scheduling-time SINR:", out2.sinr, " realized SINR:", out2.realized_sinr)
print("hop-2 bits delivered:", out2.bits_delivered)
