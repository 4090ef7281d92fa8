"""Feedback bits per fading block when the relay count grows like log2 n.

Run:  python demos/05_feedback_overhead.py
"""
import math

from oprelay import SimConfig, run_experiment
from oprelay.analytics import feedback_overhead

print(f"{'n':>6} {'m':>3} {'hop1 bits':>10} {'(log n)^2':>10} {'hop2 bits':>10} {'log n loglog n':>15}")
for n in (50, 200, 1000, 5000):
    m = round(math.log2(n))  # hop-2 relay-count regime, m of order log n
    rec = run_experiment(SimConfig(n, m, trials=300, master_seed=5))
    fb = feedback_overhead(n, m, 0)
    print(f"{n:>6} {m:>3} {rec.fb_bits_hop1:10.1f} {fb.hop1_predictor:10.1f} "
          f"{rec.fb_bits_hop2:10.1f} {fb.hop2_predictor:15.1f}")
print("orders:", fb.hop1_order, "and", fb.hop2_order)
