"""Compare the hop-1 lower bound and the exact hop-2 formula with Monte Carlo.

Run:  python demos/02_closed_forms_vs_simulation.py
"""
from oprelay import SimConfig, r1_lower_bound, r2_closed_form, run_experiment
from oprelay.analytics import default_threshold

print(f"{'n':>5} {'m':>3} {'R1 sim':>8} {'R1 bound':>9} {'R2 sim':>8} {'R2 exact':>9}")
for n in (20, 100, 500):
    for m in (2, 4, 6):
        rec = run_experiment(SimConfig(n, m, trials=2000, master_seed=7))
        lb = r1_lower_bound(n, m, 10.0, default_threshold(n))
        print(f"{n:>5} {m:>3} {rec.r1_mean:8.3f} {lb:9.3f} {rec.r2_mean:8.3f} "
              f"{r2_closed_form(n, m, 10.0):9.3f}")

# With m fixed, both hops approach m as n grows.
for n in (10 ** 2, 10 ** 4, 10 ** 6):
    print(f"n={n:>8}: R2 exact at m=4 is {r2_closed_form(n, 4, 10.0):.4f}")
