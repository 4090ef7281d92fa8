"""End-to-end throughput versus the number of S-D pairs, optimized over m.

The headline simulation, 10 dB per hop and 2000 realizations per point. The
simulated rate should sit between half the hop-1 lower bound and half the
genie count, and grow like log n. Pass
``--quick`` for a 300-trial run. The plot needs matplotlib and
lands in the current directory.

Run:  python demos/03_throughput_vs_n.py [--quick]
"""
import math
import sys

from oprelay.harness import sweep_csv, sweep_n

trials = 300 if "--quick" in sys.argv else 2000
n_list = [20, 50, 100, 200, 500, 1000]
records = sweep_n(n_list, trials=trials, seed=2008)
print(sweep_csv(records))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, ax = plt.subplots(figsize=(6, 4))
ax.semilogx(n_list, [r.r_mean for r in records], "o-", label="simulated R (best m)")
ax.semilogx(n_list, [r.genie_upper_half for r in records], "--", label="genie count / 2")
ax.semilogx(n_list, [r.r1_lower_half for r in records], ":", label="hop-1 lower bound / 2")
ax.semilogx(n_list, [0.25 * math.log(n) for n in n_list], "-.", label="(1/4) log n")
ax.set_xlabel("S-D pairs n")
ax.set_ylabel("bits/s/Hz")
ax.legend()
fig.tight_layout()
fig.savefig("throughput_vs_n.png", dpi=120)
print("wrote throughput_vs_n.png")
