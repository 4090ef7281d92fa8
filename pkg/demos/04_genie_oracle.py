"""The full-CSI genie versus the decentralized scheme on the same gains.

Run:  python demos/04_genie_oracle.py
"""
import numpy as np

from oprelay import RngSpec, draw_realization, genie_throughput_mc, max_concurrent_bnb
from oprelay.analytics import genie_upper

gamma = draw_realization(10, 4, RngSpec(3, 0)).gamma
res = max_concurrent_bnb(gamma, rho=10.0)
print(f"k_max={res.k_max}, witness {res.witness}, {res.nodes_explored} search nodes")

for n in (6, 10, 14):
    mc = genie_throughput_mc(n, 4, 10.0, 1.0, trials=300, seed=1)
    print(f"n={n:>2}: genie {mc.mean:.3f} +- {mc.stderr:.3f}, scheme {mc.opportunistic_mean:.3f}, "
          f"asymptotic ceiling log2(n)+2 = {genie_upper(n):.2f}")
    assert np.all(mc.k_max >= mc.opportunistic)
