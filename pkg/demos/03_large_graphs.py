# coding: utf-8

# # Facebook and Twitter scale
#
# These runs need the SNAP ego-network edge lists, which are not bundled:
#
#   python demos/03_large_graphs.py facebook_combined.txt
#   python demos/03_large_graphs.py twitter_combined.txt --no-exact
#
# The Twitter graph is too large for the exact solver, so each pair's
# reference value is the mean of 100 meeting-time runs. That estimator is the
# only unbiased one of the three, which is why it serves as the reference.
# Expect hours on a laptop for Twitter.

# In[1]:

import sys

from localhit import bench as B
from localhit.cli import load_any
from localhit.pairs import STRATEGIES

if len(sys.argv) < 2:
    sys.exit("usage: 03_large_graphs.py EDGE_LIST [--no-exact]")

name, G = load_any(sys.argv[1])
exact = "--no-exact" not in sys.argv
print(name, "n =", G.n, "m =", G.m, "exact reference" if exact else "meeting-time reference")

# In[2]:

# t_mix for the theoretical cap needs the spectral oracle; at this size we give a cap directly.
cfg = B.AlgoConfig(walks=10_000, t_max=10**6)
recs = B.run_bench([(name, G)], STRATEGIES, B.ALGOS, pairs=50, cfg=cfg, seed=0, exact=exact, timing=True)
B.write_records(recs, f"{name}_table.csv")
for cell in B.summarize(recs):
    print(cell)
