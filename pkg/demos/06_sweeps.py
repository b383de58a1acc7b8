# coding: utf-8

# # Error and runtime against graph size and walk count
#
# Writes two CSV files in the current directory. The same runs are available
# from the command line as `localhit bench --size-sweep er` and
# `localhit bench --graph G --walk-counts 100,1000,10000`.

# In[1]:

from localhit import bench as B

cfg = B.AlgoConfig(walks=10_000)
size = B.size_sweep("er", [200, 400, 600, 800, 1000], repeats=3, cfg=cfg, seed=0)
B.write_records(size, "size_sweep.csv")
for c in B.summarize(size):
    print(c)

# In[2]:

G = B.synthetic_graph("sbm", 300, seed=1, p_intra=0.1, p_inter=0.01)
walks = B.walk_sweep("sbm-300", G, [100, 1000, 10_000], pairs=10, cfg=cfg, seed=0)
B.write_records(walks, "walk_sweep.csv")
for w in (100, 1000, 10_000):
    errs = [r.rel_error for r in walks if r.walks == w and r.algo == "meeting"]
    print(f"meeting, {w:>6} walks: mean relative error {sum(errs) / len(errs):.4f}")
