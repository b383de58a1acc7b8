# coding: utf-8

# # Hitting times on small graphs
#
# H(u, v) is the expected number of steps a simple random walk started at u
# needs to reach v. On small graphs we can solve for it exactly and compare
# with walk-based estimates.

# In[1]:

import numpy as np

from localhit import (
    EstimatorParams,
    complete_graph,
    exact_effective_resistance,
    generate_barbell,
    hitting_time,
    meeting_time_estimate,
    path_graph,
    sample_hitting_times,
)

# In[2]:

# A path a - b - c. From a the walk must cross b, and from b it falls back to a half the time.
P3 = path_graph(3)
print("H(a, c) =", hitting_time(P3, 0, 2))  # 4
print("H(b, c) =", hitting_time(P3, 1, 2))  # 3

# Commute time is 2m times the effective resistance: 4 + 4 = 2 * 2 * 2.
print("R_eff(a, c) =", exact_effective_resistance(P3, 0, 2))

# In[3]:

# Hitting times are not symmetric. The barbell hangs a heavy star off one end of a path,
# so reaching the star end is much slower than leaving it.
B = generate_barbell(6)
print("nodes", B.graph.n, "edges", B.graph.m)
print("H(u1 -> un) =", hitting_time(B.graph, B.u1, B.un))
print("H(un -> u1) =", hitting_time(B.graph, B.un, B.u1))

# In[4]:

# The direct approach: simulate walks until they hit v and average.
K = complete_graph(10)
times = sample_hitting_times(K, 0, 1, 100_000, cap=10**6, seed=1)
print("walk sampling on K_10:", times.mean(), "(exact 9)")

# In[5]:

# The meeting-time estimator starts one ensemble at u and one at v and lets
# co-located walkers of opposite type annihilate. Counting occupancy of v
# along the way gives an unbiased estimate. The run ends once every walker has been paired off.
est = meeting_time_estimate(B.graph, B.u1, B.un, EstimatorParams(walks=10_000, t_max=10**6, seed=3))
print("meeting estimate:", est.value, "steps simulated:", est.total_steps)
print("last step:", est.info["t_last"], "vs H =", hitting_time(B.graph, B.u1, B.un))

# In[6]:

# Repeating it gives a feel for the spread.
vals = [meeting_time_estimate(B.graph, B.u1, B.un, EstimatorParams(walks=10_000, t_max=10**6, seed=s)).value
        for s in range(20)]
print(f"mean {np.mean(vals):.1f}  sd {np.std(vals, ddof=1):.1f}")
