# coding: utf-8

# # Testing whether a walk has mixed, and local resistance estimates
#
# The mixing tester draws endpoints of t-step walks from each start and checks,
# with a closeness tester for distributions, whether they all look alike.
# Binary search over t then brackets the mixing time.

# In[1]:

from localhit import complete_graph, generate_barbell
from localhit.exact import exact_effective_resistance, mixing_time
from localhit.mixing import (
    binary_search_mixing,
    effres_local,
    effres_partial_sums,
    fit_geometric_decay,
    mixing_test,
)

K3 = complete_graph(3)
bb = generate_barbell(4).graph
print("K_3 at t=20:", mixing_test(K3, 20, 0.5, 0.1, seed=0).accept)
print("barbell at t=5:", mixing_test(bb, 5, 0.5, 0.1, seed=0).accept)

# In[2]:

K10 = complete_graph(10)
print("K_10 estimated mixing time:", binary_search_mixing(K10, 0.5, 0.1, t_hi=64, seed=0))
print("K_10 exact (TV 1/8):", mixing_time(K10))

# In[3]:

# Effective resistance as a walk series: each term is a difference of return
# probabilities. On K_5 the partial sums approach 2/5 geometrically with ratio 1/4.
K5 = complete_graph(5)
ps = effres_partial_sums(K5, 0, 1, 12)
print(ps[:6])
print(fit_geometric_decay(ps))

# In[4]:

est, ell = effres_local(K5, 0, 1, 0.01)
print(f"local estimate {est:.4f} with {ell} terms; exact {exact_effective_resistance(K5, 0, 1):.4f}")
