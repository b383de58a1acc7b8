# coding: utf-8

# # Why averaging hitting times needs so many walks
#
# On the barbell (a clique, a path, and a star with n^2 leaves) the hitting
# time from the clique end of the path to the star end grows like n^3, and
# the variance of a single hitting time like n^6. To pin H down to a fixed
# additive error the plain walk-sampling average therefore needs a number of
# walks that grows like n^6.

# In[1]:

import numpy as np

from localhit import bench as B

rows, fit = B.lowerbound_study((4, 6, 8, 10, 12), (1, 2, 4), repeats=2000, seed=0)

print(" n  nodes      H   single-walk var")
for r in rows:
    if r.r == 1:
        print(f"{r.n:2d} {r.nodes:6d} {r.exact_h:6.0f}  {r.single_var:14.4g}")
print(f"H grows like n^{fit['h_exponent']:.2f}, variance like n^{fit['var_exponent']:.2f}")

# In[2]:

# Averaging r independent walks divides the variance by r, as it should.
for n in (4, 12):
    v = {r.r: r.mean_var for r in rows if r.n == n}
    print(f"n={n}: var(r=1)/var(r=2) = {v[1] / v[2]:.2f}, var(r=2)/var(r=4) = {v[2] / v[4]:.2f}")

# In[3]:

# Walks needed for a standard error of one step: var / 1^2.
need = [r.single_var for r in rows if r.r == 1]
print("walks for additive error 1:", np.round(need).astype(int))

# Relative to H the spread stays put: the standard deviation of one hitting time is about H.
print("sd / H:", np.round([np.sqrt(r.single_var) / r.exact_h for r in rows if r.r == 1], 2))
