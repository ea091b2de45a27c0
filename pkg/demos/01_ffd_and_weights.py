# coding: utf-8

# # FFD traces and weight functions
#
# A short walk through the packing primitives: First-Fit Decreasing, the
# quantities tau and theta that the weighting arguments track, and how the
# bonus-style weight functions behave on single bins.

# In[1]:

from fractions import Fraction as F

import numpy as np

from binpack_lab import Item, exact_optimal, ffd, make_builtin
from binpack_lab.weights import BUILTIN_CAPS, bin_weight_cap_check, grid_bins, pi_upper


# ## A hand-sized instance

# In[2]:

sizes = [F(3, 5), F(1, 2), F(2, 5), F(3, 10)]
trace = ffd([Item(s, i) for i, s in enumerate(sizes)])
for b, load in zip(trace.packing.bins, trace.packing.loads):
    print([str(it.size) for it in b], "load", load)
print("A =", trace.bin_count, " tau =", trace.tau, " theta =", trace.theta)


# FFD is not always optimal. Six items just above 1/4 next to two just above 1/2
# make the difference visible.

# In[3]:

eps = F(1, 100)
bad = [F(1, 2) + eps] * 2 + [F(1, 4) + 2 * eps] * 2 + [F(1, 4) + eps] * 2 + [F(1, 4) - 2 * eps] * 4
items = [Item(s, i) for i, s in enumerate(bad)]
print("FFD:", ffd(items).bin_count, " OPT:", exact_optimal(items).bin_count)


# ## Weight functions on a grid

# In[4]:

xs = np.linspace(0, 1, 13)[1:]
for name in ("w195", "wk3", "wk4", "v"):
    f = make_builtin(name)
    vals = np.array([float(f(F(x).limit_denominator(1000))) for x in xs])
    print(f"{name:5s}", np.round(vals, 3))


# The per-bin caps hold on every bin of at most three items above 1/4 with
# sizes on a 1/60 grid (the full check in the test suite uses 1/420).

# In[5]:

bins = list(grid_bins(q=60))
for name, cap in list(BUILTIN_CAPS.items()) + [("v", pi_upper())]:
    worst = max(make_builtin(name).total(b) for b in bins)
    print(f"{name:5s} worst {float(worst):.6f}  cap {float(cap):.6f}  violations",
          len(bin_weight_cap_check(make_builtin(name), cap, bins)))
