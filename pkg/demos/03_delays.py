# coding: utf-8

# # Bin packing with delays: the phase algorithm
#
# The online algorithm waits until the pending items have accumulated delay
# rho, then packs them with FFD. Here we run it on a few instances and
# compare against the brute-force offline optimum.

# In[1]:

from fractions import Fraction as F

import numpy as np

from binpack_lab import DelayFunction, Item, TimedItem, check_bound, compute_rho, offline_optimal, simulate
from binpack_lab.suites import random_timed_instance


# In[2]:

rho, ratio = compute_rho(30)
print(f"rho = {rho:.10f}   ratio bound = {ratio:.10f}")
for n in (1, 2, 3, 5, 30):
    print(n, "terms:", np.round(compute_rho(n), 10))


# ## One small instance, step by step

# In[3]:

lin = DelayFunction.linear(1)
items = [TimedItem(Item(F(3, 10), 0), F(0), lin),
         TimedItem(Item(F(3, 10), 1), F(0), lin),
         TimedItem(Item(F(1, 2), 2), F(3), DelayFunction.linear(2))]
trace = simulate(items, F(rho))
for ph in trace.phases:
    print("items", ph.items, "trigger", float(ph.trigger_time), "bins", ph.bin_count)
off = offline_optimal(items)
print("ALG", float(trace.total_cost), " OPT", float(off.cost), off.partition)


# ## Empirical ratios over random instances

# In[4]:

ratios = []
for trial in range(300):
    inst = random_timed_instance(np.random.default_rng([7, trial]), 6)
    tr, off = simulate(inst, F(rho)), offline_optimal(inst)
    assert check_bound(tr, off).ok
    ratios.append(float(tr.total_cost / off.cost))
ratios = np.array(ratios)
print("mean", ratios.mean().round(4), " max", ratios.max().round(4), " bound", round(ratio, 4))


# ## Zero-size items: the acknowledgement shape

# In[5]:

acks = [TimedItem(Item(F(0), i), F(i, 5), lin) for i in range(12)]
tr = simulate(acks, F(rho))
print(tr.phase_count, "phases, each one bin:", all(p.bin_count == 1 for p in tr.phases))
