# coding: utf-8

# # Price of clustering: the lower-bound construction
#
# Build the clustered instance for k = 3, check it from its sizes alone, and
# compare the measured ratio with the closed forms.

# In[1]:


import numpy as np

from binpack_lab import GeneratorParams, generate_construction, k3_limit, lb_formula, verify_construction
from binpack_lab.construction import k3_finite_ratio, limit_ratio, required_modulus


# ## Smallest instance with the family-2 and family-3 clusters

# In[2]:

c = generate_construction(GeneratorParams(N=90, M=1, k=3, families={2, 3}))
rep = verify_construction(c)
print("checks passed:", rep.ok, " clusters:", len(c.instance.clusters))
print("sum of cluster optima:", rep.sum_cluster_opt, " global optimum:", rep.global_opt)
print("ratio:", rep.ratio, "=", float(rep.ratio))
print("merged cluster", c.merged_cluster, "needs", rep.cluster_opt[c.merged_cluster], "bins")


# The global certificate is a list of bin patterns with multiplicities.

# In[3]:

for pattern, mult in c.certificate.patterns[-3:]:
    print(mult, "x", dict(pattern))


# ## Two ladder levels with the 1/6 and 1/7 families

# In[4]:

N = required_modulus(3, 2, {2, 3, 6, 7})
c2 = generate_construction(GeneratorParams(N=N, M=2, k=3, families={2, 3, 6, 7}))
rep2 = verify_construction(c2)
print("N =", N, " ok:", rep2.ok, " ratio:", float(rep2.ratio))
print("finite formula:", float(k3_finite_ratio(N, 2, {2, 3, 6, 7}, merged_extra=1)))


# ## Where the bounds head

# In[5]:

Ms = np.arange(1, 11)
vals = np.array([float(k3_finite_ratio(10**9, int(M))) for M in Ms])
print("k=3, N=1e9:", np.round(vals, 6))
print("limit:", float(k3_limit()))
ks = np.arange(4, 11)
print("k>=4:", np.round([float(lb_formula(int(k))) for k in ks], 7))
print("families {2,3} only, k=3:", limit_ratio(3, {2, 3}))
