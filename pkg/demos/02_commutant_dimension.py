# coding: utf-8

# # Counting the maps that commute on a set of matrices
#
# The linear maps G with [G(x), x] = 0 for all x in a set S form a subspace.
# Standard maps always belong to it, giving dimension at least n^2 + 1.  Here
# the subspace is computed exactly by enumerating S over a small prime field.

# In[1]:

import time

from rankcomm import FieldSpec, MatrixSelector, commutant_dimension, example_map
from rankcomm.commutant import same_subspace

gf5 = FieldSpec.prime(5)

for n, k in [(2, 1), (3, 2), (3, 1)]:
    t0 = time.perf_counter()
    rep = commutant_dimension(n, MatrixSelector.rank_exact(k), gf5)
    print(f"n={n} k={k}: dim {rep.dimension}  (standard {rep.standard_dim}, excess {rep.excess})"
          f"  {time.perf_counter() - t0:.1f}s")


# For n = 3 and k = 1 the space is larger than the standard family, and the
# rank-1 counterexample is one of the extra solutions.

# In[2]:

rank1 = commutant_dimension(3, MatrixSelector.rank_exact(1), gf5)
print("example map inside:", rank1.contains(example_map(3, gf5)))


# Rank two, the invertibles, and the whole matrix ring all cut out the same
# space.  Enumerating all of M_3(GF(5)) takes a few seconds.

# In[3]:

reps = {s: commutant_dimension(3, MatrixSelector.parse(s), gf5) for s in ["rank:2", "invertible", "all"]}
print({s: r.dimension for s, r in reps.items()})
print("rank:2 == invertible:", same_subspace(reps["rank:2"], reps["invertible"]))
print("rank:2 == all:", same_subspace(reps["rank:2"], reps["all"]))
