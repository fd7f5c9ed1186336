# coding: utf-8

# # Traces of symmetric bilinear maps
#
# A symmetric m-linear map G has trace T(x) = G(x, ..., x).  If T commutes
# with every rank-k matrix (m + 1 <= k), T(x) is a combination of powers of x
# with scalar-form coefficients.

# In[1]:

import numpy as np

from rankcomm import FieldSpec
from rankcomm.matrix import commutator, random_matrix
from rankcomm.multitrace import (
    corner_map,
    decompose_trace,
    random_symmetric,
    replay_trace_proof,
    square_map,
    trace_eval,
    trace_form_map,
    vandermonde_extract,
)

gf7 = FieldSpec.prime(7)


# The extraction recovers [T(c), c] from values of T on c +- tB alone.

# In[2]:

rng = np.random.default_rng(0)
G = random_symmetric(3, 3, gf7, rng)
c, B = random_matrix(3, gf7, rng), random_matrix(3, gf7, rng)
print(vandermonde_extract(G, c, B) == commutator(trace_eval(G, c), c))


# Decomposition by coefficient matching.

# In[3]:

print("xy + yx:", decompose_trace(square_map(3, gf7)).to_json())
print("tr(x) x:", decompose_trace(trace_form_map(3, gf7)).to_json()["mu"]["1"])
print("x11^2 e11:", decompose_trace(corner_map(3, gf7)).to_json())


# The full replay over k = 3 accepts the square map and rejects the corner map.

# In[4]:

print(replay_trace_proof(square_map(3, gf7), 3).to_json())
print(replay_trace_proof(corner_map(3, gf7), 3).verdict)
