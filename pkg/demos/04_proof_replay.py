# coding: utf-8

# # Replaying the rank-k argument on concrete maps
#
# For each matrix unit and each pair of units c, a certified completion B
# keeps c + tB at rank k.  The commutator f(t) = [G(c + tB), c + tB] is
# quadratic in t.  Evaluating it at t = 1, -1, 2 isolates the constant term
# [G(c), c].

# In[1]:

from rankcomm import FieldSpec, Scalar, StandardForm, decompose, from_standard, matrix_unit, replay_additive_proof
from rankcomm.commutant import recheck_violation
from rankcomm.linmap import dual_unit, left_multiplication

gf7 = FieldSpec.prime(7)
G = from_standard(StandardForm(Scalar(3, gf7), dual_unit(1, 1, 3, gf7)), 3)
rep = replay_additive_proof(G, 2)
print(rep.outcome.to_json(3), "| agrees with decompose:", rep.outcome == decompose(G))
print("first log entries:")
for entry in rep.log[:3]:
    print(" ", entry)


# A map that is not standard is caught by a rank-2 witness.

# In[2]:

gf5 = FieldSpec.prime(5)
L = left_multiplication(matrix_unit(1, 1, 3, gf5))
bad = replay_additive_proof(L, 2)
print("witness:\n", bad.outcome.x.data, "\nrechecks:", recheck_violation(L, bad.outcome))


# The nodes 1, -1, 2 collide in characteristic 3, so GF(3) is refused.

# In[3]:

from rankcomm.errors import GuardFailed

try:
    replay_additive_proof(from_standard(StandardForm(Scalar(1, FieldSpec.prime(3)), (0,) * 9), 3), 2)
except GuardFailed as exc:
    print("guard:", exc)
