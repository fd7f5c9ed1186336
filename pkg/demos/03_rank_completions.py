# coding: utf-8

# # Completing a support pattern to a fixed rank
#
# Fill a few positions with arbitrary nonzero scalars.  A completion is a 0/1
# matrix B, off those positions, such that the filled pattern plus any nonzero
# multiple of B always has the same rank k.

# In[1]:

from rankcomm import FieldSpec, SupportPattern, complete_to_rank, verify_completion
from rankcomm.completion import units_matrix

gf5, gf7 = FieldSpec.prime(5), FieldSpec.prime(7)

for text, k in [("1,1", 3), ("1,1;1,2", 3), ("1,2;2,1", 2), ("2,3;3,1", 3)]:
    c = complete_to_rank(SupportPattern.parse(text, 3), k)
    print(f"{text:10s} k={k}  B on {c.support}  via {c.method}")


# Certification is exhaustive: every nonzero fill over GF(5) is checked.  A
# too-small B fails, and the verdict points at the first bad fill.

# In[2]:

p = SupportPattern.parse("1,1", 3)
print(verify_completion(p, units_matrix(3, [(2, 2), (3, 3)], gf5), 3, gf5).to_json())
print(verify_completion(p, units_matrix(3, [(2, 2)], gf5), 3, gf5).to_json())


# A completion found over GF(5) can be re-checked over another prime.

# In[3]:

c = complete_to_rank(SupportPattern.parse("1,1;1,2", 4), 3, (gf5, gf7))
print(c.support, [cert["passed"] for cert in c.certificate])


# Some patterns cannot be completed: in M_2 the full pattern leaves no room for B.

# In[4]:

from rankcomm.errors import Infeasible

try:
    complete_to_rank(SupportPattern.parse("1,1;1,2;2,1;2,2", 2), 2, FieldSpec.prime(3))
except Infeasible as exc:
    print("infeasible:", exc)
