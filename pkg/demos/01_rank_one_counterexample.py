# coding: utf-8

# # A map that commutes with every rank-1 matrix but is not standard
#
# A map G on n x n matrices is "standard" when G(x) = lam*x + mu(x)*I for a
# scalar lam and a scalar-valued linear form mu.  Standard maps commute with
# everything.  For rank one the converse breaks down once n >= 3.

# In[1]:

from rankcomm import FieldSpec, MatrixSelector, Mat, apply, count_rank, decompose, example_map, verify_commuting

gf3 = FieldSpec.prime(3)
G = example_map(3, gf3)

for label, img in G.to_json()["columns"].items():
    if any(v != "0" for row in img for v in row):
        print(label, "->", img)


# Over GF(3) there are exactly count_rank(3, 1, 3) rank-1 matrices.  We check
# [G(x), x] = 0 on every one of them.

# In[2]:

print("rank-1 matrices:", count_rank(3, 1, 3))
verdict = verify_commuting(G, MatrixSelector.rank_exact(1), "exhaustive")
print("commutes on all of them:", verdict.passed, "| checked", verdict.checked)


# Yet decomposition fails at the very first unit: G(e11) - lam*e11 is not a
# multiple of the identity.

# In[3]:

out = decompose(G)
print(type(out).__name__, "at unit", out.unit)
print("residual:\n", out.residual.data)


# Equivalently, G sends the identity to a non-central matrix.

# In[4]:

print(apply(G, Mat.identity(3, gf3)).data)
