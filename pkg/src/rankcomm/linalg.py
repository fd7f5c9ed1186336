"""Exact Gaussian elimination over a :class:`FieldSpec`.

Everything here works on numpy arrays holding canonical field values
(``int64`` residues or ``object`` arrays of ints / Fractions).  Row
operations are vectorised across rows; the column loop stays in Python.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .field import FieldSpec


def rref(A: np.ndarray, spec: FieldSpec) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form. Returns the nonzero rows and pivot columns."""
    A = np.array(A, dtype=spec.dtype, copy=True)
    if A.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = A.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c] != 0)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = spec.reduce(A[r] * spec.inv(A[r, c]))
        f = A[:, c].copy()
        f[r] = 0
        hit = np.flatnonzero(f != 0)
        if hit.size:
            A[hit] = spec.reduce(A[hit] - f[hit, None] * A[r])
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(A: np.ndarray, spec: FieldSpec) -> int:
    if spec.is_prime:
        return len(rref(A, spec)[1])
    return bareiss_rank(_clear_denominators(A))


def _clear_denominators(A: np.ndarray) -> list[list[int]]:
    out = []
    for row in np.asarray(A, dtype=object):
        fr = [Fraction(v) for v in row]
        d = lcm(*(v.denominator for v in fr)) if fr else 1
        out.append([int(v * d) for v in fr])
    return out


def bareiss_rank(M: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    M = [list(row) for row in M]
    if not M:
        return 0
    rows, cols = len(M), len(M[0])
    r = 0
    prev = 1
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                M[i][j] = (M[i][j] * M[r][c] - M[i][c] * M[r][j]) // prev
            M[i][c] = 0
        prev = M[r][c]
        r += 1
    return r


def nullspace(A: np.ndarray, spec: FieldSpec, ncols: int | None = None) -> np.ndarray:
    """Basis of {x : A x = 0}, one basis vector per row, in free-column order."""
    A = np.asarray(A)
    cols = A.shape[1] if A.ndim == 2 and A.size else ncols
    if A.size == 0:
        return spec.eye(cols)
    R, piv = rref(A, spec)
    return _nullspace_from_rref(R, piv, cols, spec)


def _nullspace_from_rref(R, piv, cols, spec) -> np.ndarray:
    free = [c for c in range(cols) if c not in set(piv)]
    basis = spec.zeros((len(free), cols))
    for b, f in enumerate(free):
        basis[b, f] = spec.one()
        for row, pc in enumerate(piv):
            basis[b, pc] = spec.neg(R[row, f])
    return basis


@dataclass
class Solution:
    x: np.ndarray | None
    nullity: int
    inconsistent_row: int | None = None

    @property
    def consistent(self) -> bool:
        return self.x is not None


def solve(A: np.ndarray, b: np.ndarray, spec: FieldSpec) -> Solution:
    """Solve ``A x = b`` exactly; free variables are set to zero.

    ``b`` may be a vector or a matrix of right-hand sides.  On inconsistency the
    result names the first equation (by original row index) that cannot be
    satisfied together with all earlier equations.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    vec = b.ndim == 1
    B = b[:, None] if vec else b
    rows, cols = A.shape
    aug = np.concatenate([np.asarray(A, dtype=spec.dtype), np.asarray(B, dtype=spec.dtype)], axis=1)
    R, piv = rref(aug, spec)
    if any(p >= cols for p in piv):
        return Solution(None, cols - sum(p < cols for p in piv), _first_inconsistent(aug, cols, spec))
    x = spec.zeros((cols, B.shape[1]))
    for row, pc in enumerate(piv):
        x[pc] = R[row, cols:]
    return Solution(x[:, 0] if vec else x, cols - len(piv))


def _first_inconsistent(aug, cols, spec) -> int:
    lo, hi = 0, aug.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        _, piv = rref(aug[: mid + 1], spec)
        if any(p >= cols for p in piv):
            hi = mid
        else:
            lo = mid + 1
    return lo


def vandermonde_solve(nodes: list, rhs: list[np.ndarray], spec: FieldSpec) -> list[np.ndarray]:
    """Solve sum_j coef_j * node_i**j = rhs_i for array-valued coefficients."""
    size = len(nodes)
    V = spec.asarray([[spec.canon(pow(spec.canon(t), j)) for j in range(size)] for t in nodes])
    shape = np.asarray(rhs[0]).shape
    Bm = np.stack([np.asarray(r, dtype=spec.dtype).reshape(-1) for r in rhs])
    sol = solve(V, Bm, spec)
    if not sol.consistent or sol.nullity:
        raise ValueError("Vandermonde nodes are not distinct in the field")
    return [sol.x[j].reshape(shape) for j in range(size)]


class RowSpace:
    """Incrementally maintained row space in reduced echelon form."""

    def __init__(self, ncols: int, spec: FieldSpec):
        self.spec = spec
        self.ncols = ncols
        self.R = spec.zeros((0, ncols))
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, M: np.ndarray) -> np.ndarray:
        M = np.asarray(M, dtype=self.spec.dtype)
        if self.pivots:
            M = self.spec.reduce(M - self.spec.reduce(M[:, self.pivots]) @ self.R)
        return M

    def add(self, M: np.ndarray) -> int:
        """Add rows; returns how much the rank grew."""
        M = self.reduce(M)
        M = M[np.any(M != 0, axis=1)]
        if M.shape[0] == 0:
            return 0
        S, spiv = rref(M, self.spec)
        if self.pivots:
            R = self.spec.reduce(self.R - self.spec.reduce(self.R[:, spiv]) @ S)
        else:
            R = self.R
        allR = np.concatenate([R, S])
        allp = self.pivots + spiv
        order = np.argsort(allp, kind="stable")
        self.R = allR[order]
        self.pivots = [allp[i] for i in order]
        return len(spiv)

    def contains(self, v: np.ndarray) -> bool:
        return not np.any(self.reduce(np.asarray(v)[None, :]) != 0)

    def annihilates(self, v: np.ndarray) -> bool:
        """True when every stored row is orthogonal to ``v``."""
        if not self.pivots:
            return True
        return not np.any(self.spec.reduce(self.R @ np.asarray(v, dtype=self.spec.dtype)) != 0)

    def nullspace(self) -> np.ndarray:
        return _nullspace_from_rref(self.R, self.pivots, self.ncols, self.spec)


def batch_rank(arrs: np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Ranks of a stack of matrices with shape (batch, rows, cols)."""
    arrs = np.asarray(arrs)
    if arrs.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if not (spec.is_prime and spec.dtype is np.int64):
        return np.array([rank(a, spec) for a in arrs], dtype=np.int64)
    p = spec.p
    inv = spec.inv_table()
    A = arrs.astype(np.int64) % p
    nb, rows, cols = A.shape
    rk = np.zeros(nb, dtype=np.int64)
    row_idx = np.arange(rows)
    for c in range(cols):
        cand = (A[:, :, c] != 0) & (row_idx[None, :] >= rk[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        sel = np.flatnonzero(has)
        piv = np.argmax(cand[sel], axis=1)
        r = rk[sel]
        prow = A[sel, piv].copy()
        A[sel, piv] = A[sel, r]
        prow = prow * inv[prow[:, c]][:, None] % p
        A[sel, r] = prow
        f = A[sel, :, c].copy()
        f[row_idx[None, :] <= r[:, None]] = 0
        A[sel] = (A[sel] - f[:, :, None] * prow[:, None, :]) % p
        rk[sel] += 1
    return rk
