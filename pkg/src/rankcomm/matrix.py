"""Dense square matrices with exact entries.

The public API indexes entries 1-based, ``(i, j)`` as in ``e_ij``; the numpy
storage underneath is 0-based and row-major.
"""

from __future__ import annotations

import os
from collections.abc import Iterator
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, IndexOutOfRange, InvalidRank, MixedFields
from .field import FieldSpec, Scalar
from .linalg import batch_rank
from .linalg import rank as _rank

DEFAULT_BUDGET = 20_000_000


def default_budget() -> int:
    env = os.environ.get("RANKCOMM_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class Mat:
    """Immutable n x n matrix over a :class:`FieldSpec`."""

    __slots__ = ("data", "spec", "_key")

    def __init__(self, data, spec: FieldSpec, *, canonical: bool = False):
        arr = np.array(data, dtype=spec.dtype, copy=True) if canonical else spec.asarray(data)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        self.data = arr
        self.spec = spec
        self._key = None

    @classmethod
    def zero(cls, n: int, spec: FieldSpec) -> "Mat":
        return cls(spec.zeros((n, n)), spec, canonical=True)

    @classmethod
    def identity(cls, n: int, spec: FieldSpec) -> "Mat":
        return cls(spec.eye(n), spec, canonical=True)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def entry(self, i: int, j: int) -> Scalar:
        _check_index(i, j, self.n)
        return Scalar(self.data[i - 1, j - 1], self.spec)

    def _same(self, other: "Mat"):
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if other.spec != self.spec:
            raise MixedFields(f"{self.spec} vs {other.spec}")
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n}")

    def _wrap(self, arr) -> "Mat":
        return Mat(self.spec.reduce(arr), self.spec, canonical=True)

    def __add__(self, other: "Mat") -> "Mat":
        self._same(other)
        return self._wrap(self.data + other.data)

    def __sub__(self, other: "Mat") -> "Mat":
        self._same(other)
        return self._wrap(self.data - other.data)

    def __neg__(self) -> "Mat":
        return self._wrap(-self.data)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._same(other)
        return self._wrap(self.data @ other.data)

    def scale(self, s) -> "Mat":
        if isinstance(s, Scalar):
            if s.spec != self.spec:
                raise MixedFields(f"{self.spec} vs {s.spec}")
            s = s.value
        return self._wrap(self.data * self.spec.canon(s))

    def __mul__(self, s) -> "Mat":
        return self.scale(s)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and other.spec == self.spec and np.array_equal(self.data, other.data)

    def __hash__(self):
        if self._key is None:
            self._key = hash((self.spec, tuple(self.data.reshape(-1).tolist())))
        return self._key

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def scalar_value(self):
        """The c with self == c*I, or None when the matrix is not central."""
        d = self.data
        c = d[0, 0]
        if np.any(d - np.diag(np.diag(d)) != 0) or np.any(np.diag(d) != c):
            return None
        return Scalar(c, self.spec)

    def rank(self) -> int:
        return rank(self)

    def vec(self) -> np.ndarray:
        return self.data.reshape(-1)

    def rows(self) -> list[list[str]]:
        return [[self.spec.to_string(v) for v in row] for row in self.data]

    def to_json(self) -> dict:
        return {"n": self.n, "field": self.spec.to_json(), "rows": self.rows()}

    @classmethod
    def from_json(cls, obj: dict, spec: FieldSpec | None = None) -> "Mat":
        spec = spec or FieldSpec.from_json(obj["field"])
        m = cls(obj["rows"], spec)
        if "n" in obj and obj["n"] != m.n:
            raise DimensionMismatch(f"declared n={obj['n']} but rows give {m.n}")
        return m

    def __repr__(self):
        body = "; ".join(" ".join(r) for r in self.rows())
        return f"Mat[{self.spec}]({body})"


def _check_index(i: int, j: int, n: int):
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexOutOfRange(f"({i},{j}) outside 1..{n}")


def matrix_unit(i: int, j: int, n: int, spec: FieldSpec) -> Mat:
    _check_index(i, j, n)
    d = spec.zeros((n, n))
    d[i - 1, j - 1] = spec.one()
    return Mat(d, spec, canonical=True)


def from_vec(v: np.ndarray, n: int, spec: FieldSpec) -> Mat:
    return Mat(np.asarray(v).reshape(n, n), spec, canonical=True)


def commutator(A: Mat, B: Mat) -> Mat:
    A._same(B)
    return A._wrap(A.data @ B.data - B.data @ A.data)


def rank(A: Mat) -> int:
    return _rank(A.data, A.spec)


def _gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_rank(n: int, k: int, q: int) -> int:
    """Number of n x n matrices of rank exactly k over GF(q).

    Choose the column space ([n, k]_q ways), then a surjection from K^n onto it:
    [n, k]_q * prod_{i<k} (q^n - q^i).
    """
    if not 0 <= k <= n:
        raise InvalidRank(f"rank {k} outside 0..{n}")
    surj = 1
    for i in range(k):
        surj *= q**n - q**i
    return _gaussian_binomial(n, k, q) * surj


def _digits_batch(start: int, stop: int, n: int, p: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    powers = p ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // powers[None, :]) % p).reshape(-1, n, n)


def iter_matrices_by_rank(
    n: int,
    ranks,
    spec: FieldSpec,
    budget: int | None = None,
    batch: int = 1 << 16,
) -> Iterator[np.ndarray]:
    """Yield stacked arrays of every matrix whose rank lies in ``ranks``.

    Order is lexicographic in the row-major entry tuple (first entry most
    significant), the same order as counting 0 .. p^(n^2) - 1 in base p.
    """
    if not spec.is_prime:
        raise ValueError("enumeration needs a prime field")
    budget = default_budget() if budget is None else budget
    total = spec.p ** (n * n)
    if total > budget:
        raise BudgetExceeded(total, budget)
    ranks = set(ranks)
    for start in range(0, total, batch):
        arrs = _digits_batch(start, min(total, start + batch), n, spec.p)
        keep = np.isin(batch_rank(arrs, spec), list(ranks))
        if keep.any():
            yield arrs[keep]


def enumerate_rank_k(n: int, k: int, spec: FieldSpec, budget: int | None = None) -> Iterator[Mat]:
    if not 0 <= k <= n:
        raise InvalidRank(f"rank {k} outside 0..{n}")
    for arrs in iter_matrices_by_rank(n, {k}, spec, budget):
        for a in arrs:
            yield Mat(a, spec, canonical=True)


def _random_entries(rng: np.random.Generator, shape, spec: FieldSpec) -> np.ndarray:
    if spec.is_prime:
        vals = rng.integers(0, spec.p, size=shape)
        return np.array(vals, dtype=spec.dtype) if spec.dtype is np.int64 else np.array(
            [int(v) for v in vals.reshape(-1)], dtype=object
        ).reshape(shape)
    nums = rng.integers(-5, 6, size=shape)
    dens = rng.integers(1, 4, size=shape)
    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        out[idx] = Fraction(int(nums[idx]), int(dens[idx]))
    return out


def _full_rank_factor(rng, shape, spec, want, attempts=1000):
    for _ in range(attempts):
        f = _random_entries(rng, shape, spec)
        if _rank(f, spec) == want:
            return f
    return None


def random_rank_k(n: int, k: int, spec: FieldSpec, seed=None) -> Mat:
    """A random matrix of rank exactly k, as (n x k full column rank) @ (k x n full row rank)."""
    if not 1 <= k <= n:
        raise InvalidRank(f"rank {k} outside 1..{n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        left = _full_rank_factor(rng, (n, k), spec, k)
        right = _full_rank_factor(rng, (k, n), spec, k) if left is not None else None
        if left is not None and right is not None:
            return Mat(spec.reduce(left @ right), spec, canonical=True)
        rng = np.random.default_rng(rng.integers(0, 2**63))


def random_matrix(n: int, spec: FieldSpec, seed=None) -> Mat:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Mat(_random_entries(rng, (n, n), spec), spec, canonical=True)
