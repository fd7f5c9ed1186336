"""Additive maps on M_n(K) as exact n^2 x n^2 operators.

Over GF(p) and Q an additive map is linear over the prime field, so it is fully
described by the images of the matrix units.  Column ``c`` of ``coeffs`` is
``vec(G(e_c))`` with units ordered e_11, e_12, ..., e_1n, e_21, ..., e_nn.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MixedFields, RationalsNotSampled, UnsupportedDimension
from .field import FieldSpec, Scalar
from .matrix import Mat, from_vec, matrix_unit


def unit_index(i: int, j: int, n: int) -> int:
    """0-based position of e_ij in the row-major unit order."""
    return (i - 1) * n + (j - 1)


def unit_of(index: int, n: int) -> tuple[int, int]:
    return index // n + 1, index % n + 1


def unit_label(i: int, j: int, n: int) -> str:
    return f"e{i}{j}" if n < 10 else f"e{i},{j}"


def parse_unit_label(label: str) -> tuple[int, int]:
    body = label.lstrip("e")
    if "," in body:
        i, j = body.split(",")
        return int(i), int(j)
    return int(body[0]), int(body[1:])


class MatLinMap:
    """Linear operator on n x n matrices, stored as an immutable N x N array (N = n^2)."""

    __slots__ = ("n", "spec", "coeffs")

    def __init__(self, n: int, spec: FieldSpec, coeffs, *, canonical: bool = False):
        N = n * n
        arr = np.array(coeffs, dtype=spec.dtype, copy=True) if canonical else spec.asarray(coeffs)
        if arr.shape != (N, N):
            raise DimensionMismatch(f"operator on M_{n} needs shape {(N, N)}, got {arr.shape}")
        arr.setflags(write=False)
        self.n = n
        self.spec = spec
        self.coeffs = arr

    @classmethod
    def from_images(cls, images: dict[tuple[int, int], Mat], n: int, spec: FieldSpec) -> "MatLinMap":
        """Build G from {(i, j): G(e_ij)}; missing units map to zero."""
        coeffs = spec.zeros((n * n, n * n))
        for (i, j), img in images.items():
            coeffs[:, unit_index(i, j, n)] = img.vec()
        return cls(n, spec, coeffs, canonical=True)

    @classmethod
    def from_vector(cls, v: np.ndarray, n: int, spec: FieldSpec) -> "MatLinMap":
        """Inverse of :meth:`vector` (row-major flattening of ``coeffs``)."""
        N = n * n
        return cls(n, spec, np.asarray(v).reshape(N, N), canonical=True)

    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def image(self, i: int, j: int) -> Mat:
        return from_vec(self.coeffs[:, unit_index(i, j, self.n)], self.n, self.spec)

    def __call__(self, x: Mat) -> Mat:
        return apply(self, x)

    def __eq__(self, other):
        return (
            isinstance(other, MatLinMap)
            and other.n == self.n
            and other.spec == self.spec
            and np.array_equal(other.coeffs, self.coeffs)
        )

    def __add__(self, other: "MatLinMap") -> "MatLinMap":
        self._same(other)
        return MatLinMap(self.n, self.spec, self.spec.reduce(self.coeffs + other.coeffs), canonical=True)

    def scale(self, s) -> "MatLinMap":
        s = s.value if isinstance(s, Scalar) else self.spec.canon(s)
        return MatLinMap(self.n, self.spec, self.spec.reduce(self.coeffs * s), canonical=True)

    def _same(self, other):
        if other.spec != self.spec:
            raise MixedFields(f"{self.spec} vs {other.spec}")
        if other.n != self.n:
            raise DimensionMismatch(f"{self.n} vs {other.n}")

    def to_json(self) -> dict:
        n = self.n
        cols = {}
        for c in range(n * n):
            i, j = unit_of(c, n)
            cols[unit_label(i, j, n)] = self.image(i, j).rows()
        return {"n": n, "field": self.spec.to_json(), "columns": cols}

    @classmethod
    def from_json(cls, obj: dict) -> "MatLinMap":
        spec = FieldSpec.from_json(obj["field"])
        n = obj["n"]
        images = {parse_unit_label(lbl): Mat(rows, spec) for lbl, rows in obj["columns"].items()}
        return cls.from_images(images, n, spec)

    def __repr__(self):
        return f"MatLinMap(n={self.n}, field={self.spec})"


def apply(G: MatLinMap, x: Mat) -> Mat:
    if x.spec != G.spec:
        raise MixedFields(f"{G.spec} vs {x.spec}")
    if x.n != G.n:
        raise DimensionMismatch(f"map on M_{G.n} applied to M_{x.n}")
    return from_vec(G.spec.reduce(G.coeffs @ x.vec()), G.n, G.spec)


def apply_batch(G: MatLinMap, X: np.ndarray) -> np.ndarray:
    """Apply G to a stack of matrices of shape (batch, n, n)."""
    b = X.shape[0]
    out = G.spec.reduce(X.reshape(b, -1) @ G.coeffs.T)
    return out.reshape(b, G.n, G.n)


def identity_map(n: int, spec: FieldSpec) -> MatLinMap:
    return MatLinMap(n, spec, spec.eye(n * n), canonical=True)


def zero_map(n: int, spec: FieldSpec) -> MatLinMap:
    return MatLinMap(n, spec, spec.zeros((n * n, n * n)), canonical=True)


def left_multiplication(a: Mat) -> MatLinMap:
    """x -> a x."""
    n, spec = a.n, a.spec
    images = {(i, j): a @ matrix_unit(i, j, n, spec) for i in range(1, n + 1) for j in range(1, n + 1)}
    return MatLinMap.from_images(images, n, spec)


@dataclass(frozen=True)
class StandardForm:
    """G(x) = lam * x + mu(x) * I with mu(x) = sum mu[c] * vec(x)[c]."""

    lam: Scalar
    mu: tuple

    @property
    def spec(self) -> FieldSpec:
        return self.lam.spec

    def to_json(self, n: int | None = None) -> dict:
        s = self.spec
        n = n or int(round(len(self.mu) ** 0.5))
        mu = {}
        for c, v in enumerate(self.mu):
            if v != 0:
                i, j = unit_of(c, n)
                mu[unit_label(i, j, n)] = s.to_string(v)
        return {"lambda": s.to_string(self.lam.value), "mu": mu}


@dataclass(frozen=True)
class NotStandard:
    """G(e_ij) - lam * e_ij is not central for the reported unit."""

    unit: tuple[int, int]
    lam: Scalar
    residual: Mat

    def to_json(self) -> dict:
        return {
            "not_standard": True,
            "unit": list(self.unit),
            "lambda": self.lam.spec.to_string(self.lam.value),
            "residual": self.residual.to_json(),
        }


def dual_unit(i: int, j: int, n: int, spec: FieldSpec, coeff=1) -> tuple:
    """mu with mu(x) = coeff * x_ij."""
    mu = [spec.zero()] * (n * n)
    mu[unit_index(i, j, n)] = spec.canon(coeff)
    return tuple(mu)


def standard_form(lam, mu, spec: FieldSpec) -> StandardForm:
    return StandardForm(Scalar(lam, spec), tuple(spec.canon(v) for v in mu))


def from_standard(sf: StandardForm, n: int, spec: FieldSpec | None = None) -> MatLinMap:
    spec = spec or sf.spec
    if len(sf.mu) != n * n:
        raise DimensionMismatch(f"mu has {len(sf.mu)} entries, expected {n * n}")
    vec_i = spec.eye(n).reshape(-1)
    coeffs = spec.eye(n * n) * spec.canon(sf.lam.value)
    mu = np.array([spec.canon(v) for v in sf.mu], dtype=spec.dtype)
    coeffs = spec.reduce(coeffs + vec_i[:, None] * mu[None, :])
    return MatLinMap(n, spec, coeffs, canonical=True)


def decompose(G: MatLinMap) -> StandardForm | NotStandard:
    """Recover (lam, mu) with G(x) = lam x + mu(x) I, or report the first failing unit.

    lam is read off the (1,2) entry of G(e_12), where I vanishes.
    """
    n, spec = G.n, G.spec
    if n < 2:
        raise UnsupportedDimension("decompose needs n >= 2")
    lam = G.image(1, 2).entry(1, 2)
    mu = []
    for c in range(n * n):
        i, j = unit_of(c, n)
        resid = G.image(i, j) - matrix_unit(i, j, n, spec).scale(lam)
        s = resid.scalar_value()
        if s is None:
            return NotStandard((i, j), lam, resid)
        mu.append(s.value)
    sf = StandardForm(lam, tuple(mu))
    if from_standard(sf, n, spec) != G:
        raise AssertionError("standard-form roundtrip mismatch")
    return sf


def example_map(n: int, spec: FieldSpec) -> MatLinMap:
    """The linear map commuting with every rank-1 matrix without being standard.

    e_11 -> -e_n2, e_1n -> e_12, e_21 -> e_n1, e_2n -> e_22 + ... + e_nn,
    every other unit -> 0.
    """
    if n < 3:
        raise UnsupportedDimension("the rank-1 counterexample needs n >= 3")
    e = lambda i, j: matrix_unit(i, j, n, spec)  # noqa: E731
    tail = Mat.zero(n, spec)
    for j in range(2, n + 1):
        tail = tail + e(j, j)
    images = {
        (1, 1): -e(n, 2),
        (1, n): e(1, 2),
        (2, 1): e(n, 1),
        (2, n): tail,
    }
    return MatLinMap.from_images(images, n, spec)


def random_map(n: int, spec: FieldSpec, seed=None) -> MatLinMap:
    if not spec.is_prime:
        raise RationalsNotSampled("random maps are drawn only over prime fields")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    vals = rng.integers(0, spec.p, size=(n * n, n * n))
    return MatLinMap(n, spec, vals.astype(spec.dtype) if spec.dtype is np.int64 else vals.tolist())


def random_standard(n: int, spec: FieldSpec, seed=None) -> StandardForm:
    if not spec.is_prime:
        raise RationalsNotSampled("random standard forms are drawn only over prime fields")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    vals = rng.integers(0, spec.p, size=n * n + 1)
    return standard_form(int(vals[0]), [int(v) for v in vals[1:]], spec)
