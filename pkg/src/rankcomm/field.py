"""Exact scalar domains: prime fields GF(p) and the rationals.

Values are stored in canonical form (a residue in ``[0, p)`` or a reduced
:class:`fractions.Fraction`), so field equality is plain ``==`` on the
representative.  Matrices keep their entries in numpy arrays; over GF(p) the
array dtype is ``int64`` whenever products of ``n`` entries cannot overflow,
otherwise ``object``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
from sympy import isprime

from .errors import DivisionByZero, GuardFailed, MixedFields

INFINITE = math.inf

# int64 is safe while a row of products p**2 * width stays below 2**63
_INT64_PRIME_LIMIT = 1 << 24


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "prime":
            if not isinstance(self.p, int) or not isprime(self.p):
                raise ValueError(f"modulus {self.p!r} is not prime")
        elif self.kind == "rationals":
            if self.p is not None:
                raise ValueError("rationals take no modulus")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime", int(p))

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("rationals")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``p:<prime>`` or ``Q``."""
        text = text.strip()
        if text in ("Q", "q", "QQ"):
            return cls.rationals()
        if text.startswith("p:"):
            return cls.prime(int(text[2:]))
        raise ValueError(f"cannot parse field {text!r}; use p:<prime> or Q")

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        if obj["kind"] == "prime":
            return cls.prime(obj["p"])
        return cls.rationals()

    def to_json(self) -> dict:
        if self.is_prime:
            return {"kind": "prime", "p": self.p}
        return {"kind": "rationals"}

    def __str__(self):
        return f"GF({self.p})" if self.is_prime else "Q"

    @property
    def is_prime(self) -> bool:
        return self.kind == "prime"

    @property
    def flag(self) -> str:
        return f"p:{self.p}" if self.is_prime else "Q"

    def characteristic(self) -> int:
        return self.p if self.is_prime else 0

    def cardinality(self):
        return self.p if self.is_prime else INFINITE

    # -- raw value arithmetic -------------------------------------------

    @property
    def dtype(self):
        if self.is_prime and self.p < _INT64_PRIME_LIMIT:
            return np.int64
        return object

    def canon(self, v: Any):
        if self.is_prime:
            if isinstance(v, Fraction):
                if v.denominator % self.p == 0:
                    raise DivisionByZero(f"{v} has no image in {self}")
                return v.numerator * pow(v.denominator, -1, self.p) % self.p
            return int(v) % self.p
        return Fraction(v)

    def zero(self):
        return self.canon(0)

    def one(self):
        return self.canon(1)

    def add(self, a, b):
        return self.canon(a + b)

    def sub(self, a, b):
        return self.canon(a - b)

    def mul(self, a, b):
        return self.canon(a * b)

    def neg(self, a):
        return self.canon(-a)

    def inv(self, a):
        a = self.canon(a)
        if a == 0:
            raise DivisionByZero(f"inverse of zero in {self}")
        if self.is_prime:
            return pow(int(a), -1, self.p)
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def from_string(self, s: str):
        return self.canon(Fraction(s))

    def to_string(self, v) -> str:
        return str(self.canon(v))

    def nonzero_elements(self) -> range:
        if not self.is_prime:
            raise ValueError("the rationals have no finite element list")
        return range(1, self.p)

    # -- array helpers ---------------------------------------------------

    def asarray(self, values) -> np.ndarray:
        """Canonical numpy array from nested sequences of ints/Fractions/strings."""
        arr = np.array(values, dtype=object)
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = self.from_string(v) if isinstance(v, str) else self.canon(v)
        if self.dtype is np.int64:
            return out.astype(np.int64)
        return out

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.is_prime:
            return arr % self.p
        return arr

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is np.int64:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(self.zero())
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one()
        return out

    def inv_table(self) -> np.ndarray:
        if not self.is_prime or self.dtype is not np.int64:
            raise ValueError("inverse tables exist only for small prime fields")
        return _inv_table(self.p)


@lru_cache(maxsize=None)
def _inv_table(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        table[a] = pow(a, -1, p)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class Scalar:
    """A field element bound to its :class:`FieldSpec`."""

    value: Any
    spec: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "value", self.spec.canon(self.value))

    def _other(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.spec != self.spec:
                raise MixedFields(f"{self.spec} vs {other.spec}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other, self.spec)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return Scalar(self.spec.add(self.value, o.value), self.spec)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return Scalar(self.spec.sub(self.value, o.value), self.spec)

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        o = self._other(other)
        return Scalar(self.spec.mul(self.value, o.value), self.spec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return Scalar(self.spec.div(self.value, o.value), self.spec)

    def __neg__(self):
        return Scalar(self.spec.neg(self.value), self.spec)

    def inverse(self) -> "Scalar":
        return Scalar(self.spec.inv(self.value), self.spec)

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self):
        return str(self.value)


def int_embed(n: int, spec: FieldSpec) -> Scalar:
    """The image n*1 of an integer in the field."""
    return Scalar(n, spec)


def arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    """Dispatch by operation name: add, sub, mul, inv, neg, int_embed.

    For ``int_embed`` pass the integer as ``a`` and the target spec as ``b``.
    """
    if op == "int_embed":
        return int_embed(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    raise ValueError(f"unknown operation {op!r}")


@dataclass(frozen=True)
class GuardResult:
    passed: bool
    reason: str

    def __bool__(self):
        return self.passed

    def require(self):
        if not self.passed:
            raise GuardFailed(self.reason)
        return self


def char_guard(spec: FieldSpec, requirement: str, m: int | None = None) -> GuardResult:
    """Check the characteristic and field-size hypotheses a computation relies on.

    ``additive_theorem``: char 0 or char > 3.
    ``multitrace``: (char 0 or char > m+1) and at least m+4 elements.
    """
    char = spec.characteristic()
    if requirement == "additive_theorem":
        if char == 0 or char > 3:
            return GuardResult(True, f"char {char} meets the additive hypotheses")
        return GuardResult(False, f"char {char} is 2 or 3; additive case needs char 0 or char > 3")
    if requirement == "multitrace":
        if m is None or m < 2:
            raise ValueError("multitrace requirement needs m >= 2")
        if char != 0 and char <= m + 1:
            return GuardResult(False, f"char {char} <= m+1 = {m + 1}")
        if spec.cardinality() < m + 4:
            return GuardResult(False, f"|K| = {spec.cardinality()} < m+4 = {m + 4}")
        return GuardResult(True, f"char {char} and |K| = {spec.cardinality()} admit m = {m}")
    raise ValueError(f"unknown requirement {requirement!r}")


def factorial_nonzero(m: int, spec: FieldSpec) -> bool:
    return spec.canon(math.factorial(m)) != 0
