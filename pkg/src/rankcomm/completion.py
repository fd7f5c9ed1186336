"""Rank-k completions of support patterns.

Given positions ``(i_1, j_1), ..., (i_v, j_v)`` and a target rank ``k``, find a
0/1 matrix ``B`` supported off the pattern such that

    z_1 e_{i_1 j_1} + ... + z_v e_{i_v j_v} + t B

has rank exactly ``k`` for every choice of nonzero ``z_r`` and ``t``.  Every
returned completion is certified by checking that statement over a prime field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, IndexOutOfRange, Infeasible, InvalidRank
from .field import FieldSpec
from .linalg import batch_rank
from .matrix import Mat, default_budget

GF5 = FieldSpec.prime(5)


@dataclass(frozen=True)
class SupportPattern:
    n: int
    positions: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pos = tuple((int(i), int(j)) for i, j in self.positions)
        object.__setattr__(self, "positions", pos)
        if len(set(pos)) != len(pos):
            raise ValueError(f"repeated positions in {pos}")
        for i, j in pos:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise IndexOutOfRange(f"({i},{j}) outside 1..{self.n}")

    @classmethod
    def parse(cls, text: str, n: int) -> "SupportPattern":
        """Parse ``"1,1;1,2"``; the empty string is the empty pattern."""
        text = text.strip()
        if not text:
            return cls(n, ())
        pos = []
        for chunk in text.split(";"):
            i, j = chunk.split(",")
            pos.append((int(i), int(j)))
        return cls(n, tuple(pos))

    @property
    def v(self) -> int:
        return len(self.positions)

    @property
    def rows(self) -> list[int]:
        return sorted({i for i, _ in self.positions})

    @property
    def cols(self) -> list[int]:
        return sorted({j for _, j in self.positions})

    def is_transversal(self) -> bool:
        """Pairwise-distinct rows and pairwise-distinct columns."""
        return len(self.rows) == self.v and len(self.cols) == self.v

    def fill(self, values, spec: FieldSpec) -> Mat:
        d = spec.zeros((self.n, self.n))
        for (i, j), z in zip(self.positions, values):
            d[i - 1, j - 1] = spec.canon(z)
        return Mat(d, spec, canonical=True)

    def to_json(self) -> list[list[int]]:
        return [[i, j] for i, j in self.positions]

    def __str__(self):
        return ";".join(f"{i},{j}" for i, j in self.positions)


@dataclass
class CompletionVerdict:
    passed: bool
    checks: int
    field: FieldSpec
    mode: str
    witness: tuple | None = None
    achieved_rank: int | None = None

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"passed": self.passed, "checks": self.checks, "field": self.field.to_json(), "mode": self.mode}
        if self.witness is not None:
            out["witness"] = {"z": list(self.witness[:-1]), "t": self.witness[-1], "rank": self.achieved_rank}
        return out


@dataclass
class Completion:
    pattern: SupportPattern
    B: Mat
    k: int
    method: str
    certificate: list[dict] = field(default_factory=list)

    @property
    def support(self) -> list[tuple[int, int]]:
        return [(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(self.B.data))]

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.to_json(),
            "k": self.k,
            "B": self.B.to_json(),
            "B_support": [list(p) for p in self.support],
            "method": self.method,
            "certificate": self.certificate,
        }


def units_matrix(n: int, positions, spec: FieldSpec) -> Mat:
    d = spec.zeros((n, n))
    for i, j in positions:
        d[i - 1, j - 1] = spec.one()
    return Mat(d, spec, canonical=True)


def _fill_tuples(v: int, spec: FieldSpec, mode, budget: int) -> np.ndarray:
    """Rows (z_1, ..., z_v, t) in lexicographic order, or seeded random rows."""
    if mode == "exhaustive":
        total = (spec.p - 1) ** (v + 1)
        if total > budget:
            raise BudgetExceeded(total, budget)
        grids = np.indices((spec.p - 1,) * (v + 1)).reshape(v + 1, -1).T
        return grids + 1
    _, samples, seed = mode
    rng = np.random.default_rng(seed)
    return rng.integers(1, spec.p, size=(samples, v + 1))


def _normalise_mode(mode):
    if mode == "exhaustive" or mode is None:
        return "exhaustive"
    if isinstance(mode, tuple) and mode[0] == "random":
        return mode
    raise ValueError(f"unknown verification mode {mode!r}")


def verify_completion(
    pattern: SupportPattern,
    B: Mat,
    k: int,
    field: FieldSpec = GF5,
    mode="exhaustive",
    budget: int | None = None,
) -> CompletionVerdict:
    """Check rank(sum z_r e_r + t B) == k over all (or sampled) nonzero fills.

    ``mode`` is ``"exhaustive"`` or ``("random", samples, seed)``.  The first
    failing tuple, in checking order, is returned as the witness.
    """
    if not field.is_prime:
        raise ValueError("completion certification needs a prime field")
    mode = _normalise_mode(mode)
    budget = default_budget() if budget is None else budget
    n, v = pattern.n, pattern.v
    Bf = field.asarray(B.data.tolist()) if B.spec != field else B.data
    overlap = [(i, j) for i, j in pattern.positions if Bf[i - 1, j - 1] != 0]
    if overlap:
        raise ValueError(f"B overlaps the pattern at {overlap}")
    fills = _fill_tuples(v, field, mode, budget)
    label = "exhaustive" if mode == "exhaustive" else f"random({mode[1]},seed={mode[2]})"
    rows = np.array([i - 1 for i, _ in pattern.positions], dtype=np.int64)
    cols = np.array([j - 1 for _, j in pattern.positions], dtype=np.int64)
    chunk = 1 << 15
    for start in range(0, len(fills), chunk):
        f = fills[start : start + chunk]
        mats = f[:, -1, None, None] * np.asarray(Bf, dtype=np.int64)[None]
        if v:
            mats[:, rows, cols] = f[:, :v]
        mats %= field.p
        ranks = batch_rank(mats, field)
        bad = np.flatnonzero(ranks != k)
        if bad.size:
            b = int(bad[0])
            return CompletionVerdict(
                False, start + b + 1, field, label, tuple(int(x) for x in f[b]), int(ranks[b])
            )
    return CompletionVerdict(True, len(fills), field, label)


def _fresh(used, n, count):
    free = [x for x in range(1, n + 1) if x not in set(used)]
    return free[:count] if len(free) >= count else None


def _fresh_diagonal(pattern: SupportPattern, k: int):
    fr = _fresh(pattern.rows, pattern.n, k - pattern.v)
    fc = _fresh(pattern.cols, pattern.n, k - pattern.v)
    return list(zip(fr, fc))


def _padded(pattern: SupportPattern, k: int):
    n = pattern.n
    R, C = pattern.rows, pattern.cols
    if len(R) <= k and k + len(C) <= n:
        pad_cols = _fresh(C, n, k)
        support = list(zip(R, pad_cols))
        fr = _fresh(R, n, k - len(R))
        support += list(zip(fr, pad_cols[len(R):]))
        return support
    if len(C) <= k and k + len(R) <= n:
        pad_rows = _fresh(R, n, k)
        support = list(zip(pad_rows, C))
        fc = _fresh(C, n, k - len(C))
        support += list(zip(pad_rows[len(C):], fc))
        return support
    return None


def _core_candidates(pattern: SupportPattern, k: int):
    """Fresh-row/column completions of maximal transversal sub-patterns.

    Largest cores first, each size in lexicographic order; candidates that
    would overlap the pattern are skipped.
    """
    taken = set(pattern.positions)
    seen = []
    for size in range(min(pattern.v, k), 0, -1):
        for core in itertools.combinations(pattern.positions, size):
            sub = SupportPattern(pattern.n, core)
            if not sub.is_transversal():
                continue
            support = _fresh_diagonal(sub, k)
            if None in support or len(support) != k - size:
                continue
            if taken.isdisjoint(support) and support not in seen:
                seen.append(support)
                yield support


def complete_to_rank(
    pattern: SupportPattern,
    k: int,
    cert_field: FieldSpec | tuple[FieldSpec, ...] = GF5,
    mode="exhaustive",
    budget: int | None = None,
    max_extra: int = 2,
) -> Completion:
    """Find and certify a 0/1 completion ``B`` of ``pattern`` to rank ``k``.

    Strategies are tried in order: the fresh-rows-and-columns recipe for
    transversal patterns, the empty completion, row/column padding, and finally
    a lexicographic search over supports of size at most ``k + max_extra``.
    ``cert_field`` may be a tuple, in which case every field must certify.
    """
    fields = (cert_field,) if isinstance(cert_field, FieldSpec) else tuple(cert_field)
    return _complete_cached(pattern, k, fields, _normalise_mode(mode), budget, max_extra)


@lru_cache(maxsize=4096)
def _complete_cached(pattern, k, fields, mode, budget, max_extra) -> Completion:
    n = pattern.n
    if not 1 <= k <= n:
        raise InvalidRank(f"rank {k} outside 1..{n}")
    spec = fields[0]

    def certify(support):
        B = units_matrix(n, support, spec)
        verdicts = [verify_completion(pattern, B, k, f, mode, budget) for f in fields]
        return B, verdicts

    def done(B, method, verdicts):
        return Completion(pattern, B, k, method, [vd.to_json() for vd in verdicts])

    if pattern.is_transversal() and pattern.v <= k:
        B, verdicts = certify(_fresh_diagonal(pattern, k))
        if all(verdicts):
            return done(B, "lemma1_fresh", verdicts)

    B, verdicts = certify([])
    if all(verdicts):
        return done(B, "empty", verdicts)

    support = _padded(pattern, k)
    if support is not None:
        B, verdicts = certify(support)
        if all(verdicts):
            return done(B, "padded", verdicts)

    taken = set(pattern.positions)
    free = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if (i, j) not in taken]
    bound = min(k + max_extra, len(free))
    tried = 0
    for support in _core_candidates(pattern, k):
        tried += 1
        B, verdicts = certify(support)
        if all(verdicts):
            return done(B, "searched", verdicts)
    for size in range(1, bound + 1):
        for support in itertools.combinations(free, size):
            tried += 1
            ones = units_matrix(n, list(pattern.positions) + list(support), spec)
            if ones.rank() != k:
                continue
            B, verdicts = certify(list(support))
            if all(verdicts):
                return done(B, "searched", verdicts)
    raise Infeasible(
        f"no completion of pattern {pattern} to rank {k} with support size <= {bound} "
        f"({tried} candidates over {', '.join(map(str, fields))})",
        bound=bound,
    )
