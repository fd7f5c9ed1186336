"""Maps that commute with every matrix of a selected set.

The space of linear G with [G(x), x] = 0 for all x in a set S is the nullspace
of a linear system in the n^4 coefficients of G: each x in S contributes the n^2
equations vec([G(x), x]) = 0.  The standard maps x -> lam x + mu(x) I always lie
in it, so its dimension is at least n^2 + 1; for rank k with 1 < k < n it is exactly
that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .completion import SupportPattern, complete_to_rank
from .errors import GuardFailed, NonConvergence, UnsupportedK
from .field import FieldSpec, char_guard
from .linalg import RowSpace, vandermonde_solve
from .linmap import MatLinMap, NotStandard, StandardForm, apply, apply_batch, decompose, unit_of
from .matrix import Mat, commutator, count_rank, default_budget, iter_matrices_by_rank, random_rank_k
from .matrix import rank as mat_rank


@dataclass(frozen=True)
class MatrixSelector:
    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("rank_exact", "invertible", "singular", "all"):
            raise ValueError(f"unknown selector kind {self.kind!r}")
        if self.kind == "rank_exact" and (self.k is None or self.k < 0):
            raise ValueError("rank_exact needs k >= 0")

    @classmethod
    def rank_exact(cls, k: int) -> "MatrixSelector":
        return cls("rank_exact", k)

    @classmethod
    def parse(cls, text: str) -> "MatrixSelector":
        text = text.strip()
        if text.startswith("rank:"):
            return cls.rank_exact(int(text[5:]))
        return cls(text)

    def ranks(self, n: int) -> set[int]:
        if self.kind == "rank_exact":
            return {self.k} if self.k <= n else set()
        if self.kind == "invertible":
            return {n}
        if self.kind == "singular":
            return set(range(n))
        return set(range(n + 1))

    def __str__(self):
        return f"rank:{self.k}" if self.kind == "rank_exact" else self.kind


def sample_member(sel: MatrixSelector, n: int, spec: FieldSpec, rng: np.random.Generator) -> Mat:
    """Random member of the selected set; ranks weighted by class size over GF(p)."""
    ranks = sorted(sel.ranks(n))
    if not ranks:
        raise ValueError(f"selector {sel} is empty for n={n}")
    if spec.is_prime:
        weights = np.array([count_rank(n, r, spec.p) for r in ranks], dtype=float)
        r = int(rng.choice(ranks, p=weights / weights.sum()))
    else:
        r = int(rng.choice(ranks))
    if r == 0:
        return Mat.zero(n, spec)
    return random_rank_k(n, r, spec, rng)


def _parse_mode(mode):
    if mode in (None, "exhaustive"):
        return ("exhaustive",)
    if isinstance(mode, tuple):
        return mode
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class CommutingVerdict:
    passed: bool
    checked: int
    selector: str
    mode: str
    witness: Mat | None = None
    value: Mat | None = None

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"passed": self.passed, "checked": self.checked, "selector": self.selector, "mode": self.mode}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["commutator"] = self.value.to_json()
        return out


def _batch_commutators(GX: np.ndarray, X: np.ndarray, spec: FieldSpec) -> np.ndarray:
    return spec.reduce(GX @ X - X @ GX)


def verify_commuting(
    G: MatLinMap,
    sel: MatrixSelector,
    mode="exhaustive",
    budget: int | None = None,
) -> CommutingVerdict:
    """Check [G(x), x] = 0 over the selected set.

    ``mode`` is ``"exhaustive"`` or ``("random", samples, seed)``.  Exhaustive
    runs in enumeration order and reports the first failing matrix.
    """
    mode = _parse_mode(mode)
    n, spec = G.n, G.spec
    if mode[0] == "exhaustive":
        checked = 0
        for X in iter_matrices_by_rank(n, sel.ranks(n), spec, budget):
            C = _batch_commutators(apply_batch(G, X), X, spec)
            bad = np.flatnonzero(np.any(C.reshape(len(X), -1) != 0, axis=1))
            if bad.size:
                b = int(bad[0])
                w = Mat(X[b], spec, canonical=True)
                return CommutingVerdict(False, checked + b + 1, str(sel), "exhaustive", w, commutator(apply(G, w), w))
            checked += len(X)
        return CommutingVerdict(True, checked, str(sel), "exhaustive")
    _, samples, seed = mode
    rng = np.random.default_rng(seed)
    label = f"random({samples},seed={seed})"
    for s in range(samples):
        x = sample_member(sel, n, spec, rng)
        c = commutator(apply(G, x), x)
        if not c.is_zero():
            return CommutingVerdict(False, s + 1, str(sel), label, x, c)
    return CommutingVerdict(True, samples, str(sel), label)


def constraint_rows(X: np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Rows of the linear system vec([G(x), x]) = 0 in the unknowns vec(coeffs).

    Unknown (a*n + b, i*n + j) is G's coefficient sending x_ij into output entry
    (a, b); its coefficient in entry (u, v) of [G(x), x] is
    x_ij * (delta_ua x_bv - x_ua delta_bv).
    """
    bsz, n, _ = X.shape
    eye = np.eye(n, dtype=X.dtype)
    P = np.einsum("zbv,zij->zvbij", X, X)
    Q = np.einsum("zua,zij->zuaij", X, X)
    T = np.einsum("ua,zvbij->zuvabij", eye, P) - np.einsum("bv,zuaij->zuvabij", eye, Q)
    return spec.reduce(T.reshape(bsz * n * n, n**4))


def projective_representatives(X: np.ndarray) -> np.ndarray:
    """Drop zero matrices and keep those whose first nonzero entry is 1.

    [G(cx), cx] = c^2 [G(x), x], so one matrix per line gives the same constraints.
    """
    flat = X.reshape(len(X), -1)
    nz = flat != 0
    keep = nz.any(axis=1)
    lead = flat[np.arange(len(X)), np.argmax(nz, axis=1)]
    return X[keep & (lead == 1)]


def standard_family(n: int, spec: FieldSpec) -> list[MatLinMap]:
    """Basis of the maps x -> lam x + mu(x) I: the identity and each x -> x_c I."""
    N = n * n
    vec_i = spec.eye(n).reshape(-1)
    maps = [MatLinMap(n, spec, spec.eye(N), canonical=True)]
    for c in range(N):
        coeffs = spec.zeros((N, N))
        coeffs[:, c] = vec_i
        maps.append(MatLinMap(n, spec, coeffs, canonical=True))
    return maps


def predicted_dimension(n: int, sel: MatrixSelector, spec: FieldSpec) -> tuple[int | None, str]:
    """n^2 + 1 when a proven result covers the cell, else None with the reason."""
    std = n * n + 1
    not_gf2 = spec != FieldSpec.prime(2)
    additive = bool(char_guard(spec, "additive_theorem"))
    k = sel.k
    if sel.kind == "rank_exact" and k == n:
        sel = MatrixSelector("invertible")
    if sel.kind == "rank_exact":
        if n >= 3 and 1 < k <= n - 1:
            if additive:
                return std, "standard form predicted (1 < k < n, char 0 or > 3)"
            return None, "outside hypotheses: char 2 or 3"
        if n == 2 and k == 1:
            if not_gf2:
                return std, "standard form predicted (n = 2, k = 1, field not GF(2))"
            return None, "outside hypotheses: GF(2) excluded for the 2x2 rank-1 case"
        if k == 1:
            return None, "k = 1 with n >= 3: standard form fails"
        return None, "rank 0: no constraint"
    if sel.kind == "invertible":
        if not_gf2:
            return std, "invertible case (any field but GF(2))"
        return None, "outside hypotheses: GF(2) excluded for the invertible case"
    if sel.kind == "singular":
        if n >= 3:
            return predicted_dimension(n, MatrixSelector.rank_exact(n - 1), spec)
        return predicted_dimension(n, MatrixSelector.rank_exact(1), spec)
    if not_gf2:
        return std, "commuting everywhere (contains the invertible set)"
    return None, "outside hypotheses: GF(2)"


@dataclass
class CommutantReport:
    n: int
    selector: str
    field: FieldSpec
    mode: str
    members: int
    generators: int
    constraint_count: int
    dimension: int
    predicted: int | None
    hypotheses: str
    standard_contained: bool
    saturated_at: int | None = None
    basis: list[MatLinMap] = field(repr=False, default_factory=list)
    rowspace: RowSpace | None = field(repr=False, default=None)

    @property
    def standard_dim(self) -> int:
        return self.n * self.n + 1

    @property
    def excess(self) -> int:
        return self.dimension - self.standard_dim

    def contains(self, G: MatLinMap) -> bool:
        """True when G satisfies every assembled constraint."""
        return self.rowspace.annihilates(G.vector())

    def to_json(self, include_basis: bool = False) -> dict:
        out = {
            "n": self.n,
            "selector": self.selector,
            "field": self.field.to_json(),
            "mode": self.mode,
            "members": self.members,
            "generators": self.generators,
            "constraint_count": self.constraint_count,
            "dimension": self.dimension,
            "standard_dim": self.standard_dim,
            "excess": self.excess,
            "predicted": self.predicted if self.predicted is not None else "no prediction",
            "hypotheses": self.hypotheses,
            "standard_contained": self.standard_contained,
        }
        if self.saturated_at is not None:
            out["saturated_at"] = self.saturated_at
        if self.mode != "exhaustive":
            out["confidence"] = "lower bound on constraints; excess not certified"
        if include_basis:
            out["basis"] = [[self.field.to_string(v) for v in g.vector()] for g in self.basis]
        return out


def commutant_dimension(
    n: int,
    sel: MatrixSelector,
    field: FieldSpec,
    mode="exhaustive",
    budget: int | None = None,
    window: int = 20,
    cap: int = 20_000,
    batch: int = 2048,
) -> CommutantReport:
    """Dimension and basis of the space of maps commuting on the selected set.

    ``mode`` is ``"exhaustive"`` or ``("sampled", seed)``.  Sampling adds random
    members until the nullspace dimension is unchanged for ``window``
    consecutive additions; hitting ``cap`` raises :class:`NonConvergence`.
    """
    if not field.is_prime:
        raise ValueError("commutant computations need a prime field")
    mode = _parse_mode(mode)
    N4 = n**4
    space = RowSpace(N4, field)
    members = generators = 0
    saturated_at = None
    # the standard family satisfies every constraint, so rank never exceeds this
    max_rank = N4 - (n * n + 1)
    if mode[0] == "exhaustive":
        label = "exhaustive"
        for X in iter_matrices_by_rank(n, sel.ranks(n), field, budget):
            members += len(X)
            reps = projective_representatives(X)
            for s in range(0, len(reps), batch):
                chunk = reps[s : s + batch]
                if saturated_at is None:
                    space.add(constraint_rows(chunk, field))
                    if space.rank == max_rank:
                        saturated_at = generators + len(chunk)
                generators += len(chunk)
    else:
        seed = mode[1]
        label = f"sampled(seed={seed},window={window})"
        rng = np.random.default_rng(seed)
        stable = 0
        while stable < window:
            if members >= cap:
                raise NonConvergence(f"no stabilisation after {cap} samples")
            x = sample_member(sel, n, field, rng)
            members += 1
            if x.is_zero():
                stable += 1
                continue
            generators += 1
            grew = space.add(constraint_rows(x.data[None], field))
            stable = 0 if grew else stable + 1
    basis_vecs = space.nullspace()
    basis = [MatLinMap.from_vector(v, n, field) for v in basis_vecs]
    contained = all(space.annihilates(g.vector()) for g in standard_family(n, field))
    predicted, why = predicted_dimension(n, sel, field)
    return CommutantReport(
        n=n,
        selector=str(sel),
        field=field,
        mode=label,
        members=members,
        generators=generators,
        constraint_count=generators * n * n,
        dimension=N4 - space.rank,
        predicted=predicted,
        hypotheses=why,
        standard_contained=contained,
        saturated_at=saturated_at,
        basis=basis,
        rowspace=space,
    )


def same_subspace(a: CommutantReport, b: CommutantReport) -> bool:
    """Equal dimension and each basis satisfies the other's constraints."""
    return (
        a.dimension == b.dimension
        and all(b.contains(g) for g in a.basis)
        and all(a.contains(g) for g in b.basis)
    )


QUADRATIC_NODES = (1, -1, 2)


def isolate_quadratic_coeffs(evals, spec: FieldSpec | None = None) -> tuple[Mat, Mat, Mat]:
    """Recover A0, A1, A2 from the values of A0 + A1 t + A2 t^2 at t = 1, -1, 2.

    The node determinant is -6, so characteristic 2 and 3 are rejected.
    """
    evals = list(evals)
    if len(evals) != 3:
        raise ValueError("need evaluations at t = 1, -1, 2")
    spec = spec or evals[0].spec
    if spec.characteristic() in (2, 3):
        raise GuardFailed(f"nodes 1, -1, 2 are not separated in char {spec.characteristic()}")
    coefs = vandermonde_solve(list(QUADRATIC_NODES), [e.data for e in evals], spec)
    return tuple(Mat(c, spec, canonical=True) for c in coefs)


@dataclass
class Violation:
    """A rank-k matrix x with [G(x), x] != 0."""

    x: Mat
    value: Mat
    k: int
    pattern: str
    t: int

    def to_json(self) -> dict:
        return {
            "violation": True,
            "k": self.k,
            "pattern": self.pattern,
            "t": self.t,
            "witness": self.x.to_json(),
            "commutator": self.value.to_json(),
        }


@dataclass
class AdditiveReplay:
    outcome: StandardForm | NotStandard | Violation
    log: list[dict]

    @property
    def ok(self) -> bool:
        return isinstance(self.outcome, StandardForm)


def _cert_fields(spec: FieldSpec) -> tuple[FieldSpec, ...]:
    return (spec,) if spec.is_prime else (FieldSpec.prime(5), FieldSpec.prime(7))


def replay_additive_proof(G: MatLinMap, k: int, budget: int | None = None) -> AdditiveReplay:
    """Mechanically run the rank-k argument on a concrete map.

    For every unit c = e_ij and every pair sum c = e_ij + e_kl, a completion B
    makes c + tB rank k for t != 0; f(t) = [G(c + tB), c + tB] is evaluated at
    t = 1, -1, 2 and its constant term [G(c), c] isolated.  Any nonzero f(t) is a
    rank-k violation.  Otherwise G commutes on a spanning probe set and is
    decomposed into standard form.
    """
    n, spec = G.n, G.spec
    if k == 1:
        raise UnsupportedK("k = 1: the standard form fails for n >= 3 (see example_map)")
    if n < 3 or not 1 < k <= n - 1:
        raise UnsupportedK(f"replay covers n >= 3 and 1 < k < n; got n={n}, k={k}")
    char_guard(spec, "additive_theorem").require()
    fields = _cert_fields(spec)
    budget = default_budget() if budget is None else budget
    N = n * n
    log: list[dict] = []
    units = [unit_of(c, n) for c in range(N)]
    probes = [((u,), "unit") for u in units]
    probes += [((units[a], units[b]), "pair") for a in range(N) for b in range(a + 1, N)]
    for positions, step in probes:
        pattern = SupportPattern(n, positions)
        comp = complete_to_rank(pattern, k, fields, budget=budget)
        c = pattern.fill([1] * len(positions), spec)
        B = Mat(comp.B.data, spec) if comp.B.spec != spec else comp.B
        evals = []
        for t in QUADRATIC_NODES:
            x = c + B.scale(t)
            f = commutator(apply(G, x), x)
            if not f.is_zero():
                return AdditiveReplay(Violation(x, f, k, str(pattern), t), log)
            evals.append(f)
        A0, _, _ = isolate_quadratic_coeffs(evals, spec)
        direct = commutator(apply(G, c), c)
        log.append(
            {
                "step": step,
                "pattern": str(pattern),
                "B": [list(p) for p in comp.support],
                "method": comp.method,
                "t": list(QUADRATIC_NODES),
                "constant_term_zero": A0.is_zero(),
                "direct_zero": direct.is_zero(),
            }
        )
        if not (A0.is_zero() and direct.is_zero()):
            raise AssertionError(f"[G(c), c] != 0 at {pattern} although f vanished at all nodes")
    return AdditiveReplay(decompose(G), log)


def recheck_violation(G: MatLinMap, v: Violation) -> bool:
    """Independent re-verification of a reported violation."""
    return mat_rank(v.x) == v.k and not commutator(apply(G, v.x), v.x).is_zero()
