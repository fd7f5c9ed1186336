"""Symmetric m-linear maps on M_n(K), their traces T(x) = G(x, ..., x), and
the machinery that shows a trace commuting on rank-k matrices commutes
everywhere.

A multilinear map is stored as a dense tensor of shape ``(N,) * m + (n, n)``
with ``N = n^2``: entry ``[b_1, ..., b_m]`` is ``G(e_{b_1}, ..., e_{b_m})`` with
units in row-major order.  Public tuple keys are 1-based and sorted.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .commutant import MatrixSelector, _cert_fields, _parse_mode, sample_member
from .completion import SupportPattern, complete_to_rank
from .errors import DimensionMismatch, GuardFailed, MixedFields, RationalsNotSampled, UnsupportedK
from .field import FieldSpec, Scalar, char_guard, factorial_nonzero
from .linalg import solve, vandermonde_solve
from .matrix import Mat, commutator, default_budget, iter_matrices_by_rank, random_matrix
from .matrix import rank as mat_rank


def _unit_arrays(n: int, spec: FieldSpec) -> np.ndarray:
    N = n * n
    E = spec.zeros((N, n, n))
    for b in range(N):
        E[b, b // n, b % n] = spec.one()
    return E


class MultiLinearMap:
    """An m-linear map given by its values on tuples of matrix units."""

    def __init__(self, m: int, n: int, spec: FieldSpec, tensor: np.ndarray):
        N = n * n
        tensor = np.asarray(tensor, dtype=spec.dtype)
        if tensor.shape != (N,) * m + (n, n):
            raise DimensionMismatch(f"tensor shape {tensor.shape} does not fit m={m}, n={n}")
        tensor = spec.reduce(tensor)
        tensor.setflags(write=False)
        self.m, self.n, self.spec, self.tensor = m, n, spec, tensor

    @classmethod
    def from_function(cls, m: int, n: int, spec: FieldSpec, fn) -> "MultiLinearMap":
        """Tabulate ``fn(X_1, ..., X_m) -> Mat`` on every tuple of units."""
        N = n * n
        units = [Mat(a, spec, canonical=True) for a in _unit_arrays(n, spec)]
        t = spec.zeros((N,) * m + (n, n))
        for idx in itertools.product(range(N), repeat=m):
            t[idx] = fn(*(units[b] for b in idx)).data
        return cls(m, n, spec, t)

    def evaluate(self, *xs: Mat) -> Mat:
        if len(xs) != self.m:
            raise ValueError(f"expected {self.m} arguments")
        W = self.tensor
        for x in xs:
            self._check(x)
            W = self.spec.reduce(np.tensordot(x.vec(), W, axes=(0, 0)))
        return Mat(W, self.spec, canonical=True)

    def _check(self, x: Mat):
        if x.spec != self.spec:
            raise MixedFields(f"{self.spec} vs {x.spec}")
        if x.n != self.n:
            raise DimensionMismatch(f"map on M_{self.n} applied to M_{x.n}")

    def is_symmetric(self) -> bool:
        axes = range(self.m)
        return all(
            np.array_equal(self.tensor, self.tensor.transpose(*perm, self.m, self.m + 1))
            for perm in itertools.permutations(axes)
        )

    def __eq__(self, other):
        return (
            isinstance(other, MultiLinearMap)
            and (other.m, other.n, other.spec) == (self.m, self.n, self.spec)
            and np.array_equal(other.tensor, self.tensor)
        )


class SymMultiMap(MultiLinearMap):
    """Symmetric m-linear map; construction fails on a non-symmetric tensor."""

    def __init__(self, m: int, n: int, spec: FieldSpec, tensor: np.ndarray):
        super().__init__(m, n, spec, tensor)
        if not self.is_symmetric():
            raise ValueError("tensor is not symmetric in its arguments")

    @classmethod
    def from_sorted(cls, m: int, n: int, spec: FieldSpec, coeffs: dict) -> "SymMultiMap":
        """Build from {sorted 1-based tuple: Mat}; unlisted tuples are zero."""
        N = n * n
        t = spec.zeros((N,) * m + (n, n))
        for key, val in coeffs.items():
            key = tuple(sorted(key))
            data = val.data if isinstance(val, Mat) else spec.asarray(val)
            for perm in set(itertools.permutations(b - 1 for b in key)):
                t[perm] = data
        return cls(m, n, spec, t)

    @property
    def coeffs(self) -> dict[tuple[int, ...], Mat]:
        N = self.n * self.n
        return {
            tuple(b + 1 for b in key): Mat(self.tensor[key], self.spec, canonical=True)
            for key in itertools.combinations_with_replacement(range(N), self.m)
        }

    def to_json(self) -> dict:
        entries = [
            {"tuple": list(key), "value": val.to_json()}
            for key, val in self.coeffs.items()
            if not val.is_zero()
        ]
        return {"m": self.m, "n": self.n, "field": self.spec.to_json(), "coeffs": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "SymMultiMap":
        spec = FieldSpec.from_json(obj["field"])
        coeffs = {tuple(e["tuple"]): Mat.from_json(e["value"], spec) for e in obj["coeffs"]}
        return cls.from_sorted(obj["m"], obj["n"], spec, coeffs)

    def __repr__(self):
        return f"SymMultiMap(m={self.m}, n={self.n}, field={self.spec})"


def symmetrize(raw: MultiLinearMap) -> SymMultiMap:
    """Sum over all argument permutations; the trace gets multiplied by m!."""
    m, spec = raw.m, raw.spec
    if not factorial_nonzero(m, spec):
        raise GuardFailed(f"{m}! vanishes in {spec}")
    total = spec.zeros(raw.tensor.shape)
    for perm in itertools.permutations(range(m)):
        total = spec.reduce(total + raw.tensor.transpose(*perm, m, m + 1))
    return SymMultiMap(m, raw.n, spec, total)


def trace_eval(G: MultiLinearMap, x: Mat) -> Mat:
    """T(x) = G(x, ..., x)."""
    return G.evaluate(*([x] * G.m))


def trace_batch(G: MultiLinearMap, X: np.ndarray) -> np.ndarray:
    """T over a stack of matrices with shape (batch, n, n)."""
    spec = G.spec
    V = X.reshape(len(X), -1)
    W = spec.reduce(np.tensordot(V, G.tensor, axes=(1, 0)))
    for _ in range(G.m - 1):
        W = spec.reduce(np.einsum("zi,zi...->z...", V, W))
    return W


def _batch_comm(A: np.ndarray, X: np.ndarray, spec: FieldSpec) -> np.ndarray:
    return spec.reduce(A @ X - X @ A)


# -- gallery -----------------------------------------------------------------


def power_map(m: int, n: int, spec: FieldSpec) -> SymMultiMap:
    """Symmetrisation of (x_1, ..., x_m) -> x_1 x_2 ... x_m; trace m! x^m."""
    raw = MultiLinearMap.from_function(m, n, spec, lambda *xs: _product(xs, n, spec))
    return symmetrize(raw)


def _product(xs, n, spec) -> Mat:
    out = Mat.identity(n, spec)
    for x in xs:
        out = out @ x
    return out


def square_map(n: int, spec: FieldSpec) -> SymMultiMap:
    """G(x, y) = xy + yx."""
    return power_map(2, n, spec)


def corner_map(n: int, spec: FieldSpec, m: int = 2) -> SymMultiMap:
    """G(x_1, ..., x_m) = (x_1)_11 ... (x_m)_11 e_11, trace x_11^m e_11."""
    e11 = spec.zeros((n, n))
    e11[0, 0] = spec.one()
    return SymMultiMap.from_sorted(m, n, spec, {(1,) * m: e11})


def random_symmetric(m: int, n: int, spec: FieldSpec, seed=None) -> SymMultiMap:
    if not spec.is_prime:
        raise RationalsNotSampled("random multilinear maps are drawn only over prime fields")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    N = n * n
    coeffs = {}
    for key in itertools.combinations_with_replacement(range(1, N + 1), m):
        coeffs[key] = rng.integers(0, spec.p, size=(n, n)).tolist()
    return SymMultiMap.from_sorted(m, n, spec, coeffs)


# -- the +-t extraction ------------------------------------------------------


@dataclass
class ParityProfile:
    """Even/odd split of f(t) = [T(c + tB), c + tB].

    alpha[h] = C(m, 2h) [G(B^(2h), c^(m-2h)), c]
    gamma[h] = C(m, 2h+1) [G(B^(2h+1), c^(m-2h-1)), B]
    The even-power coefficients of f are alpha[0], alpha[h] + gamma[h-1], ...,
    ending in ``y``.
    """

    m: int
    zeta: int
    epsilon: int
    a: int
    alpha: list[Mat]
    gamma: list[Mat]

    @property
    def y(self) -> Mat:
        if self.m % 2 == 0:
            return self.alpha[self.zeta] + self.gamma[self.epsilon]
        return self.gamma[self.epsilon]

    def unknowns(self) -> list[Mat]:
        out = [self.alpha[0]]
        for h in range(1, self.epsilon + 2):
            if h < len(self.alpha):
                out.append(self.alpha[h] + self.gamma[h - 1])
            else:
                out.append(self.gamma[h - 1])
        return out


def parity_indices(m: int) -> tuple[int, int, int]:
    """(zeta, epsilon, a) for arity m."""
    zeta = m // 2
    if m % 2 == 0:
        return zeta, zeta - 1, m
    return zeta, zeta, m + 1


def parity_profile(G: SymMultiMap, c: Mat, B: Mat) -> ParityProfile:
    m = G.m
    zeta, eps, a = parity_indices(m)
    alpha = []
    for h in range(zeta + 1):
        val = G.evaluate(*([B] * (2 * h) + [c] * (m - 2 * h)))
        alpha.append(commutator(val, c).scale(math.comb(m, 2 * h)))
    gamma = []
    for h in range(eps + 1):
        val = G.evaluate(*([B] * (2 * h + 1) + [c] * (m - 2 * h - 1)))
        gamma.append(commutator(val, B).scale(math.comb(m, 2 * h + 1)))
    return ParityProfile(m, zeta, eps, a, alpha, gamma)


def extraction_nodes(m: int) -> list[int]:
    _, eps, _ = parity_indices(m)
    return list(range(1, eps + 3))


def paired_values(G: MultiLinearMap, c: Mat, B: Mat, ts) -> list[Mat]:
    """v_t = [T(c + tB), c + tB] + [T(c - tB), c - tB] for each t."""
    out = []
    for t in ts:
        plus, minus = c + B.scale(t), c - B.scale(t)
        out.append(commutator(trace_eval(G, plus), plus) + commutator(trace_eval(G, minus), minus))
    return out


def vandermonde_system(G: SymMultiMap, c: Mat, B: Mat) -> tuple[list[int], list[Mat], list[Mat]]:
    """Nodes t, paired values v_t, and the solved even-power coefficients.

    v_t = 2 * sum_j coef_j (t^2)^j; the returned coefficients already include
    the division by 2.
    """
    char_guard(G.spec, "multitrace", G.m).require()
    spec = G.spec
    ts = extraction_nodes(G.m)
    values = paired_values(G, c, B, ts)
    coefs = vandermonde_solve([t * t for t in ts], [v.data for v in values], spec)
    half = spec.inv(2)
    return ts, values, [Mat(spec.reduce(cf * half), spec, canonical=True) for cf in coefs]


def vandermonde_extract(G: SymMultiMap, c: Mat, B: Mat) -> Mat:
    """[T(c), c] recovered from values of T along c +- tB only."""
    return vandermonde_system(G, c, B)[2][0]


def _first_row_inverse(ts, spec) -> list:
    """Weights w with sum_t w_t v_t = coefficient 0 of the node system in t^2."""
    size = len(ts)
    E = [spec.zeros(size) for _ in range(size)]
    for r in range(size):
        E[r][r] = spec.one()
    # solving against the identity gives V^{-1} row by row
    rows = vandermonde_solve([t * t for t in ts], E, spec)
    return list(rows[0])


# -- verification ------------------------------------------------------------


@dataclass
class TraceVerdict:
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


def verify_trace_commuting(
    G: MultiLinearMap, sel: MatrixSelector, mode="exhaustive", budget: int | None = None
) -> TraceVerdict:
    """Check [T(x), x] = 0 over the selected set (exhaustive or ("random", N, seed))."""
    mode = _parse_mode(mode)
    n, spec = G.n, G.spec
    if mode[0] == "exhaustive":
        checked = 0
        for X in iter_matrices_by_rank(n, sel.ranks(n), spec, budget, batch=1 << 13):
            C = _batch_comm(trace_batch(G, X), X, spec)
            bad = np.flatnonzero(np.any(C.reshape(len(X), -1) != 0, axis=1))
            if bad.size:
                b = int(bad[0])
                w = Mat(X[b], spec, canonical=True)
                return TraceVerdict(False, checked + b + 1, str(sel), "exhaustive", w, commutator(trace_eval(G, w), w))
            checked += len(X)
        return TraceVerdict(True, checked, str(sel), "exhaustive")
    _, samples, seed = mode
    rng = np.random.default_rng(seed)
    label = f"random({samples},seed={seed})"
    for s in range(samples):
        x = sample_member(sel, n, spec, rng)
        val = commutator(trace_eval(G, x), x)
        if not val.is_zero():
            return TraceVerdict(False, s + 1, str(sel), label, x, val)
    return TraceVerdict(True, samples, str(sel), label)


@dataclass
class TraceViolation:
    """x = c + tB of rank k (c a filled pattern) with [T(x), x] != 0."""

    x: Mat
    value: Mat
    k: int
    pattern: str
    fill: tuple
    t: int

    def to_json(self) -> dict:
        return {
            "violation": True,
            "k": self.k,
            "pattern": self.pattern,
            "fill": list(self.fill),
            "t": self.t,
            "witness": self.x.to_json(),
            "commutator": self.value.to_json(),
        }


@dataclass
class TraceReplay:
    verdict: str
    violation: TraceViolation | None
    log: list[dict]
    cross_check: dict | None = None

    @property
    def ok(self) -> bool:
        return self.verdict == "commuting everywhere"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.violation is not None:
            out["violation"] = self.violation.to_json()
        if self.cross_check is not None:
            out["cross_check"] = self.cross_check
        return out


def replay_trace_proof(
    G: SymMultiMap,
    k: int,
    fill_values: int | None = None,
    probe_samples: int = 50,
    seed: int = 0,
    budget: int | None = None,
) -> TraceReplay:
    """Run the m-additive argument on a concrete symmetric map.

    For every support pattern S of v <= m + 1 matrix units and every fill of S
    from {1, ..., m + 2}^v, a certified completion B makes c +- tB rank k; the
    paired values at t = 1 .. epsilon + 2 are combined through the node system
    to isolate [T(c), c].  A nonzero [T(c +- tB), c +- tB] is a rank-k
    violation.  The fill grid is large enough that [T(x), x], a polynomial of
    degree m + 1 in the entries of x, vanishes identically once every
    extracted value is zero; the conclusion is then cross-checked by direct
    evaluation.
    """
    m, n, spec = G.m, G.n, G.spec
    if n < m + 1 or not m + 1 <= k <= n:
        raise UnsupportedK(f"need n >= m+1 and m+1 <= k <= n; got m={m}, n={n}, k={k}")
    char_guard(spec, "multitrace", m).require()
    budget = default_budget() if budget is None else budget
    fields = _cert_fields(spec)
    fill_values = fill_values or m + 2
    ts = extraction_nodes(m)
    w0 = _first_row_inverse(ts, spec)
    half = spec.inv(2)
    N = n * n
    units = [(b // n + 1, b % n + 1) for b in range(N)]
    log: list[dict] = []
    for v in range(1, m + 2):
        for positions in itertools.combinations(units, v):
            pattern = SupportPattern(n, positions)
            comp = complete_to_rank(pattern, k, fields, budget=budget)
            Bd = np.asarray(spec.asarray(comp.B.data.tolist()))
            fills = np.array(list(itertools.product(range(1, fill_values + 1), repeat=v)), dtype=np.int64)
            C = spec.zeros((len(fills), n, n))
            rows = [i - 1 for i, _ in positions]
            cols = [j - 1 for _, j in positions]
            C[:, rows, cols] = fills
            extracted = spec.zeros((len(fills), n, n))
            for r, t in enumerate(ts):
                paired = spec.zeros((len(fills), n, n))
                for sign in (1, -1):
                    X = spec.reduce(C + sign * t * Bd[None])
                    comm = _batch_comm(trace_batch(G, X), X, spec)
                    bad = np.flatnonzero(np.any(comm.reshape(len(X), -1) != 0, axis=1))
                    if bad.size:
                        b = int(bad[0])
                        x = Mat(X[b], spec, canonical=True)
                        viol = TraceViolation(
                            x, Mat(comm[b], spec, canonical=True), k, str(pattern),
                            tuple(int(z) for z in fills[b]), sign * t,
                        )
                        log.append({"v": v, "pattern": str(pattern), "violation_at_t": sign * t})
                        return TraceReplay("violation", viol, log)
                    paired = spec.reduce(paired + comm)
                extracted = spec.reduce(extracted + paired * spec.canon(w0[r]))
            extracted = spec.reduce(extracted * half)
            log.append(
                {
                    "v": v,
                    "pattern": str(pattern),
                    "B": [list(p) for p in comp.support],
                    "method": comp.method,
                    "fills": len(fills),
                    "nodes": ts,
                    "extracted_zero": not np.any(extracted != 0),
                }
            )
    cross = _cross_check(G, probe_samples, seed, budget)
    if not cross["passed"]:
        raise AssertionError(f"extraction vanished but direct evaluation failed: {cross}")
    return TraceReplay("commuting everywhere", None, log, cross)


def _cross_check(G: SymMultiMap, samples: int, seed: int, budget: int) -> dict:
    n, spec = G.n, G.spec
    rng = np.random.default_rng(seed)
    for s in range(samples):
        x = random_matrix(n, spec, rng)
        if not commutator(trace_eval(G, x), x).is_zero():
            return {"passed": False, "mode": f"probe({samples},seed={seed})", "failed_at": s, "witness": x.to_json()}
    out = {"passed": True, "mode": f"probe({samples},seed={seed})", "checked": samples}
    if spec.is_prime and spec.p ** (n * n) <= budget:
        verdict = verify_trace_commuting(G, MatrixSelector("all"), "exhaustive", budget)
        out = {"passed": verdict.passed, "mode": "exhaustive", "checked": verdict.checked}
    return out


def recheck_trace_violation(G: SymMultiMap, v: TraceViolation) -> bool:
    return mat_rank(v.x) == v.k and not commutator(trace_eval(G, v.x), v.x).is_zero()


# -- decomposition -----------------------------------------------------------


def _multiplicity(key) -> int:
    out = math.factorial(len(key))
    for c in Counter(key).values():
        out //= math.factorial(c)
    return out


def _ordered_products(key, E, n, spec) -> np.ndarray:
    """Sum over distinct orderings of key of the product of the units."""
    if not key:
        return spec.eye(n)
    total = spec.zeros((n, n))
    for perm in set(itertools.permutations(key)):
        prod = E[perm[0]]
        for b in perm[1:]:
            prod = spec.reduce(prod @ E[b])
        total = spec.reduce(total + prod)
    return total


def _sub_multisets(key, size):
    seen = set()
    for idx in itertools.combinations(range(len(key)), size):
        gamma = tuple(key[i] for i in idx)
        if gamma in seen:
            continue
        seen.add(gamma)
        rest = list(key)
        for g in gamma:
            rest.remove(g)
        yield gamma, tuple(rest)


@dataclass
class TraceDecomposition:
    """T(x) = mu0 x^m + sum_i mu_i(x) x^(m-i), mu_i symmetric i-linear forms.

    ``forms[i]`` maps sorted 0-based i-tuples to the polar-form value; the form
    evaluates as sum over ordered tuples of value * x_{b_1} ... x_{b_i}.
    """

    m: int
    n: int
    spec: FieldSpec
    mu0: Scalar
    forms: dict[int, dict[tuple[int, ...], object]]
    unique: bool = True

    def form_value(self, i: int, x: Mat):
        v = x.vec()
        total = self.spec.zero()
        for key, val in self.forms[i].items():
            if val == 0:
                continue
            mono = self.spec.one()
            for b in key:
                mono = self.spec.mul(mono, v[b])
            total = self.spec.add(total, self.spec.mul(_multiplicity(key) * val, mono))
        return total

    def evaluate(self, x: Mat) -> Mat:
        spec, n = self.spec, self.n
        powers = [Mat.identity(n, spec)]
        for _ in range(self.m):
            powers.append(powers[-1] @ x)
        out = powers[self.m].scale(self.mu0)
        for i in range(1, self.m + 1):
            out = out + powers[self.m - i].scale(self.form_value(i, x))
        return out

    def to_json(self) -> dict:
        s = self.spec
        forms = {}
        for i, table in self.forms.items():
            forms[str(i)] = [
                {"tuple": [b + 1 for b in key], "value": s.to_string(val)} for key, val in table.items() if val != 0
            ]
        return {"mu0": s.to_string(self.mu0.value), "mu": forms, "unique": self.unique}


@dataclass
class NotDecomposable:
    """No coefficients fit; ``monomial`` and ``entry`` name the offending equation."""

    monomial: tuple[int, ...]
    entry: tuple[int, int]
    row: int

    def to_json(self) -> dict:
        return {
            "not_decomposable": True,
            "monomial": [b + 1 for b in self.monomial],
            "entry": list(self.entry),
            "equation_row": self.row,
        }


def decompose_trace(G: SymMultiMap, probes: int = 20, seed: int = 0) -> TraceDecomposition | NotDecomposable:
    """Solve T(x) = mu0 x^m + sum mu_i(x) x^(m-i) by matching monomial coefficients."""
    m, n, spec = G.m, G.n, G.spec
    if not (spec.characteristic() == 0 or spec.characteristic() > m):
        raise GuardFailed(f"coefficient matching needs char 0 or char > {m}")
    N = n * n
    E = _unit_arrays(n, spec)
    unknowns: list[tuple[int, tuple]] = [(0, ())]
    for i in range(1, m + 1):
        unknowns += [(i, key) for key in itertools.combinations_with_replacement(range(N), i)]
    col = {u: c for c, u in enumerate(unknowns)}
    monomials = list(itertools.combinations_with_replacement(range(N), m))
    nn = n * n
    A = spec.zeros((len(monomials) * nn, len(unknowns)))
    rhs = spec.zeros(len(monomials) * nn)
    prod_cache: dict[tuple, np.ndarray] = {}
    for r, beta in enumerate(monomials):
        rhs[r * nn : (r + 1) * nn] = spec.reduce(G.tensor[beta] * _multiplicity(beta)).reshape(-1)
        for i in range(0, m + 1):
            for gamma, delta in _sub_multisets(beta, i):
                if delta not in prod_cache:
                    prod_cache[delta] = _ordered_products(delta, E, n, spec)
                c = col[(i, gamma)]
                block = spec.reduce(prod_cache[delta] * _multiplicity(gamma)).reshape(-1)
                A[r * nn : (r + 1) * nn, c] = spec.reduce(A[r * nn : (r + 1) * nn, c] + block)
    sol = solve(A, rhs, spec)
    if not sol.consistent:
        row = sol.inconsistent_row
        beta = monomials[row // nn]
        e = row % nn
        return NotDecomposable(beta, (e // n + 1, e % n + 1), row)
    forms: dict[int, dict] = {i: {} for i in range(1, m + 1)}
    for c, (i, key) in enumerate(unknowns[1:], start=1):
        forms[i][key] = spec.canon(sol.x[c])
    dec = TraceDecomposition(m, n, spec, Scalar(sol.x[0], spec), forms, unique=sol.nullity == 0)
    rng = np.random.default_rng(seed)
    for _ in range(probes):
        x = random_matrix(n, spec, rng) if spec.is_prime else Mat(rng.integers(-3, 4, (n, n)).tolist(), spec)
        if dec.evaluate(x) != trace_eval(G, x):
            raise AssertionError("trace decomposition failed its reconstruction probe")
    return dec


def from_trace_decomposition(dec: TraceDecomposition) -> SymMultiMap:
    """The symmetric m-linear map whose trace is mu0 x^m + sum mu_i(x) x^(m-i)."""
    m, n, spec = dec.m, dec.n, dec.spec
    if not factorial_nonzero(m, spec):
        raise GuardFailed(f"{m}! vanishes in {spec}")
    E = _unit_arrays(n, spec)
    inv_fact = spec.inv(math.factorial(m))
    coeffs = {}
    for key in itertools.combinations_with_replacement(range(n * n), m):
        total = spec.zeros((n, n))
        for perm in itertools.permutations(key):
            term = spec.reduce(_chain(perm, E, n, spec) * dec.mu0.value)
            for i in range(1, m + 1):
                val = dec.forms[i].get(tuple(sorted(perm[:i])), 0)
                if val != 0:
                    term = spec.reduce(term + _chain(perm[i:], E, n, spec) * val)
            total = spec.reduce(total + term)
        coeffs[tuple(b + 1 for b in key)] = spec.reduce(total * inv_fact)
    return SymMultiMap.from_sorted(m, n, spec, coeffs)


def _chain(seq, E, n, spec) -> np.ndarray:
    out = spec.eye(n)
    for b in seq:
        out = spec.reduce(out @ E[b])
    return out


def random_decomposition(m: int, n: int, spec: FieldSpec, seed=None) -> TraceDecomposition:
    if not spec.is_prime:
        raise RationalsNotSampled("random decompositions are drawn only over prime fields")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    forms = {}
    for i in range(1, m + 1):
        forms[i] = {
            key: int(rng.integers(0, spec.p)) for key in itertools.combinations_with_replacement(range(n * n), i)
        }
    return TraceDecomposition(m, n, spec, Scalar(int(rng.integers(0, spec.p)), spec), forms)


def trace_form_map(n: int, spec: FieldSpec) -> SymMultiMap:
    """G(x, y) = (tr(x) y + tr(y) x) / 2, whose trace is tr(x) x."""
    forms = {1: {(b,): 1 for b in range(n * n) if b // n == b % n}, 2: {}}
    dec = TraceDecomposition(2, n, spec, Scalar(0, spec), forms)
    return from_trace_decomposition(dec)
