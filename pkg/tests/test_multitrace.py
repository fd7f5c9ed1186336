import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankcomm.commutant import MatrixSelector
from rankcomm.errors import GuardFailed, UnsupportedK
from rankcomm.field import FieldSpec
from rankcomm.matrix import Mat, commutator, matrix_unit, random_matrix, random_rank_k
from rankcomm.multitrace import (
    MultiLinearMap,
    NotDecomposable,
    SymMultiMap,
    TraceDecomposition,
    corner_map,
    decompose_trace,
    from_trace_decomposition,
    parity_indices,
    parity_profile,
    power_map,
    random_decomposition,
    random_symmetric,
    recheck_trace_violation,
    replay_trace_proof,
    square_map,
    symmetrize,
    trace_eval,
    trace_form_map,
    vandermonde_extract,
    vandermonde_system,
    verify_trace_commuting,
)

GF3, GF5, GF7, GF11 = (FieldSpec.prime(p) for p in (3, 5, 7, 11))


def product_raw(m, n, spec):
    def fn(*xs):
        out = xs[0]
        for x in xs[1:]:
            out = out @ x
        return out

    return MultiLinearMap.from_function(m, n, spec, fn)


def test_symmetrize_product():
    G = symmetrize(product_raw(2, 3, GF7))
    assert G == square_map(3, GF7)
    x = random_matrix(3, GF7, seed=1)
    assert trace_eval(G, x) == (x @ x).scale(2)


@pytest.mark.parametrize("m, p", [(2, 7), (3, 7), (2, 11)])
def test_symmetrize_scales_trace_and_symmetric_input(m, p):
    spec = FieldSpec.prime(p)
    raw = MultiLinearMap(m, 2, spec, np.random.default_rng(m).integers(0, p, (4,) * m + (2, 2)))
    G = symmetrize(raw)
    x = random_matrix(2, spec, seed=p)
    assert trace_eval(G, x) == trace_eval(raw, x).scale(math.factorial(m))
    again = symmetrize(G)
    assert np.array_equal(again.tensor, spec.reduce(G.tensor * math.factorial(m)))
    assert trace_eval(again, x) == trace_eval(raw, x).scale(math.factorial(m) ** 2)


def test_symmetrize_guard():
    with pytest.raises(GuardFailed):
        symmetrize(product_raw(3, 2, GF3))


def test_trace_eval_examples():
    G = square_map(3, GF7)
    e = lambda i, j: matrix_unit(i, j, 3, GF7)  # noqa: E731
    assert trace_eval(G, e(1, 1)) == e(1, 1).scale(2)
    assert trace_eval(G, Mat.zero(3, GF7)).is_zero()
    assert trace_eval(G, e(1, 2) + e(2, 1)) == (e(1, 1) + e(2, 2)).scale(2)


def test_sym_map_rejects_asymmetric():
    with pytest.raises(ValueError):
        SymMultiMap(2, 2, GF7, product_raw(2, 2, GF7).tensor)


def test_parity_indices():
    assert parity_indices(2) == (1, 0, 2)
    assert parity_indices(3) == (1, 1, 4)
    assert parity_indices(4) == (2, 1, 4)


def test_extract_examples():
    e = lambda i, j: matrix_unit(i, j, 3, GF7)  # noqa: E731
    assert vandermonde_extract(square_map(3, GF7), e(1, 1) + e(2, 2), e(3, 3)).is_zero()

    def sandwich(x, y):
        return e(1, 1) @ x @ e(1, 1) @ y

    G = symmetrize(MultiLinearMap.from_function(2, 3, GF7, sandwich))
    rng = np.random.default_rng(4)
    c, B = random_matrix(3, GF7, rng), random_matrix(3, GF7, rng)
    assert vandermonde_extract(G, c, B) == commutator(trace_eval(G, c), c)
    with pytest.raises(GuardFailed):
        vandermonde_extract(power_map(3, 3, GF5), c.__class__.zero(3, GF5), Mat.zero(3, GF5))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(2, 3, 7), (3, 3, 7), (2, 4, 11), (3, 3, 11)]))
def test_extraction_oracle_and_profile(seed, shape):
    m, n, p = shape
    spec = FieldSpec.prime(p)
    rng = np.random.default_rng(seed)
    G = random_symmetric(m, n, spec, rng)
    c, B = random_matrix(n, spec, rng), random_matrix(n, spec, rng)
    _, _, coefs = vandermonde_system(G, c, B)
    assert coefs[0] == commutator(trace_eval(G, c), c)
    assert coefs == parity_profile(G, c, B).unknowns()


def test_verify_trace_examples():
    sel = MatrixSelector.rank_exact(3)
    assert verify_trace_commuting(square_map(3, GF7), MatrixSelector("all"), ("random", 30, 2)).passed
    zero = SymMultiMap.from_sorted(2, 3, GF7, {})
    assert verify_trace_commuting(zero, sel, ("random", 30, 2)).passed
    v = verify_trace_commuting(corner_map(3, GF7), sel, ("random", 50, 2))
    assert not v.passed and v.witness.rank() == 3


def test_replay_trace():
    out = replay_trace_proof(square_map(3, GF7), 3)
    assert out.ok and out.cross_check["passed"]
    bad = replay_trace_proof(corner_map(3, GF7), 3)
    assert bad.verdict == "violation" and recheck_trace_violation(corner_map(3, GF7), bad.violation)
    with pytest.raises(UnsupportedK):
        replay_trace_proof(square_map(3, GF7), 2)
    with pytest.raises(GuardFailed):
        replay_trace_proof(square_map(3, GF5), 3)


def test_decompose_examples():
    dec = decompose_trace(square_map(3, GF7))
    assert isinstance(dec, TraceDecomposition) and dec.mu0.value == 2
    assert not any(dec.forms[1].values()) and not any(dec.forms[2].values())
    dec = decompose_trace(trace_form_map(3, GF7))
    assert dec.mu0.value == 0 and not any(dec.forms[2].values())
    assert {k for k, v in dec.forms[1].items() if v} == {(0,), (4,), (8,)}
    x = random_matrix(3, GF7, seed=8)
    assert dec.form_value(1, x) == sum(int(x.data[i, i]) for i in range(3)) % 7
    bad = decompose_trace(corner_map(3, GF7))
    assert isinstance(bad, NotDecomposable)


@pytest.mark.parametrize("seed", range(40))
def test_decompose_roundtrip(seed):
    dec = random_decomposition(2, 3, GF7, seed)
    G = from_trace_decomposition(dec)
    x = random_matrix(3, GF7, seed=seed + 1000)
    assert trace_eval(G, x) == dec.evaluate(x)
    back = decompose_trace(G)
    assert back.unique and back.mu0 == dec.mu0 and back.forms == dec.forms


def test_decomposable_traces_commute_on_rank_k():
    G = from_trace_decomposition(random_decomposition(2, 3, GF7, 3))
    for s in range(10):
        x = random_rank_k(3, 3, GF7, seed=s)
        assert commutator(trace_eval(G, x), x).is_zero()


def test_json_roundtrip():
    G = random_symmetric(2, 2, GF7, seed=1)
    assert SymMultiMap.from_json(G.to_json()) == G
    assert SymMultiMap.from_json(corner_map(3, GF7).to_json()) == corner_map(3, GF7)
    dec = decompose_trace(square_map(3, GF7)).to_json()
    assert dec["mu0"] == "2" and dec["mu"] == {"1": [], "2": []}
