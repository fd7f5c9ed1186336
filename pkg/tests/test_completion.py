import itertools

import pytest

from rankcomm.completion import SupportPattern, complete_to_rank, units_matrix, verify_completion
from rankcomm.errors import BudgetExceeded, IndexOutOfRange, Infeasible
from rankcomm.field import FieldSpec
from rankcomm.matrix import Mat

from oracles import minor_rank

GF3, GF5, GF7 = (FieldSpec.prime(p) for p in (3, 5, 7))


def pat(text, n):
    return SupportPattern.parse(text, n)


def brute_verify(pattern, support, k, p):
    """Every nonzero fill, checked with the cofactor rank oracle."""
    n = pattern.n
    for fill in itertools.product(range(1, p), repeat=pattern.v + 1):
        m = [[0] * n for _ in range(n)]
        for (i, j), z in zip(pattern.positions, fill):
            m[i - 1][j - 1] = z
        for i, j in support:
            m[i - 1][j - 1] = fill[-1]
        if minor_rank(m, p) != k:
            return False
    return True


def test_parse_and_properties():
    s = pat("1,1;2,3", 3)
    assert s.positions == ((1, 1), (2, 3)) and s.is_transversal() and str(s) == "1,1;2,3"
    assert not pat("1,1;1,2", 3).is_transversal()
    assert pat("", 3).v == 0
    with pytest.raises(IndexOutOfRange):
        pat("1,4", 3)
    with pytest.raises(ValueError):
        pat("1,1;1,1", 3)


def test_single_unit_to_full_rank():
    c = complete_to_rank(pat("1,1", 3), 3)
    assert c.support == [(2, 2), (3, 3)]
    assert c.method == "lemma1_fresh"
    assert c.certificate[0]["passed"] and c.certificate[0]["checks"] == 16


def test_empty_completion():
    c = complete_to_rank(pat("1,2;2,1", 3), 2)
    assert c.B.is_zero()
    assert c.method in ("lemma1_fresh", "empty")


def test_same_row_pattern():
    c = complete_to_rank(pat("1,1;1,2", 3), 3)
    assert c.support == [(2, 2), (3, 3)]
    assert c.certificate[0]["checks"] == 64
    assert brute_verify(c.pattern, c.support, 3, 5)


def test_infeasible_full_block():
    with pytest.raises(Infeasible) as err:
        complete_to_rank(pat("1,1;1,2;2,1;2,2", 2), 2, GF3)
    assert err.value.bound is not None


def test_verify_examples():
    p = pat("1,1", 3)
    ok = verify_completion(p, units_matrix(3, [(2, 2), (3, 3)], GF5), 3, GF5)
    assert ok.passed and ok.checks == 16
    bad = verify_completion(p, units_matrix(3, [(2, 2)], GF5), 3, GF5)
    assert not bad.passed and bad.witness == (1, 1) and bad.achieved_rank == 2
    bad = verify_completion(p, units_matrix(3, [(1, 2)], GF5), 2, GF5)
    assert not bad.passed and bad.witness == (1, 1) and bad.achieved_rank == 1


def test_verify_random_mode_and_budget():
    p = pat("1,1", 3)
    B = units_matrix(3, [(2, 2), (3, 3)], GF5)
    v = verify_completion(p, B, 3, GF7, mode=("random", 40, 3))
    assert v.passed and v.checks == 40
    with pytest.raises(BudgetExceeded):
        verify_completion(p, B, 3, GF7, budget=10)


def test_overlap_rejected():
    with pytest.raises(ValueError):
        verify_completion(pat("1,1", 2), units_matrix(2, [(1, 1)], GF5), 1, GF5)


@pytest.mark.parametrize("n", [3, 4])
def test_transversal_patterns_use_fresh_recipe(n):
    units = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    for v in (1, 2):
        for positions in itertools.combinations(units, v):
            sp = SupportPattern(n, positions)
            if not sp.is_transversal():
                continue
            for k in range(max(v, 2), n + 1):
                c = complete_to_rank(sp, k, (GF5, GF7))
                assert c.method == "lemma1_fresh"
                assert len(c.support) == k - v


def test_returned_completions_pass_brute_oracle():
    # cofactor-rank oracle on a sample of non-transversal patterns
    for text, k in [("1,1;1,2", 2), ("1,1;2,1", 3), ("2,2;2,3", 3), ("1,3;3,3", 2)]:
        c = complete_to_rank(pat(text, 3), k)
        assert brute_verify(c.pattern, c.support, k, 5)
        assert verify_completion(c.pattern, Mat(c.B.data, GF7), k, GF7).passed


def test_completion_json_shape():
    out = complete_to_rank(pat("1,1;1,2", 3), 3).to_json()
    assert set(out) == {"pattern", "k", "B", "B_support", "method", "certificate"}
    assert out["B_support"] == [[2, 2], [3, 3]]
