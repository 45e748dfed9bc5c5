import pytest
from hypothesis import given, strategies as st

from stonebench.encoding import (
    MAX_SET_ELEMENT,
    CodeOverflowError,
    EnumOperatorCode,
    enum_apply,
    pair,
    set_decode,
    set_encode,
    unpair,
)

naturals = st.integers(min_value=0, max_value=2**70)
small_sets = st.frozensets(st.integers(min_value=0, max_value=200), max_size=12)


def _pair_by_counting(x, y):
    # walk the diagonals until (x, y) comes up
    n = 0
    for s in range(x + y + 1):
        for a in range(s + 1):
            if (a, s - a) == (x, y):
                return n
            n += 1
    raise AssertionError


@pytest.mark.parametrize("x,y,code", [(0, 0, 0), (1, 2, 7), (2, 1, 8)])
def test_pair_examples(x, y, code):
    assert pair(x, y) == code
    assert unpair(code) == (x, y)


def test_pair_matches_diagonal_walk():
    for x in range(12):
        for y in range(12):
            assert pair(x, y) == _pair_by_counting(x, y)


@pytest.mark.parametrize("k,s", [(0, set()), (5, {0, 2}), (6, {1, 2}), (8, {3})])
def test_set_code_examples(k, s):
    assert set_decode(k) == s
    assert set_encode(s) == k


def test_rejects_negative_and_non_integers():
    with pytest.raises(ValueError):
        pair(-1, 0)
    with pytest.raises(TypeError):
        pair(1.5, 0)
    with pytest.raises(TypeError):
        set_decode(True)


def test_huge_set_element_is_refused_not_wrapped():
    with pytest.raises(CodeOverflowError):
        set_encode({MAX_SET_ELEMENT + 1})


def test_large_codes_stay_exact():
    x, y = 2**80 + 3, 2**75
    assert unpair(pair(x, y)) == (x, y)


@given(naturals, naturals)
def test_unpair_inverts_pair(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(naturals)
def test_pair_inverts_unpair(n):
    assert pair(*unpair(n)) == n


@given(small_sets)
def test_set_round_trip(s):
    assert set_decode(set_encode(s)) == s


@given(st.integers(min_value=0, max_value=2**200))
def test_code_round_trip(k):
    assert set_encode(set_decode(k)) == k


@pytest.mark.parametrize(
    "codes,B,out",
    [
        ([], {0, 1}, set()),
        ([pair(3, 0)], set(), {3}),
        ([pair(1, set_encode({0}))], {5}, set()),
    ],
)
def test_enum_apply_examples(codes, B, out):
    assert enum_apply(EnumOperatorCode(frozenset(codes)), B) == out


def _gamma_by_definition(A, B):
    out = set()
    for p in A.pairs:
        x, k = unpair(p)
        if set_decode(k) <= set(B):
            out.add(x)
    return out


operators = st.builds(
    lambda xs: EnumOperatorCode(frozenset(pair(x, k) for x, k in xs)),
    st.lists(st.tuples(st.integers(0, 9), st.integers(0, 1023)), max_size=15),
)
subsets = st.frozensets(st.integers(0, 9))


@given(operators, subsets)
def test_enum_apply_matches_definition(A, B):
    assert enum_apply(A, B) == _gamma_by_definition(A, B)


@given(operators, subsets, subsets)
def test_enum_apply_monotone(A, B, extra):
    assert enum_apply(A, B) <= enum_apply(A, B | extra)


@given(operators, st.frozensets(st.integers(0, 9), max_size=6))
def test_enum_apply_algebraic(A, B):
    from itertools import combinations

    parts = set()
    for r in range(len(B) + 1):
        for F in combinations(sorted(B), r):
            parts |= enum_apply(A, F)
    assert enum_apply(A, B) == parts


@given(operators)
def test_json_forms_round_trip(A):
    assert EnumOperatorCode.from_json(A.to_json("codes")) == A
    assert EnumOperatorCode.from_json(A.to_json("objects")) == A


def test_offending_codes_name_elements_outside_carrier():
    A = EnumOperatorCode.from_entries([(0, {1}), (4, {0}), (0, {7})])
    assert sorted(A.offending({0, 1})) == sorted([pair(4, 1), pair(0, 128)])
