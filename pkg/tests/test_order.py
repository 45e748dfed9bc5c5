import pytest
from hypothesis import given, settings

from stonebench.encoding import EnumOperatorCode, pair, set_encode
from stonebench.order import (
    CPoset,
    FinitePoset,
    check_dp_isomorphism,
    check_strict,
    closure,
    enumerate_ideals,
    enumerate_primes,
    is_distributive,
    is_prime,
    lower_bounds,
    prime_separation,
    upper_bounds,
    validate_cposet,
)
from stonebench.presentations import relabel_cposet
from stonebench.reports import PreconditionError

from _util import (
    antichain,
    chain,
    cposet_from_family,
    down,
    moore_cposets,
    oracle_distributive,
    oracle_ideals,
    oracle_primes,
    subsets,
)

A, B, C = 0, 1, 2
EMPTY = down(FinitePoset.from_pairs([], []))


def m3_ideals():
    # ideals: {}, three atoms, everything
    return cposet_from_family([0, 1, 2], [frozenset(), {0}, {1}, {2}, {0, 1, 2}])


# -- validation --------------------------------------------------------------


def test_chain_downset_operator_is_valid():
    assert validate_cposet(down(chain(2))).passed


def test_missing_extensivity_pair_is_reported():
    P = down(chain(2))
    op = EnumOperatorCode(P.operator.pairs - {pair(A, set_encode({A}))})
    r = validate_cposet(CPoset(P.poset, op))
    assert not r.passed
    ext = r.get("extensive")
    assert not ext.passed and ext.detail == "not extensive" and ext.witness == [A]


def test_empty_carrier_is_valid():
    assert validate_cposet(EMPTY).passed


def test_operator_leaving_the_carrier_is_reported():
    P = down(chain(2))
    op = EnumOperatorCode(P.operator.pairs | {pair(7, set_encode({A}))})
    assert not validate_cposet(CPoset(P.poset, op)).passed


def test_order_must_match_the_closure():
    # operator is the downset closure of a chain, order claims an antichain
    P = down(chain(2))
    r = validate_cposet(CPoset(antichain(2), P.operator))
    assert not r.get("x <= y iff phi(x) subset phi(y)").passed


# -- closure, bounds, ideals ------------------------------------------------


def test_closure_examples():
    assert closure(down(chain(2)), []) == frozenset()
    assert closure(down(antichain(2)), [A]) == {A}
    assert closure(down(chain(2)), [B]) == {A, B}


def test_bounds_examples():
    ch, an = down(chain(2)), down(antichain(2))
    assert lower_bounds(ch, [A, B]) == {A}
    assert lower_bounds(an, [A, B]) == frozenset()
    assert lower_bounds(ch, []) == {A, B}
    assert upper_bounds(ch, [A]) == {A, B}
    assert upper_bounds(an, [A, B]) == frozenset()
    assert upper_bounds(ch, []) == {A, B}


def test_ideal_examples():
    assert set(enumerate_ideals(down(chain(2)))) == {frozenset(), frozenset({A}), frozenset({A, B})}
    assert set(enumerate_ideals(down(antichain(2)))) == set(subsets([A, B]))
    assert set(enumerate_ideals(EMPTY)) == {frozenset()}


def test_ideal_lattice_operations():
    L = enumerate_ideals(m3_ideals())
    assert L.meet({0}, {1}) == frozenset()
    assert L.join({0}, {1}) == {0, 1, 2}


# -- primes -----------------------------------------------------------------


def test_prime_examples():
    ch, an = down(chain(2)), down(antichain(2))
    assert is_prime(ch, [A]).prime
    v = is_prime(ch, [A, B])
    assert not v.prime and not v.proper
    assert is_prime(an, [A]).prime


def test_enumerate_primes_examples():
    assert enumerate_primes(down(chain(3))) == [{A}, {A, B}]
    assert enumerate_primes(down(antichain(2))) == [{A}, {B}]
    assert enumerate_primes(down(chain(1))) == []


def test_three_criteria_agree_with_a_witness_on_failure():
    # in the antichain {a,b,c}, {a} is an ideal whose complement {b,c} has no lower bound
    v = is_prime(down(antichain(3)), [A])
    assert v.agree and not v.prime
    assert v.witnesses["complement_filter"][0] == "no common lower bound"


# -- distributivity ---------------------------------------------------------


def test_downset_cposets_are_distributive():
    for P in (chain(3), antichain(3), EMPTY.poset):
        assert is_distributive(down(P))


def test_m3_ideal_lattice_is_not_distributive():
    assert validate_cposet(m3_ideals()).passed
    assert not is_distributive(m3_ideals())


# -- prime separation -------------------------------------------------------


def test_prime_separation_takes_the_smallest_bitmask():
    assert prime_separation(down(chain(3)), [A], [C]) == {A}


def test_prime_separation_antichain():
    assert prime_separation(down(antichain(2)), [A], [B]) == {A}


def test_prime_separation_rejects_intersecting_sets():
    with pytest.raises(PreconditionError):
        prime_separation(down(chain(3)), [A], [A, B])


def test_prime_separation_rejects_non_ideal_and_non_directed():
    with pytest.raises(PreconditionError):
        prime_separation(down(chain(3)), [B], [C])
    with pytest.raises(PreconditionError):
        prime_separation(down(antichain(3)), [A], [B, C])


def test_prime_separation_refuses_non_distributive():
    with pytest.raises(PreconditionError):
        prime_separation(m3_ideals(), [0], [1])


def test_prime_separation_on_a_v_shape():
    # a, b < c: the ideal {a, b} is itself prime and avoids c
    P = down(FinitePoset.from_pairs([0, 1, 2], [(0, 2), (1, 2)]))
    assert prime_separation(P, [0, 1], [2]) == {0, 1}


# -- DP-isomorphisms and strict maps ----------------------------------------


def test_dp_isomorphism_examples():
    ch, an = down(chain(2)), down(antichain(2))
    assert check_dp_isomorphism(ch, ch, {A: A, B: B})
    assert not check_dp_isomorphism(ch, an, {A: A, B: B})
    assert not check_dp_isomorphism(ch, an, {A: B, B: A})
    moved = relabel_cposet(ch, {A: 5, B: 9})
    assert check_dp_isomorphism(ch, moved, {A: 5, B: 9})


def test_strict_examples():
    ch = down(chain(3))
    assert check_strict(ch, ch, {A: A, B: B, C: C})
    # the singleton has no primes, so the condition is vacuous
    assert check_strict(down(antichain(2)), down(chain(1)), {A: A, B: A})
    moved = relabel_cposet(ch, {A: 2, B: 1, C: 0})
    assert check_strict(ch, moved, {A: 2, B: 1, C: 0})


def test_strict_rejects_partial_maps():
    with pytest.raises(ValueError):
        check_strict(down(chain(2)), down(chain(2)), {A: A})


def _strict_oracle(P0, P1, f):
    primes0 = oracle_primes(P0)
    return all(frozenset(x for x in P0.carrier if f[x] in I) in primes0 for I in oracle_primes(P1))


def test_strict_matches_oracle_on_small_chains():
    from itertools import product

    for P0, P1 in [(down(chain(2)), down(chain(3))), (down(antichain(2)), down(chain(2)))]:
        for vals in product(P1.carrier, repeat=P0.n):
            f = dict(zip(P0.carrier, vals))
            assert check_strict(P0, P1, f) == _strict_oracle(P0, P1, f)


# -- properties against independent oracles --------------------------------


@settings(max_examples=150, deadline=None)
@given(moore_cposets())
def test_ideals_match_oracle(P):
    assert set(enumerate_ideals(P)) == oracle_ideals(P)


@settings(max_examples=150, deadline=None)
@given(moore_cposets())
def test_closure_is_a_closure(P):
    for X in subsets(P.carrier):
        c = closure(P, X)
        assert X <= c and closure(P, c) == c
        for Y in subsets(P.carrier):
            if X <= Y:
                assert c <= closure(P, Y)


@settings(max_examples=150, deadline=None)
@given(moore_cposets())
def test_distributivity_matches_oracle(P):
    assert is_distributive(P) == oracle_distributive(P)


@settings(max_examples=150, deadline=None)
@given(moore_cposets())
def test_primes_match_oracle_on_distributive(P):
    if is_distributive(P):
        assert set(enumerate_primes(P)) == oracle_primes(P)
        for I in enumerate_ideals(P):
            assert is_prime(P, I).agree or not is_prime(P, I).proper


@settings(max_examples=100, deadline=None)
@given(moore_cposets())
def test_prime_separation_finds_a_valid_prime(P):
    if not is_distributive(P):
        return
    primes = oracle_primes(P)
    for I in enumerate_ideals(P):
        if not I:
            continue
        for F in subsets(P.carrier):
            if not F or F & I:
                continue
            if not all(lower_bounds(P, {x, y}) & F for x in F for y in F):
                continue
            Q = prime_separation(P, I, F)
            assert Q in primes and I <= Q and not Q & F


@settings(max_examples=100, deadline=None)
@given(moore_cposets())
def test_identity_is_strict_and_an_isomorphism(P):
    ident = {x: x for x in P.carrier}
    assert check_dp_isomorphism(P, P, ident)
    assert check_strict(P, P, ident)
