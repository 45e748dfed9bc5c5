import pytest
from hypothesis import given, settings

from stonebench.encoding import enum_apply, pair, set_encode
from stonebench.generator import gen_distributive_cposets
from stonebench.spectrum import (
    NotDistributiveError,
    check_lphi,
    inc_from_operator,
    operator_from_inc,
    spectrum,
    v_of_set,
)
from stonebench.topology import SpaceWithBase, inc_from_space, validate_space

from _util import antichain, chain, cposet_from_family, down, moore_cposets, oracle_primes, subsets

A, B, C = 0, 1, 2


def small_distributive():
    for n in range(5):
        yield from gen_distributive_cposets(n)


def test_spectrum_of_two_antichain():
    sp = spectrum(down(antichain(2)))
    assert sp.space.n_points == 2
    assert sp.prime_sets() == [{A}, {B}]
    # V_a = primes without a = {{b}}, the second point
    assert sp.v_masks == (0b10, 0b01)


def test_spectrum_of_two_chain():
    sp = spectrum(down(chain(2)))
    assert sp.space.n_points == 1
    assert sp.v_masks == (0, 1)


def test_spectrum_of_three_chain():
    sp = spectrum(down(chain(3)))
    assert sp.prime_sets() == [{A}, {A, B}]
    assert sp.v_masks == (0, 0b01, 0b11)


def test_spectrum_refuses_non_distributive():
    m3 = cposet_from_family([0, 1, 2], [frozenset(), {0}, {1}, {2}, {0, 1, 2}])
    with pytest.raises(NotDistributiveError):
        spectrum(m3)


def test_v_of_set_examples():
    P = down(chain(3))
    primes = frozenset(map(frozenset, [{A}, {A, B}]))
    assert v_of_set(P, []) == frozenset()
    assert v_of_set(P, [A, B, C]) == primes
    assert v_of_set(P, [B]) == {frozenset({A})}


def test_spectra_of_small_distributive_cposets_are_valid():
    for P in small_distributive():
        assert validate_space(spectrum(P).space).passed


@settings(max_examples=150, deadline=None)
@given(moore_cposets())
def test_spectrum_points_and_v_sets_match_oracle(P):
    if not P.distributive:
        return
    sp = spectrum(P)
    primes = sorted(oracle_primes(P), key=P.mask)
    assert sp.prime_sets() == primes
    for a in range(P.n):
        want = frozenset(I for I in primes if P.carrier[a] not in I)
        assert {frozenset(sp.prime_sets()[p]) for p in sp.space.beta_set(a)} == want


# -- V-set identities -------------------------------------------------------


def test_v_set_identities_on_a_downset_cposet_without_least_element():
    r = check_lphi(down(antichain(3)))
    assert r.passed, r.to_text()


def test_chain_fails_only_the_empty_set_case():
    # a is least: V_a = {} = V_{} although a is not in phi({})
    r = check_lphi(down(chain(2)))
    assert [c.name for c in r.failures()] == ["(ii) V_a in V_X iff a in phi(X), X empty"]
    assert r.get("(ii) V_a in V_X iff a in phi(X), X empty").witness == A
    assert r.get("(iii) V_a in V_b iff a <= b").passed


def _has_least(P):
    return any(P.poset.above[i] == P.full for i in range(P.n))


def test_empty_set_case_fails_exactly_when_there_is_a_least_element():
    for P in small_distributive():
        r = check_lphi(P)
        failed = {c.name for c in r.failures()}
        if _has_least(P):
            assert failed == {"(ii) V_a in V_X iff a in phi(X), X empty"}
        else:
            assert not failed, r.to_text()


def test_join_identity_is_gated_on_its_hypothesis():
    # in the 2-antichain with a top c, c is the join of a, b but lies outside phi({a, b}) = {a, b}
    from stonebench.order import FinitePoset

    r = check_lphi(down(FinitePoset.from_pairs([0, 1, 2], [(0, 2), (1, 2)])))
    assert any(n.startswith("(v) not applicable") for n in r.notes)


# -- Inc translations -------------------------------------------------------


def test_inc_from_operator_examples():
    P = down(chain(2))
    inc = inc_from_operator(P.operator, P.carrier)
    assert (A, set_encode({B})) in inc
    assert (B, set_encode({A})) not in inc
    assert all((i, set_encode({i})) in inc for i in range(2))


def test_symbolic_inc_equals_inc_of_the_spectrum():
    for P in small_distributive():
        sym = inc_from_operator(P.operator, P.carrier)
        assert sym.entries == inc_from_space(spectrum(P).space).entries


def test_symbolic_inc_respects_maxk():
    P = down(chain(3))
    inc = inc_from_operator(P.operator, P.carrier, maxk=3)
    assert all(k <= 3 for _, k in inc.entries)
    assert inc.entries == {e for e in inc_from_space(spectrum(P).space).entries if e[1] <= 3}


def test_operator_from_inc_reproduces_the_downset_closure():
    P = down(chain(3))
    op = operator_from_inc(inc_from_space(spectrum(P).space))
    for X in subsets(range(3)):
        want = frozenset(range(max(X) + 1)) if X else frozenset()
        assert enum_apply(op, X) == want


def test_operator_from_inc_on_disjoint_base_is_extensionally_reflexive():
    S = SpaceWithBase((0, 1, 2), (frozenset({0}), frozenset({1}), frozenset({2})))
    op = operator_from_inc(inc_from_space(S))
    reflexive = [pair(i, set_encode({i})) for i in range(3)]
    from stonebench.encoding import EnumOperatorCode

    for X in subsets(range(3)):
        assert enum_apply(op, X) == enum_apply(EnumOperatorCode(frozenset(reflexive)), X) == X


def test_inc_round_trip():
    for P in small_distributive():
        inc = inc_from_space(spectrum(P).space)
        back = inc_from_operator(operator_from_inc(inc), range(P.n))
        assert back.entries == inc.entries
