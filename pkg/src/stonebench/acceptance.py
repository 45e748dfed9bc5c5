"""The acceptance battery: one function per numbered criterion, each returning a Result.

Results hold counts and the first few counterexamples, never timings, so the
serialized battery is byte-identical across runs with the same seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .duality import (
    check_P_composition,
    check_T_composition,
    counit_map,
    functor_P_mor,
    functor_P_obj,
    functor_T_mor,
    unit_map,
)
from .encoding import EnumOperatorCode, enum_apply, pair, set_decode, set_encode, unpair
from .generator import (
    gen_distributive_cposets,
    gen_lattices,
    gen_spaces_upto,
    random_distributive_cposets,
    spectral_maps,
    strict_maps,
)
from .lattices import check_semilattice_duality, cposet_from_semilattice, m3, n5
from .order import (
    CPoset,
    NoSeparatingPrimeError,
    _down_directed_mask,
    _prime_verdict,
    check_dp_isomorphism,
    check_strict,
    prime_separation,
)
from .presentations import injectivize_base, relabel_cposet
from .spectrum import check_lphi, inc_from_operator, operator_from_inc, spectrum
from .topology import SpaceWithBase, check_spectral, classify, inc_from_space

MAX_EXAMPLES = 5


@dataclass
class Result:
    number: int
    title: str
    checked: int = 0
    failed: int = 0
    examples: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failed == 0 and self.checked > 0

    def tick(self, ok: bool, example: Any = None) -> None:
        self.checked += 1
        if not ok:
            self.failed += 1
            if len(self.examples) < MAX_EXAMPLES:
                self.examples.append(example)

    def to_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "checked": self.checked, "failed": self.failed, "examples": self.examples,
                "details": self.details}

    def line(self) -> str:
        return (f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}: {self.title} "
                f"({self.checked} checked, {self.failed} failed)")


def _cposets(max_n: int) -> list[CPoset]:
    return [P for n in range(max_n + 1) for P in gen_distributive_cposets(n)]


def _label(P: CPoset) -> dict:
    return {"carrier": list(P.carrier), "ideals": list(P.ideal_masks)}


def _space_label(S: SpaceWithBase) -> dict:
    return {"points": list(S.points), "base": list(S.beta_masks)}


def primality_criteria(seed: int = 42, max_n: int = 5, random_count: int = 500, random_max_n: int = 8) -> Result:
    r = Result(1, "the three primality criteria agree on every proper ideal")
    corpus = _cposets(max_n) + list(random_distributive_cposets(random_count, random_max_n, seed))
    for P in corpus:
        for m in P.ideal_masks:
            v = _prime_verdict(P, m)
            if v.proper:
                r.tick(v.agree, {"cposet": _label(P), "ideal": m})
    r.details = {"cposets": len(corpus), "random": random_count}
    return r


def prime_separation_all(max_n: int = 5) -> Result:
    r = Result(2, "a separating prime exists for every nonempty ideal and disjoint down-directed set")
    for P in _cposets(max_n):
        dd = [f for f in range(1, 1 << P.n) if _down_directed_mask(P, f)]
        for im in P.ideal_masks:
            if im == 0:
                continue
            for fm in dd:
                if im & fm:
                    continue
                try:
                    q = P.mask(prime_separation(P, P.elements(im), P.elements(fm)))
                    ok = q in P.prime_masks and im & ~q == 0 and not q & fm
                except NoSeparatingPrimeError:
                    ok = False
                r.tick(ok, {"cposet": _label(P), "ideal": im, "filter": fm})
    return r


def v_set_identities(max_n: int = 5) -> Result:
    r = Result(3, "the five V-set identities hold exhaustively")
    per_check: dict[str, int] = {}
    for P in _cposets(max_n):
        rep = check_lphi(P)
        for c in rep.failures():
            per_check[c.name] = per_check.get(c.name, 0) + 1
        r.tick(rep.passed, {"cposet": _label(P), "failed": [c.name for c in rep.failures()]})
    r.details = {"failures_by_identity": dict(sorted(per_check.items()))}
    return r


def space_round_trip(max_points: int = 5, max_base: int = 6) -> Result:
    r = Result(4, "unit map X -> TP(X) is a bijection with f^-1(V_A) = A")
    for S in gen_spaces_upto(max_points, max_base):
        u = unit_map(S)
        r.tick(u.passed, {"space": _space_label(S), "failed": [c.name for c in u.report.failures()]})
    return r


def cposet_round_trip(max_n: int = 5) -> Result:
    r = Result(5, "counit PT(P) -> P is a DP-isomorphism")
    for P in _cposets(max_n):
        c = counit_map(P)
        r.tick(c.passed, {"cposet": _label(P), "failed": [x.name for x in c.report.failures()]})
    return r


def presentation_translations(max_n: int = 5, max_points: int = 5, max_base: int = 6) -> Result:
    r = Result(6, "Inc computed from the operator equals Inc of the constructed spectrum")
    for P in _cposets(max_n):
        sym = inc_from_operator(P.operator, P.carrier)
        ext = inc_from_space(spectrum(P).space)
        r.tick(sym.entries == ext.entries, {"cposet": _label(P)})
    for S in gen_spaces_upto(max_points, max_base):
        inc = inc_from_space(S)
        back = inc_from_operator(operator_from_inc(inc), range(S.n_base))
        via_spectrum = inc_from_space(spectrum(functor_P_obj(S)).space)
        r.tick(back.entries == inc.entries and via_spectrum.entries == inc.entries, {"space": _space_label(S)})
    return r


def morphism_duality(max_n: int = 4, max_points: int = 4, max_base: int = 6, pair_max_base: int = 4) -> Result:
    r = Result(7, "dual maps of strict and spectral maps, and contravariant composition")
    Ps = _cposets(max_n)
    smaps = {(a, b): strict_maps(Ps[a], Ps[b]) for a in range(len(Ps)) for b in range(len(Ps))}
    counts = {"strict": 0, "spectral": 0, "strict_pairs": 0, "spectral_pairs": 0}
    for (a, b), fs in smaps.items():
        for f in fs:
            m = functor_T_mor(f, Ps[a], Ps[b])
            counts["strict"] += 1
            r.tick(check_spectral(m.point_map, m.source, m.target) and m.check(),
                   {"strict_map": sorted(f.items()), "source": _label(Ps[a]), "target": _label(Ps[b])})
    for a in range(len(Ps)):
        for b in range(len(Ps)):
            for c in range(len(Ps)):
                for f in smaps[a, b]:
                    for g in smaps[b, c]:
                        counts["strict_pairs"] += 1
                        r.tick(check_T_composition(f, g, Ps[a], Ps[b], Ps[c]),
                               {"strict_pair": [sorted(f.items()), sorted(g.items())]})
    Ss = list(gen_spaces_upto(max_points, max_base))
    PO = {S: functor_P_obj(S) for S in Ss}
    for S0 in Ss:
        for S1 in Ss:
            for f in spectral_maps(S0, S1):
                counts["spectral"] += 1
                g = functor_P_mor(f, S0, S1)
                r.tick(check_strict(PO[S1], PO[S0], g),
                       {"spectral_map": sorted(f.items()), "source": _space_label(S0), "target": _space_label(S1)})
    small = [S for S in Ss if S.n_base <= pair_max_base]
    pmaps = {(a, b): spectral_maps(small[a], small[b]) for a in range(len(small)) for b in range(len(small))}
    for a in range(len(small)):
        for b in range(len(small)):
            for c in range(len(small)):
                for f in pmaps[a, b]:
                    for g in pmaps[b, c]:
                        counts["spectral_pairs"] += 1
                        r.tick(check_P_composition(f, g, small[a], small[b], small[c]),
                               {"spectral_pair": [sorted(f.items()), sorted(g.items())]})
    r.details = counts
    return r


def lattice_duality(max_n: int = 5) -> Result:
    r = Result(8, "distributive lattices transport meet and join to the spectrum base")
    count = 0
    for n in range(1, max_n + 1):
        for L in gen_lattices(n, distributive_only=True):
            count += 1
            rep = check_semilattice_duality(L)
            r.tick(rep.passed, {"lattice_below": list(L.derived_below),
                                "failed": [c.name for c in rep.failures()]})
    for name, L in (("M3", m3()), ("N5", n5())):
        dist = cposet_from_semilattice(L).distributive
        r.tick(not dist, {"negative_control": name})
    r.details = {"distributive_lattices": count}
    return r


def _relabelings(P: CPoset, rng: random.Random) -> list[dict[int, int]]:
    n = P.n
    rev = {x: n - 1 - i for i, x in enumerate(P.carrier)}
    shifted = {x: 7 + 3 * i for i, x in enumerate(P.carrier)}
    perm = list(range(n))
    rng.shuffle(perm)
    return [rev, shifted, {x: perm[i] for i, x in enumerate(P.carrier)}]


def _with_duplicates(S: SpaceWithBase, rng: random.Random) -> SpaceWithBase:
    beta = list(S.beta)
    if beta:
        for _ in range(rng.randint(1, 3)):
            beta.insert(rng.randint(0, len(beta)), rng.choice(beta))
    return SpaceWithBase(S.points, S.base, tuple(beta))


def normalization(seed: int = 42, max_n: int = 5, max_points: int = 5, max_base: int = 6) -> Result:
    r = Result(9, "relabeling and base injectivization preserve structure")
    rng = random.Random(seed)
    for P in _cposets(max_n):
        for g in _relabelings(P, rng):
            Q = relabel_cposet(P, g)
            back = relabel_cposet(Q, {v: k for k, v in g.items()})
            same = all(back.phi(m) == P.phi(m) for m in range(1 << P.n))
            r.tick(check_dp_isomorphism(P, Q, g) and same, {"cposet": _label(P), "relabeling": sorted(g.items())})
    for S in gen_spaces_upto(max_points, max_base):
        T = _with_duplicates(S, rng)
        I, u = injectivize_base(T)
        ok = (I.injective and I.opens == T.opens and set(I.beta_masks) == set(T.beta_masks)
              and all(T.beta_masks[u[i]] == I.beta_masks[i] for i in range(len(u))))
        r.tick(ok, {"space": _space_label(S), "beta": list(T.beta)})
    return r


def encoding_round_trips(seed: int = 42, exhaustive_bits: int = 16, random_count: int = 100_000,
                         monotone_count: int = 10_000) -> Result:
    r = Result(10, "pairing and set-code round trips, enumeration operator monotonicity")
    rng = random.Random(seed)
    bad_pair = bad_set = 0
    ex = []
    for n in range(1 << exhaustive_bits):
        if pair(*unpair(n)) != n:
            bad_pair += 1
            ex.append(("pair", n))
        if set_encode(set_decode(n)) != n:
            bad_set += 1
            ex.append(("set", n))
    for _ in range(random_count):
        x, y = rng.getrandbits(40), rng.getrandbits(40)
        n = rng.getrandbits(64) | 1 << 16
        if unpair(pair(x, y)) != (x, y) or pair(*unpair(n)) != n:
            bad_pair += 1
            ex.append(("pair", x, y, n))
        if set_encode(set_decode(n)) != n:
            bad_set += 1
            ex.append(("set", n))
    total = (1 << exhaustive_bits) + random_count
    r.checked += 2 * total
    r.failed += bad_pair + bad_set
    r.examples += ex[:MAX_EXAMPLES]
    mono_bad = 0
    for _ in range(monotone_count):
        A = EnumOperatorCode(frozenset(pair(rng.randrange(12), rng.getrandbits(6)) for _ in range(rng.randrange(1, 10))))
        B = {x for x in range(12) if rng.random() < 0.4}
        B2 = B | {x for x in range(12) if rng.random() < 0.3}
        r.checked += 1
        if not enum_apply(A, B) <= enum_apply(A, B2):
            mono_bad += 1
            r.failed += 1
            if len(r.examples) < MAX_EXAMPLES:
                r.examples.append(("monotone", sorted(A.pairs), sorted(B), sorted(B2)))
    r.details = {"pair_failures": bad_pair, "set_failures": bad_set, "monotone_failures": mono_bad,
                 "exhaustive_below": 1 << exhaustive_bits, "random": random_count, "monotone": monotone_count}
    return r


def zero_one_base(max_points: int = 5, max_base: int = 6) -> Result:
    r = Result(11, "0-base iff empty set in base, 1-base iff whole space in base")
    for S in gen_spaces_upto(max_points, max_base):
        c = classify(S)
        if not c.flags["almost_sober"]:
            continue
        f = c.flags
        r.tick(f["zero_base"] == f["has_empty_in_base"] and f["one_base"] == f["has_whole_in_base"],
               {"space": _space_label(S), "flags": f})
    return r


CRITERIA: dict[int, Callable[..., Result]] = {
    1: primality_criteria,
    2: prime_separation_all,
    3: v_set_identities,
    4: space_round_trip,
    5: cposet_round_trip,
    6: presentation_translations,
    7: morphism_duality,
    8: lattice_duality,
    9: normalization,
    10: encoding_round_trips,
    11: zero_one_base,
}
SEEDED = {1, 9, 10}


def run_criterion(number: int, seed: int = 42) -> Result:
    fn = CRITERIA[number]
    return fn(seed=seed) if number in SEEDED else fn()


def run_suite(seed: int = 42, only: list[int] | None = None) -> dict:
    results = [run_criterion(k, seed) for k in sorted(CRITERIA) if only is None or k in only]
    return {"seed": seed, "passed": all(x.passed for x in results), "criteria": [x.to_dict() for x in results]}


def suite_lines(report: dict) -> list[str]:
    return [f"criterion {c['criterion']:2d} {'PASS' if c['passed'] else 'FAIL'}: {c['title']} "
            f"({c['checked']} checked, {c['failed']} failed)" for c in report["criteria"]]
