"""Prime spectra of finite distributive c-posets and the Inc <-> operator translations."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from ._bits import bits, to_mask
from .encoding import EnumOperatorCode, pair, set_decode
from .order import CPoset
from .reports import ConsistencyError, PreconditionError, Report
from .topology import IncPredicate, SpaceWithBase, default_maxk, validate_space


class NotDistributiveError(PreconditionError):
    pass


@dataclass(frozen=True)
class SpectrumSpace:
    """Spec P: points are prime ideals (canonical bitmask order), beta(a) = V_a.

    Point labels are 0..m-1; ``primes[p]`` is the carrier-position mask of point p.
    Base index a is carrier position a, so beta(a) = V_{carrier[a]}.
    """

    source: CPoset
    primes: tuple[int, ...]
    space: SpaceWithBase

    @cached_property
    def v_masks(self) -> tuple[int, ...]:
        return self.space.beta_masks

    def prime_sets(self) -> list[frozenset[int]]:
        return [self.source.elements(q) for q in self.primes]

    @cached_property
    def basis_report(self) -> Report:
        return validate_space(self.space)

    def provenance(self) -> dict:
        return {
            "source_carrier": list(self.source.carrier),
            "primes": [{"point": p, "bitmask": q, "ideal": sorted(self.source.elements(q))}
                       for p, q in enumerate(self.primes)],
            "beta": {str(a): i for i, a in enumerate(self.source.carrier)},
        }


def _require_distributive(P: CPoset) -> None:
    if not P.validation.passed:
        raise PreconditionError("source is not a valid c-poset:\n" + P.validation.to_text())
    if not P.distributive:
        raise NotDistributiveError("source c-poset is not distributive; its spectrum is refused")


def _v_masks(P: CPoset, primes: tuple[int, ...]) -> list[int]:
    out = []
    for a in range(P.n):
        out.append(to_mask(p for p, q in enumerate(primes) if not q >> a & 1))
    return out


_SPECTRA: dict[CPoset, SpectrumSpace] = {}


def spectrum(P: CPoset) -> SpectrumSpace:
    cached = _SPECTRA.get(P)
    if cached is not None:
        return cached
    _require_distributive(P)
    primes = P.prime_masks
    vs = _v_masks(P, primes)
    if len(set(vs)) != len(vs):
        raise ConsistencyError("distinct elements share a basic open V_a on a distributive source")
    space = SpaceWithBase.from_masks(len(primes), vs)
    out = SpectrumSpace(P, primes, space)
    if len(_SPECTRA) > 4096:
        _SPECTRA.clear()
    _SPECTRA[P] = out
    return out


def v_of_set(P: CPoset, X: Iterable[int]) -> frozenset[frozenset[int]]:
    """V_X: primes not containing X."""
    sp = spectrum(P)
    xm = P.mask(X)
    return frozenset(P.elements(q) for q in sp.primes if xm & ~q)


def _vx(sp: SpectrumSpace, xm: int) -> int:
    out = 0
    for a in bits(xm):
        out |= sp.v_masks[a]
    return out


def _meet(P: CPoset, a: int, b: int) -> int | None:
    """Position of the greatest lower bound of positions a, b, if it exists."""
    lower = P.poset.below[a] & P.poset.below[b]
    for c in bits(lower):
        if P.poset.below[c] == lower:
            return c
    return None


def _join(P: CPoset, a: int, b: int) -> int | None:
    upper = P.poset.above[a] & P.poset.above[b]
    for c in bits(upper):
        if P.poset.above[c] == upper:
            return c
    return None


def check_lphi(P: CPoset) -> Report:
    """Exhaustive check of the five V-set identities on a distributive c-poset."""
    sp = spectrum(P)
    V = sp.v_masks
    n, car = P.n, P.carrier
    r = Report("V-set identities")

    bad = next((sorted(P.elements(x)) for x in range(1 << n) if _vx(sp, x) != _vx(sp, P.phi(x))), None)
    r.add("(i) V_X = V_phi(X)", bad is None, f"{1 << n} subsets", bad)

    # X = {} is reported on its own: a least element a has V_a = {} = V_{}, but a is not in phi({})
    bad = None
    for x in range(1, 1 << n):
        vx, px = _vx(sp, x), P.phi(x)
        for a in range(n):
            if (V[a] & ~vx == 0) != bool(px >> a & 1):
                bad = (car[a], sorted(P.elements(x)))
                break
        if bad:
            break
    r.add("(ii) V_a in V_X iff a in phi(X), X nonempty", bad is None, f"{n * ((1 << n) - 1)} pairs", bad)
    bad = next((car[a] for a in range(n) if V[a] == 0), None)
    r.add("(ii) V_a in V_X iff a in phi(X), X empty", bad is None, f"{n} elements", bad)

    below = P.poset.below
    bad = next(((car[a], car[b]) for a in range(n) for b in range(n)
                if (V[a] & ~V[b] == 0) != bool(below[b] >> a & 1)), None)
    r.add("(iii) V_a in V_b iff a <= b", bad is None, f"{n * n} pairs", bad)

    bad = None
    for a in range(n):
        for b in range(n):
            m = _meet(P, a, b)
            for c in range(n):
                if (V[a] & V[b] == V[c]) != (m == c):
                    bad = (car[a], car[b], car[c])
                    break
            if bad:
                break
        if bad:
            break
    r.add("(iv) V_a cap V_b = V_c iff a meet b = c", bad is None, f"{n ** 3} triples", bad)

    hyp = None
    for a in range(n):
        for b in range(n):
            j = _join(P, a, b)
            if j is not None and not P.phi((1 << a) | (1 << b)) >> j & 1:
                hyp = (car[a], car[b])
                break
        if hyp:
            break
    if hyp is not None:
        r.notes.append(f"(v) not applicable: join of {hyp[0]}, {hyp[1]} is outside phi({{{hyp[0]}, {hyp[1]}}})")
    else:
        bad = None
        for a in range(n):
            for b in range(n):
                j = _join(P, a, b)
                for c in range(n):
                    if (V[a] | V[b] == V[c]) != (j == c):
                        bad = (car[a], car[b], car[c])
                        break
                if bad:
                    break
            if bad:
                break
        r.add("(v) V_a cup V_b = V_c iff a join b = c", bad is None, f"{n ** 3} triples", bad)
    return r


def inc_from_operator(C: EnumOperatorCode, carrier: Iterable[int], maxk: int | None = None) -> IncPredicate:
    """Inc of the spectrum, read off the operator code without building the spectrum.

    Base index a is carrier position a; (i, k) is in Inc iff some <carrier[i], k'>
    is in C with D_k' nonempty and D_k' inside the carrier image of D_k.
    """
    carrier = tuple(sorted(carrier))
    n = len(carrier)
    idx = {x: i for i, x in enumerate(carrier)}
    if maxk is None:
        maxk = default_maxk(n)
    premises: list[tuple[int, int]] = []
    for x, k in C.decoded:
        d = set_decode(k)
        if not d or x not in idx or not d <= idx.keys():
            continue
        premises.append((idx[x], to_mask(idx[e] for e in d)))
    top = min(maxk, default_maxk(n))
    entries = set()
    for k in range(1, top + 1):
        for i, m in premises:
            if m & ~k == 0:
                entries.add((i, k))
    return IncPredicate(frozenset(entries), n, maxk, max(0, maxk - default_maxk(n)))


def operator_from_inc(inc: IncPredicate) -> EnumOperatorCode:
    """A = { <j, k> : (j, k) in Inc }, over base indices 0..n-1."""
    return EnumOperatorCode(frozenset(pair(j, k) for j, k in inc.entries))
