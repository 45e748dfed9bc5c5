"""Finite posets and c-posets: closure operators given by enumeration-operator codes.

Subsets of a carrier are bitmasks over carrier *positions* (the carrier sorted
ascending). ``CPoset.closure_table`` holds phi on every subset, so every
"for all subsets" check below is exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from ._bits import bits, check_size, to_mask
from .encoding import EnumOperatorCode, pair, set_encode
from .reports import ConsistencyError, PreconditionError, Report


class NoSeparatingPrimeError(LookupError):
    pass


@dataclass(frozen=True)
class FinitePoset:
    carrier: tuple[int, ...]
    leq: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(sorted(set(self.carrier))))
        object.__setattr__(self, "leq", frozenset((a, b) for a, b in self.leq))

    @classmethod
    def from_pairs(cls, carrier: Iterable[int], pairs: Iterable[tuple[int, int]], reflexive=True):
        carrier = tuple(carrier)
        rel = set(map(tuple, pairs))
        if reflexive:
            rel |= {(a, a) for a in carrier}
        return cls(carrier, frozenset(rel))

    @classmethod
    def from_masks(cls, carrier: Iterable[int], below: Iterable[int]) -> FinitePoset:
        """Build from ``below[i]`` = positions j with carrier[j] <= carrier[i]."""
        carrier = tuple(sorted(carrier))
        rel = {(carrier[j], carrier[i]) for i, m in enumerate(below) for j in bits(m)}
        return cls(carrier, frozenset(rel))

    @property
    def n(self) -> int:
        return len(self.carrier)

    @cached_property
    def index(self) -> dict[int, int]:
        return {x: i for i, x in enumerate(self.carrier)}

    @cached_property
    def below(self) -> tuple[int, ...]:
        """below[i]: mask of positions j with carrier[j] <= carrier[i]."""
        idx = self.index
        out = [0] * self.n
        for a, b in self.leq:
            if a in idx and b in idx:
                out[idx[b]] |= 1 << idx[a]
        return tuple(out)

    @cached_property
    def above(self) -> tuple[int, ...]:
        idx = self.index
        out = [0] * self.n
        for a, b in self.leq:
            if a in idx and b in idx:
                out[idx[a]] |= 1 << idx[b]
        return tuple(out)

    def le(self, a: int, b: int) -> bool:
        return (a, b) in self.leq

    def mask(self, xs: Iterable[int]) -> int:
        idx = self.index
        try:
            return to_mask(idx[x] for x in xs)
        except KeyError as e:
            raise ValueError(f"element {e.args[0]!r} is outside the carrier") from None

    def elements(self, mask: int) -> frozenset[int]:
        return frozenset(self.carrier[i] for i in bits(mask))

    def validate(self) -> Report:
        r = Report("poset")
        stray = sorted(p for p in self.leq if p[0] not in self.index or p[1] not in self.index)
        r.add("relation within carrier", not stray, witness=stray[:1] or None)
        missing = [a for a in self.carrier if (a, a) not in self.leq]
        r.add("reflexive", not missing, witness=missing[:1] or None)
        anti = sorted((a, b) for a, b in self.leq if a != b and (b, a) in self.leq)
        r.add("antisymmetric", not anti, witness=anti[:1] or None)
        below = self.below
        trans = None
        for i in range(self.n):
            closure = below[i]
            for j in bits(below[i]):
                if below[j] & ~closure:
                    k = bits(below[j] & ~closure)[0]
                    trans = (self.carrier[k], self.carrier[j], self.carrier[i])
                    break
            if trans:
                break
        r.add("transitive", trans is None, witness=trans)
        return r

    def is_valid(self) -> bool:
        return self.validate().passed


@dataclass(frozen=True)
class CPoset:
    """A poset with a closure operator phi = Gamma_A given by a finite operator code."""

    poset: FinitePoset
    operator: EnumOperatorCode

    @property
    def carrier(self) -> tuple[int, ...]:
        return self.poset.carrier

    @property
    def n(self) -> int:
        return self.poset.n

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def mask(self, xs: Iterable[int]) -> int:
        return self.poset.mask(xs)

    def elements(self, mask: int) -> frozenset[int]:
        return self.poset.elements(mask)

    @cached_property
    def _rules(self) -> tuple[tuple[tuple[int, int], ...], tuple[int, ...]]:
        """(rules inside the carrier as (position, mask), codes whose output leaves it)."""
        idx = self.poset.index
        inside, escaping = [], []
        for code, (x, k) in zip(sorted(self.operator.pairs), self.operator.decoded):
            try:
                m = to_mask(idx[d] for d in _decode(k))
            except KeyError:
                continue  # premise outside the carrier never fires on subsets of it
            if x in idx:
                inside.append((idx[x], m))
            else:
                escaping.append(code)
        return tuple(inside), tuple(escaping)

    @cached_property
    def closure_table(self) -> np.ndarray:
        """phi(X) for every mask X; superset-OR transform of the rule premises."""
        check_size(self.n, "c-poset carrier")
        size = 1 << self.n
        t = np.zeros(size, dtype=np.int64)
        for x, m in self._rules[0]:
            t[m] |= 1 << x
        idx = np.arange(size)
        for i in range(self.n):
            sel = idx[(idx >> i) & 1 == 1]
            t[sel] |= t[sel ^ (1 << i)]
        t.setflags(write=False)
        return t

    def phi(self, mask: int) -> int:
        return int(self.closure_table[mask])

    def closure(self, xs: Iterable[int]) -> frozenset[int]:
        return self.elements(self.phi(self.mask(xs)))

    @cached_property
    def ideal_masks(self) -> tuple[int, ...]:
        t = self.closure_table
        return tuple(int(m) for m in np.nonzero(t == np.arange(len(t)))[0])

    @cached_property
    def validation(self) -> Report:
        return _validate(self)

    @cached_property
    def distributive(self) -> bool:
        return _distributive(self)

    @cached_property
    def prime_masks(self) -> tuple[int, ...]:
        fault_ok = self.validation.passed and self.distributive
        out = []
        for m in self.ideal_masks:
            v = _prime_verdict(self, m)
            if fault_ok and v.proper and not v.agree:
                raise ConsistencyError(f"primality criteria disagree on ideal {sorted(v.ideal)}: {v}")
            if v.prime:
                out.append(m)
        return tuple(out)


def _decode(k: int) -> list[int]:
    return bits(k)


def operator_from_closure(
    carrier: Iterable[int], fn: Callable[[frozenset[int]], Iterable[int]], minimal: bool = True
) -> EnumOperatorCode:
    """Operator code of a closure on a finite carrier.

    Lists <x, code(F)> for nonempty F and x in fn(F); with ``minimal`` only the
    pairs whose premise F is inclusion-minimal for x are kept.
    """
    carrier = tuple(sorted(carrier))
    n = len(carrier)
    check_size(n, "carrier")
    images: dict[int, int] = {}
    codes = set()
    for m in range(1, 1 << n):
        F = frozenset(carrier[i] for i in bits(m))
        img = set_encode(fn(F))
        images[m] = img
        new = img
        if minimal:
            for i in bits(m):
                if m ^ (1 << i):
                    new &= ~images[m ^ (1 << i)]
        k = set_encode(F)
        codes.update(pair(x, k) for x in bits(new))
    return EnumOperatorCode(frozenset(codes))


def _validate(P: CPoset) -> Report:
    r = Report("c-poset")
    pr = P.poset.validate()
    r.checks.extend(pr.checks)
    bad = P.operator.offending(P.carrier)
    r.add("operator codes within carrier", not bad, witness=bad[:1] or None)
    if not pr.passed:
        r.notes.append("closure axioms not checked: relation is not a partial order")
        return r
    t = P.closure_table
    n, full = P.n, P.full
    masks = np.arange(1 << n)
    r.add("phi(empty) = empty", t[0] == 0, witness=sorted(P.elements(int(t[0]))) or None)
    escaping = P._rules[1]
    r.add("phi maps into the carrier", not escaping, witness=escaping[:1] or None)
    ext = np.nonzero(masks & ~t)[0]
    r.add("extensive", len(ext) == 0, "X subset of phi(X)" if len(ext) == 0 else "not extensive",
          witness=sorted(P.elements(int(ext[0]))) if len(ext) else None)
    mono = None
    for i in range(n):
        lo = masks[(masks >> i) & 1 == 0]
        bad_m = lo[(t[lo] & ~t[lo | (1 << i)]) != 0]
        if len(bad_m):
            mono = sorted(P.elements(int(bad_m[0])))
            break
    r.add("monotone", mono is None, witness=mono)
    idem = np.nonzero(t[t & full] != t)[0]
    r.add("idempotent", len(idem) == 0, witness=sorted(P.elements(int(idem[0]))) if len(idem) else None)
    below, order_bad = P.poset.below, None
    single = [int(t[1 << i]) for i in range(n)]
    for i in range(n):
        for j in range(n):
            le = bool(below[j] >> i & 1)
            if le != (single[i] & ~single[j] == 0):
                order_bad = (P.carrier[i], P.carrier[j])
                break
        if order_bad:
            break
    r.add("x <= y iff phi(x) subset phi(y)", order_bad is None, witness=order_bad)
    r.notes.append("algebraic: automatic for an enumeration operator on a finite carrier")
    return r


def validate_cposet(P: CPoset) -> Report:
    return P.validation


def _require_subset(P: CPoset, xs: Iterable[int]) -> int:
    return P.mask(xs)


def closure(P: CPoset, X: Iterable[int]) -> frozenset[int]:
    return P.elements(P.phi(_require_subset(P, X)))


def _lower_mask(P: CPoset, m: int) -> int:
    out = P.full
    for i in bits(m):
        out &= P.poset.below[i]
    return out


def _upper_mask(P: CPoset, m: int) -> int:
    out = P.full
    for i in bits(m):
        out &= P.poset.above[i]
    return out


def lower_bounds(P: CPoset | FinitePoset, X: Iterable[int]) -> frozenset[int]:
    poset = P.poset if isinstance(P, CPoset) else P
    out = (1 << poset.n) - 1
    for i in bits(poset.mask(X)):
        out &= poset.below[i]
    return poset.elements(out)


def upper_bounds(P: CPoset | FinitePoset, X: Iterable[int]) -> frozenset[int]:
    poset = P.poset if isinstance(P, CPoset) else P
    out = (1 << poset.n) - 1
    for i in bits(poset.mask(X)):
        out &= poset.above[i]
    return poset.elements(out)


@dataclass(frozen=True)
class IdealLattice:
    """All phi-closed subsets; meet is intersection, join is phi of the union."""

    cposet: CPoset
    ideals: tuple[frozenset[int], ...]

    def meet(self, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
        return frozenset(a) & frozenset(b)

    def join(self, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
        return closure(self.cposet, frozenset(a) | frozenset(b))

    def __len__(self) -> int:
        return len(self.ideals)

    def __iter__(self):
        return iter(self.ideals)


def enumerate_ideals(P: CPoset) -> IdealLattice:
    return IdealLattice(P, tuple(P.elements(m) for m in P.ideal_masks))


@dataclass(frozen=True)
class PrimeVerdict:
    ideal: frozenset[int]
    is_ideal: bool
    proper: bool
    complement_filter: bool = False
    meet_prime: bool = False
    bounds_condition: bool = False
    witnesses: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def agree(self) -> bool:
        return self.complement_filter == self.meet_prime == self.bounds_condition

    @property
    def prime(self) -> bool:
        return (self.is_ideal and self.proper and self.complement_filter
                and self.meet_prime and self.bounds_condition)


def _is_filter_mask(P: CPoset, m: int) -> tuple[bool, Any]:
    """Nonempty, upward closed, down-directed (with witnesses inside ``m``)."""
    if m == 0:
        return False, "empty"
    below, above = P.poset.below, P.poset.above
    for i in bits(m):
        if above[i] & ~m:
            return False, ("not an upper cone", P.carrier[i], P.carrier[bits(above[i] & ~m)[0]])
    for i in bits(m):
        for j in bits(m):
            if j > i and not below[i] & below[j] & m:
                return False, ("no common lower bound", P.carrier[i], P.carrier[j])
    return True, None


def _down_directed_mask(P: CPoset, m: int) -> bool:
    if m == 0:
        return False
    below = P.poset.below
    return all(below[i] & below[j] & m for i in bits(m) for j in bits(m) if j > i)


def is_filter(P: CPoset, F: Iterable[int]) -> bool:
    return _is_filter_mask(P, P.mask(F))[0]


def is_down_directed(P: CPoset, F: Iterable[int]) -> bool:
    return _down_directed_mask(P, P.mask(F))


def _prime_verdict(P: CPoset, m: int) -> PrimeVerdict:
    ideal = P.elements(m)
    is_ideal = P.phi(m) == m
    proper = is_ideal and m not in (0, P.full)
    if not proper:
        return PrimeVerdict(ideal, is_ideal, False)
    wit: dict[str, Any] = {}
    c1, w = _is_filter_mask(P, P.full & ~m)
    if w is not None:
        wit["complement_filter"] = w
    ids = np.asarray(P.ideal_masks, dtype=np.int64)
    outside = ids[(ids & ~m) != 0]
    meets = outside[:, None] & outside[None, :]
    bad = np.argwhere((meets & ~m) == 0)
    c2 = len(bad) == 0
    if not c2:
        a, b = bad[0]
        wit["meet_prime"] = (sorted(P.elements(int(outside[a]))), sorted(P.elements(int(outside[b]))))
    below = P.poset.below
    c3 = True
    for i in range(P.n):
        for j in range(i, P.n):
            if not below[i] & below[j] & ~m and not (m >> i) & 1 and not (m >> j) & 1:
                c3 = False
                wit["bounds_condition"] = (P.carrier[i], P.carrier[j])
                break
        if not c3:
            break
    return PrimeVerdict(ideal, True, True, c1, c2, c3, wit)


def is_prime(P: CPoset, I: Iterable[int]) -> PrimeVerdict:
    """Evaluate all three primality criteria on ``I``.

    Disagreement on a valid distributive c-poset raises ``ConsistencyError``.
    """
    v = _prime_verdict(P, P.mask(I))
    if v.proper and not v.agree and P.validation.passed and P.distributive:
        raise ConsistencyError(f"primality criteria disagree on {sorted(v.ideal)}: {v}")
    return v


def enumerate_primes(P: CPoset) -> list[frozenset[int]]:
    return [P.elements(m) for m in P.prime_masks]


def _distributive(P: CPoset) -> bool:
    ids = np.asarray(P.ideal_masks, dtype=np.int64)
    t = P.closure_table
    joins = t[ids[:, None] | ids[None, :]]
    for x in ids:
        lhs = x & joins
        rhs = t[(x & ids)[:, None] | (x & ids)[None, :]]
        if np.any(lhs != rhs):
            return False
    return True


def is_distributive(P: CPoset) -> bool:
    return P.distributive


def prime_separation(P: CPoset, I: Iterable[int], F: Iterable[int]) -> frozenset[int]:
    """Smallest-bitmask prime Q with I subset of Q and Q disjoint from F."""
    im, fm = P.mask(I), P.mask(F)
    if not P.validation.passed:
        raise PreconditionError("c-poset is not valid")
    if not P.distributive:
        raise PreconditionError("c-poset is not distributive")
    if im == 0 or P.phi(im) != im:
        raise PreconditionError(f"{sorted(P.elements(im))} is not a nonempty ideal")
    if not _down_directed_mask(P, fm):
        raise PreconditionError(f"{sorted(P.elements(fm))} is not a nonempty down-directed set")
    if im & fm:
        raise PreconditionError("I and F intersect")
    for q in P.prime_masks:
        if im & ~q == 0 and q & fm == 0:
            return P.elements(q)
    raise NoSeparatingPrimeError(
        f"no separating prime for I={sorted(P.elements(im))}, F={sorted(P.elements(fm))}"
    )


def _image_masks(P0: CPoset, P1: CPoset, g: Mapping[int, int]) -> list[int]:
    idx1 = P1.poset.index
    out = []
    for x in P0.carrier:
        if x not in g:
            raise ValueError(f"map is not total: {x} has no image")
        if g[x] not in idx1:
            raise ValueError(f"map sends {x} to {g[x]}, outside the target carrier")
        out.append(1 << idx1[g[x]])
    return out


def _image(img: list[int], m: int) -> int:
    out = 0
    for i in bits(m):
        out |= img[i]
    return out


def dp_isomorphism_report(P0: CPoset, P1: CPoset, g: Mapping[int, int]) -> Report:
    r = Report("DP-isomorphism")
    img = _image_masks(P0, P1, g)
    r.add("surjective", _image(img, P0.full) == P1.full)
    b0, b1 = P0.poset.below, P1.poset.below
    bad = None
    for i in range(P0.n):
        for j in range(P0.n):
            j1 = bits(img[j])[0]
            if bool(b0[j] >> i & 1) != bool(b1[j1] & img[i]):
                bad = (P0.carrier[i], P0.carrier[j])
                break
        if bad:
            break
    r.add("order preserved and reflected", bad is None, witness=bad)
    bad = None
    for m in range(1 << P0.n):
        if _image(img, P0.phi(m)) != P1.phi(_image(img, m)):
            bad = sorted(P0.elements(m))
            break
    r.add("g(phi0(X)) = phi1(g(X))", bad is None, witness=bad)
    return r


def check_dp_isomorphism(P0: CPoset, P1: CPoset, g: Mapping[int, int]) -> bool:
    return dp_isomorphism_report(P0, P1, g).passed


def _preimage(P0: CPoset, P1: CPoset, f: Mapping[int, int], m1: int) -> int:
    idx1 = P1.poset.index
    out = 0
    for i, x in enumerate(P0.carrier):
        if m1 >> idx1[f[x]] & 1:
            out |= 1 << i
    return out


def check_strict(P0: CPoset, P1: CPoset, f: Mapping[int, int]) -> bool:
    """f^{-1}(I) is prime in P0 for every prime I of P1."""
    _image_masks(P0, P1, f)
    primes0 = set(P0.prime_masks)
    return all(_preimage(P0, P1, f, q) in primes0 for q in P1.prime_masks)
