"""The functors P (spaces -> c-posets) and T (c-posets -> spectra), on objects and maps.

Maps are plain dicts. Spectral maps go between points, strict maps between carriers;
both functors reverse direction. Round trips are checked extensionally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from ._bits import bits, to_mask
from .order import CPoset, FinitePoset, _preimage, check_dp_isomorphism, check_strict, dp_isomorphism_report
from .reports import PreconditionError, Report
from .spectrum import inc_from_operator, operator_from_inc, spectrum
from .topology import SpaceWithBase, _check_point_map, check_spectral, inc_from_space, pullback_mask


class NotInjectiveBaseError(PreconditionError):
    pass


class NotSpectralError(PreconditionError):
    pass


class NotStrictError(PreconditionError):
    pass


@dataclass(frozen=True)
class DualPair:
    """A space and a c-poset, where ``direction`` says which was built from which."""

    space: SpaceWithBase
    cposet: CPoset
    direction: str  # "P": cposet = P(space); "T": space = T(cposet)


@dataclass(frozen=True)
class EffectiveSpectralMap:
    """Point map f: source -> target with witness h: f^{-1}(target base i) = source base h(i)."""

    source: SpaceWithBase
    target: SpaceWithBase
    point_map: dict
    witness: dict

    def check(self) -> bool:
        return check_effective_spectral(self, self.source, self.target)

    def to_dict(self) -> dict:
        return {
            "point_map": [[k, v] for k, v in sorted(self.point_map.items(), key=lambda kv: str(kv[0]))],
            "witness": [[k, v] for k, v in sorted(self.witness.items())],
        }


def check_effective_spectral(m: EffectiveSpectralMap, X0: SpaceWithBase, X1: SpaceWithBase) -> bool:
    try:
        _check_point_map(m.point_map, X0, X1)
    except ValueError:
        return False
    for i in range(X1.n_base):
        h = m.witness.get(i)
        if h is None or not 0 <= h < X0.n_base:
            return False
        if pullback_mask(m.point_map, X0, X1, X1.beta_masks[i]) != X0.beta_masks[h]:
            return False
    return True


def functor_P_obj(S: SpaceWithBase) -> CPoset:
    """Base indices ordered by inclusion, closed by U -> {V : V inside the union of U}."""
    if not S.injective:
        raise NotInjectiveBaseError("beta is not injective; call injectivize_base first")
    ms = S.beta_masks
    n = len(ms)
    leq = {(i, j) for i in range(n) for j in range(n) if ms[i] & ~ms[j] == 0}
    return CPoset(FinitePoset(tuple(range(n)), frozenset(leq)), operator_from_inc(inc_from_space(S)))


def functor_T_obj(P: CPoset) -> SpaceWithBase:
    return spectrum(P).space


def dual_pair(obj: SpaceWithBase | CPoset) -> DualPair:
    if isinstance(obj, SpaceWithBase):
        return DualPair(obj, functor_P_obj(obj), "P")
    return DualPair(functor_T_obj(obj), obj, "T")


def functor_P_mor(f: Mapping[Hashable, Hashable], S0: SpaceWithBase, S1: SpaceWithBase) -> dict[int, int]:
    """P(f): base index j of S1 -> the base index of f^{-1}(beta1(j)) in S0."""
    if not (S0.injective and S1.injective):
        raise NotInjectiveBaseError("both bases must be injective")
    _check_point_map(f, S0, S1)
    where = {m: i for i, m in enumerate(S0.beta_masks)}
    out = {}
    for j, m in enumerate(S1.beta_masks):
        pre = pullback_mask(f, S0, S1, m)
        if pre not in where:
            raise NotSpectralError(
                f"not spectral: preimage of base set {j} is {sorted(map(str, S0.elements(pre)))}, not a base set"
            )
        out[j] = where[pre]
    return out


def functor_T_mor(g: Mapping[int, int], P0: CPoset, P1: CPoset) -> EffectiveSpectralMap:
    """T(g): Spec P1 -> Spec P0, I -> g^{-1}(I), witnessed by h = g on base indices."""
    if not check_strict(P0, P1, g):
        raise NotStrictError("not strict: some prime of the target pulls back to a non-prime")
    sp0, sp1 = spectrum(P0), spectrum(P1)
    point_of = {q: p for p, q in enumerate(sp0.primes)}
    pm = {p: point_of[_preimage(P0, P1, g, q)] for p, q in enumerate(sp1.primes)}
    idx1 = P1.poset.index
    h = {a: idx1[g[x]] for a, x in enumerate(P0.carrier)}
    return EffectiveSpectralMap(sp1.space, sp0.space, pm, h)


@dataclass
class UnitMap:
    space: SpaceWithBase
    double_dual: SpaceWithBase | None
    mapping: dict
    report: Report
    forward: EffectiveSpectralMap | None = None
    inverse: EffectiveSpectralMap | None = None

    @property
    def passed(self) -> bool:
        return self.report.passed


def unit_map(S: SpaceWithBase) -> UnitMap:
    """f_X: x -> {V in B : x not in V}, a point of T(P(S))."""
    r = Report("unit map X -> TP(X)")
    P = functor_P_obj(S)
    if not P.distributive or not P.validation.passed:
        r.add("P(X) is a distributive c-poset", False, "not almost sober / invalid input")
        return UnitMap(S, None, {}, r)
    sp = spectrum(P)
    point_of = {q: p for p, q in enumerate(sp.primes)}
    ms = S.beta_masks
    mapping, missing = {}, None
    for x, pt in enumerate(S.points):
        q = to_mask(i for i, m in enumerate(ms) if not m >> x & 1)
        if q in point_of:
            mapping[pt] = point_of[q]
        elif missing is None:
            missing = pt
    r.add("f_X(x) is prime for every x", missing is None,
          "not almost sober / invalid input" if missing is not None else "", missing)
    images = list(mapping.values())
    dup = next((pt for pt in mapping if images.count(mapping[pt]) > 1), None)
    r.add("injective", dup is None, witness=dup)
    hit = set(images)
    unhit = next((sorted(P.elements(q)) for p, q in enumerate(sp.primes) if p not in hit), None)
    r.add("surjective", unhit is None, witness=unhit)
    if not r.passed:
        r.notes.append("not almost sober / invalid input")
        return UnitMap(S, sp.space, mapping, r)
    bad = next((A for A in range(S.n_base)
                if pullback_mask(mapping, S, sp.space, sp.v_masks[A]) != ms[A]), None)
    r.add("f_X^{-1}(V_A) = A for every base index A", bad is None, witness=bad)
    ident = {i: i for i in range(S.n_base)}
    fwd = EffectiveSpectralMap(S, sp.space, mapping, ident)
    inv = EffectiveSpectralMap(sp.space, S, {v: k for k, v in mapping.items()}, ident)
    r.add("forward map is effective spectral", fwd.check())
    r.add("inverse map is effective spectral", inv.check())
    return UnitMap(S, sp.space, mapping, r, fwd, inv)


@dataclass
class CounitMap:
    cposet: CPoset
    double_dual: CPoset
    xi: dict[int, int]
    report: Report

    @property
    def passed(self) -> bool:
        return self.report.passed


def counit_map(P: CPoset) -> CounitMap:
    """xi: PT(P) -> P, base index of V_a -> a."""
    sp = spectrum(P)
    Q = functor_P_obj(sp.space)
    xi = {a: x for a, x in enumerate(P.carrier)}
    r = dp_isomorphism_report(Q, P, xi)
    r.subject = "counit PT(P) -> P"
    r.add("PT(P) is a valid c-poset", Q.validation.passed)
    sym = inc_from_operator(P.operator, P.carrier)
    r.add("Inc of the spectrum equals Inc read off the operator", sym.entries == inc_from_space(sp.space).entries)
    return CounitMap(P, Q, xi, r)


def compose(f: Mapping, g: Mapping) -> dict:
    """g after f."""
    return {x: g[y] for x, y in f.items()}


def check_P_composition(f, g, X0: SpaceWithBase, X1: SpaceWithBase, X2: SpaceWithBase) -> bool:
    """P(g o f) = P(f) o P(g) for spectral f: X0 -> X1, g: X1 -> X2."""
    lhs = functor_P_mor(compose(f, g), X0, X2)
    rhs = compose(functor_P_mor(g, X1, X2), functor_P_mor(f, X0, X1))
    return lhs == rhs


def check_T_composition(f, g, P0: CPoset, P1: CPoset, P2: CPoset) -> bool:
    """T(g o f) = T(f) o T(g) for strict f: P0 -> P1, g: P1 -> P2."""
    lhs = functor_T_mor(compose(f, g), P0, P2)
    rhs = compose(functor_T_mor(g, P1, P2).point_map, functor_T_mor(f, P0, P1).point_map)
    return lhs.point_map == rhs


@dataclass
class ComposablePair:
    first: dict
    second: dict
    objects: tuple = field(default_factory=tuple)


def morphism_duality_check(f: Mapping, mode: str, source, target,
                           pairs: Iterable[ComposablePair] = ()) -> Report:
    """Apply the dual functor to f and verify the dual map's defining property.

    mode "spectral": f is a spectral map of spaces, P(f) must be strict.
    mode "strict": f is a strict map of c-posets, T(f) must be effective spectral.
    Each composable pair (objects = three spaces or three c-posets) is checked for
    contravariant composition.
    """
    r = Report(f"dual morphism ({mode})")
    if mode == "spectral":
        r.add("input is spectral", check_spectral(f, source, target))
        if r.passed:
            g = functor_P_mor(f, source, target)
            r.add("P(f) is strict", check_strict(functor_P_obj(target), functor_P_obj(source), g))
            if source == target and all(f[x] == x for x in source.points):
                r.add("P(id) = id", g == {i: i for i in range(target.n_base)})
        for k, pr in enumerate(pairs):
            r.add(f"P(g o f) = P(f) o P(g) [pair {k}]", check_P_composition(pr.first, pr.second, *pr.objects))
    elif mode == "strict":
        r.add("input is strict", check_strict(source, target, f))
        if r.passed:
            m = functor_T_mor(f, source, target)
            r.add("T(f) is spectral", check_spectral(m.point_map, m.source, m.target))
            r.add("T(f) is effective spectral with h = f", m.check())
            if source == target and all(f[x] == x for x in source.carrier):
                r.add("T(id) = id", all(k == v for k, v in m.point_map.items()))
        for k, pr in enumerate(pairs):
            r.add(f"T(g o f) = T(f) o T(g) [pair {k}]", check_T_composition(pr.first, pr.second, *pr.objects))
    else:
        raise ValueError(f"mode must be 'spectral' or 'strict', got {mode!r}")
    return r


def _downset(P: CPoset, m: int) -> int:
    out = 0
    for i in bits(m):
        out |= P.poset.below[i]
    return out


def _is_downset_closure(P: CPoset) -> int | None:
    """First subset mask where phi differs from the downset, or None."""
    return next((m for m in range(1 << P.n) if P.phi(m) != _downset(P, m)), None)


def check_lds(P0: CPoset, P1: CPoset, xi: Mapping[int, int]) -> bool:
    """If xi: P0 -> P1 is a DP-isomorphism and phi1 = downset, then phi0 = downset."""
    if not check_dp_isomorphism(P0, P1, xi):
        raise PreconditionError("map is not a DP-isomorphism")
    if _is_downset_closure(P1) is not None:
        raise PreconditionError("target closure is not the downset operator")
    return _is_downset_closure(P0) is None
