"""Finite T0 spaces presented by an indexed base beta: index -> base set.

Point sets are bitmasks over point positions (the order points were given in).
The topology is materialized as all unions of base sets.

Two readings of (almost) sobriety are computed everywhere:

* ``standard``: every irreducible closed (proper) nonempty set is the closure
  of a point.
* ``strict-literal``: every closed (proper) nonempty set is the closure of a point.

The standard reading is the default. Every finite T0 space is sober under it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping

from ._bits import bits, check_size, to_mask
from .encoding import set_decode
from .reports import Report

MODES = ("standard", "strict-literal")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class SpaceWithBase:
    points: tuple[Hashable, ...]
    base: tuple[frozenset, ...]
    beta: tuple[int, ...] = None

    def __post_init__(self):
        pts = tuple(self.points)
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate point labels")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "base", tuple(frozenset(b) for b in self.base))
        beta = tuple(range(len(self.base))) if self.beta is None else tuple(self.beta)
        for b in beta:
            if not 0 <= b < len(self.base):
                raise ValueError(f"beta index {b} does not name a base set")
        object.__setattr__(self, "beta", beta)
        pset = set(pts)
        for s in self.base:
            if not s <= pset:
                raise ValueError(f"base set {sorted(map(str, s))} is not a subset of the points")

    @classmethod
    def from_masks(cls, n_points: int, masks: Iterable[int], points=None) -> SpaceWithBase:
        pts = tuple(range(n_points)) if points is None else tuple(points)
        return cls(pts, tuple(frozenset(pts[i] for i in bits(m)) for m in masks))

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_base(self) -> int:
        return len(self.beta)

    @property
    def full(self) -> int:
        return (1 << self.n_points) - 1

    @cached_property
    def index(self) -> dict[Hashable, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def beta_masks(self) -> tuple[int, ...]:
        set_masks = [to_mask(self.index[p] for p in s) for s in self.base]
        return tuple(set_masks[b] for b in self.beta)

    @cached_property
    def distinct_masks(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.beta_masks)))

    @property
    def injective(self) -> bool:
        return len(set(self.beta_masks)) == len(self.beta_masks)

    def mask(self, xs: Iterable[Hashable]) -> int:
        try:
            return to_mask(self.index[x] for x in xs)
        except KeyError as e:
            raise ValueError(f"point {e.args[0]!r} is not in the space") from None

    def elements(self, mask: int) -> frozenset:
        return frozenset(self.points[i] for i in bits(mask))

    def beta_set(self, i: int) -> frozenset:
        return self.elements(self.beta_masks[i])

    @cached_property
    def opens(self) -> frozenset[int]:
        check_size(self.n_points, "point set")
        opens = {0}
        for b in self.distinct_masks:
            opens |= {o | b for o in opens}
        return frozenset(opens)

    @cached_property
    def closeds(self) -> tuple[int, ...]:
        return tuple(sorted(self.full & ~o for o in self.opens))

    def point_closure(self, i: int) -> int:
        """Closure of {x}: points all of whose basic neighbourhoods contain x."""
        away = 0
        for b in self.distinct_masks:
            if not b >> i & 1:
                away |= b
        return self.full & ~away

    @cached_property
    def point_closures(self) -> tuple[int, ...]:
        return tuple(self.point_closure(i) for i in range(self.n_points))


def _down_directed(masks: Iterable[int]) -> bool:
    ms = list(set(masks))
    if not ms:
        return False
    return all(any(c & ~(a & b) == 0 for c in ms) for a in ms for b in ms)


def _up_directed(masks: Iterable[int]) -> bool:
    ms = list(set(masks))
    if not ms:
        return False
    return all(any((a | b) & ~c == 0 for c in ms) for a in ms for b in ms)


def _irreducible(S: SpaceWithBase, F: int) -> bool:
    if F == 0:
        return False
    meeting = [b for b in S.distinct_masks if b & F]
    return all(a & b & F for a in meeting for b in meeting)


@dataclass(frozen=True)
class SobrietyReport:
    sober_standard: bool
    almost_sober_standard: bool
    sober_literal: bool
    almost_sober_literal: bool
    counterexamples: dict[str, list] = field(default_factory=dict, compare=False)

    def sober(self, mode: str = "standard") -> bool:
        _check_mode(mode)
        return self.sober_standard if mode == "standard" else self.sober_literal

    def almost_sober(self, mode: str = "standard") -> bool:
        _check_mode(mode)
        return self.almost_sober_standard if mode == "standard" else self.almost_sober_literal


def sobriety(S: SpaceWithBase) -> SobrietyReport:
    closures = set(S.point_closures)
    flags = {"sober_standard": True, "almost_sober_standard": True,
             "sober_literal": True, "almost_sober_literal": True}
    cex: dict[str, list] = {}
    for F in S.closeds:
        if F == 0 or F in closures:
            continue
        proper = F != S.full
        hit = ["sober_literal"] + (["almost_sober_literal"] if proper else [])
        if _irreducible(S, F):
            hit += ["sober_standard"] + (["almost_sober_standard"] if proper else [])
        for name in hit:
            if flags[name]:
                flags[name] = False
                cex[name] = sorted(map(str, S.elements(F)))
    return SobrietyReport(**flags, counterexamples=cex)


def is_almost_sober(S: SpaceWithBase, mode: str = "standard") -> bool:
    return sobriety(S).almost_sober(mode)


def validate_space(S: SpaceWithBase, mode: str = "standard") -> Report:
    _check_mode(mode)
    check_size(S.n_points, "point set")
    r = Report(f"space with base (mode={mode})")
    sig: dict[int, int] = {}
    t0 = None
    for i in range(S.n_points):
        key = to_mask(j for j, b in enumerate(S.beta_masks) if b >> i & 1)
        if key in sig:
            t0 = (str(S.points[sig[key]]), str(S.points[i]))
            break
        sig[key] = i
    r.add("T0", t0 is None, witness=t0)
    cover = 0
    for b in S.distinct_masks:
        cover |= b
    r.add("base covers the points", cover == S.full,
          witness=sorted(map(str, S.elements(S.full & ~cover))) or None)
    basis_bad = None
    ms = S.distinct_masks
    for ia, a in enumerate(ms):
        for b in ms[ia + 1:]:
            inter = a & b
            u = 0
            for c in ms:
                if c & ~inter == 0:
                    u |= c
            if u != inter:
                basis_bad = [sorted(map(str, S.elements(a))), sorted(map(str, S.elements(b)))]
                break
        if basis_bad:
            break
    r.add("intersections of base sets are unions of base sets", basis_bad is None, witness=basis_bad)
    sob = sobriety(S)
    down, up = _down_directed(ms), _up_directed(ms)
    has_empty, has_whole = 0 in ms, S.full in ms
    rhs = sob.sober(mode) and down
    r.add("empty set in base iff sober and base down-directed", has_empty == rhs,
          f"empty in base={has_empty}, sober={sob.sober(mode)}, down-directed={down}")
    r.add("whole space in base iff compact and base up-directed", has_whole == up,
          f"whole in base={has_whole}, compact=True, up-directed={up}")
    r.notes.append(f"sober: standard={sob.sober_standard}, strict-literal={sob.sober_literal}")
    r.notes.append(
        f"almost sober: standard={sob.almost_sober_standard}, strict-literal={sob.almost_sober_literal}"
    )
    if not ms:
        r.notes.append("empty base: directedness is false (directed sets are nonempty)")
    return r


def is_valid_space(S: SpaceWithBase, mode: str = "standard") -> bool:
    return validate_space(S, mode).passed


@dataclass(frozen=True)
class SpecializationOrder:
    """y <= x iff y lies in the closure of {x}; so the down-set of x is cl{x}."""

    points: tuple[Hashable, ...]
    leq: frozenset[tuple[Hashable, Hashable]]

    def down(self, x: Hashable) -> frozenset:
        return frozenset(y for y, z in self.leq if z == x)

    def up(self, x: Hashable) -> frozenset:
        return frozenset(z for y, z in self.leq if y == x)

    def strict_pairs(self) -> list[tuple[Hashable, Hashable]]:
        return sorted(((y, x) for y, x in self.leq if y != x), key=lambda p: tuple(map(str, p)))

    def is_partial_order(self) -> bool:
        refl = all((p, p) in self.leq for p in self.points)
        anti = not any(a != b and (b, a) in self.leq for a, b in self.leq)
        trans = all((a, d) in self.leq for a, b in self.leq for c, d in self.leq if b == c)
        return refl and anti and trans

    def covers(self) -> list[tuple[Hashable, Hashable]]:
        strict = [(a, b) for a, b in self.leq if a != b]
        sset = set(strict)
        return [(a, b) for a, b in strict
                if not any((a, c) in sset and (c, b) in sset for c in self.points)]


def specialization_order(S: SpaceWithBase) -> SpecializationOrder:
    leq = set()
    for i, x in enumerate(S.points):
        for j in bits(S.point_closures[i]):
            leq.add((S.points[j], x))
    return SpecializationOrder(S.points, frozenset(leq))


# (cell, dual DP subcategory, required flags)
TABLEAU = (
    ("AS", "DP", ()),
    ("AS_s", "DP_0", ("zero_base",)),
    ("AS_c", "DP_1", ("one_base",)),
    ("S", "DP_01", ("zero_base", "one_base")),
    ("ASp", "DSL^meet", ("multiplicative",)),
    ("ASp_s", "DSL^meet_0", ("multiplicative", "zero_base")),
    ("ASp_c", "DSL^meet_1", ("multiplicative", "one_base")),
    ("Sp", "DSL^meet_01", ("multiplicative", "zero_base", "one_base")),
    ("AsSpec", "DSL^join", ("additive",)),
    ("AsSpec_s", "DSL^join_0", ("additive", "zero_base")),
    ("AsSpec_c", "DSL^join_1", ("additive", "one_base")),
    ("sSpec", "DSL^join_01", ("additive", "zero_base", "one_base")),
    ("ASpec", "DL", ("multiplicative", "additive")),
    ("ASpec_s", "DL_0", ("multiplicative", "additive", "zero_base")),
    ("ASpec_c", "DL_1", ("multiplicative", "additive", "one_base")),
    ("Spec", "DL_01", ("multiplicative", "additive", "zero_base", "one_base")),
)


@dataclass(frozen=True)
class Classification:
    mode: str
    flags: dict[str, bool]
    cells: tuple[str, ...]

    def to_dict(self) -> dict:
        duals = {c: d for c, d, _ in TABLEAU}
        return {"mode": self.mode, "flags": dict(self.flags),
                "cells": [{"space": c, "dual": duals[c]} for c in self.cells]}


def classify(S: SpaceWithBase, mode: str = "standard") -> Classification:
    _check_mode(mode)
    ms = S.distinct_masks
    mset = set(ms)
    flags = {
        "valid": validate_space(S, mode).passed,
        "has_empty_in_base": 0 in mset,
        "has_whole_in_base": S.full in mset,
        "up_directed": _up_directed(ms),
        "down_directed": _down_directed(ms),
        "zero_base": any(all(m & ~o == 0 for o in ms) for m in ms),
        "one_base": any(all(o & ~m == 0 for o in ms) for m in ms),
        "multiplicative": all(a & b in mset for a in ms for b in ms),
        "additive": all(a | b in mset for a in ms for b in ms),
        "almost_sober": is_almost_sober(S, mode),
        "compact": True,
        "base_of_compact_opens": True,
    }
    flags["almost_semispectral"] = flags["valid"] and flags["almost_sober"]
    cells = ()
    if flags["almost_semispectral"]:
        cells = tuple(c for c, _, req in TABLEAU if all(flags[f] for f in req))
    return Classification(mode, flags, cells)


@dataclass(frozen=True)
class IncPredicate:
    """Extensional {(i, k) : D_k nonempty, beta(i) inside the union of beta over D_k}."""

    entries: frozenset[tuple[int, int]]
    n_indices: int
    maxk: int
    skipped: int = 0

    def __contains__(self, item) -> bool:
        return tuple(item) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def codes(self) -> list[int]:
        """Valid set codes considered: nonempty, indices in range, at most maxk."""
        return [k for k in range(1, min(self.maxk, (1 << self.n_indices) - 1) + 1)]

    def skipped_range(self) -> tuple[int, int] | None:
        if not self.skipped:
            return None
        return (1 << self.n_indices, self.maxk)

    def to_json(self) -> dict:
        d = {"n_indices": self.n_indices, "maxk": self.maxk,
             "entries": [list(e) for e in sorted(self.entries)]}
        if self.skipped:
            d["skipped"] = {"count": self.skipped, "range": list(self.skipped_range())}
        return d


def default_maxk(n_indices: int) -> int:
    return (1 << n_indices) - 1


def _cover_entries(masks: tuple[int, ...], maxk: int) -> set[tuple[int, int]]:
    n = len(masks)
    top = min(maxk, (1 << n) - 1)
    union = [0] * (top + 1)
    entries = set()
    for k in range(1, top + 1):
        low = k & -k
        union[k] = union[k ^ low] | masks[low.bit_length() - 1]
        u = union[k]
        for i, b in enumerate(masks):
            if b & ~u == 0:
                entries.add((i, k))
    return entries


def inc_from_space(S: SpaceWithBase, maxk: int | None = None) -> IncPredicate:
    n = S.n_base
    check_size(n, "base index set")
    if maxk is None:
        maxk = default_maxk(n)
    skipped = max(0, maxk - default_maxk(n))
    return IncPredicate(frozenset(_cover_entries(S.beta_masks, maxk)), n, maxk, skipped)


def pullback_mask(f: Mapping[Hashable, Hashable], S0: SpaceWithBase, S1: SpaceWithBase, m1: int) -> int:
    idx1 = S1.index
    out = 0
    for i, x in enumerate(S0.points):
        if m1 >> idx1[f[x]] & 1:
            out |= 1 << i
    return out


def _check_point_map(f: Mapping[Hashable, Hashable], S0: SpaceWithBase, S1: SpaceWithBase) -> None:
    for x in S0.points:
        if x not in f:
            raise ValueError(f"point map is not total: {x!r} has no image")
        if f[x] not in S1.index:
            raise ValueError(f"point map sends {x!r} to {f[x]!r}, outside the target space")


def check_spectral(f: Mapping[Hashable, Hashable], S0: SpaceWithBase, S1: SpaceWithBase) -> bool:
    """Every base set of S1 pulls back to a base set of S0."""
    _check_point_map(f, S0, S1)
    base0 = set(S0.beta_masks)
    return all(pullback_mask(f, S0, S1, m) in base0 for m in S1.beta_masks)


def decode_indices(k: int) -> list[int]:
    return sorted(set_decode(k))


def describe(S: SpaceWithBase) -> dict[str, Any]:
    return {
        "points": list(S.points),
        "base": [sorted(S.beta_set(i), key=str) for i in range(S.n_base)],
    }
