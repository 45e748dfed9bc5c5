"""Exhaustive and random instance streams with canonical-form deduplication.

Exhaustive streams emit one instance per isomorphism class, in ascending order of
canonical key, unless ``labeled=True`` asks for every labeling on 0..n-1.

Posets: each poset has a maximal element, so every class on n points arises from a
class on n-1 points plus a new top over one of its downsets.

Distributive c-posets: Id P is a finite distributive lattice, hence the downsets of
its poset Q of join-irreducibles, and those are principal ideals. So P is a family J
of nonempty downsets of Q containing every principal one, ordered by inclusion, with
phi(X) = {j in J : j inside the union of X}.

Spaces: a finite T0 topology is the up-sets of its specialization order, and a family
of opens is a basis iff it contains every minimal neighbourhood. So a space with base
is a poset plus extra up-sets on top of the principal ones.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterator

import numpy as np

from ._bits import SizeLimitError, bits, canonical_min, digest, permute_mask, popcount
from .order import CPoset, FinitePoset, operator_from_closure
from .topology import SpaceWithBase, validate_space

EXHAUSTIVE_LIMITS = {"posets": 6, "cposets": 5, "points": 5, "base": 6, "lattices": 6}


def _check_exhaustive(n: int, what: str) -> None:
    raw = os.environ.get("WORKBENCH_SIZE_LIMIT")
    limit = int(raw) if raw is not None else EXHAUSTIVE_LIMITS[what]
    if n > limit:
        raise SizeLimitError(
            f"exhaustive {what} generation is refused above {limit} (got {n}; set WORKBENCH_SIZE_LIMIT to override)"
        )


@dataclass(frozen=True)
class Instance:
    kind: str
    obj: Any
    key: tuple
    digest: str


@dataclass
class InstanceStream:
    kind: str
    bound: tuple
    seed: int | None
    instances: list[Instance] = field(default_factory=list)

    def __iter__(self) -> Iterator[Any]:
        return (i.obj for i in self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def digests(self) -> list[str]:
        return [i.digest for i in self.instances]


def _stream(kind: str, bound: tuple, keys, build, seed=None) -> InstanceStream:
    s = InstanceStream(kind, bound, seed)
    for k in sorted(keys):
        s.instances.append(Instance(kind, build(k), k, digest([kind, list(bound), k])))
    return s


# -- posets -----------------------------------------------------------------


def _closure_below(below: list[int]) -> list[int]:
    """Transitive closure of ``below`` masks (each includes itself)."""
    n = len(below)
    out = list(below)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            m = out[i]
            for j in bits(m):
                m |= out[j]
            if m != out[i]:
                out[i] = m
                changed = True
    return out


def _above(below: tuple[int, ...]) -> list[int]:
    n = len(below)
    return [sum(1 << j for j in range(n) if below[j] >> i & 1) for i in range(n)]


def _poset_key(below: tuple[int, ...]) -> tuple[int, ...]:
    above = _above(below)
    sig = [(popcount(below[i]), popcount(above[i])) for i in range(len(below))]

    def encode(perm):
        out = [0] * len(below)
        for i, m in enumerate(below):
            out[perm[i]] = permute_mask(m, perm)
        return tuple(out)

    return canonical_min(sig, encode)[0]


def _downsets(below: tuple[int, ...]) -> list[int]:
    n = len(below)
    return [m for m in range(1 << n) if all(below[i] & ~m == 0 for i in bits(m))]


@lru_cache(maxsize=None)
def _poset_classes(n: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    keys = set()
    for below in _poset_classes(n - 1):
        for d in _downsets(below):
            keys.add(_poset_key(below + (d | 1 << (n - 1),)))
    return tuple(sorted(keys))


def _relabelings(key: tuple[int, ...], n: int, apply) -> set:
    return {apply(key, perm) for perm in itertools.permutations(range(n))}


def _permute_below(below: tuple[int, ...], perm) -> tuple[int, ...]:
    out = [0] * len(below)
    for i, m in enumerate(below):
        out[perm[i]] = permute_mask(m, perm)
    return tuple(out)


def gen_posets(n: int, labeled: bool = False) -> InstanceStream:
    _check_exhaustive(n, "posets")
    keys = set(_poset_classes(n))
    if labeled:
        keys = set().union(*(_relabelings(k, n, _permute_below) for k in keys))
    return _stream("poset", (n,), keys, lambda k: FinitePoset.from_masks(range(n), k))


def random_poset(n: int, rng: random.Random, density: float | None = None) -> FinitePoset:
    p = rng.random() if density is None else density
    order = list(range(n))
    rng.shuffle(order)
    below = [1 << i for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                below[order[b]] |= 1 << order[a]
    return FinitePoset.from_masks(range(n), _closure_below(below))


# -- distributive c-posets --------------------------------------------------


def _closure_from_ideals(n: int, ideals: tuple[int, ...]):
    full = (1 << n) - 1

    def phi(m: int) -> int:
        out = full
        for i in ideals:
            if m & ~i == 0:
                out &= i
        return out

    return phi


def cposet_from_ideals(n: int, ideals) -> CPoset:
    """The c-poset on 0..n-1 whose ideals are the given masks (a Moore family)."""
    ideals = tuple(sorted(set(ideals)))
    phi = _closure_from_ideals(n, ideals)
    below = [phi(1 << i) for i in range(n)]
    op = operator_from_closure(range(n), lambda F: bits(phi(sum(1 << x for x in F))))
    return CPoset(FinitePoset.from_masks(range(n), below), op)


def _family_cposet_ideals(family: list[int]) -> tuple[int, ...]:
    """Ideals of the c-poset on ``family`` (masks over Q) with phi(X) = {j : j inside union X}."""
    out = set()
    for d in _unions(family):
        out.add(sum(1 << i for i, j in enumerate(family) if j & ~d == 0))
    return tuple(sorted(out))


def _unions(family: list[int]) -> set[int]:
    seen = {0}
    for j in family:
        seen |= {s | j for s in seen}
    return seen


def _cposet_key(n: int, ideals: tuple[int, ...]) -> tuple[int, ...]:
    phi = _closure_from_ideals(n, ideals)
    below = [phi(1 << i) for i in range(n)]
    above = _above(tuple(below))
    sig = [(popcount(below[i]), popcount(above[i]), sum(1 for m in ideals if m >> i & 1)) for i in range(n)]
    return canonical_min(sig, lambda perm: tuple(sorted(permute_mask(m, perm) for m in ideals)))[0]


@lru_cache(maxsize=None)
def _cposet_classes(n: int) -> tuple[tuple[int, ...], ...]:
    keys = set()
    for q in range(1 if n else 0, n + 1):
        for Q in _poset_classes(q):
            principal = list(Q)
            extra = [d for d in _downsets(Q) if d and d not in principal]
            for chosen in itertools.combinations(extra, n - q):
                keys.add(_cposet_key(n, _family_cposet_ideals(principal + list(chosen))))
    return tuple(sorted(keys))


def _permute_family(key: tuple[int, ...], perm) -> tuple[int, ...]:
    return tuple(sorted(permute_mask(m, perm) for m in key))


def gen_distributive_cposets(n: int, labeled: bool = False) -> InstanceStream:
    _check_exhaustive(n, "cposets")
    keys = set(_cposet_classes(n))
    if labeled:
        keys = set().union(*(_relabelings(k, n, _permute_family) for k in keys))
    return _stream("cposet", (n,), keys, lambda k: cposet_from_ideals(n, k))


def random_distributive_cposet(n: int, rng: random.Random) -> CPoset:
    """Random Q and random extra downsets, then a random labeling of 0..n-1."""
    while True:
        q = rng.randint(1, n) if n else 0
        Q = random_poset(q, rng).below
        principal = list(Q)
        extra = [d for d in _downsets(Q) if d and d not in principal]
        if len(extra) >= n - q:
            break
    family = principal + rng.sample(extra, n - q)
    perm = list(range(n))
    rng.shuffle(perm)
    ideals = [permute_mask(m, perm) for m in _family_cposet_ideals(family)]
    return cposet_from_ideals(n, ideals)


def random_distributive_cposets(count: int, max_n: int, seed: int) -> InstanceStream:
    rng = random.Random(seed)
    s = InstanceStream("cposet", (max_n,), seed)
    for _ in range(count):
        n = rng.randint(1, max_n)
        P = random_distributive_cposet(n, rng)
        key = (n, P.ideal_masks)
        s.instances.append(Instance("cposet", P, key, digest(["cposet", n, list(key[1])])))
    return s


# -- spaces -----------------------------------------------------------------


def _upsets(above: list[int], n: int) -> list[int]:
    return [m for m in range(1 << n) if all(above[i] & ~m == 0 for i in bits(m))]


def _space_key(n: int, base: tuple[int, ...]) -> tuple[int, ...]:
    sig = [(sum(1 for b in base if b >> i & 1), sum(popcount(b) for b in base if b >> i & 1)) for i in range(n)]
    return canonical_min(sig, lambda perm: tuple(sorted(permute_mask(m, perm) for m in base)))[0]


@lru_cache(maxsize=None)
def _space_classes(n: int, k: int, mode: str) -> tuple[tuple[int, ...], ...]:
    keys = set()
    if k < n:
        return ()
    for below in _poset_classes(n):
        above = _above(below)
        principal = set(above)
        extra = [u for u in _upsets(above, n) if u not in principal]
        for chosen in itertools.combinations(extra, k - n):
            base = tuple(sorted(principal | set(chosen)))
            if validate_space(SpaceWithBase.from_masks(n, base), mode).passed:
                keys.add(_space_key(n, base))
    return tuple(sorted(keys))


def gen_spaces(n_points: int, n_base: int, labeled: bool = False, mode: str = "standard") -> InstanceStream:
    """Valid spaces on 0..n_points-1 with exactly n_base distinct base sets."""
    _check_exhaustive(n_points, "points")
    _check_exhaustive(n_base, "base")
    keys = set(_space_classes(n_points, n_base, mode))
    if labeled:
        keys = set().union(*(_relabelings(k, n_points, _permute_family) for k in keys))
    return _stream("space", (n_points, n_base), keys, lambda k: SpaceWithBase.from_masks(n_points, k))


def gen_spaces_upto(max_points: int, max_base: int, mode: str = "standard") -> InstanceStream:
    out = InstanceStream("space", (max_points, max_base), None)
    for n in range(max_points + 1):
        for k in range(max_base + 1):
            out.instances.extend(gen_spaces(n, k, mode=mode).instances)
    return out


# -- lattices ---------------------------------------------------------------


def _bounds_exist(below: tuple[int, ...], above: list[int]) -> bool:
    n = len(below)
    for masks in (below, above):
        for a in range(n):
            for b in range(a + 1, n):
                common = masks[a] & masks[b]
                if not any(masks[c] == common for c in bits(common)):
                    return False
    return True


def gen_lattices(n: int, distributive_only: bool = False) -> InstanceStream:
    """Lattices on n >= 1 elements, one per isomorphism class."""
    from .lattices import cposet_from_semilattice, lattice_from_poset

    _check_exhaustive(n, "lattices")
    keys = [k for k in _poset_classes(n) if n and _bounds_exist(k, _above(k))]
    s = _stream("lattice", (n,), keys, lambda k: lattice_from_poset(FinitePoset.from_masks(range(n), k)))
    if distributive_only:
        s.instances = [i for i in s.instances if cposet_from_semilattice(i.obj).distributive]
    return s


# -- maps -------------------------------------------------------------------


def _all_maps(n0: int, n1: int) -> np.ndarray:
    """Every function 0..n0-1 -> 0..n1-1 as rows of target positions, lexicographic."""
    if n0 == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if n1 == 0:
        return np.zeros((0, n0), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(n1)] * n0), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def _pullbacks(maps: np.ndarray, masks) -> np.ndarray:
    """pullbacks[r, c]: positions i with maps[r, i] in masks[c]."""
    weights = 1 << np.arange(maps.shape[1], dtype=np.int64)
    m = np.asarray(masks, dtype=np.int64).reshape(1, 1, -1)
    member = (m >> maps[:, :, None]) & 1
    return np.einsum("ric,i->rc", member, weights)


def _passing_maps(maps: np.ndarray, targets, allowed) -> np.ndarray:
    if len(maps) == 0 or len(targets) == 0:
        return maps
    pb = _pullbacks(maps, targets)
    ok = np.isin(pb, np.asarray(sorted(allowed), dtype=np.int64)).all(axis=1)
    return maps[ok]


def strict_maps(P0: CPoset, P1: CPoset) -> list[dict[int, int]]:
    """All carrier maps P0 -> P1 under which every prime of P1 pulls back to a prime of P0."""
    maps = _passing_maps(_all_maps(P0.n, P1.n), P1.prime_masks, P0.prime_masks)
    return [{P0.carrier[i]: P1.carrier[j] for i, j in enumerate(row)} for row in maps.tolist()]


def spectral_maps(S0: SpaceWithBase, S1: SpaceWithBase) -> list[dict]:
    """All point maps S0 -> S1 under which every base set of S1 pulls back to a base set of S0."""
    maps = _passing_maps(_all_maps(S0.n_points, S1.n_points), S1.beta_masks, S0.beta_masks)
    return [{S0.points[i]: S1.points[j] for i, j in enumerate(row)} for row in maps.tolist()]
