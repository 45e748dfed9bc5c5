"""Bitmask helpers shared by the finite order and topology code."""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from typing import Callable, Hashable, Iterable, Sequence

DEFAULT_SIZE_LIMIT = 16


class SizeLimitError(ValueError):
    pass


def size_limit() -> int:
    raw = os.environ.get("WORKBENCH_SIZE_LIMIT")
    if raw is None:
        return DEFAULT_SIZE_LIMIT
    return int(raw)


def check_size(n: int, what: str) -> None:
    limit = size_limit()
    if n > limit:
        raise SizeLimitError(
            f"{what} has size {n}; exhaustive checks are refused above {limit} "
            "(set WORKBENCH_SIZE_LIMIT to override)"
        )


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def to_mask(positions: Iterable[int]) -> int:
    m = 0
    for p in positions:
        m |= 1 << p
    return m


def submasks(mask: int) -> Iterable[int]:
    """All submasks of ``mask``, ascending."""
    return sorted(_submasks(mask))


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def permute_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for i in bits(mask):
        out |= 1 << perm[i]
    return out


def signature_perms(signature: Sequence[Hashable]) -> Iterable[tuple[int, ...]]:
    """Permutations old->new that sort positions by ``signature``.

    Positions with equal signature are permuted among themselves in every way.
    The set of permutations depends only on the isomorphism-invariant signature,
    so minimizing over it still yields a canonical form.
    """
    n = len(signature)
    classes: dict = {}
    for i, s in enumerate(signature):
        classes.setdefault(s, []).append(i)
    ordered = [classes[s] for s in sorted(classes, key=_sort_key)]
    slots = []
    start = 0
    for cls in ordered:
        slots.append(list(range(start, start + len(cls))))
        start += len(cls)
    for choice in itertools.product(*(itertools.permutations(c) for c in ordered)):
        perm = [0] * n
        for cls_perm, slot in zip(choice, slots):
            for old, new in zip(cls_perm, slot):
                perm[old] = new
        yield tuple(perm)


def _sort_key(s):
    return json.dumps(s, sort_keys=True, default=str)


def canonical_min(signature: Sequence[Hashable], encode: Callable[[tuple[int, ...]], tuple]):
    """Lexicographically least ``encode(perm)`` over signature-respecting perms."""
    best = None
    best_perm = None
    for perm in signature_perms(signature):
        key = encode(perm)
        if best is None or key < best:
            best, best_perm = key, perm
    return best, best_perm


def digest(key) -> str:
    return hashlib.sha256(json.dumps(key, separators=(",", ":")).encode()).hexdigest()[:16]
