"""Numeric codings: Cantor pairing, canonical finite-set codes, enumeration operators.

Naturals are Python ints, so nothing wraps. Set codes grow as 2**max(S); elements
beyond ``MAX_SET_ELEMENT`` are refused with :class:`CodeOverflowError` instead of
allocating a multi-megabyte integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import isqrt
from typing import Any, Iterable

MAX_SET_ELEMENT = 1 << 20


class CodeOverflowError(OverflowError):
    pass


def _natural(n: Any, what: str = "value") -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"{what} must be a natural number, got {n!r}")
    if n < 0:
        raise ValueError(f"{what} must be a natural number, got {n}")
    return n


def pair(x: int, y: int) -> int:
    """Cantor pair code <x, y> = (x+y)(x+y+1)/2 + x."""
    _natural(x, "x")
    _natural(y, "y")
    s = x + y
    return s * (s + 1) // 2 + x


def unpair(n: int) -> tuple[int, int]:
    _natural(n)
    # largest s with s(s+1)/2 <= n
    s = (isqrt(8 * n + 1) - 1) // 2
    x = n - s * (s + 1) // 2
    return x, s - x


def set_decode(k: int) -> frozenset[int]:
    """The finite set D_k: exponents of the binary expansion of k."""
    _natural(k)
    out = []
    while k:
        low = k & -k
        out.append(low.bit_length() - 1)
        k ^= low
    return frozenset(out)


def set_encode(s: Iterable[int]) -> int:
    k = 0
    for x in s:
        _natural(x, "set element")
        if x > MAX_SET_ELEMENT:
            raise CodeOverflowError(f"set element {x} exceeds MAX_SET_ELEMENT={MAX_SET_ELEMENT}")
        k |= 1 << x
    return k


@dataclass(frozen=True)
class EnumOperatorCode:
    """A finite set A of pair codes <x, k>, read as the operator B -> Gamma_A(B)."""

    pairs: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(_natural(p, "pair code") for p in self.pairs))

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, Iterable[int]]]) -> EnumOperatorCode:
        return cls(frozenset(pair(x, set_encode(s)) for x, s in entries))

    @cached_property
    def decoded(self) -> tuple[tuple[int, int], ...]:
        """(x, k) for every code, sorted by pair code."""
        return tuple(unpair(p) for p in sorted(self.pairs))

    def entries(self) -> list[tuple[int, frozenset[int]]]:
        return [(x, set_decode(k)) for x, k in self.decoded]

    def offending(self, carrier: Iterable[int]) -> list[int]:
        """Pair codes whose x or D_k leaves the declared carrier."""
        cmask = set_encode(carrier)
        bad = []
        for p, (x, k) in zip(sorted(self.pairs), self.decoded):
            if not (cmask >> x) & 1 or k & ~cmask:
                bad.append(p)
        return bad

    def to_json(self, form: str = "codes") -> list:
        if form == "codes":
            return sorted(self.pairs)
        if form == "objects":
            return [{"x": x, "set": sorted(s)} for x, s in self.entries()]
        raise ValueError(f"unknown operator form {form!r}")

    @classmethod
    def from_json(cls, data: list) -> EnumOperatorCode:
        codes = []
        for item in data:
            if isinstance(item, dict):
                if set(item) != {"x", "set"}:
                    raise ValueError(f"operator object must have keys x, set: {item!r}")
                codes.append(pair(_natural(item["x"], "x"), set_encode(item["set"])))
            else:
                codes.append(_natural(item, "pair code"))
        return cls(frozenset(codes))

    def __len__(self) -> int:
        return len(self.pairs)


def enum_apply(A: EnumOperatorCode, B: Iterable[int]) -> frozenset[int]:
    """Gamma_A(B) = { x : <x, k> in A and D_k subset of B }."""
    bmask = set_encode(B)
    return frozenset(x for x, k in A.decoded if not k & ~bmask)
