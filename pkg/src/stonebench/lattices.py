"""Semilattices and lattices as operation tables, their c-posets, and base witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ._bits import bits, to_mask
from .order import CPoset, FinitePoset, operator_from_closure
from .presentations import poset_to_cposet
from .reports import PreconditionError, Report
from .spectrum import spectrum
from .topology import SpaceWithBase, classify

KINDS = ("meet", "join", "lattice")


class InvalidAlgebraError(PreconditionError):
    pass


def _table(elements: tuple, rows: Sequence[Sequence]) -> tuple[tuple[int, ...], ...]:
    """Accept a table of element labels and return one of positions."""
    idx = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InvalidAlgebraError(f"operation table must be {n} x {n}")
    try:
        return tuple(tuple(idx[v] for v in r) for r in rows)
    except KeyError as e:
        raise InvalidAlgebraError(f"table entry {e.args[0]!r} is not an element") from None


@dataclass(frozen=True)
class FiniteAlgebra:
    """A meet-semilattice, join-semilattice or lattice given by operation tables.

    Tables are indexed by element position and hold positions. ``leq`` is optional
    and, when given, is cross-checked against the order derived from the tables.
    """

    kind: str
    elements: tuple
    meet: tuple[tuple[int, ...], ...] | None = None
    join: tuple[tuple[int, ...], ...] | None = None
    leq: frozenset | None = None

    @classmethod
    def from_tables(cls, kind: str, elements: Iterable, meet=None, join=None, leq=None) -> FiniteAlgebra:
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        els = tuple(elements)
        m = _table(els, meet) if meet is not None else None
        j = _table(els, join) if join is not None else None
        lq = frozenset(map(tuple, leq)) if leq is not None else None
        return cls(kind, els, m, j, lq)

    @classmethod
    def from_poset(cls, kind: str, P: FinitePoset) -> FiniteAlgebra:
        """Read the tables off a poset; raises if a required bound is missing."""
        n = P.n
        below, above = P.below, P.above

        def bound(masks, a, b):
            common = masks[a] & masks[b]
            for c in bits(common):
                if masks[c] == common:
                    return c
            raise InvalidAlgebraError(f"{P.carrier[a]} and {P.carrier[b]} have no bound")

        # greatest lower bound: c with below[c] == common lower set
        meet = tuple(tuple(bound(below, a, b) for b in range(n)) for a in range(n)) if kind != "join" else None
        join = tuple(tuple(bound(above, a, b) for b in range(n)) for a in range(n)) if kind != "meet" else None
        return cls(kind, P.carrier, meet, join, P.leq)

    @property
    def n(self) -> int:
        return len(self.elements)

    def tables(self) -> dict[str, tuple]:
        out = {}
        if self.meet is not None:
            out["meet"] = self.meet
        if self.join is not None:
            out["join"] = self.join
        return out

    @cached_property
    def derived_below(self) -> tuple[int, ...]:
        """below[i]: positions j with j <= i, from a^b = a or a v b = b."""
        n = self.n
        out = []
        for i in range(n):
            m = 0
            for j in range(n):
                if (self.meet[j][i] == j) if self.meet is not None else (self.join[j][i] == i):
                    m |= 1 << j
            out.append(m)
        return tuple(out)

    def poset(self) -> FinitePoset:
        return FinitePoset.from_masks(range(self.n), self.derived_below)

    @cached_property
    def validation(self) -> Report:
        return _validate(self)


def _check_op(r: Report, name: str, t, n: int, elements) -> None:
    bad = next((elements[a] for a in range(n) if t[a][a] != a), None)
    r.add(f"{name} idempotent", bad is None, witness=bad)
    bad = next(((elements[a], elements[b]) for a in range(n) for b in range(n) if t[a][b] != t[b][a]), None)
    r.add(f"{name} commutative", bad is None, witness=bad)
    bad = next(((elements[a], elements[b], elements[c]) for a in range(n) for b in range(n) for c in range(n)
                if t[t[a][b]][c] != t[a][t[b][c]]), None)
    r.add(f"{name} associative", bad is None, witness=bad)


def _validate(L: FiniteAlgebra) -> Report:
    r = Report(f"{L.kind} algebra")
    n, els = L.n, L.elements
    if len(set(els)) != n:
        r.add("distinct elements", False)
        return r
    need = {"meet": ("meet",), "join": ("join",), "lattice": ("meet", "join")}[L.kind]
    for name in need:
        if getattr(L, name) is None:
            r.add(f"{name} table present", False)
            return r
    for name, t in L.tables().items():
        _check_op(r, name, t, n, els)
    if L.meet is not None and L.join is not None:
        m, j = L.meet, L.join
        bad = next(((els[a], els[b]) for a in range(n) for b in range(n)
                    if m[a][j[a][b]] != a or j[a][m[a][b]] != a), None)
        r.add("absorption", bad is None, witness=bad)
    if L.leq is not None and r.passed:
        derived = {(els[j], els[i]) for i, mk in enumerate(L.derived_below) for j in bits(mk)}
        supplied = set(L.leq) | {(e, e) for e in els}
        diff = sorted(derived ^ supplied, key=str)
        r.add("supplied order matches the derived order", not diff, witness=diff[:1] or None)
    return r


def _require_valid(L: FiniteAlgebra) -> None:
    if not L.validation.passed:
        raise InvalidAlgebraError("invalid algebra:\n" + L.validation.to_text())


def join_ideal_closure(L: FiniteAlgebra, X: Iterable[int]) -> frozenset[int]:
    """psi(X): everything below some finite join of elements of X (positions)."""
    _require_valid(L)
    if L.join is None:
        raise InvalidAlgebraError("join table required")
    return frozenset(bits(_psi_mask(L, sum(1 << x for x in set(X)))))


def _psi_mask(L: FiniteAlgebra, m: int) -> int:
    if m == 0:
        return 0
    j = L.join
    xs = bits(m)
    top = xs[0]
    for x in xs[1:]:
        top = j[top][x]
    # finite joins of X lie below the join of all of X, which is itself a finite join
    return L.derived_below[top]


def cposet_from_semilattice(L: FiniteAlgebra, kind: str | None = None) -> CPoset:
    """Join kind (and lattices) close by psi; meet-semilattices close by downsets."""
    _require_valid(L)
    kind = kind or ("meet" if L.kind == "meet" else "join")
    poset = L.poset()
    if kind == "meet":
        return poset_to_cposet(poset)
    if L.join is None:
        raise InvalidAlgebraError("join table required for the join-ideal closure")
    op = operator_from_closure(poset.carrier, lambda F: bits(_psi_mask(L, to_mask(F))))
    return CPoset(poset, op)


@dataclass(frozen=True)
class SemilatticeWitness:
    kind: str
    table: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "table": [list(r) for r in self.table]}


@dataclass(frozen=True)
class WitnessGap:
    """Certificate that no witness exists: beta(i) op beta(j) is not a base set."""

    kind: str
    pair: tuple[int, int]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "offending_pair": list(self.pair)}


def _find_witness(S: SpaceWithBase, kind: str) -> SemilatticeWitness | WitnessGap:
    ms = S.beta_masks
    first = {}
    for i, m in enumerate(ms):
        first.setdefault(m, i)
    n = len(ms)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            v = ms[i] & ms[j] if kind == "meet" else ms[i] | ms[j]
            if v not in first:
                return WitnessGap(kind, (i, j))
            row.append(first[v])
        rows.append(tuple(row))
    return SemilatticeWitness(kind, tuple(rows))


def find_meet_witness(S: SpaceWithBase) -> SemilatticeWitness | WitnessGap:
    return _find_witness(S, "meet")


def find_join_witness(S: SpaceWithBase) -> SemilatticeWitness | WitnessGap:
    return _find_witness(S, "join")


def check_semilattice_duality(L: FiniteAlgebra) -> Report:
    """Build the spectrum and check that the operation tables transport to the base."""
    r = Report(f"{L.kind} duality")
    r.add("valid algebra", L.validation.passed)
    if not r.passed:
        return r
    P = cposet_from_semilattice(L)
    r.add("c-poset is distributive", P.distributive)
    if not r.passed:
        return r
    sp = spectrum(P)
    V = sp.v_masks
    n = L.n
    for name, t in L.tables().items():
        op = (lambda a, b: a & b) if name == "meet" else (lambda a, b: a | b)
        bad = next(((L.elements[a], L.elements[b]) for a in range(n) for b in range(n)
                    if op(V[a], V[b]) != V[t[a][b]]), None)
        sym = "cap" if name == "meet" else "cup"
        r.add(f"V_a {sym} V_b = V_(a {name} b)", bad is None, f"{n * n} pairs", bad)
        w = _find_witness(sp.space, name)
        r.add(f"{name} witness on the spectrum", isinstance(w, SemilatticeWitness),
              witness=w.to_dict() if isinstance(w, WitnessGap) else None)
        if isinstance(w, SemilatticeWitness):
            r.add(f"{name} witness equals the {name} table", w.table == t)
    cell = {"meet": "ASp", "join": "AsSpec", "lattice": "ASpec"}[L.kind]
    r.add(f"spectrum lies in the {cell} cell", cell in classify(sp.space).cells)
    return r


def lattice_from_poset(P: FinitePoset) -> FiniteAlgebra:
    return FiniteAlgebra.from_poset("lattice", P)


def m3() -> FiniteAlgebra:
    """The diamond 0 < a, b, c < 1 (modular, not distributive)."""
    P = FinitePoset.from_pairs(range(5), [(0, i) for i in (1, 2, 3, 4)] + [(i, 4) for i in (1, 2, 3)])
    return lattice_from_poset(P)


def n5() -> FiniteAlgebra:
    """The pentagon 0 < a < c < 1, 0 < b < 1 (not modular)."""
    P = FinitePoset.from_pairs(range(5), [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4), (0, 2), (0, 4), (1, 4)])
    return lattice_from_poset(P)
