"""Normalizing presentations: relabelings, injective bases, downset c-posets, data reports.

At finite scale every relation is decidable; ``presentation_report`` records which
data a presentation materializes (order, operator code, Inc, beta-inequality) and
how large it is, i.e. what an oracle would have to supply in the infinite case.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .encoding import EnumOperatorCode, pair, set_decode, set_encode
from .order import CPoset, FinitePoset, check_dp_isomorphism
from .topology import SpaceWithBase, inc_from_space


def relabel_cposet(P: CPoset, g: Mapping[int, int]) -> CPoset:
    """Transport P along the bijection g: old carrier -> new labels.

    With f = g^{-1} the new operator is
    { <f^{-1}(x), k'> : <x, k> in A and D_k = f(D_k') }.
    """
    if set(g) != set(P.carrier):
        raise ValueError("relabeling must be defined exactly on the carrier")
    if len(set(g.values())) != len(g):
        raise ValueError("relabeling is not injective")
    f = {new: old for old, new in g.items()}
    f_inv = g
    codes = set()
    for x, k in P.operator.decoded:
        d = set_decode(k)
        if x not in f_inv or not d <= f_inv.keys():
            continue
        # D_k = f(D_k') means D_k' = f^{-1}(D_k)
        k_new = set_encode(f_inv[e] for e in d)
        assert {f[e] for e in set_decode(k_new)} == d
        codes.add(pair(f_inv[x], k_new))
    leq = frozenset((g[a], g[b]) for a, b in P.poset.leq if a in g and b in g)
    return CPoset(FinitePoset(tuple(g.values()), leq), EnumOperatorCode(frozenset(codes)))


def relabel_checked(P: CPoset, g: Mapping[int, int]) -> CPoset:
    """``relabel_cposet`` followed by a DP-isomorphism check of g."""
    Q = relabel_cposet(P, g)
    if not check_dp_isomorphism(P, Q, g):
        raise AssertionError("relabeled c-poset is not DP-isomorphic via the relabeling")
    return Q


def standard_labels(P: CPoset) -> dict[int, int]:
    return {x: i for i, x in enumerate(P.carrier)}


def injectivize_base(S: SpaceWithBase) -> tuple[SpaceWithBase, tuple[int, ...]]:
    """Keep first occurrences: u(0) = 0, u(n+1) = least i with a new beta(i).

    Returns the space with beta' = beta o u (injective) and the index map u.
    """
    seen: set[int] = set()
    u = []
    for i, m in enumerate(S.beta_masks):
        if m not in seen:
            seen.add(m)
            u.append(i)
    beta = tuple(S.beta[i] for i in u)
    return SpaceWithBase(S.points, S.base, beta), tuple(u)


def poset_to_cposet(S: FinitePoset) -> CPoset:
    """Downset c-poset: A = { <a, k> : D_k = {b}, a <= b }."""
    codes = frozenset(pair(a, set_encode([b])) for a, b in S.leq)
    return CPoset(S, EnumOperatorCode(codes))


def _size(obj: Any) -> int:
    return len(json.dumps(obj, separators=(",", ":")).encode())


@dataclass
class PresentationReport:
    kind: str
    relations: dict[str, dict[str, Any]] = field(default_factory=dict)
    injective_beta: bool | None = None
    injectivization: list[int] | None = None
    relabeling: dict[str, int] | None = None
    provenance: dict[str, Any] = field(default_factory=dict)
    conformant: bool = True
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "relations": self.relations, "conformant": self.conformant,
             "notes": self.notes}
        if self.injective_beta is not None:
            d["injective_beta"] = self.injective_beta
        if self.injectivization is not None:
            d["injectivization"] = self.injectivization
        if self.relabeling is not None:
            d["relabeling"] = self.relabeling
        if self.provenance:
            d["provenance"] = self.provenance
        return d


def _relation(data: Any, count: int) -> dict[str, Any]:
    return {"decidable": True, "materialized": True, "size": count, "bytes": _size(data)}


def presentation_report(obj: CPoset | SpaceWithBase, provenance: CPoset | None = None) -> PresentationReport:
    if isinstance(obj, CPoset):
        rep = PresentationReport("cposet")
        carrier = list(obj.carrier)
        leq = sorted(obj.poset.leq)
        ops = sorted(obj.operator.pairs)
        rep.relations["carrier"] = _relation(carrier, len(carrier))
        rep.relations["leq"] = _relation(leq, len(leq))
        rep.relations["operator"] = _relation(ops, len(ops))
        if carrier != list(range(len(carrier))):
            rep.relabeling = {str(x): i for i, x in enumerate(carrier)}
            rep.notes.append("carrier is not an initial segment; relabel_cposet normalizes it")
        rep.notes.append("finite carrier: computable and c.e. presentations coincide")
        return rep
    if isinstance(obj, SpaceWithBase):
        rep = PresentationReport("space")
        n = obj.n_base
        ineq = sorted((i, j) for i in range(n) for j in range(n)
                      if obj.beta_masks[i] != obj.beta_masks[j])
        inc = inc_from_space(obj)
        rep.relations["beta_inequality"] = _relation(ineq, len(ineq))
        rep.relations["inc"] = _relation(sorted(inc.entries), len(inc))
        rep.injective_beta = obj.injective
        if not obj.injective:
            _, u = injectivize_base(obj)
            rep.injectivization = list(u)
            rep.notes.append("beta is not injective; injectivize_base keeps first occurrences u")
        if provenance is not None:
            from .spectrum import inc_from_operator

            sym = inc_from_operator(provenance.operator, provenance.carrier)
            rep.provenance = {
                "source_carrier": list(provenance.carrier),
                "source_operator_size": len(provenance.operator),
                "inc_matches_operator": sym.entries == inc.entries,
            }
            rep.conformant = sym.entries == inc.entries
        rep.notes.append("finite base: Inc and beta-inequality are decidable")
        return rep
    raise TypeError(f"cannot report on {type(obj).__name__}")
