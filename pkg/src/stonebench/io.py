"""JSON input/output for every object kind, plus DOT export.

Every input document carries a mandatory ``kind``. Syntax errors report line and
column; schema errors name the offending field or value.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .encoding import CodeOverflowError, EnumOperatorCode
from .lattices import FiniteAlgebra, InvalidAlgebraError
from .order import CPoset, FinitePoset
from .presentations import poset_to_cposet
from .topology import SpaceWithBase, specialization_order

KINDS = ("cposet", "poset", "space", "lattice", "meet-semilattice", "join-semilattice", "map")
_ALGEBRA_KIND = {"lattice": "lattice", "meet-semilattice": "meet", "join-semilattice": "join"}


class InputError(ValueError):
    """Malformed input; ``line``/``column`` are set for syntax errors."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = ""):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:" if source else ""
        if line is not None:
            where += f"{line}:{column}: "
        elif where:
            where += " "
        super().__init__(where + message)


def _field(doc: dict, name: str, kind: str, default: Any = ...) -> Any:
    if name not in doc:
        if default is ...:
            raise InputError(f"{kind} document is missing field {name!r}")
        return default
    return doc[name]


def _label(v: Any, what: str) -> Any:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise InputError(f"{what} must be an integer or string label, got {v!r}")
    return v


def _nat_list(v: Any, what: str) -> list[int]:
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) or x < 0 for x in v):
        raise InputError(f"{what} must be a list of natural numbers, got {v!r}")
    return v


def _pairs(v: Any, what: str) -> list[tuple]:
    if not isinstance(v, list) or any(not isinstance(p, list) or len(p) != 2 for p in v):
        raise InputError(f"{what} must be a list of [a, b] pairs")
    return [tuple(p) for p in v]


def _parse_poset(doc: dict, kind: str) -> FinitePoset:
    carrier = _nat_list(_field(doc, "carrier", kind), "carrier")
    if len(set(carrier)) != len(carrier):
        raise InputError("carrier has duplicate elements")
    leq = _pairs(_field(doc, "leq", kind, []), "leq")
    cs = set(carrier)
    for a, b in leq:
        if a not in cs or b not in cs:
            raise InputError(f"leq pair {[a, b]} leaves the carrier")
    return FinitePoset.from_pairs(carrier, leq)


def _parse_cposet(doc: dict) -> CPoset:
    poset = _parse_poset(doc, "cposet")
    if "operator" not in doc:
        return poset_to_cposet(poset)
    raw = doc["operator"]
    if not isinstance(raw, list):
        raise InputError("operator must be a list of pair codes or {x, set} objects")
    try:
        op = EnumOperatorCode.from_json(raw)
    except (TypeError, ValueError, CodeOverflowError) as e:
        raise InputError(f"operator: {e}") from None
    bad = op.offending(poset.carrier)
    if bad:
        raise InputError(f"operator pair code {bad[0]} references an element outside the carrier")
    return CPoset(poset, op)


def _parse_space(doc: dict) -> SpaceWithBase:
    points = _field(doc, "points", "space")
    if not isinstance(points, list):
        raise InputError("points must be a list")
    points = [_label(p, "point") for p in points]
    if len(set(points)) != len(points):
        raise InputError("points has duplicate labels")
    base = _field(doc, "base", "space")
    if not isinstance(base, list) or any(not isinstance(b, list) for b in base):
        raise InputError("base must be a list of point lists")
    ps = set(points)
    for i, b in enumerate(base):
        for p in b:
            if p not in ps:
                raise InputError(f"base set {i} mentions unknown point {p!r}")
    beta = doc.get("beta")
    if beta is not None:
        beta = _nat_list(beta, "beta")
        for b in beta:
            if b >= len(base):
                raise InputError(f"beta index {b} is out of range (base has {len(base)} sets)")
    return SpaceWithBase(tuple(points), tuple(frozenset(b) for b in base), beta)


def _parse_algebra(doc: dict, kind: str) -> FiniteAlgebra:
    elements = _field(doc, "elements", kind)
    if not isinstance(elements, list):
        raise InputError("elements must be a list")
    elements = [_label(e, "element") for e in elements]
    leq = doc.get("leq")
    try:
        return FiniteAlgebra.from_tables(_ALGEBRA_KIND[kind], elements, doc.get("meet"), doc.get("join"),
                                         _pairs(leq, "leq") if leq is not None else None)
    except InvalidAlgebraError as e:
        raise InputError(str(e)) from None


def _parse_map(doc: dict) -> dict:
    pairs = _pairs(_field(doc, "pairs", "map"), "pairs")
    out = {}
    for a, b in pairs:
        _label(a, "map argument")
        _label(b, "map value")
        if a in out and out[a] != b:
            raise InputError(f"map sends {a!r} to both {out[a]!r} and {b!r}")
        out[a] = b
    return out


def from_document(doc: Any) -> Any:
    if not isinstance(doc, dict):
        raise InputError("top-level JSON value must be an object")
    kind = doc.get("kind")
    if kind is None:
        raise InputError("missing mandatory field 'kind'")
    if kind not in KINDS:
        raise InputError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind == "cposet":
        return _parse_cposet(doc)
    if kind == "poset":
        return _parse_poset(doc, "poset")
    if kind == "space":
        return _parse_space(doc)
    if kind == "map":
        return _parse_map(doc)
    return _parse_algebra(doc, kind)


def loads(text: str, source: str = "") -> Any:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(e.msg, e.lineno, e.colno, source) from None
    try:
        return from_document(doc)
    except InputError as e:
        if source and not e.source:
            raise InputError(str(e), source=source) from None
        raise


def parse_input(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"cannot read {p}: {e.strerror}") from None
    return loads(text, str(p))


# -- output -----------------------------------------------------------------


def to_document(obj: Any) -> dict:
    if isinstance(obj, CPoset):
        return {"kind": "cposet", "carrier": list(obj.carrier),
                "leq": sorted([a, b] for a, b in obj.poset.leq if a != b),
                "operator": obj.operator.to_json()}
    if isinstance(obj, FinitePoset):
        return {"kind": "poset", "carrier": list(obj.carrier),
                "leq": sorted([a, b] for a, b in obj.leq if a != b)}
    if isinstance(obj, SpaceWithBase):
        doc = {"kind": "space", "points": list(obj.points),
               "base": [sorted(b, key=str) for b in obj.base]}
        if not obj.injective or obj.beta != tuple(range(len(obj.base))):
            doc["beta"] = list(obj.beta)
        return doc
    if isinstance(obj, FiniteAlgebra):
        kind = {v: k for k, v in _ALGEBRA_KIND.items()}[obj.kind]
        doc = {"kind": kind, "elements": list(obj.elements)}
        for name, t in obj.tables().items():
            doc[name] = [[obj.elements[v] for v in row] for row in t]
        return doc
    if isinstance(obj, dict):
        return {"kind": "map", "pairs": sorted(([k, v] for k, v in obj.items()), key=str)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# -- DOT --------------------------------------------------------------------


def _q(x: Any) -> str:
    return json.dumps(str(x))


def _hasse(nodes: list, below: dict) -> list[tuple]:
    """Cover pairs (a, b) with a < b and nothing strictly between."""
    strict = {(a, b) for b in nodes for a in below[b] if a != b}
    return sorted(((a, b) for a, b in strict
                   if not any((a, c) in strict and (c, b) in strict for c in nodes)), key=str)


def dot_poset(P: FinitePoset, name: str = "order") -> str:
    below = {x: {P.carrier[j] for j in range(P.n) if P.below[i] >> j & 1} for i, x in enumerate(P.carrier)}
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    lines += [f"  {_q(x)};" for x in P.carrier]
    lines += [f"  {_q(a)} -> {_q(b)};" for a, b in _hasse(list(P.carrier), below)]
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_space(S: SpaceWithBase) -> str:
    """Specialization order of the points and the inclusion diagram of the base."""
    so = specialization_order(S)
    below = {x: set(so.down(x)) for x in S.points}
    lines = ["digraph space {", "  rankdir=BT;", "  subgraph cluster_points {", '    label="specialization order";']
    lines += [f"    {_q('p:' + str(x))} [label={_q(x)}];" for x in S.points]
    lines += [f"    {_q('p:' + str(a))} -> {_q('p:' + str(b))};" for a, b in _hasse(list(S.points), below)]
    lines += ["  }", "  subgraph cluster_base {", '    label="base inclusion";']
    ms = S.beta_masks
    idx = list(range(S.n_base))
    for i in idx:
        label = "{" + ", ".join(sorted(map(str, S.beta_set(i)))) + "}"
        lines.append(f"    {_q('b:' + str(i))} [label={_q(f'{i}: {label}')}];")
    inc = {i: {j for j in idx if ms[j] & ~ms[i] == 0 and (ms[j] != ms[i] or j <= i)} for i in idx}
    lines += [f"    {_q('b:' + str(a))} -> {_q('b:' + str(b))};" for a, b in _hasse(idx, inc)]
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"


def to_dot(obj: Any) -> str:
    if isinstance(obj, SpaceWithBase):
        return dot_space(obj)
    if isinstance(obj, CPoset):
        return dot_poset(obj.poset, "cposet")
    if isinstance(obj, FinitePoset):
        return dot_poset(obj)
    if isinstance(obj, FiniteAlgebra):
        return dot_poset(FinitePoset.from_pairs(
            obj.elements, [(obj.elements[j], obj.elements[i]) for i, m in enumerate(obj.derived_below)
                           for j in range(obj.n) if m >> j & 1]), "lattice")
    raise TypeError(f"cannot draw {type(obj).__name__}")
