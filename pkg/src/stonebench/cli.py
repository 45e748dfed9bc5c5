"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a check failed, 2 the input is invalid.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any

from . import __version__
from ._bits import SizeLimitError
from .acceptance import CRITERIA, run_suite, suite_lines
from .duality import counit_map, functor_P_obj, functor_T_mor, morphism_duality_check, unit_map
from .encoding import CodeOverflowError
from .generator import gen_distributive_cposets, gen_lattices, gen_posets, gen_spaces
from .io import InputError, dumps, parse_input, to_document, to_dot
from .lattices import (
    FiniteAlgebra,
    SemilatticeWitness,
    check_semilattice_duality,
    cposet_from_semilattice,
    find_join_witness,
    find_meet_witness,
)
from .order import CPoset, FinitePoset, _prime_verdict, check_strict, validate_cposet
from .presentations import injectivize_base, poset_to_cposet, presentation_report
from .reports import PreconditionError, Report
from .spectrum import NotDistributiveError, inc_from_operator, spectrum
from .topology import MODES, SpaceWithBase, check_spectral, classify, inc_from_space, validate_space

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class Outcome:
    """A verb's result: report body, pass flag, and text rendering."""

    def __init__(self, body: dict, passed: bool, text: str):
        self.body, self.passed, self.text = body, passed, text


def _as_cposet(obj: Any) -> CPoset:
    if isinstance(obj, CPoset):
        return obj
    if isinstance(obj, FinitePoset):
        return poset_to_cposet(obj)
    if isinstance(obj, FiniteAlgebra):
        return cposet_from_semilattice(obj)
    raise InputError(f"expected a cposet, poset or lattice document, got {type(obj).__name__}")


def _as_space(obj: Any) -> SpaceWithBase:
    if not isinstance(obj, SpaceWithBase):
        raise InputError(f"expected a space document, got {type(obj).__name__}")
    return obj


def _report(rep: Report, extra: dict | None = None) -> Outcome:
    body = rep.to_dict()
    if extra:
        body.update(extra)
    return Outcome(body, rep.passed, rep.to_text())


def _json_text(data: Any) -> str:
    return dumps(data).rstrip("\n")


def cmd_validate(args, obj) -> Outcome:
    if isinstance(obj, CPoset):
        rep = validate_cposet(obj)
        if rep.passed:
            rep.notes.append(f"distributive: {obj.distributive}")
        return _report(rep)
    if isinstance(obj, FinitePoset):
        return _report(obj.validate())
    if isinstance(obj, SpaceWithBase):
        rep = validate_space(obj, args.mode)
        pres = presentation_report(obj)
        return _report(rep, {"presentation": pres.to_dict()})
    if isinstance(obj, FiniteAlgebra):
        return _report(obj.validation)
    raise InputError("nothing to validate in a map document")


def _spectrum_body(P: CPoset, maxk: int | None) -> dict:
    sp = spectrum(P)
    inc = inc_from_operator(P.operator, P.carrier, maxk)
    return {"space": to_document(sp.space), "provenance": sp.provenance(), "basis": sp.basis_report.to_dict(),
            "inc": inc.to_json(), "presentation": presentation_report(sp.space, provenance=P).to_dict()}


def cmd_spectrum(args, obj) -> Outcome:
    P = _as_cposet(obj)
    try:
        body = _spectrum_body(P, args.maxk)
    except NotDistributiveError as e:
        return Outcome({"refused": str(e)}, False, f"refused: {e}")
    sp = spectrum(P)
    lines = [f"spectrum: {sp.space.n_points} points, {sp.space.n_base} base sets"]
    for p, ideal in enumerate(sp.prime_sets()):
        lines.append(f"  point {p}: prime ideal {sorted(ideal)}")
    for a, x in enumerate(P.carrier):
        lines.append(f"  V_{x} = {sorted(sp.space.beta_set(a))}")
    lines.append(sp.basis_report.to_text())
    return Outcome(body, sp.basis_report.passed, "\n".join(lines))


def cmd_dual(args, obj) -> Outcome:
    if isinstance(obj, SpaceWithBase):
        S, u = (obj, None) if obj.injective else injectivize_base(obj)
        Q = functor_P_obj(S)
        body = {"cposet": to_document(Q), "inc": inc_from_space(S, args.maxk).to_json()}
        if u is not None:
            body["injectivization"] = list(u)
        rep = validate_cposet(Q)
        body["validation"] = rep.to_dict()
        return Outcome(body, rep.passed, _json_text(body["cposet"]) + "\n" + rep.to_text())
    return cmd_spectrum(args, obj)


def cmd_roundtrip(args, obj) -> Outcome:
    if args.side == "PT":
        P = _as_cposet(obj)
        try:
            c = counit_map(P)
        except NotDistributiveError as e:
            return Outcome({"refused": str(e)}, False, f"refused: {e}")
        table = [[a, x] for a, x in sorted(c.xi.items())]
        text = c.report.to_text() + "\n  xi: " + ", ".join(f"V_{x} -> {x}" for _, x in table)
        return Outcome({**c.report.to_dict(), "xi": table}, c.passed, text)
    S = _as_space(obj)
    if not S.injective:
        S, _ = injectivize_base(S)
    u = unit_map(S)
    table = sorted(([k, v] for k, v in u.mapping.items()), key=str)
    text = u.report.to_text() + "\n  f_X: " + ", ".join(f"{k} -> {v}" for k, v in table)
    return Outcome({**u.report.to_dict(), "unit": table}, u.passed, text)


def cmd_primes(args, obj) -> Outcome:
    P = _as_cposet(obj)
    rep = Report("prime ideals")
    rows = []
    for m in P.ideal_masks:
        v = _prime_verdict(P, m)
        if not v.proper:
            continue
        rows.append({"ideal": sorted(v.ideal), "prime": v.prime, "complement_filter": v.complement_filter,
                     "meet_prime": v.meet_prime, "bounds_condition": v.bounds_condition})
        if P.distributive:
            rep.add(f"criteria agree on {sorted(v.ideal)}", v.agree)
    rep.notes.append(f"distributive: {P.distributive}")
    lines = [rep.to_text()]
    lines += [f"  {r['ideal']}: prime={r['prime']} (filter={r['complement_filter']}, "
              f"meet={r['meet_prime']}, bounds={r['bounds_condition']})" for r in rows]
    return Outcome({**rep.to_dict(), "ideals": rows}, rep.passed, "\n".join(lines))


def cmd_classify(args, obj) -> Outcome:
    S = obj if isinstance(obj, SpaceWithBase) else spectrum(_as_cposet(obj)).space
    c = classify(S, args.mode)
    body = c.to_dict()
    lines = [f"classification (mode={args.mode})"]
    lines += [f"  {k}: {v}" for k, v in c.flags.items()]
    lines.append("  cells: " + (", ".join(c.cells) or "none"))
    return Outcome(body, c.flags["valid"], "\n".join(lines))


def _load_three(paths: list[str]):
    if len(paths) != 3:
        raise InputError("expected SOURCE TARGET MAP")
    return [parse_input(p) for p in paths]


def cmd_check_strict(args, _obj) -> Outcome:
    P0, P1, f = _load_three(args.inputs)
    P0, P1 = _as_cposet(P0), _as_cposet(P1)
    if not isinstance(f, dict):
        raise InputError("third input must be a map document")
    ok = check_strict(P0, P1, f)
    rep = Report("strict map")
    rep.add("every prime of the target pulls back to a prime", ok)
    if ok:
        sub = morphism_duality_check(f, "strict", P0, P1)
        rep.checks += sub.checks
        m = functor_T_mor(f, P0, P1)
        return Outcome({**rep.to_dict(), "dual": m.to_dict()}, rep.passed, rep.to_text())
    return _report(rep)


def cmd_check_spectral(args, _obj) -> Outcome:
    S0, S1, f = _load_three(args.inputs)
    S0, S1 = _as_space(S0), _as_space(S1)
    if not isinstance(f, dict):
        raise InputError("third input must be a map document")
    rep = Report("spectral map")
    rep.add("every base set of the target pulls back to a base set", check_spectral(f, S0, S1))
    if rep.passed and S0.injective and S1.injective:
        rep.checks += morphism_duality_check(f, "spectral", S0, S1).checks
    return _report(rep)


def cmd_witness(args, obj) -> Outcome:
    if isinstance(obj, FiniteAlgebra):
        return _report(check_semilattice_duality(obj))
    S = _as_space(obj)
    if not S.injective:
        S, _ = injectivize_base(S)
    body, lines, ok = {}, [], True
    for kind, fn in (("meet", find_meet_witness), ("join", find_join_witness)):
        w = fn(S)
        body[kind] = w.to_dict()
        if isinstance(w, SemilatticeWitness):
            lines.append(f"{kind} witness: " + "; ".join(" ".join(map(str, r)) for r in w.table))
        else:
            ok = False
            lines.append(f"{kind} witness: none, base sets {w.pair[0]} and {w.pair[1]} have no base {kind}")
    return Outcome(body, ok, "\n".join(lines))


def cmd_suite(args, _obj) -> Outcome:
    only = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    if only and any(k not in CRITERIA for k in only):
        raise InputError(f"criteria must be among {sorted(CRITERIA)}")
    report = run_suite(seed=args.seed, only=only)
    return Outcome(report, report["passed"], "\n".join(suite_lines(report)))


_GENERATORS = {
    "posets": lambda a: gen_posets(a.size),
    "cposets": lambda a: gen_distributive_cposets(a.size),
    "spaces": lambda a: gen_spaces(a.size, a.base if a.base is not None else a.size),
    "lattices": lambda a: gen_lattices(a.size),
}


def cmd_export(args, obj) -> Outcome:
    if args.corpus:
        stream = _GENERATORS[args.corpus](args)
        docs = [{"digest": i.digest, "instance": to_document(i.obj)} for i in stream.instances]
        body = {"corpus": args.corpus, "bound": list(stream.bound), "count": len(docs), "instances": docs}
        return Outcome(body, True, _json_text(body))
    if obj is None:
        raise InputError("export needs an input file or --corpus")
    if args.to == "dot":
        text = to_dot(obj)
        return Outcome({"dot": text}, True, text.rstrip("\n"))
    doc = to_document(obj)
    return Outcome(doc, True, _json_text(doc))


VERBS = {
    "validate": cmd_validate,
    "spectrum": cmd_spectrum,
    "dual": cmd_dual,
    "roundtrip": cmd_roundtrip,
    "primes": cmd_primes,
    "classify": cmd_classify,
    "check-strict": cmd_check_strict,
    "check-spectral": cmd_check_spectral,
    "witness": cmd_witness,
    "suite": cmd_suite,
    "export": cmd_export,
}
_MULTI = {"check-strict", "check-spectral"}
_NO_INPUT = {"suite"}


def _natural(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--maxk", type=_natural, default=None, help="largest set code for Inc listings")
    common.add_argument("--mode", choices=MODES, default="standard", help="reading of almost sober")
    common.add_argument("--seed", type=_natural, default=42)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    p = argparse.ArgumentParser(prog="stonebench", description="Finite c-posets, spectra and spaces with base.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        sp = sub.add_parser(verb, parents=[common])
        if verb in _MULTI:
            sp.add_argument("inputs", nargs=3, metavar="FILE", help="source, target, map")
        elif verb == "export":
            sp.add_argument("input", nargs="?")
            sp.add_argument("--to", choices=("json", "dot"), default="json")
            sp.add_argument("--corpus", choices=sorted(_GENERATORS))
            sp.add_argument("--size", type=_natural, default=3)
            sp.add_argument("--base", type=_natural, default=None)
        elif verb == "suite":
            sp.add_argument("--criteria", default=None, help="comma-separated criterion numbers")
        else:
            sp.add_argument("input")
        if verb == "roundtrip":
            sp.add_argument("--side", choices=("PT", "TP"), required=True)
    return p


def _header(args) -> dict:
    h = {"verb": args.verb, "mode": args.mode}
    if getattr(args, "input", None):
        h["input"] = Path(args.input).name
    if getattr(args, "inputs", None):
        h["inputs"] = [Path(x).name for x in args.inputs]
    if args.verb == "suite":
        h["seed"] = args.seed
    return h


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    header = _header(args)
    try:
        obj = None
        if args.verb not in _NO_INPUT and args.verb not in _MULTI and getattr(args, "input", None):
            obj = parse_input(args.input)
        out = VERBS[args.verb](args, obj)
        code = EXIT_OK if out.passed else EXIT_FAIL
    except (InputError, CodeOverflowError, SizeLimitError) as e:
        out, code = Outcome({"error": str(e)}, False, f"error: {e}"), EXIT_INVALID
    except PreconditionError as e:
        out, code = Outcome({"error": str(e)}, False, f"precondition failed: {e}"), EXIT_FAIL
    except ValueError as e:
        # malformed maps and labels surface as ValueError from the library
        out, code = Outcome({"error": str(e)}, False, f"error: {e}"), EXIT_INVALID
    if args.verb == "export" and code == EXIT_OK:
        # exports are artifacts, not reports: emit the document alone
        text = out.text + "\n"
    elif args.format == "json":
        text = dumps({"header": header, "status": ["pass", "fail", "invalid"][code], "report": out.body})
    else:
        head = " ".join(f"{k}={v}" for k, v in header.items() if k != "verb")
        text = f"# {args.verb} {head}\n{out.text}\n{'PASS' if code == 0 else 'FAIL' if code == 1 else 'INVALID'}\n"
    _emit(args, text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
