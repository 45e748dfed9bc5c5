import json

import pytest

from stonebench import cli
from stonebench.io import InputError, dumps, from_document, loads, parse_input, to_document, to_dot
from stonebench.lattices import FiniteAlgebra
from stonebench.order import FinitePoset
from stonebench.topology import SpaceWithBase

from _util import chain, down

CHAIN3 = {"kind": "cposet", "carrier": [0, 1, 2], "leq": [[0, 1], [1, 2], [0, 2]]}
M3 = {"kind": "lattice", "elements": [0, 1, 2, 3, 4],
      "meet": [[0, 0, 0, 0, 0], [0, 1, 0, 0, 1], [0, 0, 2, 0, 2], [0, 0, 0, 3, 3], [0, 1, 2, 3, 4]],
      "join": [[0, 1, 2, 3, 4], [1, 1, 4, 4, 4], [2, 4, 2, 4, 4], [3, 4, 4, 3, 4], [4, 4, 4, 4, 4]]}


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)

    return _write


# -- parsing ----------------------------------------------------------------


def test_syntax_errors_carry_line_and_column():
    with pytest.raises(InputError) as e:
        loads('{\n  "kind": "poset"\n  "carrier": []\n}')
    assert (e.value.line, e.value.column) == (3, 3)


def test_kind_is_mandatory_and_checked():
    with pytest.raises(InputError, match="kind"):
        from_document({"carrier": []})
    with pytest.raises(InputError, match="unknown kind"):
        from_document({"kind": "graph"})


def test_operator_pair_outside_carrier_names_the_code():
    doc = dict(CHAIN3, operator=[528])
    with pytest.raises(InputError, match="528"):
        from_document(doc)


def test_beta_index_out_of_range():
    with pytest.raises(InputError, match="beta index 2 is out of range"):
        from_document({"kind": "space", "points": ["p"], "base": [["p"]], "beta": [0, 2]})


def test_dangling_points_and_labels():
    with pytest.raises(InputError, match="unknown point"):
        from_document({"kind": "space", "points": ["p"], "base": [["q"]]})
    with pytest.raises(InputError, match="leaves the carrier"):
        from_document({"kind": "poset", "carrier": [0], "leq": [[0, 1]]})
    with pytest.raises(InputError, match="both"):
        from_document({"kind": "map", "pairs": [[0, 1], [0, 2]]})


def test_operator_defaults_to_downsets():
    assert from_document(CHAIN3) == down(chain(3))


def test_operator_object_form():
    doc = dict(CHAIN3, operator=[{"x": 0, "set": [0]}, {"x": 1, "set": [1]}, {"x": 2, "set": [2]},
                                 {"x": 0, "set": [1]}, {"x": 1, "set": [2]}, {"x": 0, "set": [2]}])
    P = from_document(doc)
    assert all(P.phi(m) == down(chain(3)).phi(m) for m in range(8))


@pytest.mark.parametrize("obj", [
    down(chain(3)),
    chain(2),
    SpaceWithBase(("p", "q"), (frozenset(), frozenset({"q"}), frozenset({"p", "q"}))),
    SpaceWithBase(("p",), (frozenset({"p"}),), beta=(0, 0)),
    FiniteAlgebra.from_poset("join", chain(3)),
    {0: 1, 1: 1},
])
def test_documents_round_trip(obj):
    back = loads(dumps(to_document(obj)))
    if isinstance(obj, FiniteAlgebra):
        assert back.tables() == obj.tables() and back.elements == obj.elements
    else:
        assert back == obj


def test_parse_input_reports_missing_files(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        parse_input(tmp_path / "nope.json")


def test_dot_export_has_both_diagrams():
    S = SpaceWithBase(("p", "q"), (frozenset(), frozenset({"q"}), frozenset({"p", "q"})))
    dot = to_dot(S)
    assert "cluster_points" in dot and "cluster_base" in dot
    assert '"p:p" -> "p:q"' in dot
    assert to_dot(FinitePoset.from_pairs([0, 1], [(0, 1)])).count("->") == 1


# -- command line -----------------------------------------------------------


def run(capsys, *argv):
    code = cli.run(list(argv))
    return code, capsys.readouterr().out


def test_spectrum_of_three_chain(capsys, write):
    code, out = run(capsys, "spectrum", write("chain3.json", CHAIN3))
    assert code == 0
    assert "spectrum: 2 points, 3 base sets" in out
    assert out.startswith("# spectrum mode=standard input=chain3.json\n") and out.endswith("PASS\n")


def test_roundtrip_pt_prints_xi(capsys, write):
    code, out = run(capsys, "roundtrip", "--side=PT", write("chain3.json", CHAIN3))
    assert code == 0 and "xi: V_0 -> 0, V_1 -> 1, V_2 -> 2" in out


def test_roundtrip_tp(capsys, write):
    doc = {"kind": "space", "points": ["p", "q"], "base": [["p"], ["q"]]}
    code, out = run(capsys, "roundtrip", "--side", "TP", "--format", "json", write("d.json", doc))
    # p lies outside base set 1 only, and the prime {1} is the second point in bitmask order
    assert code == 0 and json.loads(out)["report"]["unit"] == [["p", 1], ["q", 0]]


def test_validate_empty(capsys, write):
    code, out = run(capsys, "validate", write("empty.json", {"kind": "cposet", "carrier": [], "operator": []}))
    assert code == 0 and out.endswith("PASS\n")


def test_invalid_input_exits_two(capsys, write):
    code, out = run(capsys, "validate", write("bad.json", '{\n"kind": "cposet"\n"carrier": []}'))
    assert code == 2 and "bad.json:3:1:" in out and out.endswith("INVALID\n")


def test_non_distributive_spectrum_is_refused(capsys, write):
    code, out = run(capsys, "spectrum", write("m3.json", M3))
    assert code == 1 and "refused" in out


def test_failed_check_exits_one(capsys, write):
    code, _ = run(capsys, "validate", write("s.json", {"kind": "space", "points": ["p"], "base": [["p"]]}))
    assert code == 1


def test_json_format_and_mode_header(capsys, write):
    doc = {"kind": "space", "points": [0, 1, 2], "base": [[0], [1], [2]]}
    code, out = run(capsys, "classify", "--format=json", "--mode=strict-literal", write("d3.json", doc))
    data = json.loads(out)
    assert data["header"] == {"verb": "classify", "mode": "strict-literal", "input": "d3.json"}
    # valid in this mode, but three disjoint singletons are not almost sober under the literal reading
    assert data["status"] == "pass" and code == 0
    assert data["report"]["flags"]["almost_sober"] is False


def test_out_flag_writes_the_report(capsys, write, tmp_path):
    target = tmp_path / "r.txt"
    code, out = run(capsys, "primes", "--out", str(target), write("chain3.json", CHAIN3))
    assert code == 0 and out == ""
    assert "[0, 1]: prime=True" in target.read_text()


def test_reports_are_byte_identical(capsys, write):
    path = write("chain3.json", CHAIN3)
    first = run(capsys, "dual", "--format=json", "--maxk=5", path)
    second = run(capsys, "dual", "--format=json", "--maxk=5", path)
    assert first == second


def test_check_strict_and_spectral(capsys, write):
    c2 = write("c2.json", {"kind": "cposet", "carrier": [0, 1], "leq": [[0, 1]]})
    c3 = write("c3.json", CHAIN3)
    code, out = run(capsys, "check-strict", c2, c3, write("f.json", {"kind": "map", "pairs": [[0, 0], [1, 2]]}))
    assert code == 0 and "T(f) is effective spectral with h = f" in out
    code, _ = run(capsys, "check-strict", c2, c3, write("g.json", {"kind": "map", "pairs": [[0, 0], [1, 1]]}))
    assert code == 1
    d = write("d.json", {"kind": "space", "points": ["p", "q"], "base": [["p"], ["q"]]})
    swap = write("s.json", {"kind": "map", "pairs": [["p", "q"], ["q", "p"]]})
    assert run(capsys, "check-spectral", d, d, swap)[0] == 0
    partial = write("t.json", {"kind": "map", "pairs": [["p", "q"]]})
    assert run(capsys, "check-spectral", d, d, partial)[0] == 2


def test_witness_on_space_and_lattice(capsys, write):
    doc = {"kind": "space", "points": [0, 1], "base": [[], [0], [1], [0, 1]]}
    assert run(capsys, "witness", write("l.json", doc))[0] == 0
    code, out = run(capsys, "witness", write("a.json", {"kind": "space", "points": [0, 1], "base": [[0], [1]]}))
    assert code == 1 and "base sets 0 and 1 have no base meet" in out
    assert run(capsys, "witness", write("m3.json", M3))[0] == 1


def test_export_document_and_dot(capsys, write):
    code, out = run(capsys, "export", write("chain3.json", CHAIN3))
    assert code == 0 and json.loads(out)["operator"]
    code, out = run(capsys, "export", "--to=dot", write("chain3.json", CHAIN3))
    assert out.startswith("digraph cposet {")


def test_export_corpus(capsys):
    code, out = run(capsys, "export", "--corpus", "spaces", "--size", "2", "--base", "3")
    data = json.loads(out)
    assert code == 0 and data["count"] == 3 and len(data["instances"]) == 3


def test_export_corpus_size_limit(capsys):
    code, out = run(capsys, "export", "--corpus", "posets", "--size", "9")
    assert code == 2 and "WORKBENCH_SIZE_LIMIT" in out


def test_suite_subset(capsys):
    code, out = run(capsys, "suite", "--criteria=8,11")
    assert code == 0
    assert [line.split()[2] for line in out.splitlines()[1:3]] == ["PASS:", "PASS:"]


def test_suite_rejects_unknown_criteria(capsys):
    assert run(capsys, "suite", "--criteria=99")[0] == 2
