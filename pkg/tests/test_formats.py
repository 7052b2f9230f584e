import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iogadgets.formats import (FormatError, dumps, flow_from_json, flow_to_json, format_digraph,
                               format_dimacs, format_geography, format_netlist, format_qdimacs,
                               gadget_from_json, gadget_to_json, harness_from_json,
                               harness_to_json, labeled_from_json, labeled_to_json,
                               parse_digraph, parse_dimacs, parse_geography, parse_netlist,
                               parse_qdimacs, system_from_json, system_to_json,
                               trainyard_from_json, trainyard_to_json)
from iogadgets.gadgets import BUILTIN_NAMES, builtin
from iogadgets.generators import (SINGLE_INPUT_GADGETS, random_circuit, random_cnf,
                                  random_digraph, random_io_gadget, random_qbf, random_system)
from iogadgets.harness import check_simulation
from iogadgets.oneplayer import extract_flow, solve_one_player
from iogadgets.reductions import Qbf, random_geography
from iogadgets.simulations import construct
from iogadgets.trainyard import TrainyardNetwork, TrainyardSystem, run_trainyard
from iogadgets.twoplayer import BLACK, WHITE, LabeledSystem, solve_two_player


def trip(obj):
    return json.loads(dumps(obj))


@pytest.mark.parametrize("name", sorted(set(BUILTIN_NAMES) - {"k-switch"}) + ["k-switch(3)"])
def test_builtin_gadget_round_trip(name):
    g = builtin(name)
    again = gadget_from_json(trip(gadget_to_json(g)))
    assert again == g


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_random_gadget_round_trip(seed):
    g = random_io_gadget(random.Random(seed))
    assert gadget_from_json(trip(gadget_to_json(g))) == g


def test_output_is_stable():
    g = builtin("toggle-switch")
    assert dumps(gadget_to_json(g)) == dumps(gadget_to_json(gadget_from_json(gadget_to_json(g))))
    assert list(gadget_to_json(g))[:3] == ["name", "states", "locations"]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6))
def test_system_round_trip(seed, n):
    sys_ = random_system(random.Random(seed), SINGLE_INPUT_GADGETS + ("switch+toggle-line",), n)
    again = system_from_json(trip(system_to_json(sys_)))
    assert system_to_json(again) == system_to_json(sys_)
    assert solve_one_player(again) == solve_one_player(sys_)


def test_labeled_round_trip():
    rng = random.Random(3)
    sys_ = random_system(rng, SINGLE_INPUT_GADGETS, 4)
    ls = LabeledSystem(sys_, [WHITE, BLACK, WHITE, BLACK])
    again = labeled_from_json(trip(labeled_to_json(ls)))
    assert again.labels == ls.labels
    assert solve_two_player(again).winner == solve_two_player(ls).winner


def test_flow_round_trip():
    rng = random.Random(5)
    while True:
        sys_ = random_system(rng, SINGLE_INPUT_GADGETS, 5)
        path = solve_one_player(sys_)
        if path:
            break
    flow = extract_flow(sys_, path)
    assert flow_from_json(trip(flow_to_json(flow))) == flow


@pytest.mark.parametrize("name", ["duplicator-wsusd", "twt-from-wt", "k-switch"])
def test_harness_round_trip(name):
    h = construct(name)
    js = trip(harness_to_json(h))
    again = harness_from_json(js)
    rep = check_simulation(again, collect=True)
    assert rep and rep.vectors == check_simulation(h, collect=True).vectors
    assert harness_to_json(again) == js


def test_failing_harness_is_not_exported():
    import dataclasses

    h = construct("duplicator-wsusd")
    bad = dataclasses.replace(h, decode=lambda v: None)
    with pytest.raises(FormatError, match="does not pass"):
        harness_to_json(bad)


def test_trainyard_round_trip():
    net = TrainyardNetwork()
    a, b = net.add(), net.add("down")
    net.pair((a, "C"), (b, "C"))
    net.no_entry.add((b, "B"))
    sys_ = TrainyardSystem(net, (a, "A"), (b, "A"))
    js = trip(trainyard_to_json(sys_))
    assert js["states"] == ["up", "down"] and js["noEntry"] == [[1, "B"]]
    again = trainyard_from_json(js)
    assert trainyard_to_json(again) == js
    assert run_trainyard(again) == run_trainyard(sys_)


@pytest.mark.parametrize("obj,msg", [
    ({"gadgets": 1, "pairs": [[[0, "A"], [3, "B"]]], "start": [0, "A"]}, "bad location"),
    ({"gadgets": 1, "pairs": [[[0, "A"], [0, "A"]]], "start": [0, "B"]}, "itself"),
    ({"gadgets": 1, "pairs": [], "start": [0, "Q"]}, "bad location"),
    ({"gadgets": 1, "states": ["up", "up"], "start": [0, "A"]}, "2 states"),
    ({"pairs": []}, "missing field 'gadgets'"),
])
def test_trainyard_errors(obj, msg):
    with pytest.raises(FormatError, match=msg):
        trainyard_from_json(obj)


# -- text formats


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6), st.integers(0, 8))
def test_dimacs_round_trip(seed, n, m):
    clauses = random_cnf(random.Random(seed), n, m)
    assert parse_dimacs(format_dimacs(n, clauses)) == (n, clauses)


def test_dimacs_multiline_clause_and_comments():
    text = "c hello\np cnf 3 2\n1 -2\n3 0\n-1 0\n"
    assert parse_dimacs(text) == (3, [(1, -2, 3), (-1,)])


@pytest.mark.parametrize("text,line", [
    ("p cnf 2 1\n1 x 0\n", 2),
    ("1 2 0\n", 1),
    ("c\np cnf 2 1\n3 0\n", 3),
    ("p dnf 2 1\n", 1),
])
def test_dimacs_errors_name_the_line(text, line):
    with pytest.raises(FormatError, match=f"line {line}"):
        parse_dimacs(text)


def test_dimacs_missing_header():
    with pytest.raises(FormatError, match="header"):
        parse_dimacs("c nothing\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_qdimacs_round_trip(seed):
    q = random_qbf(random.Random(seed))
    again = parse_qdimacs(format_qdimacs(q))
    assert again.prefix == q.prefix and again.clauses == q.clauses


def test_qdimacs_free_variables_are_outer_existentials():
    q = parse_qdimacs("p cnf 2 1\na 1 0\n1 2 0\n")
    assert q.prefix == [("E", 2), ("A", 1)]
    assert q.evaluate()


def test_qdimacs_unterminated_quantifier():
    with pytest.raises(FormatError, match="line 2"):
        parse_qdimacs("p cnf 1 1\ne 1\n1 0\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8))
def test_digraph_round_trip(seed, n):
    g = random_digraph(random.Random(seed), n)
    assert parse_digraph(format_digraph(g)) == g


def test_digraph_errors():
    with pytest.raises(FormatError, match="start"):
        parse_digraph("0 1\n")
    with pytest.raises(FormatError, match="line 3"):
        parse_digraph("start 0\ntarget 1\n0 1 2\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8))
def test_geography_round_trip(seed, n):
    ge = random_geography(random.Random(seed), n)
    again = parse_geography(format_geography(ge))
    assert (again.n, again.owners, list(again.edges), again.start) == \
        (ge.n, ge.owners, list(ge.edges), ge.start)


def test_geography_missing_owner():
    with pytest.raises(FormatError, match="vertex 1"):
        parse_geography("vertices 2\n0 White\n0 1\n")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_netlist_round_trip(seed):
    c = random_circuit(random.Random(seed))
    again = parse_netlist(format_netlist(c))
    assert again == c and again.evaluate() == c.evaluate()


def test_netlist_syntax():
    c = parse_netlist("# x\ninput a = true\ninput b = 0\ngate g = nor( a , b )\n")
    assert c.output == "g" and c.evaluate() is False
    with pytest.raises(FormatError, match="line 2"):
        parse_netlist("input a = 1\ngate g = AND(a, a)\n")


def test_invalid_json_reports_position():
    from iogadgets.formats import _load_json

    with pytest.raises(FormatError, match="line 2"):
        _load_json('{"a": 1,\n oops}', "x.json")


def test_system_errors():
    with pytest.raises(FormatError, match="neither a builtin"):
        system_from_json({"gadgets": ["no-such-gadget"], "instances": []})
    with pytest.raises(FormatError, match="not a state"):
        system_from_json({"gadgets": ["switch"], "instances": [{"gadget": 0, "state": "zz"}]})
    with pytest.raises(FormatError, match="bad node"):
        system_from_json({"gadgets": ["switch"], "instances": [{"gadget": 0}],
                          "wires": [[[4, "in1"], "goal"]]})
