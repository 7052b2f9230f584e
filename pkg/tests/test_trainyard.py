import itertools
import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iogadgets.formats import trainyard_from_json, trainyard_to_json
from iogadgets.gadgets import trainyard_gadget
from iogadgets.generators import random_qbf
from iogadgets.reductions import Qbf, ReductionError
from iogadgets.trainyard import (DOWN, UP, ContractViolation, IdealReverseBranch, TrainyardError,
                                 TrainyardNetwork, TrainyardSystem, compile_qbf_to_trainyard,
                                 counter_value, horizon_for, lockstep_reverse_branch,
                                 lockstep_toggle, reverse_branch_network, run_trainyard,
                                 toggle_switch_toggle_line_network, traverse_gadget)

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("state,loc,want", [
    (UP, "A", (DOWN, "C")), (DOWN, "B", (UP, "C")),
    (UP, "C", (DOWN, "A")), (DOWN, "C", (UP, "B")),
])
def test_traverse_gadget(state, loc, want):
    assert traverse_gadget(state, loc) == want


def test_gadget_table_matches_traversal():
    g = trainyard_gadget()
    for s in (UP, DOWN):
        for loc in "ABC":
            (t,) = g.moves(s, loc)
            assert (t.to_state, t.out_loc) == traverse_gadget(s, loc)


def test_single_gadget_dead_end():
    net = TrainyardNetwork()
    net.add()
    out = run_trainyard(TrainyardSystem(net, (0, "A")))
    assert out.kind == "stuck" and out.steps == 1


def test_golden_two_gadget_trace():
    golden = json.loads((DATA / "trainyard_two_gadget.json").read_text())
    sys_ = trainyard_from_json(golden["system"])
    out = run_trainyard(sys_)
    assert (out.kind, out.steps) == (golden["outcome"], golden["steps"])
    net = sys_.network.copy()
    net.ports = {"start": sys_.start}
    trace = []
    net.traverse("start", on_step=lambda a, b: trace.append([list(a), list(b)]))
    assert trace == golden["trace"]
    assert net.states == golden["final_states"]


def test_two_gadget_loop_cycles():
    net = TrainyardNetwork()
    a, b = net.add(), net.add()
    net.pair((a, "C"), (b, "C"))
    net.pair((a, "A"), (b, "A"))
    net.pair((a, "B"), (b, "B"))
    out = run_trainyard(TrainyardSystem(net, (a, "A")))
    assert out.kind == "cycle"


def test_matching_is_enforced():
    net = TrainyardNetwork()
    net.add()
    net.add()
    net.pair((0, "A"), (1, "A"))
    with pytest.raises(TrainyardError, match="already paired"):
        net.pair((0, "A"), (1, "B"))
    with pytest.raises(TrainyardError):
        net.pair((0, "B"), (0, "B"))
    with pytest.raises(TrainyardError):
        net.pair((0, "B"), (5, "A"))
    with pytest.raises(TrainyardError):
        net.pair((0, "D"), (1, "B"))
    with pytest.raises(TrainyardError, match="unpaired"):
        TrainyardSystem(net, (0, "B"), (1, "A"))


def test_contract_violation_on_fan_in_output():
    net = TrainyardNetwork()
    x = net.add()
    y = net.add()
    merged = net.fan_in([(x, "C"), (y, "C")])
    net.ports = {"in": merged}
    with pytest.raises(ContractViolation):
        net.traverse("in")
    with pytest.raises(ContractViolation):
        run_trainyard(TrainyardSystem(net, merged))


# -- reverse branch


def test_reverse_branch_size():
    for k in range(1, 6):
        net = reverse_branch_network(k)
        assert len(net) == 2 * k + 1
        assert counter_value(net.states, k) == 1 << k
    with pytest.raises(TrainyardError):
        reverse_branch_network(0)


def test_reverse_branch_counts_up():
    net = reverse_branch_network(2)
    seen = []
    for _ in range(3):
        assert net.traverse("left") == "bottomRight"
        seen.append(counter_value(net.states, 2))
    assert seen == [5, 6, 7]


def test_reverse_branch_negates():
    net = reverse_branch_network(2)
    net.traverse("left")
    assert counter_value(net.states, 2) == 5
    assert net.traverse("topRight") == "left"
    assert counter_value(net.states, 2) == 2


def test_reverse_branch_wraps_to_top_right():
    k = 2
    net = reverse_branch_network(k)
    exits = [net.traverse("left") for _ in range(1 << k)]
    assert exits == ["bottomRight"] * 3 + ["topRight"]
    assert counter_value(net.states, k) == 0


def test_ideal_reverse_branch_rejects_exit_port():
    with pytest.raises(TrainyardError):
        IdealReverseBranch(2).traverse("bottomRight")


@pytest.mark.parametrize("k", range(1, 9))
def test_reverse_branch_holds_for_horizon(k):
    rng = random.Random(k)
    ideal = IdealReverseBranch(k)
    ports = []
    for _ in range(1 << k):
        # keep to sequences the ideal gadget can follow: topRight only right after it was exited
        p = rng.choice(["left", "topRight"]) if ports and ports[-1] == "left" else "left"
        ports.append(p)
        ideal.traverse(p)
    rep = lockstep_reverse_branch(k, ports)
    assert rep and rep.traversals == 1 << k, rep.detail


# -- toggle switch/toggle line


def test_toggle_line_first_step():
    net = toggle_switch_toggle_line_network(4)
    assert net.traverse("in2") == "out2"
    assert net.states[0] == DOWN


def test_toggle_switch_alternates():
    net = toggle_switch_toggle_line_network(3)
    assert [net.traverse("in1") for _ in range(4)] == ["top1", "bottom1"] * 2


@pytest.mark.parametrize("k", range(3, 9))
def test_lockstep_random(k):
    rng = random.Random(100 + k)
    rep = lockstep_toggle(k, [rng.choice(["in1", "in2"]) for _ in range(1 << k)])
    assert rep and rep.traversals == 1 << k, rep.detail


def test_toggle_network_size():
    for k in range(1, 6):
        assert len(toggle_switch_toggle_line_network(k)) == 1 + 2 * (2 * (k + 1) + 1)


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("port", ["in1", "in2"])
def test_lockstep_constant(k, port):
    # repeating one entrance walks a counter straight toward 0, the worst case
    assert lockstep_toggle(k, [port] * (1 << k))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["in1", "in2"]), min_size=1, max_size=32))
def test_lockstep_any_sequence(ports):
    assert lockstep_toggle(5, ports)


# -- QBF


def test_horizon():
    assert horizon_for(1) == 5 and horizon_for(3) == 9
    # the counter must outlast 5 n 2^n traversals
    for n in range(1, 4):
        assert 2 ** horizon_for(n) > 5 * n * 2**n


@pytest.mark.parametrize("q,want", [
    (Qbf([("E", 1)], [(1,)]), True),
    (Qbf([("A", 1)], [(1,)]), False),
    (Qbf([("E", 1)], [(-1,)]), True),
])
def test_qbf_examples(q, want):
    out = run_trainyard(compile_qbf_to_trainyard(q))
    assert out.reached_goal == want


def test_qbf_two_variables_exhaustive():
    lits = [1, -1, 2, -2]
    clauses = list(itertools.combinations(lits, 2))
    for prefix in itertools.product("AE", repeat=2):
        for mat in itertools.combinations(clauses, 2):
            q = Qbf(list(zip(prefix, (1, 2))), list(mat))
            assert run_trainyard(compile_qbf_to_trainyard(q)).reached_goal == q.evaluate(), q


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32))
def test_qbf_random(seed):
    q = random_qbf(random.Random(seed), max_vars=3, max_clauses=3)
    if not q.prefix:
        return
    assert run_trainyard(compile_qbf_to_trainyard(q)).reached_goal == q.evaluate()


def test_qbf_cap():
    with pytest.raises(ReductionError):
        compile_qbf_to_trainyard(Qbf([("E", v) for v in range(1, 5)], []))


def test_json_round_trip():
    sys_ = compile_qbf_to_trainyard(Qbf([("E", 1)], [(1,)]))
    js = trainyard_to_json(sys_)
    again = trainyard_from_json(json.loads(json.dumps(js)))
    assert trainyard_to_json(again) == js
    assert run_trainyard(again) == run_trainyard(sys_)
