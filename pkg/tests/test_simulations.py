import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iogadgets.gadgets import UNBOUNDED_BASIS, Gadget, GadgetError, builtin, same_gadget
from iogadgets.generators import random_io_gadget
from iogadgets.harness import Builder, check_simulation, check_simulation_one_player
from iogadgets.simulations import (CONSTRUCTIONS, WSUSD, construct, duplicate, k_switch_harness,
                                   simulate_arbitrary, simulate_arbitrary_one_player,
                                   split_locations, wsusd_from)

BASE_OF = {
    "duplicator-wsusd": {WSUSD},
    "duplicator-twtw": {"toggle-switch+toggle-switch"},
    "t3tw3": {"toggle-switch+toggle-switch"},
    "wsusd-from-twtw": {"toggle-switch+toggle-switch"},
    "twtw-from-twt": {"toggle-switch+toggle-line"},
    "duplicator-wt": {"switch+toggle-line"},
    "twt-from-wt": {"switch+toggle-line"},
    "duplicator-suwt": {"set-up-switch+toggle-line"},
    "wt-from-suwt": {"set-up-switch+toggle-line"},
    "suwt-from-suwsd": {"set-up-switch+set-down-line"},
    "susdw-from-sutw": {"toggle-switch+set-up-line"},
    "k-switch": {WSUSD},
    "switch-duplicated-k-switch": {WSUSD},
}


def rotor():
    states = ("0", "1", "2")
    trans = [(s, "in", str((int(s) + 1) % 3), f"out{s}") for s in states]
    return Gadget("rotor", states, ("in", "out0", "out1", "out2"), trans, "0", ("in",),
                  ("out0", "out1", "out2"))


@pytest.mark.parametrize("name", sorted(CONSTRUCTIONS))
def test_construction_passes(name):
    h = construct(name)
    assert check_simulation(h), check_simulation(h).counterexample
    assert {inst.gadget.name for inst in h.instances} == BASE_OF[name]


def test_target_shapes():
    t = construct("t3tw3").target
    assert len(t.inputs) == 6 and len(t.states) == 2
    toggles = [i for i in t.inputs if len({m.out_loc for s in t.states for m in t.moves(s, i)}) == 2]
    assert len(toggles) == 3
    assert same_gadget(construct("suwt-from-suwsd").target, builtin("set-up-switch+toggle-line"))
    assert same_gadget(construct("wt-from-suwt").target, builtin("switch+toggle-line"))


def test_k_switch_is_a_chain():
    h = construct("k-switch", k=4)
    assert h.target == builtin("k-switch(4)")
    assert all(inst.gadget.name == WSUSD for inst in h.instances)
    # the switch exits all sit on the k - 1 chained gadgets; the rest are line duplicators
    chained = {h.out_ports[f"out1_{j}"][0] for j in range(4)}
    assert len(chained) == 3


@pytest.mark.parametrize("k,copies", [(2, 1), (3, 2), (5, 1), (4, 3)])
def test_k_switch_sizes(k, copies):
    assert check_simulation(k_switch_harness(k, copies))


def test_k_switch_needs_two_states():
    with pytest.raises(GadgetError):
        k_switch_harness(1)
    with pytest.raises(GadgetError):
        construct("no-such-thing")


@pytest.mark.parametrize("target", ["toggle-switch", "set-up-switch+set-up-line", "switch",
                                    "toggle-switch+toggle-switch"])
def test_arbitrary_builtins(target):
    h = simulate_arbitrary(builtin(target))
    assert check_simulation(h)
    assert {inst.gadget.name for inst in h.instances} == {WSUSD}


def test_arbitrary_rotor():
    assert check_simulation(simulate_arbitrary(rotor()))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_arbitrary_random(seed):
    g = random_io_gadget(random.Random(seed))
    assert check_simulation(simulate_arbitrary(g))


def test_arbitrary_rejects_nondeterministic():
    with pytest.raises(GadgetError, match="nondeterministic"):
        simulate_arbitrary(builtin("branching-hallway"))


def test_one_player_branching_hallway():
    assert check_simulation_one_player(simulate_arbitrary_one_player(builtin("branching-hallway")))


def test_one_player_nondeterministic_two_state():
    g = Gadget("coin", ("h", "t"), ("i", "a", "b"),
               [("h", "i", "h", "a"), ("h", "i", "t", "b"), ("t", "i", "h", "b")],
               "h", ("i",), ("a", "b"))
    assert check_simulation_one_player(simulate_arbitrary_one_player(g))


def test_one_player_reversible_tunnel():
    tunnel = Gadget("tunnel", ("s",), ("a", "b"), [("s", "a", "s", "b"), ("s", "b", "s", "a")], "s")
    split = split_locations(tunnel)
    assert split.inputs == ("a.in", "b.in") and split.is_input_output
    assert check_simulation_one_player(simulate_arbitrary_one_player(tunnel))


@pytest.mark.parametrize("basis", UNBOUNDED_BASIS + ("toggle-switch+toggle-switch",))
def test_wsusd_from_every_basis(basis):
    h = wsusd_from(basis)
    assert {inst.gadget.name for inst in h.instances} == {basis}
    # the deepest chains need well over the default 10**4 steps per traversal
    assert check_simulation(h, step_cap=10**6)


def test_wsusd_from_bounded_basis_fails():
    with pytest.raises(GadgetError):
        wsusd_from("switch+set-up-line")


def test_duplicate_counts():
    b = Builder()
    x = b.add(builtin(WSUSD))
    lines = duplicate(b, (x["in2"], x["out2"]), 5, "wsusd")
    assert len(lines) == 5 and len(b.instances) == 5
    assert duplicate(b, (x["in2"], x["out2"]), 0, "wsusd") == []
