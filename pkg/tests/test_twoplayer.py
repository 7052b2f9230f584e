import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iogadgets.gadgets import builtin
from iogadgets.generators import SINGLE_INPUT_GADGETS, random_system
from iogadgets.harness import Builder
from iogadgets.oneplayer import StateSpaceExceeded, solve_one_player
from iogadgets.systems import GOAL, SystemError_
from iogadgets.twoplayer import BLACK, WHITE, LabeledSystem, solve_two_player, verify_strategy


def fixpoint_winner(ls):
    """Least fixpoint over the explicit configuration graph."""
    sys_ = ls.base
    start = (sys_.initial_states, sys_.start_comp)
    succ = {}
    stack = [start]
    while stack:
        c = stack.pop()
        if c in succ:
            continue
        states, comp = c
        nxt = []
        if comp != sys_.goal_comp:
            for i, loc in sys_.entries[comp]:
                for t in sys_.instances[i].gadget.moves(states[i], loc):
                    ns = states[:i] + (t.to_state,) + states[i + 1:]
                    nxt.append((i, (ns, sys_.comp_of[(i, t.out_loc)])))
        succ[c] = nxt
        stack.extend(n for _, n in nxt)
    win = {c for c in succ if c[1] == sys_.goal_comp}
    changed = True
    while changed:
        changed = False
        for c, nxt in succ.items():
            if c in win or not nxt:
                continue
            owner = ls.labels[nxt[0][0]]
            ok = any(n in win for _, n in nxt) if owner == WHITE else all(n in win for _, n in nxt)
            if ok:
                win.add(c)
                changed = True
    return WHITE if start in win else BLACK


def test_all_white_is_one_player():
    b = Builder()
    h = b.add(builtin("branching-hallway"))
    t = b.add(builtin("toggle-switch"))
    b.wire(h["top1"], t["in1"])
    b.wire(t["bottom1"], GOAL)
    b.wire(h["bottom1"], h["in1"])
    sys_ = b.system(h["in1"], None)
    assert solve_one_player(sys_) is None
    v = solve_two_player(LabeledSystem(sys_, [WHITE, WHITE]))
    assert v.winner == BLACK
    b.wire(t["top1"], h["in1"])
    sys2 = b.system(h["in1"], None)
    assert solve_one_player(sys2) is not None
    v2 = solve_two_player(LabeledSystem(sys2, [WHITE, WHITE]))
    assert v2.winner == WHITE
    assert verify_strategy(LabeledSystem(sys2, [WHITE, WHITE]), v2)


def test_dead_end_start():
    b = Builder()
    h = b.add(builtin("branching-hallway"))
    b.wire(h["top1"], GOAL)
    sys_ = b.system(h["bottom1"], None)
    assert solve_two_player(LabeledSystem(sys_, [WHITE])).winner == BLACK


def test_black_hallway():
    b = Builder()
    h = b.add(builtin("branching-hallway"))
    b.wire(h["top1"], GOAL)
    sys_ = b.system(h["in1"], None)
    assert solve_two_player(LabeledSystem(sys_, [WHITE])).winner == WHITE
    v = solve_two_player(LabeledSystem(sys_, [BLACK]))
    assert v.winner == BLACK
    assert verify_strategy(LabeledSystem(sys_, [BLACK]), v)
    js = v.to_json(True)
    assert js["winner"] == BLACK and js["strategy"][0]["transition"]["to"] == ["s", "bottom1"]


def test_labels_are_validated():
    sys_ = Builder().system(None, None)
    with pytest.raises(SystemError_):
        LabeledSystem(sys_, [WHITE])
    b = Builder()
    b.add(builtin("switch"))
    with pytest.raises(SystemError_, match="label"):
        LabeledSystem(b.system(None, None), ["Grey"])


def test_branching_systems_rejected():
    b = Builder()
    x, y = b.add(builtin("switch")), b.add(builtin("switch"))
    b.join(x["in1"], y["in1"])
    with pytest.raises(SystemError_, match="branchless"):
        LabeledSystem(b.system(x["in1"], None), [WHITE, BLACK])


def test_cap():
    b = Builder()
    ts = [b.add(builtin("toggle-switch")) for _ in range(8)]
    for x, y in zip(ts, ts[1:] + ts[:1]):
        b.wire(x["top1"], y["in1"])
        b.wire(x["bottom1"], y["in1"])
    ls = LabeledSystem(b.system(ts[0]["in1"], None), [WHITE] * 8)
    with pytest.raises(StateSpaceExceeded):
        solve_two_player(ls, max_configs=10)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6))
def test_matches_fixpoint(seed, n):
    rng = random.Random(seed)
    sys_ = random_system(rng, SINGLE_INPUT_GADGETS + ("switch+toggle-line",), n)
    ls = LabeledSystem(sys_, [rng.choice((WHITE, BLACK)) for _ in range(n)])
    v = solve_two_player(ls)
    assert v.winner == fixpoint_winner(ls)
    assert verify_strategy(ls, v)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6))
def test_all_white_matches_solver(seed, n):
    sys_ = random_system(random.Random(seed), SINGLE_INPUT_GADGETS, n)
    v = solve_two_player(LabeledSystem(sys_, [WHITE] * n))
    assert (v.winner == WHITE) == (solve_one_player(sys_) is not None)


def test_wrong_strategy_fails_verification():
    b = Builder()
    h = b.add(builtin("branching-hallway"))
    b.wire(h["top1"], GOAL)
    ls = LabeledSystem(b.system(h["in1"], None), [WHITE])
    v = solve_two_player(ls)
    (cfg,) = v.strategy
    v.strategy[cfg] = next(m for m in ls.base.moves(*cfg) if m[0] != v.strategy[cfg])[0]
    assert not verify_strategy(ls, v)
