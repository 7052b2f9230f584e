"""Gadget simulations: edge duplicators and a library of constructions.

A *line* is a pair ``(entry, exit)`` of nodes: putting the robot on ``entry``
makes it come out at ``exit`` after crossing some tunnel.  Duplicators turn one
line into several lines that all cross the same tunnel.
"""
from __future__ import annotations

from typing import Callable, Sequence

from .gadgets import (Gadget, GadgetError, Subunit, Transition, builtin, compose,
                      k_switch, reflect)
from .harness import Builder, Harness, Part, substitute_harness
from .systems import Node

Line = tuple[Node, Node]

SW, SU, SD, TL = Subunit.SWITCH, Subunit.SET_UP_LINE, Subunit.SET_DOWN_LINE, Subunit.TOGGLE_LINE
TS, SUS, SDS = Subunit.TOGGLE_SWITCH, Subunit.SET_UP_SWITCH, Subunit.SET_DOWN_SWITCH

WSUSD = "switch+set-up-line+set-down-line"
TWTW = "toggle-switch+toggle-switch"
TWT = "toggle-switch+toggle-line"
WT = "switch+toggle-line"
SUWT = "set-up-switch+toggle-line"
SUWSD = "set-up-switch+set-down-line"
TWSU = "toggle-switch+set-up-line"


def chain(b: Builder, lines: Sequence[Line]) -> Line:
    for a, c in zip(lines, lines[1:]):
        b.wire(a[1], c[0])
    return lines[0][0], lines[-1][1]


def merged(b: Builder, part: Part, inp: str, top: str, bottom: str) -> Line:
    """Use a switch-type input as a line by joining its two exits."""
    b.wire(part[top], part[bottom])
    return part[inp], part[top]


# -- edge duplicators ----------------------------------------------------------------
# Each takes a line and returns two lines crossing its tunnel, adding helper gadgets.


def _dup_wsusd(b: Builder, line: Line) -> tuple[Line, Line]:
    # the helper's switch remembers which side the robot came from
    d = b.add(builtin(WSUSD), "up")
    b.join(line[0], d["out2"], d["out3"])
    b.wire(line[1], d["in1"])
    return (d["in2"], d["top1"]), (d["in3"], d["bottom1"])


def _dup_wsusd_restoring(b: Builder, line: Line) -> tuple[Line, Line]:
    # same idea, but the helper is always back up when the robot leaves
    d = b.add(builtin(WSUSD), "up")
    b.wire(d["out3"], line[0])
    b.wire(line[1], d["in1"])
    b.wire(d["bottom1"], d["in2"])
    return (line[0], d["top1"]), (d["in3"], d["out2"])


def _dup_twtw(b: Builder, line: Line) -> tuple[Line, Line]:
    d = b.add(builtin(TWTW), "up")
    b.wire(line[1], d["in1"])
    b.wire(d["top1"], d["in2"])
    b.wire(d["top2"], line[0])
    return (line[0], d["bottom2"]), (d["in2"], d["bottom1"])


def _dup_wt(b: Builder, line: Line) -> tuple[Line, Line]:
    d1 = b.add(builtin(WT), "up")
    d2 = b.add(builtin(WT), "up")
    b.wire(line[1], d1["in1"])
    b.wire(d1["bottom1"], d1["in2"])
    b.wire(d1["out2"], d2["in2"])
    b.wire(d2["out2"], d2["in1"])
    b.wire(d2["bottom1"], line[0])
    return (line[0], d1["top1"]), (d1["in2"], d2["top1"])


def _dup_suwt(b: Builder, line: Line) -> tuple[Line, Line]:
    d = b.add(builtin(SUWT), "up")
    b.wire(line[1], d["in1"])
    b.wire(d["out2"], line[0])
    return (line[0], d["top1"]), (d["in2"], d["bottom1"])


DUPLICATORS: dict[str, Callable[[Builder, Line], tuple[Line, Line]]] = {
    "wsusd": _dup_wsusd,
    "wsusd-restoring": _dup_wsusd_restoring,
    "twtw": _dup_twtw,
    "wt": _dup_wt,
    "suwt": _dup_suwt,
}


def duplicate(b: Builder, line: Line, copies: int, helper: str) -> list[Line]:
    """``copies`` lines over one tunnel, using a balanced tree of duplicators."""
    if copies < 1:
        return []
    if copies == 1:
        return [line]
    left, right = DUPLICATORS[helper](b, line)
    half = (copies + 1) // 2
    return duplicate(b, left, half, helper) + duplicate(b, right, copies - half, helper)


# -- harness assembly helpers ------------------------------------------------------------


def _emit(b: Builder, name: str, subunits, decode, init, target_name: str | None = None) -> Harness:
    """Harness whose target is ``compose`` of the given subunits.

    ``subunits`` lists ``(kind, (entry, exit))`` for lines and
    ``(kind, (entry, top, bottom))`` for switches.
    """
    target = compose(target_name or name, [k for k, _ in subunits])
    ins, outs = {}, {}
    for i, (kind, nodes) in enumerate(subunits, 1):
        ins[f"in{i}"] = nodes[0]
        if kind.is_switch:
            outs[f"top{i}"], outs[f"bottom{i}"] = nodes[1], nodes[2]
        else:
            outs[f"out{i}"] = nodes[1]
    return b.harness(name, target, ins, outs, decode, init)


def _state_of(part: Part):
    return lambda ps: ps[part.index]


def _agreeing(*parts: Part):
    idx = [p.index for p in parts]

    def decode(ps):
        s = ps[idx[0]]
        return s if all(ps[i] == s for i in idx) else None
    return decode


def _same_init(*parts: Part):
    return {s: {p: s for p in parts} for s in ("up", "down")}


def relabel(h: Harness, name: str, target_name: str, locations: dict[str, str] | None = None,
            swap_states: bool = False) -> Harness:
    """Rename target locations and optionally exchange the two target states."""
    lm = locations or {}
    target = reflect(h.target) if swap_states else h.target
    target = target.renamed(name=target_name, locations=lm)
    if swap_states:
        a, c = h.target.states
        sw = {a: c, c: a}
        decode = lambda v: sw.get(h.decode(v))  # noqa: E731
        init = {sw[s]: vec for s, vec in h.init.items()}
    else:
        decode, init = h.decode, dict(h.init)
    return Harness(name, target, h.network,
                   {lm.get(k, k): v for k, v in h.in_ports.items()},
                   {lm.get(k, k): v for k, v in h.out_ports.items()}, decode, init)


def identity_harness(g: Gadget) -> Harness:
    b = Builder()
    x = b.add(g)
    return b.harness(g.name, g, {l: x[l] for l in g.inputs}, {l: x[l] for l in g.outputs},
                     lambda ps: ps[0], {s: (s,) for s in g.states})


# -- constructions -----------------------------------------------------------------------


def duplicator_wsusd() -> Harness:
    """Switch/set-up/set-down whose set-up line is duplicated."""
    b = Builder()
    x = b.add(builtin(WSUSD))
    a, c = _dup_wsusd(b, (x["in2"], x["out2"]))
    subs = [(SW, (x["in1"], x["top1"], x["bottom1"])), (SU, a), (SU, c), (SD, (x["in3"], x["out3"]))]
    return _emit(b, "duplicator-wsusd", subs, _state_of(x), {s: {x: s} for s in ("up", "down")},
                 "switch+set-up-line+set-up-line+set-down-line")


def duplicator_twtw() -> Harness:
    """Toggle switch/toggle switch with one switch merged into a line, then duplicated."""
    b = Builder()
    x = b.add(builtin(TWTW))
    a, c = _dup_twtw(b, merged(b, x, "in2", "top2", "bottom2"))
    subs = [(TS, (x["in1"], x["top1"], x["bottom1"])), (TL, a), (TL, c)]
    return _emit(b, "duplicator-twtw", subs, _state_of(x), {s: {x: s} for s in ("up", "down")},
                 "toggle-switch+toggle-line+toggle-line")


def duplicator_wt() -> Harness:
    b = Builder()
    x = b.add(builtin(WT))
    a, c = _dup_wt(b, (x["in2"], x["out2"]))
    subs = [(SW, (x["in1"], x["top1"], x["bottom1"])), (TL, a), (TL, c)]
    return _emit(b, "duplicator-wt", subs, _state_of(x), {s: {x: s} for s in ("up", "down")},
                 "switch+toggle-line+toggle-line")


def duplicator_suwt() -> Harness:
    b = Builder()
    x = b.add(builtin(SUWT))
    a, c = _dup_suwt(b, (x["in2"], x["out2"]))
    subs = [(SUS, (x["in1"], x["top1"], x["bottom1"])), (TL, a), (TL, c)]
    return _emit(b, "duplicator-suwt", subs, _state_of(x), {s: {x: s} for s in ("up", "down")},
                 "set-up-switch+toggle-line+toggle-line")


def t3tw3() -> Harness:
    """Three toggle lines and three toggle switches on one shared state.

    Three toggle switch/toggle switch gadgets are kept in lockstep: every
    simulated traversal toggles each of them exactly once.
    """
    b = Builder()
    xs, pools = [], []
    for _ in range(3):
        x = b.add(builtin(TWTW))
        xs.append(x)
        pools.append(duplicate(b, merged(b, x, "in2", "top2", "bottom2"), 7, "twtw"))
    subs = []
    for _ in range(3):
        subs.append((TL, chain(b, [pool.pop(0) for pool in pools])))
    for j, x in enumerate(xs):
        exits = []
        for side in ("top1", "bottom1"):
            others = [pools[i].pop(0) for i in range(3) if i != j]
            b.wire(x[side], others[0][0])
            exits.append(chain(b, others)[1])
        subs.append((TS, (x["in1"], exits[0], exits[1])))
    return _emit(b, "t3tw3", subs, _agreeing(*xs), _same_init(*xs),
                 "toggle-line^3+toggle-switch^3")


def wsusd_from_twtw() -> Harness:
    """Each part of the switch/set-up/set-down uses one toggle line and one toggle switch."""
    b = Builder()
    p = b.place(t3tw3(), "up")
    b.wire(p["out1"], p["in4"])
    switch = (p["in1"], p["bottom4"], p["top4"])
    b.wire(p["top5"], p["in2"])
    b.wire(p["bottom5"], p["out2"])
    set_up = (p["in5"], p["out2"])
    b.wire(p["bottom6"], p["in3"])
    b.wire(p["top6"], p["out3"])
    set_down = (p["in6"], p["out3"])
    return _emit(b, "wsusd-from-twtw", [(SW, switch), (SU, set_up), (SD, set_down)],
                 _state_of(p), {s: {p: s} for s in ("up", "down")}, WSUSD)


def twtw_from_twt() -> Harness:
    """Two toggle switch/toggle lines in lockstep; each simulated switch toggles one
    gadget's line and then reads the other gadget's switch."""
    b = Builder()
    p = b.add(builtin(TWT))
    q = b.add(builtin(TWT))
    b.wire(p["out2"], q["in1"])
    b.wire(q["out2"], p["in1"])
    subs = [(TS, (p["in2"], q["top1"], q["bottom1"])), (TS, (q["in2"], p["top1"], p["bottom1"]))]
    return _emit(b, "twtw-from-twt", subs, _agreeing(p, q), _same_init(p, q), TWTW)


def twt_from_wt() -> Harness:
    """Toggle first, then read: the switch's exits come out swapped."""
    b = Builder()
    x = b.add(builtin(WT))
    t1, t2 = _dup_wt(b, (x["in2"], x["out2"]))
    b.wire(t1[1], x["in1"])
    subs = [(TS, (t1[0], x["bottom1"], x["top1"])), (TL, t2)]
    return _emit(b, "twt-from-wt", subs, _state_of(x), {s: {x: s} for s in ("up", "down")}, TWT)


def wt_from_suwt() -> Harness:
    """The set-up switch's bottom exit crosses a toggle line to put the state back down."""
    b = Builder()
    x = b.add(builtin(SUWT))
    t1, t2 = _dup_suwt(b, (x["in2"], x["out2"]))
    b.wire(x["bottom1"], t1[0])
    subs = [(SW, (x["in1"], x["top1"], t1[1])), (TL, t2)]
    return _emit(b, "wt-from-suwt", subs, _state_of(x), {s: {x: s} for s in ("up", "down")}, WT)


def sdwt_from_suwsd() -> Harness:
    """Set-down switch/toggle line from three set-up switch/set-down lines.

    ``l`` and ``m`` hold opposite states and ``l`` carries the simulated state;
    ``r`` rests up and is knocked down to mark a toggle in progress.
    """
    b = Builder()
    g = builtin(SUWSD)
    l, m, r = b.add(g, "up"), b.add(g, "down"), b.add(g, "up")
    b.wire(l["top1"], r["in2"])
    b.wire(r["out2"], m["in1"])
    b.wire(m["bottom1"], l["in2"])
    b.wire(l["out2"], r["in1"])
    b.wire(r["bottom1"], m["out2"])
    b.wire(l["bottom1"], m["in2"])
    subs = [(SDS, (m["in1"], r["top1"], m["top1"])), (TL, (l["in1"], m["out2"]))]

    def decode(ps):
        return ps[0] if ps[0] != ps[1] and ps[2] == "up" else None
    init = {"up": ("up", "down", "up"), "down": ("down", "up", "up")}
    return _emit(b, "sdwt-from-suwsd", subs, decode, init, "set-down-switch+toggle-line")


def suwt_from_suwsd() -> Harness:
    """The set-down switch/toggle line above, reflected into a set-up switch/toggle line."""
    h = sdwt_from_suwsd()
    return relabel(h, "suwt-from-suwsd", SUWT, {"top1": "bottom1", "bottom1": "top1"}, swap_states=True)


def susdw_from_twsu() -> Harness:
    """Set-up line/set-down switch from toggle switch/set-up lines; ``c`` holds the state."""
    b = Builder()
    g = builtin(TWSU)
    c, h1, h2 = b.add(g, "up"), b.add(g, "up"), b.add(g, "up")
    b.wire(c["out2"], h1["in2"])
    b.join(c["in1"], h2["top1"], h2["out2"])
    b.wire(c["bottom1"], h2["in2"])
    b.wire(c["top1"], h1["in1"])
    b.wire(h1["top1"], h2["in1"])
    subs = [(SU, (c["in2"], h1["out2"])), (SDS, (h2["in1"], h2["bottom1"], h1["bottom1"]))]
    return _emit(b, "susdw-from-sutw", subs, _state_of(c),
                 {s: {c: s} for s in ("up", "down")}, "set-up-line+set-down-switch")


def suwsd_from_twsu() -> Harness:
    """Reflected and reordered so the target is the set-up switch/set-down line."""
    h = susdw_from_twsu()
    return relabel(h, "suwsd-from-twsu", SUWSD, {"in1": "in2", "out1": "out2", "in2": "in1",
                                          "top2": "bottom1", "bottom2": "top1"}, swap_states=True)


# -- k-switches -------------------------------------------------------------------------


def _thermometer(k: int, j: int) -> list[str]:
    return ["up" if i < j else "down" for i in range(k - 1)]


def _k_switch_network(b: Builder, k: int, copies: int, set_copies: Sequence[int],
                      helper: str = "wsusd-restoring"):
    """``copies`` chains of ``k - 1`` switch/set-up/set-down gadgets kept in lockstep.

    State ``j`` is stored in unary: the first ``j`` gadgets of each chain are up.
    Returns (read entries, read exits per state, set lines per state, chains).
    The restoring duplicator keeps helper states fixed but one copy shares its
    entrance with internal traffic; branching designs need the plain one.
    """
    chains = [[b.add(builtin(WSUSD), "down") for _ in range(k - 1)] for _ in range(copies)]
    entries, exits = [], []
    for gs in chains:
        for a, c in zip(gs, gs[1:]):
            b.wire(a["top1"], c["in1"])
        entries.append(gs[0]["in1"])
        exits.append([gs[j]["bottom1"] for j in range(k - 1)] + [gs[-1]["top1"]])
    ups = {}
    downs = {}
    for gs in chains:
        for i, g in enumerate(gs):
            n_up = sum(set_copies[j] for j in range(i + 1, k))
            n_down = sum(set_copies[j] for j in range(i + 1))
            ups[g.index] = duplicate(b, (g["in2"], g["out2"]), n_up, helper)
            downs[g.index] = duplicate(b, (g["in3"], g["out3"]), n_down, helper)
    sets: list[list[Line]] = []
    for j in range(k):
        lines = []
        for _ in range(set_copies[j]):
            path = []
            for gs in chains:
                for i, g in enumerate(gs):
                    pool = ups if i < j else downs
                    path.append(pool[g.index].pop(0))
            lines.append(chain(b, path))
        sets.append(lines)
    return entries, exits, sets, chains


def _unary_decoder(chains):
    idx = [[g.index for g in gs] for gs in chains]

    def decode(ps):
        found = None
        for ids in idx:
            bits = [ps[i] for i in ids]
            j = bits.count("up")
            if bits != ["up"] * j + ["down"] * (len(bits) - j):
                return None
            if found is not None and j != found:
                return None
            found = j
        return found
    return decode


def k_switch_harness(k: int, copies: int = 1) -> Harness:
    """A ``k``-switch (with ``copies`` read-only switches) from switch/set-up/set-down gadgets."""
    if k < 2 or copies < 1:
        raise GadgetError("k-switch simulation needs k >= 2 and copies >= 1")
    b = Builder()
    entries, exits, sets, chains = _k_switch_network(b, k, copies, [1] * k)
    target = k_switch(k, copies)
    ins = {f"in{c + 1}": e for c, e in enumerate(entries)}
    outs = {f"out{c + 1}_{j}": exits[c][j] for c in range(copies) for j in range(k)}
    for j in range(k):
        (line,) = sets[j]
        ins[f"set{j}"], outs[f"set{j}_out"] = line
    unary = _unary_decoder(chains)

    def decode(ps):
        j = unary(ps)
        return None if j is None else str(j)
    init = {str(j): {g: s for gs in chains for g, s in zip(gs, _thermometer(k, j))}
            for j in range(k)}
    name = "k-switch" if copies == 1 else "switch-duplicated-k-switch"
    return b.harness(name, target, ins, outs, decode, init)


# -- arbitrary gadgets ------------------------------------------------------------------------


def split_locations(g: Gadget) -> Gadget:
    """Give every location separate entrance ``loc.in`` and exit ``loc.out`` copies."""
    if g.is_input_output:
        return g
    ins = [f"{l}.in" for l in g.locations]
    outs = [f"{l}.out" for l in g.locations]
    trans = [Transition(t.from_state, f"{t.in_loc}.in", t.to_state, f"{t.out_loc}.out")
             for t in g.transitions]
    return Gadget(g.name + "/split", g.states, tuple(ins + outs), tuple(trans),
                  g.default_state, tuple(ins), tuple(outs))


def _arbitrary(target: Gadget, one_player: bool) -> Harness:
    states = list(target.states)
    index = {s: j for j, s in enumerate(states)}
    k = max(len(states), 2)
    inputs = list(target.inputs)
    set_copies = [0] * k
    for t in target.transitions:
        set_copies[index[t.to_state]] += 1
    b = Builder()
    helper = "wsusd" if one_player else "wsusd-restoring"
    entries, exits, sets, chains = _k_switch_network(b, k, len(inputs), set_copies, helper)
    arrivals: dict[str, list[Node]] = {}
    for c, loc in enumerate(inputs):
        for s in states:
            for t in target.moves(s, loc):
                line = sets[index[t.to_state]].pop(0)
                b.wire(exits[c][index[s]], line[0])
                arrivals.setdefault(t.out_loc, []).append(line[1])
    outs = {}
    for loc, nodes in arrivals.items():
        b.join(*nodes)
        outs[loc] = nodes[0]
    unary = _unary_decoder(chains)

    def decode(ps):
        j = unary(ps)
        return None if j is None or j >= len(states) else states[j]
    init = {s: {g: v for gs in chains for g, v in zip(gs, _thermometer(k, index[s]))}
            for s in states}
    name = ("arbitrary-1p:" if one_player else "arbitrary:") + target.name
    return b.harness(name, target, dict(zip(inputs, entries)), outs, decode, init)


def simulate_arbitrary(target: Gadget) -> Harness:
    """Zero-player simulation of any deterministic input/output gadget."""
    errs = target.io_violations()
    if errs:
        raise GadgetError(f"{target.name}: not input/output: {errs[0]}")
    if not target.is_deterministic:
        raise GadgetError(f"{target.name}: nondeterministic; use simulate_arbitrary_one_player")
    return _arbitrary(target, one_player=False)


def simulate_arbitrary_one_player(target: Gadget) -> Harness:
    """One-player simulation of any gadget; non input/output gadgets are split first."""
    return _arbitrary(split_locations(target), one_player=True)


# -- registry and basis chains ------------------------------------------------------------------

CONSTRUCTIONS: dict[str, Callable[..., Harness]] = {
    "duplicator-wsusd": duplicator_wsusd,
    "duplicator-twtw": duplicator_twtw,
    "t3tw3": t3tw3,
    "wsusd-from-twtw": wsusd_from_twtw,
    "twtw-from-twt": twtw_from_twt,
    "duplicator-wt": duplicator_wt,
    "twt-from-wt": twt_from_wt,
    "duplicator-suwt": duplicator_suwt,
    "wt-from-suwt": wt_from_suwt,
    "suwt-from-suwsd": suwt_from_suwsd,
    "susdw-from-sutw": susdw_from_twsu,
    "k-switch": lambda k=4: k_switch_harness(k),
    "switch-duplicated-k-switch": lambda k=4, copies=3: k_switch_harness(k, copies),
}


def construct(name: str, **params) -> Harness:
    try:
        make = CONSTRUCTIONS[name]
    except KeyError:
        raise GadgetError(f"unknown construction {name!r}") from None
    return make(**params)


# Each step simulates the gadget one link closer to the switch/set-up/set-down.
_CHAIN_STEPS = {
    TWT: twtw_from_twt,
    WT: twt_from_wt,
    SUWT: wt_from_suwt,
    SUWSD: suwt_from_suwsd,
    TWSU: suwsd_from_twsu,
}
_CHAIN_ORDER = [TWT, WT, SUWT, SUWSD, TWSU]


def wsusd_from(basis: str) -> Harness:
    """A flat switch/set-up/set-down harness made only of ``basis`` gadgets."""
    if basis == WSUSD:
        return identity_harness(builtin(WSUSD))
    h = wsusd_from_twtw()
    if basis == TWTW:
        return h
    if basis not in _CHAIN_STEPS:
        raise GadgetError(f"{basis!r} is not an unbounded basis gadget")
    for name in _CHAIN_ORDER[: _CHAIN_ORDER.index(basis) + 1]:
        h = substitute_harness(h, [_CHAIN_STEPS[name]()])
    return h
