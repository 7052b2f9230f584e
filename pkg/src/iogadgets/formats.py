"""Reading and writing gadgets, systems, certificates, harnesses and problem files.

JSON output always uses a fixed key order so the same object serializes to
the same bytes.  Parse errors raise :class:`FormatError` naming the line or
field at fault.
"""
from __future__ import annotations

import json
import os
import re
from typing import Any, Iterable

from .gadgets import Gadget, GadgetError, Transition, builtin
from .harness import Harness, check_simulation
from .oneplayer import Flow
from .reductions import Digraph, Geography, NorCircuit, Qbf, ReductionError
from .systems import GOAL, START, Network, System, SystemError_
from .trainyard import LOCS, TrainyardError, TrainyardNetwork, TrainyardSystem
from .twoplayer import LabeledSystem


class FormatError(ValueError):
    pass


def dumps(obj: Any) -> str:
    """One line of JSON; key order is whatever the emitter built, never re-sorted."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _load_json(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{what}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def _field(obj: dict, key: str, what: str, kind=None, default=...):
    if not isinstance(obj, dict):
        raise FormatError(f"{what}: expected a JSON object")
    if key not in obj:
        if default is not ...:
            return default
        raise FormatError(f"{what}: missing field {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise FormatError(f"{what}: field {key!r} has the wrong type")
    return v


# -- gadgets -------------------------------------------------------------------------------


def gadget_to_json(g: Gadget) -> dict:
    return {
        "name": g.name,
        "states": list(g.states),
        "locations": list(g.locations),
        "defaultState": g.default_state,
        "inputs": list(g.inputs),
        "outputs": list(g.outputs),
        "transitions": [{"from": [t.from_state, t.in_loc], "to": [t.to_state, t.out_loc]}
                        for t in g.transitions],
    }


def _pair(v, what):
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, str) for x in v)):
        raise FormatError(f"{what}: expected [state, location]")
    return v


def gadget_from_json(obj: Any, what: str = "gadget") -> Gadget:
    name = _field(obj, "name", what, str)
    states = _field(obj, "states", what, list)
    inputs = _field(obj, "inputs", what, list, [])
    outputs = _field(obj, "outputs", what, list, [])
    trans = []
    for k, t in enumerate(_field(obj, "transitions", what, list)):
        w = f"{what}: transitions[{k}]"
        a = _pair(_field(t, "from", w), w + ".from")
        b = _pair(_field(t, "to", w), w + ".to")
        trans.append(Transition(a[0], a[1], b[0], b[1]))
    locs = _field(obj, "locations", what, list, None)
    if locs is None:
        locs = list(dict.fromkeys([*inputs, *outputs, *(t.in_loc for t in trans),
                                   *(t.out_loc for t in trans)]))
    default = _field(obj, "defaultState", what, str, states[0] if states else None)
    try:
        return Gadget(name, tuple(states), tuple(locs), tuple(trans), default,
                      tuple(inputs), tuple(outputs))
    except GadgetError as e:
        raise FormatError(f"{what}: {e}") from None


def _gadget_ref(ref, base_dir: str, what: str) -> Gadget:
    if isinstance(ref, dict):
        return gadget_from_json(ref, what)
    if isinstance(ref, str):
        try:
            return builtin(ref)
        except GadgetError:
            pass
        path = os.path.join(base_dir, ref)
        try:
            with open(path) as f:
                return gadget_from_json(_load_json(f.read(), path), path)
        except OSError:
            raise FormatError(f"{what}: {ref!r} is neither a builtin gadget nor a readable file") from None
    raise FormatError(f"{what}: expected a gadget object, builtin name or file name")


# -- systems ---------------------------------------------------------------------------------


def _node_json(n):
    return n if isinstance(n, str) else [n[0], n[1]]


def _node_from(v, n_inst: int, what: str):
    if v in (START, GOAL):
        return v
    if (isinstance(v, list) and len(v) == 2 and isinstance(v[0], int)
            and isinstance(v[1], str) and 0 <= v[0] < n_inst):
        return (v[0], v[1])
    raise FormatError(f"{what}: bad node {v!r}")


def _network_json(net: Network, skip: Iterable = ()) -> dict:
    gadgets: list[Gadget] = []
    insts = []
    for inst in net.instances:
        key = next((k for k, g in enumerate(gadgets) if g is inst.gadget or g == inst.gadget), None)
        if key is None:
            key = len(gadgets)
            gadgets.append(inst.gadget)
        insts.append({"gadget": key, "state": inst.state})
    wires = list(net.wires)
    for w in skip:
        wires.remove(w)
    return {"gadgets": [gadget_to_json(g) for g in gadgets], "instances": insts,
            "wires": [[_node_json(a), _node_json(b)] for a, b in wires]}


def system_to_json(sys: System) -> dict:
    skip = []
    if sys.start is not None and sys.start != START:
        skip.append((START, sys.start))
    if sys.goal is not None and sys.goal != GOAL:
        skip.append((GOAL, sys.goal))
    out = _network_json(sys, skip)
    out["start"] = None if sys.start is None else _node_json(sys.start)
    out["goal"] = None if sys.goal is None else _node_json(sys.goal)
    return out


def _instances_from(obj, what, base_dir):
    gadgets = [_gadget_ref(g, base_dir, f"{what}: gadgets[{k}]")
               for k, g in enumerate(_field(obj, "gadgets", what, list))]
    by_name = {g.name: g for g in gadgets}
    insts = []
    for k, inst in enumerate(_field(obj, "instances", what, list)):
        w = f"{what}: instances[{k}]"
        ref = _field(inst, "gadget", w)
        if isinstance(ref, int) and 0 <= ref < len(gadgets):
            g = gadgets[ref]
        elif isinstance(ref, str) and ref in by_name:
            g = by_name[ref]
        elif isinstance(ref, str):
            g = _gadget_ref(ref, base_dir, w)
        else:
            raise FormatError(f"{w}: unknown gadget {ref!r}")
        state = _field(inst, "state", w, str, g.default_state)
        if state not in g.states:
            raise FormatError(f"{w}: {state!r} is not a state of {g.name}")
        insts.append((g, state))
    wires = []
    for k, wv in enumerate(_field(obj, "wires", what, list, [])):
        if not (isinstance(wv, list) and len(wv) == 2):
            raise FormatError(f"{what}: wires[{k}] must be a pair of nodes")
        wires.append(tuple(_node_from(x, len(insts), f"{what}: wires[{k}]") for x in wv))
    return insts, wires


def system_from_json(obj: Any, what: str = "system", base_dir: str = ".") -> System:
    insts, wires = _instances_from(obj, what, base_dir)
    start = obj.get("start")
    goal = obj.get("goal")
    start = None if start is None else _node_from(start, len(insts), f"{what}: start")
    goal = None if goal is None else _node_from(goal, len(insts), f"{what}: goal")
    try:
        return System(insts, wires, start, goal)
    except (SystemError_, GadgetError) as e:
        raise FormatError(f"{what}: {e}") from None


def labeled_to_json(ls: LabeledSystem) -> dict:
    out = system_to_json(ls.base)
    out["labels"] = list(ls.labels)
    return out


def labeled_from_json(obj: Any, what: str = "system", base_dir: str = ".") -> LabeledSystem:
    base = system_from_json(obj, what, base_dir)
    labels = _field(obj, "labels", what, list)
    try:
        return LabeledSystem(base, labels)
    except SystemError_ as e:
        raise FormatError(f"{what}: {e}") from None


# -- flows -----------------------------------------------------------------------------------


def flow_to_json(flow: Flow) -> dict:
    items = sorted(flow.items(), key=lambda e: (e[0][0], tuple(e[0][1])))
    return {"flow": [{"instance": i, "transition": {"from": [t.from_state, t.in_loc],
                                                     "to": [t.to_state, t.out_loc]},
                      "count": c} for (i, t), c in items]}


def flow_from_json(obj: Any, what: str = "flow") -> Flow:
    flow = Flow()
    for k, e in enumerate(_field(obj, "flow", what, list)):
        w = f"{what}: flow[{k}]"
        i = _field(e, "instance", w, int)
        t = _field(e, "transition", w, dict)
        a = _pair(_field(t, "from", w), w + ".transition.from")
        b = _pair(_field(t, "to", w), w + ".transition.to")
        c = _field(e, "count", w, int)
        flow[(i, Transition(a[0], a[1], b[0], b[1]))] += c
    return flow


# -- harnesses -------------------------------------------------------------------------------


def harness_to_json(h: Harness, step_cap: int = 10**4) -> dict:
    """Export with an explicit decode table; the harness must pass its check."""
    report = check_simulation(h, step_cap, collect=True)
    if not report:
        raise FormatError(f"harness {h.name} does not pass its check: {report.counterexample}")
    out = _network_json(h.network)
    out["name"] = h.name
    out["target"] = gadget_to_json(h.target)
    out["inPorts"] = {p: _node_json(n) for p, n in h.in_ports.items()}
    out["outPorts"] = {p: _node_json(n) for p, n in h.out_ports.items()}
    out["init"] = {s: list(v) for s, v in h.init.items()}
    out["decode"] = [{"vector": list(v), "state": s} for v, s in report.table.items()]
    return out


def harness_from_json(obj: Any, what: str = "harness", base_dir: str = ".") -> Harness:
    insts, wires = _instances_from(obj, what, base_dir)
    try:
        net = Network(insts, wires)
    except (SystemError_, GadgetError) as e:
        raise FormatError(f"{what}: {e}") from None
    target = _gadget_ref(_field(obj, "target", what), base_dir, f"{what}: target")
    n = len(insts)
    ins = {p: _node_from(v, n, f"{what}: inPorts.{p}")
           for p, v in _field(obj, "inPorts", what, dict).items()}
    outs = {p: _node_from(v, n, f"{what}: outPorts.{p}")
            for p, v in _field(obj, "outPorts", what, dict).items()}
    table = {}
    for k, e in enumerate(_field(obj, "decode", what, list)):
        vec = _field(e, "vector", f"{what}: decode[{k}]", list)
        table[tuple(vec)] = _field(e, "state", f"{what}: decode[{k}]", str)
    init = {s: tuple(v) for s, v in _field(obj, "init", what, dict).items()}
    for s, v in init.items():
        if len(v) != n:
            raise FormatError(f"{what}: init.{s} has {len(v)} entries for {n} instances")
    return Harness(_field(obj, "name", what, str, "harness"), target, net, ins, outs,
                   table.get, init)


# -- trainyard -------------------------------------------------------------------------------


def trainyard_to_json(sys: TrainyardSystem) -> dict:
    net = sys.network
    pairs = sorted({tuple(sorted((a, b))) for a, b in net.pairs.items()})
    out = {"gadgets": len(net), "pairs": [[list(a), list(b)] for a, b in pairs],
           "start": list(sys.start), "goal": None if sys.goal is None else list(sys.goal)}
    if any(s != "up" for s in net.states):
        out["states"] = list(net.states)
    if net.no_entry:
        out["noEntry"] = [list(x) for x in sorted(net.no_entry)]
    if net.no_exit:
        out["noExit"] = [list(x) for x in sorted(net.no_exit)]
    return out


def trainyard_from_json(obj: Any, what: str = "trainyard") -> TrainyardSystem:
    n = _field(obj, "gadgets", what, int)

    def loc(v, w):
        if not (isinstance(v, list) and len(v) == 2 and isinstance(v[0], int)
                and v[1] in LOCS and 0 <= v[0] < n):
            raise FormatError(f"{w}: bad location {v!r}")
        return (v[0], v[1])

    states = _field(obj, "states", what, list, ["up"] * n)
    if len(states) != n:
        raise FormatError(f"{what}: {len(states)} states for {n} gadgets")
    net = TrainyardNetwork()
    try:
        for s in states:
            net.add(s)
        for k, p in enumerate(_field(obj, "pairs", what, list, [])):
            if not (isinstance(p, list) and len(p) == 2):
                raise FormatError(f"{what}: pairs[{k}] must be a pair")
            net.pair(loc(p[0], f"{what}: pairs[{k}]"), loc(p[1], f"{what}: pairs[{k}]"))
        net.no_entry = {loc(v, f"{what}: noEntry") for v in _field(obj, "noEntry", what, list, [])}
        net.no_exit = {loc(v, f"{what}: noExit") for v in _field(obj, "noExit", what, list, [])}
        goal = obj.get("goal")
        return TrainyardSystem(net, loc(_field(obj, "start", what), f"{what}: start"),
                               None if goal is None else loc(goal, f"{what}: goal"))
    except TrainyardError as e:
        raise FormatError(f"{what}: {e}") from None


# -- text formats ------------------------------------------------------------------------------


def _lines(text: str, comment: str):
    for no, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if line and not line.startswith(comment):
            yield no, line


def _ints(tokens, no, what):
    try:
        return [int(x) for x in tokens]
    except ValueError:
        raise FormatError(f"{what} line {no}: expected integers") from None


def parse_dimacs(text: str, what: str = "cnf") -> tuple[int, list[tuple[int, ...]]]:
    n_vars = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for no, line in _lines(text, "c"):
        if line.startswith("p"):
            tok = line.split()
            if len(tok) != 4 or tok[1] != "cnf":
                raise FormatError(f"{what} line {no}: expected 'p cnf <vars> <clauses>'")
            n_vars = _ints(tok[2:3], no, what)[0]
            continue
        if n_vars is None:
            raise FormatError(f"{what} line {no}: clause before the 'p cnf' header")
        for x in _ints(line.split(), no, what):
            if x == 0:
                clauses.append(tuple(cur))
                cur = []
            elif abs(x) > n_vars:
                raise FormatError(f"{what} line {no}: literal {x} exceeds {n_vars} variables")
            else:
                cur.append(x)
    if n_vars is None:
        raise FormatError(f"{what}: missing 'p cnf' header")
    if cur:
        clauses.append(tuple(cur))
    return n_vars, clauses


def format_dimacs(n_vars: int, clauses) -> str:
    return "".join([f"p cnf {n_vars} {len(clauses)}\n"] + [" ".join(map(str, c)) + " 0\n" for c in clauses])


def parse_qdimacs(text: str, what: str = "qdimacs") -> Qbf:
    """Quantifier lines ``a ... 0`` / ``e ... 0``; unquantified variables become outermost existentials."""
    body = []
    prefix = []
    n_vars = None
    for no, line in _lines(text, "c"):
        head = line.split()[0]
        if head in ("a", "e"):
            vs = _ints(line.split()[1:], no, what)
            if not vs or vs[-1] != 0:
                raise FormatError(f"{what} line {no}: quantifier line must end with 0")
            prefix += [(head.upper(), v) for v in vs[:-1]]
        else:
            if head == "p":
                tok = line.split()
                if len(tok) == 4:
                    n_vars = _ints(tok[2:3], no, what)[0]
            body.append(line)
    n, clauses = parse_dimacs("\n".join(body), what)
    n_vars = n if n_vars is None else n_vars
    bound = {v for _, v in prefix}
    free = sorted({abs(l) for c in clauses for l in c} - bound)
    try:
        return Qbf([("E", v) for v in free] + prefix, clauses)
    except ReductionError as e:
        raise FormatError(f"{what}: {e}") from None


def format_qdimacs(q: Qbf) -> str:
    n = max((v for _, v in q.prefix), default=0)
    out = [f"p cnf {n} {len(q.clauses)}\n"]
    for quant, v in q.prefix:
        out.append(f"{quant.lower()} {v} 0\n")
    out += [" ".join(map(str, c)) + " 0\n" for c in q.clauses]
    return "".join(out)


def _edge_list(text: str, what: str):
    n = None
    start = target = None
    owners: dict[int, str] = {}
    edges = []
    for no, line in _lines(text, "#"):
        tok = line.split()
        if tok[0] in ("vertices", "start", "target") and len(tok) == 2:
            v = _ints(tok[1:], no, what)[0]
            if tok[0] == "vertices":
                n = v
            elif tok[0] == "start":
                start = v
            else:
                target = v
        elif len(tok) == 2 and tok[1] in ("White", "Black"):
            owners[_ints(tok[:1], no, what)[0]] = tok[1]
        elif len(tok) == 2:
            edges.append(tuple(_ints(tok, no, what)))
        else:
            raise FormatError(f"{what} line {no}: expected 'u v', 'v White|Black' or a keyword line")
    if n is None:
        n = 1 + max([0] + [max(e) for e in edges] + list(owners) + [x for x in (start, target) if x is not None])
    return n, start, target, owners, edges


def parse_digraph(text: str, what: str = "graph") -> Digraph:
    n, s, t, _, edges = _edge_list(text, what)
    if s is None or t is None:
        raise FormatError(f"{what}: 'start' and 'target' lines are required")
    try:
        return Digraph(n, edges, s, t)
    except ReductionError as e:
        raise FormatError(f"{what}: {e}") from None


def format_digraph(g: Digraph) -> str:
    return "".join([f"vertices {g.n}\n", f"start {g.s}\n", f"target {g.t}\n"]
                   + [f"{u} {v}\n" for u, v in g.edges])


def parse_geography(text: str, what: str = "geography") -> Geography:
    n, s, _, owners, edges = _edge_list(text, what)
    missing = [v for v in range(n) if v not in owners]
    if missing:
        raise FormatError(f"{what}: vertex {missing[0]} has no owner line")
    try:
        return Geography(n, [owners[v] for v in range(n)], edges, 0 if s is None else s)
    except ReductionError as e:
        raise FormatError(f"{what}: {e}") from None


def format_geography(g: Geography) -> str:
    return "".join([f"vertices {g.n}\n", f"start {g.start}\n"]
                   + [f"{v} {o}\n" for v, o in enumerate(g.owners)]
                   + [f"{u} {v}\n" for u, v in g.edges])


_GATE = re.compile(r"gate\s+(\w+)\s*=\s*NOR\s*\(\s*(\w+)\s*,\s*(\w+)\s*\)", re.I)
_INPUT = re.compile(r"input\s+(\w+)\s*=\s*([01]|true|false)", re.I)
_OUTPUT = re.compile(r"output\s+(\w+)", re.I)


def parse_netlist(text: str, what: str = "netlist") -> NorCircuit:
    inputs: dict[str, bool] = {}
    gates = []
    output = None
    for no, line in _lines(text, "#"):
        if m := _GATE.fullmatch(line):
            gates.append((m[1], m[2], m[3]))
        elif m := _INPUT.fullmatch(line):
            inputs[m[1]] = m[2].lower() in ("1", "true")
        elif m := _OUTPUT.fullmatch(line):
            output = m[1]
        else:
            raise FormatError(f"{what} line {no}: expected 'input x = 0|1', 'gate g = NOR(a,b)' or 'output g'")
    if output is None:
        output = gates[-1][0] if gates else None
    if output is None:
        raise FormatError(f"{what}: no output wire")
    try:
        return NorCircuit(inputs, gates, output)
    except ReductionError as e:
        raise FormatError(f"{what}: {e}") from None


def format_netlist(c: NorCircuit) -> str:
    return "".join([f"input {k} = {int(v)}\n" for k, v in c.inputs.items()]
                   + [f"gate {g} = NOR({a},{b})\n" for g, a, b in c.gates]
                   + [f"output {c.output}\n"])
