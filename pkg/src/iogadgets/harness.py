"""Simulation harnesses: networks with ports that claim to behave like a gadget.

A harness is checked as a Mealy machine: every reachable internal state vector
is decoded to a target state, the robot is injected at each in-port, and the
exit port plus the decoded new vector must match the target's transition.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .gadgets import Gadget
from .systems import Instance, Network, Node, System, _node

Decoder = Callable[[tuple], "str | None"]


class HarnessError(ValueError):
    pass


@dataclass(frozen=True)
class Harness:
    name: str
    target: Gadget
    network: Network
    in_ports: Mapping[str, Node]
    out_ports: Mapping[str, Node]
    decode: Decoder = field(repr=False)
    init: Mapping[str, tuple] = field(repr=False)

    @property
    def instances(self):
        return self.network.instances

    @property
    def initial_vector(self) -> tuple:
        return self.init[self.target.default_state]

    def __len__(self):
        return len(self.network.instances)


class Part:
    """A gadget or harness placed in a builder; ``part[loc]`` is the node for ``loc``."""

    def __init__(self, builder, index, offset, state, gadget=None, harness=None):
        self.builder, self.index, self.offset = builder, index, offset
        self.state = state
        self.gadget, self.harness = gadget, harness

    def nodes(self, loc: str) -> list[Node]:
        if self.gadget is not None:
            if loc not in self.gadget.locations:
                raise HarnessError(f"{self.gadget.name} has no location {loc!r}")
            return [(self.offset, loc)]
        h = self.harness
        out = []
        for ports in (h.in_ports, h.out_ports):
            if loc in ports:
                i, l = ports[loc]
                out.append((i + self.offset, l))
        return out

    def __getitem__(self, loc: str) -> Node:
        n = self.nodes(loc)
        if not n:
            raise HarnessError(f"harness {self.harness.name} has no port {loc!r}")
        if len(n) != 1:
            raise HarnessError(f"port {loc!r} is both an in-port and an out-port")
        return n[0]


class Builder:
    """Incrementally assemble gadgets and sub-harnesses, then emit a System or Harness."""

    def __init__(self):
        self.instances: list[Instance] = []
        self.wires: list[tuple[Node, Node]] = []
        self.parts: list[Part] = []

    def add(self, gadget: Gadget, state: str | None = None) -> Part:
        state = gadget.default_state if state is None else state
        part = Part(self, len(self.parts), len(self.instances), state, gadget=gadget)
        self.instances.append(Instance(gadget, state))
        self.parts.append(part)
        return part

    def place(self, harness: Harness, state: str | None = None) -> Part:
        state = harness.target.default_state if state is None else state
        part = Part(self, len(self.parts), len(self.instances), state, harness=harness)
        vec = harness.init[state]
        for inst, s in zip(harness.instances, vec):
            self.instances.append(Instance(inst.gadget, s))
        off = part.offset
        for a, b in harness.network.wires:
            self.wires.append(((a[0] + off, a[1]), (b[0] + off, b[1])))
        self.parts.append(part)
        return part

    def put(self, thing, state: str | None = None) -> Part:
        return self.place(thing, state) if isinstance(thing, Harness) else self.add(thing, state)

    def wire(self, a: Node, b: Node) -> None:
        self.wires.append((_node(a), _node(b)))

    def join(self, *nodes: Node) -> None:
        """Put all nodes in one component."""
        for n in nodes[1:]:
            self.wire(nodes[0], n)

    def system(self, start: Node | None, goal: Node | None) -> System:
        return System(self.instances, self.wires, start, goal)

    def _part_states(self, v) -> tuple:
        if isinstance(v, Mapping):
            states = [p.state for p in self.parts]
            for p, s in v.items():
                states[p.index] = s
            return tuple(states)
        return tuple(v)

    def _blocks(self):
        bounds = [p.offset for p in self.parts] + [len(self.instances)]
        return [(p, bounds[k], bounds[k + 1]) for k, p in enumerate(self.parts)]

    def harness(
        self,
        name: str,
        target: Gadget,
        in_ports: Mapping[str, Node],
        out_ports: Mapping[str, Node],
        decode: Callable[[tuple], "str | None"],
        init: Mapping[str, "Sequence[str] | Mapping[Part, str]"],
    ) -> Harness:
        """``decode`` and ``init`` speak in part states: one entry per placed part,
        the gadget's state or the sub-harness's decoded state.  An ``init`` entry
        may also be a ``{part: state}`` override of the placed states."""
        blocks = self._blocks()
        init = {ts: self._part_states(v) for ts, v in init.items()}

        def full_decode(vec: tuple):
            parts = []
            for p, lo, hi in blocks:
                if p.gadget is not None:
                    parts.append(vec[lo])
                else:
                    s = p.harness.decode(vec[lo:hi])
                    if s is None:
                        return None
                    parts.append(s)
            return decode(tuple(parts))

        full_init = {}
        for ts, part_states in init.items():
            vec: list[str] = []
            for (p, _, _), s in zip(blocks, part_states):
                vec.extend((s,) if p.gadget is not None else p.harness.init[s])
            full_init[ts] = tuple(vec)
        insts = [Instance(inst.gadget, s) for inst, s in
                 zip(self.instances, full_init[target.default_state])]
        net = Network(insts, self.wires)
        return Harness(name, target, net, {k: _node(v) for k, v in in_ports.items()},
                       {k: _node(v) for k, v in out_ports.items()}, full_decode, full_init)


# -- checking ----------------------------------------------------------------------


@dataclass
class SimulationReport:
    accepted: bool
    counterexample: str | None = None
    vectors: int = 0
    table: dict | None = field(default=None, repr=False)

    def __bool__(self):
        return self.accepted


def _port_comps(h: Harness):
    net = h.network
    ins = {p: net.comp_of[n] for p, n in h.in_ports.items()}
    outs: dict[int, str] = {}
    for p, n in h.out_ports.items():
        c = net.comp_of[n]
        if c in outs:
            raise HarnessError(f"out-ports {outs[c]!r} and {p!r} share a component")
        outs[c] = p
    return ins, outs


def check_simulation(h: Harness, step_cap: int = 10**4, collect: bool = False) -> SimulationReport:
    """Exhaustive zero-player equivalence check of ``h`` against its target.

    With ``collect`` an accepted report carries the decode table of every
    reachable vector.
    """
    net = h.network
    target = h.target
    try:
        ins, outs = _port_comps(h)
    except HarnessError as e:
        return SimulationReport(False, str(e))
    for p, c in ins.items():
        if c in outs:
            return SimulationReport(False, f"in-port {p!r} shares a component with out-port {outs[c]!r}")
    for c in outs:
        if net.entries[c]:
            return SimulationReport(False, f"out-port {outs[c]!r} component has an internal entrance")
    viol = net.branch_violations()
    if viol:
        return SimulationReport(False, viol[0].detail)
    for i, inst in enumerate(net.instances):
        if not inst.gadget.is_deterministic:
            return SimulationReport(False, f"internal instance {i} is nondeterministic")
    missing = [l for l in target.inputs if l not in h.in_ports]
    if missing:
        return SimulationReport(False, f"target inputs without in-port: {missing}")
    entry, index = net.compile_tables()
    names = [inst.gadget.states for inst in net.instances]

    def to_idx(vec):
        return tuple(index[i][s] for i, s in enumerate(vec))

    def to_names(vec):
        return tuple(names[i][k] for i, k in enumerate(vec))

    seen = set()
    queue = deque()
    for ts in sorted(h.init):
        v = to_idx(h.init[ts])
        if v not in seen:
            seen.add(v)
            queue.append((v, ()))
    while queue:
        v, trace = queue.popleft()
        named = to_names(v)
        ts = h.decode(named)
        if ts is None:
            return SimulationReport(False, f"undecodable vector after {list(trace)}", len(seen))
        for p in target.inputs:
            expect = target.moves(ts, p)
            if len(expect) != 1:
                return SimulationReport(False, f"target is not deterministic at ({ts}, {p})", len(seen))
            t = expect[0]
            states = list(v)
            comp = ins[p]
            steps = 0
            while comp not in outs:
                e = entry[comp]
                if e is None or e[1][states[e[0]]] is None:
                    return SimulationReport(
                        False, f"robot stuck inside after {list(trace) + [p]}", len(seen))
                i, tab = e
                states[i], comp = tab[states[i]]
                steps += 1
                if steps > step_cap:
                    return SimulationReport(
                        False, f"no exit within {step_cap} steps after {list(trace) + [p]}", len(seen))
            nv = tuple(states)
            got_state = h.decode(to_names(nv))
            if outs[comp] != t.out_loc or got_state != t.to_state:
                return SimulationReport(
                    False,
                    f"from {ts} entering {p} (history {list(trace)}): harness exits "
                    f"{outs[comp]} in {got_state}, target exits {t.out_loc} in {t.to_state}",
                    len(seen))
            if nv not in seen:
                seen.add(nv)
                queue.append((nv, trace + (p,)))
    table = None
    if collect:
        table = {to_names(v): h.decode(to_names(v)) for v in sorted(seen)}
    return SimulationReport(True, None, len(seen), table)


def check_simulation_one_player(h: Harness, config_cap: int = 10**5) -> SimulationReport:
    """Outcome-set equivalence: for every reachable vector and in-port, the set of
    (exit, decoded state) pairs reachable by some choice equals the target's."""
    net = h.network
    target = h.target
    try:
        ins, outs = _port_comps(h)
    except HarnessError as e:
        return SimulationReport(False, str(e))
    seen = set()
    queue = deque()
    for ts in sorted(h.init):
        v = tuple(h.init[ts])
        if v not in seen:
            seen.add(v)
            queue.append(v)
    while queue:
        v = queue.popleft()
        ts = h.decode(v)
        if ts is None:
            return SimulationReport(False, f"undecodable vector {v}", len(seen))
        for p in sorted(set(h.in_ports)):
            expect = {(t.out_loc, t.to_state) for t in target.moves(ts, p)}
            got = set()
            start = (v, ins[p])
            frontier = [start]
            visited = {start}
            exits = set()
            while frontier:
                vec, comp = frontier.pop()
                if comp in outs:
                    exits.add((outs[comp], vec))
                    continue
                for mv, nc in net.moves(vec, comp):
                    nvec = list(vec)
                    nvec[mv.instance] = mv.transition.to_state
                    cfg = (tuple(nvec), nc)
                    if cfg not in visited:
                        visited.add(cfg)
                        if len(visited) > config_cap:
                            return SimulationReport(False, "configuration cap exceeded", len(seen))
                        frontier.append(cfg)
            for loc, vec in exits:
                s = h.decode(vec)
                if s is None:
                    return SimulationReport(False, f"undecodable vector {vec}", len(seen))
                got.add((loc, s))
                if vec not in seen:
                    seen.add(vec)
                    queue.append(vec)
            if got != expect:
                return SimulationReport(
                    False, f"from {ts} entering {p}: harness outcomes {sorted(got)}, "
                    f"target outcomes {sorted(expect)}", len(seen))
    return SimulationReport(True, None, len(seen))


# -- substitution -------------------------------------------------------------------------


def implements(h: Harness, g: Gadget) -> bool:
    return (h.target.transition_set() == g.transition_set()
            and set(h.target.locations) == set(g.locations))


def substitute(system: System, harnesses: Sequence[Harness]) -> System:
    """Replace every instance whose gadget some harness implements by that harness."""
    b = Builder()
    parts = []
    for inst in system.instances:
        h = next((h for h in harnesses if implements(h, inst.gadget)), None)
        parts.append(b.place(h, inst.state) if h is not None else b.add(inst.gadget, inst.state))

    def nodes(n):
        if isinstance(n, str):
            return [n]
        return parts[n[0]].nodes(n[1])

    for a, c in system.wires:
        for x in nodes(a):
            for y in nodes(c):
                b.wire(x, y)
    return System(b.instances, b.wires, None, None)


def substitute_harness(outer: Harness, harnesses: Sequence[Harness]) -> Harness:
    """Flatten: replace instances inside ``outer`` by harnesses implementing them."""
    b = Builder()
    subs = []
    for inst in outer.network.instances:
        h = next((h for h in harnesses if implements(h, inst.gadget)), None)
        subs.append(h)
        if h is not None:
            b.place(h, inst.state)
        else:
            b.add(inst.gadget, inst.state)
    parts = b.parts

    def nodes(n):
        return parts[n[0]].nodes(n[1])

    for a, c in outer.network.wires:
        for x in nodes(a):
            for y in nodes(c):
                b.wire(x, y)
    in_ports = {p: nodes(n)[0] for p, n in outer.in_ports.items()}
    out_ports = {p: nodes(n)[-1] for p, n in outer.out_ports.items()}

    def dec(part_states):
        return outer.decode(tuple(part_states))

    return b.harness(outer.name, outer.target, in_ports, out_ports, dec,
                     {ts: vec for ts, vec in outer.init.items()})
