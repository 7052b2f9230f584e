"""Systems of gadgets, configurations, and the zero-player simulator.

Locations joined by the connection graph are contracted into components; the
robot's position is always a component id.  Two marker nodes, ``"start"`` and
``"goal"``, live in the connection graph next to the gadget locations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

from .gadgets import Gadget, GadgetError, Transition

Node = Union[tuple, str]
START, GOAL = "start", "goal"
AT_GOAL, STUCK = "goal", "stuck"
DEFAULT_MAX_STEPS = 10**7


class SystemError_(ValueError):
    pass


class Timeout(RuntimeError):
    def __init__(self, max_steps: int):
        super().__init__(f"no decision within {max_steps} steps")
        self.max_steps = max_steps


class Instance(NamedTuple):
    gadget: Gadget
    state: str


def _node(n) -> Node:
    if type(n) is tuple and type(n[0]) is int and type(n[1]) is str:
        return n
    if isinstance(n, str):
        return n
    i, loc = n
    return (int(i), str(loc))


class Network:
    """Gadget instances plus an undirected connection graph, contracted to components."""

    def __init__(self, instances: Sequence, wires: Iterable, markers: Sequence[str] = ()):
        self.instances = tuple(inst if type(inst) is Instance else Instance(*inst)
                               for inst in instances)
        self.wires = tuple((_node(a), _node(b)) for a, b in wires)
        self.markers = tuple(markers)
        for idx, (g, s) in enumerate(self.instances):
            if s not in g.states:
                raise SystemError_(f"instance {idx}: {s!r} is not a state of {g.name}")
        nodes: list[Node] = [(i, loc) for i, inst in enumerate(self.instances)
                             for loc in inst.gadget.locations]
        nodes += self.markers
        parent = {n: n for n in nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = x = parent[parent[x]]
            return x

        for a, b in self.wires:
            if a not in parent or b not in parent:
                bad = a if a not in parent else b
                raise SystemError_(f"wire endpoint {bad!r} is not a location of any instance")
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
        ids: dict[Node, int] = {}
        components: list[list[Node]] = []
        comp_of: dict[Node, int] = {}
        for n in nodes:
            r = find(n)
            c = ids.get(r)
            if c is None:
                c = ids[r] = len(components)
                components.append([])
            components[c].append(n)
            comp_of[n] = c
        self.components, self.comp_of = components, comp_of
        self.entries: list[list[tuple[int, str]]] = [[] for _ in components]
        for i, inst in enumerate(self.instances):
            for loc in inst.gadget.entrances:
                self.entries[comp_of[(i, loc)]].append((i, loc))

    @property
    def initial_states(self) -> tuple[str, ...]:
        return tuple(inst.state for inst in self.instances)

    def comp(self, node) -> int:
        return self.comp_of[_node(node)]

    def moves(self, states: Sequence[str], comp: int) -> Iterator[tuple["Move", int]]:
        """All traversals available from ``comp``, ordered by (instance, declaration order)."""
        for i, loc in sorted(self.entries[comp], key=lambda e: e[0]):
            g = self.instances[i].gadget
            for t in g.moves(states[i], loc):
                yield Move(i, t), self.comp_of[(i, t.out_loc)]

    def branch_violations(self) -> list["Violation"]:
        out = []
        for c, ents in enumerate(self.entries):
            if len(ents) > 1:
                out.append(Violation("branchless", c, f"component {c} has entrances {sorted(ents)}"))
        return out

    def compile_tables(self):
        """Per component: ``None`` (no entrance) or ``(instance, table)`` with
        ``table[state_index] = (next_state_index, next_component)`` (``None`` if blocked).

        Only meaningful when every component has at most one entrance and every
        gadget is deterministic.
        """
        index = [{s: k for k, s in enumerate(inst.gadget.states)} for inst in self.instances]
        out = []
        for ents in self.entries:
            if not ents:
                out.append(None)
                continue
            i, loc = ents[0]
            g = self.instances[i].gadget
            tab = []
            for s in g.states:
                mv = g.moves(s, loc)
                tab.append((index[i][mv[0].to_state], self.comp_of[(i, mv[0].out_loc)]) if mv else None)
            out.append((i, tab))
        return out, index


class Move(NamedTuple):
    instance: int
    transition: Transition


class Violation(NamedTuple):
    kind: str  # "branchless" | "nondeterministic" | "not-input-output"
    where: int  # component or instance index
    detail: str


class Configuration(NamedTuple):
    states: tuple[str, ...]
    robot: Union[int, str]  # component id, AT_GOAL or STUCK


@dataclass(frozen=True)
class RunOutcome:
    kind: str  # "goal" | "stuck" | "cycle"
    steps: int = 0
    prefix: int = 0
    cycle: int = 0

    @property
    def reached_goal(self) -> bool:
        return self.kind == "goal"

    def to_json(self) -> dict:
        if self.kind == "cycle":
            return {"outcome": "cycle", "prefix": self.prefix, "cycle": self.cycle}
        return {"outcome": self.kind, "steps": self.steps}


class System(Network):
    """A network with start and goal markers."""

    def __init__(self, instances, wires, start: Node | None = None, goal: Node | None = None):
        wires = list(wires)
        if start is not None and start != START:
            wires.append((START, start))
        if goal is not None and goal != GOAL:
            wires.append((GOAL, goal))
        super().__init__(instances, wires, markers=(START, GOAL))
        self.start, self.goal = start, goal
        self.start_comp = self.comp_of[START]
        self.goal_comp = self.comp_of[GOAL]

    def initial(self) -> Configuration:
        return Configuration(self.initial_states, self.start_comp)

    def with_states(self, states: Sequence[str]) -> "System":
        insts = [Instance(inst.gadget, s) for inst, s in zip(self.instances, states)]
        return System(insts, self.wires, None, None)


def validate_zero_player(sys: Network) -> list[Violation]:
    out = []
    checked: dict[int, tuple] = {}
    for i, inst in enumerate(sys.instances):
        g = inst.gadget
        if id(g) not in checked:
            checked[id(g)] = (g.io_violations(), g.is_deterministic)
        errs, det = checked[id(g)]
        if errs:
            out.append(Violation("not-input-output", i, f"{g.name}: {errs[0]}"))
        if not det:
            out.append(Violation("nondeterministic", i, f"{g.name} is nondeterministic"))
    return out + sys.branch_violations()


def _require_zero_player(sys: Network) -> None:
    v = validate_zero_player(sys)
    if v:
        raise SystemError_(f"not a zero-player system: {v[0].detail}")


def step(sys: System, c: Configuration) -> Configuration:
    """One move of the unique robot trajectory."""
    if c.robot in (AT_GOAL, STUCK):
        return c
    if c.robot == sys.goal_comp:
        return Configuration(c.states, AT_GOAL)
    ents = sys.entries[c.robot]
    if not ents:
        return Configuration(c.states, STUCK)
    if len(ents) > 1:
        raise SystemError_(f"component {c.robot} is not branchless")
    i, loc = ents[0]
    mv = sys.instances[i].gadget.moves(c.states[i], loc)
    if len(mv) != 1:
        if not mv:
            return Configuration(c.states, STUCK)
        raise SystemError_(f"instance {i} is nondeterministic")
    t = mv[0]
    states = list(c.states)
    states[i] = t.to_state
    return Configuration(tuple(states), sys.comp_of[(i, t.out_loc)])


def _simulate(entry, goal: int, states: list[int], comp: int, max_steps: int):
    """Run the compiled system; Brent cycle detection with an O(1) mismatch counter.

    Returns (kind, steps, cycle_length, final_component) with kind "goal",
    "stuck" or "cycle".  ``states`` is mutated.
    """
    saved = states[:]
    saved_c = comp
    diff = 0
    power = lam = 1
    steps = 0
    while True:
        if comp == goal:
            return "goal", steps, 0, comp
        e = entry[comp]
        if e is None:
            return "stuck", steps, 0, comp
        i, tab = e
        s = states[i]
        nxt = tab[s]
        if nxt is None:
            return "stuck", steps, 0, comp
        ns, comp = nxt
        if ns != s:
            sv = saved[i]
            if s == sv:
                diff += 1
            elif ns == sv:
                diff -= 1
            states[i] = ns
        steps += 1
        if diff == 0 and comp == saved_c:
            return "cycle", steps, lam, comp
        if steps >= max_steps:
            raise Timeout(max_steps)
        if lam == power:
            saved = states[:]
            saved_c = comp
            power *= 2
            lam = 0
            diff = 0
        lam += 1


def _cycle_start(entry, states0: list[int], comp0: int, lam: int) -> int:
    a, ca = states0[:], comp0
    b, cb = states0[:], comp0
    for _ in range(lam):
        i, tab = entry[cb]
        b[i], cb = tab[b[i]]
    diff = sum(x != y for x, y in zip(a, b))
    mu = 0
    while diff or ca != cb:
        i, tab = entry[ca]
        before = a[i] != b[i]
        a[i], ca = tab[a[i]]
        diff += (a[i] != b[i]) - before
        j, tab = entry[cb]
        before = a[j] != b[j]
        b[j], cb = tab[b[j]]
        diff += (a[j] != b[j]) - before
        mu += 1
    return mu


def run_compiled(net: Network, entry, index, states: Sequence[str], comp: int, goal: int,
                 max_steps: int = DEFAULT_MAX_STEPS) -> RunOutcome:
    start = [index[i][s] for i, s in enumerate(states)]
    kind, steps, lam, _ = _simulate(entry, goal, start[:], comp, max_steps)
    if kind != "cycle":
        return RunOutcome(kind, steps)
    mu = _cycle_start(entry, start, comp, lam)
    return RunOutcome("cycle", prefix=mu, cycle=lam)


def run_zero_player(sys: System, max_steps: int | None = DEFAULT_MAX_STEPS) -> RunOutcome:
    """Follow the unique trajectory until goal, dead end, or a repeated configuration."""
    _require_zero_player(sys)
    entry, index = sys.compile_tables()
    limit = DEFAULT_MAX_STEPS if max_steps is None else max_steps
    return run_compiled(sys, entry, index, sys.initial_states, sys.start_comp, sys.goal_comp, limit)


def state_change_bound(g: Gadget) -> int | None:
    """Longest chain of state changes, or ``None`` if the gadget can change state forever."""
    succ: dict[str, set[str]] = {s: set() for s in g.states}
    for t in g.transitions:
        if t.to_state != t.from_state:
            succ[t.from_state].add(t.to_state)
    memo: dict[str, int] = {}
    visiting: set[str] = set()

    def longest(s):
        if s in memo:
            return memo[s]
        if s in visiting:
            raise _Cyclic
        visiting.add(s)
        memo[s] = max((1 + longest(n) for n in succ[s]), default=0)
        visiting.discard(s)
        return memo[s]

    try:
        return max(longest(s) for s in g.states)
    except _Cyclic:
        return None


class _Cyclic(Exception):
    pass


def bounded_horizon(sys: Network, k: int | None = None) -> tuple[int, int, int]:
    """(k, n, k*n*n + n), with n counted in gadget input locations."""
    needed = 0
    for i, inst in enumerate(sys.instances):
        b = state_change_bound(inst.gadget)
        if b is None:
            raise GadgetError(f"instance {i} ({inst.gadget.name}) is not bounded")
        needed = max(needed, b)
    if k is None:
        k = needed
    elif k < needed:
        raise GadgetError(f"bound k={k} is below the gadgets' state-change bound {needed}")
    n = sum(len(inst.gadget.entrances) for inst in sys.instances)
    return k, n, k * n * n + n


def decide_bounded(sys: System, k: int | None = None) -> RunOutcome:
    """Polynomial-time decision for bounded gadgets: simulate for k*n^2 + n steps.

    Past the horizon no state can change any more, so the robot is on a cycle
    through at most every component once; the cycle is then measured exactly.
    """
    _require_zero_player(sys)
    k, n, horizon = bounded_horizon(sys, k)
    entry, index = sys.compile_tables()
    states = [index[i][s] for i, s in enumerate(sys.initial_states)]
    comp = sys.start_comp
    for steps in range(horizon + 1):
        if comp == sys.goal_comp:
            return RunOutcome("goal", steps)
        e = entry[comp]
        if e is None or e[1][states[e[0]]] is None:
            return RunOutcome("stuck", steps)
        i, tab = e
        states[i], comp = tab[states[i]]
    # cycle without state changes from here on; measure it exactly
    limit = 2 * (horizon + len(sys.components)) + 4
    try:
        out = run_compiled(sys, entry, index, sys.initial_states, sys.start_comp,
                           sys.goal_comp, limit)
    except Timeout:
        raise AssertionError("bounded horizon exceeded; the gadgets are not bounded by k")
    if out.kind != "cycle":
        raise AssertionError("robot resolved after the bounded horizon")
    return out
