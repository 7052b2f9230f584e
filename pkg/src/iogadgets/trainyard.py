"""One-train colorless Trainyard.

A network of Trainyard gadgets is wired by a partial matching of locations.
The train takes the unique transition of every gadget it enters and stops at
an unpaired location.  Counters made of these gadgets give reverse branches
that behave correctly for ``2**k`` traversals, and from those a toggle
switch/toggle line that is good for as long.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .gadgets import trainyard_gadget
from .harness import substitute
from .systems import DEFAULT_MAX_STEPS, RunOutcome, Timeout, _cycle_start, _simulate

LOCS = ("A", "B", "C")
UP, DOWN = "up", "down"
Loc = tuple  # (gadget index, "A" | "B" | "C")

GADGET = trainyard_gadget()


class TrainyardError(ValueError):
    pass


class ContractViolation(RuntimeError):
    """The train entered a location promised never to be entered (or left one never to be exited)."""


def traverse_gadget(state: str, loc: str) -> tuple[str, str]:
    """(new state, exit location) for a train entering at ``loc``."""
    flipped = DOWN if state == UP else UP
    if loc in ("A", "B"):
        return flipped, "C"
    if loc == "C":
        return flipped, "A" if state == UP else "B"
    raise TrainyardError(f"unknown location {loc!r}")


def _loc(x) -> Loc:
    i, l = x
    if l not in LOCS:
        raise TrainyardError(f"unknown location {l!r}")
    return (int(i), l)


@dataclass
class TrainyardNetwork:
    """Gadgets, a partial matching, named external ports and the usage contract.

    ``no_entry`` locations must never be entered and ``no_exit`` locations must
    never be exited; the simulator raises :class:`ContractViolation` otherwise.
    """

    states: list[str] = field(default_factory=list)
    pairs: dict[Loc, Loc] = field(default_factory=dict)
    ports: dict[str, Loc] = field(default_factory=dict)
    no_entry: set[Loc] = field(default_factory=set)
    no_exit: set[Loc] = field(default_factory=set)

    def __len__(self):
        return len(self.states)

    def add(self, state: str = UP) -> int:
        if state not in (UP, DOWN):
            raise TrainyardError(f"unknown state {state!r}")
        self.states.append(state)
        return len(self.states) - 1

    def pair(self, a: Loc, b: Loc) -> None:
        a, b = _loc(a), _loc(b)
        for x in (a, b):
            if not 0 <= x[0] < len(self.states):
                raise TrainyardError(f"location {x} refers to a missing gadget")
            if x in self.pairs:
                raise TrainyardError(f"location {x} is already paired with {self.pairs[x]}")
        if a == b:
            raise TrainyardError(f"cannot pair {a} with itself")
        self.pairs[a] = b
        self.pairs[b] = a

    def fan_in(self, sources: Sequence[Loc]) -> Loc | None:
        """Merge ``sources`` (exits) into one location with a chain of gadgets."""
        if not sources:
            return None
        out = sources[0]
        for src in sources[1:]:
            f = self.add()
            self.pair(out, (f, "A"))
            self.pair(src, (f, "B"))
            self.no_entry.add((f, "C"))
            out = (f, "C")
        return out

    def place(self, other: "TrainyardNetwork") -> dict[str, Loc]:
        """Copy ``other`` in; returns its ports shifted to the new indices."""
        off = len(self.states)
        self.states.extend(other.states)
        shift = lambda x: (x[0] + off, x[1])  # noqa: E731
        for a, b in other.pairs.items():
            self.pairs[shift(a)] = shift(b)
        self.no_entry |= {shift(x) for x in other.no_entry}
        self.no_exit |= {shift(x) for x in other.no_exit}
        return {name: shift(x) for name, x in other.ports.items()}

    def copy(self) -> "TrainyardNetwork":
        return TrainyardNetwork(list(self.states), dict(self.pairs), dict(self.ports),
                                set(self.no_entry), set(self.no_exit))

    def traverse(self, port: str, max_steps: int = DEFAULT_MAX_STEPS,
                 on_step: Callable[[Loc, Loc], None] | None = None) -> str | None:
        """Send the train in at ``port`` (mutating states); name of the exit port or ``None``."""
        here = self.ports[port]
        names = {x: n for n, x in self.ports.items()}
        for _ in range(max_steps):
            if here in self.no_entry:
                raise ContractViolation(f"entered {here}")
            i, loc = here
            self.states[i], out = traverse_gadget(self.states[i], loc)
            exit_ = (i, out)
            if exit_ in self.no_exit:
                raise ContractViolation(f"exited {exit_}")
            if on_step:
                on_step(here, exit_)
            nxt = self.pairs.get(exit_)
            if nxt is None:
                return names.get(exit_)
            here = nxt
        raise Timeout(max_steps)


@dataclass
class TrainyardSystem:
    network: TrainyardNetwork
    start: Loc
    goal: Loc | None = None

    def __post_init__(self):
        n = len(self.network)
        self.start = _loc(self.start)
        if not 0 <= self.start[0] < n:
            raise TrainyardError(f"start {self.start} refers to a missing gadget")
        if self.goal is not None:
            self.goal = _loc(self.goal)
            if not 0 <= self.goal[0] < n:
                raise TrainyardError(f"goal {self.goal} refers to a missing gadget")
            if self.goal in self.network.pairs:
                raise TrainyardError("the goal must be an unpaired location")
        for a, b in self.network.pairs.items():
            if self.network.pairs.get(b) != a:
                raise TrainyardError(f"pairing of {a} and {b} is not symmetric")


def run_trainyard(sys: TrainyardSystem, max_steps: int = DEFAULT_MAX_STEPS) -> RunOutcome:
    """Deterministic run with the same outcome kinds as zero-player systems."""
    net = sys.network
    n = len(net)
    if sys.start == sys.goal:
        return RunOutcome("goal", 0)
    pos = lambda x: 3 * x[0] + LOCS.index(x[1])  # noqa: E731
    goal, dead, broken = 3 * n, 3 * n + 1, 3 * n + 2

    def target(i, loc):
        x = (i, loc)
        if x in net.no_exit:
            return broken
        if x == sys.goal:
            return goal
        p = net.pairs.get(x)
        return dead if p is None else pos(p)

    entry: list = []
    for i in range(n):
        for loc in LOCS:
            if (i, loc) in net.no_entry:
                entry.append(None)
                continue
            tab = []
            for s in (UP, DOWN):
                ns, out = traverse_gadget(s, loc)
                tab.append((0 if ns == UP else 1, target(i, out)))
            entry.append((i, tab))
    entry += [None, None, None]
    states = [0 if s == UP else 1 for s in net.states]
    kind, steps, lam, comp = _simulate(entry, goal, states[:], pos(sys.start), max_steps)
    if kind == "stuck" and comp != dead:
        if comp == broken:
            raise ContractViolation("a location promised never to be exited was exited")
        raise ContractViolation(f"entered {(comp // 3, LOCS[comp % 3])}")
    if kind == "cycle":
        return RunOutcome("cycle", prefix=_cycle_start(entry, states, pos(sys.start), lam), cycle=lam)
    return RunOutcome(kind, steps)


# -- reverse branch counter ---------------------------------------------------------------------


def reverse_branch_network(k: int) -> TrainyardNetwork:
    """Top row ``0..k`` holds a binary counter (down = 1, gadget i is bit i), starting at ``2**k``.

    Entering ``left`` increments and leaves at ``bottomRight`` through a chain
    of ``k`` fan-ins, or at ``topRight`` if the counter wrapped to 0.  Entering
    ``topRight`` complements every bit and leaves at ``left``.
    """
    if k < 1:
        raise TrainyardError("k must be at least 1")
    net = TrainyardNetwork()
    top = [net.add(DOWN if i == k else UP) for i in range(k + 1)]
    for i in range(k):
        net.pair((top[i], "B"), (top[i + 1], "C"))
    out = net.fan_in([(t, "A") for t in top])
    net.ports = {"left": (top[0], "C"), "topRight": (top[k], "B"), "bottomRight": out}
    return net


def counter_value(states: Sequence[str], k: int, offset: int = 0) -> int:
    return sum(1 << i for i in range(k + 1) if states[offset + i] == DOWN)


def counter_distance(x: int, k: int) -> int:
    m = 1 << (k + 1)
    x %= m
    return min(x, m - x)


class IdealReverseBranch:
    """The counter model: what a reverse branch network should do."""

    def __init__(self, k: int):
        self.k = k
        self.value = 1 << k

    def traverse(self, port: str) -> str:
        m = 1 << (self.k + 1)
        if port == "left":
            self.value = (self.value + 1) % m
            return "topRight" if self.value == 0 else "bottomRight"
        if port == "topRight":
            self.value = (-self.value - 1) % m
            return "left"
        raise TrainyardError(f"{port!r} is never entered")


# -- toggle switch / toggle line -------------------------------------------------------------


def toggle_switch_toggle_line_network(k: int) -> TrainyardNetwork:
    """Middle gadget M plus two reverse branches, with ports named like the ideal gadget.

    in1 -> M.C -> top1 (M.A) or through the second branch to bottom1;
    in2 -> M.B -> M.C -> through the first branch to out2.

    Each branch is ``reverse_branch_network(k + 1)``.  The size ``k`` branch
    starts exactly ``2**k`` steps from 0, so ``2**k`` increments in a row would
    wrap it on the last one; the larger branch keeps all ``2**k`` traversals
    correct.
    """
    net = TrainyardNetwork()
    m = net.add(UP)
    rb1 = net.place(reverse_branch_network(k + 1))
    rb2 = net.place(reverse_branch_network(k + 1))
    net.pair((m, "C"), rb1["left"])
    net.pair((m, "B"), rb2["left"])
    net.no_entry.add((m, "A"))
    for rb in (rb1, rb2):
        net.no_exit.add(rb["topRight"])
    net.ports = {"in1": rb1["topRight"], "top1": (m, "A"), "bottom1": rb2["bottomRight"],
                 "in2": rb2["topRight"], "out2": rb1["bottomRight"]}
    return net


def network_counters(net: TrainyardNetwork, k: int) -> tuple[int, int]:
    """Counter values of the two reverse branches inside a toggle network."""
    size = 2 * k + 3
    return counter_value(net.states, k + 1, 1), counter_value(net.states, k + 1, 1 + size)


class IdealToggle:
    def __init__(self, state: str = UP):
        self.state = state

    def traverse(self, port: str) -> str:
        before = self.state
        self.state = DOWN if before == UP else UP
        if port == "in1":
            return "top1" if before == UP else "bottom1"
        if port == "in2":
            return "out2"
        raise TrainyardError(f"{port!r} is not an entrance")


@dataclass
class LockstepReport:
    agreed: bool
    traversals: int
    distance_ok: bool
    detail: str = ""

    def __bool__(self):
        return self.agreed and self.distance_ok


def lockstep_toggle(k: int, ports: Iterable[str]) -> LockstepReport:
    """Drive the network and the ideal gadget with the same entrances and compare."""
    net = toggle_switch_toggle_line_network(k)
    ideal = IdealToggle(net.states[0])
    before = network_counters(net, k)
    distance_ok = True
    n = 0
    for n, port in enumerate(ports, 1):
        try:
            got = net.traverse(port)
        except ContractViolation as e:
            return LockstepReport(False, n, distance_ok, f"traversal {n}: {e}")
        want = ideal.traverse(port)
        after = network_counters(net, k)
        for b, a in zip(before, after):
            if abs(counter_distance(a, k + 1) - counter_distance(b, k + 1)) > 1:
                distance_ok = False
        before = after
        if got != want or net.states[0] != ideal.state:
            return LockstepReport(False, n, distance_ok,
                                  f"traversal {n}: got {got}/{net.states[0]}, want {want}/{ideal.state}")
    return LockstepReport(True, n, distance_ok)


def lockstep_reverse_branch(k: int, ports: Iterable[str]) -> LockstepReport:
    net = reverse_branch_network(k)
    ideal = IdealReverseBranch(k)
    distance_ok = True
    n = 0
    for n, port in enumerate(ports, 1):
        before = counter_value(net.states, k)
        got = net.traverse(port)
        want = ideal.traverse(port)
        after = counter_value(net.states, k)
        if abs(counter_distance(after, k) - counter_distance(before, k)) > 1:
            distance_ok = False
        if got != want or after != ideal.value:
            return LockstepReport(False, n, distance_ok,
                                  f"traversal {n}: got {got}/{after}, want {want}/{ideal.value}")
    return LockstepReport(True, n, distance_ok)


# -- QBF through Trainyard ------------------------------------------------------------------


MAX_TRAINYARD_VARS = 3


def horizon_for(n_vars: int) -> int:
    return 2 * n_vars + 3


def from_toggle_system(sys, k: int) -> TrainyardSystem:
    """Replace each toggle switch/toggle line of a zero-player system by its Trainyard network.

    Every connection component becomes a fan-in tree from its exits to its
    single entrance (or to the goal location).
    """
    from .simulations import TWT

    net = TrainyardNetwork()
    template = toggle_switch_toggle_line_network(k)
    ports = []
    for i, inst in enumerate(sys.instances):
        if inst.gadget.name != TWT:
            raise TrainyardError(f"instance {i} is {inst.gadget.name}, not {TWT}")
        p = net.place(template)
        net.states[p["top1"][0]] = inst.state
        ports.append(p)
    outputs = {c: [] for c in range(len(sys.components))}
    for i, inst in enumerate(sys.instances):
        for loc in inst.gadget.outputs:
            outputs[sys.comp_of[(i, loc)]].append(ports[i][loc])
    goal = None
    for c, exits in outputs.items():
        ents = sys.entries[c]
        if c == sys.goal_comp:
            goal = net.fan_in(exits)
        elif ents and exits:
            i, loc = ents[0]
            merged = net.fan_in(exits)
            net.pair(merged, ports[i][loc])
    ents = sys.entries[sys.start_comp]
    if sys.start_comp == sys.goal_comp:
        # the run is over before it starts; any location will do as the start
        return TrainyardSystem(net, goal or (0, "A"), goal or (0, "A"))
    if not ents:
        raise TrainyardError("the start component has no entrance")
    i, loc = ents[0]
    return TrainyardSystem(net, ports[i][loc], goal)


def compile_qbf_to_trainyard(q, k: int | None = None) -> TrainyardSystem:
    """QBF -> switch/set-up/set-down -> toggle switch/toggle line -> Trainyard."""
    from .reductions import ReductionError, compile_qbf
    from .simulations import TWT, wsusd_from

    n = len(q.prefix)
    if n > MAX_TRAINYARD_VARS:
        raise ReductionError(f"at most {MAX_TRAINYARD_VARS} variables for Trainyard compilation")
    if n == 0:
        raise ReductionError("Trainyard compilation needs at least one quantified variable")
    base = substitute(compile_qbf(q), [wsusd_from(TWT)])
    return from_toggle_system(base, horizon_for(n) if k is None else k)
