"""One-player motion planning: exact search and switching-flow certificates.

A flow counts how often each transition is used.  For single-input gadgets a
flow that balances at every component and is Eulerian inside every gadget is
as good as a path (and every path yields such a flow).
"""
from __future__ import annotations

from collections import Counter, defaultdict, deque
from typing import Iterable, Mapping, NamedTuple, Sequence

from .gadgets import Transition
from .systems import Move, System, SystemError_

DEFAULT_MAX_CONFIGS = 10**6

Path = list  # list[Move]
Flow = Counter  # Counter[(instance, Transition)] -> count


class StateSpaceExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"more than {cap} configurations")
        self.cap = cap


class FlowError(ValueError):
    pass


class FlowVerdict(NamedTuple):
    accepted: bool
    reason: str

    def __bool__(self):
        return self.accepted


def _check_io(sys: System) -> None:
    for i, inst in enumerate(sys.instances):
        errs = inst.gadget.io_violations()
        if errs:
            raise SystemError_(f"instance {i} ({inst.gadget.name}) is not input/output: {errs[0]}")


def solve_one_player(sys: System, max_configs: int = DEFAULT_MAX_CONFIGS) -> Path | None:
    """Shortest move sequence from start to goal, or ``None``.

    Breadth-first over (state vector, robot component); moves are tried in
    (instance, declaration) order, so the first path found is the
    lexicographically smallest among the shortest.
    """
    _check_io(sys)
    start = (sys.initial_states, sys.start_comp)
    if sys.start_comp == sys.goal_comp:
        return []
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        cfg = queue.popleft()
        states, comp = cfg
        for mv, nxt in sys.moves(states, comp):
            ns = list(states)
            ns[mv.instance] = mv.transition.to_state
            ncfg = (tuple(ns), nxt)
            if ncfg in parent:
                continue
            parent[ncfg] = (cfg, mv)
            if nxt == sys.goal_comp:
                path = []
                while parent[ncfg] is not None:
                    ncfg, m = parent[ncfg]
                    path.append(m)
                return path[::-1]
            if len(parent) > max_configs:
                raise StateSpaceExceeded(max_configs)
            queue.append(ncfg)
    return None


def replay(sys: System, path: Iterable[Move]) -> tuple[tuple[str, ...], int]:
    """Apply ``path`` from the initial configuration; raise if a move is illegal."""
    states = list(sys.initial_states)
    comp = sys.start_comp
    for n, mv in enumerate(path):
        i, t = mv
        g = sys.instances[i].gadget
        if sys.comp_of[(i, t.in_loc)] != comp:
            raise SystemError_(f"move {n}: robot is not at {t.in_loc} of instance {i}")
        if t not in g.moves(states[i], t.in_loc):
            raise SystemError_(f"move {n}: {tuple(t)} is not available in state {states[i]}")
        states[i] = t.to_state
        comp = sys.comp_of[(i, t.out_loc)]
    return tuple(states), comp


def reaches_goal(sys: System, path: Sequence[Move]) -> bool:
    return replay(sys, path)[1] == sys.goal_comp


def extract_flow(sys: System, path: Iterable[Move]) -> Flow:
    path = list(path)
    replay(sys, path)
    return Counter((mv.instance, mv.transition) for mv in path)


def _require_single_input(sys: System) -> None:
    _check_io(sys)
    for i, inst in enumerate(sys.instances):
        if len(inst.gadget.inputs) != 1:
            raise FlowError(f"instance {i} ({inst.gadget.name}) has {len(inst.gadget.inputs)} "
                            "inputs; flows are only defined for single-input gadgets")


def verify_flow(sys: System, flow: Mapping[tuple[int, Transition], int]) -> FlowVerdict:
    """Check component balance and per-gadget Euler realizability."""
    _require_single_input(sys)
    by_instance: dict[int, dict[Transition, int]] = defaultdict(dict)
    for key, count in flow.items():
        i, t = key
        t = Transition(*t)
        if not 0 <= i < len(sys.instances) or t not in sys.instances[i].gadget.transitions:
            raise FlowError(f"flow mentions unknown transition {tuple(t)} of instance {i}")
        if count < 0:
            return FlowVerdict(False, f"negative count on {tuple(t)} of instance {i}")
        if count:
            by_instance[i][t] = by_instance[i].get(t, 0) + count

    balance = [0] * len(sys.components)
    for i, ts in by_instance.items():
        for t, c in ts.items():
            balance[sys.comp_of[(i, t.in_loc)]] += c
            balance[sys.comp_of[(i, t.out_loc)]] -= c
    for comp, b in enumerate(balance):
        want = 0
        if sys.start_comp != sys.goal_comp:
            want = (comp == sys.start_comp) - (comp == sys.goal_comp)
        if b != want:
            return FlowVerdict(False, f"component {comp} has balance {b}, expected {want}")

    for i, ts in sorted(by_instance.items()):
        reason = _euler_reason(sys.instances[i].state, ts)
        if reason:
            return FlowVerdict(False, f"instance {i}: {reason}")
    return FlowVerdict(True, "ok")


def _euler_reason(initial: str, edges: Mapping[Transition, int]) -> str | None:
    """Why the state multigraph has no trail from ``initial`` using each edge f times."""
    out_deg: Counter = Counter()
    in_deg: Counter = Counter()
    adj: dict[str, set[str]] = defaultdict(set)
    for t, c in edges.items():
        out_deg[t.from_state] += c
        in_deg[t.to_state] += c
        adj[t.from_state].add(t.to_state)
        adj[t.to_state].add(t.from_state)
    for s in set(out_deg) | set(in_deg):
        d = out_deg[s] - in_deg[s]
        if d == 0:
            continue
        if s == initial and d == 1:
            continue
        if s != initial and d == -1 and out_deg[initial] - in_deg[initial] == 1:
            continue
        return f"state {s} has out-in degree {d}"
    seen = {initial}
    stack = [initial]
    while stack:
        for n in adj[stack.pop()]:
            if n not in seen:
                seen.add(n)
                stack.append(n)
    missing = set(adj) - seen
    if missing:
        return f"used transitions at {sorted(missing)} are not connected to the initial state"
    return None


def euler_sequence(initial: str, edges: Mapping[Transition, int]) -> list[Transition]:
    """A trail from ``initial`` using each transition exactly its count (Hierholzer)."""
    remaining = {t: c for t, c in edges.items() if c}
    out: dict[str, list[Transition]] = defaultdict(list)
    for t in sorted(remaining, key=tuple):
        out[t.from_state].append(t)
    stack: list[tuple[str, Transition | None]] = [(initial, None)]
    trail: list[Transition] = []
    while stack:
        s, via = stack[-1]
        nxt = None
        for t in out[s]:
            if remaining[t]:
                nxt = t
                break
        if nxt is None:
            stack.pop()
            if via is not None:
                trail.append(via)
        else:
            remaining[nxt] -= 1
            stack.append((nxt.to_state, nxt))
    trail.reverse()
    if any(remaining.values()):
        raise FlowError("transitions are not reachable from the initial state")
    return trail


def greedy_replay(sys: System, flow: Mapping[tuple[int, Transition], int]) -> Path | None:
    """Turn an accepted flow back into a path.

    Each gadget gets a fixed traversal order from an Euler trail; whenever the
    robot stands in a component it enters the lowest-index gadget that still has
    traversals left there.  Returns the path if it reaches the goal.
    """
    per: dict[int, dict[Transition, int]] = defaultdict(dict)
    for (i, t), c in flow.items():
        if c:
            per[i][Transition(*t)] = per[i].get(Transition(*t), 0) + c
    queues = {i: deque(euler_sequence(sys.instances[i].state, ts)) for i, ts in per.items()}
    states = list(sys.initial_states)
    comp = sys.start_comp
    path: Path = []
    while comp != sys.goal_comp:
        choice = None
        for i, loc in sorted(sys.entries[comp]):
            q = queues.get(i)
            if q and q[0].in_loc == loc and q[0].from_state == states[i]:
                choice = i
                break
        if choice is None:
            return None
        t = queues[choice].popleft()
        path.append(Move(choice, t))
        states[choice] = t.to_state
        comp = sys.comp_of[(choice, t.out_loc)]
    return path
