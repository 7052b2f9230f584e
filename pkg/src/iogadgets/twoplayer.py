"""Two-player shared-robot games.

Each instance is labeled White or Black; whoever owns the gadget the robot
enters picks the transition.  White wins by reaching the goal.  Getting stuck
or moving forever counts as a Black win.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .oneplayer import DEFAULT_MAX_CONFIGS, StateSpaceExceeded
from .systems import Move, System, SystemError_

WHITE, BLACK = "White", "Black"


class LabeledSystem:
    def __init__(self, base: System, labels: Sequence[str]):
        if len(labels) != len(base.instances):
            raise SystemError_(f"{len(labels)} labels for {len(base.instances)} instances")
        for l in labels:
            if l not in (WHITE, BLACK):
                raise SystemError_(f"unknown label {l!r}")
        v = base.branch_violations()
        if v:
            raise SystemError_(f"two-player systems must be branchless: {v[0].detail}")
        for i, inst in enumerate(base.instances):
            errs = inst.gadget.io_violations()
            if errs:
                raise SystemError_(f"instance {i} ({inst.gadget.name}) is not input/output: {errs[0]}")
        self.base = base
        self.labels = tuple(labels)


Config = tuple  # (state vector, component)


@dataclass
class GameVerdict:
    winner: str
    strategy: dict = field(default_factory=dict, repr=False)
    configurations: int = 0

    def to_json(self, with_strategy: bool = False) -> dict:
        out = {"winner": self.winner, "configurations": self.configurations}
        if with_strategy:
            out["strategy"] = [
                {"states": list(c[0]), "component": c[1], "instance": m.instance,
                 "transition": {"from": [m.transition.from_state, m.transition.in_loc],
                                "to": [m.transition.to_state, m.transition.out_loc]}}
                for c, m in sorted(self.strategy.items(), key=lambda e: (e[0][1], e[0][0]))
            ]
        return out


class _Graph:
    def __init__(self, ls: LabeledSystem, cap: int):
        sys = ls.base
        self.start = (sys.initial_states, sys.start_comp)
        self.succ: dict[Config, list[tuple[Move, Config]]] = {}
        self.owner: dict[Config, str | None] = {}
        queue = deque([self.start])
        self.succ[self.start] = []
        while queue:
            cfg = queue.popleft()
            states, comp = cfg
            if comp == sys.goal_comp:
                self.owner[cfg] = None
                continue
            moves = []
            for mv, nxt in sys.moves(states, comp):
                ns = list(states)
                ns[mv.instance] = mv.transition.to_state
                ncfg = (tuple(ns), nxt)
                moves.append((mv, ncfg))
                if ncfg not in self.succ:
                    if len(self.succ) >= cap:
                        raise StateSpaceExceeded(cap)
                    self.succ[ncfg] = []
                    queue.append(ncfg)
            self.succ[cfg] = moves
            # branchless: every move from here enters the same instance
            self.owner[cfg] = ls.labels[moves[0][0].instance] if moves else BLACK
        self.goal_comp = sys.goal_comp


def _attractor(g: _Graph):
    """White's winning region with ranks (rounds needed to force the goal)."""
    pred: dict[Config, list[Config]] = {c: [] for c in g.succ}
    for c, moves in g.succ.items():
        for _, n in moves:
            pred[n].append(c)
    rank: dict[Config, int] = {}
    pending = {c: len({n for _, n in m}) for c, m in g.succ.items()}
    queue = deque()
    for c in g.succ:
        if c[1] == g.goal_comp:
            rank[c] = 0
            queue.append(c)
    while queue:
        c = queue.popleft()
        for p in set(pred[c]):
            if p in rank:
                continue
            if g.owner[p] == WHITE:
                rank[p] = rank[c] + 1
                queue.append(p)
            else:
                pending[p] -= 1
                if pending[p] == 0:
                    rank[p] = rank[c] + 1
                    queue.append(p)
    return rank


def solve_two_player(ls: LabeledSystem, max_configs: int = DEFAULT_MAX_CONFIGS) -> GameVerdict:
    g = _Graph(ls, max_configs)
    rank = _attractor(g)
    strategy = {}
    if g.start in rank:
        for c, moves in g.succ.items():
            if c in rank and g.owner.get(c) == WHITE and moves:
                best = min((rank[n], k) for k, (_, n) in enumerate(moves) if n in rank)
                strategy[c] = moves[best[1]][0]
        return GameVerdict(WHITE, strategy, len(g.succ))
    for c, moves in g.succ.items():
        if c not in rank and g.owner.get(c) == BLACK and moves:
            strategy[c] = next(m for m, n in moves if n not in rank)
    return GameVerdict(BLACK, strategy, len(g.succ))


def verify_strategy(ls: LabeledSystem, verdict: GameVerdict,
                    max_configs: int = DEFAULT_MAX_CONFIGS) -> bool:
    """Replay the winner's strategy against every opponent choice."""
    g = _Graph(ls, max_configs)
    reach = {g.start}
    queue = deque([g.start])
    edges: dict[Config, list[Config]] = {}
    while queue:
        c = queue.popleft()
        moves = g.succ[c]
        if g.owner.get(c) == verdict.winner and moves:
            mv = verdict.strategy.get(c)
            if mv is None:
                return False
            nxt = [n for m, n in moves if m == mv]
            if not nxt:
                return False
        else:
            nxt = [n for _, n in moves]
        edges[c] = nxt
        for n in nxt:
            if n not in reach:
                reach.add(n)
                queue.append(n)
    if verdict.winner == BLACK:
        return all(c[1] != g.goal_comp for c in reach)
    # White: every play ends at the goal, so the strategy graph is acyclic with goal leaves
    for c in reach:
        if not edges[c] and c[1] != g.goal_comp:
            return False
    indeg = {c: 0 for c in reach}
    for c in reach:
        for n in edges[c]:
            indeg[n] += 1
    order = [c for c in reach if indeg[c] == 0]
    seen = 0
    while order:
        c = order.pop()
        seen += 1
        for n in edges[c]:
            indeg[n] -= 1
            if indeg[n] == 0:
                order.append(n)
    return seen == len(reach)
