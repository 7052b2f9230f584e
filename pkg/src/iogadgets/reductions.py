"""Compilers from classical decision problems to gadget systems, with oracles.

Every compiler returns a :class:`System` (or :class:`LabeledSystem`) whose game
outcome equals the answer to the source problem; every problem type also has a
direct evaluator used as an independent oracle in the tests.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .gadgets import builtin
from .harness import Builder
from .simulations import _dup_wsusd
from .systems import GOAL, System
from .twoplayer import BLACK, WHITE, LabeledSystem


class ReductionError(ValueError):
    pass


# -- reachability -------------------------------------------------------------------------


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    s: int
    t: int

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ReductionError(f"edge ({u}, {v}) out of range")
        if not (0 <= self.s < self.n and 0 <= self.t < self.n):
            raise ReductionError("s or t out of range")

    def successors(self, v: int) -> list[int]:
        return [b for a, b in self.edges if a == v]


def reachable(g: Digraph) -> bool:
    seen = {g.s}
    queue = deque([g.s])
    adj: dict[int, list[int]] = {}
    for u, v in g.edges:
        adj.setdefault(u, []).append(v)
    while queue:
        u = queue.popleft()
        if u == g.t:
            return True
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def normalize_out_degree(g: Digraph) -> tuple[list, dict, object, object]:
    """Rewrite ``g`` so every vertex other than ``t`` has exactly two out-edges.

    High out-degree vertices become chains, out-degree-1 vertices are bypassed,
    and vertices with nowhere to go (out-degree 0, or trapped on a cycle of
    out-degree-1 vertices) loop to themselves twice.  Returns
    (vertices, successor pairs, s', t'); vertex names are tuples.
    """
    succ: dict[tuple, list[tuple]] = {}
    for v in range(g.n):
        outs = g.successors(v)
        if len(outs) <= 2:
            succ[(v, 0)] = [(u, 0) for u in outs]
        else:
            for i, u in enumerate(outs):
                nxt = [(u, 0)] + ([(v, i + 1)] if i + 1 < len(outs) else [])
                succ[(v, i)] = nxt
    t = (g.t, 0)

    @lru_cache(maxsize=None)
    def resolve(v):
        # follow out-degree-1 vertices; a pure cycle of them collapses onto its smallest member
        path, cur = [], v
        while cur != t and len(succ[cur]) == 1:
            if cur in path:
                return min(path[path.index(cur):])
            path.append(cur)
            cur = succ[cur][0]
        return cur

    pairs: dict[tuple, tuple] = {}
    for v in succ:
        r = resolve(v)
        if r in pairs:
            continue
        if r == t:
            pairs[r] = (r, r)
        elif len(succ[r]) == 2:
            pairs[r] = tuple(resolve(u) for u in succ[r])
        else:
            pairs[r] = (r, r)
    # every successor is itself a resolved vertex, so it already has a pair
    vertices = sorted(pairs)
    return vertices, pairs, resolve((g.s, 0)), t


def compile_reachability(g: Digraph) -> System:
    """A grid of toggle switches ``(v, i)`` that counts path length up to ``|V'|``."""
    vertices, pairs, s, t = normalize_out_degree(g)
    n = len(vertices)
    ts = builtin("toggle-switch")
    col = {v: k for k, v in enumerate(vertices)}
    idx = lambda v, i: (i - 1) * n + col[v]  # noqa: E731
    instances = [(ts, "up")] * (n * n)
    wires = []
    for i in range(1, n + 1):
        for v in vertices:
            here = idx(v, i)
            if v == t:
                wires += [((here, "top1"), GOAL), ((here, "bottom1"), GOAL)]
                continue
            for exit_, u in zip(("top1", "bottom1"), pairs[v]):
                dest = idx(u, i + 1) if i < n else idx(s, 1)
                wires.append(((here, exit_), (dest, "in1")))
    return System(instances, wires, (idx(s, 1), "in1"), None)


# -- NOR circuits ----------------------------------------------------------------------------


@dataclass
class NorCircuit:
    inputs: dict[str, bool]
    gates: list[tuple[str, str, str]]  # (name, left, right), topologically ordered
    output: str

    def __post_init__(self):
        known = set(self.inputs)
        for name, a, c in self.gates:
            for w in (a, c):
                if w not in known:
                    raise ReductionError(f"gate {name} reads undriven wire {w!r}")
            if name in known:
                raise ReductionError(f"wire {name!r} is driven twice")
            known.add(name)
        if self.output not in known:
            raise ReductionError(f"output wire {self.output!r} is not driven")

    def evaluate(self) -> bool:
        val = dict(self.inputs)
        for name, a, c in self.gates:
            val[name] = not (val[a] or val[c])
        return val[self.output]


NOR_FLAVORS = {"switch+set-up-line": "switch+set-up-line",
               "set-up-switch+set-up-line": "set-up-switch+set-up-line"}


def compile_nor(c: NorCircuit, flavor: str = "switch+set-up-line") -> System:
    """One gadget per consumed wire (gate input or final output), evaluated gate by gate."""
    if flavor not in NOR_FLAVORS:
        raise ReductionError(f"unknown flavor {flavor!r}")
    g = builtin(NOR_FLAVORS[flavor])
    b = Builder()
    consumers: dict[str, list] = {}

    def consumer(wire):
        part = b.add(g, "up" if c.inputs.get(wire, False) else "down")
        consumers.setdefault(wire, []).append(part)
        return part

    reads = [(name, consumer(a), consumer(d)) for name, a, d in c.gates]
    final = consumer(c.output)
    entry = None
    prev_exits: list = []
    for name, x, y in reads:
        if entry is None:
            entry = x["in1"]
        for node in prev_exits:
            b.wire(node, x["in1"])
        b.wire(x["bottom1"], y["in1"])
        exits = [x["top1"], y["top1"]]
        node = y["bottom1"]
        for out in consumers.get(name, []):
            b.wire(node, out["in2"])
            node = out["out2"]
        exits.append(node)
        prev_exits = exits
    if entry is None:
        entry = final["in1"]
    for node in prev_exits:
        b.wire(node, final["in1"])
    return b.system(entry, final["top1"])


# -- QBF -----------------------------------------------------------------------------------


@dataclass
class Qbf:
    prefix: list[tuple[str, int]]  # ("A" | "E", variable), outermost first
    clauses: list[tuple[int, ...]]  # DIMACS-style signed literals

    def __post_init__(self):
        self.prefix = [(q.upper(), int(v)) for q, v in self.prefix]
        self.clauses = [tuple(int(l) for l in cl) for cl in self.clauses]
        seen = set()
        for q, v in self.prefix:
            if q not in ("A", "E"):
                raise ReductionError(f"unknown quantifier {q!r}")
            if v <= 0 or v in seen:
                raise ReductionError(f"bad or repeated variable {v}")
            seen.add(v)
        for cl in self.clauses:
            if len(cl) > 3:
                raise ReductionError(f"clause {cl} has more than 3 literals")
            for l in cl:
                if l == 0 or abs(l) not in seen:
                    raise ReductionError(f"literal {l} is not quantified")

    def evaluate(self) -> bool:
        def go(k, assign):
            if k == len(self.prefix):
                return all(any(assign[abs(l)] == (l > 0) for l in cl) for cl in self.clauses)
            q, v = self.prefix[k]
            vals = (go(k + 1, {**assign, v: val}) for val in (True, False))
            return all(vals) if q == "A" else any(vals)
        return go(0, {})


DEFAULT_QBF_CAPS = (12, 40)


def compile_qbf(q: Qbf, max_vars: int = DEFAULT_QBF_CAPS[0],
                max_clauses: int = DEFAULT_QBF_CAPS[1]) -> System:
    """Quantifier gadgets in series followed by a row of switches per clause.

    A variable is true while its gadgets are up.  Returning to True-In or
    False-In of a quantifier reports the value of the rest of the formula.
    """
    if len(q.prefix) > max_vars or len(q.clauses) > max_clauses:
        raise ReductionError(f"formula exceeds caps ({max_vars} variables, {max_clauses} clauses)")
    w = builtin("switch+set-up-line+set-down-line")
    b = Builder()
    occurrences = {v: 0 for _, v in q.prefix}
    for cl in q.clauses:
        for l in cl:
            occurrences[abs(l)] += 1
    quants = []
    chains = {}
    for kind, v in q.prefix:
        gs = [b.add(w, "up") for _ in range(max(1, occurrences[v]))]
        chains[v] = gs
        for a, c in zip(gs, gs[1:]):
            b.wire(a["out2"], c["in2"])
            b.wire(a["out3"], c["in3"])
        flag = b.add(w, "down")
        (sd1_in, sd1_out), (sd2_in, sd2_out) = _dup_wsusd(b, (flag["in3"], flag["out3"]))
        b.wire(flag["bottom1"], flag["in2"])
        b.wire(flag["out2"], gs[0]["in3"])
        b.wire(flag["top1"], sd1_in)
        b.join(gs[-1]["out2"], gs[-1]["out3"])
        ports = {"in": gs[0]["in2"], "out": gs[-1]["out2"],
                 "again": flag["in1"], "again_out": sd1_out,
                 "stop": sd2_in, "stop_out": sd2_out}
        if kind == "A":
            ports.update(true_in=ports["again"], true_out=ports["again_out"],
                         false_in=ports["stop"], false_out=ports["stop_out"])
        else:
            ports.update(false_in=ports["again"], false_out=ports["again_out"],
                         true_in=ports["stop"], true_out=ports["stop_out"])
        quants.append(ports)

    for a, c in zip(quants, quants[1:]):
        b.wire(a["out"], c["in"])
        b.wire(c["true_out"], a["true_in"])
        b.wire(c["false_out"], a["false_in"])
    true_target = quants[-1]["true_in"] if quants else GOAL
    false_target = quants[-1]["false_in"] if quants else None

    used = {v: 0 for v in chains}
    rows = []
    for cl in q.clauses:
        row = []
        for l in cl:
            g = chains[abs(l)][used[abs(l)]]
            used[abs(l)] += 1
            row.append((l, g))
        rows.append(row)
    nxt = true_target
    for row in reversed(rows):
        if not row:
            nxt = false_target
            continue
        fail = false_target
        for l, g in reversed(row):
            yes, no = ("top1", "bottom1") if l > 0 else ("bottom1", "top1")
            if nxt is not None:
                b.wire(g[yes], nxt)
            if fail is not None:
                b.wire(g[no], fail)
            fail = g["in1"]
        nxt = row[0][1]["in1"]
    cnf_entry = nxt
    if quants:
        if cnf_entry is not None:
            b.wire(quants[-1]["out"], cnf_entry)
        return b.system(quants[0]["in"], quants[0]["true_out"])
    if cnf_entry is None:
        # an empty clause with no variables: start in a dead end
        return b.system(None, None)
    return b.system(cnf_entry, None)


# -- 3SAT ------------------------------------------------------------------------------------


def satisfiable(n_vars: int, clauses: Sequence[Sequence[int]]) -> bool:
    for bits in itertools.product((True, False), repeat=n_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in clauses):
            return True
    return False


SAT_FLAVORS = {"set-switch": "set-down-switch", "toggle-switch": "toggle-switch"}


def _fork(b: Builder, targets: list) -> object:
    """A node from which the player can reach any of ``targets`` (via branching hallways)."""
    if len(targets) == 1:
        return targets[0]
    h = b.add(builtin("branching-hallway"))
    b.wire(h["top1"], targets[0])
    b.wire(h["bottom1"], _fork(b, targets[1:]))
    return h["in1"]


def compile_3sat(n_vars: int, clauses: Sequence[Sequence[int]], flavor: str = "set-switch") -> System:
    """Choose a path per variable, then pass every clause through a literal already used."""
    if flavor not in SAT_FLAVORS:
        raise ReductionError(f"unknown flavor {flavor!r}")
    for cl in clauses:
        if len(cl) > 3:
            raise ReductionError(f"clause {tuple(cl)} has more than 3 literals")
        for l in cl:
            if l == 0 or abs(l) > n_vars:
                raise ReductionError(f"literal {l} out of range")
    g = builtin(SAT_FLAVORS[flavor])
    b = Builder()
    lit_gadgets: dict[int, list] = {}
    for cl in clauses:
        for l in cl:
            lit_gadgets.setdefault(l, []).append(b.add(g, "up"))
    forks = []
    tunnels = []
    for v in range(1, n_vars + 1):
        tunnel = b.add(g, "up")
        ends = []
        for lit in (v, -v):
            gs = lit_gadgets.get(lit, [])
            for a, c in zip(gs, gs[1:]):
                b.wire(a["top1"], c["in1"])
            if gs:
                b.wire(gs[-1]["top1"], tunnel["in1"])
                ends.append(gs[0]["in1"])
            else:
                ends.append(tunnel["in1"])
        forks.append(_fork(b, ends))
        tunnels.append(tunnel)
    for tunnel, nxt in zip(tunnels, forks[1:]):
        b.wire(tunnel["top1"], nxt)
    used = {l: 0 for l in lit_gadgets}
    clause_entries = []
    for cl in clauses:
        gadgets = []
        for l in cl:
            gadgets.append(lit_gadgets[l][used[l]])
            used[l] += 1
        clause_entries.append((gadgets, _fork(b, [x["in1"] for x in gadgets]) if gadgets else None))
    for (gadgets, _), nxt in zip(clause_entries, clause_entries[1:] + [(None, GOAL)]):
        for x in gadgets:
            if nxt[1] is not None:
                b.wire(x["bottom1"], nxt[1])
    first_clause = clause_entries[0][1] if clause_entries else GOAL
    if tunnels and first_clause is not None:
        b.wire(tunnels[-1]["top1"], first_clause)
    start = forks[0] if forks else first_clause
    return b.system(start, None)


# -- Geography ------------------------------------------------------------------------------------


@dataclass
class Geography:
    n: int
    owners: list[str]
    edges: list[tuple[int, int]]
    start: int

    def __post_init__(self):
        self.edges = [(int(u), int(v)) for u, v in self.edges]
        if len(self.owners) != self.n:
            raise ReductionError("one owner per vertex is required")
        for o in self.owners:
            if o not in (WHITE, BLACK):
                raise ReductionError(f"unknown owner {o!r}")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ReductionError(f"edge ({u}, {v}) out of range")
        if not 0 <= self.start < self.n:
            raise ReductionError("start vertex out of range")

    def successors(self, v):
        return [b for a, b in self.edges if a == v]

    def predecessors(self, v):
        return [a for a, b in self.edges if b == v]

    def violations(self) -> list[str]:
        out = []
        if len(set(self.edges)) != len(self.edges):
            out.append("repeated edge")
        for v in range(self.n):
            i, o = len(self.predecessors(v)), len(self.successors(v))
            if i > 2 or o > 2 or i + o > 3:
                out.append(f"vertex {v} has in-degree {i} and out-degree {o}")
            if (v, v) in self.edges:
                out.append(f"vertex {v} has a self-loop")
            if i == 2:
                for p in self.predecessors(v):
                    if self.owners[p] == self.owners[v]:
                        out.append(f"vertex {v} and its predecessor {p} have the same owner")
        if self.predecessors(self.start):
            out.append("the start vertex has incoming edges")
        return out

    def winner(self) -> str:
        """Minimax: the owner of the marker's vertex moves; whoever cannot move loses."""
        succ = [self.successors(v) for v in range(self.n)]

        @lru_cache(maxsize=None)
        def white_wins(v, visited):
            options = [white_wins(u, visited | 1 << u) for u in succ[v] if not visited >> u & 1]
            if not options:
                return self.owners[v] == BLACK
            return any(options) if self.owners[v] == WHITE else all(options)

        return WHITE if white_wins(self.start, 1 << self.start) else BLACK


GEO_FLAVORS = {"set-switch": "set-down-switch", "toggle-switch": "toggle-switch"}


def compile_geography(ge: Geography, flavor: str = "set-switch") -> LabeledSystem:
    """One gadget per branching or merging vertex; the robot is the Geography marker."""
    if flavor not in GEO_FLAVORS:
        raise ReductionError(f"unknown flavor {flavor!r}")
    bad = ge.violations()
    if bad:
        raise ReductionError(f"not a valid Geography instance: {bad[0]}")
    g = builtin(GEO_FLAVORS[flavor])
    hall = builtin("branching-hallway")
    b = Builder()
    labels = []
    entry: dict[int, object] = {}
    parts = {}
    for v in range(ge.n):
        i, o = len(ge.predecessors(v)), len(ge.successors(v))
        if i == 2:
            parts[v] = b.add(g, "up")
            entry[v] = parts[v]["in1"]
        elif o == 2:
            parts[v] = b.add(hall)
            entry[v] = parts[v]["in1"]
        labels.extend([ge.owners[v]] if v in parts else [])

    def lose_node(v):
        # reaching a state where the owner of v has lost
        return GOAL if ge.owners[v] == BLACK else None

    def win_node(v):
        return GOAL if ge.owners[v] == WHITE else None

    @lru_cache(maxsize=None)
    def arrive(v):
        """Node the robot occupies when the marker moves to ``v`` for the first time."""
        if v in entry:
            return entry[v]
        outs = ge.successors(v)
        if not outs:
            return lose_node(v)
        return arrive(outs[0])

    for v, part in parts.items():
        outs = ge.successors(v)
        if part.gadget is hall:
            exits = [("top1", outs[0]), ("bottom1", outs[1])]
            for ex, u in exits:
                node = arrive(u)
                if node is not None:
                    b.wire(part[ex], node)
        else:
            node = arrive(outs[0]) if outs else lose_node(v)
            if node is not None:
                b.wire(part["top1"], node)
            node = win_node(v)
            if node is not None:
                b.wire(part["bottom1"], node)
    start = arrive(ge.start)
    return LabeledSystem(b.system(start, None), labels)


def random_geography(rng, n: int, edge_tries: int | None = None) -> Geography:
    """A random instance that meets the compiler's preconditions.

    Edges are added while degrees allow; owners are then 2-coloured along the
    edges into in-degree-2 vertices (retrying if that is impossible) and
    assigned freely elsewhere.
    """
    while True:
        edges: set[tuple[int, int]] = set()
        indeg, outdeg = [0] * n, [0] * n
        for _ in range(edge_tries if edge_tries is not None else 2 * n):
            u, v = rng.randrange(n), rng.randrange(1, n) if n > 1 else 0
            if u == v or (u, v) in edges or v == 0:
                continue
            if outdeg[u] >= 2 or indeg[v] >= 2 or outdeg[u] + indeg[u] >= 3 or outdeg[v] + indeg[v] >= 3:
                continue
            edges.add((u, v))
            indeg[v] += 1
            outdeg[u] += 1
        owners: list[str | None] = [None] * n
        diff: dict[int, list[int]] = {v: [] for v in range(n)}
        for u, v in edges:
            if indeg[v] == 2:
                diff[u].append(v)
                diff[v].append(u)
        ok = True
        for root in range(n):
            if owners[root] is not None:
                continue
            owners[root] = rng.choice((WHITE, BLACK))
            stack = [root]
            while stack and ok:
                x = stack.pop()
                for y in diff[x]:
                    want = BLACK if owners[x] == WHITE else WHITE
                    if owners[y] is None:
                        owners[y] = want
                        stack.append(y)
                    elif owners[y] != want:
                        ok = False
        if ok:
            return Geography(n, owners, sorted(edges), 0)
