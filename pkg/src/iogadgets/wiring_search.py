"""Lazy depth-first search for harness wirings.

Every free source (an in-port or a gadget exit) must be wired to one sink (a
gadget entrance or an out-port).  Wires are only chosen when the robot first
reaches an unwired source, so the search only branches where it matters.
The result is a wiring that passes the same Mealy check as ``check_simulation``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

from .gadgets import Gadget


@dataclass(frozen=True)
class Port:
    name: str


class _Need(Exception):
    def __init__(self, source):
        self.source = source


class _Reject(Exception):
    pass


@dataclass
class SearchProblem:
    target: Gadget
    parts: Sequence[tuple[Gadget, str]]
    in_ports: Sequence[str]
    out_ports: Sequence[str]
    decode: Callable[[tuple], "str | None"]
    init: Mapping[str, tuple]
    fixed: Mapping = None
    sources: Sequence = None
    sinks: Sequence = None
    step_cap: int = 200

    def __post_init__(self):
        self.fixed = dict(self.fixed or {})
        if self.sources is None:
            srcs = [Port(p) for p in self.in_ports]
            for i, (g, _) in enumerate(self.parts):
                srcs += [(i, l) for l in g.outputs]
            self.sources = [s for s in srcs if s not in self.fixed]
        if self.sinks is None:
            sinks = [(i, l) for i, (g, _) in enumerate(self.parts) for l in g.inputs]
            self.sinks = sinks + [Port(p) for p in self.out_ports]


def _run(prob: SearchProblem, wiring: dict, vec: tuple, port: str):
    states = list(vec)
    node = Port(port)
    for _ in range(prob.step_cap):
        if node in prob.fixed:
            dest = prob.fixed[node]
        elif node in wiring:
            dest = wiring[node]
        else:
            raise _Need(node)
        if dest is None:
            raise _Reject
        if isinstance(dest, Port):
            return dest.name, tuple(states)
        i, loc = dest
        g = prob.parts[i][0]
        (t,) = g.moves(states[i], loc)
        states[i] = t.to_state
        node = (i, t.out_loc)
    raise _Reject


def _check(prob: SearchProblem, wiring: dict) -> None:
    seen = set(prob.init.values())
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        ts = prob.decode(v)
        if ts is None:
            raise _Reject
        for p in prob.in_ports:
            (t,) = prob.target.moves(ts, p)
            out, nv = _run(prob, wiring, v, p)
            if out != t.out_loc or prob.decode(nv) != t.to_state:
                raise _Reject
            if nv not in seen:
                seen.add(nv)
                queue.append(nv)


def search(prob: SearchProblem, limit: int | None = 1) -> Iterator[dict]:
    """Yield wirings (source -> sink) that simulate the target."""
    found = 0
    stack = [{}]
    while stack:
        wiring = stack.pop()
        try:
            _check(prob, wiring)
        except _Need as need:
            for sink in reversed(list(prob.sinks) + [None]):
                w = dict(wiring)
                w[need.source] = sink
                stack.append(w)
            continue
        except _Reject:
            continue
        yield wiring
        found += 1
        if limit is not None and found >= limit:
            return
