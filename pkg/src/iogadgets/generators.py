"""Random instances for property tests and demos.  All take a ``random.Random``."""
from __future__ import annotations

import random
from typing import Sequence

from .gadgets import Gadget, Transition, builtin
from .harness import Builder
from .reductions import Digraph, NorCircuit, Qbf, random_geography
from .systems import GOAL, System

__all__ = [
    "random_io_gadget", "random_system", "random_digraph", "random_circuit", "random_cnf",
    "random_qbf", "random_geography", "BOUNDED_GADGETS", "SINGLE_INPUT_GADGETS",
]

BOUNDED_GADGETS = ("switch", "set-up-line", "set-down-line", "set-up-switch", "set-down-switch",
                   "switch+set-up-line", "set-up-switch+set-up-line")
SINGLE_INPUT_GADGETS = ("switch", "set-up-line", "set-down-line", "toggle-line", "set-up-switch",
                        "set-down-switch", "toggle-switch", "branching-hallway")


def random_io_gadget(rng: random.Random, max_states: int = 3, max_inputs: int = 3,
                     max_outputs: int = 3) -> Gadget:
    """A deterministic input/output gadget with arbitrary (not necessarily disjoint) exits."""
    states = [f"s{i}" for i in range(rng.randint(1, max_states))]
    ins = [f"i{j}" for j in range(rng.randint(1, max_inputs))]
    outs = [f"o{j}" for j in range(rng.randint(1, max_outputs))]
    trans = [Transition(s, i, rng.choice(states), rng.choice(outs)) for s in states for i in ins]
    return Gadget("random", tuple(states), tuple(ins + outs), tuple(trans), states[0],
                  tuple(ins), tuple(outs))


def random_system(rng: random.Random, names: Sequence[str], n_instances: int,
                  p_goal: float = 0.15, p_dead: float = 0.1) -> System:
    """Instances of the named builtins with every exit sent to a random entrance.

    No two entrances are ever joined, so the result is branchless.  Some exits
    go to the goal or nowhere; the robot starts at a random entrance.
    """
    b = Builder()
    parts = []
    for _ in range(n_instances):
        g = builtin(rng.choice(list(names)))
        parts.append(b.add(g, rng.choice(g.states)))
    entrances = [p[loc] for p in parts for loc in p.gadget.inputs]
    for p in parts:
        for loc in p.gadget.outputs:
            r = rng.random()
            if r < p_goal:
                b.wire(p[loc], GOAL)
            elif r < p_goal + p_dead:
                continue
            else:
                b.wire(p[loc], rng.choice(entrances))
    return b.system(rng.choice(entrances), None)


def random_digraph(rng: random.Random, n: int, max_out: int = 3) -> Digraph:
    edges = [(u, rng.randrange(n)) for u in range(n) for _ in range(rng.randint(0, max_out))]
    return Digraph(n, edges, rng.randrange(n), rng.randrange(n))


def random_circuit(rng: random.Random, max_inputs: int = 4, max_gates: int = 10) -> NorCircuit:
    inputs = {f"x{j}": rng.random() < 0.5 for j in range(rng.randint(1, max_inputs))}
    wires = list(inputs)
    gates = []
    for j in range(rng.randint(1, max_gates)):
        gates.append((f"g{j}", rng.choice(wires), rng.choice(wires)))
        wires.append(f"g{j}")
    return NorCircuit(inputs, gates, wires[-1])


def random_cnf(rng: random.Random, n_vars: int, n_clauses: int, width: int = 3) -> list[tuple[int, ...]]:
    if n_vars == 0:
        return []
    return [tuple(rng.choice((1, -1)) * rng.randint(1, n_vars) for _ in range(rng.randint(1, width)))
            for _ in range(n_clauses)]


def random_qbf(rng: random.Random, max_vars: int = 4, max_clauses: int = 4) -> Qbf:
    n = rng.randint(1, max_vars)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    prefix = [(rng.choice("AE"), v) for v in order]
    return Qbf(prefix, random_cnf(rng, n, rng.randint(0, max_clauses)))
