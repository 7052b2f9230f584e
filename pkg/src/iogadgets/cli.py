"""Command-line front end.

Every command prints one JSON line.  Exit status: 0 for a positive answer
(goal reached, solvable, White wins, accepted), 1 for a negative one, 2 for
bad usage, unreadable input, or an engine cap that was hit before deciding.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from typing import Callable

from . import formats as fmt
from .gadgets import GadgetError, basis_reduce, builtin, classify, decompose
from .harness import check_simulation
from .oneplayer import (DEFAULT_MAX_CONFIGS, FlowError, StateSpaceExceeded, extract_flow,
                        greedy_replay, solve_one_player, verify_flow)
from .reductions import (GEO_FLAVORS, NOR_FLAVORS, SAT_FLAVORS, ReductionError, compile_3sat,
                         compile_geography, compile_nor, compile_qbf, compile_reachability)
from .simulations import CONSTRUCTIONS, construct
from .systems import DEFAULT_MAX_STEPS, SystemError_, Timeout, run_zero_player
from .trainyard import (ContractViolation, TrainyardError, compile_qbf_to_trainyard,
                        lockstep_toggle, run_trainyard)
from .twoplayer import WHITE, solve_two_player

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _base_dir(path: str) -> str:
    return "." if path == "-" else os.path.dirname(os.path.abspath(path))


def _write(path: str, obj) -> None:
    line = fmt.dumps(obj) + "\n"
    if path == "-":
        sys.stdout.write(line)
    else:
        with open(path, "w") as f:
            f.write(line)


def _json(path: str):
    return fmt._load_json(_read(path), path)


def _system(path: str):
    return fmt.system_from_json(_json(path), path, _base_dir(path))


def _gadget(ref: str):
    try:
        return builtin(ref)
    except GadgetError:
        return fmt.gadget_from_json(_json(ref), ref)


# -- commands --------------------------------------------------------------------------------


def cmd_classify(a) -> int:
    g = _gadget(a.gadget)
    cls = classify(g)
    out = {"name": g.name, "category": cls.category.value, "inputArity": cls.input_arity.value,
           "nontrivialInputs": cls.nontrivial_inputs,
           "subunits": {i: k.value for i, k in decompose(g).kinds().items()}}
    try:
        name, witness = basis_reduce(g)
        out["basis"] = name
        out["witness"] = [[s.op, s.input] if s.input else [s.op] for s in witness]
    except GadgetError:
        out["basis"] = None
    _write(a.output, out)
    return EXIT_YES


def cmd_simulate(a) -> int:
    sys_ = _system(a.system)
    try:
        out = run_zero_player(sys_, a.max_steps)
    except Timeout:
        _write(a.output, {"outcome": "timeout", "maxSteps": a.max_steps})
        return EXIT_ERROR
    _write(a.output, out.to_json())
    return EXIT_YES if out.reached_goal else EXIT_NO


def _move_json(m):
    t = m.transition
    return {"instance": m.instance, "transition": {"from": [t.from_state, t.in_loc],
                                                   "to": [t.to_state, t.out_loc]}}


def cmd_solve1p(a) -> int:
    sys_ = _system(a.system)
    path = solve_one_player(sys_, a.max_configs)
    if path is None:
        _write(a.output, {"solvable": False})
        return EXIT_NO
    out = {"solvable": True, "length": len(path)}
    if a.path:
        out["path"] = [_move_json(m) for m in path]
    _write(a.output, out)
    if a.flow:
        _write(a.flow, fmt.flow_to_json(extract_flow(sys_, path)))
    return EXIT_YES


def cmd_solve2p(a) -> int:
    ls = fmt.labeled_from_json(_json(a.system), a.system, _base_dir(a.system))
    verdict = solve_two_player(ls, a.max_configs)
    _write(a.output, verdict.to_json(a.strategy))
    return EXIT_YES if verdict.winner == WHITE else EXIT_NO


def cmd_compile(a) -> int:
    text = _read(a.input)
    kind = a.problem
    if kind == "reach":
        out = fmt.system_to_json(compile_reachability(fmt.parse_digraph(text, a.input)))
    elif kind == "nor":
        out = fmt.system_to_json(compile_nor(fmt.parse_netlist(text, a.input), a.flavor or "switch+set-up-line"))
    elif kind == "qbf":
        q = fmt.parse_qdimacs(text, a.input)
        if a.trainyard:
            out = fmt.trainyard_to_json(compile_qbf_to_trainyard(q))
        else:
            out = fmt.system_to_json(compile_qbf(q))
    elif kind == "3sat":
        n, clauses = fmt.parse_dimacs(text, a.input)
        out = fmt.system_to_json(compile_3sat(n, clauses, a.flavor or "set-switch"))
    else:
        out = fmt.labeled_to_json(compile_geography(fmt.parse_geography(text, a.input), a.flavor or "set-switch"))
    _write(a.output, out)
    return EXIT_YES


_FLAVORS = {"nor": NOR_FLAVORS, "3sat": SAT_FLAVORS, "geo": GEO_FLAVORS}


def cmd_verify_sim(a) -> int:
    if a.construction:
        h = construct(a.construction)
    else:
        h = fmt.harness_from_json(_json(a.harness), a.harness, _base_dir(a.harness))
    report = check_simulation(h, a.max_steps)
    _write(a.output, {"accepted": report.accepted, "vectors": report.vectors,
                      "reason": report.counterexample or "ok"})
    return EXIT_YES if report else EXIT_NO


def cmd_export(a) -> int:
    if a.what == "gadget":
        _write(a.output, fmt.gadget_to_json(builtin(a.name)))
    else:
        if a.name not in CONSTRUCTIONS:
            raise UsageError(f"unknown construction {a.name!r}; choose from {sorted(CONSTRUCTIONS)}")
        _write(a.output, fmt.harness_to_json(construct(a.name)))
    return EXIT_YES


def cmd_verify_flow(a) -> int:
    sys_ = _system(a.system)
    flow = fmt.flow_from_json(_json(a.certificate), a.certificate)
    verdict = verify_flow(sys_, flow)
    out = {"accepted": verdict.accepted, "reason": verdict.reason}
    if verdict and a.replay:
        out["replayed"] = greedy_replay(sys_, flow) is not None
    _write(a.output, out)
    return EXIT_YES if verdict else EXIT_NO


def cmd_trainyard(a) -> int:
    if a.action == "run":
        ty = fmt.trainyard_from_json(_json(a.input), a.input)
        try:
            out = run_trainyard(ty, a.max_steps)
        except Timeout:
            _write(a.output, {"outcome": "timeout", "maxSteps": a.max_steps})
            return EXIT_ERROR
        _write(a.output, out.to_json())
        return EXIT_YES if out.reached_goal else EXIT_NO
    rng = random.Random(a.seed)
    n = a.traversals if a.traversals is not None else 2 ** a.k
    ports = [rng.choice(("in1", "in2")) for _ in range(n)]
    report = lockstep_toggle(a.k, ports)
    _write(a.output, {"k": a.k, "traversals": report.traversals, "agreed": report.agreed,
                      "distanceInvariant": report.distance_ok, "detail": report.detail or "ok"})
    return EXIT_YES if report else EXIT_NO


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iogadgets", description="Motion planning with input/output gadgets.")
    p.add_argument("--format", choices=["json"], default="json", help="output format (json only)")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, func: Callable, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")
        return sp

    sp = command("classify", cmd_classify, "classify a 2-state gadget and find its basis")
    sp.add_argument("gadget", help="builtin gadget name or gadget JSON file")

    sp = command("simulate", cmd_simulate, "run a zero-player system")
    sp.add_argument("system")
    sp.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)

    sp = command("solve1p", cmd_solve1p, "search a one-player system")
    sp.add_argument("system")
    sp.add_argument("--max-configs", type=int, default=DEFAULT_MAX_CONFIGS)
    sp.add_argument("--path", action="store_true", help="include the move sequence")
    sp.add_argument("--flow", metavar="FILE", help="also write the flow certificate of the path")

    sp = command("solve2p", cmd_solve2p, "solve a two-player labeled system")
    sp.add_argument("system")
    sp.add_argument("--max-configs", type=int, default=DEFAULT_MAX_CONFIGS)
    sp.add_argument("--strategy", action="store_true", help="dump the winner's strategy")

    sp = command("compile", cmd_compile, "compile a problem instance into a system")
    sp.add_argument("problem", choices=["reach", "nor", "qbf", "3sat", "geo"])
    sp.add_argument("input")
    sp.add_argument("--flavor", help="gadget flavor (nor: switch+set-up-line | set-up-switch+set-up-line;"
                                     " 3sat/geo: set-switch | toggle-switch)")
    sp.add_argument("--trainyard", action="store_true", help="qbf only: emit a Trainyard system")

    sp = command("verify-sim", cmd_verify_sim, "check a simulation harness against its target")
    sp.add_argument("harness", nargs="?")
    sp.add_argument("--construction", choices=sorted(CONSTRUCTIONS), help="check a library construction")
    sp.add_argument("--max-steps", type=int, default=10**4, help="steps allowed per traversal")

    sp = command("export", cmd_export, "write a builtin gadget or library harness as JSON")
    sp.add_argument("what", choices=["gadget", "harness"])
    sp.add_argument("name")

    sp = command("verify-flow", cmd_verify_flow, "check a switching-flow certificate")
    sp.add_argument("system")
    sp.add_argument("certificate")
    sp.add_argument("--replay", action="store_true", help="also turn an accepted flow back into a path")

    sp = command("trainyard", cmd_trainyard, "run a Trainyard system or check the toggle network")
    sp.add_argument("action", choices=["run", "verify"])
    sp.add_argument("input", nargs="?", help="Trainyard system file (run)")
    sp.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    sp.add_argument("-k", type=int, default=4, help="counter size (verify)")
    sp.add_argument("--traversals", type=int, help="number of traversals (default 2**k)")
    sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_YES
    try:
        if a.command == "compile" and a.flavor and a.problem in _FLAVORS and a.flavor not in _FLAVORS[a.problem]:
            raise UsageError(f"flavor {a.flavor!r} does not apply to {a.problem}")
        if a.command == "compile" and a.flavor and a.problem not in _FLAVORS:
            raise UsageError(f"{a.problem} has no flavors")
        if a.command == "verify-sim" and not (a.harness or a.construction):
            raise UsageError("give a harness file or --construction")
        if a.command == "trainyard" and a.action == "run" and not a.input:
            raise UsageError("trainyard run needs a system file")
        return a.func(a)
    except (UsageError, fmt.FormatError, GadgetError, ReductionError, SystemError_, FlowError,
            TrainyardError, StateSpaceExceeded, ContractViolation) as e:
        print(f"iogadgets {a.command}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
