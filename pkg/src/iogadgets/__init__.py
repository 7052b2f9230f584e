"""Motion planning with input/output gadgets.

Zero-, one- and two-player engines, gadget classification, simulation
harnesses between gadgets, reductions from classical problems, and
one-train Trainyard.
"""
from .gadgets import (BASIS, BOUNDED_BASIS, BUILTIN_NAMES, UNBOUNDED_BASIS, Arity, Category,
                      Gadget, GadgetClass, GadgetError, Step, Subunit, Transition, basis_reduce,
                      builtin, classify, decompose, k_switch, reflect, replay, trainyard_gadget)
from .harness import (Builder, Harness, HarnessError, SimulationReport, check_simulation,
                      check_simulation_one_player, substitute)
from .oneplayer import (FlowError, FlowVerdict, StateSpaceExceeded, extract_flow, greedy_replay,
                        solve_one_player, verify_flow)
from .reductions import (Digraph, Geography, NorCircuit, Qbf, ReductionError, compile_3sat,
                         compile_geography, compile_nor, compile_qbf, compile_reachability)
from .simulations import CONSTRUCTIONS, construct, simulate_arbitrary, wsusd_from
from .systems import (GOAL, START, Network, RunOutcome, System, SystemError_, Timeout,
                      bounded_horizon, decide_bounded, run_zero_player)
from .trainyard import (TrainyardNetwork, TrainyardSystem, compile_qbf_to_trainyard,
                        reverse_branch_network, run_trainyard, toggle_switch_toggle_line_network)
from .twoplayer import BLACK, WHITE, GameVerdict, LabeledSystem, solve_two_player, verify_strategy

__version__ = "0.1.0"
