"""Compile a QBF into a zero-player system, then rebuild it from each unbounded basis gadget.

The compiled system uses switch/set-up/set-down gadgets.  Substituting a
harness for every gadget gives a system made of a single other gadget type;
the robot still reaches the goal exactly when the formula is true.

    python demos/qbf_through_bases.py
"""
from iogadgets.gadgets import UNBOUNDED_BASIS
from iogadgets.harness import substitute
from iogadgets.reductions import Qbf, compile_qbf
from iogadgets.simulations import wsusd_from
from iogadgets.systems import run_zero_player

# forall x exists y: (x or y) and (not x or not y); y = not x always works
FORMULA = Qbf([("A", 1), ("E", 2)], [(1, 2), (-1, -2)])


def main():
    base = compile_qbf(FORMULA)
    out = run_zero_player(base)
    print(f"formula is {FORMULA.evaluate()}; compiled system has {len(base.instances)} gadgets, "
          f"run ends in {out.kind} after {out.steps} steps")
    for basis in UNBOUNDED_BASIS:
        h = wsusd_from(basis)
        big = substitute(base, [h])
        res = run_zero_player(big)
        print(f"  {basis:34} {len(h.instances):5} per gadget, {len(big.instances):6} total, "
              f"{res.kind} after {res.steps} steps")


if __name__ == "__main__":
    main()
