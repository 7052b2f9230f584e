"""Classify every builtin two-state gadget and reduce the multi-input ones to a basis gadget.

    python demos/classify_gadgets.py
"""
from iogadgets.gadgets import BUILTIN_NAMES, GadgetError, basis_reduce, builtin, classify, replay, same_gadget


def main():
    for name in BUILTIN_NAMES:
        if name in ("k-switch", "branching-hallway"):
            continue
        g = builtin(name)
        cls = classify(g)
        line = f"{name:36} {cls.category.value:10} {cls.input_arity.value:12}"
        try:
            basis, witness = basis_reduce(g)
        except GadgetError:
            print(line)
            continue
        steps = ", ".join(f"{s.op} {s.input}" if s.input else s.op for s in witness) or "none"
        # the witness is a recipe; replaying it must land exactly on the basis gadget
        assert same_gadget(replay(g, witness), builtin(basis))
        print(f"{line} -> {basis}  [{steps}]")


if __name__ == "__main__":
    main()
