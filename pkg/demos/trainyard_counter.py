"""Watch the reverse-branch counter inside a Trainyard network.

The top row of a reverse branch reads as a binary number starting at 2**k.
Entering on the left adds one; entering top right maps x to -x-1.  Either
move shifts the distance from 0 by at most one, so the counter cannot wrap
for a long time.

    python demos/trainyard_counter.py
"""
import random

from iogadgets.trainyard import (counter_value, lockstep_toggle, reverse_branch_network,
                                 toggle_switch_toggle_line_network)


def main():
    k = 2
    net = reverse_branch_network(k)
    print(f"reverse branch, k={k}: {len(net)} gadgets, counter starts at {counter_value(net.states, k)}")
    for port in ["left", "left", "topRight", "left", "left", "left"]:
        exit_ = net.traverse(port)
        print(f"  in {port:9} out {exit_:12} counter {counter_value(net.states, k)}")

    # the size k branch wraps on increment number 2**k, so the toggle network uses size k + 1
    net = reverse_branch_network(3)
    exits = [net.traverse("left") for _ in range(8)]
    print(f"size 3 branch, 8 increments: last exit {exits[-1]}")

    rng = random.Random(0)
    for k in range(3, 9):
        ports = [rng.choice(("in1", "in2")) for _ in range(1 << k)]
        rep = lockstep_toggle(k, ports)
        size = len(toggle_switch_toggle_line_network(k))
        print(f"toggle network k={k}: {size:3} gadgets, {rep.traversals:3} traversals, "
              f"lockstep {'ok' if rep else 'broken'}")


if __name__ == "__main__":
    main()
