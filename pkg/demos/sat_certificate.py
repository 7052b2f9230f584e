"""Solve a 3SAT system as a one-player game and check the answer through a flow certificate.

    python demos/sat_certificate.py
"""
from iogadgets.oneplayer import extract_flow, greedy_replay, reaches_goal, solve_one_player, verify_flow
from iogadgets.reductions import compile_3sat

CLAUSES = [(1, 2, -3), (-1, 3), (-2, -3), (2, 3)]


def main():
    for flavor in ("set-switch", "toggle-switch"):
        sys_ = compile_3sat(3, CLAUSES, flavor)
        path = solve_one_player(sys_)
        if path is None:
            print(f"{flavor}: unsatisfiable")
            continue
        flow = extract_flow(sys_, path)
        verdict = verify_flow(sys_, flow)
        # a certificate only records how often each transition is used; order is recovered greedily
        again = greedy_replay(sys_, flow)
        print(f"{flavor}: path of {len(path)} moves, {len(flow)} distinct transitions, "
              f"certificate {'accepted' if verdict else verdict.reason}, "
              f"replay {'reaches' if again and reaches_goal(sys_, again) else 'misses'} the goal")


if __name__ == "__main__":
    main()
