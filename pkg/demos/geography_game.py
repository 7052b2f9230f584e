"""Play a small Geography instance as a two-player gadget game.

    python demos/geography_game.py
"""
from iogadgets.reductions import Geography, compile_geography
from iogadgets.twoplayer import BLACK, WHITE, solve_two_player, verify_strategy

# White starts at 0 and picks 1 or 2; both meet at 3, where White is stuck unless 4 is free
GAME = Geography(5, [WHITE, BLACK, BLACK, WHITE, BLACK],
                 [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)], 0)


def main():
    print(f"minimax winner: {GAME.winner()}")
    for flavor in ("set-switch", "toggle-switch"):
        ls = compile_geography(GAME, flavor)
        verdict = solve_two_player(ls)
        print(f"{flavor}: {len(ls.base.instances)} gadgets, winner {verdict.winner}, "
              f"strategy checks out: {verify_strategy(ls, verdict)}")


if __name__ == "__main__":
    main()
