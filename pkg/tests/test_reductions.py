import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iogadgets.generators import random_circuit, random_cnf, random_digraph, random_qbf
from iogadgets.oneplayer import extract_flow, solve_one_player, verify_flow
from iogadgets.reductions import (GEO_FLAVORS, NOR_FLAVORS, SAT_FLAVORS, Digraph, Geography,
                                  NorCircuit, Qbf, ReductionError, compile_3sat,
                                  compile_geography, compile_nor, compile_qbf,
                                  compile_reachability, normalize_out_degree, random_geography,
                                  reachable, satisfiable)
from iogadgets.systems import run_zero_player, validate_zero_player
from iogadgets.twoplayer import BLACK, WHITE, solve_two_player, verify_strategy

# -- reachability


def test_single_edge():
    g = Digraph(2, [(0, 1)], 0, 1)
    assert run_zero_player(compile_reachability(g)).reached_goal


def test_unreachable_cycles():
    g = Digraph(3, [(0, 1), (1, 0), (2, 0)], 0, 2)
    out = run_zero_player(compile_reachability(g))
    assert out.kind == "cycle"


def test_s_equals_t():
    assert run_zero_player(compile_reachability(Digraph(1, [], 0, 0))).reached_goal


def test_normalized_out_degree():
    g = Digraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 0)], 0, 3)
    vertices, pairs, s, t = normalize_out_degree(g)
    assert all(len(pairs[v]) == 2 for v in vertices)
    assert set(x for p in pairs.values() for x in p) <= set(vertices)
    assert s in vertices and t in vertices


def test_reachability_is_zero_player():
    sys_ = compile_reachability(Digraph(3, [(0, 1), (1, 2), (1, 0)], 0, 2))
    assert validate_zero_player(sys_) == []


def test_exhaustive_three_vertices():
    pairs = [(u, v) for u in range(3) for v in range(3)]
    for mask in range(1 << len(pairs)):
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        for s, t in ((0, 0), (0, 1)):
            g = Digraph(3, edges, s, t)
            assert run_zero_player(compile_reachability(g)).reached_goal == reachable(g), g


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8))
def test_random_digraphs(seed, n):
    g = random_digraph(random.Random(seed), n)
    assert run_zero_player(compile_reachability(g)).reached_goal == reachable(g)


def test_digraph_validation():
    with pytest.raises(ReductionError):
        Digraph(2, [(0, 2)], 0, 1)
    with pytest.raises(ReductionError):
        Digraph(2, [], 0, 5)

# -- NOR circuits


@pytest.mark.parametrize("flavor", sorted(NOR_FLAVORS))
@pytest.mark.parametrize("a,b,want", [(0, 0, True), (1, 0, False), (0, 1, False), (1, 1, False)])
def test_single_gate(flavor, a, b, want):
    c = NorCircuit({"a": bool(a), "b": bool(b)}, [("g", "a", "b")], "g")
    out = run_zero_player(compile_nor(c, flavor))
    assert out.reached_goal == want
    if not want:
        assert out.kind == "stuck"


@pytest.mark.parametrize("flavor", sorted(NOR_FLAVORS))
def test_input_as_output(flavor):
    for v in (True, False):
        assert run_zero_player(compile_nor(NorCircuit({"x": v}, [], "x"), flavor)).reached_goal == v


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_random_circuits(seed):
    c = random_circuit(random.Random(seed))
    for flavor in NOR_FLAVORS:
        sys_ = compile_nor(c, flavor)
        assert validate_zero_player(sys_) == []
        assert run_zero_player(sys_).reached_goal == c.evaluate()


def test_nor_validation():
    with pytest.raises(ReductionError, match="undriven"):
        NorCircuit({"a": True}, [("g", "a", "zz")], "g")
    with pytest.raises(ReductionError, match="twice"):
        NorCircuit({"a": True}, [("a", "a", "a")], "a")
    with pytest.raises(ReductionError):
        compile_nor(NorCircuit({"a": True}, [], "a"), "toggle-line")

# -- QBF


def test_exists_x():
    assert run_zero_player(compile_qbf(Qbf([("E", 1)], [(1,)]))).reached_goal


def test_forall_x():
    out = run_zero_player(compile_qbf(Qbf([("A", 1)], [(1,)])))
    assert out.kind == "stuck"


def test_qbf_without_quantifiers():
    assert run_zero_player(compile_qbf(Qbf([], []))).reached_goal
    assert not run_zero_player(compile_qbf(Qbf([], [()]))).reached_goal


def test_qbf_two_levels():
    # forall x exists y: x xor y
    q = Qbf([("A", 1), ("E", 2)], [(1, 2), (-1, -2)])
    assert q.evaluate()
    assert run_zero_player(compile_qbf(q)).reached_goal
    q2 = Qbf([("E", 2), ("A", 1)], [(1, 2), (-1, -2)])
    assert not q2.evaluate()
    assert not run_zero_player(compile_qbf(q2)).reached_goal


def test_qbf_exhaustive_two_variables():
    lits = [1, -1, 2, -2]
    clauses = [c for w in (1, 2) for c in itertools.combinations(lits, w)]
    for prefix in itertools.product("AE", repeat=2):
        for order in ((1, 2), (2, 1)):
            for k in range(3):
                for mat in itertools.combinations(clauses, k):
                    q = Qbf(list(zip(prefix, order)), list(mat))
                    assert run_zero_player(compile_qbf(q)).reached_goal == q.evaluate(), q


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_random_qbf(seed):
    q = random_qbf(random.Random(seed))
    sys_ = compile_qbf(q)
    assert validate_zero_player(sys_) == []
    assert run_zero_player(sys_).reached_goal == q.evaluate()


def test_qbf_validation():
    with pytest.raises(ReductionError, match="quantifier"):
        Qbf([("X", 1)], [])
    with pytest.raises(ReductionError, match="repeated"):
        Qbf([("A", 1), ("E", 1)], [])
    with pytest.raises(ReductionError, match="not quantified"):
        Qbf([("A", 1)], [(2,)])
    with pytest.raises(ReductionError, match="more than 3"):
        Qbf([("A", 1)], [(1, 1, 1, 1)])
    with pytest.raises(ReductionError):
        compile_qbf(Qbf([("A", v) for v in range(1, 5)], []), max_vars=3)

# -- 3SAT


@pytest.mark.parametrize("flavor", sorted(SAT_FLAVORS))
def test_sat_examples(flavor):
    assert solve_one_player(compile_3sat(1, [(1, 1, 1)], flavor)) is not None
    assert solve_one_player(compile_3sat(1, [(1,), (-1,)], flavor)) is None


def test_satisfiable_oracle():
    assert satisfiable(0, [])
    assert not satisfiable(0, [()])
    assert satisfiable(2, [(1, 2), (-1,)])
    assert not satisfiable(1, [(1,), (-1,)])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 6), st.integers(0, 7))
def test_random_3sat(seed, n, m):
    clauses = random_cnf(random.Random(seed), n, m)
    want = satisfiable(n, clauses)
    for flavor in SAT_FLAVORS:
        sys_ = compile_3sat(n, clauses, flavor)
        path = solve_one_player(sys_)
        assert (path is not None) == want
        if path is not None:
            assert verify_flow(sys_, extract_flow(sys_, path))


def test_3sat_validation():
    with pytest.raises(ReductionError):
        compile_3sat(1, [(2,)])
    with pytest.raises(ReductionError):
        compile_3sat(1, [(1,)], "switch")

# -- Geography


def test_black_start_without_moves():
    ge = Geography(1, [BLACK], [], 0)
    assert ge.winner() == WHITE
    for flavor in GEO_FLAVORS:
        assert solve_two_player(compile_geography(ge, flavor)).winner == WHITE


def test_white_start_without_moves():
    ge = Geography(1, [WHITE], [], 0)
    assert ge.winner() == BLACK
    assert solve_two_player(compile_geography(ge)).winner == BLACK


def test_merge_vertex():
    # 0 (White) chooses 1 or 2; both lead into 3, which is a dead end for its owner
    ge = Geography(4, [WHITE, BLACK, BLACK, WHITE], [(0, 1), (0, 2), (1, 3), (2, 3)], 0)
    assert ge.violations() == []
    assert ge.winner() == BLACK
    for flavor in GEO_FLAVORS:
        assert solve_two_player(compile_geography(ge, flavor)).winner == BLACK


def test_revisit_blocked():
    # 0 -> 1 -> 2 and 2 -> 1 would revisit 1, so White at 2 is stuck
    ge = Geography(3, [WHITE, BLACK, WHITE], [(0, 1), (1, 2), (2, 1)], 0)
    assert ge.violations() == []
    assert ge.winner() == BLACK
    assert solve_two_player(compile_geography(ge)).winner == BLACK
    # a fresh exit from 2 lets White escape to a Black dead end
    ge = Geography(4, [WHITE, BLACK, WHITE, BLACK], [(0, 1), (1, 2), (2, 1), (2, 3)], 0)
    assert ge.violations() == []
    assert ge.winner() == WHITE
    for flavor in GEO_FLAVORS:
        assert solve_two_player(compile_geography(ge, flavor)).winner == WHITE


def test_geography_violations():
    assert Geography(2, [WHITE, WHITE], [(0, 0)], 0).violations()
    assert Geography(2, [WHITE, BLACK], [(1, 0)], 0).violations()
    assert Geography(2, [WHITE, BLACK], [(0, 1), (0, 1)], 0).violations()
    with pytest.raises(ReductionError, match="valid"):
        compile_geography(Geography(2, [WHITE, BLACK], [(1, 0)], 0))
    with pytest.raises(ReductionError):
        Geography(1, ["Grey"], [], 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8))
def test_random_geography(seed, n):
    ge = random_geography(random.Random(seed), n)
    assert ge.violations() == []
    want = ge.winner()
    for flavor in GEO_FLAVORS:
        ls = compile_geography(ge, flavor)
        v = solve_two_player(ls)
        assert v.winner == want
        assert verify_strategy(ls, v)
