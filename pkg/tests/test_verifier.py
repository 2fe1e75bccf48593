import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relfix.contraction import make_catalog, make_linear
from relfix.instance import FiniteInstance
from relfix.metric import FiniteMetricSpace
from relfix.relation import Relation
from relfix.verifier import (brute_force_coincidence, check_compatibility_finite, check_contraction,
                             check_u1, check_u1_alternatives, compatibility_oracle, gr_continuity,
                             verify)

from .oracles import EX52_WORST_VALUE, ex52_related_pairs, ex52_six_tuple, naive_coincidences


def _swap_contraction(inst, G):
    return dataclasses.replace(inst, contractions=[G], contraction_specs=[G.spec])


def test_step_maps_contraction_worst_pair(ex52):
    res = check_contraction(ex52.space, ex52.T, ex52.g, ex52.relation, ex52.contractions[0])
    assert res.holds
    assert [ex52.label(i) for i in res.worst_pair] == ["1", "2"]
    assert res.worst_value == pytest.approx(EX52_WORST_VALUE)


def test_worst_value_matches_hand_scan(ex52):
    G = ex52.contractions[0]
    hand = max(G.evaluator(*ex52_six_tuple(x, y)) for x, y in ex52_related_pairs()
               if ex52_six_tuple(x, y)[0] > 0)
    assert hand == pytest.approx(EX52_WORST_VALUE)


@pytest.mark.parametrize("k", [0.5, 0.9, 0.99])
def test_catalog_I_fails_at_one_two(ex52, k):
    res = check_contraction(ex52.space, ex52.T, ex52.g, ex52.relation, make_catalog("I", {"k": k}))
    assert not res.holds
    assert [ex52.label(i) for i in res.worst_pair] == ["1", "2"]
    assert res.worst_value == pytest.approx(1 - k)


def test_diagonal_relation_only_checks_equal_pairs():
    sp = FiniteMetricSpace.from_coordinates([0, 1, 2])
    res = check_contraction(sp, (0, 0, 1), (0, 1, 2), Relation.diagonal(3), make_catalog("III", {"k": 0.4}))
    assert res.holds and res.pairs_checked == 3


def test_coincidence_sets(ex52):
    C, P = brute_force_coincidence(ex52.T, ex52.g)
    assert [ex52.label(x) for x in C] == ["0", "0.5"]
    assert [ex52.label(v) for v in P] == ["0"]
    assert brute_force_coincidence((1, 2, 0), (1, 2, 0))[0] == (0, 1, 2)


def test_u1_on_step_maps(ex52):
    table = check_u1(ex52.T, ex52.g, ex52.relation)
    assert table.holds and max(table.lengths.values()) <= 1


def test_u1_single_image_and_disconnected():
    assert check_u1((1, 1), (0, 1), Relation(2, [(1, 1)])).holds
    assert not check_u1((0, 1), (0, 1), Relation(2, [(0, 0), (1, 1)])).holds


def test_u1_alternatives(ex52):
    u1p, _ = check_u1_alternatives(ex52.T, ex52.g, ex52.relation)
    assert u1p.ok
    u1p, _ = check_u1_alternatives((0, 1, 2), (0, 1, 2), Relation.diagonal(3))
    assert not u1p.ok


def test_u1_double_prime_with_hub():
    # z = 0 is a hub: g0 = 0 related to both T-images 1 and 2, and [g0, T0] = [0, 0] in R
    R = Relation(3, [(0, 0), (1, 0), (2, 0)])
    T, g = (0, 1, 2), (0, 1, 2)
    u1p, u1pp = check_u1_alternatives((1, 1, 2), g, R)
    assert not u1p.ok
    assert u1pp.ok
    assert check_u1((1, 1, 2), g, R).holds


def test_compatibility_on_step_maps(ex52):
    assert check_compatibility_finite(ex52.T, ex52.g, ex52.relation)[0]
    assert compatibility_oracle(ex52.T, ex52.g, ex52.relation)[0]


def test_commuting_pair_is_compatible():
    T, g = (0, 0, 0), (0, 2, 1)   # T g = g T = (0, 0, 0)
    assert [T[g[x]] for x in range(3)] == [g[T[x]] for x in range(3)]
    assert check_compatibility_finite(T, g, Relation.universal(3))[0]


def test_incompatible_pair_found_by_both():
    # x = 0: g0 = T0 = 1, but g1 = 2 and T1 = 0
    T, g = (1, 0, 2), (1, 2, 2)
    R = Relation.universal(3)
    ok, x = check_compatibility_finite(T, g, R)
    assert not ok and x == 0
    ok, lasso = compatibility_oracle(T, g, R)
    assert not ok


@st.composite
def small_pairs(draw):
    n = draw(st.integers(1, 4))
    cells = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    M = np.array(cells).reshape(n, n)
    if not M.any():
        M[0, 0] = True
    T = tuple(draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
    g = tuple(draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
    return T, g, Relation.from_matrix(M)


@settings(max_examples=200, deadline=None)
@given(small_pairs())
def test_compatibility_characterisation_matches_oracle(case):
    T, g, R = case
    assert check_compatibility_finite(T, g, R)[0] == compatibility_oracle(T, g, R)[0]


def test_gr_continuity_detects_cycle_inside_fibre():
    # points 0 and 1 share g-value 0 but differ under T; a loop at 1 breaks continuity at 0
    T, g = (0, 1), (0, 0)
    assert not gr_continuity(T, g, Relation(2, [(1, 1)]))[0]
    assert gr_continuity(T, g, Relation(2, [(0, 1)]))[0]


def test_verify_step_maps(ex52):
    rep = verify(ex52)
    for h in ("a", "b", "c", "d", "e1", "e2", "u1", "u2", "G1", "G2", "G3"):
        assert rep[h].ok, h
    assert rep.rank == "common-fixed-point-unique"
    assert [ex52.label(x) for x in rep.common_fixed_points] == ["0"]


def test_verify_interval_example(ex51):
    rep = verify(ex51)
    assert rep.rank == "common-fixed-point-unique"
    assert rep.branch == "(e) T and g continuous"
    assert rep.coincidence_points == (0.0,) and rep.common_fixed_points == (0.0,)
    assert not rep["d[0]"].ok and rep["d[1]"].ok
    assert rep["Y-R-complete"].status == "asserted"


def test_failing_c_gives_rank_none(ex52):
    bad = dataclasses.replace(ex52, relation=Relation(4, [(0, 0), (0, 3)]), x0=None)
    rep = verify(bad)
    assert not rep["c"].ok and rep["c"].witness is not None
    assert rep.rank == "none"


def test_catalog_I_swap_fails_d(ex52):
    rep = verify(_swap_contraction(ex52, make_catalog("I", {"k": 0.99})))
    assert not rep["d"].ok and rep.rank == "none"
    assert [ex52.label(i) for i in rep["d"].witness] == ["1", "2"]


def test_missing_g3_caps_rank(ex52):
    from relfix.contraction import quotient_relation
    rep = verify(_swap_contraction(ex52, quotient_relation()))
    if rep["d"].ok:
        assert rep.rank == "coincidence"


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 5), st.data())
def test_rank_is_sound_on_random_instances(n, data):
    T = tuple(data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
    g = tuple(data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
    cells = data.draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    M = np.array(cells).reshape(n, n)
    if not M.any():
        M[0, 0] = True
    k = data.draw(st.sampled_from([0.1, 0.5, 0.9]))
    sp = FiniteMetricSpace.from_coordinates(range(n))
    sp = FiniteMetricSpace(sp.labels, sp.dist, sorted(set(g)), sp.coordinates)
    G = make_catalog("I", {"k": k})
    inst = FiniteInstance(sp, Relation.from_matrix(M), T, g, [G], [G.spec])
    rep = verify(inst)          # raises on disagreement with brute force
    C = naive_coincidences(T, g)
    if rep.rank != "none":
        assert C
    if rep.at_least("point-of-coincidence-unique"):
        assert len({g[x] for x in C}) == 1
