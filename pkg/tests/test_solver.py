import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relfix.contraction import ComparisonFunction
from relfix.relation import Relation
from relfix.solver import (HypothesisError, MappingPair, NonConvergenceError, error_bounds, find_start,
                           iterate, promote_to_common_fixed_point)


def test_least_index_preimage():
    pair = MappingPair.from_tables((0, 0, 0), (2, 1, 2))
    assert pair.preimage(2) == 0 and pair.preimage(1) == 1 and pair.preimage(0) is None


def test_tables_validated():
    with pytest.raises(ValueError):
        MappingPair.from_tables((0, 1), (0,))
    with pytest.raises(ValueError):
        MappingPair.from_tables((0, 3), (0, 1))


def test_start_on_step_maps(ex52):
    assert find_start(ex52.pair, ex52.relation, range(4)) == 0


def test_no_start_available():
    pair = MappingPair.from_tables((1, 0), (0, 1))
    assert find_start(pair, Relation(2, [(0, 0)]), range(2)) is None


def test_step_maps_from_half(ex52):
    D = ex52.space.dist
    trace, cert = iterate(ex52.pair, 1, lambda a, b: D[a, b])
    assert cert.points == (1,) and cert.residual == 0 and trace.steps == 0
    bounds = error_bounds(trace, ex52.contractions[0].phi)
    assert bounds.holds


def test_identity_pair_stops_immediately():
    pair = MappingPair.from_tables(range(3), range(3))
    trace, cert = iterate(pair, 2, lambda a, b: abs(a - b))
    assert cert.points == (2,) and trace.steps == 0
    assert promote_to_common_fixed_point(pair, 2, lambda a, b: abs(a - b)).points == (2,)


def test_halving_map_residuals_halve():
    pair = MappingPair.from_functions(lambda x: x / 2, lambda x: x, lambda y: y)
    d = lambda a, b: abs(a - b)
    trace, cert = iterate(pair, 64.0, d, tol=1e-6)
    assert trace.residuals[:6] == [32, 16, 8, 4, 2, 1]
    rep = error_bounds(trace, ComparisonFunction.linear(0.5), d)
    assert rep.holds
    # the bound is attained at every step
    assert all(r == b for r, b in rep.pairs)


def test_zero_initial_step_gives_zero_bounds():
    pair = MappingPair.from_tables((0, 1), (0, 1))
    trace, _ = iterate(pair, 1, lambda a, b: abs(a - b))
    rep = error_bounds(trace, ComparisonFunction.linear(0.5))
    assert rep.pairs == [(0.0, 0.0)]


def test_bound_violation_reported():
    pair = MappingPair.from_tables((1, 2, 3, 3), range(4))
    trace, _ = iterate(pair, 0, lambda a, b: abs(a - b))
    rep = error_bounds(trace, ComparisonFunction.linear(0.5))
    assert not rep.holds and rep.first_violation == 1


def test_missing_preimage_raises():
    pair = MappingPair.from_tables((2, 2, 2), (0, 1, 0))
    with pytest.raises(HypothesisError):
        iterate(pair, 0, lambda a, b: abs(a - b))


def test_cycle_does_not_converge():
    pair = MappingPair.from_tables((1, 0), (0, 1))
    with pytest.raises(NonConvergenceError) as info:
        iterate(pair, 0, lambda a, b: abs(a - b), max_iter=10)
    assert len(info.value.trace.residuals) == 11


def test_promotion_on_step_maps(ex52):
    D = ex52.space.dist
    cert = promote_to_common_fixed_point(ex52.pair, 0, lambda a, b: D[a, b])
    assert cert.kind == "common-fixed-point" and cert.points == (0,)


def test_promotion_failures_name_the_equality():
    d = lambda a, b: abs(a - b)
    assert "not a coincidence" in promote_to_common_fixed_point(MappingPair.from_tables((1, 1), (0, 1)), 0, d).evidence
    # x = 0: g0 = T0 = 1, but T(g0) = T1 = 0 and g(T0) = g1 = 1
    pair = MappingPair.from_tables((1, 0), (1, 1))
    assert "commute" in promote_to_common_fixed_point(pair, 0, d).evidence


def test_continuous_pair():
    pair = MappingPair.from_functions(lambda x: 0.0, lambda x: x * x, np.sqrt)
    trace, cert = iterate(pair, 0.7, lambda a, b: abs(a - b), tol=1e-12)
    assert cert.points == (0.0,) and trace.steps == 1


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 8), st.data())
def test_recorded_steps_follow_the_scheme(n, data):
    T = tuple(data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
    g = tuple(data.draw(st.permutations(range(n))))
    pair = MappingPair.from_tables(T, g)
    try:
        trace, cert = iterate(pair, 0, lambda a, b: float(a != b), max_iter=3 * n)
    except NonConvergenceError as exc:
        trace = exc.trace
    for k in range(len(trace.x) - 1):
        assert g[trace.x[k + 1]] == T[trace.x[k]]
