"""The eight acceptance criteria, each at its stated tolerance and time budget.

Every criterion prints one ``ACCEPTANCE <n> PASS|FAIL`` line (shown even
under captured output).  Criterion 7 includes a grid-doubling claim that the
desk problem cannot meet, see ``test_criterion_7``.
"""
import time

import numpy as np
import pytest

from relfix.contraction import CATALOG, check_g1, check_g2, check_g3, quotient_relation, make_catalog
from relfix.generate import compatibility_sweep, sweep
from relfix.instance import load
from relfix.solver import iterate, promote_to_common_fixed_point
from relfix.urysohn import residual, solve
from relfix.verifier import check_contraction, verify

from .oracles import naive_coincidences


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


@pytest.fixture(scope="module")
def bound_sweep():
    t = time.perf_counter()
    stats = sweep(500, seed=20240517, min_points=3, max_points=8)
    return stats, time.perf_counter() - t


def test_criterion_1(report):
    t = time.perf_counter()
    inst = load("fixtures/example-5-2")
    rep = verify(inst)
    hyp = ("a", "b", "c", "d", "e1", "e2", "u1", "u2")
    certified = all(rep.ok(h) for h in hyp)
    D = inst.space.dist
    dist = lambda a, b: D[a, b]
    x0 = inst.space.index("0.5")
    trace, cert = iterate(inst.pair, x0, dist, 1e-12, 100)
    common = promote_to_common_fixed_point(inst.pair, cert.points[0], dist, 1e-12)
    elapsed = time.perf_counter() - t
    zero = inst.space.index("0")
    ok = (certified and rep.rank == "common-fixed-point-unique" and cert.residual == 0
          and trace.steps <= 3 and inst.label(cert.points[0]) == "0.5"
          and common.ok and common.points == (zero,) and list(rep.common_fixed_points) == [zero]
          and common.residual <= 1e-12 and elapsed < 1)
    report(1, ok, f"hypotheses certified={certified}, coincidence {inst.label(cert.points[0])} "
                  f"residual {cert.residual} in {trace.steps} steps, common fixed point "
                  f"{[inst.label(p) for p in common.points]}, {elapsed:.3f}s")
    assert ok


def test_criterion_2(report):
    t = time.perf_counter()
    inst = load("fixtures/example-5-2")
    witnesses = {}
    for k in (0.5, 0.9, 0.99):
        res = check_contraction(inst.space, inst.T, inst.g, inst.relation, make_catalog("I", {"k": k}))
        witnesses[k] = None if res.holds else tuple(inst.label(i) for i in res.worst_pair)
    elapsed = time.perf_counter() - t
    ok = all(w == ("1", "2") for w in witnesses.values()) and elapsed < 1
    report(2, ok, f"failing pairs {witnesses}, {elapsed:.3f}s")
    assert ok


def test_criterion_3(report):
    inst = load("fixtures/example-5-1")
    rep = verify(inst)
    hyp = ("a", "b", "c", "d", "e1", "e2")
    certified = all(rep.ok(h) for h in hyp)
    trace, cert = iterate(inst.pair, inst.x0, lambda a, b: abs(a - b), 1e-12, 100)
    common = promote_to_common_fixed_point(inst.pair, cert.points[0], lambda a, b: abs(a - b), 1e-12)
    ok = (certified and "continuous" in rep.branch and rep.rank == "common-fixed-point-unique"
          and abs(cert.points[0]) <= 1e-12 and common.ok and abs(common.points[0]) <= 1e-12
          and list(rep.common_fixed_points) == [0.0])
    report(3, ok, f"hypotheses certified={certified}, branch {rep.branch!r}, coincidence "
                  f"{cert.points[0]}, common fixed point {common.points}")
    assert ok


def test_criterion_4(report, bound_sweep):
    stats, elapsed = bound_sweep
    ok = (stats.passing == 500 and not stats.bound_failures and not stats.limit_failures
          and elapsed < 30)
    report(4, ok, f"{stats.passing} instances passing ({stats.generated} drawn), "
                  f"{len(stats.bound_failures)} bound violations, {len(stats.limit_failures)} "
                  f"limits off the coincidence set, {elapsed:.1f}s")
    assert ok


def test_criterion_5(report, bound_sweep):
    stats, _ = bound_sweep
    ok = stats.passing == 500 and not stats.u1_implication_failures
    report(5, ok, f"{stats.u1_alternative_holds} instances with u1' or u1'', "
                  f"{len(stats.u1_implication_failures)} without u1")
    assert ok


def test_criterion_6(report):
    grid = np.round(np.arange(0, 101) / 10, 10)
    failing = [id for id in CATALOG
               if not (check_g1(make_catalog(id), grid).passed and check_g2(make_catalog(id), grid).passed)]
    rejected = []
    for id, params in (("I", {"k": 1}), ("XV", {"k": 1 / 11}), ("XVI", {"a1": 2, "a2": 1})):
        try:
            make_catalog(id, params)
        except ValueError:
            rejected.append(id)
    g3 = check_g3(quotient_relation(), grid)
    ok = not failing and len(CATALOG) == 16 and rejected == ["I", "XV", "XVI"] and not g3.passed
    report(6, ok, f"{16 - len(failing)}/16 constructors pass G1/G2, rejected {rejected}, "
                  f"example quotient form G3 witness {tuple(float(v) for v in g3.witness)}")
    assert ok


def desk_run(N):
    inst = load("fixtures/desk-volterra")
    p = inst.problem(N)
    sol = solve(p, tol=1e-8, max_iter=60)
    return p, sol


def test_criterion_7_convergence():
    # the attainable part of criterion 7, kept as a regular passing test
    t = time.perf_counter()
    p, sol = desk_run(200)
    assert sol.iterations <= 60
    assert np.max(np.abs(sol.u - p.nodes)) <= 5e-3
    assert time.perf_counter() - t < 5


@pytest.mark.xfail(strict=True, reason=(
    "K = u/2 makes the integrand linear when u = t, so trapezoid quadrature is exact and the "
    "discrete solution is t itself; the converged residual is set by the iteration tolerance, "
    "not by h, so doubling N leaves it unchanged"))
def test_criterion_7(report):
    t = time.perf_counter()
    p200, s200 = desk_run(200)
    p400, s400 = desk_run(400)
    elapsed = time.perf_counter() - t
    err = float(np.max(np.abs(s200.u - p200.nodes)))
    ratio = residual(p200, s200.u) / residual(p400, s400.u)
    ok = s200.iterations <= 60 and err <= 5e-3 and elapsed < 5 and 3 <= ratio <= 5
    report(7, ok, f"{s200.iterations} iterations, sup error {err:.2e}, {elapsed:.2f}s, "
                  f"residual ratio N=200/N=400 {ratio:.4f} (required in [3, 5])")
    assert ok


def test_criterion_8(report):
    t = time.perf_counter()
    bad = compatibility_sweep(200, seed=1, max_points=5)
    report(8, not bad, f"{len(bad)} disagreements on 200 instances, {time.perf_counter() - t:.1f}s")
    assert not bad


def test_brute_force_helper_agrees_on_fixture():
    inst = load("fixtures/example-5-2")
    assert sorted(naive_coincidences(inst.T, inst.g)) == sorted(verify(inst).coincidence_points)
