import numpy as np
import pytest

from relfix.solver import HypothesisError, NonConvergenceError
from relfix.urysohn import (GridFunction, Kernel, NodeMap, UrysohnProblem, apply_T, check_H, residual,
                            solve)

from .oracles import DESK_ALPHA_SUP, picard_reference

DESK = {"kernel": {"kind": "linear", "lambda": 0.5}, "alpha": {"poly": [0, 1, -0.25]},
        "horizon": 0.9, "grid_size": 200, "eta": "universal", "phi": {"kind": "linear", "k": 0.5}}


def problem(**changes):
    spec = dict(DESK)
    spec.update(changes)
    return UrysohnProblem.from_spec(spec)


def test_grid_function_spacing():
    u = GridFunction(0.9, np.zeros(201))
    assert u.h == 0.9 / 200 and u.nodes[-1] == pytest.approx(0.9)


def test_exact_solution_is_reproduced():
    p = problem()
    assert np.max(np.abs(apply_T(p, p.nodes) - p.nodes)) < 1e-14


def test_zero_input_gives_alpha():
    p = problem()
    assert np.array_equal(apply_T(p, np.zeros(201)), p.alpha)
    assert residual(p, np.zeros(201)) == pytest.approx(DESK_ALPHA_SUP, abs=1e-15)


def test_zero_problem():
    p = problem(kernel={"kind": "expr", "expr": "0"}, alpha={"poly": [0]})
    assert np.all(apply_T(p, np.ones(201)) == 0)
    assert residual(p, np.zeros(201)) == 0


def test_t_dependent_kernel_matches_trapezoid():
    p = problem(kernel={"kind": "expr", "expr": "t * s * u"}, grid_size=40)
    u = np.cos(p.nodes)
    t = p.nodes
    h = t[1] - t[0]

    def trap(f):
        return h * (f.sum() - (f[0] + f[-1]) / 2) if len(f) > 1 else 0.0

    expected = [trap(t[i] * t[: i + 1] * u[: i + 1]) for i in range(41)]
    assert np.allclose(apply_T(p, u) - p.alpha, expected, atol=1e-14)


def test_sine_kernel_order_two():
    # lambda * sin(u): compare the discrete solution against a much finer grid
    spec = {"kind": "sin", "lambda": 0.8}
    fine = solve(problem(kernel=spec, grid_size=3200), tol=1e-13)
    errs = []
    for N in (50, 100, 200):
        sol = solve(problem(kernel=spec, grid_size=N), tol=1e-13)
        errs.append(abs(sol.u[-1] - fine.u[-1]))
    assert 3 < errs[0] / errs[1] < 5 and 3 < errs[1] / errs[2] < 5


def test_h_report_desk():
    rep = check_H(problem())
    assert rep["H1"].status == "holds"
    assert rep["H2"].status == "holds-on-samples"
    assert rep["H3"].status == "asserted"
    assert rep["H4"].status == "holds-on-samples"
    assert rep["H5"].status == "holds"


def test_long_horizon_fails_h5():
    rep = check_H(problem(horizon=1.5))
    assert rep["H5"].status == "fails"
    with pytest.raises(HypothesisError, match="H5"):
        solve(problem(horizon=1.5))


def test_h1_scan_with_order_comparator():
    p = problem(eta="order")
    # u0 = 0 lies below its image alpha >= 0: eta(0, alpha) = -alpha <= 0 at every node
    assert check_H(p, np.zeros(201))["H1"].status == "holds"
    above = check_H(p, np.ones(201))
    assert above["H1"].status == "fails" and above["H1"].witness == 0.0


def test_h4_fails_with_small_phi():
    rep = check_H(problem(phi={"kind": "linear", "k": 0.4}))
    assert rep["H4"].status == "fails"


def test_desk_solution():
    p = problem()
    sol = solve(p, tol=1e-8, max_iter=60)
    assert sol.iterations <= 60
    assert np.max(np.abs(sol.u - p.nodes)) <= 5e-3
    ratios = np.array(sol.trace.residuals[1:]) / np.array(sol.trace.residuals[:-1])
    assert np.all(ratios <= 0.55)


def test_start_at_exact_solution():
    p = problem()
    sol = solve(p, p.nodes, tol=1e-12)
    assert sol.iterations == 0


def test_zero_kernel_one_step():
    p = problem(kernel={"kind": "expr", "expr": "0"})
    sol = solve(p, tol=1e-15)
    assert sol.iterations == 1 and np.array_equal(sol.u, p.alpha)


def test_universal_relation_matches_plain_iteration_bitwise():
    p = problem()
    ref = picard_reference(p.alpha, 0.5, 0.9 / 200, 1e-10)
    assert np.array_equal(solve(p, tol=1e-10).u, ref)


def test_non_identity_g():
    p = problem(g={"kind": "expr", "expr": "2*x", "inverse": "x/2"})
    sol = solve(p, tol=1e-10)
    assert residual(p, sol.u) <= 1e-10
    # coincidence: g u = T u, so 2u matches the image rather than u itself
    assert np.max(np.abs(2 * sol.u - apply_T(p, sol.u))) <= 1e-9


def test_bad_inverse_rejected():
    with pytest.raises(ValueError, match="inverse"):
        NodeMap.from_spec({"kind": "expr", "expr": "2*x", "inverse": "x"})


def test_non_convergence():
    with pytest.raises(NonConvergenceError):
        solve(problem(), tol=1e-14, max_iter=3)


def test_non_finite_kernel():
    p = problem(kernel={"kind": "expr", "expr": "1/(u - u)"})
    with pytest.raises(FloatingPointError):
        with np.errstate(divide="ignore", invalid="ignore"):
            apply_T(p, np.zeros(201))


def test_alpha_samples_and_regrid():
    p = problem(alpha={"samples": list(np.linspace(0, 1, 201))})
    assert p.alpha[-1] == 1
    with pytest.raises(ValueError):
        p.with_grid(400)
    assert problem().with_grid(400).grid_size == 400


def test_solution_export():
    p = problem(grid_size=4)
    text = solve(p, tol=1e-12).to_text()
    lines = text.strip().splitlines()
    assert lines[0] == "t,u" and len(lines) == 6
