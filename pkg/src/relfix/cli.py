"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure (a hypothesis or the
requested conclusion does not hold), 2 input error, 3 non-convergence.
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .contraction import catalog_listing
from .expr import Expression
from .generate import compatibility_sweep, sweep
from .instance import FIXTURE_DIR, FiniteInstance, InstanceError, digest, load
from .relation import find_g_path
from .solver import (HypothesisError, NonConvergenceError, error_bounds, find_start, iterate,
                     promote_to_common_fixed_point)
from .urysohn import check_H, solve as solve_urysohn
from .verifier import RANKS, SoundnessError, verify

EXIT_OK, EXIT_MATH, EXIT_INPUT, EXIT_NONCONV = 0, 1, 2, 3


def _labeler(inst):
    if isinstance(inst, FiniteInstance):
        return lambda i: inst.space.labels[i]
    return lambda x: format(float(x), ".12g")


def _fmt_witness(w, lab):
    if w is None:
        return ""
    if isinstance(w, (int, np.integer)):
        return lab(int(w))
    if isinstance(w, tuple) and all(isinstance(v, (int, np.integer)) for v in w):
        return "(" + ", ".join(lab(int(v)) for v in w) + ")"
    if isinstance(w, tuple) and all(isinstance(v, float) for v in w):
        return "(" + ", ".join(format(v, ".6g") for v in w) + ")"
    return str(w)


def _emit(args, text_lines, machine):
    if args.report == "machine":
        print(json.dumps(machine, sort_keys=True, default=_jsonable))
    else:
        print("\n".join(text_lines))


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    return str(o)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    inst = load(args.instance)
    if inst.mode == "urysohn":
        raise InstanceError("verify needs a finite or continuous instance; use 'urysohn'")
    rep = verify(inst)
    lab = _labeler(inst)
    want = args.require or inst.require
    if want not in RANKS:
        raise InstanceError(f"unknown rank {want!r}; choose from {', '.join(RANKS)}")
    ok = rep.at_least(want)
    lines = [f"instance {inst.name or args.instance} [{digest(inst)}] mode={rep.mode}",
             f"{'hypothesis':<14}{'status':<18}witness / detail"]
    for v in rep.verdicts.values():
        w = _fmt_witness(v.witness, lab)
        lines.append(f"{v.id:<14}{v.status:<18}{w + ('  ' if w else '')}{v.detail}")
    lines += [f"contraction: {rep.contraction}",
              f"branch: {rep.branch or 'none'}",
              f"coincidence points: {', '.join(lab(x) for x in rep.coincidence_points) or 'none'}",
              f"points of coincidence: {', '.join(lab(x) for x in rep.points_of_coincidence) or 'none'}",
              f"common fixed points: {', '.join(lab(x) for x in rep.common_fixed_points) or 'none'}",
              f"rank: {rep.rank} (required {want}: {'met' if ok else 'NOT met'})"]
    lines += rep.notes
    if not ok:
        failed = [v for v in rep.verdicts.values() if not v.ok and v.status != "not-applicable"]
        if failed:
            lines.append(f"first failure: {failed[0].id} {_fmt_witness(failed[0].witness, lab)}".rstrip())
    machine = {"instance": digest(inst), "rank": rep.rank, "required": want, "ok": ok,
               "verdicts": {k: {"status": v.status, "witness": _fmt_witness(v.witness, lab),
                                "detail": v.detail} for k, v in rep.verdicts.items()},
               "contraction": rep.contraction, "branch": rep.branch,
               "coincidence_points": [lab(x) for x in rep.coincidence_points],
               "common_fixed_points": [lab(x) for x in rep.common_fixed_points]}
    _emit(args, lines, machine)
    return EXIT_OK if ok else EXIT_MATH


def cmd_solve(args) -> int:
    inst = load(args.instance)
    if inst.mode == "urysohn":
        return cmd_urysohn(args)
    lab = _labeler(inst)
    pair = inst.pair
    tol = args.tol if args.tol is not None else inst.tol
    max_iter = args.max_iter if args.max_iter is not None else inst.max_iter
    if inst.mode == "finite":
        D = inst.space.dist
        dist = lambda a, b: D[a, b]
        if args.x0 is not None:
            x0 = inst.space.index(args.x0)
        else:
            x0 = inst.x0 if inst.x0 is not None else find_start(pair, inst.relation, range(inst.space.n))
        if x0 is None:
            print("no starting point x0 with (g x0, T x0) in R", file=sys.stderr)
            return EXIT_MATH
        if (inst.g[x0], inst.T[x0]) not in inst.relation:
            print(f"hypothesis (a) fails at x0 = {lab(x0)}", file=sys.stderr)
            return EXIT_MATH
    else:
        dist = lambda a, b: abs(a - b)
        x0 = float(args.x0) if args.x0 is not None else inst.x0
        if x0 is None or not inst.related(inst.g(x0), inst.T(x0)):
            print("hypothesis (a) fails at the given x0", file=sys.stderr)
            return EXIT_MATH
    trace, cert = iterate(pair, x0, dist, tol, max_iter)
    G = next((G for G in inst.contractions if G.phi is not None), None)
    bounds = error_bounds(trace, G.phi, dist) if G is not None else None
    lines = [f"{'n':>4}  {'x_n':>10}  {'g x_n':>10}  {'d(gx_n, Tx_n)':>16}  {'phi^n(d0)':>12}"]
    for n, x, gx, r, b in trace.records(lab):
        lines.append(f"{n:>4}  {x:>10}  {gx:>10}  {r:>16.6g}  {'' if b is None else format(b, '.6g'):>12}")
    w = cert.points[0]
    lines.append(f"certificate: coincidence point {lab(w)}, residual {cert.residual:.3g}, "
                 f"{trace.steps} iterations")
    if bounds is not None:
        lines.append(f"error bound phi^n(d0) with {G.name}: {'holds' if bounds.holds else 'VIOLATED'}")
    common = promote_to_common_fixed_point(pair, w, dist, tol)
    if common.ok:
        lines.append(f"certificate: common fixed point {lab(common.points[0])}, residual {common.residual:.3g}")
    else:
        lines.append(f"no common fixed point from {lab(w)}: {common.evidence}")
    machine = {"coincidence": lab(w), "residual": cert.residual, "iterations": trace.steps,
               "residuals": trace.residuals, "bounds": trace.bounds,
               "bounds_hold": None if bounds is None else bounds.holds,
               "common_fixed_point": lab(common.points[0]) if common.ok else None}
    _emit(args, lines, machine)
    return EXIT_OK


def cmd_path(args) -> int:
    inst = load(args.instance)
    if not isinstance(inst, FiniteInstance):
        raise InstanceError("path search needs a finite instance")
    lab = _labeler(inst)
    a, b = inst.space.index(args.alpha), inst.space.index(args.beta)
    try:
        p = find_g_path(inst.relation, inst.g, inst.T, a, b, not args.plain, domain=set(inst.g))
    except ValueError as exc:
        print(f"no g-path: {exc}")
        return EXIT_MATH
    if p is None:
        _emit(args, [f"no g-path from {args.alpha} to {args.beta}"],
              {"alpha": args.alpha, "beta": args.beta, "path": None})
        return EXIT_MATH
    ws = [lab(w) for w in p.witnesses]
    images = [lab(inst.g[w]) for w in p.witnesses]
    _emit(args, [f"g-path of length {p.length}: witnesses {' -> '.join(ws)}",
                 f"g-images: {' -> '.join(images)}"],
          {"alpha": args.alpha, "beta": args.beta, "length": p.length, "witnesses": ws})
    return EXIT_OK


def cmd_urysohn(args) -> int:
    inst = load(args.instance)
    if inst.mode != "urysohn":
        raise InstanceError("not an urysohn instance")
    problem = inst.problem(args.grid)
    tol = args.tol if args.tol is not None else inst.tol
    max_iter = args.max_iter if args.max_iter is not None else inst.max_iter
    u0 = None if inst.u0 is None else problem.grid(inst.u0)
    hrep = check_H(problem, u0)
    lines = [f"urysohn problem {inst.name} [{digest(inst)}]: N = {problem.grid_size}, T = {problem.horizon:g}"]
    lines += [f"  {h.condition}: {h.status:<18}{h.detail}" for h in hrep.values()]
    machine = {"H": {k: h.status for k, h in hrep.items()}}
    if not (hrep["H1"].ok and hrep["H5"].ok):
        lines.append("H1 or H5 fails; not iterating")
        _emit(args, lines, machine)
        return EXIT_MATH
    sol = solve_urysohn(problem, u0, tol, max_iter)
    lines.append(f"converged in {sol.iterations} iterations, final residual {sol.residual:.3e}")
    machine.update(iterations=sol.iterations, residual=sol.residual, residuals=sol.trace.residuals)
    if inst.exact:
        exact = np.broadcast_to(Expression(inst.exact, ("t",))(sol.nodes), sol.nodes.shape)
        err = float(np.max(np.abs(sol.u - exact)))
        lines.append(f"sup error against exact solution {inst.exact}: {err:.3e}")
        machine["sup_error"] = err
    if args.output:
        Path(args.output).write_text(sol.to_text())
        lines.append(f"solution written to {args.output}")
        machine["output"] = args.output
    _emit(args, lines, machine)
    return EXIT_OK


def cmd_catalog(args) -> int:
    print("\n".join(catalog_listing()))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    cfg = json.loads((FIXTURE_DIR / "fuzz-seed.json").read_text())
    seed = args.seed if args.seed is not None else cfg["seed"]
    stats = sweep(args.count, seed, cfg["min_points"], cfg["max_points"], tuple(cfg["catalog"]))
    bad_compat = compatibility_sweep(args.compat_count, seed)
    failures = (len(stats.bound_failures) + len(stats.limit_failures)
                + len(stats.u1_implication_failures) + len(bad_compat))
    lines = [f"seed {seed}: drew {stats.generated} instances, {stats.passing} passed verification",
             f"error-bound violations: {len(stats.bound_failures)}",
             f"limits outside the coincidence set: {len(stats.limit_failures)}",
             f"u1' or u1'' without u1: {len(stats.u1_implication_failures)} "
             f"(of {stats.u1_alternative_holds} with an alternative)",
             f"compatibility disagreements: {len(bad_compat)} of {args.compat_count}"]
    machine = {"seed": seed, "generated": stats.generated, "passing": stats.passing,
               "bound_failures": stats.bound_failures, "limit_failures": stats.limit_failures,
               "u1_implication_failures": stats.u1_implication_failures,
               "compatibility_disagreements": len(bad_compat)}
    _emit(args, lines, machine)
    return EXIT_OK if failures == 0 and stats.passing == args.count else EXIT_MATH


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("text", "machine"), default="text")
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--grid", type=int, help="grid size N for integral equations")

    p = argparse.ArgumentParser(prog="relfix", description="Coincidence and common fixed points of "
                                "mapping pairs on metric spaces with a binary relation.")
    p.add_argument("--version", action="version", version=f"relfix {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="check every hypothesis and rank the conclusion")
    s.add_argument("instance")
    s.add_argument("--require", choices=RANKS, help="rank needed for exit status 0")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", parents=[common], help="run the coincidence iteration")
    s.add_argument("instance")
    s.add_argument("--x0", help="starting point (label, or number for continuous instances)")
    s.add_argument("--output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("path", parents=[common], help="shortest g-path between two points of T(X)")
    s.add_argument("instance")
    s.add_argument("alpha")
    s.add_argument("beta")
    s.add_argument("--plain", action="store_true", help="drop the [gw, Tw] condition on interior witnesses")
    s.set_defaults(func=cmd_path)

    s = sub.add_parser("urysohn", parents=[common], help="solve an integral-equation instance")
    s.add_argument("instance")
    s.add_argument("--output", help="write (t, u) pairs as CSV")
    s.set_defaults(func=cmd_urysohn)

    s = sub.add_parser("catalog", parents=[common], help="list implicit relations and explicit conditions")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("fuzz", parents=[common], help="random-instance soundness sweep")
    s.add_argument("--count", type=int, default=500, help="instances that must pass verification")
    s.add_argument("--compat-count", type=int, default=200)
    s.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (HypothesisError, SoundnessError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
