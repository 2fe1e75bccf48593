"""Decide the coincidence / common fixed point hypotheses on an instance.

Finite instances are decided exhaustively.  Continuous instances (maps on an
interval) are checked on a sample of points, and hypotheses that quantify
over all sequences are taken from the instance's asserted flags; every
verdict records which of these happened.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .contraction import ImplicitRelation, check_g1, check_g2, check_g3
from .metric import finite_d_self_closed, finite_r_completeness, validate_metric
from .relation import (Relation, find_g_path, is_complete_relation, is_g_directed,
                       is_tg_closed, symmetric_closure)
from .solver import MappingPair, NonConvergenceError, HypothesisError, find_start, iterate

TOL = 1e-12

HOLDS, FAILS, ASSERTED, NA, SAMPLED = "holds", "fails", "asserted", "not-applicable", "holds-on-samples"
RANKS = ("none", "coincidence", "point-of-coincidence-unique", "common-fixed-point-unique")


class SoundnessError(AssertionError):
    """Hypotheses certified but the brute-force answer disagrees."""


@dataclass
class Verdict:
    id: str
    status: str
    witness: Any = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (HOLDS, ASSERTED, SAMPLED)


@dataclass
class VerificationReport:
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    rank: str = "none"
    coincidence_points: Tuple = ()
    points_of_coincidence: Tuple = ()
    common_fixed_points: Tuple = ()
    contraction: str = ""
    branch: str = ""
    mode: str = "finite"
    notes: List[str] = field(default_factory=list)

    def add(self, id, status, witness=None, detail=""):
        self.verdicts[id] = Verdict(id, status, witness, detail)
        return self.verdicts[id]

    def __getitem__(self, id) -> Verdict:
        return self.verdicts[id]

    def ok(self, id) -> bool:
        return id in self.verdicts and self.verdicts[id].ok

    def at_least(self, rank: str) -> bool:
        return RANKS.index(self.rank) >= RANKS.index(rank)


# ---------------------------------------------------------------------------
# component checks (finite)
# ---------------------------------------------------------------------------

def six_tuple(D, T, g, x, y):
    return (D[T[x], T[y]], D[g[x], g[y]], D[g[x], T[x]], D[g[y], T[y]], D[g[x], T[y]], D[g[y], T[x]])


@dataclass
class ContractionResult:
    holds: bool
    worst_pair: Optional[Tuple[int, int]]
    worst_value: float
    pairs_checked: int


def check_contraction(space, T, g, R: Relation, G: ImplicitRelation) -> ContractionResult:
    """Evaluate ``G`` on every ``(x, y)`` with ``(gx, gy) in R``.

    Holds iff every value is ``<= 1e-12``.  The reported worst pair maximises
    ``G`` among pairs with ``Tx != Ty``: pairs with ``d(Tx, Ty) = 0`` put no
    constraint on the maps and would otherwise dominate with ``G = 0``.  When
    the condition fails, the worst pair is the largest violation.
    """
    D = space.dist
    best, best_pair = -np.inf, None
    top, top_pair = -np.inf, None
    checked = 0
    for x in range(space.n):
        for y in range(space.n):
            if (g[x], g[y]) not in R:
                continue
            checked += 1
            v = G.evaluator(*six_tuple(D, T, g, x, y))
            if v > top:
                top, top_pair = v, (x, y)
            if D[T[x], T[y]] > 0 and v > best:
                best, best_pair = v, (x, y)
    holds = top <= TOL
    if not holds or best_pair is None:
        return ContractionResult(holds, top_pair, float(top), checked)
    return ContractionResult(holds, best_pair, float(best), checked)


def check_contraction_explicit(space, T, g, R: Relation, condition) -> ContractionResult:
    D = space.dist
    checked = 0
    for x in range(space.n):
        for y in range(space.n):
            if (g[x], g[y]) not in R:
                continue
            checked += 1
            if not condition(six_tuple(D, T, g, x, y)):
                return ContractionResult(False, (x, y), float("nan"), checked)
    return ContractionResult(True, None, float("nan"), checked)


def brute_force_coincidence(T, g) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    C = tuple(x for x in range(len(T)) if T[x] == g[x])
    return C, tuple(sorted({g[x] for x in C}))


def common_fixed_points(T, g) -> Tuple[int, ...]:
    return tuple(x for x in range(len(T)) if T[x] == x == g[x])


@dataclass
class PathTable:
    holds: bool
    lengths: Dict[Tuple[int, int], Optional[int]]
    failing: Optional[Tuple[int, int]] = None


def check_u1(T, g, R: Relation, interior_condition: bool = True) -> PathTable:
    """Every pair of T-images joined by a g-path in the symmetric closure of R on g(X)."""
    images = sorted(set(T))
    gX = set(g)
    lengths = {}
    failing = None
    for a in images:
        for b in images:
            if a not in gX or b not in gX:
                lengths[(a, b)] = None
            else:
                p = find_g_path(R, g, T, a, b, interior_condition, domain=gX)
                lengths[(a, b)] = None if p is None else p.length
            if lengths[(a, b)] is None and failing is None:
                failing = (a, b)
    return PathTable(failing is None, lengths, failing)


def check_u1_alternatives(T, g, R: Relation) -> Tuple[Verdict, Verdict]:
    """The two sufficient conditions for the path hypothesis.

    ``u1'``: R restricted to g(X) is complete.  ``u1''``: T(X) is directed for
    ``(g, sym(R)|g(X))`` and every directing ``z`` has ``[gz, Tz]`` in
    ``sym(R)|g(X)``.
    """
    gX = sorted(set(g))
    ok, pair = is_complete_relation(R, gX)
    u1p = Verdict("u1'", HOLDS if ok else FAILS, pair,
                  "R restricted to g(X) is complete" if ok else "incomparable pair in g(X)")
    S = symmetric_closure(R)
    TX = sorted(set(T))
    if not set(TX) <= set(gX):
        return u1p, Verdict("u1''", FAILS, None, "T(X) not contained in g(X)")
    dr = is_g_directed(TX, g, S, domain=gX)
    if not dr.holds:
        return u1p, Verdict("u1''", FAILS, dr.failing_pair, "T(X) is not (g, R^s|g(X))-directed")
    inside = set(gX)
    bad = [z for z in sorted(dr.delta)
           if not (T[z] in inside and S.comparable(g[z], T[z]))]
    if bad:
        return u1p, Verdict("u1''", FAILS, bad[0], "directing point z with [gz, Tz] unrelated")
    return u1p, Verdict("u1''", HOLDS, dict(dr.witnesses), "directed, and every z lies in X(T, g, R^s)")


def check_compatibility_finite(T, g, R: Relation) -> Tuple[bool, Optional[int]]:
    """R-compatibility on a finite space.

    A sequence with ``g x_n`` and ``T x_n`` converging to a common limit is
    eventually inside the coincidence points with one point of coincidence
    ``v``; both image sequences are then eventually constant at ``v``, which
    is R-preserving only if ``(v, v)`` is in R.  So the pair is R-compatible
    iff ``g v == T v`` for every point of coincidence ``v`` with ``(v, v)``
    in R.  Returns the offending coincidence point otherwise.
    """
    for x in range(len(T)):
        if T[x] == g[x]:
            v = g[x]
            if (v, v) in R and g[v] != T[v]:
                return False, x
    return True, None


def compatibility_oracle(T, g, R: Relation, length: Optional[int] = None) -> Tuple[bool, Optional[tuple]]:
    """Enumerate eventually periodic sequences and test the compatibility limit.

    A sequence is a lasso ``s_0 .. s_{c-1} (s_c .. s_m)^inf`` of total length
    ``m + 1 <= length`` (default ``n + 2``).  It qualifies when ``{T s}`` and
    ``{g s}`` are R-preserving (including the wrap-around step) and both
    converge to the same limit, i.e. are constant and equal on the cycle.  The
    limit of ``d(g(T s_n), T(g s_n))`` is then its value on the cycle, which
    must be zero.  Returns a violating lasso ``(sequence, cycle_start)``.
    """
    n = len(T)
    length = n + 2 if length is None else length

    def step_ok(a, b):
        return (g[a], g[b]) in R and (T[a], T[b]) in R

    stack = [(x,) for x in range(n)]
    while stack:
        seq = stack.pop()
        for c in range(len(seq)):
            cycle = seq[c:]
            if not step_ok(seq[-1], seq[c]):
                continue
            vals = {g[s] for s in cycle} | {T[s] for s in cycle}
            if len(vals) != 1:
                continue
            if any(g[T[s]] != T[g[s]] for s in cycle):
                return False, (seq, c)
        if len(seq) < length:
            for y in range(n - 1, -1, -1):
                if step_ok(seq[-1], y):
                    stack.append(seq + (y,))
    return True, None


def gr_continuity(T, g, R: Relation) -> Tuple[bool, Optional[int]]:
    """Exact (g, R)-continuity of T on a finite space.

    An R-preserving ``{x_n}`` with ``g x_n -> g x`` eventually stays in
    ``P = g^{-1}(g x)``.  ``T x_n -> T x`` fails exactly when such a sequence
    visits some ``x'`` in P with ``T x' != T x`` infinitely often, i.e. when
    ``x'`` lies on a cycle of R restricted to P.
    """
    n = len(T)
    for x in range(n):
        P = [p for p in range(n) if g[p] == g[x]]
        for bad in P:
            if T[bad] == T[x]:
                continue
            seen, frontier = set(), [bad]
            while frontier:
                u = frontier.pop()
                for v in P:
                    if (u, v) in R:
                        if v == bad:
                            return False, x
                        if v not in seen:
                            seen.add(v)
                            frontier.append(v)
    return True, None


# ---------------------------------------------------------------------------
# full verification
# ---------------------------------------------------------------------------

def _class_checks(G: ImplicitRelation):
    """G1, G2, G3 reports, computed once per relation object."""
    cached = getattr(G, "_class_reports", None)
    if cached is None:
        cached = (check_g1(G), check_g2(G), check_g3(G))
        G._class_reports = cached
    return cached


def _choose_contraction(report, contractions, check):
    """Pick the first contraction in the class satisfying the inequality."""
    chosen = None
    for i, G in enumerate(contractions):
        res = check(G)
        g1, g2, _ = _class_checks(G)
        tag = f"d[{i}]"
        status = HOLDS if res.holds else FAILS
        detail = f"{G.name}: inequality {'holds' if res.holds else 'fails'}"
        if not g1.passed:
            detail += f"; G1 fails ({g1.message})"
        if not g2.passed:
            detail += "; G2 fails"
        if len(contractions) > 1:
            report.add(tag, status if (g1.passed and g2.passed) or not res.holds else FAILS,
                       res.worst_pair, detail)
        if chosen is None and res.holds and g1.passed and g2.passed:
            chosen = (G, res, g1, g2)
    if chosen is None:
        G = contractions[0]
        res = check(G)
        g1, g2, _ = _class_checks(G)
        return G, res, g1, g2, False
    return (*chosen, True)


def verify(instance) -> VerificationReport:
    """Decide every hypothesis on a finite instance and rank the conclusion."""
    if getattr(instance, "mode", "finite") == "continuous":
        return verify_continuous(instance)
    space, R, T, g = instance.space, instance.relation, instance.T, instance.g
    n = space.n
    rep = VerificationReport(mode="finite")
    ok, triple = validate_metric(space)
    if not ok:
        raise ValueError(f"distance matrix is not a metric (violating triple {triple})")
    pair = MappingPair.from_tables(T, g)
    D = space.dist
    dist = lambda a, b: D[a, b]

    x0 = instance.x0
    if x0 is None:
        x0 = find_start(pair, R, range(n))
        rep.add("a", HOLDS if x0 is not None else FAILS, x0,
                "least x0 with (g x0, T x0) in R" if x0 is not None else "no x0 with (g x0, T x0) in R")
    else:
        ok = (g[x0], T[x0]) in R
        rep.add("a", HOLDS if ok else FAILS, x0, "given x0")

    TX, gX, Y = set(T), set(g), set(space.Y)
    bad = sorted(TX - (Y & gX))
    rep.add("b", FAILS if bad else HOLDS, bad[0] if bad else None, "T(X) in Y and g(X)")
    rep.add("Y-R-complete", HOLDS, None, finite_r_completeness(space, R).reason)

    closed, wit = is_tg_closed(R, T, g)
    rep.add("c", HOLDS if closed else FAILS, wit, "R is (T, g)-closed")

    G, res, g1, g2, found = _choose_contraction(rep, instance.contractions,
                                                lambda G: check_contraction(space, T, g, R, G))
    rep.contraction = G.name
    rep.add("G1", HOLDS if g1.passed else FAILS, g1.witness, g1.message)
    rep.add("G2", HOLDS if g2.passed else FAILS, g2.witness, "")
    rep.add("d", HOLDS if found else FAILS, res.worst_pair,
            f"{G.name}; max G = {res.worst_value:.6g} over {res.pairs_checked} related pairs")

    missing = sorted(Y - gX)
    rep.add("e1", FAILS if missing else HOLDS, missing[0] if missing else None, "Y in g(X)")
    grc, grc_w = gr_continuity(T, g, R)
    branches = [("T (g,R)-continuous", grc),
                ("T and g continuous", True),
                ("R|Y d-self-closed", finite_d_self_closed(space, R).holds)]
    branch = next(name for name, holds in branches if holds)
    rep.add("e2", HOLDS, branch,
            "; ".join(f"{name}: {'yes' if h else 'no'}" for name, h in branches)
            + " (finite space: convergent sequences are eventually constant)")
    compat, cw = check_compatibility_finite(T, g, R)
    rep.add("e'1", HOLDS if compat else FAILS, cw, "R-compatible")
    rep.add("e'2", HOLDS, None, "T and g are R-continuous (finite space)")

    base = all(rep.ok(h) for h in ("a", "b", "c", "d"))
    e_route = rep.ok("e1") and rep.ok("e2")
    e_alt = rep.ok("e'1") and rep.ok("e'2")
    rep.branch = ("(e) " + branch) if e_route else ("(e') compatible + R-continuous" if e_alt else "")

    C, POC = brute_force_coincidence(T, g)
    rep.coincidence_points, rep.points_of_coincidence = C, POC
    rep.common_fixed_points = common_fixed_points(T, g)

    table = check_u1(T, g, R, interior_condition=getattr(instance, "path_mode", "interior") == "interior")
    lab = space.labels
    rep.add("u1", HOLDS if table.holds else FAILS, table.failing,
            "path lengths " + ", ".join(f"{lab[a]}->{lab[b]}: {l}"
                                        for (a, b), l in sorted(table.lengths.items())))
    u1p, u1pp = check_u1_alternatives(T, g, R)
    if u1pp.ok:
        zs, u1pp.witness = u1pp.witness, None
        u1pp.detail += "; least z per pair: " + ", ".join(
            f"({lab[a]}, {lab[b]})->{lab[z]}" for (a, b), z in sorted(zs.items()))
    rep.verdicts[u1p.id] = u1p
    rep.verdicts[u1pp.id] = u1pp
    non_commuting = [w for w in C if T[g[w]] != g[T[w]]]
    rep.add("u2", FAILS if non_commuting else HOLDS, non_commuting[0] if non_commuting else None,
            "T and g commute at every coincidence point")
    g3 = _class_checks(G)[2]
    rep.add("G3", HOLDS if g3.passed else FAILS, g3.witness, "")

    rep.rank = _rank(rep, base and (e_route or e_alt))
    _cross_check(rep, x0, pair, dist, instance)
    return rep


def _rank(rep, existence: bool) -> str:
    if not existence:
        return "none"
    if not (rep.ok("u1") or rep.ok("u1'") or rep.ok("u1''")) or not rep.ok("G3"):
        return "coincidence"
    if not rep.ok("u2"):
        return "point-of-coincidence-unique"
    return "common-fixed-point-unique"


def _cross_check(rep, x0, pair, dist, instance):
    if rep.rank == "none":
        return
    if not rep.coincidence_points:
        raise SoundnessError("hypotheses certified but no coincidence point exists")
    if rep.at_least("point-of-coincidence-unique") and len(rep.points_of_coincidence) != 1:
        raise SoundnessError(f"uniqueness certified but points of coincidence are {rep.points_of_coincidence}")
    if rep.rank == "common-fixed-point-unique" and len(rep.common_fixed_points) != 1:
        raise SoundnessError(f"unique common fixed point certified but found {rep.common_fixed_points}")
    rep.notes.append("brute-force enumeration agrees with the certified conclusion")


# ---------------------------------------------------------------------------
# sampled verification for maps on an interval
# ---------------------------------------------------------------------------

def verify_continuous(inst) -> VerificationReport:
    """Check a continuous instance on its sample points.

    Pairwise conditions are checked over all sample pairs and reported as
    holding on samples; R-completeness of Y and the continuity branches are
    taken from the instance's assertions.  The coincidence point is obtained
    by running the iteration from ``x0`` with the supplied g-inverse.
    """
    rep = VerificationReport(mode="continuous")
    S = inst.sample_points()
    T, g, ginv, rel = inst.T, inst.g, inst.g_inverse, inst.related
    d = lambda a, b: abs(a - b)
    tol = inst.tol
    asserted = inst.assertions

    x0 = inst.x0
    ok = x0 is not None and rel(g(x0), T(x0))
    rep.add("a", HOLDS if ok else FAILS, x0, "given x0")

    def in_gX(y):
        x = ginv(y)
        return inst.in_space(x) and abs(g(x) - y) <= 1e-10

    bad = [x for x in S if not (inst.in_Y(T(x)) and in_gX(T(x)))]
    rep.add("b", FAILS if bad else SAMPLED, bad[0] if bad else None, "T(x) in Y and g(X) at samples")
    rep.add("Y-R-complete", ASSERTED if asserted.get("Y_R_complete") else FAILS, None, "asserted by instance")

    related_pairs = [(x, y) for x in S for y in S if rel(g(x), g(y))]
    bad = next(((x, y) for x, y in related_pairs if not rel(T(x), T(y))), None)
    rep.add("c", FAILS if bad else SAMPLED, bad, f"(T, g)-closed on {len(related_pairs)} related sample pairs")

    def contraction(G):
        worst, wp = -np.inf, None
        for x, y in related_pairs:
            v = G.evaluator(d(T(x), T(y)), d(g(x), g(y)), d(g(x), T(x)),
                            d(g(y), T(y)), d(g(x), T(y)), d(g(y), T(x)))
            if v > worst:
                worst, wp = v, (x, y)
        return ContractionResult(worst <= TOL, wp, float(worst), len(related_pairs))

    G, res, g1, g2, found = _choose_contraction(rep, inst.contractions, contraction)
    rep.contraction = G.name
    rep.add("G1", HOLDS if g1.passed else FAILS, g1.witness, g1.message)
    rep.add("G2", HOLDS if g2.passed else FAILS, g2.witness, "")
    rep.add("d", SAMPLED if found else FAILS, res.worst_pair, f"{G.name}; max G = {res.worst_value:.6g}")

    Ys = inst.Y_sample()
    missing = [y for y in Ys if not in_gX(y)]
    rep.add("e1", FAILS if missing else SAMPLED, missing[0] if missing else None, "Y in g(X) via g-inverse probes")
    branches = [(k, asserted.get(key)) for k, key in (("T (g,R)-continuous", "T_gR_continuous"),
                                                      ("T and g continuous", "T_g_continuous"),
                                                      ("R|Y d-self-closed", "R_Y_d_self_closed"))]
    branch = next((name for name, h in branches if h), None)
    rep.add("e2", ASSERTED if branch else FAILS, branch, "asserted by instance")
    rep.add("e'1", ASSERTED if asserted.get("R_compatible") else NA, None, "")
    rep.add("e'2", ASSERTED if asserted.get("R_continuous") else NA, None, "")

    base = all(rep.ok(h) for h in ("a", "b", "c", "d", "Y-R-complete"))
    e_route = rep.ok("e1") and rep.ok("e2")
    e_alt = rep.ok("e'1") and rep.ok("e'2")
    rep.branch = ("(e) " + branch) if e_route else ("(e') asserted" if e_alt else "")

    pair = MappingPair.from_functions(T, g, lambda y: ginv(y) if in_gX(y) else None)
    C = [x for x in S if d(T(x), g(x)) <= tol]
    if x0 is not None:
        try:
            _, cert = iterate(pair, x0, d, tol, inst.max_iter)
            if cert.points[0] not in C:
                C.append(cert.points[0])
        except (HypothesisError, NonConvergenceError) as exc:
            rep.notes.append(f"iteration from x0 failed: {exc}")
    C = tuple(sorted(C))
    rep.coincidence_points = C
    rep.points_of_coincidence = tuple(sorted({float(g(x)) for x in C}))
    rep.common_fixed_points = tuple(x for x in C if d(x, T(x)) <= tol and d(x, g(x)) <= tol)

    # path hypothesis over sampled T-images, witnesses drawn from samples plus g-preimages
    images = sorted({float(T(x)) for x in S})
    witnesses = sorted(set(S) | {ginv(a) for a in images if in_gX(a)})
    gw = [g(w) for w in witnesses]
    sym = lambda a, b: rel(a, b) or rel(b, a)
    failing = None
    for a in images:
        for b in images:
            if not _sampled_path(witnesses, gw, [T(w) for w in witnesses], sym, a, b, tol):
                failing = failing or (a, b)
    rep.add("u1", FAILS if failing else SAMPLED, failing, f"g-paths among {len(images)} sampled T-images")
    rep.add("u1'", NA, None, "")
    rep.add("u1''", NA, None, "")
    bad = [w for w in C if d(T(g(w)), g(T(w))) > tol]
    rep.add("u2", FAILS if bad else SAMPLED, bad[0] if bad else None, "commute at coincidence points")
    g3 = _class_checks(G)[2]
    rep.add("G3", HOLDS if g3.passed else FAILS, g3.witness, "")

    rep.rank = _rank(rep, base and (e_route or e_alt))
    if rep.rank != "none" and not C:
        raise SoundnessError("hypotheses certified but no coincidence point found")
    if rep.at_least("point-of-coincidence-unique") and len(set(rep.points_of_coincidence)) != 1:
        raise SoundnessError("uniqueness certified but several sampled points of coincidence")
    if rep.rank == "common-fixed-point-unique" and len(rep.common_fixed_points) != 1:
        raise SoundnessError("unique common fixed point certified but not found on samples")
    return rep


def _sampled_path(W, gW, TW, sym, a, b, tol):
    close = lambda p, q: abs(p - q) <= tol
    starts = [i for i, v in enumerate(gW) if close(v, a)]
    frontier, seen = list(starts), set(starts)
    while frontier:
        nxt = []
        for u in frontier:
            for v in range(len(W)):
                if not sym(gW[u], gW[v]):
                    continue
                if close(gW[v], b):
                    return True
                if v not in seen and sym(gW[v], TW[v]):
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return False
