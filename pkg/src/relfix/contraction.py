"""Comparison functions, implicit relations and the contraction catalog.

An implicit relation is a function ``G`` of the six distances

    (d(Tx,Ty), d(gx,gy), d(gx,Tx), d(gy,Ty), d(gx,Ty), d(gy,Tx))

and a pair of maps is contractive for ``G`` when ``G(...) <= 0`` on every
related pair.  Membership of ``G`` in the admissible class is governed by
three conditions, checked here numerically on grids:

* G1: non-increasing in the 5th and 6th arguments, and ``G(r,s,s,r,r+s,0) <= 0``
  forces ``r <= phi(s)`` for the comparison function ``phi`` carried by ``G``;
* G2: ``G(r,0,r,0,0,r) > 0`` for ``r > 0``;
* G3: ``G(r,r,0,0,r,r) > 0`` for ``r > 0``.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

STRICT_MARGIN = 1e-12
G1_TOL = 1e-9
DEFAULT_GRID = np.round(np.arange(0, 101) * 0.1, 10)
PERTURBATIONS = (0.5, 3.0)


class NotCertifiedError(ValueError):
    pass


# ---------------------------------------------------------------------------
# comparison functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonFunction:
    """Increasing ``phi`` with ``phi(0) = 0`` and summable iterates."""

    family: str
    params: Dict = field(default_factory=dict)
    func: Callable = field(default=None, repr=False, compare=False)

    @classmethod
    def linear(cls, k: float) -> "ComparisonFunction":
        k = float(k)
        if not 0 <= k < 1:
            raise NotCertifiedError(f"linear phi(t) = {k}*t is not summable (need 0 <= k < 1)")
        return cls("linear", {"k": k}, lambda t, k=k: k * t)

    @classmethod
    def table(cls, ts: Sequence[float], values: Sequence[float]) -> "ComparisonFunction":
        """Piecewise-linear interpolation through ``(ts, values)``.

        Beyond the last knot the last slope is continued.
        """
        ts = np.asarray(ts, dtype=float)
        vs = np.asarray(values, dtype=float)
        if ts[0] != 0 or vs[0] != 0:
            raise NotCertifiedError("table must start at (0, 0)")
        if np.any(np.diff(ts) <= 0) or np.any(np.diff(vs) < 0):
            raise NotCertifiedError("table must be increasing")
        slope = (vs[-1] - vs[-2]) / (ts[-1] - ts[-2])

        def f(t, ts=ts, vs=vs, slope=slope):
            t = float(t)
            if t <= ts[-1]:
                return float(np.interp(t, ts, vs))
            return float(vs[-1] + slope * (t - ts[-1]))

        phi = cls("table", {"t": ts.tolist(), "v": vs.tolist()}, f)
        phi.certify()
        return phi

    @classmethod
    def from_callable(cls, f: Callable[[float], float], name: str = "callable") -> "ComparisonFunction":
        phi = cls("callable", {"name": name}, f)
        phi.certify()
        return phi

    @classmethod
    def from_spec(cls, spec: Dict) -> "ComparisonFunction":
        kind = spec.get("kind", "linear")
        if kind == "linear":
            return cls.linear(spec["k"])
        if kind == "table":
            return cls.table(spec["t"], spec["v"])
        raise ValueError(f"unknown comparison function kind {kind!r}")

    def to_spec(self) -> Dict:
        if self.family == "linear":
            return {"kind": "linear", "k": self.params["k"]}
        if self.family == "table":
            return {"kind": "table", "t": self.params["t"], "v": self.params["v"]}
        raise ValueError("callable comparison functions cannot be serialized")

    def __call__(self, t: float) -> float:
        return self.func(t)

    def iterate(self, t: float, n: int) -> float:
        if self.family == "linear":
            return self.params["k"] ** n * t
        for _ in range(n):
            t = self.func(t)
        return t

    def certify(self, probes=(0.01, 0.1, 1.0, 10.0, 100.0)) -> None:
        if self.func(0.0) != 0:
            raise NotCertifiedError("phi(0) != 0")
        grid = np.linspace(0, max(probes), 2001)
        vals = np.array([self.func(t) for t in grid])
        if np.any(np.diff(vals) < -1e-15):
            raise NotCertifiedError("phi is not increasing")
        for t0 in probes:
            phi_tail_bound(self, t0, 1)


def _contraction_ratio(phi: ComparisonFunction, v: float) -> float:
    """Largest sampled ``phi(s)/s`` for ``s`` in ``(0, v]``."""
    ss = v * np.geomspace(1e-6, 1.0, 60)
    return max(phi(s) / s for s in ss)


def phi_tail_bound(phi: ComparisonFunction, t0: float, n: int, budget: int = 10_000) -> float:
    """Upper bound on ``sum_{j >= n} phi^j(t0)``.

    Linear ``phi`` uses the closed form ``k^n t0 / (1 - k)``.  Otherwise the
    iterates are summed until the sampled ratio ``phi(s)/s`` on
    ``(0, phi^m(t0)]`` drops below some ``q < 1``; the remainder is then
    majorised by ``phi^m(t0) / (1 - q)``.
    """
    if t0 < 0:
        raise ValueError("t0 must be non-negative")
    if t0 == 0:
        return 0.0
    if phi.family == "linear":
        k = phi.params["k"]
        return k ** n * t0 / (1 - k)
    v = t0
    acc = 0.0
    for j in range(budget):
        if j >= n:
            if v == 0:
                return acc
            q = _contraction_ratio(phi, v)
            if q < 1:
                return acc + v / (1 - q)
            acc += v
        v = phi(v)
    raise NotCertifiedError("not certified in Phi: no geometric tail within the iteration budget")


# ---------------------------------------------------------------------------
# implicit relations
# ---------------------------------------------------------------------------

@dataclass
class ImplicitRelation:
    name: str
    evaluator: Callable = field(repr=False)
    phi: Optional[ComparisonFunction]
    declared_g1: bool = True
    declared_g2: bool = True
    declared_g3: bool = True
    params: Dict = field(default_factory=dict)
    spec: Optional[Dict] = None
    note: str = ""

    def __call__(self, *r) -> float:
        if len(r) == 1:
            r = tuple(r[0])
        return eval_g(self, r)


def eval_g(G: ImplicitRelation, r) -> float:
    r = tuple(float(v) for v in r)
    if len(r) != 6:
        raise ValueError("G takes six arguments")
    if min(r) < 0:
        raise ValueError(f"negative argument to G: {r}")
    return float(G.evaluator(*r))


@dataclass
class ConditionReport:
    condition: str
    passed: bool
    worst_margin: float
    witness: Optional[Tuple] = None
    message: str = ""


def check_g1(G: ImplicitRelation, grid=None, perturbations=PERTURBATIONS) -> ConditionReport:
    """Check G1 on base points ``(r, s, s, r, r+s, 0)`` for ``r, s`` in ``grid``.

    Monotonicity is probed along the 5th and 6th coordinate rays from each
    base point; the implication is checked against the attached ``phi``.
    ``worst_margin`` is the smallest ``phi(s) - r`` over base points with
    ``G <= 0``.
    """
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if G.phi is None:
        return ConditionReport("G1", False, float("-inf"), None,
                               G.note or "no comparison function in Phi attached")
    worst = float("inf")
    grid = [float(v) for v in grid]
    ev = G.evaluator
    for r in grid:
        for s in grid:
            g0 = ev(r, s, s, r, r + s, 0.0)
            for delta in perturbations:
                for bumped in ((r, s, s, r, r + s + delta, 0.0), (r, s, s, r, r + s, delta)):
                    if ev(*bumped) > g0 + STRICT_MARGIN:
                        idx = 5 if bumped[5] else 4
                        return ConditionReport(
                            "G1", False, worst, bumped,
                            f"G increases in argument {idx + 1}")
            if g0 <= 0:
                margin = G.phi(s) - r
                worst = min(worst, margin)
                if margin < -G1_TOL:
                    return ConditionReport("G1", False, margin, (r, s, s, r, r + s, 0.0),
                                           f"G <= 0 but r = {r} > phi(s) = {G.phi(s)}")
    return ConditionReport("G1", True, worst)


def _check_strict(G, name, point, grid):
    grid = DEFAULT_GRID[1:] if grid is None else np.asarray(grid, dtype=float)
    worst = float("inf")
    witness = None
    for r in grid:
        if r <= 0:
            continue
        v = G.evaluator(*point(r))
        if v < worst:
            worst, witness = v, point(r)
    passed = worst > STRICT_MARGIN
    return ConditionReport(name, passed, worst, None if passed else witness)


def check_g2(G: ImplicitRelation, grid=None) -> ConditionReport:
    return _check_strict(G, "G2", lambda r: (r, 0.0, r, 0.0, 0.0, r), grid)


def check_g3(G: ImplicitRelation, grid=None) -> ConditionReport:
    return _check_strict(G, "G3", lambda r: (r, r, 0.0, 0.0, r, r), grid)


# ---------------------------------------------------------------------------
# catalog I .. XVI
# ---------------------------------------------------------------------------

def _need(cond, message):
    if not cond:
        raise ValueError(message)


def _k(params, upper=1.0, label="[0, 1)"):
    k = float(params.get("k", upper / 2))
    _need(0 <= k < upper, f"k = {k} violates k in {label}")
    return k


def _xv_ratio(k):
    if k == 0:
        return 0.0
    f = lambda x: (1 - k) * x ** 3 - k * (2 + (1 + x) ** 3)
    return brentq(f, 0.0, 1.0, xtol=1e-15)


def _build_I(p):
    k = _k(p)
    return (lambda r1, r2, r3, r4, r5, r6: r1 - k * r2), k, {"k": k}


def _build_II(p):
    phi = p.get("phi", {"kind": "linear", "k": 0.5})
    vphi = phi if isinstance(phi, ComparisonFunction) else ComparisonFunction.from_spec(phi)
    probes = np.linspace(0.01, 100, 500)
    _need(all(vphi(t) < t for t in probes), "phi(t) < t must hold for t > 0")
    params = {"phi": vphi.to_spec()} if vphi.family != "callable" else {}
    return (lambda r1, r2, r3, r4, r5, r6: r1 - vphi(r2)), vphi, params


def _build_III(p):
    k = _k(p, 0.5, "[0, 1/2)")
    return (lambda r1, r2, r3, r4, r5, r6: r1 - k * (r3 + r4)), k / (1 - k), {"k": k}


def _build_IV(p):
    k = _k(p, 0.5, "[0, 1/2)")
    return (lambda r1, r2, r3, r4, r5, r6: r1 - k * (r5 + r6)), k / (1 - k), {"k": k}


def _build_V(p):
    a1, a2, a3 = (float(v) for v in p.get("a", (0.3, 0.1, 0.1)))
    _need(all(0 <= a < 1 for a in (a1, a2, a3)), "a1, a2, a3 must lie in [0, 1)")
    _need(a1 + 2 * a2 + 2 * a3 < 1, f"a1 + 2a2 + 2a3 = {a1 + 2 * a2 + 2 * a3} must be < 1")
    g = lambda r1, r2, r3, r4, r5, r6: r1 - a1 * r2 - a2 * (r3 + r4) - a3 * (r5 + r6)
    return g, (a1 + a2 + a3) / (1 - a2 - a3), {"a": [a1, a2, a3]}


def _build_VI(p):
    k = _k(p)
    L = float(p.get("L", 1.0))
    _need(L >= 0, "L must be >= 0")
    g = lambda r1, r2, r3, r4, r5, r6: r1 - k * r2 - L * min(r3, r4, r5, r6)
    return g, k, {"k": k, "L": L}


def _build_VII(p):
    k = _k(p)
    L = float(p.get("L", 1.0))
    _need(L >= 0, "L must be >= 0")
    g = lambda r1, r2, r3, r4, r5, r6: (
        r1 - k * max(r2, r3, r4, (r5 + r6) / 2) - L * min(r3, r4, r5, r6))
    return g, k, {"k": k, "L": L}


def _build_VIII(p):
    k = _k(p, 0.5, "[0, 1/2)")
    g = lambda r1, r2, r3, r4, r5, r6: r1 - k * max(r2, r3, r4, r5, r6)
    return g, k / (1 - k), {"k": k}


def _build_IX(p):
    a = [float(v) for v in p.get("a", (0.1, 0.1, 0.1, 0.1, 0.1))]
    _need(len(a) == 5 and all(v > 0 for v in a), "a1..a5 must be > 0")
    _need(sum(a) < 1, f"a1 + ... + a5 = {sum(a)} must be < 1")
    a1, a2, a3, a4, a5 = a
    # G1 needs the extracted ratio below 1, which the printed sum bound alone does not give
    _need(a1 + a2 + a3 + 2 * a4 < 1, "a1 + a2 + a3 + 2a4 must be < 1 for G1")
    g = lambda r1, r2, r3, r4, r5, r6: r1 - (a1 * r2 + a2 * r3 + a3 * r4 + a4 * r5 + a5 * r6)
    return g, (a1 + a2 + a4) / (1 - a3 - a4), {"a": a}


def _build_X(p):
    k = _k(p)
    g = lambda r1, r2, r3, r4, r5, r6: r1 - k * max(r2, r3, r4, r5 / 2, r6 / 2)
    return g, k, {"k": k}


def _build_XI(p):
    k = _k(p)
    a = float(p.get("a", 0.25))
    b = float(p.get("b", 0.25))
    _need(0 <= a < 0.5 and 0 <= b < 0.5, "a, b must lie in [0, 1/2)")
    g = lambda r1, r2, r3, r4, r5, r6: r1 - k * max(r2, r3, r4) - (1 - k) * (a * r5 + b * r6)
    c = (k + (1 - k) * a) / (1 - (1 - k) * a)
    return g, c, {"k": k, "a": a, "b": b}


def _build_XII(p):
    a1, a2, a3, a4 = (float(v) for v in p.get("a", (0.3, 0.2, 0.2, 0.3)))
    _need(a1 > 0 and min(a2, a3, a4) >= 0, "need a1 > 0 and a2, a3, a4 >= 0")
    _need(a1 + a2 + a3 < 1, "a1 + a2 + a3 must be < 1")
    _need(a1 + a4 < 1, "a1 + a4 must be < 1")
    g = lambda r1, r2, r3, r4, r5, r6: r1 ** 2 - r1 * (a1 * r2 + a2 * r3 + a3 * r4) - a4 * r5 * r6
    return g, (a1 + a2) / (1 - a3), {"a": [a1, a2, a3, a4]}


def _build_XIII(p):
    k = _k(p)

    def g(r1, r2, r3, r4, r5, r6):
        if r1 + r2 != 0:
            return r1 - k * r2 * (r5 + r6) / (r1 + r2)
        return r1
    return g, k, {"k": k}


def _build_XIV(p):
    a1, a2, a3 = (float(v) for v in p.get("a", (0.3, 0.2, 0.3)))
    _need(min(a1, a2, a3) >= 0, "a1, a2, a3 must be >= 0")
    _need(a1 + 2 * a2 < 1, "a1 + 2a2 must be < 1")
    _need(a1 + a3 < 1, "a1 + a3 must be < 1")
    g = lambda r1, r2, r3, r4, r5, r6: (
        r1 ** 2 - a1 * max(r2 ** 2, r3 ** 2, r4 ** 2) - a2 * max(r3 * r5, r4 * r6) - a3 * r5 * r6)
    c = (a2 + np.sqrt(a2 ** 2 + 4 * (a1 + a2))) / 2
    return g, c, {"a": [a1, a2, a3]}


def _build_XV(p):
    k = _k(p, 1 / 11, "[0, 1/11)")
    g = lambda r1, r2, r3, r4, r5, r6: r1 ** 3 - k * (r2 ** 3 + r3 ** 3 + r4 ** 3 + r5 ** 3 + r6 ** 3)
    return g, _xv_ratio(k), {"k": k}


def _build_XVI(p):
    a1 = float(p.get("a1", 1.5))
    a2 = float(p.get("a2", 0.5))
    _need(a1 > 0 and a2 > 0, "a1, a2 must be > 0")
    _need(a1 < 2, f"a1 = {a1} must be < 2")

    def g(r1, r2, r3, r4, r5, r6):
        if r2 + r4 != 0:
            return r1 - a1 * r2 * r4 / (r2 + r4) - a2 * r3 * r6 / (r5 + r6 + 1)
        return r1
    return g, max(a1 - 1, 0.0), {"a1": a1, "a2": a2}


CATALOG = {
    "I": (_build_I, "r1 - k r2", "k in [0, 1)"),
    "II": (_build_II, "r1 - phi(r2)", "phi in Phi with phi(t) < t"),
    "III": (_build_III, "r1 - k (r3 + r4)", "k in [0, 1/2)"),
    "IV": (_build_IV, "r1 - k (r5 + r6)", "k in [0, 1/2)"),
    "V": (_build_V, "r1 - a1 r2 - a2 (r3 + r4) - a3 (r5 + r6)", "a_i in [0, 1), a1 + 2a2 + 2a3 < 1"),
    "VI": (_build_VI, "r1 - k r2 - L min{r3, r4, r5, r6}", "k in [0, 1), L >= 0"),
    "VII": (_build_VII, "r1 - k max{r2, r3, r4, (r5 + r6)/2} - L min{r3, r4, r5, r6}",
            "k in [0, 1), L >= 0"),
    "VIII": (_build_VIII, "r1 - k max{r2, r3, r4, r5, r6}", "k in [0, 1/2)"),
    "IX": (_build_IX, "r1 - (a1 r2 + a2 r3 + a3 r4 + a4 r5 + a5 r6)",
           "a_i > 0, sum < 1, a1 + a2 + a3 + 2a4 < 1"),
    "X": (_build_X, "r1 - k max{r2, r3, r4, r5/2, r6/2}", "k in [0, 1)"),
    "XI": (_build_XI, "r1 - k max{r2, r3, r4} - (1 - k)(a r5 + b r6)", "k in [0, 1), a, b in [0, 1/2)"),
    "XII": (_build_XII, "r1^2 - r1 (a1 r2 + a2 r3 + a3 r4) - a4 r5 r6",
            "a1 > 0, a2, a3, a4 >= 0, a1 + a2 + a3 < 1, a1 + a4 < 1"),
    "XIII": (_build_XIII, "r1 - k r2 (r5 + r6)/(r1 + r2), or r1 if r1 + r2 = 0", "k in [0, 1)"),
    "XIV": (_build_XIV, "r1^2 - a1 max{r2^2, r3^2, r4^2} - a2 max{r3 r5, r4 r6} - a3 r5 r6",
            "a_i >= 0, a1 + 2a2 < 1, a1 + a3 < 1"),
    "XV": (_build_XV, "r1^3 - k (r2^3 + r3^3 + r4^3 + r5^3 + r6^3)", "k in [0, 1/11)"),
    "XVI": (_build_XVI,
            "r1 - a1 r2 r4/(r2 + r4) - a2 r3 r6/(r5 + r6 + 1), or r1 if r2 + r4 = 0",
            "a1, a2 > 0, a1 < 2"),
}


def make_catalog(id: str, params: Optional[Dict] = None) -> ImplicitRelation:
    """Build catalog member ``id`` (``"I"`` .. ``"XVI"``).

    Raises ``ValueError`` naming the violated constraint when ``params`` fall
    outside the admissible range.
    """
    id = str(id).upper()
    if id not in CATALOG:
        raise ValueError(f"unknown catalog id {id!r}")
    build, formula, constraint = CATALOG[id]
    params = dict(params or {})
    try:
        evaluator, phi, clean = build(params)
    except ValueError as exc:
        raise ValueError(f"catalog {id}: {exc} ({constraint})") from None
    if not isinstance(phi, ComparisonFunction):
        phi = ComparisonFunction.linear(phi)
    return ImplicitRelation(f"catalog {id}", evaluator, phi, True, True, True, clean,
                            {"kind": "catalog", "id": id, "params": clean})


def make_linear(coefficients: Sequence[float]) -> ImplicitRelation:
    """``G(r) = sum c_i r_i`` with ``c_1 > 0``.

    The comparison function is read off ``G(r, s, s, r, r+s, 0)
    = (c1 + c4 + c5) r + (c2 + c3 + c5) s``; when the resulting ratio is not
    below 1 (or G is not decreasing in r5, r6) no member of Phi is attached.
    """
    c = [float(v) for v in coefficients]
    if len(c) != 6:
        raise ValueError("linear G needs six coefficients")
    if c[0] <= 0:
        raise ValueError("linear G needs c1 > 0")
    evaluator = lambda *r, c=tuple(c): sum(ci * ri for ci, ri in zip(c, r))
    A = c[0] + c[3] + c[4]
    B = -(c[1] + c[2] + c[4])
    phi, note = None, ""
    if A <= 0:
        note = "G(r, s, s, r, r+s, 0) <= 0 does not bound r"
    elif c[4] > 0 or c[5] > 0:
        note = "G is increasing in the 5th or 6th argument"
    else:
        ratio = max(B / A, 0.0)
        try:
            phi = ComparisonFunction.linear(ratio)
        except NotCertifiedError:
            note = f"extracted phi(t) = {ratio:g} t is not summable"
    g2 = c[0] + c[2] + c[5] > 0
    g3 = c[0] + c[1] + c[4] + c[5] > 0
    return ImplicitRelation("linear", evaluator, phi, phi is not None, g2, g3,
                            {"coefficients": c}, {"kind": "linear", "coefficients": c}, note)


def quotient_relation(varphi: Optional[ComparisonFunction] = None) -> ImplicitRelation:
    """Quotient form that satisfies G1 and G2 but not G3."""
    varphi = varphi or ComparisonFunction.linear(0.5)

    def g(r1, r2, r3, r4, r5, r6):
        if r3 + r4 != 0:
            return r1 - varphi(r2 * (r5 + r6) / (r3 + r4))
        return r1 - r2
    return ImplicitRelation("quotient form", g, varphi, True, True, False,
                            {"phi": varphi.to_spec()}, {"kind": "quotient", "phi": varphi.to_spec()})


# ---------------------------------------------------------------------------
# explicit contraction conditions 16 .. 35
# ---------------------------------------------------------------------------

@dataclass
class ExplicitCondition:
    """A contraction written as ``d(Tx,Ty) <= ...`` plus its ``G <= 0`` form.

    ``predicate`` takes the six distances ``(tt, gg, gx_tx, gy_ty, gx_ty, gy_tx)``.
    """

    number: int
    text: str
    predicate: Callable = field(repr=False)
    relation: ImplicitRelation = field(repr=False)

    def __call__(self, d) -> bool:
        return bool(self.predicate(*[float(v) for v in d]))


def _k_in(p, upper, label):
    k = float(p.get("k", 0.4))
    _need(0 <= k < upper, f"k = {k} violates k in {label}")
    return k


def _c16(p):
    k = _k_in(p, 1, "[0, 1)")
    return (lambda tt, gg, a, b, c, d: tt <= k * gg), make_catalog("I", {"k": k})


def _c17(p):
    G = make_catalog("II", p)
    vphi = G.phi
    return (lambda tt, gg, a, b, c, d: tt <= vphi(gg)), G


def _c18(p):
    k = _k_in(p, 0.5, "[0, 1/2)")
    return (lambda tt, gg, a, b, c, d: tt <= k * (a + b)), make_catalog("III", {"k": k})


def _c19(p):
    k = _k_in(p, 0.5, "[0, 1/2)")
    return (lambda tt, gg, a, b, c, d: tt <= k * (c + d)), make_catalog("IV", {"k": k})


def _c20(p):
    k = _k_in(p, 1, "[0, 1)")
    pred = lambda tt, gg, a, b, c, d: tt <= k * max(gg, (a + b) / 2, (c + d) / 2)
    G = ImplicitRelation("condition 20",
                         lambda r1, r2, r3, r4, r5, r6: r1 - k * max(r2, (r3 + r4) / 2, (r5 + r6) / 2),
                         ComparisonFunction.linear(k), params={"k": k})
    return pred, G


def _c21(p):
    k = _k_in(p, 1, "[0, 1)")
    pred = lambda tt, gg, a, b, c, d: tt <= k * max(a, b)
    G = ImplicitRelation("condition 21", lambda r1, r2, r3, r4, r5, r6: r1 - k * max(r3, r4),
                         ComparisonFunction.linear(k), params={"k": k})
    return pred, G


def _c22(p):
    G = make_catalog("V", p)
    a1, a2, a3 = G.params["a"]
    return (lambda tt, gg, a, b, c, d: tt <= a1 * gg + a2 * (a + b) + a3 * (c + d)), G


def _optional_linear(ratio):
    try:
        return ComparisonFunction.linear(ratio), ""
    except NotCertifiedError as exc:
        return None, str(exc)


def _c23(p):
    k = _k_in(p, 1, "[0, 1)")
    pred = lambda tt, gg, a, b, c, d: tt <= k * max(gg, (a + b) / 2, c, d)
    phi, note = _optional_linear(k / (1 - k))
    G = ImplicitRelation("condition 23",
                         lambda r1, r2, r3, r4, r5, r6: r1 - k * max(r2, (r3 + r4) / 2, r5, r6),
                         phi, phi is not None, params={"k": k}, note=note)
    return pred, G


def _c24(p):
    G = make_catalog("VI", p)
    k, L = G.params["k"], G.params["L"]
    return (lambda tt, gg, a, b, c, d: tt <= k * gg + L * min(a, b, c, d)), G


def _c25(p):
    a1, a2, a3, a4 = (float(v) for v in p.get("a", (0.2, 0.1, 0.1, 0.1)))
    _need(min(a1, a2, a3, a4) >= 0, "a_i must be >= 0")
    _need(a1 + a2 + a3 + 2 * a4 < 1, "a1 + a2 + a3 + 2a4 must be < 1")
    pred = lambda tt, gg, a, b, c, d: tt <= a1 * gg + a2 * a + a3 * b + a4 * (c + d)
    G = ImplicitRelation(
        "condition 25",
        lambda r1, r2, r3, r4, r5, r6: r1 - a1 * r2 - a2 * r3 - a3 * r4 - a4 * (r5 + r6),
        ComparisonFunction.linear((a1 + a2 + a4) / (1 - a3 - a4)), params={"a": [a1, a2, a3, a4]})
    return pred, G


def _c26(p):
    G = make_catalog("VII", p)
    k, L = G.params["k"], G.params["L"]
    return (lambda tt, gg, a, b, c, d: tt <= k * max(gg, a, b, (c + d) / 2) + L * min(a, b, c, d)), G


def _c27(p):
    k = _k_in(p, 0.5, "[0, 1/2)")
    return (lambda tt, gg, a, b, c, d: tt <= k * max(gg, a, b, c, d)), make_catalog("VIII", {"k": k})


def _c28(p):
    G = make_catalog("IX", p)
    a1, a2, a3, a4, a5 = G.params["a"]
    return (lambda tt, gg, a, b, c, d: tt <= a1 * gg + a2 * a + a3 * b + a4 * c + a5 * d), G


def _c29(p):
    k = _k_in(p, 1, "[0, 1)")
    return (lambda tt, gg, a, b, c, d: tt <= k * max(gg, a, b, c / 2, d / 2)), make_catalog("X", {"k": k})


def _c30(p):
    G = make_catalog("XI", p)
    k, a_, b_ = G.params["k"], G.params["a"], G.params["b"]
    return (lambda tt, gg, a, b, c, d: tt <= k * max(gg, a, b) + (1 - k) * (a_ * c + b_ * d)), G


def _c31(p):
    G = make_catalog("XII", p)
    a1, a2, a3, a4 = G.params["a"]
    return (lambda tt, gg, a, b, c, d: tt ** 2 <= tt * (a1 * gg + a2 * a + a3 * b) + a4 * c * d), G


def _c32(p):
    k = _k_in(p, 1, "[0, 1)")

    def pred(tt, gg, a, b, c, d):
        if tt + gg != 0:
            return tt <= k * gg * (c + d) / (tt + gg)
        return tt <= 0
    return pred, make_catalog("XIII", {"k": k})


def _c33(p):
    G = make_catalog("XIV", p)
    a1, a2, a3 = G.params["a"]
    return (lambda tt, gg, a, b, c, d:
            tt ** 2 <= a1 * max(gg ** 2, a ** 2, b ** 2) + a2 * max(a * c, b * d) + a3 * c * d), G


def _c34(p):
    k = _k_in(p, 1, "[0, 1)")
    pred = lambda tt, gg, a, b, c, d: tt ** 3 <= k * (gg ** 3 + a ** 3 + b ** 3 + c ** 3 + d ** 3)
    if k < 1 / 11:
        return pred, make_catalog("XV", {"k": k})
    G = ImplicitRelation(
        "condition 34",
        lambda r1, r2, r3, r4, r5, r6: r1 ** 3 - k * (r2 ** 3 + r3 ** 3 + r4 ** 3 + r5 ** 3 + r6 ** 3),
        None, False, params={"k": k}, note="k >= 1/11: G(r, s, s, r, r+s, 0) <= 0 allows r >= s")
    return pred, G


def _c35(p):
    G = make_catalog("XVI", p)
    a1, a2 = G.params["a1"], G.params["a2"]

    def pred(tt, gg, a, b, c, d):
        if gg + b != 0:
            return tt <= a1 * gg * b / (gg + b) + a2 * a * d / (c + d + 1)
        return tt <= 0
    return pred, G


EXPLICIT_CONDITIONS = {
    16: (_c16, "d(Tx,Ty) <= k d(gx,gy), k in [0, 1)"),
    17: (_c17, "d(Tx,Ty) <= phi(d(gx,gy)), phi(t) < t"),
    18: (_c18, "d(Tx,Ty) <= k [d(gx,Tx) + d(gy,Ty)], k in [0, 1/2)"),
    19: (_c19, "d(Tx,Ty) <= k [d(gx,Ty) + d(gy,Tx)], k in [0, 1/2)"),
    20: (_c20, "d(Tx,Ty) <= k max{d(gx,gy), (d(gx,Tx)+d(gy,Ty))/2, (d(gx,Ty)+d(gy,Tx))/2}, k in [0, 1)"),
    21: (_c21, "d(Tx,Ty) <= k max{d(gx,Tx), d(gy,Ty)}, k in [0, 1)"),
    22: (_c22, "d(Tx,Ty) <= a1 d(gx,gy) + a2 [d(gx,Tx)+d(gy,Ty)] + a3 [d(gx,Ty)+d(gy,Tx)], a1+2a2+2a3 < 1"),
    23: (_c23, "d(Tx,Ty) <= k max{d(gx,gy), (d(gx,Tx)+d(gy,Ty))/2, d(gx,Ty), d(gy,Tx)}, k in [0, 1)"),
    24: (_c24, "d(Tx,Ty) <= k d(gx,gy) + L min{d(gx,Tx), d(gy,Ty), d(gx,Ty), d(gy,Tx)}, k in [0, 1), L >= 0"),
    25: (_c25, "d(Tx,Ty) <= a1 d(gx,gy) + a2 d(gx,Tx) + a3 d(gy,Ty) + a4 [d(gx,Ty)+d(gy,Tx)], a1+a2+a3+2a4 < 1"),
    26: (_c26, "d(Tx,Ty) <= k max{d(gx,gy), d(gx,Tx), d(gy,Ty), (d(gx,Ty)+d(gy,Tx))/2} + L min{...}, k in [0, 1)"),
    27: (_c27, "d(Tx,Ty) <= k max{d(gx,gy), d(gx,Tx), d(gy,Ty), d(gx,Ty), d(gy,Tx)}, k in [0, 1/2)"),
    28: (_c28, "d(Tx,Ty) <= a1 d(gx,gy) + a2 d(gx,Tx) + a3 d(gy,Ty) + a4 d(gx,Ty) + a5 d(gy,Tx), a_i > 0, sum < 1"),
    29: (_c29, "d(Tx,Ty) <= k max{d(gx,gy), d(gx,Tx), d(gy,Ty), d(gx,Ty)/2, d(gy,Tx)/2}, k in [0, 1)"),
    30: (_c30, "d(Tx,Ty) <= k max{d(gx,gy), d(gx,Tx), d(gy,Ty)} + (1-k)[a d(gx,Ty) + b d(gy,Tx)], a, b in [0, 1/2)"),
    31: (_c31, "d^2(Tx,Ty) <= d(Tx,Ty)[a1 d(gx,gy) + a2 d(gx,Tx) + a3 d(gy,Ty)] + a4 d(gx,Ty) d(gy,Tx)"),
    32: (_c32, "d(Tx,Ty) <= k d(gx,gy) [d(gx,Ty)+d(gy,Tx)] / [d(Tx,Ty)+d(gx,gy)] (0 if the denominator vanishes)"),
    33: (_c33, "d^2(Tx,Ty) <= a1 max{d^2(gx,gy), d^2(gx,Tx), d^2(gy,Ty)} + a2 max{...} + a3 d(gx,Ty) d(gy,Tx)"),
    34: (_c34, "d^3(Tx,Ty) <= k [d^3(gx,gy) + d^3(gx,Tx) + d^3(gy,Ty) + d^3(gx,Ty) + d^3(gy,Tx)], k in [0, 1)"),
    35: (_c35, "d(Tx,Ty) <= a1 d(gx,gy) d(gy,Ty)/[d(gx,gy)+d(gy,Ty)] + a2 d(gx,Tx) d(gy,Tx)/[d(gx,Ty)+d(gy,Tx)+1]"),
}


def make_explicit(number: int, params: Optional[Dict] = None) -> ExplicitCondition:
    number = int(number)
    if number not in EXPLICIT_CONDITIONS:
        raise ValueError(f"unknown condition ({number}); available: 16..35")
    build, text = EXPLICIT_CONDITIONS[number]
    params = dict(params or {})
    try:
        pred, G = build(params)
    except ValueError as exc:
        raise ValueError(f"condition ({number}): {exc}") from None
    G.spec = {"kind": "explicit", "id": number, "params": dict(G.params) if G.params else params}
    if G.name.startswith("catalog"):
        G.name = f"condition {number} ({G.name})"
    return ExplicitCondition(number, text, pred, G)


def relation_from_spec(spec: Dict) -> ImplicitRelation:
    """Build an implicit relation from an instance-file contraction entry."""
    kind = spec.get("kind")
    if kind == "catalog":
        return make_catalog(spec["id"], spec.get("params"))
    if kind == "explicit":
        return make_explicit(spec["id"], spec.get("params")).relation
    if kind == "linear":
        return make_linear(spec["coefficients"])
    if kind == "quotient":
        return quotient_relation(ComparisonFunction.from_spec(spec.get("phi", {"kind": "linear", "k": 0.5})))
    raise ValueError(f"unknown contraction kind {kind!r}")


def catalog_listing() -> List[str]:
    lines = ["Implicit relations (catalog):"]
    for id, (_, formula, constraint) in CATALOG.items():
        lines.append(f"  {id:>5}  G = {formula}    [{constraint}]")
    lines.append("Explicit contraction conditions:")
    for number, (_, text) in EXPLICIT_CONDITIONS.items():
        lines.append(f"  ({number})  {text}")
    return lines
