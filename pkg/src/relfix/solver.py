"""Coincidence iteration ``g x_{n+1} = T x_n``.

The solver is generic over the point type: finite instances use integer
indices, continuous instances floats, the integral-equation application
numpy arrays.  Everything it needs is a :class:`MappingPair` and a distance
callable.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from .contraction import ComparisonFunction

FINITE_TOL = 1e-10
CONTINUOUS_TOL = 1e-8
MAX_ITER = 100_000
BOUND_SLACK = 1e-9


class HypothesisError(ValueError):
    """A theorem hypothesis needed by the computation does not hold."""


class NonConvergenceError(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass
class MappingPair:
    T: Callable
    g: Callable
    preimage: Callable  # y -> some x with g(x) == y, or None

    @classmethod
    def from_tables(cls, T: Sequence[int], g: Sequence[int]) -> "MappingPair":
        """Finite pair; the preimage selector returns the least index."""
        T = tuple(int(v) for v in T)
        g = tuple(int(v) for v in g)
        if len(T) != len(g):
            raise ValueError("T and g must be defined on the same points")
        n = len(g)
        if any(not 0 <= v < n for v in T + g):
            raise ValueError("maps must send points to points")
        first = {}
        for x, y in enumerate(g):
            first.setdefault(y, x)
        pair = cls(T.__getitem__, g.__getitem__, first.get)
        pair.T_table, pair.g_table = T, g
        return pair

    @classmethod
    def from_functions(cls, T: Callable, g: Callable, g_inverse: Callable) -> "MappingPair":
        return cls(T, g, g_inverse)


@dataclass
class IterationTrace:
    x: List[Any] = field(default_factory=list)
    gx: List[Any] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)  # d(gx_n, T x_n) = d(gx_n, gx_{n+1})
    bounds: List[float] = field(default_factory=list)
    steps: int = 0

    def records(self, label=str):
        """Ordered ``(step, x, gx, residual, bound)`` rows."""
        rows = []
        for n, r in enumerate(self.residuals):
            bound = self.bounds[n] if n < len(self.bounds) else None
            rows.append((n, label(self.x[n]), label(self.gx[n]), r, bound))
        return rows


@dataclass
class Certificate:
    kind: str  # coincidence | point-of-coincidence | common-fixed-point | violation
    points: tuple
    residual: float
    evidence: Any = None
    branch: str = ""

    @property
    def ok(self) -> bool:
        return self.kind != "violation"


def find_start(pair: MappingPair, R, points) -> Optional[Any]:
    """Least ``x0`` with ``(g x0, T x0)`` in ``R``.

    ``R`` is anything supporting ``(a, b) in R``.
    """
    for x in points:
        if (pair.g(x), pair.T(x)) in R:
            return x
    return None


def start_set(pair: MappingPair, R, points) -> list:
    return [x for x in points if (pair.g(x), pair.T(x)) in R]


def iterate(pair: MappingPair, x0, dist: Callable, tol: float = FINITE_TOL,
            max_iter: int = MAX_ITER, callback: Optional[Callable] = None):
    """Run ``x_{n+1} = preimage(T x_n)`` until ``d(g x_n, T x_n) <= tol``.

    Returns ``(trace, certificate)``.  Raises :class:`HypothesisError` when
    ``T x_n`` has no g-preimage, :class:`NonConvergenceError` (carrying the
    trace) after ``max_iter`` steps.
    """
    trace = IterationTrace()
    x = x0
    gx = pair.g(x)
    for n in range(max_iter + 1):
        tx = pair.T(x)
        r = float(dist(gx, tx))
        trace.x.append(x)
        trace.gx.append(gx)
        trace.residuals.append(r)
        if callback is not None:
            callback(n, x, gx, tx)
        if r <= tol:
            trace.steps = n
            return trace, Certificate("coincidence", (x,), r, trace)
        if n == max_iter:
            break
        nxt = pair.preimage(tx)
        if nxt is None:
            raise HypothesisError(f"hypothesis (b) violated at x = {x!r}: T x has no g-preimage")
        x = nxt
        gx = pair.g(x)
    trace.steps = max_iter
    raise NonConvergenceError(
        f"no coincidence within {max_iter} iterations (last residual {trace.residuals[-1]:.3e})",
        trace)


@dataclass
class BoundReport:
    pairs: List[tuple]       # (observed residual_n, phi^n(d0))
    cauchy: List[float]      # sum_{j=n}^{m-1} phi^j(d0)
    cauchy_observed: List[float]
    holds: bool
    first_violation: Optional[int] = None


def error_bounds(trace: IterationTrace, phi: ComparisonFunction, dist: Optional[Callable] = None,
                 slack: float = BOUND_SLACK) -> BoundReport:
    """Compare residuals with ``phi^n(d0)``, ``d0 = d(g x0, g x1)``.

    Also emits the a-priori Cauchy bounds ``sum_{j=n}^{m-1} phi^j(d0)`` on
    ``d(g x_n, g x_m)`` for the final index ``m``; with ``dist`` the observed
    distances are checked against them too.
    """
    res = trace.residuals
    d0 = res[0] if res else 0.0
    bounds = [phi.iterate(d0, n) for n in range(len(res))]
    trace.bounds = bounds
    pairs = list(zip(res, bounds))
    first = next((n for n, (r, b) in enumerate(pairs) if r > b + slack), None)
    m = len(res) - 1
    cauchy = [float(sum(bounds[n:m])) for n in range(m + 1)]
    observed = []
    if dist is not None and m >= 0:
        observed = [float(dist(trace.gx[n], trace.gx[m])) for n in range(m + 1)]
        if first is None:
            first = next((n for n in range(m + 1) if observed[n] > cauchy[n] + slack), None)
    return BoundReport(pairs, cauchy, observed, first is None, first)


def promote_to_common_fixed_point(pair: MappingPair, w, dist: Callable, tol: float = FINITE_TOL) -> Certificate:
    """Turn a coincidence point ``w`` into the common fixed point ``z = g w``.

    Needs ``T`` and ``g`` to commute at ``w``; each failed equality yields a
    violation certificate naming it.
    """
    gw, tw = pair.g(w), pair.T(w)
    r = float(dist(gw, tw))
    if r > tol:
        return Certificate("violation", (w,), r, "w is not a coincidence point: d(gw, Tw) > tol")
    c = float(dist(pair.T(gw), pair.g(tw)))
    if c > tol:
        return Certificate("violation", (w,), c, "T and g do not commute at w: T(gw) != g(Tw)")
    z = gw
    dz_t = float(dist(z, pair.T(z)))
    dz_g = float(dist(z, pair.g(z)))
    if dz_t > tol:
        return Certificate("violation", (z,), dz_t, "z = gw but Tz != z")
    if dz_g > tol:
        return Certificate("violation", (z,), dz_g, "z = gw but gz != z")
    return Certificate("common-fixed-point", (z,), max(dz_t, dz_g), {"coincidence": w})
