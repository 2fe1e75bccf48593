"""Volterra-type Urysohn equation ``g u(t) = int_0^t K(t, s, u(s)) ds + alpha(t)``.

Unknowns are scalar grid functions on ``N + 1`` uniform nodes of ``[0, T]``.
The integral is the composite trapezoid rule, the distance is the sup norm
over nodes, and solving reuses the coincidence iteration from
:mod:`relfix.solver` with the nodewise inverse of ``g``.
"""
import ast
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .contraction import ComparisonFunction
from .expr import Expression
from .solver import CONTINUOUS_TOL, MappingPair, iterate

INVERSE_TOL = 1e-10
PROBES = np.linspace(-3.0, 3.0, 25)


@dataclass(frozen=True)
class Kernel:
    name: str
    func: Callable  # (t, s, u) -> value, numpy-broadcasting
    depends_on_t: bool
    spec: Dict = field(default_factory=dict)

    @classmethod
    def linear(cls, lam: float) -> "Kernel":
        lam = float(lam)
        return cls(f"{lam:g}*u", lambda t, s, u: lam * u, False, {"kind": "linear", "lambda": lam})

    @classmethod
    def sine(cls, lam: float) -> "Kernel":
        lam = float(lam)
        return cls(f"{lam:g}*sin(u)", lambda t, s, u: lam * np.sin(u), False,
                   {"kind": "sin", "lambda": lam})

    @classmethod
    def expression(cls, source: str) -> "Kernel":
        e = Expression(source, ("t", "s", "u"))
        names = {n.id for n in ast.walk(ast.parse(source, mode="eval")) if isinstance(n, ast.Name)}

        def f(t, s, u):
            return np.broadcast_to(np.asarray(e(t, s, u), dtype=float), np.broadcast(t, s, u).shape)

        return cls(source, f, "t" in names, {"kind": "expr", "expr": source})

    @classmethod
    def from_spec(cls, spec: Dict) -> "Kernel":
        kind = spec.get("kind")
        if kind == "linear":
            return cls.linear(spec["lambda"])
        if kind == "sin":
            return cls.sine(spec["lambda"])
        if kind == "expr":
            return cls.expression(spec["expr"])
        raise ValueError(f"unknown kernel kind {kind!r}")


@dataclass(frozen=True)
class NodeMap:
    """A real function applied nodewise, with its inverse."""

    name: str
    func: Callable
    inverse: Callable
    spec: Dict = field(default_factory=dict)

    @classmethod
    def identity(cls) -> "NodeMap":
        return cls("identity", lambda v: v, lambda v: v, {"kind": "identity"})

    @classmethod
    def from_spec(cls, spec: Optional[Dict]) -> "NodeMap":
        if spec is None or spec.get("kind", "identity") == "identity":
            return cls.identity()
        f = Expression(spec["expr"], ("x",))
        finv = Expression(spec["inverse"], ("x",))
        m = cls(spec["expr"], lambda v: np.asarray(f(v), dtype=float),
                lambda v: np.asarray(finv(v), dtype=float), dict(spec))
        err = np.max(np.abs(m.func(m.inverse(PROBES)) - PROBES))
        if not err <= INVERSE_TOL:
            raise ValueError(f"g-inverse does not invert g on probe values (error {err:.3e})")
        return m


ETAS = {
    "universal": lambda a, b: -np.ones(np.broadcast(a, b).shape),
    "order": lambda a, b: np.asarray(a, dtype=float) - b,
}


def make_eta(spec) -> Callable:
    if isinstance(spec, str):
        if spec in ETAS:
            return ETAS[spec]
        raise ValueError(f"unknown eta {spec!r}")
    e = Expression(spec["expr"], ("a", "b"))
    return lambda a, b: np.broadcast_to(np.asarray(e(a, b), dtype=float), np.broadcast(a, b).shape)


@dataclass
class GridFunction:
    horizon: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 2:
            raise ValueError("a grid function needs at least two nodes")

    @property
    def N(self) -> int:
        return len(self.values) - 1

    @property
    def h(self) -> float:
        return self.horizon / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h


@dataclass
class UrysohnProblem:
    kernel: Kernel
    alpha: np.ndarray          # samples at the nodes
    horizon: float
    grid_size: int
    g: NodeMap = field(default_factory=NodeMap.identity)
    eta: Callable = ETAS["universal"]
    eta_spec: object = "universal"
    phi: Optional[ComparisonFunction] = None
    alpha_spec: Dict = field(default_factory=dict)
    assertions: Dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.grid_size < 1:
            raise ValueError("grid size must be at least 1")
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.alpha.shape != (self.grid_size + 1,):
            raise ValueError(f"alpha needs {self.grid_size + 1} samples, got {self.alpha.shape}")

    @classmethod
    def from_spec(cls, spec: Dict, grid_size: Optional[int] = None) -> "UrysohnProblem":
        N = int(grid_size or spec["grid_size"])
        T = float(spec["horizon"])
        t = np.arange(N + 1) * (T / N)
        a = spec["alpha"]
        if "poly" in a:
            alpha = np.polynomial.polynomial.polyval(t, a["poly"])
        elif "samples" in a:
            alpha = np.asarray(a["samples"], dtype=float)
        elif "expr" in a:
            alpha = np.broadcast_to(np.asarray(Expression(a["expr"], ("t",))(t), dtype=float), t.shape)
        else:
            raise ValueError("alpha needs 'poly', 'samples' or 'expr'")
        eta_spec = spec.get("eta", "universal")
        phi = ComparisonFunction.from_spec(spec["phi"]) if spec.get("phi") else None
        return cls(Kernel.from_spec(spec["kernel"]), alpha, T, N, NodeMap.from_spec(spec.get("g")),
                   make_eta(eta_spec), eta_spec, phi, dict(a), dict(spec.get("assertions", {})))

    def with_grid(self, N: int) -> "UrysohnProblem":
        if "samples" in self.alpha_spec:
            raise ValueError("alpha given as samples cannot be regridded")
        spec = {"kernel": self.kernel.spec, "alpha": self.alpha_spec, "horizon": self.horizon,
                "grid_size": N, "g": self.g.spec, "eta": self.eta_spec,
                "phi": self.phi.to_spec() if self.phi else None, "assertions": self.assertions}
        return UrysohnProblem.from_spec(spec)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.grid_size + 1) * (self.horizon / self.grid_size)

    def grid(self, values) -> GridFunction:
        v = np.broadcast_to(np.asarray(values, dtype=float), (self.grid_size + 1,)).copy()
        return GridFunction(self.horizon, v)


def _values(u) -> np.ndarray:
    return u.values if isinstance(u, GridFunction) else np.asarray(u, dtype=float)


def integral(problem: UrysohnProblem, u) -> np.ndarray:
    """Trapezoid approximations of ``int_0^{t_i} K(t_i, s, u(s)) ds``."""
    u = _values(u)
    t = problem.nodes
    h = problem.horizon / problem.grid_size
    if not problem.kernel.depends_on_t:
        f = np.asarray(problem.kernel.func(0.0, t, u), dtype=float)
        out = np.concatenate(([0.0], np.cumsum(0.5 * h * (f[1:] + f[:-1]))))
    else:
        K = np.asarray(problem.kernel.func(t[:, None], t[None, :], u[None, :]), dtype=float)
        W = np.tril(np.full(K.shape, h))
        W[:, 0] *= 0.5
        W[np.diag_indices_from(W)] *= 0.5
        W[0, 0] = 0.0
        out = (W * K).sum(axis=1)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("kernel evaluation produced a non-finite value")
    return out


def apply_T(problem: UrysohnProblem, u) -> np.ndarray:
    return integral(problem, u) + problem.alpha


def residual(problem: UrysohnProblem, u) -> float:
    """``max_i |g(u(t_i)) - (T u)(t_i)|``."""
    u = _values(u)
    return float(np.max(np.abs(problem.g.func(u) - apply_T(problem, u))))


def sup_distance(u, v) -> float:
    return float(np.max(np.abs(np.asarray(u) - np.asarray(v))))


@dataclass
class HCheck:
    condition: str
    status: str
    witness: object = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status in ("holds", "holds-on-samples", "asserted")


def sample_functions(problem: UrysohnProblem, count: int = 12, seed: int = 0) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    t = problem.nodes
    out = [np.zeros_like(t), t.copy(), problem.alpha.copy(), np.ones_like(t), -t]
    while len(out) < count:
        out.append(rng.uniform(-2, 2) + rng.uniform(-1, 1) * t + 0.3 * rng.standard_normal(len(t)))
    return out


def check_H(problem: UrysohnProblem, u0=None, samples=None, seed: int = 0) -> Dict[str, HCheck]:
    """Node-level report on the five hypotheses of the existence theorem.

    H1 is scanned at ``u0`` over all nodes.  H2 and H4 are scanned over
    pairs of sample functions, so success only means "holds on samples".
    H3 quantifies over all convergent sequences and is recorded as asserted.
    H5 is the exact test ``horizon < 1``.
    """
    g, eta = problem.g.func, problem.eta
    t = problem.nodes
    u0 = np.zeros_like(t) if u0 is None else _values(u0)
    samples = sample_functions(problem, seed=seed) if samples is None else [_values(s) for s in samples]
    rep = {}

    v = eta(g(u0), apply_T(problem, u0))
    bad = np.nonzero(v > 0)[0]
    rep["H1"] = HCheck("H1", "fails" if len(bad) else "holds",
                       float(t[bad[0]]) if len(bad) else None,
                       f"eta(g u0, T u0) <= 0 at all {len(t)} nodes" if not len(bad)
                       else f"eta(g u0, T u0) = {v[bad[0]]:.3g} > 0 at t = {t[bad[0]]:.6g}")

    images = [apply_T(problem, s) for s in samples]
    gs = [g(s) for s in samples]
    h2_bad, h4_bad, worst = None, None, -np.inf
    for i, (u, Tu, gu) in enumerate(zip(samples, images, gs)):
        for j, (w, Tw, gw) in enumerate(zip(samples, images, gs)):
            related = eta(gu, gw) <= 0
            viol = related & (eta(Tu, Tw) > 0)
            if h2_bad is None and np.any(viol):
                h2_bad = (i, j, float(t[np.argmax(viol)]))
            if problem.phi is None or not np.any(related):
                continue
            diff = np.abs(problem.kernel.func(t[:, None], t[None, :], u[None, :])
                          - problem.kernel.func(t[:, None], t[None, :], w[None, :]))
            bound = np.array([problem.phi(abs(a)) for a in gu - gw])
            excess = (diff - bound[None, :])[:, related]
            if excess.size:
                m = float(excess.max())
                worst = max(worst, m)
                if h4_bad is None and m > 1e-12:
                    h4_bad = (i, j)
    rep["H2"] = HCheck("H2", "fails" if h2_bad else "holds-on-samples", h2_bad,
                       f"{len(samples)}^2 sample pairs at every node")
    rep["H3"] = HCheck("H3", "asserted" if problem.assertions.get("H3", True) else "fails", None,
                       "quantifies over all convergent sequences; taken as given")
    if problem.phi is None:
        rep["H4"] = HCheck("H4", "fails", None, "no comparison function supplied")
    else:
        rep["H4"] = HCheck("H4", "fails" if h4_bad else "holds-on-samples", h4_bad,
                           f"max |K(u)-K(v)| - phi(|gu-gv|) = {worst:.3g}")
    rep["H5"] = HCheck("H5", "holds" if problem.horizon < 1 else "fails", problem.horizon,
                       f"sup_t int_0^t ds = T = {problem.horizon:g}; the condition as stated forces T < 1")
    return rep


@dataclass
class UrysohnSolution:
    nodes: np.ndarray
    u: np.ndarray
    trace: object
    residual: float

    @property
    def iterations(self) -> int:
        return self.trace.steps

    def to_text(self, delimiter=",") -> str:
        rows = [f"t{delimiter}u"]
        rows += [f"{a!r}{delimiter}{b!r}" for a, b in zip(self.nodes.tolist(), self.u.tolist())]
        return "\n".join(rows) + "\n"


def solve(problem: UrysohnProblem, u0=None, tol: float = CONTINUOUS_TOL, max_iter: int = 1000,
          require_h: bool = True) -> UrysohnSolution:
    """Iterate ``u_{n+1} = g^{-1}(T u_n)`` until the sup residual is ``<= tol``.

    With ``require_h`` the run refuses to start unless H1 (at ``u0``) and H5
    hold.  Raises :class:`relfix.solver.NonConvergenceError` after
    ``max_iter`` sweeps.
    """
    t = problem.nodes
    u0 = np.zeros_like(t) if u0 is None else np.array(_values(u0), dtype=float)
    if require_h:
        from .solver import HypothesisError
        rep = check_H(problem, u0, samples=[u0])
        for c in ("H1", "H5"):
            if not rep[c].ok:
                raise HypothesisError(f"{c} fails: {rep[c].detail}")
    ginv = problem.g.inverse

    def preimage(y):
        x = ginv(y)
        if not np.all(np.isfinite(x)) or sup_distance(problem.g.func(x), y) > INVERSE_TOL:
            return None
        return x

    pair = MappingPair.from_functions(lambda u: apply_T(problem, u), problem.g.func, preimage)
    trace, cert = iterate(pair, u0, sup_distance, tol, max_iter)
    u = cert.points[0]
    return UrysohnSolution(t, u, trace, cert.residual)
