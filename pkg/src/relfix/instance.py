"""Instance files: JSON documents describing a problem for the CLI.

Three modes share one envelope (``mode``, ``name``, ``description``,
``require``):

* ``finite``: labelled points with a distance matrix or 1-D coordinates,
  a relation as label pairs, maps as label tables, contraction specs.
* ``continuous``: maps on an interval given as expressions, checked on
  sample points.
* ``urysohn``: an integral equation for :mod:`relfix.urysohn`.
"""
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .contraction import ImplicitRelation, relation_from_spec
from .expr import Expression
from .metric import FiniteMetricSpace
from .relation import Relation
from .solver import CONTINUOUS_TOL, FINITE_TOL, MAX_ITER, MappingPair
from .urysohn import UrysohnProblem

FORMAT = "relfix-instance/1"
FIXTURE_DIR = Path(__file__).parent / "fixtures"


class InstanceError(ValueError):
    """Malformed or inconsistent instance file."""


def _contractions(spec) -> Tuple[List[ImplicitRelation], List[Dict]]:
    if spec is None:
        raise InstanceError("missing 'contraction'")
    specs = spec if isinstance(spec, list) else [spec]
    if not specs:
        raise InstanceError("'contraction' must not be empty")
    return [relation_from_spec(s) for s in specs], [dict(s) for s in specs]


@dataclass
class FiniteInstance:
    space: FiniteMetricSpace
    relation: Relation
    T: Tuple[int, ...]
    g: Tuple[int, ...]
    contractions: List[ImplicitRelation]
    contraction_specs: List[Dict]
    x0: Optional[int] = None
    tol: float = FINITE_TOL
    max_iter: int = MAX_ITER
    require: str = "coincidence"
    name: str = ""
    description: str = ""
    path_mode: str = "interior"
    mode: str = "finite"

    @property
    def pair(self) -> MappingPair:
        return MappingPair.from_tables(self.T, self.g)

    def label(self, i) -> str:
        return self.space.labels[i]

    def to_dict(self) -> Dict:
        sp = self.space
        lab = sp.labels
        if sp.coordinates is not None:
            space = {"coordinates": list(sp.coordinates), "labels": list(lab)}
        else:
            space = {"labels": list(lab), "matrix": sp.dist.tolist()}
        return {
            "format": FORMAT, "mode": "finite", "name": self.name, "description": self.description,
            "space": space,
            "Y": [lab[i] for i in sorted(sp.Y)],
            "relation": [[lab[a], lab[b]] for a, b in self.relation.sorted_edges()],
            "T": {lab[i]: lab[v] for i, v in enumerate(self.T)},
            "g": {lab[i]: lab[v] for i, v in enumerate(self.g)},
            "contraction": self.contraction_specs,
            "solver": {"x0": None if self.x0 is None else lab[self.x0], "tol": self.tol,
                       "max_iter": self.max_iter},
            "require": self.require, "path_mode": self.path_mode,
        }


@dataclass
class Interval:
    lo: float
    hi: float
    closed: Tuple[bool, bool] = (True, True)

    @classmethod
    def from_spec(cls, spec) -> "Interval":
        c = spec.get("closed", [True, True])
        iv = cls(float(spec["lo"]), float(spec["hi"]), (bool(c[0]), bool(c[1])))
        if iv.hi < iv.lo:
            raise InstanceError("interval with hi < lo")
        return iv

    def __contains__(self, x) -> bool:
        lo_ok = x >= self.lo if self.closed[0] else x > self.lo
        hi_ok = x <= self.hi if self.closed[1] else x < self.hi
        return bool(lo_ok and hi_ok)

    def sample(self, m: int) -> List[float]:
        pts = np.linspace(self.lo, self.hi, m)
        return [float(p) for p in pts if p in self]

    def to_dict(self):
        return {"lo": self.lo, "hi": self.hi, "closed": list(self.closed)}


@dataclass
class ContinuousInstance:
    X: Interval
    Y: Interval
    T_src: str
    g_src: str
    g_inverse_src: str
    relation_src: str
    contractions: List[ImplicitRelation]
    contraction_specs: List[Dict]
    x0: Optional[float] = None
    samples: int = 41
    tol: float = CONTINUOUS_TOL
    max_iter: int = MAX_ITER
    assertions: Dict = field(default_factory=dict)
    require: str = "coincidence"
    name: str = ""
    description: str = ""
    mode: str = "continuous"

    def __post_init__(self):
        self._T = Expression(self.T_src)
        self._g = Expression(self.g_src)
        self._ginv = Expression(self.g_inverse_src)
        self._rel = Expression(self.relation_src, ("x", "y"))

    def T(self, x):
        return float(self._T(x))

    def g(self, x):
        return float(self._g(x))

    def g_inverse(self, y):
        return float(self._ginv(y))

    def related(self, a, b) -> bool:
        return bool(self._rel(a, b))

    @property
    def pair(self) -> MappingPair:
        return MappingPair.from_functions(self.T, self.g, self.g_inverse)

    def in_space(self, x) -> bool:
        return x in self.X

    def in_Y(self, y) -> bool:
        return y in self.Y

    def sample_points(self) -> List[float]:
        pts = set(self.X.sample(self.samples))
        if self.x0 is not None:
            pts.add(float(self.x0))
        return sorted(pts)

    def Y_sample(self) -> List[float]:
        return self.Y.sample(self.samples)

    def to_dict(self) -> Dict:
        return {
            "format": FORMAT, "mode": "continuous", "name": self.name, "description": self.description,
            "X": self.X.to_dict(), "Y": self.Y.to_dict(),
            "T": self.T_src, "g": self.g_src, "g_inverse": self.g_inverse_src,
            "relation": self.relation_src, "contraction": self.contraction_specs,
            "samples": self.samples, "assertions": dict(self.assertions),
            "solver": {"x0": self.x0, "tol": self.tol, "max_iter": self.max_iter},
            "require": self.require,
        }


@dataclass
class UrysohnInstance:
    problem_spec: Dict
    u0: Optional[List[float]] = None
    tol: float = CONTINUOUS_TOL
    max_iter: int = 1000
    exact: Optional[str] = None  # expression in t, for error reports
    name: str = ""
    description: str = ""
    require: str = "coincidence"
    mode: str = "urysohn"

    def problem(self, grid_size: Optional[int] = None) -> UrysohnProblem:
        return UrysohnProblem.from_spec(self.problem_spec, grid_size)

    def to_dict(self) -> Dict:
        return {"format": FORMAT, "mode": "urysohn", "name": self.name,
                "description": self.description, "problem": self.problem_spec,
                "solver": {"u0": self.u0, "tol": self.tol, "max_iter": self.max_iter},
                "exact": self.exact, "require": self.require}


def _finite(doc: Dict) -> FiniteInstance:
    sp = doc.get("space")
    if not isinstance(sp, dict):
        raise InstanceError("missing 'space'")
    if "coordinates" in sp:
        labels = sp.get("labels")
        space = FiniteMetricSpace.from_coordinates(sp["coordinates"], labels)
    elif "matrix" in sp:
        space = FiniteMetricSpace(sp["labels"], sp["matrix"])
    else:
        raise InstanceError("'space' needs 'coordinates' or 'labels' + 'matrix'")
    n = space.n

    def idx(label):
        try:
            return space.index(label)
        except KeyError:
            raise InstanceError(f"undeclared label {label!r}") from None

    if doc.get("Y") is not None:
        space = FiniteMetricSpace(space.labels, space.dist, [idx(l) for l in doc["Y"]], space.coordinates)

    rel = doc.get("relation")
    if isinstance(rel, dict):
        kind = rel.get("kind")
        if kind == "universal":
            R = Relation.universal(n)
        elif kind == "diagonal":
            R = Relation.diagonal(n)
        elif kind == "leq":
            if space.coordinates is None:
                raise InstanceError("'leq' relation needs coordinates")
            c = space.coordinates
            R = Relation(n, ((i, j) for i in range(n) for j in range(n) if c[i] <= c[j]))
        else:
            raise InstanceError(f"unknown relation kind {kind!r}")
    elif isinstance(rel, list):
        R = Relation(n, [(idx(a), idx(b)) for a, b in rel])
    else:
        raise InstanceError("missing 'relation'")

    maps = []
    for key in ("T", "g"):
        table = doc.get(key)
        if not isinstance(table, dict):
            raise InstanceError(f"map {key!r} must be a label table")
        for l in table:
            idx(l)
        missing = [l for l in space.labels if l not in {str(k) for k in table}]
        if missing:
            raise InstanceError(f"map {key} is not total: no image for {missing[0]!r}")
        table = {str(k): v for k, v in table.items()}
        maps.append(tuple(idx(table[l]) for l in space.labels))

    Gs, specs = _contractions(doc.get("contraction"))
    solver = doc.get("solver", {}) or {}
    x0 = solver.get("x0")
    return FiniteInstance(space, R, maps[0], maps[1], Gs, specs,
                          None if x0 is None else idx(x0),
                          float(solver.get("tol", FINITE_TOL)), int(solver.get("max_iter", MAX_ITER)),
                          doc.get("require", "coincidence"), doc.get("name", ""),
                          doc.get("description", ""), doc.get("path_mode", "interior"))


def _continuous(doc: Dict) -> ContinuousInstance:
    Gs, specs = _contractions(doc.get("contraction"))
    solver = doc.get("solver", {}) or {}
    X = Interval.from_spec(doc["X"])
    Y = Interval.from_spec(doc.get("Y", doc["X"]))
    return ContinuousInstance(X, Y, doc["T"], doc["g"], doc["g_inverse"], doc["relation"], Gs, specs,
                              solver.get("x0"), int(doc.get("samples", 41)),
                              float(solver.get("tol", CONTINUOUS_TOL)),
                              int(solver.get("max_iter", MAX_ITER)), dict(doc.get("assertions", {})),
                              doc.get("require", "coincidence"), doc.get("name", ""),
                              doc.get("description", ""))


def _urysohn(doc: Dict) -> UrysohnInstance:
    solver = doc.get("solver", {}) or {}
    inst = UrysohnInstance(dict(doc["problem"]), solver.get("u0"),
                           float(solver.get("tol", CONTINUOUS_TOL)), int(solver.get("max_iter", 1000)),
                           doc.get("exact"), doc.get("name", ""), doc.get("description", ""),
                           doc.get("require", "coincidence"))
    inst.problem()  # validate now
    return inst


def from_dict(doc: Dict):
    if not isinstance(doc, dict):
        raise InstanceError("instance must be a JSON object")
    mode = doc.get("mode", "finite")
    builders = {"finite": _finite, "continuous": _continuous, "urysohn": _urysohn}
    if mode not in builders:
        raise InstanceError(f"unknown mode {mode!r}")
    try:
        return builders[mode](doc)
    except InstanceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        what = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        raise InstanceError(what) from None


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from None
    return from_dict(doc)


def resolve(path) -> Path:
    """Filesystem path, or ``fixtures/<name>`` for a bundled fixture."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.parent.name == "fixtures" or str(p.parent) == "." else None
    if name is not None:
        for cand in (FIXTURE_DIR / name, FIXTURE_DIR / f"{name}.json"):
            if cand.exists():
                return cand
    raise InstanceError(f"no such instance file: {path}")


def load(path):
    try:
        text = resolve(path).read_text()
    except OSError as exc:
        raise InstanceError(str(exc)) from None
    return loads(text)


def canonical(instance) -> str:
    return json.dumps(instance.to_dict(), sort_keys=True, indent=2) + "\n"


def digest(instance) -> str:
    return hashlib.sha256(canonical(instance).encode()).hexdigest()[:16]
