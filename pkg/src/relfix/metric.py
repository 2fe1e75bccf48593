"""Finite metric spaces with a distinguished subspace."""
from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .relation import Relation, is_r_preserving

TRIANGLE_TOL = 1e-12


@dataclass(frozen=True)
class FiniteMetricSpace:
    labels: Tuple[str, ...]
    dist: np.ndarray
    Y: frozenset
    coordinates: Optional[Tuple[float, ...]] = None

    def __init__(self, labels, dist, Y=None, coordinates=None):
        labels = tuple(str(s) for s in labels)
        dist = np.array(dist, dtype=float)
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be unique")
        if dist.shape != (len(labels), len(labels)):
            raise ValueError(
                f"distance matrix has shape {dist.shape}, expected {(len(labels),) * 2}")
        Y = frozenset(range(len(labels))) if Y is None else frozenset(int(i) for i in Y)
        if not Y:
            raise ValueError("subspace Y must be non-empty")
        if not all(0 <= i < len(labels) for i in Y):
            raise ValueError("Y references unknown points")
        dist.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "coordinates",
                           None if coordinates is None else tuple(float(c) for c in coordinates))

    @classmethod
    def from_coordinates(cls, coordinates, labels=None, Y=None):
        """1-D points with the absolute-difference metric."""
        x = np.asarray(coordinates, dtype=float)
        if labels is None:
            labels = [format(float(c), "g") for c in x]
        return cls(labels, np.abs(x[:, None] - x[None, :]), Y, coordinates=x)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])


def validate_metric(space: FiniteMetricSpace) -> Tuple[bool, Optional[Tuple[int, int, int]]]:
    """Check the metric axioms.

    Returns ``(True, None)`` or ``(False, (i, j, k))``: the first violating
    triple in lexicographic order.  Identity and symmetry failures are
    reported as ``(i, j, j)``; a triangle failure ``d(i,j) > d(i,k) + d(k,j)``
    as ``(i, j, k)``.
    """
    D = space.dist
    n = space.n
    for i, j, k in product(range(n), repeat=3):
        if k == j:
            if i == j and D[i, j] != 0:
                return False, (i, j, k)
            if i != j and not D[i, j] > 0:
                return False, (i, j, k)
            if D[i, j] != D[j, i]:
                return False, (i, j, k)
        if D[i, j] > D[i, k] + D[k, j] + TRIANGLE_TOL:
            return False, (i, j, k)
    return True, None


@dataclass
class Rationale:
    holds: bool
    reason: str


def finite_r_completeness(space: FiniteMetricSpace, R: Relation, Ysub=None) -> Rationale:
    return Rationale(True, (
        "finite metric space: every Cauchy sequence is eventually constant, "
        "so every R-preserving Cauchy sequence in Y converges to its tail value, which lies in Y"))


def finite_d_self_closed(space: FiniteMetricSpace, R: Relation, Ysub=None) -> Rationale:
    return Rationale(True, (
        "finite metric space: an R-preserving convergent sequence is eventually constant at its "
        "limit x, so (x, x) is in R and the constant tail is a subsequence with [x_nk, x] in R"))


def d_self_closed_oracle(space: FiniteMetricSpace, R: Relation, Ysub=None, length: int = 4) -> bool:
    """Enumerate eventually-constant R-preserving sequences in ``Ysub``.

    A sequence ``s_0 .. s_m`` followed by the constant tail ``s_m`` is
    R-preserving iff every consecutive pair (including ``(s_m, s_m)``) lies
    in ``R``.  Its limit is ``s_m``; the relation is d-self-closed on these
    sequences iff some infinite subsequence is comparable to the limit, which
    for the tail means ``[s_m, s_m]``.
    """
    pts = sorted(space.Y if Ysub is None else Ysub)
    for m in range(1, length + 1):
        for seq in product(pts, repeat=m):
            full = list(seq) + [seq[-1]]
            if not is_r_preserving(R, full):
                continue
            limit = seq[-1]
            if not R.comparable(limit, limit):
                return False
    return True
