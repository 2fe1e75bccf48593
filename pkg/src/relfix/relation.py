"""Binary relations over a finite indexed point set.

Points are the integers ``0 .. n-1``.  Self-maps are sequences of length
``n`` whose entry ``i`` is the image of point ``i``.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Relation:
    """Non-empty set of ordered pairs ``(i, j)`` over ``n`` points."""

    n: int
    edges: frozenset
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[Pair]):
        edges = frozenset((int(i), int(j)) for i, j in edges)
        if n < 1:
            raise ValueError("relation needs at least one point")
        if not edges:
            raise ValueError("empty relation: a non-empty edge set is required")
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for {n} points")
        matrix = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            matrix[i, j] = True
        matrix.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_matrix", matrix)

    @classmethod
    def from_matrix(cls, matrix) -> "Relation":
        matrix = np.asarray(matrix, dtype=bool)
        return cls(matrix.shape[0], zip(*np.nonzero(matrix)))

    @classmethod
    def universal(cls, n: int) -> "Relation":
        return cls(n, ((i, j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, n: int) -> "Relation":
        return cls(n, ((i, i) for i in range(n)))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __contains__(self, pair) -> bool:
        i, j = pair
        return bool(self._matrix[i, j])

    def __len__(self):
        return len(self.edges)

    def comparable(self, i: int, j: int) -> bool:
        """``[i, j]``: related in either direction."""
        return bool(self._matrix[i, j] or self._matrix[j, i])

    def sorted_edges(self) -> List[Pair]:
        return sorted(self.edges)


def symmetric_closure(R: Relation) -> Relation:
    return Relation.from_matrix(R.matrix | R.matrix.T)


def is_r_preserving(R: Relation, seq: Sequence[int]) -> bool:
    return all((a, b) in R for a, b in zip(seq, seq[1:]))


def is_tg_closed(R: Relation, T: Sequence[int], g: Sequence[int]) -> Tuple[bool, Optional[Pair]]:
    """Decide whether ``(gx, gy) in R`` implies ``(Tx, Ty) in R``.

    Returns ``(True, None)`` or ``(False, (x, y))`` with the least violating
    pair in lexicographic order.
    """
    T = np.asarray(T)
    g = np.asarray(g)
    premise = R.matrix[np.ix_(g, g)]
    conclusion = R.matrix[np.ix_(T, T)]
    bad = np.argwhere(premise & ~conclusion)
    if len(bad):
        x, y = bad[0]
        return False, (int(x), int(y))
    return True, None


def is_t_closed(R: Relation, T: Sequence[int]) -> Tuple[bool, Optional[Pair]]:
    return is_tg_closed(R, T, range(R.n))


def is_complete_relation(R: Relation, S: Iterable[int]) -> Tuple[bool, Optional[Pair]]:
    S = sorted(set(S))
    for a in S:
        for b in S:
            if not R.comparable(a, b):
                return False, (a, b)
    return True, None


@dataclass
class Directedness:
    holds: bool
    witnesses: Dict[Pair, int]
    failing_pair: Optional[Pair]
    delta: frozenset  # every z serving some pair


def is_g_directed(D: Iterable[int], g: Sequence[int], R: Relation,
                  domain: Optional[Iterable[int]] = None) -> Directedness:
    """``(g, R)``-directedness of ``D``.

    For every ``x, y`` in ``D`` there must be ``z`` with ``(x, gz)`` and
    ``(y, gz)`` in ``R``.  ``domain`` restricts ``R`` to a subset (pairs with
    an endpoint outside it do not count).  The least such ``z`` is recorded
    per pair; ``delta`` collects all admissible ``z`` over all pairs.
    """
    D = sorted(set(D))
    allowed = np.ones(R.n, dtype=bool)
    if domain is not None:
        allowed[:] = False
        allowed[list(domain)] = True
    M = R.matrix & allowed[:, None] & allowed[None, :]
    g = np.asarray(g)
    witnesses = {}
    failing = None
    delta = set()
    for a in D:
        for b in D:
            zs = np.nonzero(M[a, g] & M[b, g])[0]
            delta.update(int(z) for z in zs)
            if len(zs):
                witnesses[(a, b)] = int(zs[0])
            elif failing is None:
                failing = (a, b)
    return Directedness(failing is None, witnesses, failing, frozenset(delta))


@dataclass(frozen=True)
class GPath:
    witnesses: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.witnesses) - 1

    def validate(self, R: Relation, g, T, alpha: int, beta: int,
                 interior_condition: bool = True, domain=None) -> None:
        """Raise ``ValueError`` unless this is a g-path from alpha to beta."""
        w = self.witnesses
        if len(w) < 2:
            raise ValueError("a g-path has length at least 1")
        if g[w[0]] != alpha or g[w[-1]] != beta:
            raise ValueError("g-path endpoints do not map to alpha/beta")
        inside = (lambda p: True) if domain is None else set(domain).__contains__
        for u, v in zip(w, w[1:]):
            if not (R.comparable(g[u], g[v]) and inside(g[u]) and inside(g[v])):
                raise ValueError(f"g-images of {u}, {v} are not related")
        if interior_condition:
            for u in w[1:-1]:
                if not (R.comparable(g[u], T[u]) and inside(g[u]) and inside(T[u])):
                    raise ValueError(f"interior witness {u} has [gw, Tw] unrelated")


def find_g_path(R: Relation, g: Sequence[int], T: Sequence[int], alpha: int, beta: int,
                interior_condition: bool = True, max_len: Optional[int] = None,
                domain: Optional[Iterable[int]] = None) -> Optional[GPath]:
    """Shortest g-path joining ``alpha`` to ``beta`` in the symmetric closure of R.

    Vertices are points ``w``; an arc ``u -> v`` exists when ``[gu, gv]`` is
    in ``R``.  With ``interior_condition`` every interior witness must also
    satisfy ``[gw, Tw] in R``.  Sources and neighbours are scanned in
    increasing index order, so among shortest paths the result is
    deterministic.  Returns ``None`` if no path of length ``<= max_len``
    exists.
    """
    n = R.n
    g = list(g)
    T = list(T)
    if max_len is None:
        max_len = n + 1
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    sources = [w for w in range(n) if g[w] == alpha]
    if not sources or not any(g[w] == beta for w in range(n)):
        raise ValueError("endpoint has no g-preimage")

    allowed = [True] * n
    if domain is not None:
        allowed = [False] * n
        for p in domain:
            allowed[p] = True
    sym = R.matrix | R.matrix.T

    def arc(u, v):
        return allowed[g[u]] and allowed[g[v]] and bool(sym[g[u], g[v]])

    def interior_ok(w):
        if not interior_condition:
            return True
        return allowed[g[w]] and allowed[T[w]] and bool(sym[g[w], T[w]])

    parent = {s: None for s in sources}
    depth = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        if depth[u] >= max_len:
            continue
        for v in range(n):
            if not arc(u, v):
                continue
            if g[v] == beta:
                path = [v, u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return GPath(tuple(reversed(path)))
            if v not in depth and depth[u] + 1 < max_len and interior_ok(v):
                parent[v] = u
                depth[v] = depth[u] + 1
                queue.append(v)
    return None


def _check_partial_order(n: int, leq: Callable[[int, int], bool]) -> np.ndarray:
    M = np.array([[bool(leq(i, j)) for j in range(n)] for i in range(n)], dtype=bool)
    for i in range(n):
        if not M[i, i]:
            raise ValueError(f"not reflexive at {i}")
    for i in range(n):
        for j in range(n):
            if i != j and M[i, j] and M[j, i]:
                raise ValueError(f"not antisymmetric at ({i}, {j})")
    for i in range(n):
        for j in range(n):
            if M[i, j]:
                for k in range(n):
                    if M[j, k] and not M[i, k]:
                        raise ValueError(f"not transitive at ({i}, {j}, {k})")
    return M


def order_relation(n: int, leq: Callable[[int, int], bool]) -> Relation:
    """Edges ``(i, j)`` with ``i <= j`` under a partial order on ``n`` points."""
    return Relation.from_matrix(_check_partial_order(n, leq))


def comparability_relation(n: int, leq: Callable[[int, int], bool]) -> Relation:
    M = _check_partial_order(n, leq)
    return Relation.from_matrix(M | M.T)
