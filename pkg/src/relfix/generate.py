"""Seeded random finite instances and the soundness sweep built on them."""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .contraction import make_catalog
from .instance import FiniteInstance
from .metric import FiniteMetricSpace
from .relation import Relation
from .solver import error_bounds, find_start, iterate
from .verifier import (brute_force_coincidence, check_compatibility_finite, check_u1,
                       compatibility_oracle, verify)

LINEAR_PHI_CATALOG = ("I", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII",
                      "XIII", "XIV", "XV", "XVI")


def random_catalog_params(rng: np.random.Generator, id: str) -> Dict:
    """Parameters drawn inside the admissible range of catalog member ``id``."""
    u = lambda lo, hi: float(rng.uniform(lo, hi))
    if id in ("I", "X", "XIII"):
        return {"k": u(0, 0.95)}
    if id in ("III", "IV", "VIII"):
        return {"k": u(0, 0.49)}
    if id in ("VI", "VII"):
        return {"k": u(0, 0.95), "L": u(0, 2)}
    if id == "V":
        a = rng.dirichlet([1, 1, 1, 1])[:3] * np.array([1, 0.5, 0.5]) * 0.98
        return {"a": [float(v) for v in a]}
    if id == "IX":
        while True:
            a = rng.dirichlet([1] * 6)[:5] * 0.98 + 1e-3
            if a.sum() < 1 and a[0] + a[1] + a[2] + 2 * a[3] < 1:
                return {"a": [float(v) for v in a]}
    if id == "XI":
        return {"k": u(0, 0.9), "a": u(0, 0.49), "b": u(0, 0.49)}
    if id == "XII":
        a1, a2, a3 = (rng.dirichlet([1, 1, 1, 1])[:3] * 0.98)
        a1 = max(a1, 1e-3)
        return {"a": [float(a1), float(a2), float(a3), u(0, 0.99 - a1)]}
    if id == "XIV":
        a1 = u(0, 0.5)
        return {"a": [a1, u(0, (0.99 - a1) / 2) * 0.5, u(0, 0.99 - a1)]}
    if id == "XV":
        return {"k": u(0, 1 / 11 - 1e-3)}
    if id == "XVI":
        return {"a1": u(0.05, 1.95), "a2": u(0.05, 2)}
    raise ValueError(f"no parameter sampler for catalog {id!r}")


def random_space(rng: np.random.Generator, n: int) -> FiniteMetricSpace:
    """Distinct points on a line, or in the plane with the Euclidean metric."""
    if rng.random() < 0.5:
        coords = rng.choice(np.arange(0, 40), size=n, replace=False) / 4.0
        return FiniteMetricSpace.from_coordinates(coords, labels=[f"p{i}" for i in range(n)])
    while True:
        P = np.round(rng.uniform(0, 4, size=(n, 2)), 2)
        D = np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(-1))
        if np.all(D[~np.eye(n, dtype=bool)] > 0):
            return FiniteMetricSpace([f"p{i}" for i in range(n)], D)


def random_relation(rng: np.random.Generator, n: int, space: Optional[FiniteMetricSpace] = None) -> Relation:
    kind = rng.integers(0, 4)
    if kind == 0:
        return Relation.universal(n)
    if kind == 1 and space is not None and space.coordinates is not None:
        c = space.coordinates
        return Relation(n, ((i, j) for i in range(n) for j in range(n) if c[i] <= c[j]))
    M = rng.random((n, n)) < rng.uniform(0.2, 0.8)
    if kind == 2:
        M |= np.eye(n, dtype=bool)
    if not M.any():
        M[0, 0] = True
    return Relation.from_matrix(M)


def tg_closure(R: Relation, T, g) -> Relation:
    """Smallest relation containing R that is (T, g)-closed."""
    M = R.matrix.copy()
    T, g = np.asarray(T), np.asarray(g)
    while True:
        new = M.copy()
        xs, ys = np.nonzero(M[np.ix_(g, g)])
        new[T[xs], T[ys]] = True
        if (new == M).all():
            return Relation.from_matrix(M)
        M = new


def random_pair(rng: np.random.Generator, n: int):
    """Unconstrained random ``(T, g)`` tables, biased towards coincidences."""
    g = rng.integers(0, n, size=n)
    T = rng.integers(0, n, size=n)
    flip = rng.random(n) < 0.4
    T[flip] = g[flip]
    return tuple(int(v) for v in T), tuple(int(v) for v in g)


def random_instance(rng: np.random.Generator, n: int, catalog=LINEAR_PHI_CATALOG) -> FiniteInstance:
    """A random finite instance aimed at (but not guaranteed to satisfy) the hypotheses.

    ``g`` is random, ``Y = g(X)``, and ``T`` pulls ``g x`` towards a centre
    by a random factor before snapping to the nearest point of ``g(X)``, so a
    good fraction of draws are contractive.  Most draws close the random
    relation under ``(g x, g y) -> (T x, T y)``.
    """
    space = random_space(rng, n)
    D = space.dist
    g = rng.integers(0, n, size=n)
    if rng.random() < 0.3:
        g = rng.permutation(n)
    gX = np.array(sorted(set(int(v) for v in g)))
    centre = int(rng.choice(gX))
    lam = rng.uniform(0, 0.5)
    T = []
    for x in range(n):
        # target distance from the centre shrinks by lam; pick the best matching point of g(X)
        want = lam * D[g[x], centre]
        cost = np.abs(D[gX, centre] - want) + 0.25 * D[gX, g[x]] * (1 - lam)
        T.append(int(gX[np.argmin(cost)]))
    R = random_relation(rng, n, space)
    if rng.random() < 0.85:
        R = tg_closure(R, T, g)
    id = str(rng.choice(catalog))
    params = random_catalog_params(rng, id)
    G = make_catalog(id, params)
    space = FiniteMetricSpace(space.labels, space.dist, gX.tolist(), space.coordinates)
    return FiniteInstance(space, R, tuple(T), tuple(int(v) for v in g), [G], [G.spec],
                          name=f"random-{n}")


@dataclass
class SweepStats:
    generated: int = 0
    passing: int = 0
    bound_failures: List = field(default_factory=list)
    limit_failures: List = field(default_factory=list)
    u1_implication_failures: List = field(default_factory=list)
    u1_alternative_holds: int = 0
    max_steps: int = 0


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RELFIX_THREADS", "1")))
    except ValueError:
        return 1


def check_instance(inst: FiniteInstance) -> Optional[Dict]:
    """Run the soundness checks on one instance; ``None`` if it fails verification."""
    rep = verify(inst)
    if rep.rank == "none":
        return None
    pair = inst.pair
    x0 = find_start(pair, inst.relation, range(inst.space.n))
    D = inst.space.dist
    dist = lambda a, b: D[a, b]
    trace, cert = iterate(pair, x0, dist, inst.tol, inst.max_iter)
    G = next(G for G in inst.contractions if G.name == rep.contraction)
    bounds = error_bounds(trace, G.phi, dist)
    C, _ = brute_force_coincidence(inst.T, inst.g)
    alt = rep.ok("u1'") or rep.ok("u1''")
    u1 = check_u1(inst.T, inst.g, inst.relation).holds
    return {"bounds_hold": bounds.holds, "first_violation": bounds.first_violation,
            "limit_ok": cert.points[0] in C, "alt": alt, "u1": u1, "steps": trace.steps,
            "rank": rep.rank}


def sweep(count: int = 500, seed: int = 0, min_points: int = 3, max_points: int = 8,
          catalog=LINEAR_PHI_CATALOG, max_draws: Optional[int] = None) -> SweepStats:
    """Draw instances until ``count`` pass verification, checking each one.

    Candidates are generated sequentially from one seeded stream; checking
    runs on up to ``RELFIX_THREADS`` workers with results consumed in draw
    order, so the outcome does not depend on the worker count.
    """
    rng = np.random.default_rng(seed)
    stats = SweepStats()
    max_draws = max_draws or 50 * count
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        while stats.passing < count and stats.generated < max_draws:
            batch = []
            for _ in range(min(64, max_draws - stats.generated)):
                n = int(rng.integers(min_points, max_points + 1))
                batch.append(random_instance(rng, n, catalog))
            for inst, res in zip(batch, pool.map(check_instance, batch)):
                if stats.passing >= count:
                    break
                stats.generated += 1
                if res is None:
                    continue
                stats.passing += 1
                idx = stats.generated - 1
                stats.max_steps = max(stats.max_steps, res["steps"])
                if not res["bounds_hold"]:
                    stats.bound_failures.append((idx, res["first_violation"]))
                if not res["limit_ok"]:
                    stats.limit_failures.append(idx)
                if res["alt"]:
                    stats.u1_alternative_holds += 1
                    if not res["u1"]:
                        stats.u1_implication_failures.append(idx)
    return stats


def compatibility_sweep(count: int = 200, seed: int = 0, max_points: int = 5) -> List:
    """Compare the finite compatibility test with the sequence oracle; returns disagreements."""
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(count):
        n = int(rng.integers(1, max_points + 1))
        T, g = random_pair(rng, n)
        R = random_relation(rng, n)
        fast, _ = check_compatibility_finite(T, g, R)
        slow, _ = compatibility_oracle(T, g, R)
        if fast != slow:
            bad.append((i, T, g, R.sorted_edges()))
    return bad
