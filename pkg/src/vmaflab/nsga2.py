"""NSGA-II over box-bounded real genes (minimization of every objective).

Randomness is drawn from one seeded generator, and only in the sequential
selection / variation phase, so a parallel ``map_fn`` for evaluation cannot
change the result.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import ShapeError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bounds:
    low: tuple[float, ...]
    high: tuple[float, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        low = tuple(float(v) for v in self.low)
        high = tuple(float(v) for v in self.high)
        if len(low) != len(high) or not low:
            raise ValueError("low and high must be non-empty and equally long")
        # low == high pins a gene; used for degenerate searches
        if any(lo > hi for lo, hi in zip(low, high)):
            raise ValueError(f"bounds inverted: {low} > {high}")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    def __len__(self) -> int:
        return len(self.low)

    def clip(self, genes: np.ndarray) -> np.ndarray:
        return np.clip(genes, self.low, self.high)

    def contains(self, genes: Sequence[float]) -> bool:
        return all(lo <= g <= hi for g, lo, hi in zip(genes, self.low, self.high))


@dataclass
class Individual:
    genes: np.ndarray
    objectives: tuple[float, ...] | None = None
    rank: int | None = None
    crowding: float | None = None
    failed: bool = False


@dataclass
class ParetoFront:
    members: list[Individual] = field(default_factory=list)
    history: list[Individual] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def genes(self) -> np.ndarray:
        return np.array([m.genes for m in self.members])

    def objectives(self) -> np.ndarray:
        return np.array([m.objectives for m in self.members])


@dataclass(frozen=True)
class NSGA2Config:
    pop_size: int = 24
    generations: int = 30
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # None -> 1 / n_genes
    eta_c: float = 15.0
    eta_m: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 4 or self.pop_size % 2:
            raise ValueError("pop_size must be even and >= 4")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    if len(a) != len(b):
        raise ShapeError(f"objective vectors differ in length: {len(a)} vs {len(b)}")
    strictly = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly


def _objective_array(pop: Sequence[Individual]) -> np.ndarray:
    if any(ind.objectives is None for ind in pop):
        raise ValueError("every individual must be evaluated before sorting")
    return np.array([ind.objectives for ind in pop], dtype=np.float64).reshape(len(pop), -1)


def fast_nondominated_sort(pop: Sequence[Individual]) -> list[list[int]]:
    """Split ``pop`` into fronts of indices; also sets each ``rank`` (0-based)."""
    if not pop:
        return []
    ranks = _kernels.nondominated_ranks(_objective_array(pop))
    fronts: list[list[int]] = [[] for _ in range(int(ranks.max()) + 1)]
    for i, r in enumerate(ranks):
        fronts[r].append(i)
        pop[i].rank = int(r)
    return fronts


def crowding_distance(front: Sequence[int], objectives: np.ndarray) -> np.ndarray:
    """Crowding distance of each member of ``front`` (aligned with it)."""
    front = list(front)
    if not front:
        raise ValueError("front must not be empty")
    objs = np.asarray(objectives, dtype=np.float64)[front]
    n, m = objs.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = math.inf
        return dist
    for k in range(m):
        order = np.argsort(objs[:, k], kind="stable")
        col = objs[order, k]
        dist[order[0]] = dist[order[-1]] = math.inf
        span = col[-1] - col[0] if np.isfinite(col[[0, -1]]).all() else math.inf
        if not np.isfinite(span) or span <= 0:
            continue  # failed candidates carry inf objectives; no finite scale to normalize by
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def assign_crowding(pop: Sequence[Individual], fronts: Iterable[Sequence[int]]) -> None:
    objs = _objective_array(pop)
    for front in fronts:
        for i, d in zip(front, crowding_distance(front, objs)):
            pop[i].crowding = float(d)


def _better(a: Individual, b: Individual) -> bool:
    if a.rank != b.rank:
        return a.rank < b.rank
    return a.crowding > b.crowding


def sbx_pair(p1: float, p2: float, eta: float, u: float) -> tuple[float, float]:
    """Simulated binary crossover of one gene for a given uniform draw ``u``."""
    if u <= 0.5:
        beta = (2.0 * u) ** (1.0 / (eta + 1.0))
    else:
        beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0))
    c1 = 0.5 * ((1 + beta) * p1 + (1 - beta) * p2)
    c2 = 0.5 * ((1 - beta) * p1 + (1 + beta) * p2)
    return c1, c2


def polynomial_mutation(y: float, low: float, high: float, eta: float, u: float) -> float:
    span = high - low
    if span <= 0:
        return low
    d1 = (y - low) / span
    d2 = (high - y) / span
    power = 1.0 / (eta + 1.0)
    if u < 0.5:
        val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)
        dq = val ** power - 1.0
    else:
        val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)
        dq = 1.0 - val ** power
    return min(high, max(low, y + dq * span))


def _variation(parents: list[Individual], bounds: Bounds, cfg: NSGA2Config,
               rng: np.random.Generator) -> list[np.ndarray]:
    n_genes = len(bounds)
    pm = cfg.mutation_prob if cfg.mutation_prob is not None else 1.0 / n_genes
    children = []
    for a, b in zip(parents[0::2], parents[1::2]):
        c1, c2 = a.genes.copy(), b.genes.copy()
        if rng.random() < cfg.crossover_prob:
            for g in range(n_genes):
                c1[g], c2[g] = sbx_pair(a.genes[g], b.genes[g], cfg.eta_c, rng.random())
        for child in (c1, c2):
            for g in range(n_genes):
                if rng.random() < pm:
                    child[g] = polynomial_mutation(child[g], bounds.low[g], bounds.high[g], cfg.eta_m, rng.random())
            children.append(bounds.clip(child))
    return children


def _evaluate(genes_list: list[np.ndarray], evaluate, map_fn, n_obj: int | None) -> list[Individual]:
    def safe(genes):
        try:
            return tuple(float(v) for v in evaluate(genes)), False
        except Exception as exc:  # noqa: BLE001 - a failed candidate must not stop the search
            log.warning("evaluation failed for genes %s: %s", genes, exc)
            return None, True

    results = list(map_fn(safe, genes_list))
    if n_obj is None:
        n_obj = next((len(o) for o, _ in results if o is not None), 2)
    out = []
    for genes, (objs, failed) in zip(genes_list, results):
        if failed:
            objs = (math.inf,) * n_obj
        out.append(Individual(genes=np.array(genes, dtype=np.float64), objectives=objs, failed=failed))
    return out


def _rank_and_crowd(pop: list[Individual]) -> list[list[int]]:
    fronts = fast_nondominated_sort(pop)
    assign_crowding(pop, fronts)
    return fronts


def environmental_selection(pop: list[Individual], size: int) -> list[Individual]:
    """Keep ``size`` individuals, filling by front then by crowding distance."""
    fronts = _rank_and_crowd(pop)
    chosen: list[Individual] = []
    for front in fronts:
        if len(chosen) + len(front) <= size:
            chosen.extend(pop[i] for i in front)
            continue
        need = size - len(chosen)
        ordered = sorted(front, key=lambda i: (-pop[i].crowding, i))
        chosen.extend(pop[i] for i in ordered[:need])
        break
    return chosen


def evolve(evaluate: Callable[[np.ndarray], Sequence[float]], bounds: Bounds,
           cfg: NSGA2Config = NSGA2Config(), map_fn=map,
           n_objectives: int | None = None) -> ParetoFront:
    """Run NSGA-II and return the first front of the final population.

    ``history`` on the result holds every evaluated individual in order.
    """
    rng = np.random.default_rng(cfg.seed)
    low = np.array(bounds.low)
    high = np.array(bounds.high)
    init = [low + rng.random(len(bounds)) * (high - low) for _ in range(cfg.pop_size)]
    pop = _evaluate(init, evaluate, map_fn, n_objectives)
    history = list(pop)
    n_obj = len(pop[0].objectives)
    _rank_and_crowd(pop)
    for gen in range(cfg.generations):
        parents = []
        for _ in range(cfg.pop_size):
            i, j = rng.integers(len(pop), size=2)
            a, b = pop[i], pop[j]
            parents.append(b if _better(b, a) else a)
        offspring = _evaluate(_variation(parents, bounds, cfg, rng), evaluate, map_fn, n_obj)
        history.extend(offspring)
        pop = environmental_selection(pop + offspring, cfg.pop_size)
        log.debug("generation %d: front size %d", gen, sum(1 for p in pop if p.rank == 0))
    _rank_and_crowd(pop)
    members = [replace(p) for p in pop if p.rank == 0]
    return ParetoFront(members=members, history=history)
