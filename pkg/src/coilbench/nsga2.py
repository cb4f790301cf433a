"""Self-contained NSGA-II engine: real-coded, bound-constrained, seeded.

Non-dominated sorting and crowding follow the canonical elitist scheme;
variation is simulated binary crossover plus polynomial mutation.  Runs are
deterministic for a fixed seed because random draws happen only in the
sequential variation phase.  A cumulative archive keeps every non-dominated
evaluated point, which makes the per-generation hypervolume monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

RNG_ALGORITHM = "PCG64"  # recorded in run metadata for reproducibility claims


class LengthMismatch(ValueError):
    """Objective vectors of different lengths were compared."""


class NonFinite(ValueError):
    """An objective vector contains NaN or infinity."""


class PointBeyondReference(ValueError):
    """A front point does not dominate the hypervolume reference point."""


class EvaluatorFailure(RuntimeError):
    """The objective evaluator raised or returned garbage; carries partial results."""

    def __init__(self, message, generation=None, history=(), archive=None):
        super().__init__(message)
        self.generation = generation
        self.history = tuple(history)
        self.archive = archive


@dataclass(eq=False)
class Individual:
    genes: np.ndarray
    objectives: Optional[np.ndarray] = None
    rank: Optional[int] = None
    crowding: float = 0.0


@dataclass(frozen=True)
class NsgaConfig:
    """Run parameters.  mutation_prob=None means 1/n_genes."""

    bounds: tuple
    population: int = 100
    generations: int = 100
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    mutation_prob: Optional[float] = None
    mutation_eta: float = 20.0
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(
            self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        )
        if not self.bounds:
            raise ValueError("need at least one gene bound")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ValueError(f"gene bound ({lo}, {hi}) must have lo < hi")
        if self.population < 4 or self.population % 2:
            raise ValueError("population must be even and >= 4")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if p is not None and not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.crossover_eta <= 0.0 or self.mutation_eta <= 0.0:
            raise ValueError("distribution indices must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative 64-bit integer")

    @property
    def n_genes(self) -> int:
        return len(self.bounds)

    @property
    def effective_mutation_prob(self) -> float:
        return self.mutation_prob if self.mutation_prob is not None else 1.0 / self.n_genes


class HistoryRow(NamedTuple):
    generation: int
    evaluations: int
    best_f1: float
    best_f2: float
    archive_size: int
    hypervolume: float


def _as_objectives(vec) -> np.ndarray:
    arr = np.asarray(vec, dtype=float)
    if arr.ndim != 1:
        raise ValueError("objective vector must be 1-D")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"objective vector contains non-finite values: {arr}")
    return arr


def dominates(a, b) -> bool:
    """Pareto dominance for minimization: a <= b everywhere, < somewhere."""
    va, vb = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if va.shape != vb.shape or va.ndim != 1:
        raise LengthMismatch(f"objective lengths differ: {va.shape} vs {vb.shape}")
    if not (np.all(np.isfinite(va)) and np.all(np.isfinite(vb))):
        raise NonFinite("dominance needs finite objectives")
    return bool(np.all(va <= vb) and np.any(va < vb))


def fast_nondominated_sort(pop: Sequence[Individual]) -> list:
    """Partition into fronts F0, F1, ...; assigns .rank on every individual."""
    if not pop:
        return []
    objs = np.vstack([_as_objectives(ind.objectives) for ind in pop])
    le = np.all(objs[:, None, :] <= objs[None, :, :], axis=2)
    lt = np.any(objs[:, None, :] < objs[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    counts = dom.sum(axis=0)

    fronts = []
    assigned = np.zeros(len(pop), dtype=bool)
    current = np.flatnonzero(counts == 0)
    rank = 0
    while current.size:
        for i in current:
            pop[i].rank = rank
        fronts.append([pop[i] for i in current])
        assigned[current] = True
        counts = counts - dom[current].sum(axis=0)
        current = np.flatnonzero((counts == 0) & ~assigned)
        rank += 1
    return fronts


def crowding_distance(front: Sequence[Individual]) -> list:
    """Per-front diversity measure; assigns .crowding and returns the values.

    Front extremes get infinity; interior members sum normalized gaps to their
    sorted neighbours per objective.  Objectives with zero range contribute
    nothing, so duplicated vectors stay finite.
    """
    if not front:
        raise ValueError("front must be non-empty")
    n = len(front)
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = math.inf
    else:
        objs = np.vstack([_as_objectives(ind.objectives) for ind in front])
        for m in range(objs.shape[1]):
            order = np.argsort(objs[:, m], kind="stable")
            vals = objs[order, m]
            dist[order[0]] = dist[order[-1]] = math.inf
            span = vals[-1] - vals[0]
            if span > 0.0:
                dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    for ind, d in zip(front, dist):
        ind.crowding = float(d)
    return [float(d) for d in dist]


def sbx_crossover(p1, p2, cfg: NsgaConfig, rng: np.random.Generator):
    """Simulated binary crossover; children are clipped to the gene bounds.

    When the pair crosses over, each gene participates with probability 1/2
    and the two results swap sides with probability 1/2, so each child is
    distributed symmetrically about the parent midpoint.
    """
    g1 = np.asarray(p1, dtype=float).copy()
    g2 = np.asarray(p2, dtype=float).copy()
    if rng.random() <= cfg.crossover_prob:
        inv = 1.0 / (cfg.crossover_eta + 1.0)
        for j in range(cfg.n_genes):
            if rng.random() > 0.5:
                continue
            u = rng.random()
            if u <= 0.5:
                beta = (2.0 * u) ** inv
            else:
                beta = (0.5 / (1.0 - u)) ** inv
            x1, x2 = g1[j], g2[j]
            low = 0.5 * ((x1 + x2) - beta * abs(x2 - x1))
            high = 0.5 * ((x1 + x2) + beta * abs(x2 - x1))
            if rng.random() <= 0.5:
                g1[j], g2[j] = low, high
            else:
                g1[j], g2[j] = high, low
    lo = np.array([b[0] for b in cfg.bounds])
    hi = np.array([b[1] for b in cfg.bounds])
    return np.clip(g1, lo, hi), np.clip(g2, lo, hi)


def polynomial_mutation(genes, cfg: NsgaConfig, rng: np.random.Generator):
    """Bounded polynomial mutation; a gene on a bound can only move inward."""
    g = np.asarray(genes, dtype=float).copy()
    pm = cfg.effective_mutation_prob
    exp = 1.0 / (cfg.mutation_eta + 1.0)
    for j, (lo, hi) in enumerate(cfg.bounds):
        if rng.random() > pm:
            continue
        x = g[j]
        span = hi - lo
        u = rng.random()
        if u < 0.5:
            d1 = (x - lo) / span
            dq = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (cfg.mutation_eta + 1.0)) ** exp - 1.0
        else:
            d2 = (hi - x) / span
            dq = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (cfg.mutation_eta + 1.0)) ** exp
        g[j] = min(max(x + dq * span, lo), hi)
    return g


def hypervolume_2d(front, reference) -> float:
    """Exact 2-D hypervolume of a minimization front against a reference point."""
    ref = _as_objectives(reference)
    if ref.shape != (2,):
        raise ValueError("reference must be a 2-vector")
    pts = []
    for p in front:
        v = _as_objectives(p)
        if v.shape != (2,):
            raise LengthMismatch("front points must be 2-vectors")
        if not dominates(v, ref):
            raise PointBeyondReference(f"point {tuple(v)} does not dominate {tuple(ref)}")
        pts.append((float(v[0]), float(v[1])))
    if not pts:
        return 0.0
    pts.sort()
    hv = 0.0
    cur_y = float(ref[1])
    for x, y in pts:
        if y < cur_y:
            hv += (float(ref[0]) - x) * (cur_y - y)
            cur_y = y
    return hv


class ParetoArchive:
    """Cumulative set of mutually non-dominated evaluated points.

    Insertion rejects dominated or exactly duplicated objective vectors and
    evicts members the newcomer dominates, so the pairwise non-domination
    invariant holds after every add.
    """

    def __init__(self, capacity: Optional[int] = None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be >= 1 or None")
        self.capacity = capacity
        self._genes: list = []
        self._objs = None  # (n, M) float array

    def __len__(self) -> int:
        return len(self._genes)

    def add(self, genes, objectives) -> bool:
        obj = _as_objectives(objectives)
        gen = np.asarray(genes, dtype=float).copy()
        if self._objs is None:
            self._genes = [gen]
            self._objs = obj[None, :]
            return True
        if obj.shape != (self._objs.shape[1],):
            raise LengthMismatch("objective length differs from archive members")
        le = np.all(self._objs <= obj, axis=1)
        lt = np.any(self._objs < obj, axis=1)
        if np.any(le & lt) or np.any(le & ~lt):  # dominated or duplicated
            return False
        evict = np.all(obj <= self._objs, axis=1) & np.any(obj < self._objs, axis=1)
        if np.any(evict):
            keep = ~evict
            self._genes = [g for g, k in zip(self._genes, keep) if k]
            self._objs = self._objs[keep]
        self._genes.append(gen)
        self._objs = np.vstack([self._objs, obj])
        if self.capacity is not None and len(self._genes) > self.capacity:
            self._prune()
        return True

    def _prune(self):
        members = self.members
        while len(members) > self.capacity:
            crowding_distance(members)
            drop = min(range(len(members)), key=lambda i: members[i].crowding)
            del members[drop]
        self._genes = [m.genes for m in members]
        self._objs = np.vstack([m.objectives for m in members])

    @property
    def members(self) -> list:
        return [
            Individual(genes=g.copy(), objectives=o.copy())
            for g, o in zip(self._genes, [] if self._objs is None else self._objs)
        ]

    def objective_matrix(self) -> np.ndarray:
        if self._objs is None:
            return np.empty((0, 0))
        return self._objs.copy()


def _tournament(a: Individual, b: Individual) -> Individual:
    """Binary tournament on (rank, crowding); ties pick the first argument."""
    if a.rank < b.rank:
        return a
    if b.rank < a.rank:
        return b
    if a.crowding > b.crowding:
        return a
    if b.crowding > a.crowding:
        return b
    return a


def _environmental_select(combined, n_keep):
    fronts = fast_nondominated_sort(combined)
    survivors = []
    for front in fronts:
        crowding_distance(front)
        if len(survivors) + len(front) <= n_keep:
            survivors.extend(front)
        else:
            order = sorted(range(len(front)), key=lambda i: -front[i].crowding)
            survivors.extend(front[i] for i in order[: n_keep - len(survivors)])
            break
    return survivors


def nsga2_run(
    cfg: NsgaConfig,
    evaluator: Callable,
    progress_sink: Optional[Callable] = None,
    hv_reference=None,
):
    """Run the algorithm; returns (final population, archive, history).

    evaluator maps a gene array to an objective vector and must be pure.
    progress_sink, if given, receives (generation, best_f1, best_f2,
    archive_size, hypervolume) after every generation including the initial
    one.  The hypervolume reference defaults to the component-wise worst of
    the initial population and then stays fixed, which makes the history
    column monotone.  Total evaluations: population * (generations + 1).
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    lo = np.array([b[0] for b in cfg.bounds])
    hi = np.array([b[1] for b in cfg.bounds])

    archive = ParetoArchive()
    history: list = []
    evaluations = 0

    def evaluate_genes(genes, generation):
        nonlocal evaluations
        try:
            obj = _as_objectives(evaluator(genes))
        except Exception as exc:
            raise EvaluatorFailure(
                f"evaluator failed at generation {generation}: {exc}",
                generation=generation,
                history=history,
                archive=archive,
            ) from exc
        evaluations += 1
        archive.add(genes, obj)
        return Individual(genes=genes, objectives=obj)

    population = [
        evaluate_genes(lo + rng.random(cfg.n_genes) * (hi - lo), 0)
        for _ in range(cfg.population)
    ]
    for front in fast_nondominated_sort(population):
        crowding_distance(front)

    if hv_reference is None:
        hv_reference = np.max(
            np.vstack([ind.objectives for ind in population]), axis=0
        )
    hv_reference = np.asarray(hv_reference, dtype=float)

    def record(generation):
        objs = archive.objective_matrix()
        best = objs.min(axis=0)
        if objs.shape[1] == 2:
            inside = [o for o in objs if dominates(o, hv_reference)]
            hv = hypervolume_2d(inside, hv_reference)
        else:
            hv = float("nan")
        row = HistoryRow(
            generation=generation,
            evaluations=evaluations,
            best_f1=float(best[0]),
            best_f2=float(best[1]) if best.size > 1 else float(best[0]),
            archive_size=len(archive),
            hypervolume=hv,
        )
        history.append(row)
        if progress_sink is not None:
            progress_sink(generation, row.best_f1, row.best_f2, row.archive_size, row.hypervolume)

    record(0)

    for gen in range(1, cfg.generations + 1):
        offspring_genes = []
        for _ in range(cfg.population // 2):
            pa = _tournament(
                population[int(rng.integers(cfg.population))],
                population[int(rng.integers(cfg.population))],
            )
            pb = _tournament(
                population[int(rng.integers(cfg.population))],
                population[int(rng.integers(cfg.population))],
            )
            c1, c2 = sbx_crossover(pa.genes, pb.genes, cfg, rng)
            offspring_genes.append(polynomial_mutation(c1, cfg, rng))
            offspring_genes.append(polynomial_mutation(c2, cfg, rng))
        offspring = [evaluate_genes(g, gen) for g in offspring_genes]
        population = _environmental_select(population + offspring, cfg.population)
        record(gen)

    return population, archive, history
