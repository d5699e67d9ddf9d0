"""NSGA-II over giant-sequence chromosomes, with periodic directed local search.

Both objectives are minimized: f1 penalizes the expected total cost by its
deviation, f2 does the same for the longest trip. Fronts and crowding follow
the classic scheme except that crowding is the raw half-perimeter of the
neighbor rectangle (no range normalization). Every `ls_period` iterations each
front-1 member undergoes a weighted first-improvement descent whose direction
depends on its position along the front.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fast
from .encoding import Chromosome, Solution, random_chromosome, solution_from_boundaries
from .instance import Instance, TaskGraph, build_task_graph
from .stochastic import DemandModel, Penalties, StochasticEval


@dataclass
class GAParams:
    ns: int = 60  # population size, even
    iterations: int = 1000
    ls_period: int = 10  # local search every this many iterations
    mutation_rate: float = 0.1
    seed: int = 0
    exact_threshold: int = 20
    greedy_seed: bool = False  # include one nearest-task greedy individual

    def __post_init__(self):
        if self.ns <= 0 or self.ns % 2 != 0:
            raise ValueError("population size must be positive and even")
        if self.ls_period < 1:
            raise ValueError("ls_period must be >= 1")
        if not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must be in [0, 1]")


@dataclass(frozen=True)
class ObjectiveBounds:
    f1_min: float
    f1_max: float
    f2_min: float
    f2_max: float

    @classmethod
    def of_front(cls, front: "list[Individual]") -> "ObjectiveBounds":
        f1 = [ind.f1 for ind in front]
        f2 = [ind.f2 for ind in front]
        return cls(min(f1), max(f1), min(f2), max(f2))


@dataclass(eq=False)
class Individual:
    chrom: Chromosome
    sol: Solution
    eval: StochasticEval
    front: int = 0
    crowding: float = 0.0

    @property
    def f1(self) -> float:
        return self.eval.f1

    @property
    def f2(self) -> float:
        return self.eval.f2


@dataclass
class RunResult:
    population: list
    front: list  # front 1, sorted by (f1, f2)
    leftmost: "Individual"
    rightmost: "Individual"
    graph: TaskGraph


class Evaluator:
    """Binds a task graph and the model parameters to the JIT kernels."""

    def __init__(
        self,
        graph: TaskGraph,
        model: DemandModel,
        pen: Penalties,
        split_capacity: float | None = None,
    ):
        self.graph = graph
        self.model = model
        self.pen = pen
        self.split_capacity = float(
            graph.instance.capacity if split_capacity is None else split_capacity
        )
        self.eval_capacity = float(graph.instance.capacity)
        if np.any(graph.demand > self.split_capacity):
            raise ValueError("a task demand exceeds the split capacity")

    def individual(self, chrom: Chromosome) -> Individual:
        g = self.graph
        bounds, stats = _fast.eval_sequence(
            chrom,
            g.dist,
            g.cost,
            g.demand,
            self.split_capacity,
            self.eval_capacity,
            self.model.k,
            self.pen.rho,
            self.pen.mu,
        )
        sol = solution_from_boundaries(chrom, bounds, g)
        ev = StochasticEval(
            h_bar=stats[_fast.H_BAR],
            sigma_h=stats[_fast.SIGMA_H],
            m_bar=stats[_fast.M_BAR],
            sigma_m=stats[_fast.SIGMA_M],
            t_bar=stats[_fast.T_BAR],
            sigma_t=stats[_fast.SIGMA_T],
            f1=stats[_fast.F1],
            f2=stats[_fast.F2],
            m_bounds=(stats[_fast.M_LO], stats[_fast.M_HI]),
            m2_bounds=(stats[_fast.M2_LO], stats[_fast.M2_HI]),
            method="truncated",
        )
        return Individual(chrom=chrom, sol=sol, eval=ev)


def non_dominated_sort(pop: list) -> list:
    """Partition into fronts (minimizing f1, f2); sets .front ranks from 1."""
    n = len(pop)
    f1 = np.array([ind.f1 for ind in pop])
    f2 = np.array([ind.f2 for ind in pop])
    dom = (
        (f1[:, None] <= f1[None, :])
        & (f2[:, None] <= f2[None, :])
        & ((f1[:, None] < f1[None, :]) | (f2[:, None] < f2[None, :]))
    )
    dominated_by = dom.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    fronts = []
    rank = 1
    while remaining.any():
        current = np.flatnonzero(remaining & (dominated_by == 0))
        for i in current:
            pop[i].front = rank
        fronts.append([pop[i] for i in current])
        remaining[current] = False
        dominated_by = dominated_by - dom[current].sum(axis=0)
        rank += 1
    return fronts


def crowding_distance(front: list) -> np.ndarray:
    """Raw half-perimeter crowding; extremes +inf. Sets .crowding, returns
    the distances aligned with the input order."""
    n = len(front)
    dist = np.full(n, np.inf)
    if n > 2:
        order = sorted(range(n), key=lambda i: (front[i].f1, front[i].f2))
        for pos in range(1, n - 1):
            i = order[pos]
            lo = front[order[pos - 1]]
            hi = front[order[pos + 1]]
            dist[i] = (hi.f1 - lo.f1) + (lo.f2 - hi.f2)
    for i, ind in enumerate(front):
        ind.crowding = float(dist[i])
    return dist


def crowded_tournament(a: Individual, b: Individual, rng: np.random.Generator) -> Individual:
    if a.front != b.front:
        return a if a.front < b.front else b
    if a.crowding != b.crowding:
        return a if a.crowding > b.crowding else b
    return a if rng.random() < 0.5 else b


def _edge_of(arc: int) -> int:
    return (arc - 1) // 2


def _ox_child(pa: Chromosome, pb: Chromosome, i: int, j: int) -> Chromosome:
    n = len(pa)
    child = np.empty(n, dtype=np.int32)
    child[i : j + 1] = pa[i : j + 1]
    placed = {_edge_of(int(a)) for a in pa[i : j + 1]}
    pos = (j + 1) % n
    for step in range(n):
        a = int(pb[(j + 1 + step) % n])
        if _edge_of(a) in placed:
            continue
        child[pos] = a
        placed.add(_edge_of(a))
        pos = (pos + 1) % n
    return child


def ox_crossover(
    p1: Chromosome, p2: Chromosome, rng: np.random.Generator
) -> tuple[Chromosome, Chromosome]:
    """Order crossover on the giant sequence. An edge counts as placed when
    either of its orientations is in the copied segment; fill tasks keep the
    orientation they have in the other parent."""
    n = len(p1)
    i, j = sorted(int(x) for x in rng.integers(0, n, size=2))
    return _ox_child(p1, p2, i, j), _ox_child(p2, p1, i, j)


def mutate(
    chrom: Chromosome,
    rate: float,
    rng: np.random.Generator,
    inverse: np.ndarray,
    force: bool = False,
) -> Chromosome:
    """With probability `rate` apply one move among swap / reverse / flip."""
    if not force and rng.random() >= rate:
        return chrom
    n = len(chrom)
    c = chrom.copy()
    move = int(rng.integers(0, 3)) if n > 1 else 2
    if move == 0:
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        while j == i:
            j = int(rng.integers(0, n))
        c[i], c[j] = c[j], c[i]
    elif move == 1:
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        while j == i:
            j = int(rng.integers(0, n))
        i, j = min(i, j), max(i, j)
        c[i : j + 1] = c[i : j + 1][::-1]
    else:
        i = int(rng.integers(0, n))
        c[i] = inverse[c[i]]
    return c


def direction_weight(ind: Individual, bounds: ObjectiveBounds) -> float:
    """Weight of the cost criterion in the descent direction: the individual's
    normalized position on each criterion over the current front bounds,
    renormalized to sum to one; 0.5 when both positions are zero."""
    den1 = bounds.f1_max - bounds.f1_min
    den2 = bounds.f2_max - bounds.f2_min
    n1 = (ind.f1 - bounds.f1_min) / den1 if den1 > 0 else 0.0
    n2 = (ind.f2 - bounds.f2_min) / den2 if den2 > 0 else 0.0
    total = n1 + n2
    return 0.5 if total == 0 else n1 / total


def directed_local_search(
    ind: Individual,
    bounds: ObjectiveBounds,
    evaluator: Evaluator,
    budget: int | None = None,
) -> Individual:
    """First-improvement descent of pi1*df1 + (1-pi1)*df2 with pi1 held fixed."""
    g = evaluator.graph
    pi1 = direction_weight(ind, bounds)
    if budget is None:
        budget = 10 * len(ind.chrom)
    seq = _fast.ls_descent(
        ind.chrom,
        g.dist,
        g.cost,
        g.demand,
        g.inverse,
        evaluator.split_capacity,
        evaluator.eval_capacity,
        evaluator.model.k,
        evaluator.pen.rho,
        evaluator.pen.mu,
        pi1,
        budget,
    )
    return evaluator.individual(seq)


def greedy_chromosome(graph: TaskGraph) -> Chromosome:
    """Nearest-task scan from the depot (deterministic tie-break by arc id)."""
    n = graph.n_tasks
    remaining = set(range(n))
    seq = np.empty(n, dtype=np.int32)
    cur = 0
    for pos in range(n):
        best_arc = -1
        best_d = np.inf
        for e in remaining:
            for a in (2 * e + 1, 2 * e + 2):
                d = graph.dist[cur, a]
                if d < best_d or (d == best_d and (best_arc < 0 or a < best_arc)):
                    best_arc, best_d = a, d
        seq[pos] = best_arc
        remaining.remove(_edge_of(best_arc))
        cur = best_arc
    return seq


def _truncate(pop: list, ns: int) -> list:
    fronts = non_dominated_sort(pop)
    out: list = []
    for front in fronts:
        dist = crowding_distance(front)
        if len(out) + len(front) <= ns:
            out.extend(front)
            if len(out) == ns:
                break
        else:
            take = ns - len(out)
            order = sorted(range(len(front)), key=lambda i: -dist[i])
            out.extend(front[i] for i in order[:take])
            break
    return out


def nsga2_run(
    source: Instance | TaskGraph,
    model: DemandModel,
    pen: Penalties,
    params: GAParams,
    split_capacity: float | None = None,
    callback=None,
) -> RunResult:
    """Full optimization run; deterministic given params.seed."""
    graph = source if isinstance(source, TaskGraph) else build_task_graph(source)
    evaluator = Evaluator(graph, model, pen, split_capacity)
    rng = np.random.default_rng(params.seed)
    ns = params.ns
    inverse = graph.inverse

    pop: list[Individual] = []
    seen: set[bytes] = set()
    if params.greedy_seed:
        c = greedy_chromosome(graph)
        seen.add(c.tobytes())
        pop.append(evaluator.individual(c))
    while len(pop) < ns:
        c = random_chromosome(graph, rng)
        for _ in range(20):  # distinct where possible
            if c.tobytes() not in seen:
                break
            c = random_chromosome(graph, rng)
        seen.add(c.tobytes())
        pop.append(evaluator.individual(c))

    for it in range(1, params.iterations + 1):
        fronts = non_dominated_sort(pop)
        for front in fronts:
            crowding_distance(front)

        seen = {ind.chrom.tobytes() for ind in pop}
        offspring: list[Individual] = []
        for _ in range(ns // 2):
            pa = crowded_tournament(
                pop[int(rng.integers(0, ns))], pop[int(rng.integers(0, ns))], rng
            )
            pb = crowded_tournament(
                pop[int(rng.integers(0, ns))], pop[int(rng.integers(0, ns))], rng
            )
            for child in ox_crossover(pa.chrom, pb.chrom, rng):
                child = mutate(child, params.mutation_rate, rng, inverse)
                if child.tobytes() in seen:  # clone control
                    child = mutate(child, 1.0, rng, inverse, force=True)
                seen.add(child.tobytes())
                offspring.append(evaluator.individual(child))

        pop = _truncate(pop + offspring, ns)

        if it % params.ls_period == 0:
            front1 = [ind for ind in pop if ind.front == 1]
            bounds = ObjectiveBounds.of_front(front1)
            for ind in front1:
                improved = directed_local_search(ind, bounds, evaluator)
                pop[pop.index(ind)] = improved

        if callback is not None:
            callback(it, pop)

    fronts = non_dominated_sort(pop)
    for front in fronts:
        crowding_distance(front)
    front1 = sorted(fronts[0], key=lambda ind: (ind.f1, ind.f2))
    leftmost = front1[0]
    rightmost = min(front1, key=lambda ind: (ind.f2, ind.f1))
    return RunResult(
        population=pop, front=front1, leftmost=leftmost, rightmost=rightmost, graph=graph
    )
