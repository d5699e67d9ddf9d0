"""Giant-sequence chromosomes and the optimal Split into capacity-feasible trips.

A chromosome is a numpy int32 array of arc ids, one orientation per required
edge. Split finds the cheapest partition into contiguous trips by a forward
label pass over the implicit auxiliary graph; ties go to fewer trips, then to
the earliest predecessor, which makes the decomposition deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fast
from .instance import TaskGraph

Chromosome = np.ndarray  # int32 arc ids, length = number of required edges


class SplitError(ValueError):
    """Chromosome invalid or a single task cannot fit the split capacity."""


@dataclass(frozen=True)
class Trip:
    tasks: tuple[int, ...]  # arc ids, service order
    demands: tuple[float, ...]  # mean demand per serviced task
    load: float  # sum of mean demands
    cost: float  # depot deadhead + services + inter-task deadheads + return


@dataclass(frozen=True)
class Solution:
    trips: tuple[Trip, ...]
    h: float  # deterministic total cost
    m: float  # deterministic makespan (longest trip)

    @property
    def t(self) -> int:
        return len(self.trips)


def validate_chromosome(chrom: Chromosome, graph: TaskGraph) -> None:
    n = graph.n_tasks
    if len(chrom) != n:
        raise SplitError(f"chromosome length {len(chrom)} != {n} required edges")
    arr = np.asarray(chrom)
    if np.any(arr < 0) or np.any(arr >= len(graph.edge_index)):
        raise SplitError("chromosome contains an invalid task id")
    edges = graph.edge_index[arr]
    if np.any(edges < 0):
        raise SplitError("chromosome contains the depot arc or an invalid task id")
    if len(set(edges.tolist())) != n:
        raise SplitError("chromosome does not cover each required edge exactly once")


def trip_cost(tasks, graph: TaskGraph) -> float:
    """Planned cost of servicing `tasks` in order from the depot and back."""
    d = graph.dist
    a = tasks[0]
    c = d[0, a] + graph.cost[a]
    for b in tasks[1:]:
        c += d[a, b] + graph.cost[b]
        a = b
    return c + d[a, 0]


def solution_from_boundaries(chrom: Chromosome, bounds, graph: TaskGraph) -> Solution:
    """Assemble a Solution from explicit trip boundaries (b_0=0 < ... < b_t=n)."""
    trips = []
    h = 0.0
    m = 0.0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        tasks = tuple(int(a) for a in chrom[lo:hi])
        demands = tuple(float(graph.demand[a]) for a in tasks)
        cost = trip_cost(tasks, graph)
        trips.append(Trip(tasks=tasks, demands=demands, load=sum(demands), cost=cost))
        h += cost
        if cost > m:
            m = cost
    return Solution(trips=tuple(trips), h=h, m=m)


def split(chrom: Chromosome, graph: TaskGraph, capacity: float | None = None) -> Solution:
    """Minimum-cost decomposition of the sequence into trips of load <= capacity."""
    if capacity is None:
        capacity = graph.instance.capacity
    chrom = np.ascontiguousarray(chrom, dtype=np.int32)
    validate_chromosome(chrom, graph)
    if np.any(graph.demand[chrom] > capacity):
        raise SplitError(f"a single task demand exceeds the split capacity {capacity}")
    total, ntrips, pred = _fast.split_kernel(
        chrom, graph.dist, graph.cost, graph.demand, float(capacity)
    )
    bounds = _fast.decode_boundaries(pred, len(chrom), ntrips)
    return solution_from_boundaries(chrom, bounds, graph)


def evaluate_deterministic(sol: Solution) -> tuple[float, float]:
    """(total cost h, makespan m) of a planned solution."""
    h = 0.0
    m = 0.0
    for trip in sol.trips:
        h += trip.cost
        if trip.cost > m:
            m = trip.cost
    return h, m


def tasks_to_chromosome(sol: Solution) -> Chromosome:
    """Concatenate the trips back into a giant sequence (inverse of split)."""
    return np.array([a for trip in sol.trips for a in trip.tasks], dtype=np.int32)


def solution_arrays(sol: Solution) -> tuple[np.ndarray, np.ndarray]:
    """(sequence, trip boundaries) arrays for the kernels."""
    seq = tasks_to_chromosome(sol)
    bounds = np.zeros(len(sol.trips) + 1, dtype=np.int64)
    pos = 0
    for i, trip in enumerate(sol.trips, start=1):
        pos += len(trip.tasks)
        bounds[i] = pos
    return seq, bounds


def random_chromosome(graph: TaskGraph, rng: np.random.Generator) -> Chromosome:
    """Uniform random edge order with uniform random orientations."""
    n = graph.n_tasks
    edges = rng.permutation(n)
    flips = rng.integers(0, 2, size=n)
    return (2 * edges + 1 + flips).astype(np.int32)
