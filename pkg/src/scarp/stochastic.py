"""Analytical evaluation of a planned solution under Gaussian demand laws.

Each trip j contributes an overflow probability p_j (total demand exceeding
capacity), a recourse detour cost s_j (depot return inserted before its last
task), and its planned cost C_j. From those, closed-form moments of the total
cost, the trip count, and the longest trip duration (exact by subset
enumeration or truncated at subset size 3 with bracketing bounds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _fast
from .encoding import Solution, Trip
from .instance import TaskGraph

_SQRT2 = math.sqrt(2.0)


class TooManyTripsError(ValueError):
    """Exact enumeration requested above the subset-enumeration threshold."""


@dataclass(frozen=True)
class DemandModel:
    """Demands are independent Gaussians with mean q and deviation k*q."""

    k: float = 0.1

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("coefficient of variation must be >= 0")


@dataclass(frozen=True)
class Penalties:
    rho: float = 10.0
    mu: float = 10.0

    def __post_init__(self):
        if self.rho < 0 or self.mu < 0:
            raise ValueError("penalties must be >= 0")


@dataclass(frozen=True)
class TripStochastics:
    p: float  # overflow probability
    s: float  # recourse detour cost
    c: float  # planned trip cost


@dataclass(frozen=True)
class StochasticEval:
    h_bar: float
    sigma_h: float
    m_bar: float
    sigma_m: float
    t_bar: float
    sigma_t: float
    f1: float
    f2: float
    m_bounds: tuple[float, float]  # (e, E) mean bracket
    m2_bounds: tuple[float, float]  # second-moment bracket
    method: str  # "exact" | "truncated"


def normal_cdf(z: float) -> float:
    """Standard normal CDF via erfc (stable in both tails)."""
    return 0.5 * math.erfc(-z / _SQRT2)


def overflow_probability(trip: Trip, model: DemandModel, capacity: float) -> float:
    """P{realized trip demand > capacity} under the Gaussian law."""
    total = trip.load
    if model.k <= 0.0:
        return 0.0 if total <= capacity else 1.0
    sumsq = 0.0
    for q in trip.demands:
        sumsq += q * q
    z = (capacity - total) / (model.k * math.sqrt(sumsq))
    # upper-tail erfc form: stable for small probabilities and identical,
    # bit for bit, to the fused evaluation kernel
    return 0.5 * math.erfc(z / _SQRT2)


def recourse_cost(trip: Trip, graph: TaskGraph) -> float:
    """Net detour of a depot return inserted just before the last task.

    From the second-to-last task a (depot arc for single-task trips) the
    vehicle goes to the depot and back to the last task b instead of the
    planned a -> b leg.
    """
    b = trip.tasks[-1]
    a = trip.tasks[-2] if len(trip.tasks) >= 2 else graph.depot_arc
    d = graph.dist
    return float(d[a, 0] + d[0, b] - d[a, b])


def trip_stochastics(
    sol: Solution, graph: TaskGraph, model: DemandModel, capacity: float | None = None
) -> list[TripStochastics]:
    if capacity is None:
        capacity = graph.instance.capacity
    return [
        TripStochastics(
            p=overflow_probability(trip, model, capacity),
            s=recourse_cost(trip, graph),
            c=trip.cost,
        )
        for trip in sol.trips
    ]


def cost_moments(trips: list[TripStochastics]) -> tuple[float, float]:
    """Mean and deviation of the total cost with one recourse per overflow.

    Accumulates per trip in sequence order so the result is bit-identical
    to the fused evaluation kernel.
    """
    h_bar = 0.0
    var = 0.0
    for ts in trips:
        h_bar += ts.c + ts.s * ts.p
        var += ts.s * ts.s * (ts.p - ts.p * ts.p)
    return h_bar, math.sqrt(max(var, 0.0))


def trip_count_moments(trips: list[TripStochastics], t: int) -> tuple[float, float]:
    t_bar = float(t)
    var = 0.0
    for ts in trips:
        t_bar += ts.p
        var += ts.p - ts.p * ts.p
    return t_bar, math.sqrt(max(var, 0.0))


def extra_trip_distribution(trips: list[TripStochastics]) -> np.ndarray:
    """Poisson-binomial pmf of the number of overflowing trips (length t+1)."""
    dp = np.zeros(len(trips) + 1)
    dp[0] = 1.0
    for ts in trips:
        dp[1:] = dp[1:] * (1.0 - ts.p) + dp[:-1] * ts.p
        dp[0] *= 1.0 - ts.p
    return dp


def _trip_arrays(trips: list[TripStochastics]):
    c = np.array([ts.c for ts in trips], dtype=np.float64)
    s = np.array([ts.s for ts in trips], dtype=np.float64)
    p = np.array([ts.p for ts in trips], dtype=np.float64)
    return c, s, p


def makespan_moments_exact(
    trips: list[TripStochastics], threshold: int = 20
) -> tuple[float, float]:
    """Exact longest-trip moments over all 2^t overflow subsets."""
    if len(trips) > threshold:
        raise TooManyTripsError(
            f"{len(trips)} trips exceed the exact-enumeration threshold {threshold};"
            " use the truncated evaluator"
        )
    mean, sigma, _ = _fast.makespan_exact(*_trip_arrays(trips))
    return float(mean), float(sigma)


def makespan_moments_truncated(
    trips: list[TripStochastics],
) -> tuple[float, float, float, float, float, float]:
    """Midpoint estimates plus brackets (m_bar, sigma_m, e, E, c_lo, c_hi)."""
    m_bar, sigma_m, m_lo, m_hi, m2_lo, m2_hi = _fast.makespan_truncated(*_trip_arrays(trips))
    return float(m_bar), float(sigma_m), float(m_lo), float(m_hi), float(m2_lo), float(m2_hi)


def fitness(ev: StochasticEval, pen: Penalties) -> tuple[float, float]:
    """Penalized robustness objectives (cost criterion, makespan criterion)."""
    return ev.h_bar + pen.rho * ev.sigma_h, ev.m_bar + pen.mu * ev.sigma_m


def evaluate_solution(
    sol: Solution,
    graph: TaskGraph,
    model: DemandModel,
    pen: Penalties,
    capacity: float | None = None,
    method: str = "truncated",
    exact_threshold: int = 20,
) -> StochasticEval:
    """Full analytical evaluation of one solution.

    method "exact" enumerates overflow subsets (trip count permitting);
    "truncated" uses the size-3 subset bounds and their midpoints; "auto"
    picks exact whenever the trip count allows it.
    """
    trips = trip_stochastics(sol, graph, model, capacity)
    h_bar, sigma_h = cost_moments(trips)
    t_bar, sigma_t = trip_count_moments(trips, sol.t)
    if method == "auto":
        method = "exact" if sol.t <= exact_threshold else "truncated"
    if method == "exact":
        m_bar, sigma_m = makespan_moments_exact(trips, exact_threshold)
        _, _, second = _fast.makespan_exact(*_trip_arrays(trips))
        bounds = (m_bar, m_bar)
        bounds2 = (float(second), float(second))
    elif method == "truncated":
        m_bar, sigma_m, m_lo, m_hi, m2_lo, m2_hi = makespan_moments_truncated(trips)
        bounds = (m_lo, m_hi)
        bounds2 = (m2_lo, m2_hi)
    else:
        raise ValueError(f"unknown evaluation method {method!r}")
    ev = StochasticEval(
        h_bar=h_bar,
        sigma_h=sigma_h,
        m_bar=m_bar,
        sigma_m=sigma_m,
        t_bar=t_bar,
        sigma_t=sigma_t,
        f1=0.0,
        f2=0.0,
        m_bounds=bounds,
        m2_bounds=bounds2,
        method=method,
    )
    f1, f2 = fitness(ev, pen)
    return replace(ev, f1=f1, f2=f2)
