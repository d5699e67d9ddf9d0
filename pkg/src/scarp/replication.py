"""Monte Carlo validation: sample demands, execute routes with depot-return
recourse, and compare the resulting statistics with the analytical criteria.

Each replication draws its own random substream from (seed, replication
index), so reports are reproducible regardless of evaluation order. Deviations
carry the finite-sample correction sqrt(n/(n-1)); gaps are relative
percentages (mean gaps against the empirical value, deviation gaps against
the analytical one).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _fast
from .encoding import Solution, solution_arrays
from .instance import Instance, TaskGraph
from .stochastic import DemandModel, Penalties, evaluate_solution


@dataclass(frozen=True)
class ReplicationConfig:
    n: int = 10_000
    seed: int = 0
    model: DemandModel = field(default_factory=DemandModel)
    capacity: float | None = None  # None -> instance capacity
    exact_threshold: int = 20

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("at least 2 replications are needed for the correction factor")


@dataclass
class ReplicationReport:
    # analytical side
    h_bar: float
    sigma_h: float
    m_bar: float
    sigma_m: float
    t_bar: float
    sigma_t: float
    # empirical side
    h_hat: float
    sigma_h_hat: float
    m_hat: float
    sigma_m_hat: float
    t_hat: float
    sigma_t_hat: float
    gaps: dict  # e_h, e_m, e_sh, e_sm; None marks a not-applicable deviation gap
    n: int
    seed: int
    method: str  # analytical makespan method used
    trip_overflow_freq: tuple  # per trip: fraction of replications with >= 1 return
    h2_violation_rates: tuple  # per trip: fraction with >= 2 returns


@dataclass
class QualityReport:
    references: dict  # h1, m1, h2, m2, h_mono (whatever was supplied)
    gaps: dict  # e1_h, e1_m, e2_h, e2_m, e1_mono for the available references


def sample_demands(
    inst: Instance,
    model: DemandModel,
    rng: np.random.Generator,
    max_resamples: int = 1_000_000,
) -> np.ndarray:
    """One realized demand per required edge, Gaussian truncated to (0, Q]."""
    q = np.array([e.demand for e in inst.required_edges], dtype=np.float64)
    if model.k <= 0.0:
        return q.copy()
    sd = model.k * q
    x = rng.normal(q, sd)
    bad = (x <= 0.0) | (x > inst.capacity)
    budget = max_resamples
    while bad.any() and budget > 0:
        budget -= int(bad.sum())
        x[bad] = rng.normal(q[bad], sd[bad])
        bad = (x <= 0.0) | (x > inst.capacity)
    if bad.any():
        warnings.warn(
            f"truncated sampling hit the resample cap; clamping {int(bad.sum())} draws"
        )
        x[bad] = np.clip(x[bad], np.finfo(float).tiny, inst.capacity)
    return x


def realized_to_arcs(realized: np.ndarray, graph: TaskGraph) -> np.ndarray:
    """Spread per-edge realized demands onto the service arcs (depot arc 0)."""
    arr = np.zeros(graph.n_arcs)
    arr[1:] = realized[graph.edge_index[1:]]
    return arr


def simulate_execution(
    sol: Solution, realized: np.ndarray, graph: TaskGraph, capacity: float | None = None
) -> tuple[float, float, int]:
    """Execute the planned trips under realized per-edge demands.

    Returns (total cost H, longest trip M, executed trip count T). A depot
    return is inserted whenever the next service would overflow; several
    returns per trip are possible.
    """
    H, M, returns = _simulate(sol, realized, graph, capacity)
    return H, M, sol.t + int(returns.sum())


def _simulate(sol, realized, graph, capacity=None):
    if capacity is None:
        capacity = graph.instance.capacity
    seq, bounds = solution_arrays(sol)
    per_arc = realized_to_arcs(np.asarray(realized, dtype=np.float64), graph)
    total, longest, returns = _fast.simulate_kernel(
        seq, bounds, per_arc, graph.dist, graph.cost, float(capacity)
    )
    return float(total), float(longest), returns


def _mean_gap(analytic: float, empirical: float) -> float:
    return (analytic - empirical) / empirical * 100.0


def _sigma_gap(analytic: float, empirical: float):
    if analytic > 0.0:
        return (analytic - empirical) / analytic * 100.0
    if empirical == 0.0:
        return 0.0
    return None  # not applicable: nothing analytical to compare against


def replicate(sol: Solution, graph: TaskGraph, cfg: ReplicationConfig) -> ReplicationReport:
    """n independent executions of `sol` plus the analytical comparison."""
    inst = graph.instance
    capacity = inst.capacity if cfg.capacity is None else cfg.capacity
    method = "exact" if sol.t <= cfg.exact_threshold else "truncated"
    ev = evaluate_solution(
        sol, graph, cfg.model, Penalties(), capacity=capacity,
        method=method, exact_threshold=cfg.exact_threshold,
    )

    seq, bounds = solution_arrays(sol)
    per_arc = np.zeros(graph.n_arcs)
    n = cfg.n
    t = sol.t
    h_vals = np.empty(n)
    m_vals = np.empty(n)
    t_vals = np.empty(n)
    ge1 = np.zeros(t)
    ge2 = np.zeros(t)
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(i,)))
        realized = sample_demands(inst, cfg.model, rng)
        per_arc[1:] = realized[graph.edge_index[1:]]
        total, longest, returns = _fast.simulate_kernel(
            seq, bounds, per_arc, graph.dist, graph.cost, float(capacity)
        )
        h_vals[i] = total
        m_vals[i] = longest
        t_vals[i] = t + returns.sum()
        ge1 += returns >= 1
        ge2 += returns >= 2

    h_hat = float(h_vals.mean())
    m_hat = float(m_vals.mean())
    t_hat = float(t_vals.mean())
    sigma_h_hat = float(h_vals.std(ddof=1))
    sigma_m_hat = float(m_vals.std(ddof=1))
    sigma_t_hat = float(t_vals.std(ddof=1))

    gaps = {
        "e_h": _mean_gap(ev.h_bar, h_hat),
        "e_m": _mean_gap(ev.m_bar, m_hat),
        "e_sh": _sigma_gap(ev.sigma_h, sigma_h_hat),
        "e_sm": _sigma_gap(ev.sigma_m, sigma_m_hat),
    }
    return ReplicationReport(
        h_bar=ev.h_bar,
        sigma_h=ev.sigma_h,
        m_bar=ev.m_bar,
        sigma_m=ev.sigma_m,
        t_bar=ev.t_bar,
        sigma_t=ev.sigma_t,
        h_hat=h_hat,
        sigma_h_hat=sigma_h_hat,
        m_hat=m_hat,
        sigma_m_hat=sigma_m_hat,
        t_hat=t_hat,
        sigma_t_hat=sigma_t_hat,
        gaps=gaps,
        n=n,
        seed=cfg.seed,
        method=method,
        trip_overflow_freq=tuple(float(x) / n for x in ge1),
        h2_violation_rates=tuple(float(x) / n for x in ge2),
    )


def quality_gaps(extremes: dict, references: dict) -> QualityReport:
    """Relative-percentage gaps of the front extremes against reference values.

    extremes: hbar1, mbar1 (leftmost), hbar2, mbar2 (rightmost).
    references: any of h1, m1, h2, m2, h_mono; missing ones are skipped.
    """
    pairs = {
        "e1_h": ("hbar1", "h1"),
        "e1_m": ("mbar1", "m1"),
        "e2_h": ("hbar2", "h2"),
        "e2_m": ("mbar2", "m2"),
        "e1_mono": ("hbar1", "h_mono"),
    }
    gaps = {}
    for name, (cand_key, ref_key) in pairs.items():
        cand = extremes.get(cand_key)
        ref = references.get(ref_key)
        if cand is None or ref is None:
            continue
        gaps[name] = (cand - ref) / ref * 100.0
    return QualityReport(references=dict(references), gaps=gaps)


def square_plot_data(front: list, source: str = "analytical") -> list:
    """Square records (center = mean pair, half-widths = deviations) for a
    front of Individuals, StochasticEvals, or ReplicationReports."""
    records = []
    for item in front:
        if isinstance(item, ReplicationReport):
            records.append(
                {
                    "h_bar": item.h_hat,
                    "m_bar": item.m_hat,
                    "sigma_h": item.sigma_h_hat,
                    "sigma_m": item.sigma_m_hat,
                    "source": "replicated",
                }
            )
            continue
        ev = item.eval if hasattr(item, "eval") else item
        records.append(
            {
                "h_bar": ev.h_bar,
                "m_bar": ev.m_bar,
                "sigma_h": ev.sigma_h,
                "sigma_m": ev.sigma_m,
                "source": source,
            }
        )
    return records
