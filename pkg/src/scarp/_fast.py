"""JIT-compiled kernels for the hot paths.

Everything here works on flat arrays extracted from a TaskGraph: arc id 0 is
the depot arc, dist[a, b] prices the deadhead from head(a) to tail(b).
The plain-Python operations in the public modules are the readable reference;
a cross-check test keeps both routes identical.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# indices into the stats vector returned by eval_sequence
H, M, NTRIPS, H_BAR, SIGMA_H, M_BAR, SIGMA_M, T_BAR, SIGMA_T, F1, F2, M_LO, M_HI, M2_LO, M2_HI = range(15)

_SQRT2 = math.sqrt(2.0)


@njit(cache=True)
def split_kernel(seq, dist, cost, demand, capacity):
    """Optimal contiguous partition of the task sequence into trips.

    Forward label pass; ties broken toward fewer trips, then toward the
    earliest predecessor. Costs within 1e-9 of each other count as tied, so
    the policy is immune to the argmin flipping on the last unit of float
    rounding (two mathematically equal partitions can accumulate to values
    one ulp apart). Returns (total cost, trip count, predecessor array).
    """
    n = seq.shape[0]
    best_cost = np.full(n + 1, np.inf)
    best_trips = np.full(n + 1, 1 << 60, dtype=np.int64)
    pred = np.zeros(n + 1, dtype=np.int64)
    best_cost[0] = 0.0
    best_trips[0] = 0
    for i in range(n):
        if not np.isfinite(best_cost[i]):
            continue
        load = 0.0
        trip_cost = 0.0
        prev = 0
        for j in range(i + 1, n + 1):
            a = seq[j - 1]
            load += demand[a]
            if load > capacity:
                break
            if j == i + 1:
                trip_cost = dist[0, a] + cost[a]
            else:
                trip_cost += dist[prev, a] + cost[a]
            prev = a
            total = best_cost[i] + trip_cost + dist[a, 0]
            trips = best_trips[i] + 1
            if total < best_cost[j] - 1e-9 or (total < best_cost[j] + 1e-9 and trips < best_trips[j]):
                best_cost[j] = total
                best_trips[j] = trips
                pred[j] = i
    return best_cost[n], best_trips[n], pred


@njit(cache=True)
def decode_boundaries(pred, n, ntrips):
    """Trip boundaries [b_0=0, ..., b_t=n] from the predecessor array."""
    bnds = np.empty(ntrips + 1, dtype=np.int64)
    bnds[ntrips] = n
    j = n
    for r in range(ntrips - 1, -1, -1):
        j = pred[j]
        bnds[r] = j
    return bnds


@njit(cache=True)
def trip_stats(seq, bnds, dist, cost, demand, capacity, k):
    """Per-trip planned cost C, recourse detour S, overflow probability P."""
    t = bnds.shape[0] - 1
    trip_c = np.empty(t)
    trip_s = np.empty(t)
    trip_p = np.empty(t)
    for r in range(t):
        lo, hi = bnds[r], bnds[r + 1]
        a = seq[lo]
        c = dist[0, a] + cost[a]
        load = demand[a]
        sq = demand[a] * demand[a]
        for idx in range(lo + 1, hi):
            b = seq[idx]
            c += dist[a, b] + cost[b]
            load += demand[b]
            sq += demand[b] * demand[b]
            a = b
        trip_c[r] = c + dist[a, 0]
        last = seq[hi - 1]
        penult = seq[hi - 2] if hi - lo >= 2 else 0
        trip_s[r] = dist[penult, 0] + dist[0, last] - dist[penult, last]
        if k <= 0.0:
            trip_p[r] = 0.0 if load <= capacity else 1.0
        else:
            z = (capacity - load) / (k * math.sqrt(sq))
            trip_p[r] = 0.5 * math.erfc(z / _SQRT2)
    return trip_c, trip_s, trip_p


@njit(cache=True)
def makespan_truncated(trip_c, trip_s, trip_p):
    """Bounds on the longest-trip moments from overflow subsets of size <= 3.

    Trips with p exactly 0 or 1 are folded into the deterministic base value;
    the residual subset mass is bounded below by the base and above by the
    largest overflowed value. Returns (m_bar, sigma_m, e, E, c_lo, c_hi).
    """
    t = trip_c.shape[0]
    base = trip_c[0]
    for j in range(t):
        if trip_c[j] > base:
            base = trip_c[j]
        if trip_p[j] >= 1.0 and trip_c[j] + trip_s[j] > base:
            base = trip_c[j] + trip_s[j]

    # trips that actually randomize the maximum
    nf = 0
    for j in range(t):
        if 0.0 < trip_p[j] < 1.0:
            nf += 1
    y = np.empty(nf)
    g = np.empty(nf)  # p/(1-p) odds
    pi0 = 1.0
    i = 0
    for j in range(t):
        if 0.0 < trip_p[j] < 1.0:
            y[i] = trip_c[j] + trip_s[j]
            g[i] = trip_p[j] / (1.0 - trip_p[j])
            pi0 *= 1.0 - trip_p[j]
            i += 1

    top = base
    for i in range(nf):
        if y[i] > top:
            top = y[i]

    mass = pi0
    mean_cov = base * pi0
    sq_cov = base * base * pi0
    for u in range(nf):
        vu = base if base > y[u] else y[u]
        pu = pi0 * g[u]
        mass += pu
        mean_cov += vu * pu
        sq_cov += vu * vu * pu
        for v in range(u + 1, nf):
            vv = vu if vu > y[v] else y[v]
            puv = pu * g[v]
            mass += puv
            mean_cov += vv * puv
            sq_cov += vv * vv * puv
            for w in range(v + 1, nf):
                vw = vv if vv > y[w] else y[w]
                puvw = puv * g[w]
                mass += puvw
                mean_cov += vw * puvw
                sq_cov += vw * vw * puvw

    resid = 1.0 - mass
    if resid < 0.0:
        resid = 0.0
    m_lo = mean_cov + resid * base
    m_hi = mean_cov + resid * top
    m2_lo = sq_cov + resid * base * base
    m2_hi = sq_cov + resid * top * top
    m_bar = 0.5 * (m_lo + m_hi)
    lo_var = m2_lo - m_hi * m_hi
    hi_var = m2_hi - m_lo * m_lo
    sigma_m = 0.5 * (math.sqrt(max(lo_var, 0.0)) + math.sqrt(max(hi_var, 0.0)))
    return m_bar, sigma_m, m_lo, m_hi, m2_lo, m2_hi


@njit(cache=True)
def makespan_exact(trip_c, trip_s, trip_p):
    """Exact longest-trip moments by enumerating all overflow subsets."""
    t = trip_c.shape[0]
    base = trip_c[0]
    for j in range(t):
        if trip_c[j] > base:
            base = trip_c[j]
        if trip_p[j] >= 1.0 and trip_c[j] + trip_s[j] > base:
            base = trip_c[j] + trip_s[j]
    nf = 0
    for j in range(t):
        if 0.0 < trip_p[j] < 1.0:
            nf += 1
    y = np.empty(nf)
    g = np.empty(nf)
    pi0 = 1.0
    i = 0
    for j in range(t):
        if 0.0 < trip_p[j] < 1.0:
            y[i] = trip_c[j] + trip_s[j]
            g[i] = trip_p[j] / (1.0 - trip_p[j])
            pi0 *= 1.0 - trip_p[j]
            i += 1

    size = 1 << nf
    val = np.empty(size)
    pr = np.empty(size)
    val[0] = base
    pr[0] = pi0
    mean = base * pi0
    second = base * base * pi0
    for s in range(1, size):
        ss = s
        lb = 0
        while ss & 1 == 0:
            ss >>= 1
            lb += 1
        prev = s & (s - 1)
        v = val[prev]
        if y[lb] > v:
            v = y[lb]
        p = pr[prev] * g[lb]
        val[s] = v
        pr[s] = p
        mean += v * p
        second += v * v * p
    var = second - mean * mean
    if var < 0.0:
        var = 0.0
    return mean, math.sqrt(var), second


@njit(cache=True)
def eval_sequence(seq, dist, cost, demand, split_capacity, eval_capacity, k, rho, mu):
    """Split + full stochastic evaluation (truncated makespan). Returns
    (trip boundaries, 15-slot stats vector)."""
    n = seq.shape[0]
    total, ntrips, pred = split_kernel(seq, dist, cost, demand, split_capacity)
    bnds = decode_boundaries(pred, n, ntrips)
    trip_c, trip_s, trip_p = trip_stats(seq, bnds, dist, cost, demand, eval_capacity, k)

    out = np.empty(15)
    h = 0.0
    m = 0.0
    h_bar = 0.0  # same accumulation order as _objectives so both paths agree exactly
    var_h = 0.0
    t_bar = float(ntrips)
    var_t = 0.0
    for j in range(ntrips):
        h += trip_c[j]
        if trip_c[j] > m:
            m = trip_c[j]
        h_bar += trip_c[j] + trip_s[j] * trip_p[j]
        var_h += trip_s[j] * trip_s[j] * (trip_p[j] - trip_p[j] * trip_p[j])
        t_bar += trip_p[j]
        var_t += trip_p[j] - trip_p[j] * trip_p[j]
    sigma_h = math.sqrt(max(var_h, 0.0))
    sigma_t = math.sqrt(max(var_t, 0.0))
    m_bar, sigma_m, m_lo, m_hi, m2_lo, m2_hi = makespan_truncated(trip_c, trip_s, trip_p)

    out[H] = h
    out[M] = m
    out[NTRIPS] = float(ntrips)
    out[H_BAR] = h_bar
    out[SIGMA_H] = sigma_h
    out[M_BAR] = m_bar
    out[SIGMA_M] = sigma_m
    out[T_BAR] = t_bar
    out[SIGMA_T] = sigma_t
    out[F1] = h_bar + rho * sigma_h
    out[F2] = m_bar + mu * sigma_m
    out[M_LO] = m_lo
    out[M_HI] = m_hi
    out[M2_LO] = m2_lo
    out[M2_HI] = m2_hi
    return bnds, out


@njit(cache=True)
def _objectives(seq, dist, cost, demand, split_capacity, eval_capacity, k, rho, mu):
    total, ntrips, pred = split_kernel(seq, dist, cost, demand, split_capacity)
    bnds = decode_boundaries(pred, seq.shape[0], ntrips)
    trip_c, trip_s, trip_p = trip_stats(seq, bnds, dist, cost, demand, eval_capacity, k)
    h_bar = 0.0
    var_h = 0.0
    for j in range(ntrips):
        h_bar += trip_c[j] + trip_s[j] * trip_p[j]
        var_h += trip_s[j] * trip_s[j] * (trip_p[j] - trip_p[j] * trip_p[j])
    f1 = h_bar + rho * math.sqrt(max(var_h, 0.0))
    m_bar, sigma_m, _, _, _, _ = makespan_truncated(trip_c, trip_s, trip_p)
    f2 = m_bar + mu * sigma_m
    return f1, f2


@njit(cache=True)
def ls_descent(seq0, dist, cost, demand, inverse, split_capacity, eval_capacity, k, rho, mu, pi1, max_accepts):
    """First-improvement weighted descent over relocate / swap / 2-opt / flip.

    pi1 is fixed for the whole descent. A move is accepted iff
    pi1*df1 + (1-pi1)*df2 < 0. Returns the improved sequence.
    """
    n = seq0.shape[0]
    cur = seq0.copy()
    f1, f2 = _objectives(cur, dist, cost, demand, split_capacity, eval_capacity, k, rho, mu)
    cand = np.empty(n, dtype=seq0.dtype)
    rest = np.empty(n - 1, dtype=seq0.dtype) if n > 1 else np.empty(0, dtype=seq0.dtype)
    accepts = 0
    improved = True
    while improved and accepts < max_accepts:
        improved = False

        # relocate task i to slot j, keeping or flipping its orientation
        for i in range(n):
            if improved:
                break
            pos = 0
            for idx in range(n):
                if idx != i:
                    rest[pos] = cur[idx]
                    pos += 1
            for j in range(n):
                if improved:
                    break
                if j == i:
                    continue
                for o in range(2):
                    a = cur[i] if o == 0 else inverse[cur[i]]
                    for idx in range(j):
                        cand[idx] = rest[idx]
                    cand[j] = a
                    for idx in range(j, n - 1):
                        cand[idx + 1] = rest[idx]
                    g1, g2 = _objectives(cand, dist, cost, demand, split_capacity, eval_capacity, k, rho, mu)
                    if pi1 * (g1 - f1) + (1.0 - pi1) * (g2 - f2) < 0.0:
                        cur, cand = cand, cur
                        f1, f2 = g1, g2
                        accepts += 1
                        improved = True
                        break
        if improved:
            continue

        # swap two tasks
        for i in range(n):
            if improved:
                break
            for j in range(i + 1, n):
                for idx in range(n):
                    cand[idx] = cur[idx]
                cand[i], cand[j] = cur[j], cur[i]
                g1, g2 = _objectives(cand, dist, cost, demand, split_capacity, eval_capacity, k, rho, mu)
                if pi1 * (g1 - f1) + (1.0 - pi1) * (g2 - f2) < 0.0:
                    cur, cand = cand, cur
                    f1, f2 = g1, g2
                    accepts += 1
                    improved = True
                    break
        if improved:
            continue

        # 2-opt: reverse a subsequence, inverting traversal directions
        for i in range(n):
            if improved:
                break
            for j in range(i + 1, n):
                for idx in range(n):
                    cand[idx] = cur[idx]
                for idx in range(j - i + 1):
                    cand[i + idx] = inverse[cur[j - idx]]
                g1, g2 = _objectives(cand, dist, cost, demand, split_capacity, eval_capacity, k, rho, mu)
                if pi1 * (g1 - f1) + (1.0 - pi1) * (g2 - f2) < 0.0:
                    cur, cand = cand, cur
                    f1, f2 = g1, g2
                    accepts += 1
                    improved = True
                    break
        if improved:
            continue

        # flip a single task's orientation
        for i in range(n):
            for idx in range(n):
                cand[idx] = cur[idx]
            cand[i] = inverse[cur[i]]
            g1, g2 = _objectives(cand, dist, cost, demand, split_capacity, eval_capacity, k, rho, mu)
            if pi1 * (g1 - f1) + (1.0 - pi1) * (g2 - f2) < 0.0:
                cur, cand = cand, cur
                f1, f2 = g1, g2
                accepts += 1
                improved = True
                break
    return cur


@njit(cache=True)
def simulate_kernel(seq, bnds, realized, dist, cost, capacity):
    """One execution under realized per-arc demands.

    Returns (H, M, per-trip depot-return counts). The return before servicing
    task b from position a costs dist(a,0) + dist(0,b) - dist(a,b) on top of
    the planned leg.
    """
    t = bnds.shape[0] - 1
    total = 0.0
    longest = 0.0
    returns = np.zeros(t, dtype=np.int64)
    for r in range(t):
        dur = 0.0
        load = 0.0
        prev = 0
        for idx in range(bnds[r], bnds[r + 1]):
            b = seq[idx]
            if load + realized[b] > capacity:
                dur += dist[prev, 0] + dist[0, b] - dist[prev, b]
                returns[r] += 1
                load = 0.0
            dur += dist[prev, b] + cost[b]
            load += realized[b]
            prev = b
        dur += dist[prev, 0]
        total += dur
        if dur > longest:
            longest = dur
    return total, longest, returns
