"""Evolutionary machinery: sorting, crowding, variation, descent, full runs."""

from types import SimpleNamespace

import numpy as np
import pytest

import scarp
from scarp import DemandModel, GAParams, Penalties
from scarp.moga import (
    Evaluator,
    ObjectiveBounds,
    _ox_child,
    crowded_tournament,
    crowding_distance,
    direction_weight,
    directed_local_search,
    greedy_chromosome,
    mutate,
    non_dominated_sort,
    ox_crossover,
)
from _oracle import pairwise_fronts
from _synth import TOY_DAT, TRADEOFF_DAT, random_dat


def P(f1, f2):
    return SimpleNamespace(f1=f1, f2=f2, front=0, crowding=0.0)


class TestNonDominatedSort:
    def test_hand_example(self):
        pop = [P(1, 5), P(2, 2), P(5, 1), P(2, 6), P(3, 3), P(5, 5)]
        fronts = non_dominated_sort(pop)
        assert [p.front for p in pop] == [1, 1, 1, 2, 2, 3]
        assert [len(f) for f in fronts] == [3, 2, 1]

    def test_duplicates_share_a_front(self):
        pop = [P(1, 1), P(1, 1), P(2, 2)]
        fronts = non_dominated_sort(pop)
        assert [p.front for p in pop] == [1, 1, 2]
        assert len(fronts) == 2

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(42)
        for trial in range(200):
            n = int(rng.integers(1, 40))
            if trial % 2 == 0:
                pts = rng.integers(0, 6, size=(n, 2)).astype(float)  # many ties
            else:
                pts = rng.random((n, 2))
            pop = [P(float(a), float(b)) for a, b in pts]
            non_dominated_sort(pop)
            ref = pairwise_fronts([(p.f1, p.f2) for p in pop])
            assert [p.front for p in pop] == ref

    def test_fronts_partition_population(self):
        rng = np.random.default_rng(5)
        pop = [P(float(a), float(b)) for a, b in rng.random((30, 2))]
        fronts = non_dominated_sort(pop)
        assert sum(len(f) for f in fronts) == 30
        assert {id(p) for f in fronts for p in f} == {id(p) for p in pop}


class TestCrowdingDistance:
    def test_half_perimeter_hand_example(self):
        front = [P(0, 10), P(1, 6), P(3, 4), P(6, 1)]
        dist = crowding_distance(front)
        assert dist[0] == np.inf and dist[3] == np.inf
        assert dist[1] == pytest.approx((3 - 0) + (10 - 4))   # 9
        assert dist[2] == pytest.approx((6 - 1) + (6 - 1))    # 10
        assert [p.crowding for p in front] == list(dist)

    def test_small_fronts_all_infinite(self):
        for pts in ([P(1, 1)], [P(1, 2), P(2, 1)]):
            assert np.all(np.isinf(crowding_distance(pts)))

    def test_inner_duplicate_gets_zero(self):
        front = [P(0, 10), P(2, 5), P(2, 5), P(2, 5), P(6, 1)]
        dist = crowding_distance(front)
        # the middle duplicate is pinched between identical neighbors; the
        # outer two still see one distinct neighbor each
        assert list(dist[1:4]) == [7.0, 0.0, 8.0]

    def test_result_aligned_with_input_order(self):
        pts = [(0.0, 10.0), (1.0, 6.0), (3.0, 4.0), (6.0, 1.0)]
        a = crowding_distance([P(*q) for q in pts])
        b = crowding_distance([P(*q) for q in pts[::-1]])
        assert list(a) == list(b[::-1])


class TestCrowdedTournament:
    def test_lower_front_wins(self):
        rng = np.random.default_rng(0)
        a, b = P(9, 9), P(1, 1)
        a.front, a.crowding = 1, 0.0
        b.front, b.crowding = 2, np.inf
        assert crowded_tournament(a, b, rng) is a
        assert crowded_tournament(b, a, rng) is a

    def test_higher_crowding_wins_within_front(self):
        rng = np.random.default_rng(0)
        a, b = P(1, 1), P(2, 2)
        a.front = b.front = 1
        a.crowding, b.crowding = 3.0, 7.0
        assert crowded_tournament(a, b, rng) is b

    def test_full_tie_is_a_coin_flip(self):
        rng = np.random.default_rng(123)
        a, b = P(1, 1), P(2, 2)
        a.front = b.front = 1
        a.crowding = b.crowding = 5.0
        wins = sum(crowded_tournament(a, b, rng) is a for _ in range(2000))
        assert 933 <= wins <= 1067  # 3 sigma around 1000


class TestOxCrossover:
    def test_hand_example_keeps_fill_orientation(self):
        p1 = np.array([1, 3, 5, 7], dtype=np.int32)
        p2 = np.array([8, 6, 4, 2], dtype=np.int32)
        child = _ox_child(p1, p2, 1, 2)
        # segment [3, 5] copied; fill scans p2 circularly from index 3:
        # arc 2 (edge 0) placed at slot 3, arc 8 (edge 3) wraps to slot 0
        assert child.tolist() == [8, 3, 5, 2]

    def test_either_orientation_blocks_refill(self):
        p1 = np.array([1, 3], dtype=np.int32)
        p2 = np.array([4, 2], dtype=np.int32)  # same edges, both flipped
        child = _ox_child(p1, p2, 1, 1)
        # p2's arc 4 is edge 1, already in the segment as arc 3
        assert child.tolist() == [2, 3]

    def test_whole_segment_copies_first_parent(self, toy):
        p1 = np.array([1, 3, 5, 7], dtype=np.int32)
        p2 = np.array([7, 5, 3, 1], dtype=np.int32)
        assert _ox_child(p1, p2, 0, 3).tolist() == p1.tolist()

    def test_children_are_valid_permutations(self):
        inst = scarp.parse_instance(random_dat("x", 10, 8, 4, 20, seed=3))
        g = scarp.build_task_graph(inst)
        rng = np.random.default_rng(9)
        for _ in range(50):
            p1 = scarp.random_chromosome(g, rng)
            p2 = scarp.random_chromosome(g, rng)
            for child in ox_crossover(p1, p2, rng):
                scarp.validate_chromosome(child, g)

    def test_deterministic_given_seed(self, toy):
        p1 = np.array([1, 3, 5, 7], dtype=np.int32)
        p2 = np.array([8, 6, 4, 2], dtype=np.int32)
        a = ox_crossover(p1, p2, np.random.default_rng(7))
        b = ox_crossover(p1, p2, np.random.default_rng(7))
        assert a[0].tolist() == b[0].tolist() and a[1].tolist() == b[1].tolist()


class TestMutate:
    def test_zero_rate_is_identity(self, toy):
        c = np.array([1, 3, 5, 7], dtype=np.int32)
        assert mutate(c, 0.0, np.random.default_rng(0), toy.graph.inverse) is c

    def test_force_always_changes(self, toy):
        rng = np.random.default_rng(11)
        c = np.array([1, 3, 5, 7], dtype=np.int32)
        for _ in range(60):
            m = mutate(c, 0.0, rng, toy.graph.inverse, force=True)
            assert m is not c and m.tolist() != c.tolist()
            scarp.validate_chromosome(m, toy.graph)

    def test_single_task_only_flips(self):
        text = TOY_DAT  # need a 1-task graph: build from a 2-node instance
        inst = scarp.parse_instance(
            "NOMBRE : one\nVERTICES : 2\nARISTAS_REQ : 1\nARISTAS_NOREQ : 0\n"
            "LISTA_ARISTAS_REQ :\n (1,2) coste 3 demanda 1\n"
            "LISTA_ARISTAS_NOREQ :\nDEPOSITO : 1\nCAPACIDAD : 2\n"
        )
        g = scarp.build_task_graph(inst)
        rng = np.random.default_rng(2)
        c = np.array([1], dtype=np.int32)
        for _ in range(10):
            assert mutate(c, 1.0, rng, g.inverse).tolist() == [2]

    def test_rate_statistics(self, toy):
        rng = np.random.default_rng(77)
        c = np.array([1, 3, 5, 7], dtype=np.int32)
        changed = sum(
            mutate(c, 0.3, rng, toy.graph.inverse) is not c for _ in range(2000)
        )
        assert abs(changed / 2000 - 0.3) < 0.031  # 3 sigma

    def test_moves_preserve_validity(self):
        inst = scarp.parse_instance(random_dat("x", 8, 7, 3, 20, seed=1))
        g = scarp.build_task_graph(inst)
        rng = np.random.default_rng(5)
        c = scarp.random_chromosome(g, rng)
        for _ in range(200):
            c = mutate(c, 1.0, rng, g.inverse)
            scarp.validate_chromosome(c, g)


class TestDirectionWeight:
    BOUNDS = ObjectiveBounds(f1_min=10.0, f1_max=20.0, f2_min=100.0, f2_max=200.0)

    def test_extremes_and_midpoint(self):
        assert direction_weight(P(20, 100), self.BOUNDS) == 1.0
        assert direction_weight(P(10, 200), self.BOUNDS) == 0.0
        assert direction_weight(P(15, 150), self.BOUNDS) == 0.5
        assert direction_weight(P(12.5, 150), self.BOUNDS) == pytest.approx(1 / 3)

    def test_double_minimum_splits_evenly(self):
        assert direction_weight(P(10, 100), self.BOUNDS) == 0.5

    def test_degenerate_bounds(self):
        flat1 = ObjectiveBounds(5.0, 5.0, 0.0, 10.0)
        assert direction_weight(P(5, 5), flat1) == 0.0
        flat2 = ObjectiveBounds(0.0, 10.0, 7.0, 7.0)
        assert direction_weight(P(5, 7), flat2) == 1.0
        point = ObjectiveBounds(5.0, 5.0, 7.0, 7.0)
        assert direction_weight(P(5, 7), point) == 0.5


class TestDirectedLocalSearch:
    def _setup(self, seed):
        inst = scarp.parse_instance(random_dat("x", 9, 8, 4, 10, seed=seed, qhi=4))
        g = scarp.build_task_graph(inst)
        ev = Evaluator(g, DemandModel(), Penalties())
        return g, ev

    def test_weighted_criterion_never_degrades(self):
        improved_somewhere = False
        for seed in range(5):
            g, ev = self._setup(seed)
            rng = np.random.default_rng(seed)
            ind = ev.individual(scarp.random_chromosome(g, rng))
            bounds = ObjectiveBounds(ind.f1, ind.f1 + 10, ind.f2, ind.f2 + 10)
            pi1 = direction_weight(ind, bounds)
            out = directed_local_search(ind, bounds, ev)
            before = pi1 * ind.f1 + (1 - pi1) * ind.f2
            after = pi1 * out.f1 + (1 - pi1) * out.f2
            assert after <= before + 1e-9
            improved_somewhere |= after < before - 1e-9
            scarp.validate_chromosome(out.chrom, g)
        assert improved_somewhere

    def test_budget_zero_returns_equivalent_individual(self):
        g, ev = self._setup(0)
        ind = ev.individual(scarp.random_chromosome(g, np.random.default_rng(4)))
        out = directed_local_search(
            ind, ObjectiveBounds(0, 1, 0, 1), ev, budget=0
        )
        assert out.chrom.tolist() == ind.chrom.tolist()
        assert (out.f1, out.f2) == (ind.f1, ind.f2)


class TestGreedySeed:
    def test_toy_greedy_order(self, toy):
        assert greedy_chromosome(toy.graph).tolist() == [1, 3, 5, 7]

    def test_greedy_is_valid_everywhere(self):
        for seed in range(4):
            inst = scarp.parse_instance(random_dat("x", 11, 9, 5, 20, seed=seed))
            g = scarp.build_task_graph(inst)
            scarp.validate_chromosome(greedy_chromosome(g), g)


class TestEvaluator:
    def test_rejects_infeasible_split_capacity(self, toy):
        with pytest.raises(ValueError, match="split capacity"):
            Evaluator(toy.graph, DemandModel(), Penalties(), split_capacity=2.0)

    def test_individual_matches_public_evaluation(self, toy):
        ev = Evaluator(toy.graph, DemandModel(), Penalties())
        ind = ev.individual(np.array([1, 3, 5, 7], dtype=np.int32))
        ref_sol = scarp.split(ind.chrom, toy.graph)
        ref = scarp.evaluate_solution(ref_sol, toy.graph, DemandModel(), Penalties())
        assert ind.sol.h == ref_sol.h and ind.sol.t == ref_sol.t
        assert (ind.f1, ind.f2) == (ref.f1, ref.f2)


class TestParamsValidation:
    def test_bad_params_rejected(self):
        with pytest.raises(ValueError, match="even"):
            GAParams(ns=7)
        with pytest.raises(ValueError, match="even"):
            GAParams(ns=0)
        with pytest.raises(ValueError, match="ls_period"):
            GAParams(ls_period=0)
        with pytest.raises(ValueError, match="mutation_rate"):
            GAParams(mutation_rate=1.5)


class TestFullRun:
    PARAMS = dict(ns=20, iterations=30, ls_period=10, seed=0)

    def test_population_size_is_constant(self, toy):
        sizes = []
        scarp.nsga2_run(
            toy.inst, DemandModel(), Penalties(), GAParams(**self.PARAMS),
            callback=lambda it, pop: sizes.append(len(pop)),
        )
        assert sizes == [20] * 30

    def test_zero_iterations_still_reports_a_front(self, toy):
        res = scarp.nsga2_run(
            toy.inst, DemandModel(), Penalties(),
            GAParams(ns=10, iterations=0, seed=3),
        )
        assert len(res.population) == 10
        assert res.front and all(ind.front == 1 for ind in res.front)
        assert res.leftmost.f1 == min(ind.f1 for ind in res.front)
        assert res.rightmost.f2 == min(ind.f2 for ind in res.front)

    def test_front_sorted_and_mutually_non_dominated(self):
        inst = scarp.parse_instance(TRADEOFF_DAT)
        res = scarp.nsga2_run(
            inst, DemandModel(), Penalties(), GAParams(**self.PARAMS)
        )
        f = res.front
        assert all(a.f1 <= b.f1 for a, b in zip(f, f[1:]))
        for a in f:
            for b in f:
                assert not (a.f1 <= b.f1 and a.f2 <= b.f2 and (a.f1 < b.f1 or a.f2 < b.f2)) or a is b or (a.f1 == b.f1 and a.f2 == b.f2)

    def test_tradeoff_instance_yields_distinct_compromises(self):
        inst = scarp.parse_instance(TRADEOFF_DAT)
        res = scarp.nsga2_run(
            inst, DemandModel(), Penalties(), GAParams(ns=20, iterations=60, ls_period=10, seed=1)
        )
        points = {(round(ind.f1, 9), round(ind.f2, 9)) for ind in res.front}
        assert len(points) >= 2

    def test_same_seed_reproduces_exactly(self, toy):
        runs = [
            scarp.nsga2_run(
                toy.inst, DemandModel(), Penalties(), GAParams(**self.PARAMS)
            )
            for _ in range(2)
        ]
        a, b = runs
        assert [i.chrom.tolist() for i in a.front] == [i.chrom.tolist() for i in b.front]
        assert [(i.f1, i.f2) for i in a.front] == [(i.f1, i.f2) for i in b.front]
        assert [(i.f1, i.f2) for i in a.population] == [(i.f1, i.f2) for i in b.population]

    def test_greedy_seed_joins_initial_population(self, toy):
        res = scarp.nsga2_run(
            toy.inst, DemandModel(), Penalties(),
            GAParams(ns=10, iterations=0, seed=0, greedy_seed=True),
        )
        greedy = greedy_chromosome(res.graph).tolist()
        assert any(ind.chrom.tolist() == greedy for ind in res.population)

    def test_split_capacity_override_threads_through(self, toy):
        res = scarp.nsga2_run(
            toy.inst, DemandModel(), Penalties(),
            GAParams(ns=10, iterations=5, seed=0), split_capacity=3.0,
        )
        for ind in res.population:
            assert all(trip.load <= 3.0 for trip in ind.sol.trips)
