import unittest
from collections import Counter
from fractions import Fraction

import numpy as np

from prooflist import Ablation, SearchPolicy, Solver, SolverConfig, Status, brute_force, solve
from prooflist import bounds
from prooflist.bounds import max_prefix_length
from prooflist.errors import EmptyModelError
from prooflist.dataset import AntecedentSet, LabeledDataset
from prooflist import BitVector

from tests.instances import dataset_from_arrays, random_instance, scratch_counts

LAMBDAS = (0, Fraction(1, 100), Fraction(1, 20), Fraction(1, 10))


def exact_objective(dataset, rule_list, lam) -> Fraction:
    mistakes = rule_list.mistakes(dataset.antecedents, dataset.labels)
    return Fraction(mistakes, dataset.n_samples) + lam * rule_list.length


class SmallSolverTest(unittest.TestCase):
    def setUp(self) -> None:
        labels = [1, 1, 1, 0, 0, 0, 0, 0]
        features = np.array([
            labels,
            [1, 0, 1, 0, 1, 0, 1, 0],
            [1, 1, 0, 0, 1, 1, 0, 0],
        ]).T
        self.dataset = dataset_from_arrays(features, labels)

    def test_perfect_separator(self):
        result = solve(self.dataset, SolverConfig(regularization=0.01))
        assert result.status is Status.CERTIFIED_OPTIMAL
        assert result.certified
        assert result.best_rule_list.prefix == (0,)
        assert result.best_rule_list.predictions == (1,)
        assert result.best_rule_list.default_prediction == 0
        assert result.best_objective_exact == Fraction(1, 100)
        self.assertAlmostEqual(result.best_objective, 0.01)
        assert result.best_mistakes == 0
        assert result.optimality_gap == 0

    def test_empty_list_can_be_optimal(self):
        result = solve(self.dataset, SolverConfig(regularization=0.5))
        assert result.certified
        assert result.best_rule_list.length == 0
        assert result.best_rule_list.default_prediction == 0
        assert result.best_objective_exact == Fraction(3, 8)

    def test_empty_antecedent_set(self):
        empty = LabeledDataset(4, BitVector.ones(4), AntecedentSet([], 4), BitVector.zeros(4))
        with self.assertRaises(EmptyModelError):
            solve(empty)

    def test_weak_mining_filter_is_reported(self):
        self.dataset.lambda_min = Fraction(1, 10)
        with self.assertLogs("prooflist.solver", level="WARNING"):
            solve(self.dataset, SolverConfig(regularization=0.01))

    def test_counters(self):
        result = solve(self.dataset, SolverConfig(regularization=0.01))
        c = result.counters
        assert c.lower_bound_evaluations >= 1
        assert c.incumbent_updates >= 1
        assert c.max_evaluated_prefix_length >= 1
        assert c.trie_node_peak >= 1
        assert c.max_physical_queue >= c.max_logical_queue >= 1


class CapTest(unittest.TestCase):
    def setUp(self) -> None:
        self.dataset = dataset_from_arrays([[1], [0], [0], [0]], [1, 1, 0, 0])

    def test_node_cap(self):
        config = SolverConfig(regularization=0, max_nodes=1, ablations={Ablation.NO_EQUIV_POINTS})
        result = solve(self.dataset, config)
        assert result.status is Status.INCOMPLETE_MEMORY
        assert result.best_objective_exact == Fraction(1, 4)
        self.assertAlmostEqual(result.optimality_gap, 0.25)
        assert result.counters.queue_insertions == 1
        assert result.log10_remaining_coarse == 0

    def test_time_cap(self):
        result = solve(self.dataset, SolverConfig(regularization=0, max_seconds=1e-9))
        assert result.status is Status.INCOMPLETE_TIME
        assert result.best_rule_list.length == 0
        self.assertAlmostEqual(result.optimality_gap, 0.5)

    def test_uncapped(self):
        result = solve(self.dataset, SolverConfig(regularization=0))
        assert result.certified
        assert result.best_objective_exact == Fraction(1, 4)


class OracleAgreementTest(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(2017)

    def test_random_instances(self):
        for i in range(200):
            dataset = random_instance(self.rng)
            lam = LAMBDAS[i % len(LAMBDAS)]
            result = solve(dataset, SolverConfig(regularization=lam))
            oracle = brute_force(dataset, lam)

            assert result.certified
            assert result.optimality_gap == 0
            assert result.best_objective_exact == oracle.min_objective, (i, lam)
            assert exact_objective(dataset, result.best_rule_list, lam) == oracle.min_objective

    def test_policies_agree(self):
        for i in range(30):
            dataset = random_instance(self.rng)
            lam = LAMBDAS[i % len(LAMBDAS)]
            objectives = {
                policy: solve(dataset, SolverConfig(regularization=lam, policy=policy)).best_objective_exact
                for policy in SearchPolicy
            }
            assert len(set(objectives.values())) == 1, objectives

    def test_ablations_agree(self):
        for i in range(30):
            dataset = random_instance(self.rng)
            lam = LAMBDAS[i % len(LAMBDAS)]
            full = solve(dataset, SolverConfig(regularization=lam))
            for ablation in list(Ablation) + [None]:
                ablations = set(Ablation) if ablation is None else {ablation}
                result = solve(dataset, SolverConfig(regularization=lam, ablations=ablations))
                assert result.certified
                assert result.best_objective_exact == full.best_objective_exact, (i, ablation)

    def test_solver_never_beats_oracle_when_capped(self):
        for i in range(20):
            dataset = random_instance(self.rng)
            lam = LAMBDAS[i % len(LAMBDAS)]
            result = solve(dataset, SolverConfig(regularization=lam, max_nodes=3))
            assert result.best_objective_exact >= brute_force(dataset, lam).min_objective
            assert result.optimality_gap >= 0


class InvariantTest(unittest.TestCase):
    def setUp(self) -> None:
        self.dataset = random_instance(np.random.default_rng(64), n=64, m=8)
        self.evaluations = []

    def test_instrumented_run(self):
        config = SolverConfig(regularization=0.01)
        result = solve(self.dataset, config, observer=self.evaluations.append)
        assert result.certified
        assert self.evaluations

        solver = Solver(self.dataset, config)
        penalty, per_mistake = solver.scale.penalty, solver.scale.mistake_ticks
        for e in self.evaluations:
            assert e.bound_ticks >= e.parent_bound_ticks + penalty
            mistakes, _, _ = scratch_counts(self.dataset, e.prefix)
            assert e.prefix_mistakes == mistakes
            assert e.bound_ticks == mistakes * per_mistake + len(e.prefix) * penalty
            limit = max_prefix_length(Fraction(e.incumbent_ticks, solver.scale.ticks_per_unit), config.regularization, 8)
            assert len(e.prefix) <= limit
        assert result.counters.lower_bound_evaluations == len(self.evaluations)

    def test_incumbent_is_non_increasing(self):
        result = solve(self.dataset, SolverConfig(regularization=0.01, trace_sample_interval=1))
        objectives = [r.incumbent_objective for r in result.trace]
        assert objectives == sorted(objectives, reverse=True)


class RemainingSpaceRecorder(Solver):
    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.samples = []

    def emit_trace(self):
        self.samples.append((self.counters.lower_bound_evaluations, self.remaining_search_space()))
        return super().emit_trace()


class TraceTest(unittest.TestCase):
    def setUp(self) -> None:
        self.dataset = random_instance(np.random.default_rng(5), n=48, m=7)

    def test_estimate_never_undercounts(self):
        for lam in LAMBDAS:
            solver = RemainingSpaceRecorder(self.dataset, SolverConfig(regularization=lam, trace_sample_interval=1))
            result = solver.solve()
            total = result.counters.lower_bound_evaluations
            for evaluated, remaining in solver.samples:
                assert total - evaluated <= remaining

    def test_first_and_last_records(self):
        result = solve(self.dataset, SolverConfig(regularization=0.01), trace_clock=lambda: 0.0)
        ones = self.dataset.labels.popcount()
        first, last = result.trace[0], result.trace[-1]

        self.assertAlmostEqual(first.incumbent_objective, min(ones, self.dataset.n_samples - ones) / 48)
        assert first.incumbent_length == 0
        assert first.logical_queue == 1
        assert first.elapsed_s == 0.0

        self.assertAlmostEqual(last.incumbent_objective, result.best_objective)
        assert last.logical_queue == 0 and last.physical_queue == 0
        assert last.log10_remaining is None
        assert last.incumbent_length == result.best_rule_list.length

    def test_streamed_records(self):
        streamed = []
        result = solve(self.dataset, SolverConfig(regularization=0.01), on_trace=streamed.append)
        assert streamed == result.trace


class LargeAntecedentSetTest(unittest.TestCase):
    def setUp(self) -> None:
        rng = np.random.default_rng(1800)
        self.dataset = dataset_from_arrays(rng.random((16, 1800)) < 0.5, [1, 0] * 8)

    def test_zero_regularization(self):
        result = solve(self.dataset, SolverConfig(regularization=0, max_nodes=50), trace_clock=lambda: 0.0)
        first = result.trace[0]
        assert first.log10_remaining == bounds.floor_log10(bounds.partial_permutations(1800, 1800))
        assert first.log10_remaining > 4300
        assert result.best_objective_exact <= Fraction(1, 2)


class AuditingSolver(Solver):
    """Checks the trie against the queue around every expansion."""

    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.audits = 0
        self.violations = []

    def evaluate_children(self, parent):
        self.audit()
        completed = super().evaluate_children(parent)
        self.audit()
        return completed

    def audit(self) -> None:
        self.audits += 1
        trie = self.trie
        reachable = list(trie.walk())
        if trie.num_nodes != len(reachable) + trie.num_marked:
            self.violations.append(("count", trie.num_nodes, len(reachable), trie.num_marked))

        queued = self.queue.snapshot()
        entries = Counter(id(node) for node in queued)
        for node in reachable:
            if not node.children and node is not trie.pinned and entries[id(node)] != 1:
                self.violations.append(("leaf", node.path(), entries[id(node)]))
        for node in queued:
            if not node.alive:
                self.violations.append(("dead", node.path()))


class SolveStructureTest(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(60)

    def test_trie_matches_queue(self):
        for i in range(60):
            dataset = random_instance(self.rng)
            lam = LAMBDAS[i % len(LAMBDAS)]
            solver = AuditingSolver(dataset, SolverConfig(regularization=lam))
            result = solver.solve()
            assert result.certified
            assert solver.audits > 0
            assert solver.violations == [], (i, lam, solver.violations[:3])

    def test_symmetry_map_never_adds_evaluations(self):
        for i in range(60):
            dataset = random_instance(self.rng)
            lam = LAMBDAS[i % len(LAMBDAS)]
            with_map = solve(dataset, SolverConfig(regularization=lam))
            without = solve(dataset, SolverConfig(regularization=lam, ablations={Ablation.NO_SYMMAP}))
            assert with_map.counters.lower_bound_evaluations <= without.counters.lower_bound_evaluations, (i, lam)

    def test_queue_insertions_include_root(self):
        dataset = random_instance(self.rng)
        solver = Solver(dataset, SolverConfig(regularization=0.01))
        result = solver.solve()
        assert result.counters.queue_insertions == solver.queue.insertions >= 1


class AblationCounterTest(unittest.TestCase):
    def setUp(self) -> None:
        rng = np.random.default_rng(1)
        features = rng.random((200, 8)) < 0.3
        labels = (features[:, 0] & ~features[:, 1]) | (rng.random(200) < 0.1)
        self.dataset = dataset_from_arrays(features, labels)

    def test_bounds_reduce_evaluations(self):
        full = solve(self.dataset, SolverConfig(regularization=0.01)).counters
        for ablation in (Ablation.NO_SYMMAP, Ablation.NO_LOOKAHEAD):
            ablated = solve(self.dataset, SolverConfig(regularization=0.01, ablations={ablation})).counters
            assert full.lower_bound_evaluations <= ablated.lower_bound_evaluations, ablation

    def test_coarse_estimate_is_never_smaller(self):
        for max_nodes in (5, 20, 80):
            solver = Solver(self.dataset, SolverConfig(regularization=0.01, max_nodes=max_nodes))
            result = solver.solve()
            if result.certified:
                continue
            fine = solver.remaining_search_space()
            coarse = solver.coarse_remaining_search_space()
            assert coarse >= fine
            assert result.log10_remaining_coarse == (bounds.floor_log10(coarse) if coarse else None)
