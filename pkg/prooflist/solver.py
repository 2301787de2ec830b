"""
Branch-and-bound over rule lists, returning a certificate of optimality when
the frontier is exhausted.

Every child of a popped prefix goes through the same cascade: antecedent
support, accurate antecedent support, the hierarchical lower bound, the
objective (and incumbent update), the equivalent-points bound with one-step
lookahead, and finally the symmetry-aware map.  All quantities are integer
ticks of an ObjectiveScale, so every comparison is exact.
"""
from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, NamedTuple, Optional, Tuple

from . import bounds
from .bitvector import BitVector
from .config import Ablation, SolverConfig
from .dataset import LabeledDataset
from .rulelist import RuleList
from .search import PrefixQueue
from .symmap import Decision, SymmetryMap
from .trie import PrefixTrie, TrieNode
import prooflist.errors as errors

log = logging.getLogger(__name__)


class Status(enum.Enum):
    CERTIFIED_OPTIMAL = "certified_optimal"
    INCOMPLETE_MEMORY = "incomplete_memory"
    INCOMPLETE_TIME = "incomplete_time"


@dataclass
class SolverCounters:
    """Machine-independent counts of the work a run did."""

    lower_bound_evaluations: int = 0
    queue_insertions: int = 0
    max_physical_queue: int = 0
    max_logical_queue: int = 0
    trie_node_peak: int = 0
    incumbent_updates: int = 0
    max_evaluated_prefix_length: int = 0
    pops: int = 0
    pruned_support: int = 0
    pruned_accurate_support: int = 0
    pruned_hierarchical: int = 0
    pruned_lookahead: int = 0
    pruned_symmetry: int = 0
    symmetry_replacements: int = 0
    gc_removed: int = 0


class TraceRecord(NamedTuple):
    elapsed_s: float
    incumbent_objective: float
    popped_lower_bound: float
    incumbent_length: int
    logical_queue: int
    physical_queue: int
    trie_nodes: int
    # None once nothing remains to evaluate
    log10_remaining: Optional[int]


class Evaluation(NamedTuple):
    """Passed to an observer for every child whose lower bound is computed."""

    prefix: Tuple[int, ...]
    prefix_mistakes: int
    bound_ticks: int
    parent_bound_ticks: int
    incumbent_ticks: int


Observer = Callable[[Evaluation], None]


@dataclass
class SolverResult:
    best_rule_list: RuleList
    best_objective: float
    best_objective_exact: Fraction
    best_mistakes: int
    status: Status
    optimality_gap: float
    counters: SolverCounters
    trace: List[TraceRecord] = field(default_factory=list)
    # Upper bound on evaluations left when the run stopped, from prefix lengths alone
    log10_remaining_coarse: Optional[int] = None

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED_OPTIMAL


class Solver:
    """State of one branch-and-bound run.  Not thread-safe; use one Solver per run."""

    def __init__(
        self,
        dataset: LabeledDataset,
        config: SolverConfig,
        observer: Optional[Observer] = None,
        trace_clock: Callable[[], float] = time.perf_counter,
        on_trace: Optional[Callable[[TraceRecord], None]] = None,
    ) -> None:
        if dataset.n_antecedents == 0:
            raise errors.EmptyModelError("Cannot search for rule lists without antecedents")
        if dataset.lambda_min is not None and dataset.lambda_min > config.regularization:
            log.warning(
                "Antecedents were mined with lambda_min=%s, above this run's lambda=%s: "
                "the support filter removed rules the bounds would have kept",
                dataset.lambda_min, config.regularization,
            )

        self.dataset = dataset
        self.config = config
        self.observer = observer
        self.trace_clock = trace_clock
        self.on_trace = on_trace

        self.scale = bounds.ObjectiveScale(config.regularization, dataset.n_samples)
        self.trie = PrefixTrie(self.scale, config.max_nodes)
        self.queue = PrefixQueue(self.trie, config.effective_policy)
        self.symmap = SymmetryMap()
        self.counters = SolverCounters()
        self.trace: List[TraceRecord] = []

        self.use_support_bounds = not config.has(Ablation.NO_SUPPORT_BOUNDS)
        self.use_symmap = not config.has(Ablation.NO_SYMMAP)
        self.use_equiv_points = not config.has(Ablation.NO_EQUIV_POINTS)
        self.lookahead_ticks = 0 if config.has(Ablation.NO_LOOKAHEAD) else self.scale.penalty

        self.best_ticks = 0
        self.best_rule_list = RuleList()
        self.status: Optional[Status] = None
        self._interrupted: Optional[TrieNode] = None
        self._popped_bound = 0.0
        self._trace_start = 0.0

    def _b0_ticks(self, uncaptured: BitVector) -> int:
        if not self.use_equiv_points:
            return 0
        return self.scale.equiv_points_ticks(uncaptured, self.dataset.minority_mask)

    def _record_queue_sizes(self) -> None:
        c = self.counters
        c.max_physical_queue = max(c.max_physical_queue, self.queue.physical_size)
        c.max_logical_queue = max(c.max_logical_queue, self.queue.logical_size)

    def solve(self) -> SolverResult:
        n = self.dataset.n_samples
        labels = self.dataset.labels
        self._trace_start = self.trace_clock()
        deadline = None if self.config.max_seconds is None else time.monotonic() + self.config.max_seconds

        # The empty rule list is the first incumbent
        default_prediction, mistakes = bounds.majority(n, labels.popcount())
        root = self.trie.insert(
            (),
            b0_ticks=self._b0_ticks(BitVector.ones(n)),
            objective_ticks=self.scale.objective_ticks(0, mistakes, 0),
            prediction=default_prediction,
            default_prediction=default_prediction,
        )
        self.best_ticks = root.objective_ticks
        self.best_rule_list = RuleList((), (), default_prediction)
        self.queue.push(root)
        self._record_queue_sizes()
        self.emit_trace()
        log.info("Starting search: N=%d, M=%d, lambda=%s, policy=%s, ablations=%s",
                 n, self.dataset.n_antecedents, self.config.regularization,
                 self.queue.policy.value, sorted(a.value for a in self.config.ablations))

        while True:
            if deadline is not None and time.monotonic() >= deadline:
                self.status = Status.INCOMPLETE_TIME
                break

            node = self.queue.pop_live()
            if node is None:
                self.status = Status.CERTIFIED_OPTIMAL
                break
            self.counters.pops += 1
            self._popped_bound = node.lower_bound

            if bounds.lookahead_prunes(node.bound_ticks + node.b0_ticks, self.lookahead_ticks, self.best_ticks):
                self.trie.prune_upwards(node)
            else:
                self.trie.pinned = node
                completed = self.evaluate_children(node)
                self.trie.pinned = None
                if not completed:
                    self.status = Status.INCOMPLETE_MEMORY
                    self._interrupted = node
                    break
                self.trie.prune_upwards(node)

            if self.counters.pops % self.config.trace_sample_interval == 0:
                self.emit_trace()

        self.emit_trace()
        self.counters.trie_node_peak = self.trie.peak_nodes
        return self._result()

    def evaluate_children(self, parent: TrieNode) -> bool:
        """
        Evaluate every one-rule extension of parent.  Returns False when the node
        cap stopped the evaluation part-way.
        """
        antecedents = self.dataset.antecedents
        labels = self.dataset.labels
        scale = self.scale
        counters = self.counters

        lineage = parent.lineage()
        path = tuple(node.antecedent_id for node in lineage)
        captured = BitVector.zeros(self.dataset.n_samples)
        for antecedent_id in path:
            captured = captured | antecedents[antecedent_id].captures
        uncaptured = ~captured
        already_captured = captured.popcount()
        length = parent.depth + 1

        for antecedent in antecedents:
            if antecedent.id in path:
                continue
            child = bounds.incremental_child_mistakes(uncaptured, antecedent.captures, labels)

            if self.use_support_bounds:
                if scale.support_prunes(child.captured_count):
                    counters.pruned_support += 1
                    continue
                if scale.support_prunes(child.captured_count - child.mistakes):
                    counters.pruned_accurate_support += 1
                    continue

            prefix_mistakes = parent.prefix_mistakes + child.mistakes
            bound = scale.lower_bound_ticks(prefix_mistakes, length)
            counters.lower_bound_evaluations += 1
            counters.max_evaluated_prefix_length = max(counters.max_evaluated_prefix_length, length)
            if self.observer is not None:
                self.observer(Evaluation(path + (antecedent.id,), prefix_mistakes, bound,
                                         parent.bound_ticks, self.best_ticks))

            if bound >= self.best_ticks:
                counters.pruned_hierarchical += 1
                continue

            default_mistakes, default_prediction = bounds.incremental_default(uncaptured, child.captured, labels)
            objective = scale.objective_ticks(prefix_mistakes, default_mistakes, length)
            if objective < self.best_ticks:
                self._update_incumbent(lineage, antecedent.id, child.prediction, default_prediction, objective)
                if not parent.alive:
                    # Every remaining child would fail the hierarchical bound
                    return True

            b0 = self._b0_ticks(uncaptured.andnot(child.captured))
            if bounds.lookahead_prunes(bound + b0, self.lookahead_ticks, self.best_ticks):
                counters.pruned_lookahead += 1
                continue

            child_path = path + (antecedent.id,)
            if self.use_symmap:
                outcome = self.symmap.check_and_insert(child_path, bound + b0)
                if outcome.decision is Decision.BLOCKED:
                    counters.pruned_symmetry += 1
                    continue
                if outcome.decision is Decision.REPLACED_WORSE:
                    counters.symmetry_replacements += 1
                    self.trie.delete_subtree(outcome.prior)

            if self.trie.full:
                log.warning("Node cap of %d reached", self.trie.max_nodes)
                return False

            node = self.trie.insert_child(
                parent,
                antecedent.id,
                prefix_mistakes=prefix_mistakes,
                b0_ticks=b0,
                objective_ticks=objective,
                prediction=child.prediction,
                default_prediction=default_prediction,
                captured_count=already_captured + child.captured_count,
            )
            self.queue.push(node)
            self._record_queue_sizes()

        return True

    def _update_incumbent(
        self, lineage: List[TrieNode], antecedent_id: int, prediction: int, default_prediction: int, objective: int
    ) -> None:
        self.best_ticks = objective
        self.best_rule_list = RuleList(
            tuple(node.antecedent_id for node in lineage) + (antecedent_id,),
            tuple(node.prediction for node in lineage) + (prediction,),
            default_prediction,
        )
        self.counters.incumbent_updates += 1
        log.info("New best objective %.6f with %d rules", self.scale.to_real(objective), self.best_rule_list.length)

        self.counters.gc_removed += self.trie.garbage_collect(self.best_ticks - self.lookahead_ticks)
        self.emit_trace()

    def _live_nodes(self) -> List[TrieNode]:
        """Queued prefixes plus any prefix that left the queue without finishing its children."""
        nodes = self.queue.snapshot()
        for node in (self.trie.pinned, self._interrupted):
            if node is not None and node.alive and node not in nodes:
                nodes.append(node)
        return nodes

    def remaining_search_space(self) -> int:
        """Upper bound on the lower bound evaluations this run can still make."""
        return bounds.remaining_search_space(
            self.best_ticks,
            [(node.depth, node.bound_ticks) for node in self._live_nodes()],
            self.scale.penalty,
            self.dataset.n_antecedents,
        )

    def coarse_remaining_search_space(self) -> int:
        """Like remaining_search_space, from prefix lengths alone."""
        return bounds.coarse_remaining_search_space(
            self.best_ticks,
            [node.depth for node in self._live_nodes()],
            self.scale.penalty,
            self.dataset.n_antecedents,
        )

    def emit_trace(self) -> TraceRecord:
        remaining = self.remaining_search_space()
        record = TraceRecord(
            elapsed_s=self.trace_clock() - self._trace_start,
            incumbent_objective=self.scale.to_real(self.best_ticks),
            popped_lower_bound=self._popped_bound,
            incumbent_length=self.best_rule_list.length,
            logical_queue=self.queue.logical_size,
            physical_queue=self.queue.physical_size,
            trie_nodes=self.trie.num_nodes,
            log10_remaining=bounds.floor_log10(remaining) if remaining > 0 else None,
        )
        self.trace.append(record)
        if self.on_trace is not None:
            self.on_trace(record)
        if self.config.verbosity >= 1:
            log.info("Trace: %s", record)
        return record

    def _result(self) -> SolverResult:
        self.counters.queue_insertions = self.queue.insertions
        if self.status is Status.CERTIFIED_OPTIMAL:
            gap_ticks = 0
        else:
            remaining = [node.bound_ticks for node in self._live_nodes()]
            gap_ticks = max(0, self.best_ticks - min(remaining)) if remaining else 0

        coarse = self.coarse_remaining_search_space()
        best = self.best_rule_list
        log.info("Search finished (%s) after %d lower bound evaluations: objective %.6f, gap %.6f",
                 self.status.value, self.counters.lower_bound_evaluations,
                 self.scale.to_real(self.best_ticks), self.scale.to_real(gap_ticks))
        return SolverResult(
            best_rule_list=best,
            best_objective=self.scale.to_real(self.best_ticks),
            best_objective_exact=self.scale.to_exact(self.best_ticks),
            best_mistakes=(self.best_ticks - best.length * self.scale.penalty) // self.scale.mistake_ticks,
            status=self.status,
            optimality_gap=self.scale.to_real(gap_ticks),
            counters=self.counters,
            trace=self.trace,
            log10_remaining_coarse=bounds.floor_log10(coarse) if coarse > 0 else None,
        )


def solve(
    dataset: LabeledDataset,
    config: Optional[SolverConfig] = None,
    observer: Optional[Observer] = None,
    **kwargs,
) -> SolverResult:
    """Find a rule list minimizing mistakes/N + lambda * length, certifying it when the search completes."""
    return Solver(dataset, config or SolverConfig(), observer, **kwargs).solve()
