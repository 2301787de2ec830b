"""The frontier: one binary heap whose ordering is chosen by a SearchPolicy."""
from __future__ import annotations

import enum
import heapq
import itertools
import math
from typing import List, NamedTuple, Optional, Union

from .trie import PrefixTrie, TrieNode

Priority = Union[int, float]


class SearchPolicy(enum.Enum):
    """Order in which queued prefixes are expanded; smaller keys pop first."""

    BFS = "bfs"
    DFS = "dfs"
    LOWER_BOUND = "lower_bound"
    OBJECTIVE = "objective"
    CURIOSITY = "curiosity"

    def priority(self, node: TrieNode) -> Priority:
        if self is SearchPolicy.BFS:
            return node.depth
        if self is SearchPolicy.DFS:
            return -node.depth
        if self is SearchPolicy.LOWER_BOUND:
            return node.bound_ticks + node.b0_ticks
        if self is SearchPolicy.OBJECTIVE:
            return node.objective_ticks
        # Curiosity: lower bound over normalized support
        if node.depth == 0:
            return 0.0
        if node.captured_count == 0:
            return math.inf
        return node.scale.curiosity(node.bound_ticks, node.captured_count)


class QueueEntry(NamedTuple):
    priority: Priority
    tiebreak: int
    node: TrieNode


class PrefixQueue:
    """
    Priority queue of trie leaves.  Entries are never re-prioritised; a leaf
    deleted from the trie stays in the heap with its delete_marker set and is
    freed when it reaches the top.
    """

    def __init__(self, trie: PrefixTrie, policy: SearchPolicy = SearchPolicy.LOWER_BOUND) -> None:
        self.trie = trie
        self.policy = policy
        self._heap: List[QueueEntry] = []
        self._counter = itertools.count()
        self.insertions = 0

    def push(self, node: TrieNode) -> None:
        node.in_queue = True
        heapq.heappush(self._heap, QueueEntry(self.policy.priority(node), next(self._counter), node))
        self.insertions += 1

    def pop_live(self) -> Optional[TrieNode]:
        """Pop the best live leaf, freeing marked leaves on the way; None once exhausted."""
        while self._heap:
            node = heapq.heappop(self._heap).node
            node.in_queue = False
            if node.delete_marker:
                self.trie.release(node)
                continue
            return node
        return None

    def snapshot(self) -> List[TrieNode]:
        return [e.node for e in self._heap if not e.node.delete_marker]

    @property
    def physical_size(self) -> int:
        return len(self._heap)

    @property
    def logical_size(self) -> int:
        return len(self._heap) - self.trie.num_marked

    def __len__(self) -> int:
        return self.logical_size
