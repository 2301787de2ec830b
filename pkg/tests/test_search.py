import math
import unittest

from prooflist.bounds import ObjectiveScale
from prooflist.search import PrefixQueue, SearchPolicy
from prooflist.trie import PrefixTrie


class PrefixQueueTest(unittest.TestCase):
    def setUp(self) -> None:
        # lambda = 0 over 10 samples: each mistake is one tick, rules are free
        self.trie = PrefixTrie(ObjectiveScale(0, 10))
        self.root = self.trie.insert(())

    def test_bfs_is_fifo_within_a_depth(self):
        queue = PrefixQueue(self.trie, SearchPolicy.BFS)
        a = self.trie.insert((1,), prefix_mistakes=5)
        b = self.trie.insert((2,), prefix_mistakes=1)
        queue.push(a)
        queue.push(b)
        assert queue.pop_live() is a
        assert queue.pop_live() is b

    def test_lower_bound_policy(self):
        queue = PrefixQueue(self.trie, SearchPolicy.LOWER_BOUND)
        worse = self.trie.insert((1,), prefix_mistakes=2)
        better = self.trie.insert((2,), prefix_mistakes=1)
        queue.push(worse)
        queue.push(better)
        self.assertAlmostEqual(better.lower_bound, 0.1)
        assert queue.pop_live() is better

    def test_lower_bound_policy_includes_equivalent_points(self):
        queue = PrefixQueue(self.trie, SearchPolicy.LOWER_BOUND)
        a = self.trie.insert((1,), prefix_mistakes=1, b0_ticks=5)
        b = self.trie.insert((2,), prefix_mistakes=2, b0_ticks=0)
        queue.push(a)
        queue.push(b)
        assert queue.pop_live() is b

    def test_objective_policy(self):
        queue = PrefixQueue(self.trie, SearchPolicy.OBJECTIVE)
        a = self.trie.insert((1,), objective_ticks=4)
        b = self.trie.insert((2,), objective_ticks=3)
        queue.push(a)
        queue.push(b)
        assert queue.pop_live() is b

    def test_dfs(self):
        queue = PrefixQueue(self.trie, SearchPolicy.DFS)
        self.trie.insert((1,))
        shallow = self.trie.insert((1, 2))
        deep = self.trie.insert((1, 2, 3))
        queue.push(shallow)
        queue.push(deep)
        assert queue.pop_live() is deep

    def test_curiosity(self):
        policy = SearchPolicy.CURIOSITY
        assert policy.priority(self.root) == 0.0
        wide = self.trie.insert((1,), prefix_mistakes=1, captured_count=10)
        narrow = self.trie.insert((2,), prefix_mistakes=1, captured_count=5)
        empty = self.trie.insert((3,), prefix_mistakes=0, captured_count=0)
        self.assertAlmostEqual(policy.priority(wide), 0.1)
        self.assertAlmostEqual(policy.priority(narrow), 0.2)
        assert policy.priority(empty) == math.inf

    def test_marked_leaves(self):
        queue = PrefixQueue(self.trie)
        marked = self.trie.insert((1,), prefix_mistakes=0)
        live = self.trie.insert((2,), prefix_mistakes=3)
        queue.push(marked)
        queue.push(live)
        self.trie.delete_subtree((1,))

        assert queue.physical_size == 2
        assert queue.logical_size == queue.physical_size - self.trie.num_marked == 1
        assert queue.snapshot() == [live]
        assert queue.pop_live() is live
        assert queue.physical_size == 0 and queue.logical_size == 0
        assert queue.insertions == 2

    def test_only_marked_leaf(self):
        queue = PrefixQueue(self.trie)
        leaf = self.trie.insert((1,))
        queue.push(leaf)
        self.trie.delete_subtree((1,))
        before = len(self.trie)
        assert queue.pop_live() is None
        assert len(self.trie) == before - 1
