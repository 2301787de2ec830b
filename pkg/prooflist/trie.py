"""Prefix tree caching every prefix still under consideration, with its bounds."""
from __future__ import annotations

import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .bounds import ObjectiveScale
import prooflist.errors as errors

log = logging.getLogger(__name__)


class TrieNode:
    """
    One prefix: the path from the root spells its antecedent ids.

    Bounds are stored as integer ticks of the trie's ObjectiveScale; the float
    properties convert them for reporting and for curiosity.
    """

    __slots__ = (
        "antecedent_id", "depth", "parent", "children", "scale",
        "prefix_mistakes", "bound_ticks", "b0_ticks", "objective_ticks",
        "prediction", "default_prediction", "captured_count",
        "delete_marker", "in_queue", "alive",
    )

    def __init__(
        self,
        antecedent_id: Optional[int],
        parent: Optional[TrieNode],
        scale: ObjectiveScale,
        prefix_mistakes: int = 0,
        b0_ticks: int = 0,
        objective_ticks: int = 0,
        prediction: int = 1,
        default_prediction: int = 1,
        captured_count: int = 0,
    ) -> None:
        self.antecedent_id = antecedent_id
        self.parent = parent
        self.depth = 0 if parent is None else parent.depth + 1
        self.children: Dict[int, TrieNode] = {}
        self.scale = scale
        self.prefix_mistakes = prefix_mistakes
        self.bound_ticks = scale.lower_bound_ticks(prefix_mistakes, self.depth)
        self.b0_ticks = b0_ticks
        self.objective_ticks = objective_ticks
        self.prediction = prediction
        self.default_prediction = default_prediction
        self.captured_count = captured_count
        self.delete_marker = False
        self.in_queue = False
        self.alive = True

    @property
    def lower_bound(self) -> float:
        return self.scale.to_real(self.bound_ticks)

    @property
    def b0(self) -> float:
        return self.scale.to_real(self.b0_ticks)

    @property
    def objective(self) -> float:
        return self.scale.to_real(self.objective_ticks)

    def path(self) -> Tuple[int, ...]:
        ids = []
        node: Optional[TrieNode] = self
        while node is not None and node.parent is not None:
            ids.append(node.antecedent_id)
            node = node.parent
        return tuple(reversed(ids))

    def lineage(self) -> List[TrieNode]:
        """Nodes from the first rule down to this one (the root is excluded)."""
        nodes = []
        node: Optional[TrieNode] = self
        while node is not None and node.parent is not None:
            nodes.append(node)
            node = node.parent
        nodes.reverse()
        return nodes

    def __repr__(self) -> str:
        return f"<TrieNode {list(self.path())} b={self.lower_bound:.6f}>"


class PrefixTrie:
    """
    Owner of all TrieNodes of one solver run.

    Removing a node that a queue entry still points at only sets its
    delete_marker and detaches it; the node is freed when the queue pops it
    (see release).  num_nodes counts inserted nodes that have not been freed,
    so marked nodes count until they are popped.
    """

    def __init__(self, scale: ObjectiveScale, max_nodes: Optional[int] = None) -> None:
        self.scale = scale
        self.max_nodes = max_nodes
        self.root: Optional[TrieNode] = None
        self.num_nodes = 0
        self.num_marked = 0
        self.peak_nodes = 0
        # The node whose children are being evaluated; never pruned for being childless
        self.pinned: Optional[TrieNode] = None

    @property
    def full(self) -> bool:
        return self.max_nodes is not None and self.num_nodes >= self.max_nodes

    def insert(self, path: Sequence[int], **metadata) -> TrieNode:
        """Insert the node for `path`; its parent must already be present."""
        if len(set(path)) != len(path):
            raise errors.InvariantError(f"Prefix repeats an antecedent: {list(path)}")

        if len(path) == 0:
            if self.root is not None:
                raise errors.TrieError("The root is already present")
            self.root = TrieNode(None, None, self.scale, **metadata)
            self._count_insert()
            return self.root

        parent = self.find(path[:-1])
        if parent is None:
            raise errors.TrieError(f"Cannot insert {list(path)}: its parent is not in the trie")
        return self.insert_child(parent, path[-1], **metadata)

    def insert_child(self, parent: TrieNode, antecedent_id: int, **metadata) -> TrieNode:
        if not parent.alive:
            raise errors.TrieError(f"Cannot extend deleted prefix {list(parent.path())}")
        if antecedent_id in parent.children:
            raise errors.TrieError(
                f"Prefix {list(parent.path()) + [antecedent_id]} is already present; delete it first"
            )
        child = TrieNode(antecedent_id, parent, self.scale, **metadata)
        parent.children[antecedent_id] = child
        self._count_insert()
        return child

    def _count_insert(self) -> None:
        self.num_nodes += 1
        if self.num_nodes > self.peak_nodes:
            self.peak_nodes = self.num_nodes

    def find(self, path: Sequence[int]) -> Optional[TrieNode]:
        node = self.root
        for antecedent_id in path:
            if node is None:
                return None
            node = node.children.get(antecedent_id)
        return node

    def _detach(self, node: TrieNode) -> None:
        if node.parent is None:
            if node is self.root:
                self.root = None
        else:
            node.parent.children.pop(node.antecedent_id, None)

    def _remove(self, node: TrieNode) -> int:
        """Remove node and its descendants; queued leaves are marked instead of freed."""
        self._detach(node)
        removed = 0
        stack = [node]
        while stack:
            current = stack.pop()
            current.alive = False
            if current.in_queue:
                current.delete_marker = True
                self.num_marked += 1
            else:
                self.num_nodes -= 1
            stack.extend(current.children.values())
            current.children = {}
            removed += 1
        return removed

    def delete_subtree(self, path: Sequence[int]) -> int:
        """
        Delete the prefix at `path` and everything below it, returning the
        number of nodes in that subtree.  Ancestors left without children are
        pruned as well.  Unknown paths are ignored.
        """
        node = self.find(path)
        if node is None:
            return 0
        parent = node.parent
        removed = self._remove(node)
        if parent is not None:
            self.prune_upwards(parent)
        return removed

    def prune_upwards(self, node: Optional[TrieNode]) -> int:
        """Free node if it has no children and no queue entry, then repeat on its parent."""
        removed = 0
        while (
            node is not None
            and node.alive
            and not node.children
            and not node.in_queue
            and node is not self.pinned
        ):
            parent = node.parent
            removed += self._remove(node)
            node = parent
        return removed

    def garbage_collect(self, threshold: int) -> int:
        """
        Delete every subtree whose root has bound_ticks >= threshold, then every
        interior node left childless.
        """
        if self.root is None:
            return 0

        def sweep(node: TrieNode) -> int:
            if node.bound_ticks >= threshold:
                return self._remove(node)
            removed = 0
            for child in list(node.children.values()):
                removed += sweep(child)
            if not node.children and not node.in_queue and node is not self.pinned:
                removed += self._remove(node)
            return removed

        removed = sweep(self.root)
        log.debug("Garbage collection at %d ticks removed %d nodes (%d remain)", threshold, removed, self.num_nodes)
        return removed

    def release(self, node: TrieNode) -> None:
        """Free a delete-marked leaf that the queue has just popped."""
        if not node.delete_marker:
            raise errors.TrieError(f"Cannot release live node {list(node.path())}")
        self.num_marked -= 1
        self.num_nodes -= 1

    def walk(self) -> Iterator[TrieNode]:
        """Depth-first over reachable nodes, children in ascending antecedent id."""
        if self.root is None:
            return
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children[k] for k in sorted(node.children, reverse=True))

    def audit(self) -> int:
        return sum(1 for _ in self.walk())

    def dump(self) -> str:
        lines = []
        for node in self.walk():
            path = " ".join(str(i) for i in node.path())
            lines.append(
                f"[{path}],{node.depth},{node.lower_bound:.6f},{node.objective:.6f},{int(node.delete_marker)}"
            )
        return "\n".join(lines)

    def __len__(self) -> int:
        return self.num_nodes
