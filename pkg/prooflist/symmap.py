"""
Permutation bookkeeping: of all orderings of one antecedent set, only the one
with the smallest bound is kept in the search.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import prooflist.errors as errors

CanonicalKey = Tuple[int, ...]


def canonical_key(prefix: Sequence[int]) -> CanonicalKey:
    key = tuple(sorted(prefix))
    for a, b in zip(key, key[1:]):
        if a == b:
            raise errors.InvariantError(f"Prefix repeats antecedent {a}: {list(prefix)}")
    return key


@dataclass
class MapEntry:
    best_permutation: Tuple[int, ...]
    best_bound: Union[int, float]


class Decision(enum.Enum):
    INSERT_NEW = "insert_new"
    REPLACED_WORSE = "replaced_worse"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class Outcome:
    decision: Decision
    prior: Optional[Tuple[int, ...]] = None


class SymmetryMap:
    """
    Keyed by the sorted antecedent ids of a prefix.  Bounds must include the
    equivalent-points term; it is the same for every permutation, so comparing
    augmented bounds still compares the prefixes themselves.

    Entries outlive the subtrees they describe.  A stale entry only blocks
    newcomers whose bound is no better than one that was genuinely reached.
    """

    def __init__(self) -> None:
        self.entries: Dict[CanonicalKey, MapEntry] = {}

    def check_and_insert(self, prefix: Sequence[int], bound: Union[int, float]) -> Outcome:
        key = canonical_key(prefix)
        entry = self.entries.get(key)
        if entry is None:
            self.entries[key] = MapEntry(tuple(prefix), bound)
            return Outcome(Decision.INSERT_NEW)
        # Ties keep the permutation that arrived first
        if bound >= entry.best_bound:
            return Outcome(Decision.BLOCKED)
        prior = entry.best_permutation
        entry.best_permutation = tuple(prefix)
        entry.best_bound = bound
        return Outcome(Decision.REPLACED_WORSE, prior)

    def __len__(self) -> int:
        return len(self.entries)
