"""
Exhaustive reference solver for small instances.

Every ordered selection of at most k_cap antecedents is scored directly from
raw capture bits, with no bounds of any kind, so agreement with the
branch-and-bound solver is independent evidence of optimality.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .bounds import as_fraction
from .dataset import LabeledDataset
from .rulelist import RuleList
import prooflist.errors as errors

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


@dataclass
class OracleResult:
    min_objective: Fraction
    witnesses: List[RuleList] = field(default_factory=list)
    evaluated: int = 0

    @property
    def objective(self) -> float:
        return float(self.min_objective)


def default_k_cap(lam: Fraction, m: int) -> int:
    """No rule list longer than 1/(2 lambda) can beat the empty list."""
    if lam == 0:
        return m
    return min(math.floor(1 / (2 * lam)), m)


def enumeration_count(m: int, k_cap: int) -> int:
    return sum(math.perm(m, k) for k in range(k_cap + 1))


def brute_force(
    dataset: LabeledDataset,
    lam: Union[float, Fraction, str],
    k_cap: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
) -> OracleResult:
    lam = as_fraction(lam)
    if lam < 0:
        raise ValueError(f"Regularization must be non-negative, got {lam}")
    m = dataset.n_antecedents
    n = dataset.n_samples
    if k_cap is None:
        k_cap = default_k_cap(lam, m)
    if not 0 <= k_cap <= m:
        raise ValueError(f"k_cap must lie in [0, {m}], got {k_cap}")

    count = enumeration_count(m, k_cap)
    if count > budget:
        raise errors.EnumerationBudgetError(count, budget)
    log.info("Enumerating %d rule lists (M=%d, k_cap=%d)", count, m, k_cap)

    # Objective numerator over the common denominator q*N
    mistake_weight = lam.denominator
    rule_weight = lam.numerator * n
    labels = dataset.labels.bits
    captures = [a.captures.bits for a in dataset.antecedents]

    best_key: Optional[int] = None
    witnesses: List[RuleList] = []
    evaluated = 0

    def visit(prefix: Tuple[int, ...], predictions: Tuple[int, ...], remaining: int, mistakes: int) -> None:
        nonlocal best_key, evaluated
        size = remaining.bit_count()
        ones = (remaining & labels).bit_count()
        default = 1 if 2 * ones >= size else 0
        default_mistakes = size - ones if default else ones

        key = (mistakes + default_mistakes) * mistake_weight + len(prefix) * rule_weight
        evaluated += 1
        if best_key is None or key < best_key:
            best_key = key
            witnesses.clear()
        if key == best_key:
            witnesses.append(RuleList(prefix, predictions, default))

        if len(prefix) == k_cap:
            return
        for j, bits in enumerate(captures):
            if j in prefix:
                continue
            captured = remaining & bits
            size = captured.bit_count()
            ones = (captured & labels).bit_count()
            prediction = 1 if 2 * ones >= size else 0
            rule_mistakes = size - ones if prediction else ones
            visit(prefix + (j,), predictions + (prediction,), remaining & ~bits, mistakes + rule_mistakes)

    visit((), (), (1 << n) - 1, 0)

    return OracleResult(Fraction(best_key, mistake_weight * n), witnesses, evaluated)
