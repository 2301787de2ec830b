"""
The objective, its lower bounds and the search-space estimators.

Mistakes are always integer counts.  Real-valued quantities are formed from
counts at the point of use (count/N + lambda*K) and never accumulated across
prefix levels.  The solver goes one step further and works in integer "ticks"
through ObjectiveScale, so that every comparison it makes is exact.

Majority ties predict label 1.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Tuple, Union

from .bitvector import BitVector

Real = Union[int, float, Fraction]


def as_fraction(value: Union[Real, str]) -> Fraction:
    """Exact rational for a number, reading floats by their shortest decimal repr (0.01 -> 1/100)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Expected a finite number, got {value}")
        return Fraction(repr(value))
    return Fraction(value)


class ObjectiveScale:
    """
    Integer arithmetic for one (lambda, N) pair.

    With lambda = p/q, an objective m/N + lambda*K equals (m*q + K*p*N) / (q*N), so
    the numerator, counted in "ticks", is an exact integer.
    """

    def __init__(self, lam: Union[Real, str], n: int) -> None:
        self.lam = as_fraction(lam)
        if self.lam < 0:
            raise ValueError(f"Regularization must be non-negative, got {self.lam}")
        if n <= 0:
            raise ValueError("At least one sample is needed")
        self.n = n
        self.mistake_ticks = self.lam.denominator
        self.penalty = self.lam.numerator * n
        self.ticks_per_unit = self.lam.denominator * n

    def ticks(self, mistakes: int, length: int) -> int:
        return mistakes * self.mistake_ticks + length * self.penalty

    def to_real(self, ticks: int) -> float:
        return ticks / self.ticks_per_unit

    def to_exact(self, ticks: int) -> Fraction:
        return Fraction(ticks, self.ticks_per_unit)

    def support_prunes(self, count: int) -> bool:
        """count/N < lambda, i.e. a rule this small cannot pay for its own penalty."""
        return count * self.mistake_ticks < self.penalty

    def lower_bound_ticks(self, prefix_mistakes: int, length: int) -> int:
        return self.ticks(prefix_mistakes, length)

    def objective_ticks(self, prefix_mistakes: int, default_mistakes: int, length: int) -> int:
        return self.ticks(prefix_mistakes + default_mistakes, length)

    def equiv_points_ticks(self, uncaptured: BitVector, minority_mask: BitVector) -> int:
        """Mistakes the default rule cannot avoid: uncaptured samples outside their class majority."""
        return (uncaptured & minority_mask).popcount() * self.mistake_ticks

    def curiosity(self, bound_ticks: int, captured_count: int) -> float:
        if captured_count == 0:
            raise ValueError("Curiosity is undefined for a prefix that captures nothing")
        return bound_ticks * self.n / (captured_count * self.ticks_per_unit)


@dataclass(frozen=True)
class PrefixStats:
    """What a prefix contributes to the objective, independent of its default rule."""

    length: int
    prefix_mistakes: int
    captured: BitVector

    @property
    def not_captured_count(self) -> int:
        return self.captured.length - self.captured.popcount()


@dataclass(frozen=True)
class ObjectiveValue:
    mistakes: int
    length: int
    value: Real


class ChildEvaluation(NamedTuple):
    captured: BitVector
    mistakes: int
    prediction: int
    captured_count: int


def majority(count: int, ones: int) -> Tuple[int, int]:
    """(prediction, mistakes) for `count` samples of which `ones` carry label 1; ties predict 1."""
    if 2 * ones >= count:
        return 1, count - ones
    return 0, ones


def objective(prefix_stats: PrefixStats, default_mistakes: int, lam: Real, n: int) -> ObjectiveValue:
    if default_mistakes > prefix_stats.not_captured_count:
        raise ValueError("The default rule cannot misclassify more samples than it sees")
    scale = ObjectiveScale(lam, n)
    ticks = scale.objective_ticks(prefix_stats.prefix_mistakes, default_mistakes, prefix_stats.length)
    return ObjectiveValue(prefix_stats.prefix_mistakes + default_mistakes, prefix_stats.length, scale.to_real(ticks))


def lower_bound(prefix_stats: PrefixStats, lam: Real, n: int) -> float:
    scale = ObjectiveScale(lam, n)
    return scale.to_real(scale.lower_bound_ticks(prefix_stats.prefix_mistakes, prefix_stats.length))


def incremental_child_mistakes(
    parent_uncaptured: BitVector, antecedent_captures: BitVector, labels: BitVector
) -> ChildEvaluation:
    """Evaluate the rule appended to a prefix, on the samples the prefix has not yet captured."""
    captured = parent_uncaptured & antecedent_captures
    count = captured.popcount()
    prediction, mistakes = majority(count, (captured & labels).popcount())
    return ChildEvaluation(captured, mistakes, prediction, count)


def incremental_default(
    parent_uncaptured: BitVector, captured_in_context: BitVector, labels: BitVector
) -> Tuple[int, int]:
    """(default_mistakes, default_prediction) over what neither the parent nor the new rule captures."""
    remainder = parent_uncaptured.andnot(captured_in_context)
    prediction, mistakes = majority(remainder.popcount(), (remainder & labels).popcount())
    return mistakes, prediction


def equiv_points_default_bound(uncaptured: BitVector, minority_mask: BitVector, n: int) -> float:
    scale = ObjectiveScale(0, n)
    return scale.to_real(scale.equiv_points_ticks(uncaptured, minority_mask))


def lookahead_prunes(lower_bound: Real, lam: Real, incumbent: Real) -> bool:
    """True when no strict extension of the prefix can beat the incumbent."""
    if any(isinstance(x, float) for x in (lower_bound, lam, incumbent)):
        lower_bound, lam, incumbent = as_fraction(lower_bound), as_fraction(lam), as_fraction(incumbent)
    return lower_bound + lam >= incumbent


def max_prefix_length(incumbent: Real, lam: Real, m: int) -> int:
    lam = as_fraction(lam)
    if lam == 0:
        return m
    return min(math.floor(as_fraction(incumbent) / lam), m)


@lru_cache(maxsize=None)
def partial_permutations(m: int, f: int) -> int:
    """sum_{k=0}^{f} m!/(m-k)!: the number of ordered extensions of length at most f."""
    total = 0
    term = 1
    for k in range(f + 1):
        total += term
        term *= m - k
    return total


def remaining_search_space(
    incumbent: Real, queue_snapshot: Iterable[Tuple[int, Real]], lam: Real, m: int
) -> int:
    """
    Upper bound on the prefix evaluations still to come, from the lengths and
    lower bounds of the prefixes in the queue.  Entries whose bound already
    reaches the incumbent contribute nothing.

    With lambda = 0 the per-entry horizon falls back to M - L.
    """
    incumbent = as_fraction(incumbent)
    lam = as_fraction(lam)
    horizons: Counter = Counter()
    for length, bound in queue_snapshot:
        bound = as_fraction(bound)
        if bound >= incumbent:
            continue
        f = m - length if lam == 0 else min(math.floor((incumbent - bound) / lam), m - length)
        horizons[(m - length, f)] += 1
    return sum(count * partial_permutations(free, f) for (free, f), count in horizons.items())


def coarse_remaining_search_space(incumbent: Real, queue_lengths: Iterable[int], lam: Real, m: int) -> int:
    """Like remaining_search_space, but using only the length of each queued prefix."""
    k = max_prefix_length(incumbent, lam, m)
    by_length = Counter(queue_lengths)
    return sum(
        count * partial_permutations(m - j, k - j) for j, count in by_length.items() if j <= k
    )


def naive_total_evaluations(m: int, k_max: int) -> int:
    if not 0 <= k_max <= m:
        raise ValueError(f"k_max must lie in [0, {m}]")
    return partial_permutations(m, k_max)


def symmetry_aware_total(m: int, k_max: int) -> int:
    """1 + sum_{k=1}^{K} M!/((M-k)!(k-1)!), which is 1 + sum k*C(M, k)."""
    if not 0 <= k_max <= m:
        raise ValueError(f"k_max must lie in [0, {m}]")
    return 1 + sum(k * math.comb(m, k) for k in range(1, k_max + 1))


def curiosity(prefix_stats: PrefixStats, lam: Real, n: int) -> float:
    """Lower bound divided by the prefix's normalized support."""
    scale = ObjectiveScale(lam, n)
    bound = scale.lower_bound_ticks(prefix_stats.prefix_mistakes, prefix_stats.length)
    return scale.curiosity(bound, prefix_stats.captured.popcount())


def floor_log10(value: int) -> int:
    """floor(log10(value)) for a positive int of any size, without a decimal conversion."""
    if value <= 0:
        raise ValueError(f"Expected a positive integer, got {value}")
    k = (value.bit_length() - 1) * 30103 // 100000
    while 10 ** (k + 1) <= value:
        k += 1
    while 10 ** k > value:
        k -= 1
    return k
