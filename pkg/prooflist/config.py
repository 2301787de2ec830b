"""Solver configuration, with defaults read from the packaged default_config.json."""
from __future__ import annotations

import enum
import json
import logging
import os
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, FrozenSet, Iterable, Optional, Union

from .bounds import as_fraction
from .search import SearchPolicy

DEFAULT_CONFIG_FILE = "default_config.json"

log = logging.getLogger(__name__)


class Ablation(enum.Enum):
    """Switches that each disable one bound or data structure."""

    NO_PRIORITY = "no_priority"
    NO_SUPPORT_BOUNDS = "no_support_bounds"
    NO_LOOKAHEAD = "no_lookahead"
    NO_SYMMAP = "no_symmap"
    NO_EQUIV_POINTS = "no_equiv_points"


@dataclass
class SolverConfig:
    regularization: Fraction = Fraction(1, 100)
    policy: SearchPolicy = SearchPolicy.LOWER_BOUND
    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = None
    ablations: FrozenSet[Ablation] = field(default_factory=frozenset)
    verbosity: int = 0
    trace_sample_interval: int = 4096

    def __post_init__(self) -> None:
        self.regularization = as_fraction(self.regularization)
        if self.regularization < 0:
            raise ValueError(f"Regularization must be non-negative, got {self.regularization}")
        self.policy = SearchPolicy(self.policy)
        self.ablations = frozenset(Ablation(a) for a in self.ablations)
        if self.max_nodes is not None and self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("max_seconds must be positive")
        if self.trace_sample_interval < 1:
            raise ValueError("trace_sample_interval must be at least 1")

    def has(self, ablation: Ablation) -> bool:
        return ablation in self.ablations

    @property
    def effective_policy(self) -> SearchPolicy:
        return SearchPolicy.BFS if self.has(Ablation.NO_PRIORITY) else self.policy


def load_config(definition_filename: Optional[str] = None, **overrides: Any) -> SolverConfig:
    """
    Build a SolverConfig from a JSON file (the packaged defaults when no file is
    given), with keyword overrides applied on top.  Overrides set to None are ignored.
    """
    if definition_filename is None:
        definition_filename = os.path.dirname(os.path.realpath(__file__)) + os.sep + DEFAULT_CONFIG_FILE

    log.debug("Reading solver configuration from %s", definition_filename)
    with open(definition_filename) as fin:
        values = json.load(fin)

    known = {f.name for f in fields(SolverConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"Unknown configuration keys in {definition_filename}: {sorted(unknown)}")

    values.update({k: v for k, v in overrides.items() if v is not None})
    return SolverConfig(**values)


def parse_ablations(names: Iterable[Union[str, Ablation]]) -> FrozenSet[Ablation]:
    return frozenset(Ablation(n) for n in names)
