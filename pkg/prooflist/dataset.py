"""Training data: categorical tables, mined antecedents and the labelled dataset the solver consumes.

Everything here is built once and then treated as read-only.  Tables are pandas
DataFrames of strings with a 0/1 integer label column; antecedents carry their
captures as BitVectors over the table's rows.
"""
from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .bitvector import BitVector
from .bounds import as_fraction
import prooflist.errors as errors

log = logging.getLogger(__name__)

# Cell values accepted as binary labels or indicator flags
BOOLEAN_VALUES = {
    "0": 0, "1": 1,
    "0.0": 0, "1.0": 1,
    "false": 0, "true": 1,
    "no": 0, "yes": 1,
}

_LINE_NUMBER = re.compile(r"line (\d+)")


@dataclass
class CategoricalTable:
    """N records of named categorical attributes plus a 0/1 label column."""

    frame: pd.DataFrame
    label_column: str
    dropped_rows: int = 0

    @property
    def attributes(self) -> List[str]:
        return [c for c in self.frame.columns if c != self.label_column]

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    def labels(self) -> BitVector:
        return BitVector.from_numpy(self.frame[self.label_column].to_numpy() == 1)

    def take(self, indices: Union[Sequence[int], np.ndarray]) -> CategoricalTable:
        return CategoricalTable(
            self.frame.iloc[np.asarray(indices, dtype=int)].reset_index(drop=True),
            self.label_column,
        )


class Clause(NamedTuple):
    """One test on one attribute: attribute = value, an indicator flag, or a negation of either."""

    attribute: str
    value: str
    negated: bool = False
    indicator: bool = False

    @property
    def name(self) -> str:
        text = self.attribute if self.indicator else f"{self.attribute}={self.value}"
        return f"NOT {text}" if self.negated else text

    @property
    def token(self) -> str:
        text = self.attribute if self.indicator else f"{self.attribute}={self.value}"
        text = "-".join(text.split())
        return f"not-{text}" if self.negated else text

    def evaluate(self, frame: pd.DataFrame) -> np.ndarray:
        column = frame[self.attribute]
        if self.indicator:
            hits = column.str.lower().map(BOOLEAN_VALUES).to_numpy() == 1
        else:
            hits = (column == self.value).to_numpy()
        return ~hits if self.negated else hits


@dataclass(frozen=True)
class Antecedent:
    """A Boolean predicate over the features, with its precomputed captures."""

    id: int
    name: str
    captures: BitVector
    clauses: Tuple[Clause, ...] = ()
    token: str = ""

    @property
    def clause_count(self) -> int:
        return max(1, len(self.clauses))

    @property
    def negated(self) -> bool:
        return any(c.negated for c in self.clauses)

    @property
    def support(self) -> int:
        return self.captures.popcount()


def antecedent_from_clauses(antecedent_id: int, clauses: Sequence[Clause], captures: BitVector) -> Antecedent:
    return Antecedent(
        antecedent_id,
        " AND ".join(c.name for c in clauses),
        captures,
        tuple(clauses),
        "{" + ",".join(c.token for c in clauses) + "}",
    )


class AntecedentSet:
    """Antecedents with dense ids 0..M-1 over one set of N samples."""

    def __init__(self, antecedents: Sequence[Antecedent], n_samples: int) -> None:
        self.antecedents = list(antecedents)
        self.n_samples = n_samples
        self._by_token: Dict[str, Antecedent] = {}

        for i, a in enumerate(self.antecedents):
            if a.id != i:
                raise errors.InvariantError(f"Antecedent ids must be dense: found id {a.id} at position {i}")
            if a.captures.length != n_samples:
                raise errors.InvariantError(
                    f"Antecedent '{a.name}' covers {a.captures.length} samples, expected {n_samples}"
                )
            if a.token in self._by_token:
                log.warning("Duplicate antecedent token: %s", a.token)
            self._by_token[a.token] = a

    def by_token(self, token: str) -> Optional[Antecedent]:
        return self._by_token.get(token)

    def evaluate_on(self, table: CategoricalTable) -> AntecedentSet:
        """Recompute the same antecedents, with the same ids, over another table's rows."""
        rebuilt = []
        for a in self.antecedents:
            if not a.clauses:
                raise errors.SchemaError(f"Antecedent '{a.name}' has no clauses and cannot be re-evaluated")
            hits = np.ones(table.n_rows, dtype=bool)
            for clause in a.clauses:
                hits &= clause.evaluate(table.frame)
            rebuilt.append(antecedent_from_clauses(a.id, a.clauses, BitVector.from_numpy(hits)))
        return AntecedentSet(rebuilt, table.n_rows)

    def __len__(self) -> int:
        return len(self.antecedents)

    def __getitem__(self, index: int) -> Antecedent:
        return self.antecedents[index]

    def __iter__(self) -> Iterator[Antecedent]:
        return iter(self.antecedents)


@dataclass
class LabeledDataset:
    """What the solver reads: labels, antecedent captures and the equivalent-points minority mask."""

    n_samples: int
    labels: BitVector
    antecedents: AntecedentSet
    minority_mask: BitVector
    lambda_min: Optional[Fraction] = field(default=None)

    def __post_init__(self) -> None:
        if self.labels.length != self.n_samples or self.minority_mask.length != self.n_samples:
            raise errors.InvariantError("Label and minority vectors must cover every sample")
        if self.antecedents.n_samples != self.n_samples:
            raise errors.InvariantError("Antecedents were computed over a different number of samples")

    @classmethod
    def from_antecedents(
        cls,
        antecedents: AntecedentSet,
        labels: BitVector,
        minority_mask: Optional[BitVector] = None,
        lambda_min: Optional[Union[float, Fraction]] = None,
    ) -> LabeledDataset:
        if minority_mask is None:
            minority_mask = compute_minority_mask(antecedents, labels)
        return cls(
            labels.length,
            labels,
            antecedents,
            minority_mask,
            None if lambda_min is None else as_fraction(lambda_min),
        )

    @property
    def n_antecedents(self) -> int:
        return len(self.antecedents)


@dataclass
class Fold:
    index: int
    train: CategoricalTable
    test: CategoricalTable


def load_categorical_csv(path: str, label_column: str) -> CategoricalTable:
    """Read a headed CSV of categorical values, dropping (and reporting) rows with missing cells.

    The label column must hold two values drawn from 0/1, false/true or no/yes.
    """
    log.debug("Reading categorical table from %s", path)
    try:
        frame = pd.read_csv(path, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise errors.ParseError("file is empty, a header row is required", line=1) from None
    except pd.errors.ParserError as e:
        match = _LINE_NUMBER.search(str(e))
        raise errors.ParseError(str(e), line=int(match.group(1)) if match else None) from None

    if label_column not in frame.columns:
        raise errors.SchemaError(f"Label column '{label_column}' not found in {list(frame.columns)}")

    frame = frame.astype("string").apply(lambda c: c.str.strip()).replace("", pd.NA)
    before = len(frame)
    frame = frame.dropna().astype(object).reset_index(drop=True)
    dropped = before - len(frame)
    if dropped:
        log.warning("Dropped %d of %d rows with missing values from %s", dropped, before, path)

    labels = frame[label_column].str.lower().map(BOOLEAN_VALUES)
    if labels.isna().any():
        found = sorted(frame[label_column].unique())
        raise errors.SchemaError(f"Label column '{label_column}' is not binary: found values {found}")
    frame[label_column] = labels.astype(int)

    return CategoricalTable(frame, label_column, dropped)


def bin_labels(edges: Sequence[int]) -> List[str]:
    """Category names for integer bins [e_0, e_1), ..., [e_k, inf)."""
    names = []
    for low, high in zip(edges[:-1], edges[1:]):
        names.append(f"{low}" if high - 1 == low else f"{low}-{high - 1}")
    names.append(f">{edges[-1] - 1}")
    return names


def discretize(table: CategoricalTable, column: str, edges: Sequence[int]) -> CategoricalTable:
    """Replace an integer-valued column by user-supplied bins; rows below the first edge are dropped."""
    edges = [int(e) for e in edges]
    if len(edges) == 0 or any(b <= a for a, b in zip(edges[:-1], edges[1:])):
        raise ValueError(f"Bin edges for '{column}' must be strictly increasing: {edges}")
    if column not in table.frame.columns:
        raise errors.SchemaError(f"Cannot bin unknown column '{column}'")

    frame = table.frame.copy()
    numeric = pd.to_numeric(frame[column], errors="coerce")
    binned = pd.cut(numeric, bins=edges + [np.inf], right=False, labels=bin_labels(edges))
    frame[column] = binned.astype(object)

    before = len(frame)
    frame = frame.dropna(subset=[column]).reset_index(drop=True)
    frame[column] = frame[column].astype(str)
    dropped = before - len(frame)
    if dropped:
        log.warning("Dropped %d rows whose '%s' value falls outside the bins", dropped, column)

    return CategoricalTable(frame, table.label_column, table.dropped_rows + dropped)


def select_columns(table: CategoricalTable, columns: Sequence[str]) -> CategoricalTable:
    missing = [c for c in columns if c not in table.frame.columns]
    if missing:
        raise errors.SchemaError(f"Unknown column(s): {missing}")
    keep = [c for c in columns if c != table.label_column] + [table.label_column]
    return CategoricalTable(table.frame[keep].copy(), table.label_column, table.dropped_rows)


def mine_antecedents(
    table: CategoricalTable,
    max_clauses: int = 1,
    include_negations: bool = False,
    lambda_min: Union[float, Fraction] = 0,
    negate_columns: Optional[Sequence[str]] = None,
    indicator_columns: Sequence[str] = (),
) -> AntecedentSet:
    """
    Enumerate single-clause antecedents (attribute = value, or the set flag of an
    indicator column), optional negations of single clauses, and, when
    max_clauses is 2, conjunctions of two clauses over distinct attributes.

    Antecedents whose normalized support lies outside [lambda_min, 1 - lambda_min]
    are dropped, as are antecedents capturing nothing.
    """
    if max_clauses not in (1, 2):
        raise ValueError(f"max_clauses must be 1 or 2, got {max_clauses}")
    lambda_min = as_fraction(lambda_min)
    if not 0 <= lambda_min < Fraction(1, 2):
        raise ValueError(f"lambda_min must lie in [0, 0.5), got {lambda_min}")
    unknown = [c for c in list(indicator_columns) + list(negate_columns or []) if c not in table.attributes]
    if unknown:
        raise errors.SchemaError(f"Unknown column(s): {unknown}")

    frame = table.frame
    n = table.n_rows
    indicators = set(indicator_columns)

    singles: List[Tuple[Clause, np.ndarray]] = []
    for attribute in table.attributes:
        if attribute in indicators:
            flags = frame[attribute].str.lower().map(BOOLEAN_VALUES)
            if flags.isna().any():
                raise errors.SchemaError(f"Indicator column '{attribute}' holds non-binary values")
            clauses = [Clause(attribute, "1", indicator=True)]
        else:
            clauses = [Clause(attribute, value) for value in sorted(frame[attribute].unique())]
        singles.extend((c, c.evaluate(frame)) for c in clauses)

    candidates: List[Tuple[Tuple[Clause, ...], np.ndarray]] = [((c,), hits) for c, hits in singles]

    if include_negations:
        negate = set(table.attributes if negate_columns is None else negate_columns)
        candidates.extend(((c._replace(negated=True),), ~hits) for c, hits in singles if c.attribute in negate)

    if max_clauses == 2:
        for (a, hits_a), (b, hits_b) in itertools.combinations(singles, 2):
            if a.attribute != b.attribute:
                candidates.append(((a, b), hits_a & hits_b))

    antecedents = []
    rejected = 0
    for clauses, hits in candidates:
        support = int(hits.sum())
        if support == 0 or Fraction(support, n) < lambda_min or Fraction(support, n) > 1 - lambda_min:
            log.debug("Rejecting %s with support %d/%d", clauses, support, n)
            rejected += 1
            continue
        antecedents.append(antecedent_from_clauses(len(antecedents), clauses, BitVector.from_numpy(hits)))

    log.info("Mined %d antecedents from %d candidates (%d outside the support range)",
             len(antecedents), len(candidates), rejected)
    if not antecedents:
        raise errors.EmptyModelError(f"No antecedent survives the support filter at lambda_min={lambda_min}")

    return AntecedentSet(antecedents, n)


def compute_minority_mask(antecedents: AntecedentSet, labels: BitVector) -> BitVector:
    """
    Mark the samples that carry the minority label of their equivalence class.

    Samples are equivalent when every antecedent captures them alike.  When a
    class is split exactly in half, its label-1 samples are marked.
    """
    n = labels.length
    if n == 0:
        return BitVector.zeros(0)

    if len(antecedents) == 0:
        groups = np.zeros(n, dtype=int)
    else:
        signatures = np.packbits(np.column_stack([a.captures.to_numpy() for a in antecedents]), axis=1)
        _, groups = np.unique(signatures, axis=0, return_inverse=True)
        groups = np.asarray(groups).ravel()

    y = labels.to_numpy()
    sizes = np.bincount(groups)
    ones = np.bincount(groups[y], minlength=len(sizes))
    minority_is_one = 2 * ones <= sizes

    return BitVector.from_numpy(np.where(minority_is_one[groups], y, ~y))


def resample_minority_class(table: CategoricalTable, rng: np.random.Generator) -> CategoricalTable:
    """Upsample the smaller label class with replacement until both classes are the same size."""
    y = table.frame[table.label_column].to_numpy()
    ones = int(y.sum())
    zeros = len(y) - ones
    if ones == zeros or ones == 0 or zeros == 0:
        return table

    minority = 1 if ones < zeros else 0
    extra = rng.choice(np.flatnonzero(y == minority), size=abs(ones - zeros), replace=True)
    return table.take(np.concatenate([np.arange(len(y)), extra]))


def split_folds(
    table: CategoricalTable, k: int, seed: int, resample_minority: bool = False
) -> List[Fold]:
    """Seeded k-fold split; only training folds are ever resampled."""
    if k < 2:
        raise ValueError(f"At least two folds are needed, got k={k}")
    if k > table.n_rows:
        raise ValueError(f"Cannot split {table.n_rows} rows into {k} folds")

    rng = np.random.default_rng(seed)
    parts = np.array_split(rng.permutation(table.n_rows), k)

    folds = []
    for i, test_index in enumerate(parts):
        train_index = np.sort(np.concatenate(parts[:i] + parts[i + 1:]))
        train = table.take(train_index)
        if resample_minority:
            train = resample_minority_class(train, rng)
        folds.append(Fold(i, train, table.take(np.sort(test_index))))
        log.debug("Fold %d: %d training rows, %d test rows", i, train.n_rows, len(test_index))

    return folds
