"""
Readers and writers for the on-disk formats.

Rule files hold one antecedent per line, `{token} b_1 b_2 ... b_N`; label files
hold the two lines `{label=0} ...` and `{label=1} ...`; a minority file holds
one `{minority} ...` line.  Models are written as readable if/else-if text
followed by a single machine-readable line.
"""
from __future__ import annotations

import csv
import logging
import platform
import re
from typing import IO, Iterable, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from .bitvector import BitVector
from .dataset import Antecedent, AntecedentSet, Clause, LabeledDataset, antecedent_from_clauses
from .rulelist import RuleList, parse_model, resolve_model
import prooflist.errors as errors

log = logging.getLogger(__name__)

LABEL_TOKENS = ("{label=0}", "{label=1}")
MINORITY_TOKEN = "{minority}"

TRACE_COLUMNS = [
    "elapsed_s",
    "incumbent_objective",
    "popped_lower_bound",
    "incumbent_length",
    "logical_queue",
    "physical_queue",
    "trie_nodes",
    "log10_remaining",
]

_TOKEN = re.compile(r"^\{[^{}\s]*\}$")


def clauses_from_token(token: str) -> Tuple[Clause, ...]:
    """Recover clauses from `{a=x,not-b=y,flag}`; `-` stands for the spaces a name had."""
    clauses = []
    for part in token[1:-1].split(","):
        if not part:
            continue
        negated = part.startswith("not-")
        if negated:
            part = part[len("not-"):]
        attribute, sep, value = part.partition("=")
        clauses.append(Clause(attribute, value, negated=negated, indicator=not sep))
    return tuple(clauses)


def _read_vector_lines(path: str) -> List[Tuple[int, str, BitVector]]:
    """(line number, token, bits) for every non-blank line; all lines must have the same length."""
    rows = []
    with open(path) as fin:
        for line_number, line in enumerate(fin, start=1):
            fields = line.split()
            if not fields:
                continue
            token = fields[0]
            if not _TOKEN.match(token):
                raise errors.FormatError(f"expected a '{{...}}' token, found '{token}'", path, line_number)
            try:
                bits = BitVector.from_tokens(fields[1:])
            except ValueError as e:
                raise errors.FormatError(str(e), path, line_number) from None
            if rows and bits.length != rows[0][2].length:
                raise errors.FormatError(
                    f"{bits.length} samples, but line {rows[0][0]} has {rows[0][2].length}", path, line_number
                )
            rows.append((line_number, token, bits))
    if not rows:
        raise errors.FormatError("file holds no lines", path)
    return rows


def read_rule_file(path: str) -> AntecedentSet:
    rows = _read_vector_lines(path)
    antecedents = []
    for i, (_, token, bits) in enumerate(rows):
        clauses = clauses_from_token(token)
        antecedent = antecedent_from_clauses(i, clauses, bits)
        if antecedent.token != token:
            # Keep the file's own spelling so models written against it resolve
            antecedent = Antecedent(i, antecedent.name or token[1:-1], bits, clauses, token)
        antecedents.append(antecedent)
    log.info("Read %d antecedents over %d samples from %s", len(antecedents), rows[0][2].length, path)
    return AntecedentSet(antecedents, rows[0][2].length)


def read_label_file(path: str) -> BitVector:
    """The label-1 vector; the label-0 line must be its exact complement."""
    rows = _read_vector_lines(path)
    if len(rows) != 2:
        raise errors.FormatError(f"expected 2 label lines, found {len(rows)}", path)
    for (line_number, token, _), expected in zip(rows, LABEL_TOKENS):
        if token != expected:
            raise errors.FormatError(f"expected '{expected}', found '{token}'", path, line_number)
    zeros, ones = rows[0][2], rows[1][2]
    if ~zeros != ones:
        raise errors.FormatError("the two label lines are not complements of each other", path, rows[1][0])
    return ones


def read_minority_file(path: str) -> BitVector:
    rows = _read_vector_lines(path)
    if len(rows) != 1 or rows[0][1] != MINORITY_TOKEN:
        raise errors.FormatError(f"expected a single '{MINORITY_TOKEN}' line", path, rows[0][0])
    return rows[0][2]


def load_dataset(
    rule_path: str,
    label_path: str,
    minority_path: Optional[str] = None,
) -> LabeledDataset:
    """Read the files the solver consumes.  Without a minority file the mask is recomputed."""
    antecedents = read_rule_file(rule_path)
    labels = read_label_file(label_path)
    if labels.length != antecedents.n_samples:
        raise errors.FormatError(
            f"labels cover {labels.length} samples but {rule_path} has {antecedents.n_samples}", label_path, 1
        )
    minority = None
    if minority_path is not None:
        minority = read_minority_file(minority_path)
        if minority.length != labels.length:
            raise errors.FormatError(
                f"minority line covers {minority.length} samples, expected {labels.length}", minority_path, 1
            )
    return LabeledDataset.from_antecedents(antecedents, labels, minority)


def _vector_line(token: str, bits: BitVector) -> str:
    return f"{token} {bits.to_tokens()}\n" if bits.length else f"{token}\n"


def write_rule_file(path: str, antecedents: AntecedentSet) -> None:
    with open(path, "w") as fout:
        for antecedent in antecedents:
            fout.write(_vector_line(antecedent.token, antecedent.captures))


def write_label_file(path: str, labels: BitVector) -> None:
    with open(path, "w") as fout:
        fout.write(_vector_line(LABEL_TOKENS[0], ~labels))
        fout.write(_vector_line(LABEL_TOKENS[1], labels))


def write_minority_file(path: str, minority_mask: BitVector) -> None:
    with open(path, "w") as fout:
        fout.write(_vector_line(MINORITY_TOKEN, minority_mask))


def write_dataset(prefix: str, dataset: LabeledDataset) -> Tuple[str, str, str]:
    """Write `<prefix>.out`, `<prefix>.label` and `<prefix>.minor`, returning their paths."""
    paths = (f"{prefix}.out", f"{prefix}.label", f"{prefix}.minor")
    write_rule_file(paths[0], dataset.antecedents)
    write_label_file(paths[1], dataset.labels)
    write_minority_file(paths[2], dataset.minority_mask)
    return paths


def write_model(path: str, rule_list: RuleList, antecedents: AntecedentSet) -> None:
    with open(path, "w") as fout:
        fout.write(rule_list.to_text(antecedents) + "\n\n")
        fout.write(rule_list.to_line(antecedents) + "\n")


def read_model(path: str, antecedents: AntecedentSet) -> RuleList:
    with open(path) as fin:
        text = fin.read()
    try:
        rules, default = parse_model(text)
    except errors.FormatError as e:
        raise errors.FormatError(str(e), path) from None
    return resolve_model(rules, default, antecedents)


class TraceWriter:
    """Streams trace records into a CSV file, one row per record."""

    def __init__(self, stream: IO[str]) -> None:
        self._writer = csv.DictWriter(stream, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        self._writer.writeheader()
        self._stream = stream

    def write(self, record) -> None:
        row = record._asdict()
        row["elapsed_s"] = f"{record.elapsed_s:.6f}"
        row["incumbent_objective"] = f"{record.incumbent_objective:.10f}"
        row["popped_lower_bound"] = f"{record.popped_lower_bound:.10f}"
        row["log10_remaining"] = "" if record.log10_remaining is None else record.log10_remaining
        self._writer.writerow(row)


def write_trace(path: str, records: Iterable) -> None:
    with open(path, "w", newline="") as fout:
        writer = TraceWriter(fout)
        for record in records:
            writer.write(record)


def software_versions() -> Mapping[str, str]:
    from . import __version__

    return {
        "prooflist_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "pandas_version": pd.__version__,
    }


def write_manifest(path: str, entries: Mapping[str, object]) -> None:
    """A flat `key=value` file; values are written with str(), lists joined by commas."""
    with open(path, "w") as fout:
        for key, value in {**entries, **software_versions()}.items():
            if isinstance(value, (list, tuple, set, frozenset)):
                value = ",".join(str(v) for v in value)
            fout.write(f"{key}={'' if value is None else value}\n")
    log.debug("Wrote manifest %s", path)


def read_manifest(path: str) -> dict:
    entries = {}
    with open(path) as fin:
        for line_number, line in enumerate(fin, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise errors.FormatError("expected key=value", path, line_number)
            entries[key] = value
    return entries
