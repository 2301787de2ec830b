"""Rule lists: prediction, text rendering, the one-line model format and confusion metrics."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, astuple, fields
from typing import List, Tuple

from .bitvector import BitVector
from .dataset import AntecedentSet
import prooflist.errors as errors

LABEL_NAMES = {0: "no", 1: "yes"}

_MODEL_ITEM = re.compile(r"(\{[^}]*\}|default):([01])")


@dataclass(frozen=True)
class RuleList:
    """A prefix of antecedent ids, the label each rule predicts, and the default label."""

    prefix: Tuple[int, ...] = ()
    predictions: Tuple[int, ...] = ()
    default_prediction: int = 1

    def __post_init__(self) -> None:
        if len(self.prefix) != len(self.predictions):
            raise errors.InvariantError("Every rule needs exactly one prediction")

    @property
    def length(self) -> int:
        return len(self.prefix)

    def predict(self, antecedents: AntecedentSet) -> BitVector:
        """Samples predicted as label 1."""
        remaining = BitVector.ones(antecedents.n_samples)
        positive = BitVector.zeros(antecedents.n_samples)
        for antecedent_id, prediction in zip(self.prefix, self.predictions):
            captured = remaining & antecedents[antecedent_id].captures
            if prediction:
                positive = positive | captured
            remaining = remaining.andnot(captured)
        if self.default_prediction:
            positive = positive | remaining
        return positive

    def mistakes(self, antecedents: AntecedentSet, labels: BitVector) -> int:
        predicted = self.predict(antecedents)
        return predicted.andnot(labels).popcount() + labels.andnot(predicted).popcount()

    def to_text(self, antecedents: AntecedentSet) -> str:
        lines = []
        for i, (antecedent_id, prediction) in enumerate(zip(self.prefix, self.predictions)):
            keyword = "if" if i == 0 else "else if"
            lines.append(f"{keyword} ({antecedents[antecedent_id].name}) then predict {LABEL_NAMES[prediction]}")
        default = LABEL_NAMES[self.default_prediction]
        lines.append(f"else predict {default}" if self.prefix else f"predict {default}")
        return "\n".join(lines)

    def to_line(self, antecedents: AntecedentSet) -> str:
        items = [f"{antecedents[i].token}:{p}" for i, p in zip(self.prefix, self.predictions)]
        items.append(f"default:{self.default_prediction}")
        return ",".join(items)


def parse_model(text: str) -> Tuple[List[Tuple[str, int]], int]:
    """Find the machine-readable line of a model file: ([(token, prediction), ...], default)."""
    for line in reversed(text.splitlines()):
        line = line.strip()
        items = _MODEL_ITEM.findall(line)
        if items and ",".join(f"{t}:{p}" for t, p in items) == line and items[-1][0] == "default":
            if any(t == "default" for t, _ in items[:-1]):
                break
            return [(t, int(p)) for t, p in items[:-1]], int(items[-1][1])
    raise errors.FormatError("No 'token:prediction,...,default:prediction' line found in model")


def resolve_model(rules: List[Tuple[str, int]], default: int, antecedents: AntecedentSet) -> RuleList:
    missing = [token for token, _ in rules if antecedents.by_token(token) is None]
    if missing:
        raise errors.UnknownAntecedentError(missing)
    return RuleList(
        tuple(antecedents.by_token(token).id for token, _ in rules),
        tuple(p for _, p in rules),
        default,
    )


def _rate(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else math.nan


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    tpr: float
    fpr: float
    tnr: float
    fnr: float
    tp: int
    fp: int
    tn: int
    fn: int

    @staticmethod
    def csv_header() -> str:
        return ",".join(f.name for f in fields(Metrics))

    def csv_row(self) -> str:
        return ",".join(f"{v:.6f}" if isinstance(v, float) else str(v) for v in astuple(self))


def evaluate(rule_list: RuleList, antecedents: AntecedentSet, labels: BitVector) -> Metrics:
    predicted = rule_list.predict(antecedents)
    tp = (predicted & labels).popcount()
    fp = predicted.andnot(labels).popcount()
    fn = labels.andnot(predicted).popcount()
    tn = labels.length - tp - fp - fn
    return Metrics(
        accuracy=_rate(tp + tn, labels.length),
        tpr=_rate(tp, tp + fn),
        fpr=_rate(fp, fp + tn),
        tnr=_rate(tn, fp + tn),
        fnr=_rate(fn, tp + fn),
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
    )
