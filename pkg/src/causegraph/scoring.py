"""Gold/prediction files and classification scores."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence

logger = logging.getLogger(__name__)

__all__ = [
    "DuplicateItem",
    "LABEL_SETS",
    "MISSING",
    "canonical_label",
    "extract_answer",
    "Prediction",
    "PredictionFile",
    "read_jsonl",
    "read_predictions",
    "read_gold",
    "ClassScore",
    "ClassificationReport",
    "score_classification",
    "correctness",
]

LABEL_SETS = {
    "corri": ("positive", "negative"),
    "ccr-membership": ("yes", "no"),
    "ccr-position": ("start", "middle", "end", "none"),
}
POSITIVE_CLASS = {"corri": "positive", "ccr-membership": "yes"}
MISSING = "__missing__"

# the alternative CorrI phrasings map onto correlation polarity
_SYNONYMS = {
    "same": "positive",
    "increase": "positive",
    "opposite": "negative",
    "decrease": "negative",
}
_ANSWER = re.compile(r"<answer>\s*(.*?)\s*</answer>", re.I | re.S)


class DuplicateItem(ValueError):
    pass


def extract_answer(text: str) -> Optional[str]:
    """Content of the last ``<Answer>...</Answer>`` span, if any."""
    found = _ANSWER.findall(text or "")
    return found[-1] if found else None


def canonical_label(raw: str, task: Optional[str] = None, extract: bool = False) -> str:
    """Case-fold and map synonyms; labels outside the task's set are kept as-is."""
    text = raw or ""
    if extract:
        inner = extract_answer(text)
        if inner is not None:
            text = inner
    label = text.strip().strip(".").strip().casefold()
    label = _SYNONYMS.get(label, label)
    if task is not None and label not in LABEL_SETS[task]:
        logger.debug("label %r outside %s label set", raw, task)
    return label


@dataclass(frozen=True)
class Prediction:
    item_id: str
    label: str


@dataclass(frozen=True)
class PredictionFile:
    predictions: tuple
    task: str = ""
    variant: str = ""
    model: str = ""

    def as_dict(self) -> Dict[str, str]:
        out: Dict[str, str] = {}
        for p in self.predictions:
            if p.item_id in out:
                raise DuplicateItem(f"item {p.item_id!r} predicted more than once")
            out[p.item_id] = p.label
        return out


def read_jsonl(path) -> List[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{n}: {exc.msg}") from exc
    return out


def read_predictions(path, task: Optional[str] = None, extract: bool = False, **meta) -> PredictionFile:
    preds = []
    for obj in read_jsonl(path):
        if "item_id" not in obj or "label" not in obj:
            raise ValueError(f"{path}: prediction lines need item_id and label")
        preds.append(Prediction(str(obj["item_id"]), canonical_label(str(obj["label"]), task, extract)))
    pf = PredictionFile(tuple(preds), task or "", **meta)
    pf.as_dict()  # surface duplicates early
    return pf


def read_gold(path) -> Dict[str, str]:
    gold: Dict[str, str] = {}
    for obj in read_jsonl(path):
        iid = str(obj["item_id"])
        if iid in gold:
            raise DuplicateItem(f"gold item {iid!r} appears more than once")
        gold[iid] = canonical_label(str(obj["label"]))
    return gold


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self):
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "support": self.support}


@dataclass(frozen=True)
class ClassificationReport:
    per_class: Dict[str, ClassScore]
    macro: ClassScore
    accuracy: float
    n: int
    missing: int
    positive: Optional[ClassScore] = None
    positive_class: Optional[str] = None

    def to_dict(self):
        out = {
            "per_class": {k: v.to_dict() for k, v in self.per_class.items()},
            "macro": self.macro.to_dict(),
            "accuracy": self.accuracy,
            "n": self.n,
            "missing": self.missing,
        }
        if self.positive is not None:
            out["positive"] = dict(self.positive.to_dict(), label=self.positive_class)
        return out


def _div(a: float, b: float) -> float:
    return a / b if b else 0.0


def score_classification(preds, gold: Mapping[str, str], labels: Optional[Sequence[str]] = None,
                         task: Optional[str] = None, default: str = MISSING) -> ClassificationReport:
    """Per-class precision/recall/F1, macro averages and accuracy.

    ``preds`` is a PredictionFile or a mapping item_id -> label. Gold items
    without a prediction get ``default``, which is wrong for every class
    unless it names one. Predictions for unknown items are ignored.
    """
    pmap = preds.as_dict() if isinstance(preds, PredictionFile) else dict(preds)
    if labels is None:
        labels = LABEL_SETS[task] if task else sorted(set(gold.values()))
    labels = list(labels)
    extra = set(pmap) - set(gold)
    if extra:
        logger.warning("%d predictions for items not in gold ignored", len(extra))
    tp = {c: 0 for c in labels}
    fp = {c: 0 for c in labels}
    fn = {c: 0 for c in labels}
    support = {c: 0 for c in labels}
    missing = correct = 0
    for iid, g in gold.items():
        p = pmap.get(iid)
        if p is None:
            missing += 1
            p = default
        if g not in support:
            raise ValueError(f"gold label {g!r} of {iid!r} outside label set {labels}")
        support[g] += 1
        if p == g:
            tp[g] += 1
            correct += 1
        else:
            fn[g] += 1
            if p in fp:
                fp[p] += 1
    per_class = {}
    for c in labels:
        pr = _div(tp[c], tp[c] + fp[c])
        rc = _div(tp[c], tp[c] + fn[c])
        per_class[c] = ClassScore(pr, rc, _div(2 * pr * rc, pr + rc), support[c])
    k = len(labels)
    macro = ClassScore(
        sum(s.precision for s in per_class.values()) / k,
        sum(s.recall for s in per_class.values()) / k,
        sum(s.f1 for s in per_class.values()) / k,
        sum(support.values()),
    )
    pos_label = POSITIVE_CLASS.get(task) if task else (labels[0] if k == 2 else None)
    return ClassificationReport(
        per_class, macro, _div(correct, len(gold)), len(gold), missing,
        per_class.get(pos_label) if pos_label else None, pos_label,
    )


def correctness(preds, gold: Mapping[str, str]) -> Dict[str, bool]:
    """item_id -> whether the prediction matches gold (missing counts as wrong)."""
    pmap = preds.as_dict() if isinstance(preds, PredictionFile) else dict(preds)
    return {iid: pmap.get(iid) == g for iid, g in gold.items()}
