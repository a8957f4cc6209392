"""Confusion-matrix evaluation and class-wise report rendering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus_io import CLASS_NAMES, PROPAGANDA


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: float


@dataclass(frozen=True)
class EvalReport:
    """Rows of ``confusion`` are true classes, columns predicted classes.

    A report averaged over several runs holds a float confusion matrix and
    fractional supports.
    """

    confusion: np.ndarray
    per_class: tuple[ClassScores, ...]
    macro_f1: float
    weighted_f1: float
    positive_f1: float
    positive: int = PROPAGANDA

    @property
    def n_samples(self) -> float:
        return float(self.confusion.sum())

    @property
    def macro_precision(self) -> float:
        return float(np.mean([c.precision for c in self.per_class]))

    @property
    def macro_recall(self) -> float:
        return float(np.mean([c.recall for c in self.per_class]))

    def scalars(self) -> dict[str, float]:
        out = {"macro_f1": self.macro_f1, "weighted_f1": self.weighted_f1, "positive_f1": self.positive_f1}
        for k, c in enumerate(self.per_class):
            out.update({f"precision_{k}": c.precision, f"recall_{k}": c.recall, f"f1_{k}": c.f1, f"support_{k}": c.support})
        return out


def _ratio(num: float, den: float) -> float:
    return float(num) / float(den) if den else 0.0


def report_from_confusion(confusion: np.ndarray, positive: int = PROPAGANDA) -> EvalReport:
    confusion = np.asarray(confusion)
    tp = np.diag(confusion).astype(np.float64)
    predicted = confusion.sum(axis=0).astype(np.float64)
    actual = confusion.sum(axis=1).astype(np.float64)
    per_class = []
    for k in range(confusion.shape[0]):
        p = _ratio(tp[k], predicted[k])
        r = _ratio(tp[k], actual[k])
        per_class.append(ClassScores(p, r, _ratio(2 * p * r, p + r), float(actual[k])))
    f1 = np.array([c.f1 for c in per_class])
    return EvalReport(
        confusion=confusion,
        per_class=tuple(per_class),
        macro_f1=float(f1.mean()),
        weighted_f1=_ratio(float(np.dot(f1, actual)), float(actual.sum())),
        positive_f1=per_class[positive].f1,
        positive=positive,
    )


def evaluate(y_true: Sequence[int], y_pred: Sequence[int], positive: int = PROPAGANDA, n_classes: int | None = None) -> EvalReport:
    """Per-class precision/recall/F1 plus macro, support-weighted and positive-class F1.

    Any 0/0 ratio is taken as 0.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"y_true has {len(y_true)} entries but y_pred has {len(y_pred)}")
    if y_true.size == 0:
        raise ValueError("cannot evaluate an empty prediction set")
    if min(y_true.min(), y_pred.min()) < 0:
        raise ValueError("class indices must be non-negative")
    if n_classes is None:
        n_classes = max(len(CLASS_NAMES), int(max(y_true.max(), y_pred.max())) + 1, positive + 1)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (y_true, y_pred), 1)
    return report_from_confusion(confusion, positive)


def mean_report(reports: Sequence[EvalReport]) -> EvalReport:
    """Element-wise arithmetic mean of every scalar in ``reports``."""
    if not reports:
        raise ValueError("need at least one report")
    n = len(reports)
    per_class = tuple(
        ClassScores(
            *(sum(getattr(r.per_class[k], f) for r in reports) / n for f in ("precision", "recall", "f1", "support"))
        )
        for k in range(len(reports[0].per_class))
    )
    return EvalReport(
        confusion=sum(r.confusion.astype(np.float64) for r in reports) / n,
        per_class=per_class,
        macro_f1=sum(r.macro_f1 for r in reports) / n,
        weighted_f1=sum(r.weighted_f1 for r in reports) / n,
        positive_f1=sum(r.positive_f1 for r in reports) / n,
        positive=reports[0].positive,
    )


def _name(k: int, class_names: Sequence[str]) -> str:
    return class_names[k] if k < len(class_names) else f"class-{k}"


def _support(x: float) -> str:
    return f"{int(x)}" if float(x).is_integer() else f"{x:.2f}"


def format_report(r: EvalReport, class_names: Sequence[str] = CLASS_NAMES) -> str:
    rows = [(_name(k, class_names), c.precision, c.recall, c.f1, c.support) for k, c in enumerate(r.per_class)]
    pos_label = f"positive ({_name(r.positive, class_names)})"
    width = max(16, len(pos_label), *(len(name) for name, *_ in rows)) + 2
    header = f"{'':<{width}}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"
    lines = [header]
    for name, p, rec, f1, sup in rows:
        lines.append(f"{name:<{width}}{p:>10.4f}{rec:>10.4f}{f1:>10.4f}{_support(sup):>10}")
    lines.append("")
    total = _support(r.n_samples)
    lines.append(f"{'macro avg':<{width}}{r.macro_precision:>10.4f}{r.macro_recall:>10.4f}{r.macro_f1:>10.4f}{total:>10}")
    lines.append(f"{'weighted avg':<{width}}{'':>10}{'':>10}{r.weighted_f1:>10.4f}{total:>10}")
    pos = r.per_class[r.positive]
    lines.append(
        f"{pos_label:<{width}}"
        f"{pos.precision:>10.4f}{pos.recall:>10.4f}{r.positive_f1:>10.4f}{_support(pos.support):>10}"
    )
    return "\n".join(lines) + "\n"


CSV_HEADER = "class,precision,recall,f1,support"


def report_csv(r: EvalReport, class_names: Sequence[str] = CLASS_NAMES) -> str:
    lines = [CSV_HEADER]
    for k, c in enumerate(r.per_class):
        lines.append(f"{_name(k, class_names)},{c.precision:.6f},{c.recall:.6f},{c.f1:.6f},{_support(c.support)}")
    total = _support(r.n_samples)
    lines.append(f"macro,{r.macro_precision:.6f},{r.macro_recall:.6f},{r.macro_f1:.6f},{total}")
    lines.append(f"weighted,,,{r.weighted_f1:.6f},{total}")
    pos = r.per_class[r.positive]
    lines.append(f"positive,{pos.precision:.6f},{pos.recall:.6f},{r.positive_f1:.6f},{_support(pos.support)}")
    return "\n".join(lines) + "\n"
