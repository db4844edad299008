"""Clean accuracy and certified robust accuracy."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from majorcert.certifiers import Method


@dataclass(frozen=True)
class MetricsReport:
    total: int
    clean_correct: int
    certified_and_correct: int
    certified: int
    # certified-and-correct samples per certification method
    by_method: dict[str, int] = field(default_factory=dict)

    @property
    def clean_accuracy(self) -> Fraction:
        return Fraction(self.clean_correct, self.total) if self.total else Fraction(0)

    @property
    def certified_robust_accuracy(self) -> Fraction:
        return Fraction(self.certified_and_correct, self.total) if self.total else Fraction(0)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "clean_correct": self.clean_correct,
            "certified": self.certified,
            "certified_and_correct": self.certified_and_correct,
            "clean_accuracy": float(self.clean_accuracy),
            "clean_accuracy_exact": str(self.clean_accuracy),
            "certified_robust_accuracy": float(self.certified_robust_accuracy),
            "certified_robust_accuracy_exact": str(self.certified_robust_accuracy),
            "certified_and_correct_by_method": dict(self.by_method),
        }


def compute_metrics(true_labels: Sequence[int], predicted: Sequence[int],
                    certified: Sequence[bool],
                    methods: Sequence[Method] | None = None) -> MetricsReport:
    if not (len(true_labels) == len(predicted) == len(certified)):
        raise ValueError(
            f"length mismatch: {len(true_labels)} labels, {len(predicted)} predictions, "
            f"{len(certified)} certification flags")
    if methods is not None and len(methods) != len(true_labels):
        raise ValueError(f"length mismatch: {len(methods)} methods for {len(true_labels)} samples")
    by_method = {m.value: 0 for m in (Method.MAJORITY, Method.MAJORITY_INVARIANT)}
    clean = cert_correct = n_cert = 0
    for i, (t, p, c) in enumerate(zip(true_labels, predicted, certified)):
        correct = t == p
        clean += correct
        n_cert += bool(c)
        if correct and c:
            cert_correct += 1
            if methods is not None and methods[i] is not Method.NONE:
                by_method[methods[i].value] += 1
    return MetricsReport(len(true_labels), clean, cert_correct, n_cert, by_method)


def metrics_for(records, certificates) -> MetricsReport:
    """Metrics over parallel sequences of records (``true_label``) and certificates."""
    if len(records) != len(certificates):
        raise ValueError(f"length mismatch: {len(records)} records, "
                         f"{len(certificates)} certificates")
    return compute_metrics([r.true_label for r in records],
                           [c.predicted for c in certificates],
                           [c.certified for c in certificates],
                           [c.method for c in certificates])


def metrics_from_rows(rows) -> MetricsReport:
    return compute_metrics([r.true_label for r in rows], [r.predicted for r in rows],
                           [r.certified for r in rows], [r.method for r in rows])
