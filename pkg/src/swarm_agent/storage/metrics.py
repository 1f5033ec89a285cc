"""Classification-metric math over binary confusion matrices.

The metrics artifact written by training runs states accuracy, precision,
recall, and f1 alongside the confusion matrix they were computed from.
This module recomputes the four from the matrix so readers can verify the
artifact is internally consistent. AUC cannot be reproduced from a
confusion matrix and is only ever passed through.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from swarm_agent.errors import ToolError
from swarm_agent.storage.models import ConfusionMatrix, ModelMetrics

# Stated values may be rounded for display; deviations up to this bound
# count as consistent.
CONSISTENCY_TOLERANCE = 1e-3


@dataclass(frozen=True)
class DerivedMetrics:
    """Metrics recomputed from a confusion matrix.

    ``degenerate`` flags that at least one ratio had a zero denominator and
    was reported as 0.0 by convention.
    """

    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "degenerate": self.degenerate,
        }


def compute_metrics_from_confusion(matrix: ConfusionMatrix) -> DerivedMetrics:
    if matrix.total == 0:
        raise ToolError.invalid_argument(
            "confusion matrix is all zeros; no samples to compute metrics from"
        )
    degenerate = False

    accuracy = (matrix.tn + matrix.tp) / matrix.total

    predicted_positive = matrix.tp + matrix.fp
    if predicted_positive == 0:
        precision, degenerate = 0.0, True
    else:
        precision = matrix.tp / predicted_positive

    actual_positive = matrix.tp + matrix.fn
    if actual_positive == 0:
        recall, degenerate = 0.0, True
    else:
        recall = matrix.tp / actual_positive

    if precision + recall == 0.0:
        f1, degenerate = 0.0, True
    else:
        f1 = 2.0 * precision * recall / (precision + recall)

    return DerivedMetrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        degenerate=degenerate,
    )


def parse_model_metrics(raw: Any) -> ModelMetrics:
    """Validate a decoded metrics artifact and build the domain value.

    Raises INVALID_ARGUMENT with a pointed message on any structural
    problem, since the caller can name the offending artifact.
    """
    if isinstance(raw, (str, bytes)):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ToolError.invalid_argument(
                f"metrics artifact is not valid JSON: {exc}"
            ) from exc
    if not isinstance(raw, dict):
        raise ToolError.invalid_argument("metrics artifact must be a JSON object")
    missing = [k for k in ("accuracy", "precision", "recall", "f1", "confusion_matrix") if k not in raw]
    if missing:
        raise ToolError.invalid_argument(
            f"metrics artifact is missing fields: {', '.join(missing)}",
            missing_fields=missing,
        )
    try:
        confusion = ConfusionMatrix.from_rows(raw["confusion_matrix"])
        return ModelMetrics(
            accuracy=raw["accuracy"],
            precision=raw["precision"],
            recall=raw["recall"],
            f1=raw["f1"],
            confusion=confusion,
            auc=raw.get("auc"),
        )
    except ValueError as exc:
        raise ToolError.invalid_argument(f"metrics artifact is malformed: {exc}") from exc


def consistency_report(metrics: ModelMetrics, tolerance: float = CONSISTENCY_TOLERANCE) -> dict[str, Any]:
    """Compare stated metrics against values recomputed from the matrix."""
    derived = compute_metrics_from_confusion(metrics.confusion)
    deviations = {
        "accuracy": abs(metrics.accuracy - derived.accuracy),
        "precision": abs(metrics.precision - derived.precision),
        "recall": abs(metrics.recall - derived.recall),
        "f1": abs(metrics.f1 - derived.f1),
    }
    max_deviation = max(deviations.values())
    return {
        "derived_from_confusion": derived.to_dict(),
        "max_deviation": max_deviation,
        "consistent": max_deviation <= tolerance,
    }
