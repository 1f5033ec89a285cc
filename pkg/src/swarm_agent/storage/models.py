"""Object-storage domain types and the store protocol."""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Protocol

from swarm_agent.messages import isoformat
from swarm_agent.storage import paths

# Subset of the S3 rules: lowercase alphanumerics and hyphens, 3-63 chars,
# alphanumeric at both ends. Dots are excluded on purpose (they complicate
# TLS and signing and none of our buckets use them).
_BUCKET_NAME_RE = re.compile(r"^[a-z0-9][a-z0-9-]{1,61}[a-z0-9]$")


def validate_bucket_name(name: str) -> None:
    if not _BUCKET_NAME_RE.match(name):
        raise ValueError(
            f"invalid bucket name {name!r}: need 3-63 chars of lowercase "
            "letters, digits, or hyphens, starting and ending alphanumeric"
        )


@dataclass(frozen=True)
class BucketInfo:
    name: str
    created_at: datetime | None = None

    def __post_init__(self) -> None:
        validate_bucket_name(self.name)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name}
        if self.created_at is not None:
            out["created_at"] = isoformat(self.created_at)
        return out


@dataclass(frozen=True)
class ObjectStat:
    key: str
    size: int
    last_modified: datetime
    content_type: str = "application/octet-stream"

    def to_dict(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "size": self.size,
            "last_modified": isoformat(self.last_modified),
            "content_type": self.content_type,
        }


class ArtifactKind(str, Enum):
    METRICS = "metrics"
    ROC_CURVE = "roc_curve"
    CONFUSION_MATRIX = "confusion_matrix"
    MODEL = "model"
    STEP_LOG = "step_log"
    OTHER = "other"


def classify_artifact(key: str) -> ArtifactKind:
    basename = key.rsplit("/", 1)[-1]
    if basename == paths.METRICS_FILE:
        return ArtifactKind.METRICS
    if basename == paths.ROC_CURVE_FILE:
        return ArtifactKind.ROC_CURVE
    if basename == paths.CONFUSION_MATRIX_FILE:
        return ArtifactKind.CONFUSION_MATRIX
    if basename == paths.MODEL_FILE:
        return ArtifactKind.MODEL
    if basename.startswith("step-") and basename.endswith(".log"):
        return ArtifactKind.STEP_LOG
    return ArtifactKind.OTHER


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion matrix; rows are actual, columns predicted:
    [[TN, FP], [FN, TP]]."""

    tn: int
    fp: int
    fn: int
    tp: int

    def __post_init__(self) -> None:
        for label in ("tn", "fp", "fn", "tp"):
            value = getattr(self, label)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"confusion matrix cell {label} must be an int")
            if value < 0:
                raise ValueError(f"confusion matrix cell {label} must be non-negative")

    @classmethod
    def from_rows(cls, rows: Any) -> ConfusionMatrix:
        if (
            not isinstance(rows, (list, tuple))
            or len(rows) != 2
            or any(not isinstance(r, (list, tuple)) or len(r) != 2 for r in rows)
        ):
            raise ValueError("confusion matrix must be a 2x2 array [[TN, FP], [FN, TP]]")
        return cls(tn=rows[0][0], fp=rows[0][1], fn=rows[1][0], tp=rows[1][1])

    def rows(self) -> list[list[int]]:
        return [[self.tn, self.fp], [self.fn, self.tp]]

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp


@dataclass(frozen=True)
class ModelMetrics:
    """Evaluation metrics as recorded in a run's metrics artifact.

    ``auc`` is carried through from the artifact when present and never
    recomputed; the confusion matrix does not determine it.
    """

    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: ConfusionMatrix
    auc: float | None = None

    def __post_init__(self) -> None:
        for label in ("accuracy", "precision", "recall", "f1"):
            _check_unit_interval(label, getattr(self, label))
        if self.auc is not None:
            _check_unit_interval("auc", self.auc)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }
        if self.auc is not None:
            out["auc"] = self.auc
        out["confusion_matrix"] = self.confusion.rows()
        return out


def _check_unit_interval(label: str, value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{label} must be a number")
    if not 0.0 <= float(value) <= 1.0:
        raise ValueError(f"{label} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class PresignedHandle:
    """Short-lived reference to one stored object.

    ``handle`` is either an opaque token resolvable by the gateway's
    artifact endpoint or, for remote stores, a complete URL.
    """

    handle: str
    url: str
    expires_at: datetime

    def to_dict(self) -> dict[str, Any]:
        return {
            "handle": self.handle,
            "url": self.url,
            "expires_at": isoformat(self.expires_at),
        }


class ObjectStore(Protocol):
    def list_buckets(self) -> list[BucketInfo]: ...

    def bucket_exists(self, name: str) -> bool: ...

    def ensure_bucket(self, name: str) -> None: ...

    def list_objects(self, bucket: str, prefix: str = "") -> list[ObjectStat]: ...

    def get_object(self, bucket: str, key: str) -> bytes: ...

    def put_object(
        self, bucket: str, key: str, data: bytes, content_type: str = "application/octet-stream"
    ) -> None: ...

    def presign(self, bucket: str, key: str, ttl_seconds: int) -> PresignedHandle: ...
