"""Object-storage agent: bucket exploration and ML-artifact interpretation."""

from swarm_agent.storage.agent import StorageAgent, build_storage_tools
from swarm_agent.storage.memory import InMemoryObjectStore
from swarm_agent.storage.metrics import (
    CONSISTENCY_TOLERANCE,
    DerivedMetrics,
    compute_metrics_from_confusion,
    consistency_report,
    parse_model_metrics,
)
from swarm_agent.storage.models import (
    ArtifactKind,
    BucketInfo,
    ConfusionMatrix,
    ModelMetrics,
    ObjectStat,
    ObjectStore,
    PresignedHandle,
    classify_artifact,
)

__all__ = [
    "ArtifactKind",
    "BucketInfo",
    "CONSISTENCY_TOLERANCE",
    "ConfusionMatrix",
    "DerivedMetrics",
    "InMemoryObjectStore",
    "ModelMetrics",
    "ObjectStat",
    "ObjectStore",
    "PresignedHandle",
    "StorageAgent",
    "build_storage_tools",
    "classify_artifact",
    "compute_metrics_from_confusion",
    "consistency_report",
    "parse_model_metrics",
]
