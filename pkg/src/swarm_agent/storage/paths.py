"""Artifact path convention linking pipeline runs to stored objects.

Run artifacts live at ``<bucket>/<storage-name>/<run_id>/<artifact>`` with
canonical artifact names. The storage-facing pipeline name drops a trailing
``-pipeline`` suffix from the registry name, matching how artifact folders
are laid out by the training components.
"""

from __future__ import annotations

ARTIFACT_BUCKET = "mlpipeline"

METRICS_FILE = "metrics.json"
ROC_CURVE_FILE = "roc_curve.png"
CONFUSION_MATRIX_FILE = "confusion_matrix.png"
MODEL_FILE = "model.bin"

_PIPELINE_SUFFIX = "-pipeline"


def storage_name(pipeline_name: str) -> str:
    """Storage folder name for a pipeline registry name."""
    if pipeline_name.endswith(_PIPELINE_SUFFIX):
        return pipeline_name[: -len(_PIPELINE_SUFFIX)]
    return pipeline_name


def name_candidates(name: str) -> list[str]:
    """Folder names a user-supplied pipeline name may refer to.

    Accepts either the registry name or the storage folder name.
    """
    stripped = storage_name(name)
    candidates = [name]
    if stripped != name:
        candidates.append(stripped)
    else:
        candidates.append(name + _PIPELINE_SUFFIX)
    return candidates


def run_prefix(pipeline_name: str, run_id: str) -> str:
    return f"{storage_name(pipeline_name)}/{run_id}/"


def step_log_file(step: str) -> str:
    return f"step-{step}.log"
