"""Object-storage operations exposed to the model as callable tools.

Artifact lookups are pipeline-centric: callers name a pipeline (registry
or storage name) and optionally a run; the agent resolves "the run" via an
injected resolver backed by the pipeline service, then reads artifacts
from the conventional ``<bucket>/<storage-name>/<run_id>/`` layout. Bucket
grants come from the caller's UserContext and gate every artifact read.
"""

from __future__ import annotations

from typing import Any, Callable

from swarm_agent.errors import ToolError
from swarm_agent.messages import ParamSpec, ToolDescriptor
from swarm_agent.pipelines.models import Run, RunState, TERMINAL_STATES
from swarm_agent.sessions.models import UserContext
from swarm_agent.storage import paths
from swarm_agent.storage.metrics import consistency_report, parse_model_metrics
from swarm_agent.storage.models import ObjectStore, classify_artifact

ToolHandler = Callable[[UserContext, dict[str, Any]], dict[str, Any]]

# Maps pipeline name (either form) to that pipeline's runs, newest first.
RunResolver = Callable[[str], list[Run]]

_VIZ_FILES = {
    "roc_curve": paths.ROC_CURVE_FILE,
    "confusion_matrix": paths.CONFUSION_MATRIX_FILE,
}

DEFAULT_PRESIGN_TTL = 900


class StorageAgent:
    def __init__(
        self,
        store: ObjectStore,
        run_resolver: RunResolver,
        artifact_bucket: str = paths.ARTIFACT_BUCKET,
        presign_ttl: int = DEFAULT_PRESIGN_TTL,
    ) -> None:
        self._store = store
        self._run_resolver = run_resolver
        self._artifact_bucket = artifact_bucket
        self._presign_ttl = presign_ttl

    # -- access helpers ------------------------------------------------------

    def _check_bucket_access(self, ctx: UserContext, bucket: str) -> None:
        if bucket not in ctx.allowed_buckets:
            raise ToolError.permission_denied(
                f"bucket {bucket!r} is not granted to user {ctx.user_id!r}",
                bucket=bucket,
                allowed_buckets=sorted(ctx.allowed_buckets),
            )

    def _resolve_run(
        self,
        ctx: UserContext,
        pipeline_name: str,
        run_id: str,
        *,
        require_success: bool,
    ) -> Run:
        runs = [r for r in self._run_resolver(pipeline_name) if ctx.can_read(r.namespace)]
        if not runs:
            raise ToolError.not_found(
                f"no runs visible for pipeline {pipeline_name!r}; check the name "
                "with get_pipelines or start one with run_pipeline",
                pipeline_name=pipeline_name,
            )
        if run_id:
            run = next((r for r in runs if r.run_id == run_id), None)
            if run is None:
                raise ToolError.not_found(
                    f"run {run_id!r} not found for pipeline {pipeline_name!r}",
                    run_id=run_id,
                    known_runs=[r.run_id for r in runs[:10]],
                )
            return run
        wanted = (
            (lambda r: r.state is RunState.SUCCEEDED)
            if require_success
            else (lambda r: r.state in TERMINAL_STATES)
        )
        run = next((r for r in runs if wanted(r)), None)
        if run is None:
            newest = runs[0]
            raise ToolError.not_found(
                f"pipeline {pipeline_name!r} has no "
                f"{'successful' if require_success else 'finished'} runs yet; "
                f"newest run {newest.run_id} is {newest.state.value}",
                pipeline_name=pipeline_name,
                newest_run_id=newest.run_id,
                newest_run_state=newest.state.value,
            )
        return run

    # -- operations -------------------------------------------------------------

    def list_user_buckets(self, ctx: UserContext) -> dict[str, Any]:
        visible = [b for b in self._store.list_buckets() if b.name in ctx.allowed_buckets]
        return {
            "total_buckets": len(visible),
            "buckets": [b.to_dict() for b in visible],
        }

    def get_minio_info(self, ctx: UserContext) -> dict[str, Any]:
        info_fn = getattr(self._store, "info", None)
        backend = info_fn() if callable(info_fn) else {"backend_type": "memory"}
        visible = [b for b in self._store.list_buckets() if b.name in ctx.allowed_buckets]
        return {
            "service": "object-storage",
            **backend,
            "namespace": ctx.namespace,
            "allowed_buckets": sorted(ctx.allowed_buckets),
            "total_buckets_accessible": len(visible),
        }

    def get_pipeline_artifacts(
        self, ctx: UserContext, pipeline_name: str, run_id: str = ""
    ) -> dict[str, Any]:
        self._check_bucket_access(ctx, self._artifact_bucket)
        run = self._resolve_run(ctx, pipeline_name, run_id, require_success=False)
        prefix = paths.run_prefix(pipeline_name, run.run_id)
        stats = self._store.list_objects(self._artifact_bucket, prefix)
        if not stats:
            raise ToolError.not_found(
                f"run {run.run_id} has no stored artifacts yet "
                f"(state {run.state.value})",
                run_id=run.run_id,
                state=run.state.value,
            )
        artifacts = []
        for stat in stats:
            entry = stat.to_dict()
            entry["kind"] = classify_artifact(stat.key).value
            artifacts.append(entry)
        return {
            "pipeline_name": pipeline_name,
            "run_id": run.run_id,
            "run_state": run.state.value,
            "bucket": self._artifact_bucket,
            "prefix": prefix,
            "total_artifacts": len(artifacts),
            "artifacts": artifacts,
        }

    def get_model_metrics(
        self, ctx: UserContext, pipeline_name: str, run_id: str = ""
    ) -> dict[str, Any]:
        self._check_bucket_access(ctx, self._artifact_bucket)
        run = self._resolve_run(ctx, pipeline_name, run_id, require_success=True)
        key = paths.run_prefix(pipeline_name, run.run_id) + paths.METRICS_FILE
        data = self._store.get_object(self._artifact_bucket, key)
        metrics = parse_model_metrics(data)
        report = consistency_report(metrics)
        return {
            "pipeline_name": pipeline_name,
            "run_id": run.run_id,
            "metrics": metrics.to_dict(),
            **report,
        }

    def get_pipeline_visualization(
        self,
        ctx: UserContext,
        pipeline_name: str,
        viz_type: str = "roc_curve",
        run_id: str = "",
    ) -> dict[str, Any]:
        if viz_type not in _VIZ_FILES:
            raise ToolError.invalid_argument(
                f"unknown visualization type {viz_type!r}",
                viz_type=viz_type,
                valid_types=sorted(_VIZ_FILES),
            )
        self._check_bucket_access(ctx, self._artifact_bucket)
        run = self._resolve_run(ctx, pipeline_name, run_id, require_success=True)
        key = paths.run_prefix(pipeline_name, run.run_id) + _VIZ_FILES[viz_type]
        handle = self._store.presign(self._artifact_bucket, key, self._presign_ttl)
        return {
            "pipeline_name": pipeline_name,
            "run_id": run.run_id,
            "viz_type": viz_type,
            "content_type": "image/png",
            **handle.to_dict(),
        }

    def compare_runs(self, ctx: UserContext, pipeline_names: list[str]) -> dict[str, Any]:
        """Side-by-side latest-run metrics for several pipelines."""
        if not pipeline_names:
            raise ToolError.invalid_argument("pipeline_names must be non-empty")
        return {
            "comparison": [self.get_model_metrics(ctx, name) for name in pipeline_names]
        }


def build_storage_tools(agent: StorageAgent) -> list[tuple[ToolDescriptor, ToolHandler]]:
    """Descriptors plus handlers for every object-storage tool."""

    def wrap(method: Callable[..., dict[str, Any]]) -> ToolHandler:
        def handler(ctx: UserContext, args: dict[str, Any]) -> dict[str, Any]:
            return method(ctx, **args)

        return handler

    return [
        (
            ToolDescriptor(
                name="list_user_buckets",
                description="List the storage buckets the caller can access.",
            ),
            wrap(agent.list_user_buckets),
        ),
        (
            ToolDescriptor(
                name="get_minio_info",
                description=(
                    "Describe the object-storage service: backend type and the "
                    "caller's bucket grants."
                ),
            ),
            wrap(agent.get_minio_info),
        ),
        (
            ToolDescriptor(
                name="get_pipeline_artifacts",
                description=(
                    "List the stored artifacts of a pipeline run (metrics, "
                    "plots, model, step logs). Defaults to the newest finished "
                    "run."
                ),
                parameters={
                    "pipeline_name": ParamSpec(type="string", required=True),
                    "run_id": ParamSpec(
                        type="string", description="Specific run; omit for the newest."
                    ),
                },
            ),
            wrap(agent.get_pipeline_artifacts),
        ),
        (
            ToolDescriptor(
                name="get_model_metrics",
                description=(
                    "Fetch a run's evaluation metrics (accuracy, precision, "
                    "recall, f1, auc, confusion matrix) and verify they are "
                    "consistent with the confusion matrix. Defaults to the "
                    "newest successful run."
                ),
                parameters={
                    "pipeline_name": ParamSpec(type="string", required=True),
                    "run_id": ParamSpec(
                        type="string", description="Specific run; omit for the newest."
                    ),
                },
            ),
            wrap(agent.get_model_metrics),
        ),
        (
            ToolDescriptor(
                name="get_pipeline_visualization",
                description=(
                    "Get a short-lived link to a run's evaluation plot "
                    "(roc_curve or confusion_matrix)."
                ),
                parameters={
                    "pipeline_name": ParamSpec(type="string", required=True),
                    "viz_type": ParamSpec(
                        type="string",
                        default="roc_curve",
                        description="One of: roc_curve, confusion_matrix.",
                    ),
                    "run_id": ParamSpec(
                        type="string", description="Specific run; omit for the newest."
                    ),
                },
            ),
            wrap(agent.get_pipeline_visualization),
        ),
    ]
