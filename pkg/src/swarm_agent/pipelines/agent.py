"""Pipeline operations exposed to the model as callable tools.

Every operation takes the caller's UserContext and enforces namespace
visibility before touching the backend: resources are readable from their
own namespace or from the shared namespace, writable only in the caller's
namespace. Failures surface as ToolError so the dispatcher can serialize
a structured error envelope back into the conversation.
"""

from __future__ import annotations

from typing import Any, Callable, Protocol

from swarm_agent.errors import ToolError
from swarm_agent.messages import ParamSpec, ToolDescriptor
from swarm_agent.pipelines.models import (
    Experiment,
    Pipeline,
    PipelineVersion,
    Run,
    value_conforms,
)
from swarm_agent.sessions.models import SHARED_NAMESPACE, UserContext
from swarm_agent.storage import paths

ToolHandler = Callable[[UserContext, dict[str, Any]], dict[str, Any]]

_DEFAULT_EXPERIMENT = "default"


class PipelineBackend(Protocol):
    """Query/write surface the agent needs from a pipeline service."""

    def list_pipelines(self) -> list[Pipeline]: ...

    def get_pipeline(self, pipeline_id: str) -> Pipeline | None: ...

    def list_experiments(self) -> list[Experiment]: ...

    def get_experiment(self, experiment_id: str) -> Experiment | None: ...

    def create_experiment(self, name: str, namespace: str, description: str) -> Experiment: ...

    def create_run(
        self,
        experiment_id: str,
        job_name: str,
        params: dict[str, Any],
        pipeline_id: str,
        version_id: str,
        namespace: str,
    ) -> Run: ...

    def list_runs(self) -> list[Run]: ...

    def get_run(self, run_id: str) -> Run | None: ...


class PipelineAgent:
    def __init__(self, backend: PipelineBackend) -> None:
        self._backend = backend

    # -- resolution helpers ----------------------------------------------------

    def _visible_pipelines(self, ctx: UserContext) -> list[Pipeline]:
        return [p for p in self._backend.list_pipelines() if ctx.can_read(p.namespace)]

    def _resolve_pipeline(self, ctx: UserContext, pipeline_name: str) -> Pipeline:
        visible = self._visible_pipelines(ctx)
        for candidate in paths.name_candidates(pipeline_name):
            matches = [p for p in visible if p.name == candidate]
            if len(matches) > 1:
                raise ToolError.invalid_argument(
                    f"pipeline name {candidate!r} matches {len(matches)} pipelines; "
                    "retry with get_pipeline_version_details using an exact pipeline id",
                    pipeline_name=candidate,
                    matches=[{"id": p.id, "namespace": p.namespace} for p in matches],
                )
            if matches:
                return matches[0]
        raise ToolError.not_found(
            f"no pipeline named {pipeline_name!r} is visible from namespace "
            f"{ctx.namespace!r}; call get_pipelines to list what exists",
            pipeline_name=pipeline_name,
        )

    def _resolve_version(
        self, pipeline: Pipeline, version_id: str
    ) -> PipelineVersion:
        if not version_id:
            return pipeline.latest_version()
        version = pipeline.get_version(version_id)
        if version is None:
            raise ToolError.not_found(
                f"pipeline {pipeline.name!r} has no version {version_id!r}",
                version_id=version_id,
                known_versions=[v.version_id for v in pipeline.versions],
            )
        return version

    # -- read operations ---------------------------------------------------------

    def get_pipelines(self, ctx: UserContext, namespace: str = "") -> dict[str, Any]:
        requested = namespace or ctx.namespace
        ctx.check_read(requested, f"namespace {requested!r}")
        everything = self._backend.list_pipelines()
        matches = [p for p in everything if p.namespace == requested]
        matches.sort(key=lambda p: (p.created_at, p.name), reverse=True)
        return {
            "namespace": requested,
            "namespace_type": "shared" if requested == SHARED_NAMESPACE else "private",
            "total_pipelines": len(matches),
            "total_available": len(everything),
            "pipelines": [p.summary_dict() for p in matches],
        }

    def get_pipeline_details(self, ctx: UserContext, pipeline_name: str) -> dict[str, Any]:
        pipeline = self._resolve_pipeline(ctx, pipeline_name)
        out = pipeline.summary_dict()
        out["pipeline_id"] = out.pop("id")
        out["latest_version_id"] = pipeline.latest_version().version_id
        out["version_ids"] = [v.version_id for v in pipeline.versions]
        return out

    def get_pipeline_version_details(
        self, ctx: UserContext, pipeline_id: str, version_id: str
    ) -> dict[str, Any]:
        pipeline = self._backend.get_pipeline(pipeline_id)
        if pipeline is None:
            raise ToolError.not_found(
                f"no pipeline with id {pipeline_id!r}", pipeline_id=pipeline_id
            )
        ctx.check_read(pipeline.namespace, f"pipeline {pipeline.name!r}")
        version = self._resolve_version(pipeline, version_id)
        components = []
        for name, component in version.components.items():
            params = []
            for pname, pdef in component.parameters.items():
                entry: dict[str, Any] = {
                    "name": pname,
                    "type": pdef.parameter_type.value,
                }
                if pdef.default_value is not None:
                    entry["default"] = pdef.default_value
                params.append(entry)
            components.append({"name": name, "parameters": params})
        return {
            "pipeline_id": pipeline.id,
            "pipeline_name": pipeline.name,
            "version_id": version.version_id,
            "components": components,
        }

    def get_pipeline_id(self, ctx: UserContext, pipeline_name: str) -> dict[str, Any]:
        pipeline = self._resolve_pipeline(ctx, pipeline_name)
        return {
            "pipeline_id": pipeline.id,
            "pipeline_name": pipeline.name,
            "namespace": pipeline.namespace,
        }

    def list_runs(
        self, ctx: UserContext, experiment_name: str = "", pipeline_name: str = ""
    ) -> dict[str, Any]:
        runs = [r for r in self._backend.list_runs() if ctx.can_read(r.namespace)]
        if experiment_name:
            experiment_ids = {
                e.id
                for e in self._backend.list_experiments()
                if e.name == experiment_name and ctx.can_read(e.namespace)
            }
            if not experiment_ids:
                raise ToolError.not_found(
                    f"no experiment named {experiment_name!r} is visible",
                    experiment_name=experiment_name,
                )
            runs = [r for r in runs if r.experiment_id in experiment_ids]
        if pipeline_name:
            pipeline = self._resolve_pipeline(ctx, pipeline_name)
            runs = [r for r in runs if r.pipeline_id == pipeline.id]
        runs.sort(key=lambda r: (r.created_at, r.run_id), reverse=True)
        names = {p.id: p.name for p in self._backend.list_pipelines()}
        entries = []
        for run in runs:
            entry = {
                "run_id": run.run_id,
                "job_name": run.job_name,
                "state": run.state.value,
                "pipeline_id": run.pipeline_id,
                "pipeline_name": names.get(run.pipeline_id, ""),
                "experiment_id": run.experiment_id,
                "created_at": run.to_dict()["created_at"],
            }
            if run.finished_at is not None:
                entry["finished_at"] = run.to_dict()["finished_at"]
            entries.append(entry)
        return {"total_runs": len(entries), "runs": entries}

    def get_run_details(self, ctx: UserContext, run_id: str) -> dict[str, Any]:
        run = self._backend.get_run(run_id)
        if run is None:
            raise ToolError.not_found(f"no run with id {run_id!r}", run_id=run_id)
        ctx.check_read(run.namespace, f"run {run_id}")
        out = run.to_dict()
        pipeline = self._backend.get_pipeline(run.pipeline_id)
        if pipeline is not None:
            out["pipeline_name"] = pipeline.name
        return out

    # -- write operations ----------------------------------------------------------

    def create_experiment(
        self, ctx: UserContext, name: str, description: str = ""
    ) -> dict[str, Any]:
        if not name:
            raise ToolError.invalid_argument("experiment name must be non-empty")
        experiment = self._backend.create_experiment(name, ctx.namespace, description)
        return experiment.to_dict()

    def run_pipeline(
        self,
        ctx: UserContext,
        pipeline_name: str,
        job_name: str,
        experiment_name: str = "",
        params: dict[str, Any] | None = None,
        version_id: str = "",
    ) -> dict[str, Any]:
        pipeline = self._resolve_pipeline(ctx, pipeline_name)
        ctx.check_write(pipeline.namespace, f"pipeline {pipeline.name!r}")
        version = self._resolve_version(pipeline, version_id)
        merged = self._validate_params(version, params or {})
        experiment = self._resolve_experiment(ctx, experiment_name)
        run = self._backend.create_run(
            experiment_id=experiment.id,
            job_name=job_name,
            params=merged,
            pipeline_id=pipeline.id,
            version_id=version.version_id,
            namespace=pipeline.namespace,
        )
        out = run.to_dict()
        out["pipeline_name"] = pipeline.name
        out["experiment_name"] = experiment.name
        return out

    def _resolve_experiment(self, ctx: UserContext, experiment_name: str) -> Experiment:
        wanted = experiment_name or _DEFAULT_EXPERIMENT
        match = next(
            (
                e
                for e in self._backend.list_experiments()
                if e.name == wanted and e.namespace == ctx.namespace
            ),
            None,
        )
        if match is not None:
            return match
        if experiment_name:
            raise ToolError.not_found(
                f"no experiment named {experiment_name!r} in namespace "
                f"{ctx.namespace!r}; create it first with create_experiment",
                experiment_name=experiment_name,
            )
        return self._backend.create_experiment(
            _DEFAULT_EXPERIMENT, ctx.namespace, "Auto-created default experiment"
        )

    @staticmethod
    def _validate_params(version: PipelineVersion, params: dict[str, Any]) -> dict[str, Any]:
        declared = version.run_parameters()
        merged = version.default_run_params()
        for key, value in params.items():
            if key not in declared:
                raise ToolError.invalid_argument(
                    f"unknown run parameter {key!r}",
                    parameter=key,
                    valid_parameters=sorted(declared),
                )
            expected = declared[key].parameter_type
            if not value_conforms(value, expected):
                raise ToolError.invalid_argument(
                    f"parameter {key!r} expects {expected.value}, "
                    f"got {type(value).__name__} {value!r}",
                    parameter=key,
                    expected_type=expected.value,
                )
            merged[key] = value
        missing = sorted(k for k in declared if k not in merged)
        if missing:
            raise ToolError.invalid_argument(
                f"missing required run parameters: {', '.join(missing)}",
                missing_parameters=missing,
            )
        return merged


def build_pipeline_tools(agent: PipelineAgent) -> list[tuple[ToolDescriptor, ToolHandler]]:
    """Descriptors plus handlers for every pipeline tool."""

    def wrap(method: Callable[..., dict[str, Any]]) -> ToolHandler:
        def handler(ctx: UserContext, args: dict[str, Any]) -> dict[str, Any]:
            return method(ctx, **args)

        return handler

    return [
        (
            ToolDescriptor(
                name="get_pipelines",
                description=(
                    "List ML pipelines registered in a namespace, newest first. "
                    "Defaults to the caller's namespace."
                ),
                parameters={
                    "namespace": ParamSpec(
                        type="string",
                        description="Namespace to list; omit for your own.",
                    ),
                },
            ),
            wrap(agent.get_pipelines),
        ),
        (
            ToolDescriptor(
                name="get_pipeline_details",
                description=(
                    "Look up a pipeline by name: id, description, namespace, and "
                    "its version ids (latest last)."
                ),
                parameters={
                    "pipeline_name": ParamSpec(type="string", required=True),
                },
            ),
            wrap(agent.get_pipeline_details),
        ),
        (
            ToolDescriptor(
                name="get_pipeline_version_details",
                description=(
                    "Inspect one pipeline version: every component and its "
                    "parameters with types and defaults. Run-level parameters "
                    "appear on the component named 'root'."
                ),
                parameters={
                    "pipeline_id": ParamSpec(type="string", required=True),
                    "version_id": ParamSpec(
                        type="string",
                        description="Version to inspect; omit for the latest.",
                    ),
                },
            ),
            wrap(agent.get_pipeline_version_details),
        ),
        (
            ToolDescriptor(
                name="get_pipeline_id",
                description="Resolve a pipeline name to its id.",
                parameters={
                    "pipeline_name": ParamSpec(type="string", required=True),
                },
            ),
            wrap(agent.get_pipeline_id),
        ),
        (
            ToolDescriptor(
                name="create_experiment",
                description=(
                    "Create an experiment (a grouping for runs) in the caller's "
                    "namespace."
                ),
                parameters={
                    "name": ParamSpec(type="string", required=True),
                    "description": ParamSpec(type="string", default=""),
                },
            ),
            wrap(agent.create_experiment),
        ),
        (
            ToolDescriptor(
                name="run_pipeline",
                description=(
                    "Start a pipeline run. Parameters are validated against the "
                    "pipeline's run-level schema; omitted ones take their "
                    "declared defaults."
                ),
                parameters={
                    "pipeline_name": ParamSpec(type="string", required=True),
                    "job_name": ParamSpec(
                        type="string", required=True, description="Display name for the run."
                    ),
                    "experiment_name": ParamSpec(
                        type="string",
                        description="Experiment to attach to; omit for 'default'.",
                    ),
                    "params": ParamSpec(
                        type="object",
                        description="Run parameter overrides, name to value.",
                    ),
                    "version_id": ParamSpec(
                        type="string",
                        description="Pipeline version; omit for the latest.",
                    ),
                },
            ),
            wrap(agent.run_pipeline),
        ),
        (
            ToolDescriptor(
                name="list_runs",
                description=(
                    "List pipeline runs visible to the caller, newest first, "
                    "optionally filtered by experiment or pipeline name."
                ),
                parameters={
                    "experiment_name": ParamSpec(type="string"),
                    "pipeline_name": ParamSpec(type="string"),
                },
            ),
            wrap(agent.list_runs),
        ),
        (
            ToolDescriptor(
                name="get_run_details",
                description=(
                    "Full status of one run: state, parameters, timestamps, and "
                    "failure detail when present."
                ),
                parameters={
                    "run_id": ParamSpec(type="string", required=True),
                },
            ),
            wrap(agent.get_run_details),
        ),
    ]
