"""Pipeline domain model: pipelines, versions, experiments, runs.

Run lifecycle is a strict state machine: PENDING -> RUNNING -> SUCCEEDED or
FAILED. ``finished_at`` is set exactly when a run reaches a terminal state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any

from swarm_agent.messages import isoformat, parse_timestamp, utcnow


class ParameterType(str, Enum):
    NUMBER_DOUBLE = "NUMBER_DOUBLE"
    NUMBER_INTEGER = "NUMBER_INTEGER"
    STRING = "STRING"
    BOOLEAN = "BOOLEAN"
    LIST = "LIST"
    STRUCT = "STRUCT"


def value_conforms(value: Any, parameter_type: ParameterType) -> bool:
    if parameter_type is ParameterType.NUMBER_DOUBLE:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if parameter_type is ParameterType.NUMBER_INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if parameter_type is ParameterType.STRING:
        return isinstance(value, str)
    if parameter_type is ParameterType.BOOLEAN:
        return isinstance(value, bool)
    if parameter_type is ParameterType.LIST:
        return isinstance(value, list)
    if parameter_type is ParameterType.STRUCT:
        return isinstance(value, dict)
    return False


@dataclass(frozen=True)
class ParameterDef:
    parameter_type: ParameterType
    default_value: Any = None

    def __post_init__(self) -> None:
        if self.default_value is not None and not value_conforms(self.default_value, self.parameter_type):
            raise ValueError(
                f"default {self.default_value!r} does not conform to {self.parameter_type.value}"
            )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"parameter_type": self.parameter_type.value}
        if self.default_value is not None:
            out["default_value"] = self.default_value
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> ParameterDef:
        return cls(
            parameter_type=ParameterType(raw["parameter_type"]),
            default_value=raw.get("default_value"),
        )


@dataclass(frozen=True)
class ComponentSpec:
    name: str
    parameters: dict[str, ParameterDef] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"parameters": {k: v.to_dict() for k, v in self.parameters.items()}}

    @classmethod
    def from_dict(cls, name: str, raw: dict[str, Any]) -> ComponentSpec:
        return cls(
            name=name,
            parameters={
                k: ParameterDef.from_dict(v) for k, v in (raw.get("parameters") or {}).items()
            },
        )


# Run parameters are declared on this pseudo-component of each version.
ROOT_COMPONENT = "root"


@dataclass
class PipelineVersion:
    version_id: str
    pipeline_spec: str
    components: dict[str, ComponentSpec]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("a pipeline version must declare at least one component")

    def run_parameters(self) -> dict[str, ParameterDef]:
        root = self.components.get(ROOT_COMPONENT)
        return dict(root.parameters) if root else {}

    def default_run_params(self) -> dict[str, Any]:
        return {
            name: p.default_value
            for name, p in self.run_parameters().items()
            if p.default_value is not None
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "version_id": self.version_id,
            "pipeline_spec": self.pipeline_spec,
            "components": {name: c.to_dict() for name, c in self.components.items()},
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> PipelineVersion:
        return cls(
            version_id=raw["version_id"],
            pipeline_spec=raw.get("pipeline_spec", ""),
            components={
                name: ComponentSpec.from_dict(name, spec)
                for name, spec in raw["components"].items()
            },
        )


@dataclass
class Pipeline:
    id: str
    name: str
    description: str
    namespace: str
    created_at: datetime
    versions: list[PipelineVersion] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.versions:
            raise ValueError("a pipeline must have at least one version")

    def latest_version(self) -> PipelineVersion:
        return self.versions[-1]

    def get_version(self, version_id: str) -> PipelineVersion | None:
        return next((v for v in self.versions if v.version_id == version_id), None)

    def summary_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "description": self.description,
            "namespace": self.namespace,
            "created_at": isoformat(self.created_at),
        }

    def to_dict(self) -> dict[str, Any]:
        out = self.summary_dict()
        out["versions"] = [v.to_dict() for v in self.versions]
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> Pipeline:
        return cls(
            id=raw["id"],
            name=raw["name"],
            description=raw.get("description", ""),
            namespace=raw["namespace"],
            created_at=parse_timestamp(raw["created_at"]),
            versions=[PipelineVersion.from_dict(v) for v in raw["versions"]],
        )


@dataclass
class Experiment:
    id: str
    name: str
    namespace: str
    description: str
    created_at: datetime

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "namespace": self.namespace,
            "description": self.description,
            "created_at": isoformat(self.created_at),
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> Experiment:
        return cls(
            id=raw["id"],
            name=raw["name"],
            namespace=raw["namespace"],
            description=raw.get("description", ""),
            created_at=parse_timestamp(raw["created_at"]),
        )


class RunState(str, Enum):
    PENDING = "PENDING"
    RUNNING = "RUNNING"
    SUCCEEDED = "SUCCEEDED"
    FAILED = "FAILED"


TERMINAL_STATES = frozenset({RunState.SUCCEEDED, RunState.FAILED})

_LEGAL_TRANSITIONS = {
    RunState.PENDING: {RunState.RUNNING},
    RunState.RUNNING: {RunState.SUCCEEDED, RunState.FAILED},
    RunState.SUCCEEDED: set(),
    RunState.FAILED: set(),
}


@dataclass
class Run:
    run_id: str
    job_name: str
    experiment_id: str
    pipeline_id: str
    version_id: str
    params: dict[str, Any]
    namespace: str
    state: RunState = RunState.PENDING
    created_at: datetime = field(default_factory=utcnow)
    finished_at: datetime | None = None
    error_detail: str | None = None
    failed_step: str | None = None

    def transition(self, new_state: RunState, *, error_detail: str | None = None,
                   failed_step: str | None = None) -> None:
        if new_state not in _LEGAL_TRANSITIONS[self.state]:
            raise ValueError(f"illegal run transition {self.state.value} -> {new_state.value}")
        self.state = new_state
        if new_state in TERMINAL_STATES:
            self.finished_at = utcnow()
        if new_state is RunState.FAILED:
            self.error_detail = error_detail or "run failed"
            self.failed_step = failed_step

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "run_id": self.run_id,
            "job_name": self.job_name,
            "experiment_id": self.experiment_id,
            "pipeline_id": self.pipeline_id,
            "version_id": self.version_id,
            "params": self.params,
            "namespace": self.namespace,
            "state": self.state.value,
            "created_at": isoformat(self.created_at),
        }
        if self.finished_at is not None:
            out["finished_at"] = isoformat(self.finished_at)
        if self.error_detail is not None:
            out["error_detail"] = self.error_detail
        if self.failed_step is not None:
            out["failed_step"] = self.failed_step
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> Run:
        run = cls(
            run_id=raw["run_id"],
            job_name=raw["job_name"],
            experiment_id=raw["experiment_id"],
            pipeline_id=raw["pipeline_id"],
            version_id=raw["version_id"],
            params=dict(raw.get("params") or {}),
            namespace=raw["namespace"],
            state=RunState(raw["state"]),
            created_at=parse_timestamp(raw["created_at"]),
        )
        if raw.get("finished_at"):
            run.finished_at = parse_timestamp(raw["finished_at"])
        run.error_detail = raw.get("error_detail")
        run.failed_step = raw.get("failed_step")
        return run
