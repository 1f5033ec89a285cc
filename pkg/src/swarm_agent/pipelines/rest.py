"""Thin REST client for a Kubeflow Pipelines v2beta1 API server.

Only the calls the pipeline agent needs. Network and server errors are
normalized to ToolError so callers see the same envelope protocol as with
the fake backend. This client is never exercised in the test suite; CI
runs against FakePipelineBackend.
"""

from __future__ import annotations

import logging
from typing import Any

import requests

from swarm_agent.errors import ErrorType, ToolError
from swarm_agent.messages import parse_timestamp, utcnow
from swarm_agent.pipelines.models import (
    ComponentSpec,
    Experiment,
    ParameterDef,
    ParameterType,
    Pipeline,
    PipelineVersion,
    ROOT_COMPONENT,
    Run,
    RunState,
)

logger = logging.getLogger(__name__)


class KfpRestBackend:
    """Minimal Kubeflow Pipelines REST wrapper."""

    def __init__(
        self,
        endpoint: str,
        token: str = "",
        timeout: float = 30.0,
        session: requests.Session | None = None,
    ) -> None:
        if not endpoint:
            raise ValueError("endpoint is required")
        self._endpoint = endpoint.rstrip("/")
        self._token = token
        self._timeout = timeout
        self._session = session or requests.Session()

    def _request(self, method: str, path: str, **kwargs: Any) -> dict[str, Any]:
        url = f"{self._endpoint}{path}"
        headers = {"Accept": "application/json"}
        if self._token:
            headers["Authorization"] = f"Bearer {self._token}"
        try:
            response = self._session.request(
                method, url, headers=headers, timeout=self._timeout, **kwargs
            )
        except requests.RequestException as exc:
            raise ToolError.backend_unavailable(
                f"pipeline backend unreachable: {exc}"
            ) from exc
        if response.status_code == 404:
            raise ToolError.not_found(f"pipeline backend returned 404 for {path}")
        if response.status_code in (401, 403):
            raise ToolError.permission_denied(
                f"pipeline backend rejected credentials ({response.status_code})"
            )
        if response.status_code >= 500:
            raise ToolError.backend_unavailable(
                f"pipeline backend error {response.status_code}"
            )
        if response.status_code >= 400:
            raise ToolError.invalid_argument(
                f"pipeline backend rejected request ({response.status_code}): "
                f"{response.text[:200]}"
            )
        try:
            return response.json()
        except ValueError as exc:
            raise ToolError.backend_unavailable(
                "pipeline backend returned non-JSON body"
            ) from exc

    def list_pipelines(self, namespace: str) -> dict[str, Any]:
        return self._request(
            "GET", "/apis/v2beta1/pipelines", params={"namespace": namespace}
        )

    def get_pipeline(self, pipeline_id: str) -> dict[str, Any]:
        return self._request("GET", f"/apis/v2beta1/pipelines/{pipeline_id}")

    def list_pipeline_versions(self, pipeline_id: str) -> dict[str, Any]:
        return self._request(
            "GET", f"/apis/v2beta1/pipelines/{pipeline_id}/versions"
        )

    def get_pipeline_version(self, pipeline_id: str, version_id: str) -> dict[str, Any]:
        return self._request(
            "GET", f"/apis/v2beta1/pipelines/{pipeline_id}/versions/{version_id}"
        )

    def create_experiment(self, name: str, namespace: str, description: str) -> dict[str, Any]:
        return self._request(
            "POST",
            "/apis/v2beta1/experiments",
            json={
                "display_name": name,
                "description": description,
                "namespace": namespace,
            },
        )

    def create_run(
        self,
        experiment_id: str,
        job_name: str,
        params: dict[str, Any],
        pipeline_id: str,
        version_id: str,
    ) -> dict[str, Any]:
        body = {
            "display_name": job_name,
            "experiment_id": experiment_id,
            "pipeline_version_reference": {
                "pipeline_id": pipeline_id,
                "pipeline_version_id": version_id,
            },
            "runtime_config": {"parameters": params},
        }
        return self._request("POST", "/apis/v2beta1/runs", json=body)

    def list_runs(self, namespace: str, experiment_id: str = "") -> dict[str, Any]:
        params: dict[str, str] = {"namespace": namespace}
        if experiment_id:
            params["experiment_id"] = experiment_id
        return self._request("GET", "/apis/v2beta1/runs", params=params)

    def get_run(self, run_id: str) -> dict[str, Any]:
        return self._request("GET", f"/apis/v2beta1/runs/{run_id}")


def _parse_ts(raw: Any):
    if isinstance(raw, str) and raw:
        return parse_timestamp(raw)
    return utcnow()


def _params_from_defs(input_defs: dict[str, Any] | None) -> dict[str, ParameterDef]:
    params: dict[str, ParameterDef] = {}
    for pname, pdef in ((input_defs or {}).get("parameters") or {}).items():
        type_name = pdef.get("parameterType", "STRING")
        try:
            ptype = ParameterType(type_name)
        except ValueError as exc:
            raise ToolError.internal(
                f"pipeline declares unsupported parameter type {type_name!r}"
            ) from exc
        params[pname] = ParameterDef(ptype, pdef.get("defaultValue"))
    return params


def _version_from_wire(raw: dict[str, Any]) -> PipelineVersion:
    spec = raw.get("pipeline_spec") or {}
    components: dict[str, ComponentSpec] = {}
    root = spec.get("root") or {}
    components[ROOT_COMPONENT] = ComponentSpec(
        ROOT_COMPONENT, _params_from_defs(root.get("inputDefinitions"))
    )
    for cname, cdef in (spec.get("components") or {}).items():
        components[cname] = ComponentSpec(
            cname, _params_from_defs(cdef.get("inputDefinitions"))
        )
    return PipelineVersion(
        version_id=raw.get("pipeline_version_id", ""),
        pipeline_spec="",
        components=components,
    )


# KFP reports states outside our four-state model (CANCELED, SKIPPED, ...);
# those collapse to FAILED with the original state in error_detail.
_STATE_MAP = {
    "PENDING": RunState.PENDING,
    "RUNNING": RunState.RUNNING,
    "SUCCEEDED": RunState.SUCCEEDED,
    "FAILED": RunState.FAILED,
}


def _run_from_wire(raw: dict[str, Any], namespace: str) -> Run:
    wire_state = raw.get("state", "PENDING")
    state = _STATE_MAP.get(wire_state)
    error_detail = (raw.get("error") or {}).get("message") if isinstance(raw.get("error"), dict) else None
    if state is None:
        state = RunState.FAILED
        error_detail = error_detail or f"backend reported state {wire_state}"
    reference = raw.get("pipeline_version_reference") or {}
    run = Run(
        run_id=raw.get("run_id", ""),
        job_name=raw.get("display_name", ""),
        experiment_id=raw.get("experiment_id", ""),
        pipeline_id=reference.get("pipeline_id", ""),
        version_id=reference.get("pipeline_version_id", ""),
        params=dict((raw.get("runtime_config") or {}).get("parameters") or {}),
        namespace=namespace,
        state=state,
        created_at=_parse_ts(raw.get("created_at")),
    )
    if raw.get("finished_at"):
        run.finished_at = _parse_ts(raw.get("finished_at"))
    run.error_detail = error_detail
    return run


class RestPipelineBackend:
    """PipelineBackend adapter over the KFP REST API.

    Reads span the configured namespaces (caller's own plus shared); per-call
    namespace filtering stays with the agent, which checks visibility before
    trusting anything returned here.
    """

    def __init__(self, client: KfpRestBackend, namespaces: list[str]) -> None:
        if not namespaces:
            raise ValueError("at least one namespace is required")
        self._client = client
        self._namespaces = list(namespaces)

    def list_pipelines(self) -> list[Pipeline]:
        pipelines: list[Pipeline] = []
        for namespace in self._namespaces:
            payload = self._client.list_pipelines(namespace)
            for raw in payload.get("pipelines") or []:
                pipelines.append(self._pipeline_from_wire(raw, namespace))
        return pipelines

    def get_pipeline(self, pipeline_id: str) -> Pipeline | None:
        try:
            raw = self._client.get_pipeline(pipeline_id)
        except ToolError as exc:
            if exc.error_type is ErrorType.NOT_FOUND:
                return None
            raise
        return self._pipeline_from_wire(raw, raw.get("namespace", self._namespaces[0]))

    def _pipeline_from_wire(self, raw: dict[str, Any], namespace: str) -> Pipeline:
        pipeline_id = raw.get("pipeline_id", "")
        versions_payload = self._client.list_pipeline_versions(pipeline_id)
        versions = [
            _version_from_wire(v) for v in versions_payload.get("pipeline_versions") or []
        ]
        # KFP lists versions newest first; domain order is oldest first.
        versions.reverse()
        return Pipeline(
            id=pipeline_id,
            name=raw.get("display_name", ""),
            description=raw.get("description", ""),
            namespace=raw.get("namespace", namespace),
            created_at=_parse_ts(raw.get("created_at")),
            versions=versions,
        )

    def list_experiments(self) -> list[Experiment]:
        experiments: list[Experiment] = []
        for namespace in self._namespaces:
            payload = self._client._request(
                "GET", "/apis/v2beta1/experiments", params={"namespace": namespace}
            )
            for raw in payload.get("experiments") or []:
                experiments.append(
                    Experiment(
                        id=raw.get("experiment_id", ""),
                        name=raw.get("display_name", ""),
                        namespace=raw.get("namespace", namespace),
                        description=raw.get("description", ""),
                        created_at=_parse_ts(raw.get("created_at")),
                    )
                )
        return experiments

    def get_experiment(self, experiment_id: str) -> Experiment | None:
        return next(
            (e for e in self.list_experiments() if e.id == experiment_id), None
        )

    def create_experiment(self, name: str, namespace: str, description: str) -> Experiment:
        raw = self._client.create_experiment(name, namespace, description)
        return Experiment(
            id=raw.get("experiment_id", ""),
            name=raw.get("display_name", name),
            namespace=raw.get("namespace", namespace),
            description=raw.get("description", description),
            created_at=_parse_ts(raw.get("created_at")),
        )

    def create_run(
        self,
        experiment_id: str,
        job_name: str,
        params: dict[str, Any],
        pipeline_id: str,
        version_id: str,
        namespace: str,
    ) -> Run:
        raw = self._client.create_run(
            experiment_id=experiment_id,
            job_name=job_name,
            params=params,
            pipeline_id=pipeline_id,
            version_id=version_id,
        )
        return _run_from_wire(raw, namespace)

    def list_runs(self) -> list[Run]:
        runs: list[Run] = []
        for namespace in self._namespaces:
            payload = self._client.list_runs(namespace)
            for raw in payload.get("runs") or []:
                runs.append(_run_from_wire(raw, namespace))
        return runs

    def get_run(self, run_id: str) -> Run | None:
        try:
            raw = self._client.get_run(run_id)
        except ToolError as exc:
            if exc.error_type is ErrorType.NOT_FOUND:
                return None
            raise
        namespace = raw.get("namespace") or self._namespaces[0]
        return _run_from_wire(raw, namespace)
