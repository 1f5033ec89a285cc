"""Deterministic in-memory pipeline backend.

Run progress is driven by explicit ticks, not wall-clock time: every tick
advances each non-terminal run one transition (PENDING -> RUNNING ->
SUCCEEDED), unless a fault was injected for the run, in which case the
second transition lands on FAILED at the named step. When a run reaches a
terminal state its artifacts (metrics JSON, plot placeholders, a model
blob, per-step logs) are materialized into the linked object store under
``mlpipeline/<storage-name>/<run_id>/``.

State snapshots to a JSON file so operator CLI invocations (seed, tick,
serve) observe the same backend across processes.
"""

from __future__ import annotations

import base64
import json
import logging
import threading
import uuid
from pathlib import Path
from typing import Any

from swarm_agent.errors import ToolError
from swarm_agent.messages import utcnow
from swarm_agent.pipelines.models import (
    Experiment,
    Pipeline,
    Run,
    RunState,
    TERMINAL_STATES,
)
from swarm_agent.storage import paths
from swarm_agent.storage.memory import InMemoryObjectStore

logger = logging.getLogger(__name__)

# 1x1 transparent PNG; stands in for real plot renderings.
_PNG_PLACEHOLDER = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR4nGNgYGBgAAAABQAB"
    "pfZFQAAAAABJRU5ErkJggg=="
)


class FakePipelineBackend:
    """Fixture-seeded pipeline registry with an explicit run-state machine."""

    def __init__(
        self,
        object_store: InMemoryObjectStore | None = None,
        state_path: str | Path | None = None,
    ) -> None:
        self._pipelines: dict[str, Pipeline] = {}
        self._experiments: dict[str, Experiment] = {}
        self._runs: dict[str, Run] = {}
        self._faults: dict[str, tuple[str, str]] = {}
        self._metrics_templates: dict[str, dict[str, Any]] = {}
        self._object_store = object_store
        self._state_path = Path(state_path) if state_path else None
        self._loaded_mtime_ns: int | None = None
        self._lock = threading.RLock()

    def _sync(self) -> None:
        """Pick up snapshot changes written by another process.

        Operator commands (seed, tick) and the server share state through
        the snapshot file; a cheap mtime check per call keeps them
        coherent without a daemon.
        """
        if self._state_path is None:
            return
        try:
            mtime_ns = self._state_path.stat().st_mtime_ns
        except FileNotFoundError:
            return
        with self._lock:
            if mtime_ns == self._loaded_mtime_ns:
                return
            self.load_dict(json.loads(self._state_path.read_text(encoding="utf-8")))
            self._loaded_mtime_ns = mtime_ns
            self._rematerialize_terminal_runs()

    def _rematerialize_terminal_runs(self) -> None:
        """Rebuild artifacts after a snapshot load; puts are idempotent."""
        for run in self._runs.values():
            if run.state in TERMINAL_STATES:
                self._materialize(run)

    # -- registry reads --------------------------------------------------------

    def list_pipelines(self) -> list[Pipeline]:
        self._sync()
        return list(self._pipelines.values())

    def get_pipeline(self, pipeline_id: str) -> Pipeline | None:
        self._sync()
        return self._pipelines.get(pipeline_id)

    def find_pipelines_by_name(self, name: str, namespace: str) -> list[Pipeline]:
        self._sync()
        return [
            p
            for p in self._pipelines.values()
            if p.name == name and p.namespace == namespace
        ]

    def resolve_pipeline_name(self, name: str) -> Pipeline | None:
        """Find a pipeline by registry name or storage folder name."""
        self._sync()
        for candidate in paths.name_candidates(name):
            match = next((p for p in self._pipelines.values() if p.name == candidate), None)
            if match is not None:
                return match
        return None

    def list_experiments(self) -> list[Experiment]:
        self._sync()
        return list(self._experiments.values())

    def get_experiment(self, experiment_id: str) -> Experiment | None:
        self._sync()
        return self._experiments.get(experiment_id)

    def list_runs(self) -> list[Run]:
        self._sync()
        return list(self._runs.values())

    def get_run(self, run_id: str) -> Run | None:
        self._sync()
        return self._runs.get(run_id)

    def runs_for_pipeline(self, pipeline_name: str) -> list[Run]:
        """Runs for a pipeline (either name form), newest first."""
        pipeline = self.resolve_pipeline_name(pipeline_name)
        if pipeline is None:
            return []
        runs = [r for r in self._runs.values() if r.pipeline_id == pipeline.id]
        runs.sort(key=lambda r: (r.created_at, r.run_id), reverse=True)
        return runs

    def metrics_template(self, pipeline_id: str) -> dict[str, Any] | None:
        self._sync()
        return self._metrics_templates.get(pipeline_id)

    # -- registry writes -------------------------------------------------------

    def add_pipeline(self, pipeline: Pipeline, metrics_template: dict[str, Any] | None = None) -> None:
        with self._lock:
            if pipeline.id in self._pipelines:
                raise ValueError(f"pipeline id {pipeline.id!r} already present")
            self._pipelines[pipeline.id] = pipeline
            if metrics_template is not None:
                self._metrics_templates[pipeline.id] = metrics_template
            self._persist()

    def add_experiment(self, experiment: Experiment) -> None:
        with self._lock:
            self._experiments[experiment.id] = experiment
            self._persist()

    def create_experiment(self, name: str, namespace: str, description: str) -> Experiment:
        self._sync()
        with self._lock:
            if any(e.name == name and e.namespace == namespace for e in self._experiments.values()):
                raise ToolError.invalid_argument(
                    f"experiment {name!r} already exists in namespace {namespace!r}",
                    name=name,
                    namespace=namespace,
                )
            experiment = Experiment(
                id=f"exp-{uuid.uuid4().hex[:12]}",
                name=name,
                namespace=namespace,
                description=description,
                created_at=utcnow(),
            )
            self._experiments[experiment.id] = experiment
            self._persist()
            return experiment

    def create_run(
        self,
        experiment_id: str,
        job_name: str,
        params: dict[str, Any],
        pipeline_id: str,
        version_id: str,
        namespace: str,
    ) -> Run:
        self._sync()
        with self._lock:
            run = Run(
                run_id=f"run-{uuid.uuid4().hex[:12]}",
                job_name=job_name,
                experiment_id=experiment_id,
                pipeline_id=pipeline_id,
                version_id=version_id,
                params=params,
                namespace=namespace,
            )
            self._runs[run.run_id] = run
            self._persist()
            return run

    # -- state machine ---------------------------------------------------------

    def fault_inject(self, run_id: str, step: str, error_text: str) -> None:
        self._sync()
        with self._lock:
            if run_id not in self._runs:
                raise ToolError.not_found(f"run {run_id!r} not found")
            self._faults[run_id] = (step, error_text)
            self._persist()

    def tick(self, n: int = 1) -> None:
        """Advance every non-terminal run one transition per tick."""
        self._sync()
        with self._lock:
            for _ in range(n):
                for run in self._runs.values():
                    if run.state in TERMINAL_STATES:
                        continue
                    if run.state is RunState.PENDING:
                        run.transition(RunState.RUNNING)
                    elif run.state is RunState.RUNNING:
                        fault = self._faults.get(run.run_id)
                        if fault is not None:
                            step, error_text = fault
                            run.transition(
                                RunState.FAILED,
                                error_detail=f"step {step} failed: {error_text}",
                                failed_step=step,
                            )
                        else:
                            run.transition(RunState.SUCCEEDED)
                        self._materialize(run)
            self._persist()

    # -- artifact materialization ------------------------------------------------

    def _materialize(self, run: Run) -> None:
        if self._object_store is None:
            return
        pipeline = self._pipelines.get(run.pipeline_id)
        if pipeline is None:
            return
        store = self._object_store
        store.ensure_bucket(paths.ARTIFACT_BUCKET)
        prefix = paths.run_prefix(pipeline.name, run.run_id)
        version = pipeline.get_version(run.version_id) or pipeline.latest_version()
        steps = [name for name in version.components if name != "root"]

        if run.state is RunState.SUCCEEDED:
            template = self._metrics_templates.get(pipeline.id) or {}
            store.put_object(
                paths.ARTIFACT_BUCKET,
                prefix + paths.METRICS_FILE,
                json.dumps(template, indent=2).encode("utf-8"),
                content_type="application/json",
            )
            for plot in (paths.ROC_CURVE_FILE, paths.CONFUSION_MATRIX_FILE):
                store.put_object(
                    paths.ARTIFACT_BUCKET, prefix + plot, _PNG_PLACEHOLDER, content_type="image/png"
                )
            store.put_object(
                paths.ARTIFACT_BUCKET,
                prefix + paths.MODEL_FILE,
                b"MODELBIN\x00" + run.run_id.encode("utf-8"),
                content_type="application/octet-stream",
            )
            for step in steps:
                store.put_object(
                    paths.ARTIFACT_BUCKET,
                    prefix + paths.step_log_file(step),
                    self._step_log(run, step, ok=True),
                    content_type="text/plain",
                )
        else:  # FAILED
            failed = run.failed_step
            for step in steps:
                if failed is not None and step == failed:
                    store.put_object(
                        paths.ARTIFACT_BUCKET,
                        prefix + paths.step_log_file(step),
                        self._step_log(run, step, ok=False),
                        content_type="text/plain",
                    )
                    break
                store.put_object(
                    paths.ARTIFACT_BUCKET,
                    prefix + paths.step_log_file(step),
                    self._step_log(run, step, ok=True),
                    content_type="text/plain",
                )
            else:
                if failed is not None:
                    store.put_object(
                        paths.ARTIFACT_BUCKET,
                        prefix + paths.step_log_file(failed),
                        self._step_log(run, failed, ok=False),
                        content_type="text/plain",
                    )

    def _step_log(self, run: Run, step: str, *, ok: bool) -> bytes:
        lines = [
            f"INFO  starting step {step} for run {run.run_id}",
            f"INFO  params: {json.dumps(run.params, sort_keys=True)}",
        ]
        if ok:
            lines.append(f"INFO  step {step} completed")
        else:
            lines.append(f"ERROR step {step} failed: {run.error_detail}")
        return ("\n".join(lines) + "\n").encode("utf-8")

    # -- snapshots ---------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "pipelines": [p.to_dict() for p in self._pipelines.values()],
            "metrics_templates": self._metrics_templates,
            "experiments": [e.to_dict() for e in self._experiments.values()],
            "runs": [r.to_dict() for r in self._runs.values()],
            "faults": {k: list(v) for k, v in self._faults.items()},
        }

    def load_dict(self, raw: dict[str, Any]) -> None:
        with self._lock:
            self._pipelines = {p["id"]: Pipeline.from_dict(p) for p in raw.get("pipelines", [])}
            self._metrics_templates = dict(raw.get("metrics_templates") or {})
            self._experiments = {
                e["id"]: Experiment.from_dict(e) for e in raw.get("experiments", [])
            }
            self._runs = {r["run_id"]: Run.from_dict(r) for r in raw.get("runs", [])}
            self._faults = {k: (v[0], v[1]) for k, v in (raw.get("faults") or {}).items()}

    def _persist(self) -> None:
        if self._state_path is None:
            return
        tmp = self._state_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")
        tmp.replace(self._state_path)
        self._loaded_mtime_ns = self._state_path.stat().st_mtime_ns

    def load_state(self) -> bool:
        if self._state_path is None or not self._state_path.exists():
            return False
        with self._lock:
            self.load_dict(json.loads(self._state_path.read_text(encoding="utf-8")))
            self._loaded_mtime_ns = self._state_path.stat().st_mtime_ns
            self._rematerialize_terminal_runs()
        return True

    # -- fixture seeding ----------------------------------------------------------

    def load_fixture(self, fixture: dict[str, Any]) -> None:
        """Seed pipelines, experiments, and runs; materialize artifacts for
        runs the fixture declares as already terminal."""
        with self._lock:
            for raw in fixture.get("pipelines", []):
                pipeline = Pipeline.from_dict(raw)
                self._pipelines[pipeline.id] = pipeline
                if raw.get("metrics_template"):
                    self._metrics_templates[pipeline.id] = raw["metrics_template"]
            for raw in fixture.get("experiments", []):
                experiment = Experiment.from_dict(raw)
                self._experiments[experiment.id] = experiment
            for raw in fixture.get("runs", []):
                run = Run.from_dict(raw)
                if run.state in TERMINAL_STATES and run.finished_at is None:
                    run.finished_at = run.created_at
                self._runs[run.run_id] = run
                if run.state in TERMINAL_STATES:
                    self._materialize_fixture_run(run, raw)
            self._persist()

    def _materialize_fixture_run(self, run: Run, raw: dict[str, Any]) -> None:
        overrides = raw.get("artifacts") or {}
        pipeline = self._pipelines.get(run.pipeline_id)
        if self._object_store is None or pipeline is None:
            return
        if overrides:
            saved = self._metrics_templates.get(pipeline.id)
            if "metrics.json" in overrides:
                self._metrics_templates[pipeline.id] = overrides["metrics.json"]
            try:
                self._materialize(run)
            finally:
                if saved is not None:
                    self._metrics_templates[pipeline.id] = saved
                elif "metrics.json" in overrides:
                    self._metrics_templates.pop(pipeline.id, None)
        else:
            self._materialize(run)
