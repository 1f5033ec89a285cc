"""Fake pipeline backend: deterministic lifecycle, artifacts, persistence."""

from __future__ import annotations

import json
import random

import pytest

from swarm_agent.errors import ToolError
from swarm_agent.pipelines.fake import FakePipelineBackend
from swarm_agent.pipelines.models import TERMINAL_STATES, RunState
from swarm_agent.storage import paths
from swarm_agent.storage.memory import InMemoryObjectStore
from tests.conftest import (
    DT_PIPELINE_ID,
    SVM_PIPELINE,
    SVM_PIPELINE_ID,
    load_fixture_dict,
    make_backend,
)


def start_run(backend: FakePipelineBackend, job_name: str = "job") -> str:
    run = backend.create_run(
        experiment_id="exp-0001",
        job_name=job_name,
        params={"svm_C": 1.0},
        pipeline_id=SVM_PIPELINE_ID,
        version_id="v1",
        namespace="shared",
    )
    assert run.state is RunState.PENDING
    return run.run_id


class TestLookups:
    def test_fixture_seeds_pipelines_experiments_runs(self, backend):
        assert len(backend.list_pipelines()) == 4
        assert len(backend.list_experiments()) == 2
        assert len(backend.list_runs()) == 4

    def test_name_resolution_accepts_both_forms(self, backend):
        by_full = backend.resolve_pipeline_name(SVM_PIPELINE)
        by_storage = backend.resolve_pipeline_name("diabetes-svm-classification")
        assert by_full is not None and by_storage is not None
        assert by_full.id == by_storage.id == SVM_PIPELINE_ID

    def test_find_by_name_is_namespace_scoped(self, backend):
        assert backend.find_pipelines_by_name(SVM_PIPELINE, "shared")
        assert not backend.find_pipelines_by_name(SVM_PIPELINE, "team-alpha")
        assert len(backend.find_pipelines_by_name("customer-churn-xgb-pipeline", "team-alpha")) == 2

    def test_runs_for_pipeline_newest_first(self, backend):
        runs = backend.runs_for_pipeline(SVM_PIPELINE)
        assert [r.run_id for r in runs] == ["run-svm-0001", "run-svm-0002"]

    def test_metrics_template_is_attached(self, backend):
        template = backend.metrics_template(SVM_PIPELINE_ID)
        assert template["auc"] == 0.842
        assert backend.metrics_template("ghost") is None


class TestLifecycle:
    def test_two_ticks_reach_success(self, backend):
        run_id = start_run(backend)
        backend.tick()
        assert backend.get_run(run_id).state is RunState.RUNNING
        backend.tick()
        run = backend.get_run(run_id)
        assert run.state is RunState.SUCCEEDED
        assert run.finished_at is not None

    def test_injected_fault_fails_at_named_step(self, backend):
        run_id = start_run(backend)
        backend.fault_inject(run_id, "comp-train-svm", "CUDA out of memory")
        backend.tick(2)
        run = backend.get_run(run_id)
        assert run.state is RunState.FAILED
        assert run.failed_step == "comp-train-svm"
        assert run.error_detail == "step comp-train-svm failed: CUDA out of memory"

    def test_fault_inject_unknown_run_raises(self, backend):
        with pytest.raises(ToolError):
            backend.fault_inject("ghost", "step", "boom")

    def test_terminal_runs_ignore_further_ticks(self, backend):
        run_id = start_run(backend)
        backend.tick(2)
        finished = backend.get_run(run_id).finished_at
        backend.tick(5)
        run = backend.get_run(run_id)
        assert run.state is RunState.SUCCEEDED
        assert run.finished_at == finished

    def test_duplicate_experiment_name_in_namespace_rejected(self, backend):
        with pytest.raises(ToolError):
            backend.create_experiment("diabetes-exp", "shared", "dup")
        backend.create_experiment("diabetes-exp", "team-alpha", "other ns is fine")


class TestArtifacts:
    def test_success_materializes_canonical_files(self, backend, object_store):
        run_id = start_run(backend)
        backend.tick(2)
        prefix = paths.run_prefix(SVM_PIPELINE, run_id)
        keys = {s.key[len(prefix):] for s in object_store.list_objects("mlpipeline", prefix)}
        assert keys == {
            "metrics.json",
            "roc_curve.png",
            "confusion_matrix.png",
            "model.bin",
            "step-comp-load-data.log",
            "step-comp-split-data.log",
            "step-comp-train-svm.log",
            "step-comp-evaluate.log",
        }

    def test_metrics_json_comes_from_the_template(self, backend, object_store):
        run_id = start_run(backend)
        backend.tick(2)
        key = paths.run_prefix(SVM_PIPELINE, run_id) + "metrics.json"
        metrics = json.loads(object_store.get_object("mlpipeline", key).decode())
        assert metrics["accuracy"] == 0.752
        assert metrics["confusion_matrix"] == [[49, 18], [15, 51]]

    def test_no_artifacts_before_terminal_state(self, backend, object_store):
        run_id = start_run(backend)
        backend.tick()
        prefix = paths.run_prefix(SVM_PIPELINE, run_id)
        assert object_store.list_objects("mlpipeline", prefix) == []

    def test_failed_run_logs_stop_at_failed_step(self, backend, object_store):
        run_id = start_run(backend)
        backend.fault_inject(run_id, "comp-train-svm", "exploded")
        backend.tick(2)
        prefix = paths.run_prefix(SVM_PIPELINE, run_id)
        keys = {s.key[len(prefix):] for s in object_store.list_objects("mlpipeline", prefix)}
        assert "step-comp-train-svm.log" in keys
        assert "step-comp-evaluate.log" not in keys
        assert "metrics.json" not in keys
        log = object_store.get_object("mlpipeline", prefix + "step-comp-train-svm.log").decode()
        assert "ERROR" in log and "exploded" in log

    def test_fixture_run_metrics_override(self, backend, object_store):
        key = paths.run_prefix(SVM_PIPELINE, "run-svm-0002") + "metrics.json"
        metrics = json.loads(object_store.get_object("mlpipeline", key).decode())
        assert "auc" not in metrics
        assert metrics["confusion_matrix"] == [[50, 17], [14, 52]]
        # The override is scoped to that run; the newer run keeps the template.
        newer = json.loads(
            object_store.get_object(
                "mlpipeline", paths.run_prefix(SVM_PIPELINE, "run-svm-0001") + "metrics.json"
            ).decode()
        )
        assert newer["auc"] == 0.842


class TestPersistence:
    def test_state_roundtrips_through_snapshot(self, tmp_path):
        state = tmp_path / "state.json"
        backend = FakePipelineBackend(state_path=state)
        backend.load_fixture(load_fixture_dict())
        run_id = start_run(backend)
        backend.fault_inject(run_id, "comp-evaluate", "oom")

        reloaded = FakePipelineBackend(state_path=state)
        assert reloaded.load_state() is True
        assert len(reloaded.list_runs()) == 5
        reloaded.tick(2)
        assert reloaded.get_run(run_id).state is RunState.FAILED
        assert reloaded.get_run(run_id).failed_step == "comp-evaluate"

    def test_sibling_instances_sync_via_snapshot_mtime(self, tmp_path):
        state = tmp_path / "state.json"
        writer = FakePipelineBackend(state_path=state)
        writer.load_fixture(load_fixture_dict())
        reader = FakePipelineBackend(state_path=state)
        reader.load_state()
        assert len(reader.list_runs()) == 4

        run_id = start_run(writer, job_name="late-run")
        assert reader.get_run(run_id) is not None

    def test_reload_rematerializes_artifacts(self, tmp_path):
        state = tmp_path / "state.json"
        seeded = FakePipelineBackend(state_path=state)
        seeded.load_fixture(load_fixture_dict())

        store = InMemoryObjectStore()
        reloaded = FakePipelineBackend(object_store=store, state_path=state)
        reloaded.load_state()
        key = paths.run_prefix(SVM_PIPELINE, "run-svm-0001") + "metrics.json"
        assert json.loads(store.get_object("mlpipeline", key).decode())["accuracy"] == 0.752


class TestSchedulesProperty:
    def test_random_tick_fault_schedules_preserve_invariants(self):
        rng = random.Random(20250825)
        steps = ["comp-load-data", "comp-split-data", "comp-train-svm", "comp-evaluate"]
        for _ in range(50):
            backend = make_backend(None)
            run_ids = [start_run(backend, f"job-{i}") for i in range(5)]
            faulted: dict[str, str] = {}
            for _ in range(rng.randint(1, 6)):
                if rng.random() < 0.4:
                    victim = rng.choice(run_ids)
                    step = rng.choice(steps)
                    backend.fault_inject(victim, step, "injected")
                    if backend.get_run(victim).state not in TERMINAL_STATES:
                        faulted[victim] = step
                else:
                    backend.tick()
            backend.tick(2)
            for run_id in run_ids:
                run = backend.get_run(run_id)
                assert run.state in TERMINAL_STATES
                if run_id in faulted:
                    assert run.state is RunState.FAILED
                    assert run.failed_step == faulted[run_id]
                    assert faulted[run_id] in run.error_detail
                else:
                    assert run.state is RunState.SUCCEEDED
