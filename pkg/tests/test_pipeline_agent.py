"""Pipeline tool operations: visibility, resolution, run validation."""

from __future__ import annotations

import pytest

from swarm_agent.errors import ErrorType, ToolError
from swarm_agent.messages import utcnow
from swarm_agent.pipelines.agent import PipelineAgent, build_pipeline_tools
from swarm_agent.pipelines.models import (
    ComponentSpec,
    ParameterDef,
    ParameterType,
    Pipeline,
    PipelineVersion,
    RunState,
)
from tests.conftest import DT_PIPELINE, SVM_PIPELINE, SVM_PIPELINE_ID


@pytest.fixture()
def agent(backend) -> PipelineAgent:
    return PipelineAgent(backend)


def error_of(excinfo) -> ToolError:
    return excinfo.value


class TestGetPipelines:
    def test_defaults_to_callers_namespace(self, agent, alice):
        out = agent.get_pipelines(alice)
        assert out["namespace"] == "shared"
        assert out["namespace_type"] == "shared"
        assert out["total_pipelines"] == 2
        assert out["total_available"] == 4
        assert [p["name"] for p in out["pipelines"]] == [SVM_PIPELINE, DT_PIPELINE]

    def test_private_namespace_listing(self, agent, bob):
        out = agent.get_pipelines(bob)
        assert out["namespace"] == "team-alpha"
        assert out["namespace_type"] == "private"
        assert out["total_pipelines"] == 2

    def test_anyone_may_list_shared(self, agent, bob):
        out = agent.get_pipelines(bob, namespace="shared")
        assert out["total_pipelines"] == 2

    def test_foreign_namespace_is_denied(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.get_pipelines(alice, namespace="team-alpha")
        assert error_of(excinfo).error_type is ErrorType.PERMISSION_DENIED


class TestDetailsAndResolution:
    def test_details_by_registry_name(self, agent, alice):
        out = agent.get_pipeline_details(alice, SVM_PIPELINE)
        assert out["pipeline_id"] == SVM_PIPELINE_ID
        assert "id" not in out
        assert out["latest_version_id"] == "v1"
        assert out["version_ids"] == ["v1"]

    def test_details_by_storage_name(self, agent, alice):
        out = agent.get_pipeline_details(alice, "diabetes-svm-classification")
        assert out["pipeline_id"] == SVM_PIPELINE_ID

    def test_unknown_name_is_not_found_with_guidance(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.get_pipeline_details(alice, "nonexistent")
        err = error_of(excinfo)
        assert err.error_type is ErrorType.NOT_FOUND
        assert "get_pipelines" in err.message

    def test_version_details_carry_typed_defaults(self, agent, alice):
        out = agent.get_pipeline_version_details(alice, SVM_PIPELINE_ID, "v1")
        root = next(c for c in out["components"] if c["name"] == "root")
        by_name = {p["name"]: p for p in root["parameters"]}
        assert by_name["test_size"] == {"name": "test_size", "type": "NUMBER_DOUBLE", "default": 0.3}
        assert by_name["random_state"]["default"] == 42
        assert by_name["svm_C"]["default"] == 1.0
        assert by_name["svm_kernel"]["default"] == "rbf"
        names = {c["name"] for c in out["components"]}
        assert names == {"root", "comp-load-data", "comp-split-data", "comp-train-svm", "comp-evaluate"}

    def test_version_defaults_to_latest_when_omitted(self, agent, alice):
        out = agent.get_pipeline_version_details(alice, SVM_PIPELINE_ID, "")
        assert out["version_id"] == "v1"

    def test_unknown_version_is_not_found_with_known_versions(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.get_pipeline_version_details(alice, SVM_PIPELINE_ID, "v9")
        assert error_of(excinfo).details["known_versions"] == ["v1"]

    def test_version_details_of_foreign_pipeline_denied(self, agent, alice, backend):
        churn_id = next(p.id for p in backend.list_pipelines() if p.namespace == "team-alpha")
        with pytest.raises(ToolError) as excinfo:
            agent.get_pipeline_version_details(alice, churn_id, "")
        assert error_of(excinfo).error_type is ErrorType.PERMISSION_DENIED

    def test_ambiguous_name_lists_candidates(self, agent, bob):
        with pytest.raises(ToolError) as excinfo:
            agent.get_pipeline_id(bob, "customer-churn-xgb-pipeline")
        err = error_of(excinfo)
        assert err.error_type is ErrorType.INVALID_ARGUMENT
        assert len(err.details["matches"]) == 2

    def test_names_invisible_to_the_caller_do_not_resolve(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.get_pipeline_id(alice, "customer-churn-xgb-pipeline")
        assert error_of(excinfo).error_type is ErrorType.NOT_FOUND


class TestListRuns:
    def test_visibility_and_order(self, agent, alice, bob):
        mine = agent.list_runs(alice)
        assert mine["total_runs"] == 3
        assert [r["run_id"] for r in mine["runs"]] == [
            "run-dt-0001",
            "run-svm-0001",
            "run-svm-0002",
        ]
        theirs = agent.list_runs(bob)
        assert theirs["total_runs"] == 4
        assert {r["run_id"] for r in theirs["runs"]} == {
            "run-dt-0001",
            "run-svm-0001",
            "run-svm-0002",
            "run-churn-0001",
        }

    def test_filter_by_pipeline_name(self, agent, alice):
        out = agent.list_runs(alice, pipeline_name="diabetes-svm-classification")
        assert [r["run_id"] for r in out["runs"]] == ["run-svm-0001", "run-svm-0002"]

    def test_filter_by_experiment_name(self, agent, alice):
        out = agent.list_runs(alice, experiment_name="diabetes-exp")
        assert out["total_runs"] == 3

    def test_unknown_experiment_is_not_found(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.list_runs(alice, experiment_name="ghost")
        assert error_of(excinfo).error_type is ErrorType.NOT_FOUND

    def test_run_details_include_pipeline_name(self, agent, alice):
        out = agent.get_run_details(alice, "run-svm-0001")
        assert out["pipeline_name"] == SVM_PIPELINE
        assert out["state"] == "SUCCEEDED"
        assert "finished_at" in out

    def test_foreign_run_details_denied(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.get_run_details(alice, "run-churn-0001")
        assert error_of(excinfo).error_type is ErrorType.PERMISSION_DENIED


class TestRunPipeline:
    def test_happy_path_merges_defaults(self, agent, alice, backend):
        out = agent.run_pipeline(
            alice,
            pipeline_name=SVM_PIPELINE,
            job_name="svm-retrain",
            experiment_name="diabetes-exp",
            params={"svm_C": 10.0},
        )
        assert out["state"] == "PENDING"
        assert out["params"] == {
            "test_size": 0.3,
            "random_state": 42,
            "svm_C": 10.0,
            "svm_kernel": "rbf",
        }
        assert out["experiment_name"] == "diabetes-exp"
        assert backend.get_run(out["run_id"]).state is RunState.PENDING

    def test_type_mismatch_is_invalid_argument(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.run_pipeline(
                alice, pipeline_name=SVM_PIPELINE, job_name="j", params={"svm_C": "high"}
            )
        err = error_of(excinfo)
        assert err.error_type is ErrorType.INVALID_ARGUMENT
        assert err.retryable is True
        assert err.details["expected_type"] == "NUMBER_DOUBLE"

    def test_bool_does_not_pass_as_number(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.run_pipeline(
                alice, pipeline_name=SVM_PIPELINE, job_name="j", params={"svm_C": True}
            )
        assert error_of(excinfo).error_type is ErrorType.INVALID_ARGUMENT

    def test_unknown_parameter_reports_valid_ones(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.run_pipeline(
                alice, pipeline_name=SVM_PIPELINE, job_name="j", params={"gamma": 1.0}
            )
        assert error_of(excinfo).details["valid_parameters"] == [
            "random_state",
            "svm_C",
            "svm_kernel",
            "test_size",
        ]

    def test_named_experiment_must_exist(self, agent, alice):
        with pytest.raises(ToolError) as excinfo:
            agent.run_pipeline(
                alice, pipeline_name=SVM_PIPELINE, job_name="j", experiment_name="ghost"
            )
        err = error_of(excinfo)
        assert err.error_type is ErrorType.NOT_FOUND
        assert "create_experiment" in err.message

    def test_omitted_experiment_creates_default(self, agent, alice, backend):
        out = agent.run_pipeline(alice, pipeline_name=SVM_PIPELINE, job_name="j")
        assert out["experiment_name"] == "default"
        experiments = [e for e in backend.list_experiments() if e.name == "default"]
        assert [e.namespace for e in experiments] == ["shared"]
        # A second run reuses the default experiment instead of duplicating it.
        agent.run_pipeline(alice, pipeline_name=SVM_PIPELINE, job_name="j2")
        assert len([e for e in backend.list_experiments() if e.name == "default"]) == 1

    def test_writes_outside_own_namespace_denied(self, agent, bob):
        with pytest.raises(ToolError) as excinfo:
            agent.run_pipeline(bob, pipeline_name=SVM_PIPELINE, job_name="j")
        assert error_of(excinfo).error_type is ErrorType.PERMISSION_DENIED

    def test_missing_required_parameter_rejected(self, agent, alice, backend):
        backend.add_pipeline(
            Pipeline(
                id="pipe-required",
                name="needs-input-pipeline",
                description="",
                namespace="shared",
                created_at=utcnow(),
                versions=[
                    PipelineVersion(
                        version_id="v1",
                        pipeline_spec="",
                        components={
                            "root": ComponentSpec(
                                name="root",
                                parameters={
                                    "dataset_uri": ParameterDef(ParameterType.STRING)
                                },
                            )
                        },
                    )
                ],
            )
        )
        with pytest.raises(ToolError) as excinfo:
            agent.run_pipeline(alice, pipeline_name="needs-input-pipeline", job_name="j")
        assert error_of(excinfo).details["missing_parameters"] == ["dataset_uri"]

    def test_create_experiment_requires_name(self, agent, alice):
        with pytest.raises(ToolError):
            agent.create_experiment(alice, "")

    def test_create_experiment_lands_in_caller_namespace(self, agent, bob, backend):
        out = agent.create_experiment(bob, "tuning", "sweep")
        assert out["namespace"] == "team-alpha"
        assert backend.get_experiment(out["id"]) is not None


class TestToolWiring:
    def test_eight_tools_with_expected_names(self, agent):
        tools = build_pipeline_tools(agent)
        names = [d.name for d, _ in tools]
        assert names == [
            "get_pipelines",
            "get_pipeline_details",
            "get_pipeline_version_details",
            "get_pipeline_id",
            "create_experiment",
            "run_pipeline",
            "list_runs",
            "get_run_details",
        ]

    def test_handlers_pass_arguments_through(self, agent, alice):
        tools = dict((d.name, h) for d, h in build_pipeline_tools(agent))
        out = tools["get_pipeline_details"](alice, {"pipeline_name": SVM_PIPELINE})
        assert out["pipeline_id"] == SVM_PIPELINE_ID
