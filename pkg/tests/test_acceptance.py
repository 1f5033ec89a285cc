"""Release acceptance gate.

One test per shipping criterion, each checked at its stated numeric
tolerance and wall-clock budget. The terminal summary (see conftest)
prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np
import pytest
from fastapi.testclient import TestClient

from swarm_agent.gateway.app import create_app
from swarm_agent.gateway.config import parse_config
from swarm_agent.messages import ChatMessage, utcnow
from swarm_agent.orchestrator.dispatch import execute_call
from swarm_agent.orchestrator.registry import ToolRegistry
from swarm_agent.orchestrator.turn import (
    EVENT_FINAL,
    EVENT_TOKEN,
    EVENT_TOOL_CALL,
    EVENT_TOOL_RESULT,
)
from swarm_agent.pipelines.agent import PipelineAgent, build_pipeline_tools
from swarm_agent.pipelines.fake import FakePipelineBackend
from swarm_agent.pipelines.models import (
    ComponentSpec,
    ParameterDef,
    ParameterType,
    Pipeline,
    PipelineVersion,
    RunState,
    TERMINAL_STATES,
)
from swarm_agent.rag.agent import RagAgent, build_rag_tools
from swarm_agent.rag.chunking import chunk_text, normalize_body
from swarm_agent.rag.embedding import HashEmbedder
from swarm_agent.rag.index import VectorIndex
from swarm_agent.runtime import build_services, make_run_resolver, seed_fixture
from swarm_agent.sessions.models import UserContext
from swarm_agent.storage.agent import StorageAgent, build_storage_tools
from swarm_agent.storage.memory import InMemoryObjectStore
from swarm_agent.storage.metrics import compute_metrics_from_confusion, parse_model_metrics
from swarm_agent.storage.models import ConfusionMatrix

from tests.conftest import (
    DT_PIPELINE,
    FIXTURES_DIR,
    SCRIPTS_DIR,
    SVM_PIPELINE,
    make_backend,
    make_orchestrator,
    make_registry,
)

METRIC_TOLERANCE = 1e-3

CHURN_PIPELINE = "customer-churn-xgb-pipeline"


@contextmanager
def time_budget(seconds: float):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.3f}s; budget is {seconds}s"


def _alice() -> UserContext:
    return UserContext(
        user_id="alice",
        namespace="shared",
        allowed_buckets=frozenset({"mlpipeline"}),
        credential_ref="cred-alice",
    )


def _bob() -> UserContext:
    return UserContext(
        user_id="bob",
        namespace="team-alpha",
        allowed_buckets=frozenset({"team-alpha-data"}),
        credential_ref="cred-bob",
    )


def _collect(orch, ctx, text):
    new_messages: list[ChatMessage] = []
    events = list(orch.run_turn(ctx, [], text, new_messages))
    return events, new_messages


def _non_token(events):
    return [e for e in events if e.kind != EVENT_TOKEN]


class TestMetricsConsistency:
    def test_confusion_derived_metrics_match_reported_values(self):
        with time_budget(0.1):
            svm = compute_metrics_from_confusion(ConfusionMatrix.from_rows([[49, 18], [15, 51]]))
            for got, reported in [
                (svm.accuracy, 0.752),
                (svm.precision, 0.739),
                (svm.recall, 0.773),
                (svm.f1, 0.756),
            ]:
                assert abs(got - reported) <= METRIC_TOLERANCE

            dt = compute_metrics_from_confusion(ConfusionMatrix.from_rows([[77, 34], [31, 79]]))
            for got, reported in [
                (dt.accuracy, 0.706),
                (dt.precision, 0.699),
                (dt.recall, 0.718),
                (dt.f1, 0.709),
            ]:
                assert abs(got - reported) <= METRIC_TOLERANCE

    def test_auc_is_stored_value_passthrough_only(self):
        with time_budget(0.1):
            derived = compute_metrics_from_confusion(
                ConfusionMatrix.from_rows([[49, 18], [15, 51]])
            )
            assert not hasattr(derived, "auc")
            for auc in (0.842, 0.708):
                parsed = parse_model_metrics(
                    {
                        "accuracy": 0.75,
                        "precision": 0.74,
                        "recall": 0.77,
                        "f1": 0.76,
                        "auc": auc,
                        "confusion_matrix": [[49, 18], [15, 51]],
                    }
                )
                assert parsed.auc == auc
                assert parsed.to_dict()["auc"] == auc


class TestGoldenPipelineListing:
    def test_turn_is_exactly_call_result_final(self):
        registry = make_registry(make_backend(store := InMemoryObjectStore()), store)
        orch = make_orchestrator("va.json", registry)
        with time_budget(1.0):
            events, _ = _collect(orch, _alice(), "What pipelines are available?")
        core = _non_token(events)
        assert [e.kind for e in core] == [EVENT_TOOL_CALL, EVENT_TOOL_RESULT, EVENT_FINAL]
        call, result, final = core
        assert call.data["name"] == "get_pipelines"
        assert result.data["content"]["result"]["total_pipelines"] == 2
        assert SVM_PIPELINE in final.data["text"]
        assert DT_PIPELINE in final.data["text"]


class TestGoldenParameterDrilldown:
    def test_three_iterations_and_defaults_in_final(self):
        registry = make_registry(make_backend(store := InMemoryObjectStore()), store)
        orch = make_orchestrator("vb.json", registry)
        with time_budget(1.0):
            events, _ = _collect(
                orch, _alice(), "What parameters does the SVM pipeline accept?"
            )
        calls = [e.data["name"] for e in events if e.kind == EVENT_TOOL_CALL]
        assert calls == ["get_pipeline_details", "get_pipeline_version_details"]
        final = events[-1]
        assert final.kind == EVENT_FINAL
        assert final.data["iterations"] == 3
        text = final.data["text"]
        for needle in (
            "test_size",
            "0.3",
            "random_state",
            "42",
            "svm_C",
            "1.0",
            "svm_kernel",
            "rbf",
        ):
            assert needle in text


class TestGoldenModelComparison:
    def test_concurrent_metrics_batch(self):
        object_store = InMemoryObjectStore()
        backend = make_backend(object_store)
        pipeline_agent = PipelineAgent(backend)
        storage_agent = StorageAgent(
            store=object_store, run_resolver=make_run_resolver(backend)
        )
        rag_agent = RagAgent(VectorIndex(32), HashEmbedder(32))

        windows: list[tuple[float, float]] = []
        guard = threading.Lock()

        registry = ToolRegistry()
        registry.register_all(build_pipeline_tools(pipeline_agent), "kfp")
        storage_tools = []
        for descriptor, handler in build_storage_tools(storage_agent):
            if descriptor.name == "get_model_metrics":

                def delayed(ctx, args, _handler=handler):
                    started = time.monotonic()
                    time.sleep(0.1)
                    payload = _handler(ctx, args)
                    with guard:
                        windows.append((started, time.monotonic()))
                    return payload

                storage_tools.append((descriptor, delayed))
            else:
                storage_tools.append((descriptor, handler))
        registry.register_all(storage_tools, "minio")
        registry.register_all(build_rag_tools(rag_agent), "rag")

        orch = make_orchestrator("vc.json", registry)
        with time_budget(2.0):
            events, _ = _collect(
                orch, _alice(), "Compare the SVM and decision tree models"
            )

        core = _non_token(events)
        kinds = [e.kind for e in core]
        # One listing round-trip, then one batch: two adjacent tool_call
        # events with no result between them.
        assert kinds == [
            EVENT_TOOL_CALL,
            EVENT_TOOL_RESULT,
            EVENT_TOOL_CALL,
            EVENT_TOOL_CALL,
            EVENT_TOOL_RESULT,
            EVENT_TOOL_RESULT,
            EVENT_FINAL,
        ]
        assert core[0].data["name"] == "list_user_buckets"
        assert core[2].data["name"] == core[3].data["name"] == "get_model_metrics"

        assert len(windows) == 2
        latest_start = max(w[0] for w in windows)
        earliest_end = min(w[1] for w in windows)
        assert latest_start < earliest_end, "metric calls did not overlap"

        text = events[-1].data["text"]
        for value in ("0.752", "0.739", "0.773", "0.756", "0.842",
                      "0.706", "0.699", "0.718", "0.709", "0.708"):
            assert value in text


class TestSelfCorrection:
    def test_invalid_argument_retry_ends_pending(self):
        object_store = InMemoryObjectStore()
        backend = make_backend(object_store)
        registry = make_registry(backend, object_store)
        orch = make_orchestrator("self_correction.json", registry)
        with time_budget(1.0):
            events, _ = _collect(
                orch, _alice(), "Run the SVM pipeline with svm_C set to high"
            )
        calls = [e for e in events if e.kind == EVENT_TOOL_CALL]
        results = [e for e in events if e.kind == EVENT_TOOL_RESULT]
        assert [c.data["name"] for c in calls] == ["run_pipeline", "run_pipeline"]
        assert calls[0].data["arguments"]["params"]["svm_C"] == "high"
        assert calls[1].data["arguments"]["params"]["svm_C"] == 1.0

        first, second = results
        assert first.data["content"]["status"] == "error"
        assert first.data["content"]["error_type"] == "INVALID_ARGUMENT"
        assert second.data["content"]["status"] == "ok"
        assert second.data["content"]["result"]["state"] == "PENDING"

        assert events[-1].kind == EVENT_FINAL
        newest = backend.runs_for_pipeline(SVM_PIPELINE)[0]
        assert newest.state is RunState.PENDING


class TestRetrievalOracle:
    def test_top5_matches_exhaustive_scan(self):
        with time_budget(5.0):
            rng = random.Random(20250825)
            embedder = HashEmbedder(32)
            agent = RagAgent(VectorIndex(32), embedder)

            vocabulary = [f"term{i:03d}" for i in range(300)]
            chunks_meta = []
            doc_count = 20
            per_doc = 10  # 200 chunks total
            for d in range(doc_count):
                title = f"doc-{d:02d}"
                chunks = [
                    " ".join(rng.choices(vocabulary, k=rng.randint(4, 16)))
                    for _ in range(per_doc)
                ]
                agent.index.upsert_document(title, chunks, embedder.embed(chunks))
                for ordinal, text in enumerate(chunks):
                    chunks_meta.append((title, ordinal, text))
            assert len(agent.index) == 200

            matrix = embedder.embed([text for _, _, text in chunks_meta])
            for _ in range(50):
                query = " ".join(rng.choices(vocabulary, k=rng.randint(2, 8)))
                hits = agent.retrieve(query, k=5)
                scores = matrix @ embedder.embed([query])[0]
                expected = sorted(
                    range(len(chunks_meta)),
                    key=lambda i: (-scores[i], chunks_meta[i][0], chunks_meta[i][1]),
                )[:5]
                assert [(h.doc_title, h.ordinal) for h in hits] == [
                    (chunks_meta[i][0], chunks_meta[i][1]) for i in expected
                ]
                for hit, i in zip(hits, expected):
                    assert abs(hit.score - float(scores[i])) <= 1e-9


class TestChunkingProperties:
    def test_losslessness_and_unit_norm_over_synthetic_corpus(self):
        with time_budget(10.0):
            rng = random.Random(1337)
            nouns = ["pipeline", "bucket", "model", "run", "metric", "artifact", "step"]
            verbs = ["starts", "finishes", "fails", "retries", "uploads", "validates"]
            docs = []
            for _ in range(50):
                sentences = []
                for _ in range(rng.randint(3, 18)):
                    words = [
                        rng.choice(nouns).capitalize(),
                        str(rng.randint(0, 999)),
                        rng.choice(verbs),
                        rng.choice(nouns),
                    ]
                    sentences.append(" ".join(words) + rng.choice([".", "!", "?"]))
                separator = rng.choice([" ", "  ", "\n", "\n\n", "\t", " \n "])
                docs.append(separator.join(sentences))

            embedder = HashEmbedder(32)
            reconstructed = 0
            for doc in docs:
                result = chunk_text(doc, embedder.embed)
                if " ".join(result.chunks) == normalize_body(doc):
                    reconstructed += 1
                vectors = embedder.embed(result.chunks)
                norms = np.linalg.norm(vectors, axis=1)
                assert np.all(np.abs(norms - 1.0) <= 1e-6)
            assert reconstructed == 50  # 100% reconstruction


def _state_machine_pipeline() -> Pipeline:
    components = {"root": ComponentSpec(name="root", parameters={
        "alpha": ParameterDef(ParameterType.NUMBER_DOUBLE, default_value=0.5)
    })}
    for step in ("prep", "train", "evaluate"):
        components[step] = ComponentSpec(name=step, parameters={})
    return Pipeline(
        id="pipe-statemachine",
        name="statemachine-pipeline",
        description="",
        namespace="shared",
        created_at=utcnow(),
        versions=[
            PipelineVersion(version_id="v1", pipeline_spec="", components=components)
        ],
    )


class TestRunStateMachine:
    def test_random_schedules_reach_terminal_legally(self):
        with time_budget(5.0):
            rng = random.Random(424242)
            pipeline = _state_machine_pipeline()
            steps = ["prep", "train", "evaluate"]
            legal = {
                RunState.PENDING: {RunState.PENDING, RunState.RUNNING},
                RunState.RUNNING: {RunState.SUCCEEDED, RunState.FAILED},
                RunState.SUCCEEDED: {RunState.SUCCEEDED},
                RunState.FAILED: {RunState.FAILED},
            }

            for _ in range(1000):
                backend = FakePipelineBackend()
                backend.add_pipeline(pipeline)
                run_ids = [
                    backend.create_run(
                        experiment_id="exp",
                        job_name=f"job-{i}",
                        params={},
                        pipeline_id=pipeline.id,
                        version_id="v1",
                        namespace="shared",
                    ).run_id
                    for i in range(20)
                ]
                expected_fault: dict[str, str] = {}
                previous = {rid: RunState.PENDING for rid in run_ids}

                for _tick in range(2):
                    for _ in range(rng.randint(0, 5)):
                        target = rng.choice(run_ids)
                        step = rng.choice(steps)
                        if backend.get_run(target).state not in TERMINAL_STATES:
                            backend.fault_inject(target, step, "injected failure")
                            expected_fault[target] = step
                    backend.tick(1)
                    for rid in run_ids:
                        now = backend.get_run(rid).state
                        assert now in legal[previous[rid]], (
                            f"illegal transition {previous[rid]} -> {now}"
                        )
                        previous[rid] = now

                for rid in run_ids:
                    run = backend.get_run(rid)
                    assert run.state in TERMINAL_STATES, "run not terminal after 2 ticks"
                    if rid in expected_fault:
                        assert run.state is RunState.FAILED
                        assert f"step {expected_fault[rid]} failed" in run.error_detail
                    else:
                        assert run.state is RunState.SUCCEEDED
                        assert not run.error_detail


FOREIGN_PROBES = [
    ("get_pipelines", {"namespace": "team-alpha"}),
    ("get_pipeline_details", {"pipeline_name": CHURN_PIPELINE}),
    (
        "get_pipeline_version_details",
        {"pipeline_id": "7f3e9c44-1a2b-4c5d-8e6f-aa11bb22cc33", "version_id": "v1"},
    ),
    ("get_pipeline_id", {"pipeline_name": CHURN_PIPELINE}),
    ("run_pipeline", {"pipeline_name": CHURN_PIPELINE, "job_name": "sneak"}),
    ("list_runs", {"pipeline_name": CHURN_PIPELINE}),
    ("get_run_details", {"run_id": "run-churn-0001"}),
    ("get_pipeline_artifacts", {"pipeline_name": CHURN_PIPELINE}),
    ("get_model_metrics", {"pipeline_name": CHURN_PIPELINE}),
    ("get_pipeline_visualization", {"pipeline_name": CHURN_PIPELINE, "viz_type": "roc_curve"}),
]


class TestIsolation:
    def test_agent_operations_reject_foreign_context(self):
        from swarm_agent.messages import ToolCall

        store = InMemoryObjectStore()
        registry = make_registry(make_backend(store), store)
        alice = _alice()

        for index, (name, args) in enumerate(FOREIGN_PROBES):
            call = ToolCall(id=f"probe_{index}", name=name, arguments=args)
            outcome = execute_call(registry, alice, call)
            assert not outcome.ok, f"{name} accepted a foreign target"
            assert outcome.content["error_type"] in (
                "NOT_FOUND",
                "PERMISSION_DENIED",
            ), f"{name}: {outcome.content}"

        # Write into the shared namespace requires owning it.
        bob_call = ToolCall(
            id="probe_write",
            name="run_pipeline",
            arguments={"pipeline_name": SVM_PIPELINE, "job_name": "sneak"},
        )
        outcome = execute_call(registry, _bob(), bob_call)
        assert not outcome.ok
        assert outcome.content["error_type"] == "PERMISSION_DENIED"

        # Grant-scoped listings never mention the other tenant's bucket.
        for ctx, foreign_bucket in ((alice, "team-alpha-data"), (_bob(), "mlpipeline")):
            listing = execute_call(
                registry, ctx, ToolCall(id="probe_ls", name="list_user_buckets", arguments={})
            )
            assert listing.ok
            assert foreign_bucket not in listing.serialized

    def test_http_routes_and_interleaved_turns_do_not_leak(self, tmp_path):
        with time_budget(30.0):
            raw = {
                "llm": {
                    "provider": "scripted",
                    "script_path": str(SCRIPTS_DIR / "loop.json"),
                },
                "limits": {"max_iterations": 2},
                "tokens": {
                    "tok-alice": {
                        "user_id": "alice",
                        "namespace": "shared",
                        "buckets": ["mlpipeline"],
                    },
                    "tok-bob": {
                        "user_id": "bob",
                        "namespace": "team-alpha",
                        "buckets": ["team-alpha-data"],
                    },
                },
                "data_dir": str(tmp_path / "data"),
            }
            services = build_services(parse_config(raw, tmp_path))
            seed_fixture(services.pipeline_backend, FIXTURES_DIR / "diabetes.json")
            client = TestClient(create_app(services))
            alice_headers = {"Authorization": "Bearer tok-alice"}
            bob_headers = {"Authorization": "Bearer tok-bob"}

            # Unauthorized context rejected on every route.
            for method, path in [
                ("POST", "/api/sessions"),
                ("GET", "/api/sessions"),
                ("GET", "/api/sessions/x/history"),
                ("POST", "/api/sessions/x/messages"),
                ("GET", "/api/artifacts/x"),
            ]:
                assert client.request(method, path, json={"text": "x"}).status_code == 401
                wrong = client.request(
                    method,
                    path,
                    json={"text": "x"},
                    headers={"Authorization": "Bearer intruder"},
                )
                assert wrong.status_code == 401

            alice_session = client.post("/api/sessions", headers=alice_headers).json()[
                "session_id"
            ]
            # Foreign context rejected on owned resources.
            assert (
                client.get(
                    f"/api/sessions/{alice_session}/history", headers=bob_headers
                ).status_code
                == 403
            )
            assert (
                client.post(
                    f"/api/sessions/{alice_session}/messages",
                    headers=bob_headers,
                    json={"text": "loop"},
                ).status_code
                == 403
            )
            assert alice_session not in [
                s["session_id"]
                for s in client.get("/api/sessions", headers=bob_headers).json()["sessions"]
            ]

            # 10 concurrent sessions, 100 interleaved turns, zero leaks.
            sessions = []
            for i in range(10):
                headers = alice_headers if i % 2 == 0 else bob_headers
                owner = "alice" if i % 2 == 0 else "bob"
                session_id = client.post("/api/sessions", headers=headers).json()[
                    "session_id"
                ]
                sessions.append((session_id, owner, headers))

            own_markers = {"alice": "diabetes", "bob": "customer-churn"}
            foreign_markers = {"alice": "customer-churn", "bob": "diabetes"}
            leaks: list[str] = []

            def drive(entry):
                session_id, owner, headers = entry
                for _ in range(10):
                    response = client.post(
                        f"/api/sessions/{session_id}/messages",
                        headers=headers,
                        json={"text": "loop"},
                    )
                    if response.status_code != 200:
                        leaks.append(f"{session_id}: HTTP {response.status_code}")
                        return
                    for frame in response.text.split("\n\n"):
                        if not frame.startswith("event: tool_result"):
                            continue
                        data = frame.split("\n", 1)[1].removeprefix("data: ")
                        if foreign_markers[owner] in data:
                            leaks.append(f"{session_id} ({owner}): {data[:120]}")
                        if own_markers[owner] not in data:
                            leaks.append(f"{session_id} ({owner}): missing own data")
                        listing = json.loads(data)["content"]["result"]
                        if listing["total_pipelines"] != 2:
                            leaks.append(
                                f"{session_id} ({owner}): saw "
                                f"{listing['total_pipelines']} pipelines"
                            )

            with ThreadPoolExecutor(max_workers=10) as pool:
                list(pool.map(drive, sessions))
            assert leaks == [], leaks[:5]

            # Histories stayed per-session and namespace-pure.
            for session_id, owner, headers in sessions:
                body = client.get(
                    f"/api/sessions/{session_id}/history", headers=headers
                ).json()
                messages = body["messages"]
                # 10 turns x (user + 2 x (assistant, tool) + final assistant)
                assert len(messages) == 10 * 6
                blob = json.dumps(messages)
                assert foreign_markers[owner] not in blob
