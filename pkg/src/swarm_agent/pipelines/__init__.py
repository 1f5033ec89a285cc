"""Pipeline agent: discovery, execution, and monitoring of ML pipelines."""

from swarm_agent.pipelines.agent import PipelineAgent, build_pipeline_tools
from swarm_agent.pipelines.fake import FakePipelineBackend
from swarm_agent.pipelines.models import (
    ComponentSpec,
    Experiment,
    ParameterDef,
    ParameterType,
    Pipeline,
    PipelineVersion,
    Run,
    RunState,
)
from swarm_agent.pipelines.rest import RestPipelineBackend

__all__ = [
    "ComponentSpec",
    "Experiment",
    "FakePipelineBackend",
    "ParameterDef",
    "ParameterType",
    "Pipeline",
    "PipelineAgent",
    "PipelineVersion",
    "RestPipelineBackend",
    "Run",
    "RunState",
    "build_pipeline_tools",
]
