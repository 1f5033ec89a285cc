"""Operator command line: serve, index, seed, tick.

All commands read the same JSON config; seed and tick talk to the running
server indirectly through the shared pipeline state snapshot in
``data_dir``, so they work before or while ``serve`` is up.
"""

from __future__ import annotations

import argparse
import logging
import sys

from swarm_agent.gateway.config import ConfigError, load_config
from swarm_agent.pipelines.fake import FakePipelineBackend
from swarm_agent.rag.agent import RagAgent
from swarm_agent.rag.index import VectorIndex
from swarm_agent.runtime import (
    build_embedder,
    build_object_store,
    build_pipeline_backend,
    build_services,
    seed_fixture,
)

logger = logging.getLogger(__name__)


def _add_config(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the service config JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarm-agent",
        description="Conversational MLOps agent service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP gateway")
    _add_config(serve)

    index = sub.add_parser(
        "index",
        help="(re)build the documentation index from a directory of .md/.txt files",
    )
    index.add_argument(
        "directory",
        nargs="?",
        default="",
        help="documentation directory to ingest; defaults to config.docs_dir",
    )
    _add_config(index)

    seed = sub.add_parser("seed", help="load a pipelines fixture into the fake backend")
    seed.add_argument("--fixture", default="", help="fixture JSON; defaults to config.fixture")
    _add_config(seed)

    tick = sub.add_parser("tick", help="advance every non-terminal run n transitions")
    tick.add_argument("n", type=int, nargs="?", default=1)
    _add_config(tick)

    return parser


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from swarm_agent.gateway.app import create_app

    config = load_config(args.config)
    services = build_services(config)
    app = create_app(services)
    print(
        f"serving on http://{config.listen.host}:{config.listen.port} "
        f"({len(services.registry)} tools registered)"
    )
    uvicorn.run(app, host=config.listen.host, port=config.listen.port, log_level="info")
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    directory = args.directory or config.docs_dir
    if not directory:
        print("no docs directory given (pass one or set config.docs_dir)", file=sys.stderr)
        return 1
    config.data_dir.mkdir(parents=True, exist_ok=True)
    embedder = build_embedder(config)
    agent = RagAgent(VectorIndex(embedder.dimension), embedder)
    reports = agent.ingest_directory(directory)
    if not reports:
        print(f"no .md or .txt files found under {directory}", file=sys.stderr)
        return 1
    agent.index.save(config.index_path)
    for report in reports:
        print(f"indexed {report['doc_title']!r}: {report['chunks_indexed']} chunks")
    print(f"wrote {len(agent.index)} chunks to {config.index_path}")
    return 0


def cmd_seed(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    fixture = args.fixture or config.fixture
    if not fixture:
        print("no fixture given (use --fixture or config.fixture)", file=sys.stderr)
        return 1
    config.data_dir.mkdir(parents=True, exist_ok=True)
    backend = build_pipeline_backend(config, build_object_store(config))
    counts = seed_fixture(backend, fixture)
    print(
        f"seeded {counts['pipelines']} pipelines, {counts['experiments']} "
        f"experiments, {counts['runs']} runs"
    )
    return 0


def cmd_tick(args: argparse.Namespace) -> int:
    if args.n < 1:
        print("n must be at least 1", file=sys.stderr)
        return 1
    config = load_config(args.config)
    config.data_dir.mkdir(parents=True, exist_ok=True)
    backend = build_pipeline_backend(config, build_object_store(config))
    if not isinstance(backend, FakePipelineBackend):
        print("tick requires the fake pipelines backend", file=sys.stderr)
        return 1
    backend.tick(args.n)
    states: dict[str, int] = {}
    for run in backend.list_runs():
        states[run.state.value] = states.get(run.state.value, 0) + 1
    summary = ", ".join(f"{count} {state}" for state, count in sorted(states.items()))
    print(f"advanced {args.n} tick(s); runs: {summary or 'none'}")
    return 0


_COMMANDS = {
    "serve": cmd_serve,
    "index": cmd_index,
    "seed": cmd_seed,
    "tick": cmd_tick,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
