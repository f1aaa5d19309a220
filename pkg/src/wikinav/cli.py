"""Command-line pipeline: ingest, prune, sample, centrality, embed, bench, oracle, serve.

Every command is a thin wrapper over the library and ends by printing one
machine-parseable line: "RESULT " followed by a JSON payload. Exit codes:
0 success, 1 usage error, 2 I/O or format error, 3 configuration error.
"""

from __future__ import annotations

import argparse
import gzip
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import benchmark as bench_mod
from . import centrality as cent_mod
from . import embeddings as emb_mod
from . import ingest as ingest_mod
from .errors import ConfigError, FormatError
from .graph import IdRemap, LinkGraph, bfs_shortest_path, k_ball_sample, prune_sinks
from .strategies import STRATEGY_NAMES, make_strategy

logger = logging.getLogger("wikinav")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONFIG = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage to 1
        raise UsageError(message)


def _result(payload: dict) -> None:
    print("RESULT " + json.dumps(payload, sort_keys=True))


def _write_remap(remap: IdRemap, path: str) -> None:
    with open(path, "wb") as raw:
        with gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as f:
            f.write(b"old_id\tnew_id\n")
            for old, new in remap.pairs():
                f.write(f"{old}\t{new}\n".encode())


def cmd_ingest(args) -> int:
    graph, stats = ingest_mod.ingest_edge_list(args.in_path)
    ingest_mod.save_graph(graph, args.out_graph)
    ingest_mod.write_title_map(graph, args.out_titles, page_ids=stats.page_ids)
    _result({
        "nodes": graph.node_count,
        "edges": graph.edge_count,
        "lines_read": stats.lines_read,
        "edges_kept": stats.edges_kept,
        "duplicates_dropped": stats.duplicates_dropped,
        "self_loops_dropped": stats.self_loops_dropped,
        "malformed_lines": stats.malformed_lines,
        "out_graph": args.out_graph,
        "out_titles": args.out_titles,
    })
    return EXIT_OK


def cmd_prune(args) -> int:
    graph = ingest_mod.load_graph(args.in_path)
    pruned, remap = prune_sinks(graph, also_sources=args.also_sources)
    ingest_mod.save_graph(pruned, args.out)
    if args.out_remap:
        _write_remap(remap, args.out_remap)
    _result({
        "nodes_before": graph.node_count,
        "nodes_after": pruned.node_count,
        "edges_after": pruned.edge_count,
        "removed": graph.node_count - pruned.node_count,
        "out": args.out,
    })
    return EXIT_OK


def cmd_sample(args) -> int:
    graph = ingest_mod.load_graph(args.in_path)
    if graph.node_count == 0:
        raise ConfigError("cannot sample from an empty graph")
    if args.seed_node == "random":
        rng = np.random.default_rng(args.rng_seed)
        seed_node = int(rng.integers(graph.node_count))
    else:
        seed_node = int(args.seed_node)
    sub, remap = k_ball_sample(graph, seed_node, args.radius, args.cap)
    ingest_mod.save_graph(sub, args.out)
    if args.out_remap:
        _write_remap(remap, args.out_remap)
    _result({
        "seed_node": seed_node,
        "radius": args.radius,
        "cap": args.cap,
        "node_count": sub.node_count,
        "edge_count": sub.edge_count,
        "out": args.out,
    })
    return EXIT_OK


def cmd_centrality(args) -> int:
    graph = ingest_mod.load_graph(args.in_path)
    if args.pivots == "exact":
        scores = cent_mod.betweenness_exact(graph)
    else:
        try:
            pivots = int(args.pivots)
        except ValueError:
            raise UsageError(f"--pivots must be an integer or 'exact', got {args.pivots!r}")
        if not 1 <= pivots <= graph.node_count:
            raise ConfigError(
                f"pivot count {pivots} out of range [1, {graph.node_count}]"
            )
        scores = cent_mod.betweenness_sampled(graph, pivots, args.rng_seed)
    cent_mod.save_scores(scores, args.out)
    _result({
        "method": scores.method,
        "pivots": scores.pivot_count,
        "seed": scores.seed,
        "nodes": len(scores),
        "out": args.out,
    })
    return EXIT_OK


def _make_provider(args) -> emb_mod.EmbeddingProvider:
    if args.provider == "hash":
        return emb_mod.HashEmbeddingProvider(dimension=args.dim)
    if args.provider == "http":
        if not args.endpoint:
            raise ConfigError("--provider http requires --endpoint")
        return emb_mod.RemoteEmbeddingProvider(args.endpoint, dimension=args.dim)
    if args.provider == "file":
        if not args.in_embeddings:
            raise ConfigError("--provider file requires --in-embeddings")
        return emb_mod.load_embeddings(args.in_embeddings)
    raise ConfigError(f"unknown provider {args.provider!r}")


def cmd_embed(args) -> int:
    titles = ingest_mod.read_title_map(args.in_titles)
    provider = _make_provider(args)
    provider.embed_many(sorted(titles.items()))
    emb_mod.save_embeddings(provider, args.out)
    _result({
        "provider": provider.kind,
        "count": len(provider.cache),
        "dimension": provider.dimension,
        "out": args.out,
    })
    return EXIT_OK


def _parse_strategies(args, graph) -> list:
    scores = cent_mod.load_scores(args.centrality) if args.centrality else None
    provider = emb_mod.load_embeddings(args.embeddings) if args.embeddings else None
    kinds = []
    for name in args.strategies.split(","):
        name = name.strip()
        if name not in STRATEGY_NAMES:
            raise UsageError(f"unknown strategy {name!r}")
        kinds.append(make_strategy(
            name, scores=scores, provider=provider,
            epsilon=args.epsilon, phase_hops=args.phase_hops, theta=args.theta,
        ))
    return kinds


def cmd_bench(args) -> int:
    graph = ingest_mod.load_graph(args.graph)
    kinds = _parse_strategies(args, graph)
    config = bench_mod.BenchmarkConfig(
        start=args.start,
        strategies=kinds,
        master_seed=args.seed,
        game_count=args.games,
        hop_cap=args.hop_cap,
    )
    report = bench_mod.run_benchmark(graph, config)
    rendered = bench_mod.render_report(report, args.report)
    Path(args.out).write_text(rendered, encoding="utf-8")
    _result({
        "out": args.out,
        "format": args.report,
        "games": args.games,
        "rows": [
            {
                "strategy": row.kind.name,
                "avg_hops": row.avg_hops,
                "success_rate": row.success_rate,
            }
            for row in report.rows
        ],
    })
    return EXIT_OK


def cmd_oracle(args) -> int:
    graph = ingest_mod.load_graph(args.graph)
    if not 0 <= args.from_node < graph.node_count or not 0 <= args.to_node < graph.node_count:
        raise ConfigError("oracle endpoints out of range")
    path = bfs_shortest_path(graph, args.from_node, args.to_node)
    if path is None:
        _result({"reachable": False, "from": args.from_node, "to": args.to_node})
    else:
        _result({
            "reachable": True,
            "from": args.from_node,
            "to": args.to_node,
            "hops": len(path) - 1,
            "path": path,
            "titles": [graph.title(v) for v in path],
        })
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import create_app
    import uvicorn

    graph = ingest_mod.load_graph(args.graph)
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    app = create_app(
        graph,
        start=config.get("start", 0),
        master_seed=config.get("master_seed", 42),
        game_count=config.get("game_count", 10),
        hop_cap=config.get("hop_cap", 5000),
        results_log=args.results_log,
        static_dir=args.static,
    )
    _result({
        "port": args.port,
        "goals": len(app.state.goals),
        "start": app.state.start,
        "hop_cap": app.state.hop_cap,
    })
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="wikinav", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="gzip TSV edge list -> binary graph + title map")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out-graph", required=True)
    p.add_argument("--out-titles", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("prune", help="iteratively remove sink nodes")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--also-sources", action="store_true")
    p.add_argument("--out-remap", default=None)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("sample", help="BFS ball subgraph around a seed node")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--seed-node", required=True, help="node id or 'random'")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--rng-seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.add_argument("--out-remap", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("centrality", help="betweenness scores (exact or pivot-sampled)")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--pivots", default="512", help="pivot count or 'exact'")
    p.add_argument("--rng-seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("embed", help="embed all titles and persist the vectors")
    p.add_argument("--in-titles", required=True)
    p.add_argument("--provider", choices=["file", "http", "hash"], required=True)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--dim", type=int, default=384)
    p.add_argument("--in-embeddings", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("bench", help="run the seeded benchmark protocol")
    p.add_argument("--graph", required=True)
    p.add_argument("--centrality", default=None)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--strategies", required=True, help="comma-separated strategy names")
    p.add_argument("--games", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--hop-cap", type=int, default=5000)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--phase-hops", type=int, default=3)
    p.add_argument("--theta", type=float, default=0.25)
    p.add_argument("--report", choices=["json", "csv", "table"], default="json")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="true shortest path between two nodes")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="from_node", type=int, required=True)
    p.add_argument("--to", dest="to_node", type=int, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("serve", help="HTTP play service + static UI")
    p.add_argument("--graph", required=True)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--config", required=True, help="JSON benchmark config")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None)
    p.add_argument("--results-log", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (FormatError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
