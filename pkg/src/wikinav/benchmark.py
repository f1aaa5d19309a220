"""Seeded benchmark protocol: shared goal set, capped games, Table-style report.

One master seed fixes the goal sequence; every strategy plays the identical
(start, goal) pairs. A game that exhausts the hop cap, or dead-ends, is a
failure and contributes exactly the cap to the average. Per-game randomness
is derived by hashing (master_seed, strategy name, game index) so strategies
never share draws but the whole run is reproducible bit for bit.

Serialized reports (JSON/CSV/table) exclude wall-clock durations and
decision traces: both stay available on the in-memory results, but the
on-disk report must be byte-identical across repeat runs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DeadEndError
from .graph import LinkGraph, NodeId, reachable_set
from .strategies import DecisionTrace, NavigationState, StrategyKind, bind_goal, decide

DEFAULT_MASTER_SEED = 42
DEFAULT_GAME_COUNT = 10
DEFAULT_HOP_CAP = 5000


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary parts (hash-chained, order-sensitive)."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass
class BenchmarkConfig:
    start: NodeId
    strategies: list[StrategyKind]
    master_seed: int = DEFAULT_MASTER_SEED
    game_count: int = DEFAULT_GAME_COUNT
    hop_cap: int = DEFAULT_HOP_CAP
    goal_policy: str = "reachable-uniform"

    def validate(self, g: LinkGraph) -> None:
        if self.game_count < 1:
            raise ConfigError("game_count must be >= 1")
        if self.hop_cap < 1:
            raise ConfigError("hop_cap must be >= 1")
        if not 0 <= self.start < g.node_count:
            raise ConfigError(f"start node {self.start} not in graph")
        if self.goal_policy != "reachable-uniform":
            raise ConfigError(f"unknown goal policy {self.goal_policy!r}")


@dataclass
class GameResult:
    strategy: str
    game_index: int
    goal: NodeId
    success: bool
    hops: int
    path: list[NodeId]
    traces: list[DecisionTrace] = field(default_factory=list, repr=False)
    dead_end: bool = False
    duration_s: float = 0.0


@dataclass
class StrategyRow:
    kind: StrategyKind
    games: list[GameResult]

    @property
    def avg_hops(self) -> float:
        return float(np.mean([r.hops for r in self.games])) if self.games else 0.0

    @property
    def success_rate(self) -> float:
        if not self.games:
            return 0.0
        return sum(1 for r in self.games if r.success) / len(self.games)


@dataclass
class BenchmarkReport:
    config: BenchmarkConfig
    graph_fingerprint: dict
    goals: list[NodeId]
    goal_titles: list[str]
    rows: list[StrategyRow]

    def to_dict(self) -> dict:
        return {
            "config": {
                "master_seed": self.config.master_seed,
                "game_count": self.config.game_count,
                "hop_cap": self.config.hop_cap,
                "start": self.config.start,
                "goal_policy": self.config.goal_policy,
                "strategies": [k.param_summary() for k in self.config.strategies],
            },
            "graph_fingerprint": self.graph_fingerprint,
            "rows": [
                {
                    "strategy": row.kind.name,
                    "avg_hops": row.avg_hops,
                    "success_rate": row.success_rate,
                    "games": [
                        {
                            "game_index": r.game_index,
                            "goal_id": r.goal,
                            "goal_title": self.goal_titles[r.game_index],
                            "success": r.success,
                            "hops": r.hops,
                            "dead_end": r.dead_end,
                            "path": r.path,
                        }
                        for r in row.games
                    ],
                }
                for row in self.rows
            ],
        }


def graph_fingerprint(g: LinkGraph) -> dict:
    return {
        "node_count": g.node_count,
        "edge_count": g.edge_count,
        "sha256": g.content_hash(),
    }


def sample_goals(
    g: LinkGraph, start: NodeId, count: int, master_seed: int
) -> list[NodeId]:
    """Uniform without-replacement goals from the start's reachable set.

    Restricting to reachable nodes keeps the shortest-path baseline at a
    100% success rate, which is what makes failures of other strategies
    informative.
    """
    start = g._check_node(start)
    candidates = sorted(reachable_set(g, start) - {start})
    if len(candidates) < count:
        raise ConfigError(
            f"only {len(candidates)} reachable goal candidates, need {count}"
        )
    rng = np.random.default_rng(master_seed)
    picks = rng.choice(len(candidates), size=count, replace=False)
    return [candidates[int(i)] for i in picks]


def run_game(
    g: LinkGraph,
    kind: StrategyKind,
    start: NodeId,
    goal: NodeId,
    hop_cap: int,
    game_seed: int,
    game_index: int = 0,
) -> GameResult:
    """Play one capped game; failures record exactly the cap as their hops."""
    kind = bind_goal(kind, goal)
    rng = np.random.default_rng(game_seed)
    state = NavigationState.initial(int(start), int(goal))
    traces: list[DecisionTrace] = []
    success = False
    dead_end = False
    t0 = time.perf_counter()
    while True:
        if state.current == state.goal:
            success = True
            break
        if state.hops >= hop_cap:
            break
        try:
            nxt, trace = decide(kind, state, g, rng)
        except DeadEndError:
            dead_end = True
            break
        traces.append(trace)
        state.advance(nxt)
    duration = time.perf_counter() - t0
    return GameResult(
        strategy=kind.name,
        game_index=game_index,
        goal=int(goal),
        success=success,
        hops=state.hops if success else hop_cap,
        path=list(state.path),
        traces=traces,
        dead_end=dead_end,
        duration_s=duration,
    )


def run_benchmark(g: LinkGraph, config: BenchmarkConfig) -> BenchmarkReport:
    """Run every configured strategy over the identical seeded goal set."""
    config.validate(g)
    goals = sample_goals(g, config.start, config.game_count, config.master_seed)
    rows = []
    for kind in config.strategies:
        games = []
        for i, goal in enumerate(goals):
            seed = derive_seed(config.master_seed, kind.name, i)
            games.append(
                run_game(g, kind, config.start, goal, config.hop_cap, seed, game_index=i)
            )
        rows.append(StrategyRow(kind=kind, games=games))
    return BenchmarkReport(
        config=config,
        graph_fingerprint=graph_fingerprint(g),
        goals=goals,
        goal_titles=[g.title(v) for v in goals],
        rows=rows,
    )


# ---- rendering -------------------------------------------------------------------

REPORT_FORMATS = ("table", "json", "csv")


def render_report(report: BenchmarkReport, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["strategy", "game_index", "goal_id", "goal_title", "success", "hops"])
        for row in report.rows:
            for r in row.games:
                writer.writerow([
                    row.kind.name, r.game_index, r.goal,
                    report.goal_titles[r.game_index],
                    str(r.success).lower(), r.hops,
                ])
        return buf.getvalue()
    if fmt == "table":
        header = f"{'Strategy':<22}{'Average Hops':>14}{'Success Rate':>14}"
        lines = [header, "-" * len(header)]
        for row in report.rows:
            lines.append(
                f"{row.kind.display_name:<22}"
                f"{row.avg_hops:>14.1f}"
                f"{row.success_rate * 100:>13.0f}%"
            )
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")
