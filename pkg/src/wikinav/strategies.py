"""Navigation policies behind one decision interface.

Each strategy maps an in-flight game state to the next node. All argmax
ties break toward the lowest node id, and every random draw comes from the
caller-supplied generator, so a decision is a pure function of
(strategy, state, graph, rng state).

Canonical strategy names (also the CLI spelling):

    random               uniform over the successor set
    betweenness          structural argmax, immediate backtrack excluded
    betweenness-star     structural argmax over unvisited successors
    llm                  greedy semantic argmax over all successors
    llm-star             semantic argmax over unvisited successors
    llm-star-eps         epsilon-greedy wrapper around llm-star
    betweenness-then-llm structural for the first K hops, llm-star after
    llm-fallback         semantic unless the best similarity < theta,
                         then structural for that single step
    oracle               next node on the true shortest path
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .centrality import CentralityScores, top_neighbor_by_centrality
from .embeddings import EmbeddingProvider, best_semantic_neighbor
from .errors import ConfigError, DeadEndError
from .graph import LinkGraph, NodeId, bfs_shortest_path

STRATEGY_NAMES = (
    "random",
    "betweenness",
    "betweenness-star",
    "llm",
    "llm-star",
    "llm-star-eps",
    "betweenness-then-llm",
    "llm-fallback",
    "oracle",
)

DISPLAY_NAMES = {
    "random": "Random",
    "betweenness": "Betweenness",
    "betweenness-star": "Betweenness*",
    "llm": "LLM",
    "llm-star": "LLM*",
    "llm-star-eps": "LLM*+eps",
    "betweenness-then-llm": "Betweenness+LLM*",
    "llm-fallback": "LLM* Fallback",
    "oracle": "Shortest-Path",
}

_NEEDS_SCORES = {"betweenness", "betweenness-star", "betweenness-then-llm", "llm-fallback"}
_NEEDS_PROVIDER = {"llm", "llm-star", "llm-star-eps", "betweenness-then-llm", "llm-fallback"}

# rule_fired labels (fixed enumeration)
RULE_UNIFORM = "uniform-random"
RULE_STRUCTURAL = "structural"
RULE_SEMANTIC = "semantic"
RULE_ALL_VISITED = "all-visited-fallback"
RULE_EXPLORE = "explore-random"
RULE_FALLBACK_STRUCTURAL = "fallback-structural"
RULE_ORACLE = "oracle"


@dataclass
class NavigationState:
    """One in-flight game: where we are, where we are going, where we've been."""

    current: NodeId
    goal: NodeId
    visited: set[NodeId]
    path: list[NodeId]
    hops: int = 0

    @classmethod
    def initial(cls, start: NodeId, goal: NodeId) -> "NavigationState":
        return cls(current=start, goal=goal, visited={start}, path=[start], hops=0)

    def advance(self, nxt: NodeId) -> None:
        nxt = int(nxt)
        self.path.append(nxt)
        self.visited.add(nxt)
        self.current = nxt
        self.hops += 1


@dataclass(frozen=True)
class DecisionTrace:
    """Which rule produced a move, for interpretability logging."""

    chosen: NodeId
    rule_fired: str
    score: Optional[float] = None


@dataclass(eq=False)
class StrategyKind:
    """A named policy plus its parameters and signal sources."""

    name: str
    epsilon: float = 0.1
    phase_hops: int = 3
    theta: float = 0.25
    scores: Optional[CentralityScores] = None
    provider: Optional[EmbeddingProvider] = None

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self.name]

    def param_summary(self) -> dict:
        out: dict = {"name": self.name}
        if self.name == "llm-star-eps":
            out["epsilon"] = self.epsilon
        if self.name == "betweenness-then-llm":
            out["phase_hops"] = self.phase_hops
        if self.name == "llm-fallback":
            out["theta"] = self.theta
        return out


def make_strategy(
    name: str,
    *,
    scores: Optional[CentralityScores] = None,
    provider: Optional[EmbeddingProvider] = None,
    epsilon: float = 0.1,
    phase_hops: int = 3,
    theta: float = 0.25,
) -> StrategyKind:
    """Build a StrategyKind, validating required signal sources up front."""
    if name not in STRATEGY_NAMES:
        raise ConfigError(f"unknown strategy {name!r}; expected one of {STRATEGY_NAMES}")
    if name in _NEEDS_SCORES and scores is None:
        raise ConfigError(f"strategy {name!r} requires centrality scores")
    if name in _NEEDS_PROVIDER and provider is None:
        raise ConfigError(f"strategy {name!r} requires an embedding provider")
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError("epsilon must be in [0, 1]")
    if phase_hops < 0:
        raise ConfigError("phase_hops must be >= 0")
    return StrategyKind(
        name=name, epsilon=epsilon, phase_hops=phase_hops, theta=theta,
        scores=scores, provider=provider,
    )


def bind_goal(kind: StrategyKind, goal: NodeId) -> StrategyKind:
    """Rebind goal-conditioned providers (the distance oracle) per game."""
    if kind.provider is None:
        return kind
    bound = kind.provider.bind_goal(goal)
    if bound is kind.provider:
        return kind
    return replace(kind, provider=bound)


def llm_fallback_gate(similarities, theta: float) -> str:
    """"semantic" iff the best similarity clears theta (boundary inclusive)."""
    sims = list(similarities)
    if not sims:
        raise ValueError("similarities must be non-empty")
    return "semantic" if max(sims) >= theta else "structural"


def _structural_pick(
    kind: StrategyKind, state: NavigationState, g: LinkGraph, *, star: bool
) -> tuple[NodeId, DecisionTrace]:
    if star:
        excluded = state.visited
        fallback_rule = RULE_ALL_VISITED
    else:
        # only the immediately preceding node is off-limits
        excluded = {state.path[-2]} if len(state.path) >= 2 else set()
        fallback_rule = RULE_STRUCTURAL  # forced backtrack onto the only neighbor
    chosen = top_neighbor_by_centrality(g, kind.scores, state.current, excluded)
    rule = RULE_STRUCTURAL
    if chosen is None:
        chosen = top_neighbor_by_centrality(g, kind.scores, state.current, frozenset())
        rule = fallback_rule
    return chosen, DecisionTrace(chosen, rule, float(kind.scores.scores[chosen]))


def _semantic_pick(
    kind: StrategyKind, state: NavigationState, g: LinkGraph, nbrs, *, star: bool
) -> tuple[NodeId, DecisionTrace]:
    rule = RULE_SEMANTIC
    candidates = nbrs
    if star:
        unvisited = [w for w in nbrs if w not in state.visited]
        if unvisited:
            candidates = unvisited
        else:
            rule = RULE_ALL_VISITED
    chosen, score = best_semantic_neighbor(
        kind.provider, g, state.current, state.goal, candidates
    )
    return chosen, DecisionTrace(chosen, rule, score)


def decide(
    kind: StrategyKind,
    state: NavigationState,
    g: LinkGraph,
    rng: np.random.Generator,
) -> tuple[NodeId, DecisionTrace]:
    """Pick the next node from the successors of ``state.current``.

    Raises DeadEndError when the current node has no successors (the
    benchmark records such games as failures).
    """
    nbrs = g.out_neighbors(state.current).tolist()
    if not nbrs:
        raise DeadEndError(f"node {state.current} has no outgoing links")
    name = kind.name

    if name == "random":
        chosen = nbrs[int(rng.integers(len(nbrs)))]
        return chosen, DecisionTrace(chosen, RULE_UNIFORM)

    if name == "betweenness":
        return _structural_pick(kind, state, g, star=False)

    if name == "betweenness-star":
        return _structural_pick(kind, state, g, star=True)

    if name == "llm":
        return _semantic_pick(kind, state, g, nbrs, star=False)

    if name == "llm-star":
        return _semantic_pick(kind, state, g, nbrs, star=True)

    if name == "llm-star-eps":
        # one branch draw; the explore arm draws once more and ignores visited
        if rng.random() < kind.epsilon:
            chosen = nbrs[int(rng.integers(len(nbrs)))]
            return chosen, DecisionTrace(chosen, RULE_EXPLORE)
        return _semantic_pick(kind, state, g, nbrs, star=True)

    if name == "betweenness-then-llm":
        if state.hops < kind.phase_hops:
            return _structural_pick(kind, state, g, star=False)
        return _semantic_pick(kind, state, g, nbrs, star=True)

    if name == "llm-fallback":
        goal_vec = kind.provider.embed(state.goal, g.title(state.goal))
        kind.provider.embed_many([(w, g.title(w)) for w in nbrs])
        sims = [
            float(np.dot(kind.provider.embed(w, g.title(w)), goal_vec)) for w in nbrs
        ]
        if llm_fallback_gate(sims, kind.theta) == "semantic":
            chosen, score = best_semantic_neighbor(
                kind.provider, g, state.current, state.goal, nbrs
            )
            return chosen, DecisionTrace(chosen, RULE_SEMANTIC, score)
        picked, trace = _structural_pick(kind, state, g, star=False)
        return picked, DecisionTrace(picked, RULE_FALLBACK_STRUCTURAL, trace.score)

    if name == "oracle":
        if state.current == state.goal:
            raise ValueError("oracle asked to move while already at the goal")
        path = bfs_shortest_path(g, state.current, state.goal)
        if path is None:
            raise DeadEndError(f"goal {state.goal} unreachable from {state.current}")
        chosen = path[1]
        return chosen, DecisionTrace(chosen, RULE_ORACLE)

    raise ConfigError(f"unknown strategy {name!r}")
