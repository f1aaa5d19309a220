"""Betweenness centrality: exact and pivot-sampled single-source accumulation.

Scores use the unnormalized pair-count convention: score(v) is the sum over
ordered pairs (s, t), s != v != t, of the fraction of shortest s->t paths
that pass through v. Only the argmax is ever consumed downstream, so the
normalizing constant is irrelevant.

The sampled estimator restricts the accumulation to a uniform
without-replacement subset of source nodes and rescales by
node_count / pivot_count, which keeps it unbiased.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import FormatError
from .graph import LinkGraph, NodeId

SCORES_MAGIC = b"WCEN"
SCORES_VERSION = 1
_METHOD_TAGS = {"exact": 0, "sampled": 1}
_METHOD_NAMES = {v: k for k, v in _METHOD_TAGS.items()}


@dataclass(frozen=True, eq=False)
class CentralityScores:
    """Per-node betweenness scores plus the method that produced them."""

    scores: np.ndarray
    method: str
    pivot_count: int = 0
    seed: int = 0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.scores, dtype=np.float64)
        if self.method not in _METHOD_TAGS:
            raise ValueError(f"unknown method {self.method!r}")
        if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0):
            raise ValueError("scores must be finite and non-negative")
        object.__setattr__(self, "scores", arr)
        arr.setflags(write=False)

    def __len__(self) -> int:
        return int(self.scores.size)


def _adjacency_lists(g: LinkGraph) -> list[list[int]]:
    offsets = g.fwd_offsets.tolist()
    targets = g.fwd_targets.tolist()
    return [targets[offsets[v]:offsets[v + 1]] for v in range(g.node_count)]


def _accumulate_from_sources(
    g: LinkGraph, sources: Iterable[int], scale: float
) -> np.ndarray:
    """Single-source shortest-path dependency accumulation over ``sources``."""
    n = g.node_count
    adj = _adjacency_lists(g)
    scores = np.zeros(n, dtype=np.float64)
    for s in sources:
        sigma = [0] * n
        dist = [-1] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma[s] = 1
        dist[s] = 0
        order: list[int] = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv1 = dist[v] + 1
            sv = sigma[v]
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv1
                    queue.append(w)
                if dist[w] == dv1:
                    sigma[w] += sv
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                scores[w] += delta[w]
    if scale != 1.0:
        scores *= scale
    return scores


def betweenness_exact(g: LinkGraph) -> CentralityScores:
    """Exact directed betweenness via accumulation from every source."""
    scores = _accumulate_from_sources(g, range(g.node_count), 1.0)
    return CentralityScores(scores, "exact")


def betweenness_sampled(g: LinkGraph, pivot_count: int, seed: int) -> CentralityScores:
    """Pivot-sampled betweenness estimate.

    Sources are drawn uniformly without replacement with the given seed and
    processed in ascending order, so pivot_count == node_count reproduces
    the exact accumulation bit for bit.
    """
    n = g.node_count
    if not 1 <= pivot_count <= n:
        raise ValueError(f"pivot_count {pivot_count} out of range [1, {n}]")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    rng = np.random.default_rng(seed)
    pivots = np.sort(rng.choice(n, size=pivot_count, replace=False))
    scores = _accumulate_from_sources(g, pivots.tolist(), n / pivot_count)
    return CentralityScores(scores, "sampled", pivot_count=pivot_count, seed=seed)


def top_neighbor_by_centrality(
    g: LinkGraph,
    scores: CentralityScores,
    v: NodeId,
    excluded: set[NodeId] | frozenset[NodeId] = frozenset(),
) -> Optional[NodeId]:
    """Highest-scoring successor of ``v`` outside ``excluded``.

    Ties break toward the lowest node id; returns None when every
    successor is excluded.
    """
    if len(scores) != g.node_count:
        raise ValueError("scores length does not match graph")
    best: Optional[int] = None
    best_score = -np.inf
    for w in g.out_neighbors(v).tolist():
        if w in excluded:
            continue
        s = scores.scores[w]
        if s > best_score:  # strict: first (lowest id) wins ties
            best = w
            best_score = s
    return best


# ---- persistence ---------------------------------------------------------------


def save_scores(scores: CentralityScores, path: str | Path) -> None:
    with open(path, "wb") as f:
        f.write(SCORES_MAGIC)
        f.write(struct.pack(
            "<IQBQQ",
            SCORES_VERSION,
            len(scores),
            _METHOD_TAGS[scores.method],
            scores.pivot_count,
            scores.seed,
        ))
        f.write(scores.scores.astype("<f8").tobytes())


def load_scores(path: str | Path) -> CentralityScores:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != SCORES_MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {SCORES_MAGIC!r}")
        header = f.read(29)
        if len(header) != 29:
            raise FormatError("truncated scores header")
        version, n, tag, pivot_count, seed = struct.unpack("<IQBQQ", header)
        if version != SCORES_VERSION:
            raise FormatError(f"unsupported scores version {version}")
        if tag not in _METHOD_NAMES:
            raise FormatError(f"unknown method tag {tag}")
        data = f.read(n * 8)
        if len(data) != n * 8 or f.read(1):
            raise FormatError("scores payload size mismatch")
    arr = np.frombuffer(data, dtype="<f8").astype(np.float64)
    return CentralityScores(arr, _METHOD_NAMES[tag], pivot_count=pivot_count, seed=seed)
