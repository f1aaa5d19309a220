"""Embedding providers, the unit-norm cache, and semantic neighbor selection.

Every provider produces one dense float32 vector per article title and
caches it under the node id on first computation. Vectors are normalized
when they enter the cache, so cosine similarity downstream is a plain dot
product. Normalization is skipped for vectors already unit within 1e-6,
which keeps save -> load -> save of the embedding file byte-stable.

Backends:

* HashEmbeddingProvider: seeded sha256 of the title bytes expanded into
  Gaussian reals. Dependency-free, deterministic, used as the default
  offline encoder stand-in.
* FileEmbeddingProvider: precomputed vectors loaded from a "WEMB" file.
* RemoteEmbeddingProvider: HTTP POST {endpoint} with {"texts": [...]},
  expecting {"vectors": [[...], ...]}; batched, with retries.
* DistanceOracleProvider (test support): vectors whose similarity to a
  bound goal strictly decreases with BFS distance to that goal, making
  greedy descent provably optimal.
"""

from __future__ import annotations

import hashlib
import math
import struct
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import requests

from .errors import FormatError, ProviderError
from .graph import LinkGraph, NodeId, bfs_depths

EMBED_MAGIC = b"WEMB"
EMBED_VERSION = 1
DEFAULT_DIMENSION = 384
_UNIT_TOLERANCE = 1e-6


def _unit(vec: np.ndarray) -> np.ndarray:
    vec = np.ascontiguousarray(vec, dtype=np.float32)
    norm = float(np.linalg.norm(vec.astype(np.float64)))
    if norm == 0.0:
        raise ProviderError("cannot normalize a zero vector")
    if abs(norm - 1.0) > _UNIT_TOLERANCE:
        vec = (vec.astype(np.float64) / norm).astype(np.float32)
    vec.setflags(write=False)
    return vec


class EmbeddingProvider:
    """Base class: caching, normalization, and the backend-call counter."""

    kind = "base"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self._cache: dict[int, np.ndarray] = {}
        self.backend_calls = 0

    @property
    def cache(self) -> dict[int, np.ndarray]:
        return self._cache

    def embed(self, node: NodeId, title: str) -> np.ndarray:
        """Unit-norm vector for (node, title); cached after the first call."""
        node = int(node)
        cached = self._cache.get(node)
        if cached is not None:
            return cached
        if not title:
            raise ValueError("title must be non-empty")
        self.backend_calls += 1
        raw = self._compute(node, title)
        return self._store(node, raw)

    def embed_many(self, items: Sequence[tuple[NodeId, str]]) -> None:
        """Populate the cache for many (node, title) pairs."""
        for node, title in items:
            self.embed(node, title)

    def bind_goal(self, goal: NodeId) -> "EmbeddingProvider":
        """Hook for goal-conditioned backends; the default is goal-free."""
        return self

    def _store(self, node: int, raw: np.ndarray) -> np.ndarray:
        vec = np.asarray(raw, dtype=np.float32)
        if vec.shape != (self.dimension,):
            raise FormatError(
                f"backend returned shape {vec.shape}, expected ({self.dimension},)"
            )
        if not np.all(np.isfinite(vec)):
            raise ProviderError(f"non-finite embedding for node {node}", node=node)
        vec = _unit(vec)
        self._cache[node] = vec
        return vec

    def _compute(self, node: int, title: str) -> np.ndarray:
        raise NotImplementedError


class HashEmbeddingProvider(EmbeddingProvider):
    """Deterministic pseudo-encoder: vectors depend only on the title bytes."""

    kind = "synthetic-hash"

    def __init__(self, dimension: int = DEFAULT_DIMENSION, seed: int = 0):
        super().__init__(dimension)
        self.seed = seed

    def _compute(self, node: int, title: str) -> np.ndarray:
        digest = hashlib.sha256(f"{self.seed}:".encode() + title.encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        return rng.standard_normal(self.dimension)


class FileEmbeddingProvider(EmbeddingProvider):
    """Precomputed vectors; the cache is pre-filled, misses are errors."""

    kind = "precomputed-file"

    def __init__(self, vectors: dict[int, np.ndarray], dimension: int):
        super().__init__(dimension)
        for node, vec in vectors.items():
            self._store(int(node), np.asarray(vec, dtype=np.float32))

    def _compute(self, node: int, title: str) -> np.ndarray:
        raise ProviderError(f"no precomputed vector for node {node}", node=node)


class RemoteEmbeddingProvider(EmbeddingProvider):
    """HTTP embedding service client with batching and retries."""

    kind = "remote-service"

    def __init__(
        self,
        endpoint: str,
        dimension: int = DEFAULT_DIMENSION,
        timeout: float = 10.0,
        retries: int = 3,
        batch_size: int = 64,
    ):
        super().__init__(dimension)
        self.endpoint = endpoint
        self.timeout = timeout
        self.retries = retries
        self.batch_size = batch_size
        self.http_requests = 0

    def _post(self, texts: list[str]) -> list[np.ndarray]:
        last: Exception | None = None
        for attempt in range(self.retries):
            try:
                self.http_requests += 1
                resp = requests.post(
                    self.endpoint, json={"texts": texts}, timeout=self.timeout
                )
                resp.raise_for_status()
                vectors = resp.json()["vectors"]
                if not isinstance(vectors, list) or len(vectors) != len(texts):
                    raise ProviderError(
                        f"service returned {len(vectors)} vectors for {len(texts)} texts"
                    )
                return [np.asarray(v, dtype=np.float32) for v in vectors]
            except ProviderError:
                raise
            except (requests.RequestException, KeyError, ValueError, TypeError) as e:
                last = e
                if attempt + 1 < self.retries:
                    time.sleep(0.1 * (attempt + 1))
        raise ProviderError(f"embedding service failed after {self.retries} attempts: {last}")

    def _compute(self, node: int, title: str) -> np.ndarray:
        try:
            return self._post([title])[0]
        except ProviderError as e:
            raise ProviderError(str(e), node=node) from e

    def embed_many(self, items: Sequence[tuple[NodeId, str]]) -> None:
        pending = [(int(n), t) for n, t in items if int(n) not in self._cache]
        for i in range(0, len(pending), self.batch_size):
            chunk = pending[i:i + self.batch_size]
            vectors = self._post([t for _, t in chunk])
            for (node, _), vec in zip(chunk, vectors):
                self.backend_calls += 1
                self._store(node, vec)


class DistanceOracleProvider(EmbeddingProvider):
    """Test-support backend with a strictly monotone semantic gradient.

    Once bound to a goal, a node at BFS distance d from the goal gets a
    unit vector whose dot product with the goal's vector is 1/(1+d);
    unreachable nodes get -1. Greedy similarity descent on such vectors
    always follows a shortest path.
    """

    kind = "distance-oracle"

    def __init__(self, graph: LinkGraph, goal: Optional[NodeId] = None, dimension: int = 8):
        super().__init__(dimension)
        self._graph = graph
        self._goal = int(goal) if goal is not None else None
        self._dist = (
            bfs_depths(graph, self._goal, reverse=True) if self._goal is not None else None
        )

    def bind_goal(self, goal: NodeId) -> "DistanceOracleProvider":
        return DistanceOracleProvider(self._graph, goal, self.dimension)

    def _compute(self, node: int, title: str) -> np.ndarray:
        if self._dist is None:
            raise ProviderError("distance oracle used without a bound goal", node=node)
        d = int(self._dist[node])
        sim = -1.0 if d < 0 else 1.0 / (1.0 + d)
        vec = np.zeros(self.dimension, dtype=np.float32)
        vec[0] = sim
        vec[1] = math.sqrt(max(0.0, 1.0 - sim * sim))
        return vec


# ---- similarity and selection ----------------------------------------------------


def similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit vectors (== cosine under the norm contract)."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def best_semantic_neighbor(
    provider: EmbeddingProvider,
    g: LinkGraph,
    v: NodeId,
    goal: NodeId,
    candidates,
) -> Optional[tuple[NodeId, float]]:
    """Candidate most similar to the goal title, ties to the lowest id.

    ``candidates`` must be successors of ``v``; returns None when empty.
    """
    cands = sorted(int(c) for c in candidates)
    if not cands:
        return None
    goal_vec = provider.embed(goal, g.title(goal))
    provider.embed_many([(c, g.title(c)) for c in cands])
    best: Optional[int] = None
    best_sim = -np.inf
    for c in cands:
        s = similarity(provider.embed(c, g.title(c)), goal_vec)
        if s > best_sim:  # strict: ascending order makes ties pick the lowest id
            best = c
            best_sim = s
    return best, float(best_sim)


# ---- persistence -----------------------------------------------------------------


def save_embeddings(provider: EmbeddingProvider, path: str | Path) -> None:
    """Dump the provider's cache as a "WEMB" file, records sorted by node id."""
    entries = sorted(provider.cache.items())
    with open(path, "wb") as f:
        f.write(EMBED_MAGIC)
        f.write(struct.pack("<IIQ", EMBED_VERSION, provider.dimension, len(entries)))
        for node, vec in entries:
            f.write(struct.pack("<Q", node))
            f.write(vec.astype("<f4").tobytes())


def load_embeddings(path: str | Path) -> FileEmbeddingProvider:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != EMBED_MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {EMBED_MAGIC!r}")
        header = f.read(16)
        if len(header) != 16:
            raise FormatError("truncated embedding header")
        version, dimension, count = struct.unpack("<IIQ", header)
        if version != EMBED_VERSION:
            raise FormatError(f"unsupported embedding version {version}")
        vectors: dict[int, np.ndarray] = {}
        record = 8 + dimension * 4
        for _ in range(count):
            data = f.read(record)
            if len(data) != record:
                raise FormatError("truncated embedding record")
            (node,) = struct.unpack_from("<Q", data)
            vectors[node] = np.frombuffer(data, dtype="<f4", offset=8).astype(np.float32)
        if f.read(1):
            raise FormatError("trailing bytes after embedding records")
    return FileEmbeddingProvider(vectors, dimension)
