"""Immutable directed hyperlink graph with pruning, sampling, and BFS primitives.

The graph is stored as two CSR adjacency structures (forward and backward)
over dense integer node ids, plus a per-node title table. Construction
normalizes the edge set: self-loops are dropped, duplicates collapsed, and
each adjacency segment is sorted ascending. Every operation in this module
is a pure function of its inputs; pruning and sampling return a new graph
together with an explicit old-to-new id table.
"""

from __future__ import annotations

import hashlib
import struct
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

NodeId = int


@dataclass(frozen=True, eq=False)
class IdRemap:
    """Bijection between retained original node ids and the new dense ids.

    ``old_ids[new_id] == old_id``; retained nodes keep their relative order,
    so ``old_ids`` is strictly ascending.
    """

    old_ids: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.old_ids, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("old_ids must be one-dimensional")
        if arr.size and (arr[0] < 0 or np.any(np.diff(arr) <= 0)):
            raise ValueError("old_ids must be non-negative and strictly ascending")
        object.__setattr__(self, "old_ids", arr)
        arr.setflags(write=False)

    def __len__(self) -> int:
        return int(self.old_ids.size)

    def old_id(self, new_id: NodeId) -> NodeId:
        return int(self.old_ids[new_id])

    def new_id(self, old_id: NodeId) -> Optional[NodeId]:
        """New id of a retained original node, or None if it was dropped."""
        i = int(np.searchsorted(self.old_ids, old_id))
        if i < self.old_ids.size and self.old_ids[i] == old_id:
            return i
        return None

    def pairs(self) -> Iterator[tuple[NodeId, NodeId]]:
        for new, old in enumerate(self.old_ids.tolist()):
            yield old, new


def _default_titles(node_count: int) -> tuple[str, ...]:
    return tuple(f"n{i}" for i in range(node_count))


@dataclass(frozen=True, eq=False)
class LinkGraph:
    """Directed graph in dual-CSR form with per-node titles.

    Immutable after construction: the arrays are marked read-only and all
    queries are safe for concurrent readers.
    """

    fwd_offsets: np.ndarray
    fwd_targets: np.ndarray
    bwd_offsets: np.ndarray
    bwd_targets: np.ndarray
    titles: tuple[str, ...]

    def __post_init__(self):
        for name in ("fwd_offsets", "fwd_targets", "bwd_offsets", "bwd_targets"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)
        object.__setattr__(self, "titles", tuple(self.titles))
        self._validate()

    def _validate(self):
        n = self.fwd_offsets.size - 1
        m = self.fwd_targets.size
        if n < 0:
            raise ValueError("offsets array must have at least one entry")
        if self.bwd_offsets.size != n + 1 or self.bwd_targets.size != m:
            raise ValueError("forward/backward adjacency sizes disagree")
        if len(self.titles) != n:
            raise ValueError(f"expected {n} titles, got {len(self.titles)}")
        coo = []
        for offsets, targets in ((self.fwd_offsets, self.fwd_targets),
                                 (self.bwd_offsets, self.bwd_targets)):
            if offsets[0] != 0 or offsets[-1] != m or np.any(np.diff(offsets) < 0):
                raise ValueError("offsets must be non-decreasing from 0 to edge_count")
            seg = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
            coo.append(seg)
            if m == 0:
                continue
            if targets.min() < 0 or targets.max() >= n:
                raise ValueError("adjacency target out of range")
            if np.any(targets == seg):
                raise ValueError("self-loops are not allowed")
            same = seg[1:] == seg[:-1]
            if np.any(targets[1:][same] <= targets[:-1][same]):
                raise ValueError("adjacency segments must be strictly ascending")
        if m:
            fwd_keys = coo[0] * n + self.fwd_targets
            bwd_keys = self.bwd_targets * n + coo[1]
            if not np.array_equal(np.sort(fwd_keys), np.sort(bwd_keys)):
                raise ValueError("backward adjacency is not the transpose of forward")

    # ---- construction ------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]] | np.ndarray,
        node_count: Optional[int] = None,
        titles: Optional[Sequence[str]] = None,
    ) -> "LinkGraph":
        """Build a graph from an edge iterable, normalizing as it goes.

        Self-loops are dropped and duplicate edges collapsed; node ids must
        already be dense (node_count defaults to max id + 1).
        """
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be (source, target) pairs")
        if node_count is None:
            node_count = int(arr.max()) + 1 if arr.size else 0
        if arr.size:
            if arr.min() < 0 or arr.max() >= node_count:
                raise IndexError("edge endpoint out of range")
            arr = arr[arr[:, 0] != arr[:, 1]]
            if arr.size:
                arr = np.unique(arr, axis=0)  # lexsorted: groups sources, sorts targets
        if titles is None:
            titles = _default_titles(node_count)
        return cls._from_coo(node_count, arr, tuple(titles))

    @classmethod
    def _from_coo(cls, node_count: int, arr: np.ndarray, titles: tuple[str, ...]) -> "LinkGraph":
        fwd_offsets = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(arr[:, 0], minlength=node_count), out=fwd_offsets[1:])
        fwd_targets = np.ascontiguousarray(arr[:, 1])
        order = np.lexsort((arr[:, 0], arr[:, 1]))
        bwd_offsets = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(arr[:, 1], minlength=node_count), out=bwd_offsets[1:])
        bwd_targets = np.ascontiguousarray(arr[order, 0])
        return cls(fwd_offsets, fwd_targets, bwd_offsets, bwd_targets, titles)

    # ---- queries -----------------------------------------------------------

    @property
    def node_count(self) -> int:
        return int(self.fwd_offsets.size - 1)

    @property
    def edge_count(self) -> int:
        return int(self.fwd_targets.size)

    def _check_node(self, v: NodeId) -> int:
        v = int(v)
        if not 0 <= v < self.node_count:
            raise IndexError(f"node id {v} out of range [0, {self.node_count})")
        return v

    def out_neighbors(self, v: NodeId) -> np.ndarray:
        """Sorted successors of ``v`` (read-only view)."""
        v = self._check_node(v)
        return self.fwd_targets[self.fwd_offsets[v]:self.fwd_offsets[v + 1]]

    def in_neighbors(self, v: NodeId) -> np.ndarray:
        """Sorted predecessors of ``v`` (read-only view)."""
        v = self._check_node(v)
        return self.bwd_targets[self.bwd_offsets[v]:self.bwd_offsets[v + 1]]

    def out_degree(self, v: NodeId) -> int:
        v = self._check_node(v)
        return int(self.fwd_offsets[v + 1] - self.fwd_offsets[v])

    def in_degree(self, v: NodeId) -> int:
        v = self._check_node(v)
        return int(self.bwd_offsets[v + 1] - self.bwd_offsets[v])

    def title(self, v: NodeId) -> str:
        return self.titles[self._check_node(v)]

    def edges(self) -> Iterator[tuple[NodeId, NodeId]]:
        offsets = self.fwd_offsets
        targets = self.fwd_targets.tolist()
        for u in range(self.node_count):
            for w in targets[offsets[u]:offsets[u + 1]]:
                yield u, w

    def content_hash(self) -> str:
        """sha256 over a canonical encoding of structure and titles."""
        h = hashlib.sha256()
        h.update(struct.pack("<QQ", self.node_count, self.edge_count))
        h.update(self.fwd_offsets.astype("<u8").tobytes())
        h.update(self.fwd_targets.astype("<u8").tobytes())
        for t in self.titles:
            b = t.encode("utf-8")
            h.update(struct.pack("<I", len(b)))
            h.update(b)
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinkGraph):
            return NotImplemented
        return (
            np.array_equal(self.fwd_offsets, other.fwd_offsets)
            and np.array_equal(self.fwd_targets, other.fwd_targets)
            and np.array_equal(self.bwd_offsets, other.bwd_offsets)
            and np.array_equal(self.bwd_targets, other.bwd_targets)
            and self.titles == other.titles
        )

    def __repr__(self) -> str:
        return f"LinkGraph(nodes={self.node_count}, edges={self.edge_count})"


# ---- traversal -------------------------------------------------------------


def bfs_shortest_path(g: LinkGraph, src: NodeId, dst: NodeId) -> Optional[list[NodeId]]:
    """Minimum-hop directed path src -> dst, or None if unreachable.

    Neighbors are expanded in ascending id order, so the returned path is
    deterministic among equal-length alternatives.
    """
    src = g._check_node(src)
    dst = g._check_node(dst)
    if src == dst:
        return [src]
    parent = np.full(g.node_count, -1, dtype=np.int64)
    parent[src] = src
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in g.out_neighbors(v).tolist():
            if parent[w] >= 0:
                continue
            parent[w] = v
            if w == dst:
                path = [dst]
                while path[-1] != src:
                    path.append(int(parent[path[-1]]))
                path.reverse()
                return path
            queue.append(w)
    return None


def bfs_depths(
    g: LinkGraph,
    source: NodeId,
    *,
    reverse: bool = False,
    max_depth: Optional[int] = None,
) -> np.ndarray:
    """BFS depth of every node from ``source`` (-1 if unreached).

    With ``reverse=True`` edges are followed backwards, yielding the
    distance from each node TO the source.
    """
    source = g._check_node(source)
    neighbors = g.in_neighbors if reverse else g.out_neighbors
    depths = np.full(g.node_count, -1, dtype=np.int64)
    depths[source] = 0
    frontier = [source]
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = []
        for v in frontier:
            for w in neighbors(v).tolist():
                if depths[w] < 0:
                    depths[w] = depth
                    nxt.append(w)
        frontier = nxt
    return depths


def reachable_set(g: LinkGraph, src: NodeId) -> set[NodeId]:
    """All nodes with a directed path from ``src``, including ``src``."""
    depths = bfs_depths(g, src)
    return set(np.flatnonzero(depths >= 0).tolist())


# ---- subgraph extraction ----------------------------------------------------


def _induced_subgraph(g: LinkGraph, keep: np.ndarray) -> tuple[LinkGraph, IdRemap]:
    """Subgraph on the ascending original-id array ``keep``, re-densified."""
    keep = np.asarray(keep, dtype=np.int64)
    new_of_old = np.full(g.node_count, -1, dtype=np.int64)
    new_of_old[keep] = np.arange(keep.size, dtype=np.int64)
    degrees = np.diff(g.fwd_offsets)
    src = np.repeat(np.arange(g.node_count, dtype=np.int64), degrees)
    dst = g.fwd_targets
    mask = (new_of_old[src] >= 0) & (new_of_old[dst] >= 0)
    edges = np.stack([new_of_old[src[mask]], new_of_old[dst[mask]]], axis=1)
    titles = tuple(g.titles[i] for i in keep.tolist())
    sub = LinkGraph.from_edges(edges, node_count=int(keep.size), titles=titles)
    return sub, IdRemap(keep)


def prune_sinks(g: LinkGraph, also_sources: bool = False) -> tuple[LinkGraph, IdRemap]:
    """Fixed point of iterated sink removal (out-degree-0 nodes).

    Removing a sink can create new sinks; the loop runs to exhaustion, so
    every surviving node has out-degree >= 1 within the result. With
    ``also_sources=True``, in-degree-0 nodes are removed in the same loop.
    An empty graph is a valid result.
    """
    out_deg = np.diff(g.fwd_offsets).copy()
    in_deg = np.diff(g.bwd_offsets).copy()
    removed = np.zeros(g.node_count, dtype=bool)
    queue = deque(np.flatnonzero(out_deg == 0).tolist())
    if also_sources:
        queue.extend(np.flatnonzero(in_deg == 0).tolist())
    while queue:
        v = queue.popleft()
        if removed[v]:
            continue
        removed[v] = True
        for p in g.in_neighbors(v).tolist():
            if not removed[p]:
                out_deg[p] -= 1
                if out_deg[p] == 0:
                    queue.append(p)
        if also_sources:
            for w in g.out_neighbors(v).tolist():
                if not removed[w]:
                    in_deg[w] -= 1
                    if in_deg[w] == 0:
                        queue.append(w)
    keep = np.flatnonzero(~removed)
    return _induced_subgraph(g, keep)


def k_ball_sample(
    g: LinkGraph, seed: NodeId, radius: int, node_cap: int
) -> tuple[LinkGraph, IdRemap]:
    """Forward-BFS ball of the given radius around ``seed``, capped in size.

    Layers are retained whole until the cap would be exceeded; the final
    layer is then truncated in ascending original-id order. The result is
    the induced subgraph over the retained nodes.
    """
    seed = g._check_node(seed)
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if node_cap < 1:
        raise ValueError("node_cap must be >= 1")
    seen = np.zeros(g.node_count, dtype=bool)
    seen[seed] = True
    retained = [seed]
    frontier = [seed]
    for _ in range(radius):
        if len(retained) >= node_cap:
            break
        layer = []
        for v in frontier:
            for w in g.out_neighbors(v).tolist():
                if not seen[w]:
                    seen[w] = True
                    layer.append(w)
        if not layer:
            break
        room = node_cap - len(retained)
        if len(layer) > room:
            retained.extend(sorted(layer)[:room])
            break
        retained.extend(layer)
        frontier = layer
    keep = np.array(sorted(retained), dtype=np.int64)
    return _induced_subgraph(g, keep)
