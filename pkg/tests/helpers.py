"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's data structures and
algorithms: distances come from Floyd-Warshall matrix relaxation,
reachability from boolean-matrix repeated squaring, betweenness from
explicit enumeration of every shortest path, pruning from a naive
delete-while-any-sink loop. They are the reference the fast paths are
checked against.
"""

from __future__ import annotations

import numpy as np

from wikinav.graph import LinkGraph

UNREACHED = -1


def er_digraph(rng: np.random.Generator, n: int, p: float) -> list[tuple[int, int]]:
    """Erdos-Renyi style random directed edge list (no self-loops)."""
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    us, vs = np.nonzero(mask)
    return list(zip(us.tolist(), vs.tolist()))


def strongly_connected_digraph(
    rng: np.random.Generator, n: int, extra_edges: int
) -> list[tuple[int, int]]:
    """A random permutation cycle (guaranteeing strong connectivity) plus chords."""
    perm = rng.permutation(n).tolist()
    edges = [(perm[i], perm[(i + 1) % n]) for i in range(n)]
    us = rng.integers(0, n, size=extra_edges)
    vs = rng.integers(0, n, size=extra_edges)
    edges.extend((int(u), int(v)) for u, v in zip(us, vs) if u != v)
    return edges


def make_graph(edges, n=None, titles=None) -> LinkGraph:
    return LinkGraph.from_edges(edges, node_count=n, titles=titles)


def adjacency_dict(n: int, edges) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for u, v in edges:
        if u != v:
            adj[u].add(v)
    return adj


def fw_distances(n: int, edges) -> np.ndarray:
    """All-pairs hop counts by Floyd-Warshall; UNREACHED for no path."""
    big = n + 10
    dist = np.full((n, n), big, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for u, v in edges:
        if u != v:
            dist[u, v] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, k, None] + dist[None, k, :])
    dist[dist >= big] = UNREACHED
    return dist


def brute_reachable(n: int, edges, src: int) -> set[int]:
    """Transitive-closure row via boolean-matrix repeated squaring."""
    a = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(a, True)
    for u, v in edges:
        if u != v:
            a[u, v] = True
    while True:
        nxt = a | (a @ a)
        if np.array_equal(nxt, a):
            break
        a = nxt
    return set(np.flatnonzero(a[src]).tolist())


def brute_prune_sinks(n: int, edges, also_sources: bool = False) -> set[int]:
    """Delete-any-sink-until-none-left loop; returns the surviving node set."""
    alive = set(range(n))
    edge_set = {(u, v) for u, v in edges if u != v}
    while True:
        out_deg = {v: 0 for v in alive}
        in_deg = {v: 0 for v in alive}
        for u, v in edge_set:
            if u in alive and v in alive:
                out_deg[u] += 1
                in_deg[v] += 1
        doomed = {v for v in alive if out_deg[v] == 0}
        if also_sources:
            doomed |= {v for v in alive if in_deg[v] == 0}
        if not doomed:
            return alive
        alive -= doomed


def brute_bfs_depths(n: int, edges, src: int) -> dict[int, int]:
    adj = adjacency_dict(n, edges)
    depths = {src: 0}
    frontier = [src]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for w in sorted(adj[v]):
                if w not in depths:
                    depths[w] = d
                    nxt.append(w)
        frontier = nxt
    return depths


def brute_betweenness(n: int, edges) -> np.ndarray:
    """Betweenness by explicitly enumerating every shortest path per pair."""
    adj = adjacency_dict(n, edges)
    dist = fw_distances(n, edges)
    scores = np.zeros(n, dtype=np.float64)

    def all_shortest_paths(s: int, t: int) -> list[list[int]]:
        target_len = dist[s, t]
        paths: list[list[int]] = []

        def extend(path: list[int]) -> None:
            v = path[-1]
            if v == t:
                paths.append(list(path))
                return
            remaining = target_len - (len(path) - 1)
            for w in sorted(adj[v]):
                if dist[w, t] == remaining - 1:
                    path.append(w)
                    extend(path)
                    path.pop()

        extend([s])
        return paths

    for s in range(n):
        for t in range(n):
            if s == t or dist[s, t] == UNREACHED:
                continue
            paths = all_shortest_paths(s, t)
            through = np.zeros(n, dtype=np.float64)
            for path in paths:
                for v in path[1:-1]:
                    through[v] += 1
            scores += through / len(paths)
    return scores
