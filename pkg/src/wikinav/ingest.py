"""Streaming edge-list ingestion and on-disk formats.

Input is a gzip-compressed, UTF-8, tab-separated hyperlink dump: one header
line, then rows of exactly four fields (page_id_from, page_title_from,
page_id_to, page_title_to). Ingestion is a single chunked pass that never
holds the raw text in memory; page ids are densified in first-seen order.

On-disk formats produced here:

* binary graph "WNAV": magic, u32 version=1, u64 node_count, u64 edge_count,
  forward offsets (node_count+1 x u64), forward targets (edge_count x u64),
  the same offsets/targets pair for the backward adjacency, then node_count
  length-prefixed (u32) UTF-8 titles. Little-endian throughout.
* title map: gzip TSV (dense_id, page_id, title) with tab/newline/backslash
  escaped as \\t, \\n, \\\\. The gzip mtime is pinned to 0 so identical maps
  produce identical bytes.
* GraphML: directed graph, nodes carry a "title" string attribute.
"""

from __future__ import annotations

import gzip
import logging
import struct
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Callable, Optional, Sequence
from xml.etree import ElementTree as ET

import numpy as np

from .errors import FormatError
from .graph import LinkGraph

logger = logging.getLogger(__name__)

GRAPH_MAGIC = b"WNAV"
GRAPH_VERSION = 1
_PROGRESS_EVERY = 250_000


@dataclass
class EdgeRecord:
    """One parsed row of the hyperlink dump."""

    source_page_id: int
    source_title: str
    target_page_id: int
    target_title: str


@dataclass
class IngestStats:
    """Counters from one ingestion pass.

    ``page_ids`` maps each dense node id back to its source page id so the
    title map can carry the original identifier.
    """

    lines_read: int = 0
    edges_kept: int = 0
    duplicates_dropped: int = 0
    self_loops_dropped: int = 0
    malformed_lines: int = 0
    page_ids: list[int] = field(default_factory=list)


def _parse_line(raw: bytes) -> Optional[EdgeRecord]:
    fields = raw.split(b"\t")
    if len(fields) != 4:
        return None
    try:
        src_id = int(fields[0])
        dst_id = int(fields[2])
        src_title = fields[1].decode("utf-8").strip()
        dst_title = fields[3].decode("utf-8").strip()
    except (ValueError, UnicodeDecodeError):
        return None
    if src_id < 0 or dst_id < 0 or not src_title or not dst_title:
        return None
    return EdgeRecord(src_id, src_title, dst_id, dst_title)


def ingest_edge_list(
    path: str | Path,
    on_progress: Optional[Callable[[int], None]] = None,
    chunk_bytes: int = 1 << 16,
) -> tuple[LinkGraph, IngestStats]:
    """Stream a gzipped TSV edge list into a LinkGraph.

    Malformed lines are counted and skipped, never fatal. Duplicate edges
    and self-loops are dropped with their own counters. The result's dense
    ids follow first-seen order of the source page ids.
    """
    stats = IngestStats()
    dense_of_page: dict[int, int] = {}
    titles: list[str] = []
    # edges as packed (u << 32) | v ints; dense ids stay far below 2**32
    sources = array("q")
    targets = array("q")
    seen: set[int] = set()

    def dense(page_id: int, title: str) -> int:
        node = dense_of_page.get(page_id)
        if node is None:
            node = len(titles)
            dense_of_page[page_id] = node
            titles.append(title)
            stats.page_ids.append(page_id)
        return node

    def handle(raw: bytes) -> None:
        stats.lines_read += 1
        if on_progress is not None and stats.lines_read % _PROGRESS_EVERY == 0:
            on_progress(stats.lines_read)
        if stats.lines_read == 1:  # header
            return
        rec = _parse_line(raw)
        if rec is None:
            stats.malformed_lines += 1
            return
        u = dense(rec.source_page_id, rec.source_title)
        v = dense(rec.target_page_id, rec.target_title)
        if u == v:
            stats.self_loops_dropped += 1
            return
        key = (u << 32) | v
        if key in seen:
            stats.duplicates_dropped += 1
            return
        seen.add(key)
        sources.append(u)
        targets.append(v)
        stats.edges_kept += 1

    with gzip.open(path, "rb") as f:
        buf = b""
        while True:
            chunk = f.read(chunk_bytes)
            if not chunk:
                break
            buf += chunk
            *lines, buf = buf.split(b"\n")
            for line in lines:
                handle(line)
        if buf:
            handle(buf)

    edges = np.stack(
        [np.frombuffer(sources, dtype=np.int64), np.frombuffer(targets, dtype=np.int64)],
        axis=1,
    ) if sources else np.empty((0, 2), dtype=np.int64)
    graph = LinkGraph.from_edges(edges, node_count=len(titles), titles=titles)
    logger.info(
        "ingested %d lines: %d nodes, %d edges (%d dup, %d loop, %d malformed)",
        stats.lines_read, graph.node_count, graph.edge_count,
        stats.duplicates_dropped, stats.self_loops_dropped, stats.malformed_lines,
    )
    return graph, stats


# ---- title map ---------------------------------------------------------------


def _escape_title(title: str) -> str:
    return title.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape_title(text: str, lineno: int) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        if i + 1 >= len(text):
            raise FormatError(f"line {lineno}: dangling escape in title")
        nxt = text[i + 1]
        if nxt == "t":
            out.append("\t")
        elif nxt == "n":
            out.append("\n")
        elif nxt == "\\":
            out.append("\\")
        else:
            raise FormatError(f"line {lineno}: unknown escape \\{nxt}")
        i += 2
    return "".join(out)


def write_title_map(
    g: LinkGraph, path: str | Path, page_ids: Optional[Sequence[int]] = None
) -> None:
    """Persist dense-id -> title as gzip TSV.

    ``page_ids`` supplies the original page id column; it defaults to the
    dense id itself for graphs that never had external ids.
    """
    if page_ids is not None and len(page_ids) != g.node_count:
        raise ValueError("page_ids length must equal node_count")
    with open(path, "wb") as raw:
        # fixed mtime so identical maps are byte-identical
        with gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as f:
            f.write(b"dense_id\tpage_id\ttitle\n")
            for node, title in enumerate(g.titles):
                page = page_ids[node] if page_ids is not None else node
                row = f"{node}\t{page}\t{_escape_title(title)}\n"
                f.write(row.encode("utf-8"))


def read_title_map(path: str | Path) -> dict[int, str]:
    """Parse a title map back into a dense-id -> title dict."""
    result: dict[int, str] = {}
    with gzip.open(path, "rb") as f:
        data = f.read()
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    for lineno, raw in enumerate(lines, start=1):
        if lineno == 1:
            continue
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"line {lineno}: not valid UTF-8") from e
        fields = text.split("\t")
        if len(fields) != 3:
            raise FormatError(f"line {lineno}: expected 3 fields, got {len(fields)}")
        try:
            node = int(fields[0])
        except ValueError as e:
            raise FormatError(f"line {lineno}: bad dense id {fields[0]!r}") from e
        result[node] = _unescape_title(fields[2], lineno)
    return result


# ---- binary graph format -------------------------------------------------------


def _write_graph_stream(g: LinkGraph, out: BinaryIO) -> None:
    out.write(GRAPH_MAGIC)
    out.write(struct.pack("<IQQ", GRAPH_VERSION, g.node_count, g.edge_count))
    out.write(g.fwd_offsets.astype("<u8").tobytes())
    out.write(g.fwd_targets.astype("<u8").tobytes())
    out.write(g.bwd_offsets.astype("<u8").tobytes())
    out.write(g.bwd_targets.astype("<u8").tobytes())
    for title in g.titles:
        b = title.encode("utf-8")
        out.write(struct.pack("<I", len(b)))
        out.write(b)


def save_graph(g: LinkGraph, path: str | Path) -> None:
    with open(path, "wb") as f:
        _write_graph_stream(g, f)


def _read_exact(f: BinaryIO, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise FormatError(f"truncated graph file while reading {what}")
    return data


def load_graph(path: str | Path) -> LinkGraph:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != GRAPH_MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {GRAPH_MAGIC!r}")
        version, n, m = struct.unpack("<IQQ", _read_exact(f, 20, "header"))
        if version != GRAPH_VERSION:
            raise FormatError(f"unsupported graph format version {version}")

        def read_u64(count: int, what: str) -> np.ndarray:
            data = _read_exact(f, count * 8, what)
            return np.frombuffer(data, dtype="<u8").astype(np.int64)

        fwd_offsets = read_u64(n + 1, "forward offsets")
        fwd_targets = read_u64(m, "forward targets")
        bwd_offsets = read_u64(n + 1, "backward offsets")
        bwd_targets = read_u64(m, "backward targets")
        titles = []
        for i in range(n):
            (length,) = struct.unpack("<I", _read_exact(f, 4, f"title length {i}"))
            titles.append(_read_exact(f, length, f"title {i}").decode("utf-8"))
        if f.read(1):
            raise FormatError("trailing bytes after title block")
    try:
        return LinkGraph(fwd_offsets, fwd_targets, bwd_offsets, bwd_targets, tuple(titles))
    except ValueError as e:
        raise FormatError(f"inconsistent graph file: {e}") from e


# ---- GraphML -------------------------------------------------------------------

_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def export_graphml(g: LinkGraph, path: str | Path) -> None:
    """Write the graph as GraphML with a string "title" node attribute."""
    ET.register_namespace("", _GRAPHML_NS)
    root = ET.Element(f"{{{_GRAPHML_NS}}}graphml")
    key = ET.SubElement(root, f"{{{_GRAPHML_NS}}}key")
    key.set("id", "d0")
    key.set("for", "node")
    key.set("attr.name", "title")
    key.set("attr.type", "string")
    graph_el = ET.SubElement(root, f"{{{_GRAPHML_NS}}}graph")
    graph_el.set("id", "G")
    graph_el.set("edgedefault", "directed")
    for v in range(g.node_count):
        node_el = ET.SubElement(graph_el, f"{{{_GRAPHML_NS}}}node", id=f"n{v}")
        data = ET.SubElement(node_el, f"{{{_GRAPHML_NS}}}data", key="d0")
        data.text = g.titles[v]
    for idx, (u, w) in enumerate(g.edges()):
        ET.SubElement(
            graph_el, f"{{{_GRAPHML_NS}}}edge",
            id=f"e{idx}", source=f"n{u}", target=f"n{w}",
        )
    ET.ElementTree(root).write(path, xml_declaration=True, encoding="utf-8")
