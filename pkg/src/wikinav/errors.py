"""Exception types shared across the package."""

from __future__ import annotations


class FormatError(ValueError):
    """A serialized artifact (graph, title map, scores, embeddings) is malformed."""


class ConfigError(ValueError):
    """A benchmark or pipeline configuration is invalid."""


class DeadEndError(RuntimeError):
    """Navigation reached a node with no usable outgoing edge."""


class ProviderError(RuntimeError):
    """An embedding backend failed or cannot serve the requested node."""

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node
