"""Exception types shared across the engine.

Loaders attach 1-based line numbers so CLI users can locate bad input rows.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(EngineError):
    """Bad configuration value or unknown configuration key."""


class ParseError(EngineError):
    """Input line is not parseable at all (malformed JSON, wrong arity)."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SchemaError(EngineError):
    """Input line parsed but violates the record schema."""

    def __init__(self, line_no: int, field: str, message: str):
        super().__init__(f"line {line_no}: field '{field}': {message}")
        self.line_no = line_no
        self.field = field


class DimensionError(EngineError):
    """Embedding row width disagrees with the configured dimension."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ConflictError(EngineError):
    """Mentions sharing one rp_text disagree on head or entity type."""


class ZeroVectorError(EngineError):
    """Cosine requested for a vector with no nonzero entry."""


class UnembeddableError(EngineError):
    """A phrase has no token covered by the embedding store."""


class UnembeddableClusterError(EngineError):
    """No lemma of a cluster's bag resolves to a vector."""


class UniverseMismatchError(EngineError):
    """Two partitions being compared do not cover the same RP ids."""
