"""Domain model: mentions, representative phrases, clusters, configuration.

A mention is one noun phrase referring to a group of persons in one document.
Mentions that reduce to the same representative phrase text are folded into a
single RepresentativePhrase, which is the unit everything downstream clusters.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import ConfigError

# Mentions come typed by what kind of group reference they are. Only the two
# named-entity-bearing types seed cluster cores; the rest can join later.
ENTITY_TYPES = frozenset({"person-nes", "person-nns", "person-nn", "group"})
CORE_ENTITY_TYPES = frozenset({"person-nes", "person-nns"})

# Dependency roles a phrase component may carry. Appositions stay out of the
# similarity stages and only enter the merge-stage lemma bags.
COMPONENT_ROLES = frozenset({"head", "compound", "amod", "nmod", "nummod", "appos"})
RP_COMPONENT_ROLES = frozenset({"head", "compound", "amod", "nmod", "nummod"})

MAX_MENTION_TOKENS = 20


@dataclass(frozen=True)
class Component:
    """One lemmatized phrase component with its dependency role."""

    lemma: str
    role: str

    def to_dict(self) -> dict[str, str]:
        return {"lemma": self.lemma, "role": self.role}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Component":
        return cls(lemma=str(d["lemma"]), role=str(d["role"]))


@dataclass(frozen=True)
class NEComponent:
    """A named-entity surface form inside a mention, with its NER label."""

    surface: str
    ne_label: str

    def to_dict(self) -> dict[str, str]:
        return {"surface": self.surface, "ne_label": self.ne_label}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "NEComponent":
        return cls(surface=str(d["surface"]), ne_label=str(d["ne_label"]))


@dataclass(frozen=True)
class Mention:
    """A single group-of-persons noun phrase occurrence in a document."""

    mention_id: str
    doc_id: str
    text: str
    entity_type: str
    rp_text: str
    head: str
    components: tuple[Component, ...]
    ne_components: tuple[NEComponent, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "mention_id": self.mention_id,
            "doc_id": self.doc_id,
            "text": self.text,
            "entity_type": self.entity_type,
            "rp_text": self.rp_text,
            "head": self.head,
            "components": [c.to_dict() for c in self.components],
            "ne_components": [n.to_dict() for n in self.ne_components],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Mention":
        return cls(
            mention_id=str(d["mention_id"]),
            doc_id=str(d["doc_id"]),
            text=str(d["text"]),
            entity_type=str(d["entity_type"]),
            rp_text=str(d["rp_text"]),
            head=str(d["head"]),
            components=tuple(Component.from_dict(c) for c in d["components"]),
            ne_components=tuple(
                NEComponent.from_dict(n) for n in d.get("ne_components", [])
            ),
        )


@dataclass(frozen=True)
class RepresentativePhrase:
    """Deduplicated mention form; the clustering unit.

    rp_id is dense and assigned by sorted rp_text, so it doubles as the row
    index of every similarity matrix.
    """

    rp_id: int
    rp_text: str
    head: str
    components: tuple[Component, ...]
    ne: str | None              # primary named-entity surface, if any
    ne_components: tuple[NEComponent, ...]
    member_mention_ids: tuple[str, ...]   # input order preserved
    is_core: bool               # any member typed person-nes / person-nns

    def to_dict(self) -> dict[str, Any]:
        return {
            "rp_id": self.rp_id,
            "rp_text": self.rp_text,
            "head": self.head,
            "components": [c.to_dict() for c in self.components],
            "ne": self.ne,
            "ne_components": [n.to_dict() for n in self.ne_components],
            "member_mention_ids": list(self.member_mention_ids),
            "is_core": self.is_core,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RepresentativePhrase":
        return cls(
            rp_id=int(d["rp_id"]),
            rp_text=str(d["rp_text"]),
            head=str(d["head"]),
            components=tuple(Component.from_dict(c) for c in d["components"]),
            ne=d["ne"],
            ne_components=tuple(
                NEComponent.from_dict(n) for n in d.get("ne_components", [])
            ),
            member_mention_ids=tuple(str(m) for m in d["member_mention_ids"]),
            is_core=bool(d["is_core"]),
        )

    def lemma_set(self, extended: bool = False) -> frozenset[str]:
        """Lowercased component lemmas; extended adds apposition lemmas."""
        roles = COMPONENT_ROLES if extended else RP_COMPONENT_ROLES
        return frozenset(c.lemma.lower() for c in self.components if c.role in roles)


@dataclass(frozen=True)
class Cluster:
    """One concept cluster with per-stage member provenance (rp_ids)."""

    cluster_id: int
    core_members: frozenset[int]
    body_members: frozenset[int]
    border_members: frozenset[int]
    kind: str                      # "staged" or "noncore"
    merged_from: tuple[int, ...] = ()   # predecessor ids when merge combined >1

    def members(self) -> frozenset[int]:
        return self.core_members | self.body_members | self.border_members

    def to_dict(self) -> dict[str, Any]:
        return {
            "cluster_id": self.cluster_id,
            "core_members": sorted(self.core_members),
            "body_members": sorted(self.body_members),
            "border_members": sorted(self.border_members),
            "kind": self.kind,
            "merged_from": list(self.merged_from),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Cluster":
        return cls(
            cluster_id=int(d["cluster_id"]),
            core_members=frozenset(d["core_members"]),
            body_members=frozenset(d["body_members"]),
            border_members=frozenset(d["border_members"]),
            kind=str(d["kind"]),
            merged_from=tuple(d.get("merged_from", [])),
        )


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable the pipeline reads, with its operating default."""

    wt: float = 1.7                 # named-entity token weight
    thr_sim_rp: float = 0.4         # phrase-similarity floor
    body_thr: float = 0.5           # min link to join a cluster body
    border_min_links: int = 2       # positive links needed to join as border
    noncore_thr: float = 0.5        # neighbor threshold for non-core clusters
    merge_thr: float = 0.6          # cluster-vector cosine needed to merge
    or_thr_base: float = 0.5        # overlap-ratio clamp floor
    or_thr_cap: float = 0.7         # overlap-ratio clamp ceiling
    or_thr_log_base: float = 5000.0  # corpus size anchoring the log
    hc_distance_thr: float = 0.7    # baseline average-linkage cut
    embedding_dim: int = 300

    def validate(self) -> None:
        if not self.wt > 0:
            raise ConfigError(f"wt must be positive, got {self.wt}")
        for name in ("thr_sim_rp", "body_thr", "noncore_thr", "merge_thr"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 <= self.or_thr_base <= self.or_thr_cap <= 1.0:
            raise ConfigError(
                "need 0 <= or_thr_base <= or_thr_cap <= 1, got "
                f"base={self.or_thr_base} cap={self.or_thr_cap}"
            )
        if not self.or_thr_log_base > 1:
            raise ConfigError(
                f"or_thr_log_base must exceed 1, got {self.or_thr_log_base}"
            )
        if not 0.0 <= self.hc_distance_thr <= 2.0:
            raise ConfigError(
                f"hc_distance_thr must lie in [0, 2], got {self.hc_distance_thr}"
            )
        if not (isinstance(self.border_min_links, int) and self.border_min_links >= 1):
            raise ConfigError(
                f"border_min_links must be an integer >= 1, got {self.border_min_links}"
            )
        if not (isinstance(self.embedding_dim, int) and self.embedding_dim >= 1):
            raise ConfigError(
                f"embedding_dim must be an integer >= 1, got {self.embedding_dim}"
            )
        for name in ("wt", "thr_sim_rp", "body_thr", "noncore_thr", "merge_thr",
                     "or_thr_base", "or_thr_cap", "or_thr_log_base",
                     "hc_distance_thr"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs: dict[str, Any] = {}
        for f in dataclasses.fields(cls):
            if f.name not in d:
                continue
            v = d[f.name]
            if f.type.startswith("int"):
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ConfigError(f"{f.name} must be an integer, got {v!r}")
                kwargs[f.name] = v
            else:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ConfigError(f"{f.name} must be a number, got {v!r}")
                kwargs[f.name] = float(v)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError("config must be a flat JSON object")
        return cls.from_dict(raw)


def select_primary_ne(
    rp_text: str, head: str, ne_components: Iterable[NEComponent]
) -> str | None:
    """Pick the phrase's primary named entity.

    The winner is the NE whose surface occurrence ends closest to the head
    token; ties go to the longer surface, then to input order. NEs whose
    surface never occurs in rp_text sort last but can still win when nothing
    else is present.
    """
    nes = list(ne_components)
    if not nes:
        return None
    tokens = rp_text.split()
    head_pos = len(tokens) - 1
    for i, tok in enumerate(tokens):
        if tok.lower() == head.lower():
            head_pos = i
            break
    best_key: tuple[float, int, int] | None = None
    best_surface: str | None = None
    for order, ne in enumerate(nes):
        dist = _closest_occurrence_distance(tokens, ne.surface.split(), head_pos)
        key = (dist, -len(ne.surface), order)
        if best_key is None or key < best_key:
            best_key = key
            best_surface = ne.surface
    return best_surface


def ne_token_positions(rp_text: str, ne_surface: str | None) -> frozenset[int]:
    """Token indices of every occurrence of the primary NE surface."""
    if not ne_surface:
        return frozenset()
    tokens = rp_text.split()
    span = ne_surface.split()
    hits: set[int] = set()
    for start in _occurrences(tokens, span):
        hits.update(range(start, start + len(span)))
    return frozenset(hits)


def _occurrences(tokens: list[str], span: list[str]) -> list[int]:
    if not span or len(span) > len(tokens):
        return []
    return [
        i
        for i in range(len(tokens) - len(span) + 1)
        if tokens[i : i + len(span)] == span
    ]


def _closest_occurrence_distance(
    tokens: list[str], span: list[str], head_pos: int
) -> float:
    occ = _occurrences(tokens, span)
    if not occ:
        return math.inf
    return min(abs(start + len(span) - 1 - head_pos) for start in occ)
