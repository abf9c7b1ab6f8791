"""Input loading: mention records, embedding table, NE relation rows.

All loaders are strict. A bad line fails the whole load with its 1-based line
number; silently skipping records would change clustering output downstream.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ConflictError, DimensionError, ParseError, SchemaError
from .model import (
    CORE_ENTITY_TYPES,
    ENTITY_TYPES,
    MAX_MENTION_TOKENS,
    RP_COMPONENT_ROLES,
    COMPONENT_ROLES,
    Component,
    Mention,
    NEComponent,
    RepresentativePhrase,
    select_primary_ne,
)

logger = logging.getLogger("actor_concepts.ingest")


@dataclass(frozen=True)
class EmbeddingStore:
    """Token -> vector table. Multi-word keys join their tokens with '_'.

    Treated as immutable after loading; nothing in the engine mutates it.
    """

    dim: int
    table: dict[str, np.ndarray]
    max_key_tokens: int = 1

    def __contains__(self, key: str) -> bool:
        return key in self.table

    def __len__(self) -> int:
        return len(self.table)

    def get(self, key: str) -> np.ndarray | None:
        return self.table.get(key)


@dataclass(frozen=True)
class ResolvedToken:
    """One greedy-matched embedding entry covering rp_text tokens [start, end]."""

    key: str
    vector: np.ndarray
    start: int
    end: int


@dataclass(frozen=True)
class NERelation:
    """One similarity edge between two NE surfaces, typed cn or op."""

    a: str
    b: str
    chain_type: str

    def to_dict(self) -> dict[str, str]:
        return {"a": self.a, "b": self.b, "chain_type": self.chain_type}


def load_mentions(path: str) -> list[Mention]:
    """Read one JSON mention per line, validating the record schema."""
    mentions: list[Mention] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(line_no, f"invalid JSON: {e.msg}") from e
            if not isinstance(raw, dict):
                raise ParseError(line_no, "mention record must be a JSON object")
            mention = _mention_from_raw(raw, line_no)
            if mention.mention_id in seen_ids:
                raise SchemaError(line_no, "mention_id",
                                  f"duplicate mention_id {mention.mention_id!r}")
            seen_ids.add(mention.mention_id)
            mentions.append(mention)
    return mentions


def _mention_from_raw(raw: dict[str, Any], line_no: int) -> Mention:
    for key in ("mention_id", "doc_id", "text", "entity_type",
                "rp_text", "head", "components"):
        if key not in raw:
            raise SchemaError(line_no, key, "missing required field")
    for key in ("mention_id", "doc_id", "text", "entity_type", "rp_text", "head"):
        if not isinstance(raw[key], str) or not raw[key]:
            raise SchemaError(line_no, key, "must be a non-empty string")
    if raw["entity_type"] not in ENTITY_TYPES:
        raise SchemaError(
            line_no, "entity_type",
            f"{raw['entity_type']!r} not one of {sorted(ENTITY_TYPES)}")
    n_tokens = len(raw["text"].split())
    if n_tokens > MAX_MENTION_TOKENS:
        raise SchemaError(line_no, "text",
                          f"{n_tokens} tokens exceeds the {MAX_MENTION_TOKENS}-token cap")
    if not raw["rp_text"].split():
        raise SchemaError(line_no, "rp_text", "must contain at least one token")
    if not isinstance(raw["components"], list) or not raw["components"]:
        raise SchemaError(line_no, "components", "must be a non-empty array")
    components: list[Component] = []
    head_lemmas: list[str] = []
    for c in raw["components"]:
        if not isinstance(c, dict) or "lemma" not in c or "role" not in c:
            raise SchemaError(line_no, "components",
                              "each component needs 'lemma' and 'role'")
        if c["role"] not in COMPONENT_ROLES:
            raise SchemaError(line_no, "components",
                              f"role {c['role']!r} not one of {sorted(COMPONENT_ROLES)}")
        if not isinstance(c["lemma"], str) or not c["lemma"]:
            raise SchemaError(line_no, "components", "lemma must be a non-empty string")
        comp = Component(lemma=c["lemma"], role=c["role"])
        components.append(comp)
        if comp.role == "head":
            head_lemmas.append(comp.lemma)
    if len(head_lemmas) != 1:
        raise SchemaError(line_no, "components",
                          f"expected exactly one head component, got {len(head_lemmas)}")
    if head_lemmas[0].lower() != raw["head"].lower():
        raise SchemaError(line_no, "head",
                          f"head {raw['head']!r} does not match head component "
                          f"{head_lemmas[0]!r}")
    ne_components: list[NEComponent] = []
    for n in raw.get("ne_components", []):
        if not isinstance(n, dict) or "surface" not in n or "ne_label" not in n:
            raise SchemaError(line_no, "ne_components",
                              "each entry needs 'surface' and 'ne_label'")
        if not isinstance(n["surface"], str) or not n["surface"]:
            raise SchemaError(line_no, "ne_components",
                              "surface must be a non-empty string")
        ne_components.append(NEComponent(surface=n["surface"],
                                         ne_label=str(n["ne_label"])))
    return Mention(
        mention_id=raw["mention_id"],
        doc_id=raw["doc_id"],
        text=raw["text"],
        entity_type=raw["entity_type"],
        rp_text=raw["rp_text"],
        head=raw["head"],
        components=tuple(components),
        ne_components=tuple(ne_components),
    )


def load_embeddings(path: str, dim: int) -> EmbeddingStore:
    """Read a TSV of token<TAB>float... rows into an EmbeddingStore.

    Rows whose vector arity differs from `dim` raise DimensionError with the
    offending line number. A duplicate key keeps the last row and logs one
    warning.
    """
    table: dict[str, np.ndarray] = {}
    duplicates = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            row = line.rstrip("\n")
            if not row.strip():
                continue
            parts = row.split("\t")
            if len(parts) < 2:
                raise ParseError(line_no, "expected token TAB float...")
            key = parts[0]
            if not key:
                raise ParseError(line_no, "empty token key")
            values = parts[1:]
            if len(values) != dim:
                raise DimensionError(
                    line_no,
                    f"vector has {len(values)} entries, expected {dim}")
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as e:
                raise ParseError(line_no, f"non-numeric vector entry: {e}") from e
            if not np.all(np.isfinite(vec)):
                raise ParseError(line_no, "vector entries must be finite")
            if key in table:
                duplicates += 1
            table[key] = vec
    if duplicates:
        logger.warning("embedding file has %d duplicate keys; kept last rows",
                       duplicates)
    max_key_tokens = max((k.count("_") + 1 for k in table), default=1)
    return EmbeddingStore(dim=dim, table=table, max_key_tokens=max_key_tokens)


def load_relations(path: str) -> list[NERelation]:
    """Read one JSON relation per line: {"a": ..., "b": ..., "chain_type": ...}."""
    relations: list[NERelation] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(line_no, f"invalid JSON: {e.msg}") from e
            if not isinstance(raw, dict):
                raise ParseError(line_no, "relation record must be a JSON object")
            for key in ("a", "b", "chain_type"):
                if key not in raw:
                    raise SchemaError(line_no, key, "missing required field")
                if not isinstance(raw[key], str) or not raw[key]:
                    raise SchemaError(line_no, key, "must be a non-empty string")
            if raw["chain_type"] not in ("cn", "op"):
                raise SchemaError(line_no, "chain_type",
                                  f"{raw['chain_type']!r} not one of ['cn', 'op']")
            if raw["a"] == raw["b"]:
                raise SchemaError(line_no, "b", "relation endpoints must differ")
            relations.append(NERelation(a=raw["a"], b=raw["b"],
                                        chain_type=raw["chain_type"]))
    return relations


def derive_rps(mentions: Sequence[Mention]) -> list[RepresentativePhrase]:
    """Fold mentions into representative phrases keyed by exact rp_text.

    rp_ids are assigned densely in sorted rp_text order, so the output is
    invariant under input permutation apart from member-mention order, which
    follows input order.
    """
    groups: dict[str, list[Mention]] = {}
    for m in mentions:
        groups.setdefault(m.rp_text, []).append(m)
    rps: list[RepresentativePhrase] = []
    for rp_id, rp_text in enumerate(sorted(groups)):
        members = groups[rp_text]
        heads = {m.head.lower() for m in members}
        if len(heads) != 1:
            raise ConflictError(
                f"rp_text {rp_text!r}: members disagree on head: {sorted(heads)}")
        # Exact-case head string: take the first member's spelling.
        head = members[0].head
        comp_seen: set[tuple[str, str]] = set()
        for m in members:
            for c in m.components:
                comp_seen.add((c.lemma, c.role))
        components = tuple(
            Component(lemma=lemma, role=role)
            for lemma, role in sorted(comp_seen)
        )
        ne_seen: list[NEComponent] = []
        ne_keys: set[tuple[str, str]] = set()
        for m in members:
            for n in m.ne_components:
                k = (n.surface, n.ne_label)
                if k not in ne_keys:
                    ne_keys.add(k)
                    ne_seen.append(n)
        ne_seen.sort(key=lambda n: (n.surface, n.ne_label))
        ne = select_primary_ne(rp_text, head, ne_seen)
        rps.append(RepresentativePhrase(
            rp_id=rp_id,
            rp_text=rp_text,
            head=head,
            components=components,
            ne=ne,
            ne_components=tuple(ne_seen),
            member_mention_ids=tuple(m.mention_id for m in members),
            is_core=any(m.entity_type in CORE_ENTITY_TYPES for m in members),
        ))
    return rps


def resolve_tokens(rp_text: str, store: EmbeddingStore) -> list[ResolvedToken]:
    """Greedy longest-match segmentation of rp_text against the store.

    Multi-word store keys use '_' between tokens. Tokens covered by no key are
    skipped; an all-unknown phrase resolves to the empty list.
    """
    tokens = rp_text.split()
    out: list[ResolvedToken] = []
    i = 0
    n = len(tokens)
    while i < n:
        matched = False
        upper = min(n, i + store.max_key_tokens)
        for j in range(upper, i, -1):
            key = "_".join(tokens[i:j])
            vec = store.table.get(key)
            if vec is not None:
                out.append(ResolvedToken(key=key, vector=vec, start=i, end=j - 1))
                i = j
                matched = True
                break
        if not matched:
            i += 1
    return out


def rp_vector_tokens(
    rp: RepresentativePhrase, store: EmbeddingStore
) -> list[ResolvedToken]:
    """Embedding entries backing one RP's phrase vector."""
    return resolve_tokens(rp.rp_text, store)
