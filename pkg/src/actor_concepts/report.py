"""Stage-tagged concept listings, as text or JSON.

Text output holds one line per cluster: the label, then the member mention
texts grouped under the CORE/BODY/BORDER keywords, then a final NOT line for
everything unclustered. JSON carries the same structure machine-readably.
Rendering is a pure function of the pipeline output: identical inputs give
identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .model import Cluster, Mention, RepresentativePhrase

_STAGE_FIELDS = (
    ("CORE", "core_members"),
    ("BODY", "body_members"),
    ("BORDER", "border_members"),
)


@dataclass(frozen=True)
class ConceptReport:
    """Final clusters plus the NOT bucket, with display labels resolved."""

    clusters: tuple[dict, ...]
    not_clustered: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "clusters": [dict(c) for c in self.clusters],
            "not_clustered": [dict(e) for e in self.not_clustered],
        }


def _label_for(
    cluster: Cluster, rp_by_id: dict[int, RepresentativePhrase]
) -> str:
    """Most frequent core RP text by member-mention count; ties by rp_id.

    Non-core clusters have no core members, so all members compete.
    """
    pool = sorted(cluster.core_members) or sorted(cluster.members())
    best_id = max(pool, key=lambda rp_id: (len(rp_by_id[rp_id].member_mention_ids),
                                           -rp_id))
    return rp_by_id[best_id].rp_text


def build_report(
    final_clusters: Sequence[Cluster],
    rps: Sequence[RepresentativePhrase],
    mentions: Sequence[Mention],
) -> ConceptReport:
    rp_by_id = {rp.rp_id: rp for rp in rps}
    mention_order = {m.mention_id: pos for pos, m in enumerate(mentions)}
    mention_by_id = {m.mention_id: m for m in mentions}

    def rp_entries(rp_ids: frozenset[int]) -> list[dict]:
        # Order RPs by their earliest mention in the input.
        ordered = sorted(
            rp_ids,
            key=lambda rp_id: (
                min(mention_order[mid]
                    for mid in rp_by_id[rp_id].member_mention_ids),
                rp_id,
            ),
        )
        out = []
        for rp_id in ordered:
            rp = rp_by_id[rp_id]
            mids = sorted(rp.member_mention_ids, key=lambda m: mention_order[m])
            out.append({
                "rp_id": rp_id,
                "rp_text": rp.rp_text,
                "mention_ids": mids,
                "mention_texts": _unique_texts(mids, mention_by_id),
            })
        return out

    clusters = []
    for cluster in sorted(final_clusters, key=lambda c: c.cluster_id):
        entry: dict = {
            "cluster_id": cluster.cluster_id,
            "label": _label_for(cluster, rp_by_id),
            "kind": cluster.kind,
            "merged_from": list(cluster.merged_from),
        }
        for keyword, field in _STAGE_FIELDS:
            members = getattr(cluster, field)
            if members:
                entry[keyword.lower()] = rp_entries(members)
        clusters.append(entry)

    clustered = set()
    for cluster in final_clusters:
        clustered |= cluster.members()
    leftover = frozenset(rp.rp_id for rp in rps) - clustered
    return ConceptReport(
        clusters=tuple(clusters),
        not_clustered=tuple(rp_entries(leftover)),
    )


def _unique_texts(
    mention_ids: Sequence[str], mention_by_id: dict[str, Mention]
) -> list[str]:
    seen: set[str] = set()
    texts: list[str] = []
    for mid in mention_ids:
        text = mention_by_id[mid].text
        if text not in seen:
            seen.add(text)
            texts.append(text)
    return texts


def render_report(
    final_clusters: Sequence[Cluster],
    rps: Sequence[RepresentativePhrase],
    mentions: Sequence[Mention],
    fmt: str = "text",
) -> str:
    """Render the concept report; fmt is 'text' or 'json'."""
    report = build_report(final_clusters, rps, mentions)
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines: list[str] = []
    for entry in report.clusters:
        parts = [f"[{entry['cluster_id']}] {entry['label']}"]
        for keyword, _ in _STAGE_FIELDS:
            section = entry.get(keyword.lower())
            if not section:
                continue
            texts: list[str] = []
            seen: set[str] = set()
            for rp_entry in section:
                for text in rp_entry["mention_texts"]:
                    if text not in seen:
                        seen.add(text)
                        texts.append(text)
            parts.append(f"{keyword}: " + ", ".join(texts))
        lines.append(" — ".join(parts[:2]) + "".join(
            f" {p}" for p in parts[2:]))
    not_texts: list[str] = []
    seen_not: set[str] = set()
    for rp_entry in report.not_clustered:
        for text in rp_entry["mention_texts"]:
            if text not in seen_not:
                seen_not.add(text)
                not_texts.append(text)
    lines.append("NOT: " + ", ".join(not_texts) if not_texts else "NOT:")
    return "\n".join(lines) + "\n"
