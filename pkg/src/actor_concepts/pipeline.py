"""End-to-end orchestration: load inputs, run all stages, write outputs.

Outputs are kept in memory until every stage has succeeded, then written in
one pass; a failure part-way through writing removes whatever was created so
an output directory never holds a torn run.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .baseline import ComparisonReport, HCResult, compare, hc_average_linkage
from .errors import EngineError
from .ingest import (
    EmbeddingStore,
    NERelation,
    derive_rps,
    load_embeddings,
    load_mentions,
    load_relations,
    resolve_tokens,
)
from .merge import MergeResult, cluster_lemma_bag, merge_clusters
from .model import Cluster, Mention, PipelineConfig, RepresentativePhrase
from .negrid import NEGrid, build_chains
from .report import render_report
from .similarity import SimilarityBundle, build_bundle
from .staged import StageOutputs, run_stages

logger = logging.getLogger("actor_concepts.pipeline")


@dataclass
class PipelineResult:
    """Everything one full run produced, before any file is written."""

    mentions: list[Mention]
    rps: list[RepresentativePhrase]
    grid: NEGrid
    bundle: SimilarityBundle
    stages: StageOutputs
    merge: MergeResult
    final_clusters: tuple[Cluster, ...]
    manifest: dict


def _sha256(path: str) -> tuple[str, int]:
    h = hashlib.sha256()
    size = 0
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
            size += len(chunk)
    return h.hexdigest(), size


def execute(
    mentions: Sequence[Mention],
    store: EmbeddingStore,
    relations: Sequence[NERelation],
    cfg: PipelineConfig,
    threads: int = 1,
) -> PipelineResult:
    """Run every stage on already-loaded inputs."""
    timing: dict[str, float] = {}

    t0 = time.perf_counter()
    rps = derive_rps(mentions)
    grid = NEGrid(chains=tuple(build_chains(relations)), wt=cfg.wt)
    timing["preprocess"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bundle = build_bundle(rps, store, grid, cfg, threads=threads)
    timing["similarity"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    stages = run_stages(bundle, grid, cfg)
    timing["staged"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bags = [cluster_lemma_bag(c, rps) for c in stages.clusters]
    merged = merge_clusters(stages.clusters, bags, store, grid, cfg)
    timing["merge"] = time.perf_counter() - t0

    clustered = set()
    for cluster in merged.clusters:
        clustered |= cluster.members()
    manifest = {
        "engine_version": __version__,
        "config": cfg.to_dict(),
        "stages": {
            "mentions": len(mentions),
            "rps": len(rps),
            "core_rps": sum(1 for rp in rps if rp.is_core),
            "ne_chains": len(grid.chains),
            "or_threshold": stages.or_thr,
            "cluster_cores": len(stages.cores),
            "body_members": sum(len(b) for b in stages.bodies),
            "border_members": sum(len(b) for b in stages.borders),
            "noncore_clusters": len(stages.noncore),
            "clusters_before_merge": len(stages.clusters),
            "final_clusters": len(merged.clusters),
            "unclustered_rps": len(rps) - len(clustered),
        },
        "exclusions": {
            "unembeddable_rps": [
                bundle.rps[rp_id].rp_text for rp_id in bundle.excluded],
            "heads_missing_vector": list(bundle.missing_heads),
            "unmergeable_clusters": list(merged.excluded_cluster_ids),
        },
        "timing": timing,
    }
    manifest["reproducibility_digest"] = _manifest_digest(manifest)
    return PipelineResult(
        mentions=list(mentions),
        rps=rps,
        grid=grid,
        bundle=bundle,
        stages=stages,
        merge=merged,
        final_clusters=merged.clusters,
        manifest=manifest,
    )


def _manifest_digest(manifest: dict) -> str:
    # Timing is wall-clock noise; everything else must be reproducible.
    stable = {k: v for k, v in manifest.items()
              if k not in ("timing", "reproducibility_digest")}
    blob = json.dumps(stable, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_inputs(
    mentions_path: str,
    embeddings_path: str,
    relations_path: str,
    config_path: str | None,
) -> tuple[list[Mention], EmbeddingStore, list[NERelation], PipelineConfig]:
    cfg = (PipelineConfig.from_file(config_path)
           if config_path else PipelineConfig())
    cfg.validate()
    mentions = load_mentions(mentions_path)
    store = load_embeddings(embeddings_path, cfg.embedding_dim)
    relations = load_relations(relations_path)
    return mentions, store, relations, cfg


def run_pipeline(
    mentions_path: str,
    embeddings_path: str,
    relations_path: str,
    config_path: str | None,
    out_dir: str,
    fmt: str = "text",
    threads: int = 1,
    dump_matrices: str | None = None,
) -> PipelineResult:
    """Full file-to-file run; returns the in-memory result as well."""
    mentions, store, relations, cfg = load_inputs(
        mentions_path, embeddings_path, relations_path, config_path)
    if not mentions:
        raise EngineError("no mentions in input")
    result = execute(mentions, store, relations, cfg, threads=threads)

    digests = {}
    for name, path in (("mentions", mentions_path),
                       ("embeddings", embeddings_path),
                       ("relations", relations_path),
                       ("config", config_path)):
        if path is None:
            digests[name] = None
            continue
        digest, size = _sha256(path)
        digests[name] = {"path": os.path.basename(path),
                         "sha256": digest, "bytes": size}
    result.manifest["inputs"] = digests
    result.manifest["reproducibility_digest"] = _manifest_digest(result.manifest)

    report_doc = render_report(result.final_clusters, result.rps,
                               result.mentions, fmt=fmt)
    report_name = "report.json" if fmt == "json" else "report.txt"
    outputs: list[tuple[str, str]] = [
        (report_name, report_doc),
        ("manifest.json",
         json.dumps(result.manifest, indent=2, ensure_ascii=False) + "\n"),
    ]
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    try:
        for name, payload in outputs:
            path = os.path.join(out_dir, name)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(payload)
            written.append(path)
        if dump_matrices is not None:
            os.makedirs(dump_matrices, exist_ok=True)
            for name, payload in _matrix_dumps(result.bundle):
                path = os.path.join(dump_matrices, name)
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(payload)
                written.append(path)
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise
    return result


def _matrix_tsv(labels: Sequence[str], matrix: np.ndarray) -> str:
    lines = ["\t".join(["rp_text"] + list(labels))]
    for label, row in zip(labels, matrix):
        lines.append("\t".join([label] + [repr(float(v)) for v in row]))
    return "\n".join(lines) + "\n"


def _matrix_dumps(bundle: SimilarityBundle) -> list[tuple[str, str]]:
    rp_texts = [rp.rp_text for rp in bundle.rps]
    core_texts = [rp_texts[rp_id] for rp_id in bundle.core_ids]
    return [
        ("phrase_sim.tsv", _matrix_tsv(rp_texts, bundle.phrase_sim)),
        ("core_sim.tsv", _matrix_tsv(core_texts, bundle.core_sim)),
        ("head_sim.tsv", _matrix_tsv(list(bundle.heads), bundle.head_sim)),
    ]


def run_baseline(
    mentions_path: str,
    embeddings_path: str,
    relations_path: str,
    config_path: str | None,
    distance_thr: float | None = None,
) -> tuple[HCResult, list[RepresentativePhrase], list[Mention], PipelineConfig]:
    """Baseline clustering over unweighted mean vectors of embeddable RPs."""
    mentions, store, relations, cfg = load_inputs(
        mentions_path, embeddings_path, relations_path, config_path)
    if not mentions:
        raise EngineError("no mentions in input")
    rps = derive_rps(mentions)
    thr = cfg.hc_distance_thr if distance_thr is None else distance_thr
    vectors = {}
    for rp in rps:
        tokens = resolve_tokens(rp.rp_text, store)
        if not tokens:
            continue
        total = np.zeros(store.dim, dtype=np.float64)
        for tok in tokens:
            total += tok.vector
        mean = total / len(tokens)
        if np.any(mean):
            vectors[rp.rp_id] = mean
    result = hc_average_linkage(vectors, thr)
    # RPs with no usable vector can never cluster; count them as NOT.
    leftover = frozenset(rp.rp_id for rp in rps) - set(vectors)
    result = HCResult(clusters=result.clusters,
                      unclustered=result.unclustered | leftover)
    return result, rps, mentions, cfg


@dataclass
class ValidationReport:
    mentions: int = 0
    rps: int = 0
    relations: int = 0
    embeddings: int = 0
    errors: list[str] = field(default_factory=list)
    oov_rps: list[str] = field(default_factory=list)
    unchained_nes: list[str] = field(default_factory=list)

    @property
    def oov_rate(self) -> float:
        return len(self.oov_rps) / self.rps if self.rps else 0.0


def validate_inputs(
    mentions_path: str,
    embeddings_path: str,
    relations_path: str,
    config_path: str | None,
) -> ValidationReport:
    """Run every ingest check without clustering."""
    report = ValidationReport()
    try:
        mentions, store, relations, cfg = load_inputs(
            mentions_path, embeddings_path, relations_path, config_path)
    except EngineError as e:
        report.errors.append(str(e))
        return report
    report.mentions = len(mentions)
    report.relations = len(relations)
    report.embeddings = len(store)
    try:
        rps = derive_rps(mentions)
    except EngineError as e:
        report.errors.append(str(e))
        return report
    report.rps = len(rps)
    grid = NEGrid(chains=tuple(build_chains(relations)), wt=cfg.wt)
    for rp in rps:
        if not resolve_tokens(rp.rp_text, store):
            report.oov_rps.append(rp.rp_text)
    unchained = sorted({
        rp.ne for rp in rps
        if rp.ne is not None and not grid.in_grid(rp.ne)})
    report.unchained_nes = list(unchained)
    return report
