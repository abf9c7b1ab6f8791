"""Concept identification over person-group mentions from related news text.

The engine deduplicates mentions into representative phrases, scores them
with NE-weighted phrase-vector cosines gated by typed entity chains, grows
clusters in stages (cores, bodies, borders, non-core groups), and finally
merges near-duplicate clusters via TF-IDF lemma vectors. A hierarchical
average-linkage baseline is included for contrast.
"""

__version__ = "0.1.0"

from .model import (             # noqa: F401
    Cluster,
    Component,
    Mention,
    NEComponent,
    PipelineConfig,
    RepresentativePhrase,
)
from .ingest import EmbeddingStore, NERelation  # noqa: F401
from .negrid import NEChain, NEGrid, build_chains  # noqa: F401
from .similarity import SimilarityBundle, build_bundle, cosine  # noqa: F401
from .staged import run_stages  # noqa: F401
from .merge import merge_clusters  # noqa: F401
from .baseline import HCResult, compare, hc_average_linkage  # noqa: F401
from .report import render_report  # noqa: F401
from .pipeline import execute, run_pipeline, validate_inputs  # noqa: F401
