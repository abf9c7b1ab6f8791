"""Weighted phrase vectors and the three similarity matrices.

The bundle holds, over all representative phrases:

  * phrase_sim: pair-weighted phrase-vector cosines, thresholded and
    grid-gated (zero when the grid blocks the pair, on the diagonal, or
    below the similarity floor);
  * core_sim: the restriction of phrase_sim to core RPs;
  * head_sim: plain cosines between distinct head tokens, with equal heads
    pinned at 0.5.

Because a pair's token weights depend only on the chain relation between the
two primary NEs, each RP needs just two precomputed vectors: the plain mean
and the NE-boosted mean. The full matrix is then assembled from three gram
matrices plus per-pair category masks, which keeps construction O(n²·dim).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UnembeddableError, ZeroVectorError
from .ingest import EmbeddingStore, resolve_tokens
from .model import PipelineConfig, RepresentativePhrase, ne_token_positions
from .negrid import NEGrid

# Gram matrices are always computed in fixed-size row blocks so the BLAS call
# shapes (and therefore the result bits) do not depend on the thread count.
_BLOCK_ROWS = 256


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity clamped to [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"vector lengths differ: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for an all-zero vector")
    return float(np.clip(float(np.dot(u, v)) / (nu * nv), -1.0, 1.0))


def weighted_phrase_vector(
    rp: RepresentativePhrase,
    weights: Sequence[float],
    store: EmbeddingStore,
) -> np.ndarray:
    """Mean of weight-scaled resolved token vectors.

    `weights` runs parallel to the greedy-resolved tokens of rp_text. The sum
    is divided by the resolved-token count, not the weight mass.
    """
    tokens = resolve_tokens(rp.rp_text, store)
    if not tokens:
        raise UnembeddableError(f"no token of {rp.rp_text!r} is in the store")
    if len(weights) != len(tokens):
        raise ValueError(
            f"{len(weights)} weights for {len(tokens)} resolved tokens")
    total = np.zeros(store.dim, dtype=np.float64)
    for w, tok in zip(weights, tokens):
        total += float(w) * tok.vector
    return total / len(tokens)


@dataclass
class SimilarityBundle:
    """All similarity state the clustering stages read.

    rp_ids are dense, so rp_id indexes phrase_sim directly. core_index maps an
    rp_id to its row in core_sim.
    """

    rps: tuple[RepresentativePhrase, ...]
    phrase_sim: np.ndarray
    core_ids: tuple[int, ...]
    core_sim: np.ndarray
    heads: tuple[str, ...]
    head_sim: np.ndarray
    head_index: dict[str, int]
    plain_vectors: np.ndarray      # unweighted mean phrase vectors, n x dim
    excluded: tuple[int, ...]      # rp_ids with no resolvable token
    missing_heads: tuple[str, ...]

    @property
    def core_index(self) -> dict[int, int]:
        return {rp_id: row for row, rp_id in enumerate(self.core_ids)}

    def head_value(self, h1: str, h2: str) -> float:
        """Head similarity: 0.5 for equal heads, matrix lookup otherwise."""
        if h1 == h2:
            return 0.5
        i = self.head_index.get(h1)
        j = self.head_index.get(h2)
        if i is None or j is None:
            return 0.0
        return float(self.head_sim[i, j])


def _blocked_gram(left: np.ndarray, right_t: np.ndarray, threads: int) -> np.ndarray:
    n = left.shape[0]
    out = np.empty((n, right_t.shape[1]), dtype=np.float64)
    blocks = [(s, min(s + _BLOCK_ROWS, n)) for s in range(0, n, _BLOCK_ROWS)]

    def fill(block: tuple[int, int]) -> None:
        s, e = block
        out[s:e] = left[s:e] @ right_t

    if threads <= 1 or len(blocks) <= 1:
        for b in blocks:
            fill(b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, blocks))
    return out


def _unit_rows(m: np.ndarray) -> np.ndarray:
    norms = np.sqrt((m * m).sum(axis=1))
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return m * inv[:, None]


def _mirror_upper(m: np.ndarray) -> np.ndarray:
    # Exact symmetry: each pair's value is stored once and reflected.
    upper = np.triu(m, k=1)
    return upper + upper.T


def build_bundle(
    rps: Sequence[RepresentativePhrase],
    store: EmbeddingStore,
    grid: NEGrid,
    cfg: PipelineConfig,
    threads: int = 1,
) -> SimilarityBundle:
    """Compute every similarity matrix for the given RP set.

    Unembeddable RPs keep all-zero rows and are listed in `excluded`; heads
    absent from the store are dropped from the head matrix only.
    """
    rps = tuple(sorted(rps, key=lambda rp: rp.rp_id))
    n = len(rps)
    dim = store.dim
    plain = np.zeros((n, dim), dtype=np.float64)
    boost = np.zeros((n, dim), dtype=np.float64)
    embeddable = np.zeros(n, dtype=bool)
    excluded: list[int] = []
    for row, rp in enumerate(rps):
        if rp.rp_id != row:
            raise ValueError("rp_ids must be dense and start at 0")
        tokens = resolve_tokens(rp.rp_text, store)
        if not tokens:
            excluded.append(rp.rp_id)
            continue
        embeddable[row] = True
        ne_pos = ne_token_positions(rp.rp_text, rp.ne)
        total = np.zeros(dim, dtype=np.float64)
        ne_total = np.zeros(dim, dtype=np.float64)
        for tok in tokens:
            total += tok.vector
            # A multi-token store key counts as an NE token when its span
            # touches any NE position.
            if ne_pos and any(p in ne_pos for p in range(tok.start, tok.end + 1)):
                ne_total += tok.vector
        plain[row] = total / len(tokens)
        boost[row] = (total + (cfg.wt - 1.0) * ne_total) / len(tokens)

    u_plain = _unit_rows(plain)
    u_boost = _unit_rows(boost)

    # Pair categories from each RP's primary-NE chain membership.
    cn_arr = np.full(n, -1, dtype=np.int64)
    op_arr = np.full(n, -1, dtype=np.int64)
    has_ne = np.zeros(n, dtype=bool)
    for row, rp in enumerate(rps):
        if rp.ne is None:
            continue
        has_ne[row] = True
        c = grid.chain_id(rp.ne, "cn")
        o = grid.chain_id(rp.ne, "op")
        if c is not None:
            cn_arr[row] = c
        if o is not None:
            op_arr[row] = o
    in_grid = (cn_arr >= 0) | (op_arr >= 0)

    same_chain = (
        ((cn_arr[:, None] == cn_arr[None, :]) & (cn_arr[:, None] >= 0))
        | ((op_arr[:, None] == op_arr[None, :]) & (op_arr[:, None] >= 0))
    )
    blocked = ~same_chain & (
        ((cn_arr[:, None] >= 0) & (cn_arr[None, :] >= 0)
         & (cn_arr[:, None] != cn_arr[None, :]))
        | ((op_arr[:, None] >= 0) & (op_arr[None, :] >= 0)
           & (op_arr[:, None] != op_arr[None, :]))
    )
    solo_row = has_ne[:, None] & ~has_ne[None, :] & in_grid[:, None]
    solo_col = ~has_ne[:, None] & has_ne[None, :] & in_grid[None, :]

    plain_t = u_plain.T.copy()
    boost_t = u_boost.T.copy()
    c_pp = _blocked_gram(u_plain, plain_t, threads)
    c_bb = _blocked_gram(u_boost, boost_t, threads)
    c_bp = _blocked_gram(u_boost, plain_t, threads)

    sim = np.where(same_chain, c_bb,
                   np.where(solo_row, c_bp,
                            np.where(solo_col, c_bp.T, c_pp)))
    sim = np.clip(sim, 0.0, 1.0)
    sim[blocked] = 0.0
    sim = np.where(sim >= cfg.thr_sim_rp, sim, 0.0)
    sim[~embeddable, :] = 0.0
    sim[:, ~embeddable] = 0.0
    phrase_sim = _mirror_upper(sim)

    core_ids = tuple(rp.rp_id for rp in rps if rp.is_core)
    core_sim = phrase_sim[np.ix_(core_ids, core_ids)].copy()

    all_heads = sorted({rp.head for rp in rps})
    heads: list[str] = []
    missing: list[str] = []
    vecs: list[np.ndarray] = []
    for h in all_heads:
        v = store.get(h)
        if v is None or not np.any(v):
            missing.append(h)
        else:
            heads.append(h)
            vecs.append(v)
    if heads:
        u_heads = _unit_rows(np.stack(vecs))
        head_sim = _mirror_upper(np.clip(u_heads @ u_heads.T, 0.0, 1.0))
        np.fill_diagonal(head_sim, 0.5)
    else:
        head_sim = np.zeros((0, 0), dtype=np.float64)

    return SimilarityBundle(
        rps=rps,
        phrase_sim=phrase_sim,
        core_ids=core_ids,
        core_sim=core_sim,
        heads=tuple(heads),
        head_sim=head_sim,
        head_index={h: i for i, h in enumerate(heads)},
        plain_vectors=plain,
        excluded=tuple(excluded),
        missing_heads=tuple(missing),
    )
