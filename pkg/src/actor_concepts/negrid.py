"""Named-entity chains and the pairwise weight grid they induce.

Chains are connected components of the typed similarity relations, computed
separately for the two chain types: country/nationality (cn) and
organization/persons (op). The grid then scores any two NE surfaces:

  * same chain                      -> the boost weight wt
  * different chains of one type    -> 0 (the pair is blocked)
  * anything else                   -> 1 (neutral)

A surface may sit in one cn chain and one op chain at once; membership in a
chain of the other type never blocks a pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .ingest import NERelation
from .model import RepresentativePhrase

CHAIN_TYPES = ("cn", "op")

_ARTICLES = {"the", "a", "an"}


def normalize_surface(surface: str) -> str:
    """Trim whitespace and strip one leading article; keep case otherwise."""
    tokens = surface.strip().split()
    if len(tokens) > 1 and tokens[0].lower() in _ARTICLES:
        tokens = tokens[1:]
    return " ".join(tokens)


@dataclass(frozen=True)
class NEChain:
    """One connected component of same-type NE relations."""

    chain_id: int
    chain_type: str
    members: frozenset[str]     # normalized surfaces


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        parent = self.parent
        if x not in parent:
            parent[x] = x
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # Deterministic root choice: keep the lexicographically smaller.
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def build_chains(relations: Sequence[NERelation]) -> list[NEChain]:
    """Connected components per chain type, over normalized surfaces.

    Chain ids are dense, assigned by (smallest member surface, chain_type).
    Relations whose endpoints normalize to the same surface are dropped.
    """
    found: list[tuple[str, frozenset[str]]] = []
    for chain_type in CHAIN_TYPES:
        uf = _UnionFind()
        for rel in relations:
            if rel.chain_type != chain_type:
                continue
            a = normalize_surface(rel.a)
            b = normalize_surface(rel.b)
            if not a or not b or a == b:
                continue
            uf.union(a, b)
        groups: dict[str, set[str]] = {}
        for surface in uf.parent:
            groups.setdefault(uf.find(surface), set()).add(surface)
        for members in groups.values():
            if len(members) >= 2:
                found.append((chain_type, frozenset(members)))
    found.sort(key=lambda tm: (min(tm[1]), tm[0]))
    return [
        NEChain(chain_id=i, chain_type=chain_type, members=members)
        for i, (chain_type, members) in enumerate(found)
    ]


@dataclass(frozen=True)
class PairWeight:
    """Token weights for the two sides of an RP pair, plus the block flag."""

    w_first: float
    w_second: float
    allowed: bool


@dataclass(frozen=True)
class NEGrid:
    """Chain membership lookup plus the weight function over surface pairs."""

    chains: tuple[NEChain, ...]
    wt: float

    @cached_property
    def _membership(self) -> dict[tuple[str, str], int]:
        # (chain_type, surface) -> chain_id; build once, grid is immutable.
        out: dict[tuple[str, str], int] = {}
        for chain in self.chains:
            for member in chain.members:
                out[(chain.chain_type, member)] = chain.chain_id
        return out

    def chain_id(self, surface: str | None, chain_type: str) -> int | None:
        if surface is None:
            return None
        return self._membership.get((chain_type, normalize_surface(surface)))

    def in_grid(self, surface: str | None) -> bool:
        """True when the surface belongs to at least one chain."""
        if surface is None:
            return False
        s = normalize_surface(surface)
        return any((t, s) in self._membership for t in CHAIN_TYPES)

    def grid_weight(self, a: str, b: str) -> float:
        """Score two NE surfaces: wt same chain, 0 blocked, 1 neutral."""
        na, nb = normalize_surface(a), normalize_surface(b)
        if na == nb:
            return self.wt if self.in_grid(na) else 1.0
        blocked = False
        for chain_type in CHAIN_TYPES:
            ca = self._membership.get((chain_type, na))
            cb = self._membership.get((chain_type, nb))
            if ca is None or cb is None:
                continue
            if ca == cb:
                return self.wt
            blocked = True
        return 0.0 if blocked else 1.0

    def pair_weight(
        self, first: RepresentativePhrase, second: RepresentativePhrase
    ) -> PairWeight:
        """Token weights for an RP pair.

        When both RPs carry an NE, the grid value applies to both NE tokens
        and a zero blocks the pair outright. When exactly one side has an NE
        and that NE sits in some chain, it keeps the boost alone. All other
        tokens, and all other cases, weight 1.
        """
        ne_a, ne_b = first.ne, second.ne
        if ne_a is not None and ne_b is not None:
            g = self.grid_weight(ne_a, ne_b)
            if g == 0.0:
                return PairWeight(0.0, 0.0, allowed=False)
            return PairWeight(g, g, allowed=True)
        wa = self.wt if (ne_a is not None and self.in_grid(ne_a)) else 1.0
        wb = self.wt if (ne_b is not None and self.in_grid(ne_b)) else 1.0
        return PairWeight(wa, wb, allowed=True)
