"""Iterative color refinement with canonical, cross-graph-comparable tokens.

A vertex's color after t iterations is encoded as a self-contained string:
iteration 0 is the feature-vector literal (``[1]`` on the trivial domain),
and iteration t+1 is ``(own token at t; sorted neighbor tokens at t)``.
Token equality is structural, so two vertices in *different* graphs get
equal tokens exactly when t refinement rounds cannot distinguish them; no
shared dictionary is needed, and the update is the standard one (new color
= pair of old color and multiset of neighbors' old colors).

Tokens keep unfolding past partition stabilization: a 2-regular graph
stabilizes immediately, yet comparing two graphs at a fixed t needs the
genuinely unfolded depth-t trees. Histories therefore extend themselves on
demand when a later iteration is requested.

``ColorInterner`` is an exact acceleration for bulk sweeps: it maps the
same recursive structure to small integer ids (one id table shared across
graphs), avoiding repeated string building. Id equality coincides with
token-string equality; the test suite cross-checks this exhaustively on
small graphs.
"""

from __future__ import annotations

import hashlib

from .graphs import FeaturedGraph
from .rationals import format_vec


def feature_token(g: FeaturedGraph, v: int) -> str:
    return "[" + ",".join(format_vec(g.features[v])) + "]"


class ColorHistory:
    """Per-iteration vertex tokens for one graph, extendable on demand."""

    def __init__(self, g: FeaturedGraph):
        self.graph = g
        self._adj = g.adjacency()
        self._tokens: list[tuple[str, ...]] = [
            tuple(feature_token(g, v) for v in range(g.n))
        ]
        self.stable_t: int | None = 0 if g.n == 0 else None

    @property
    def computed_t(self) -> int:
        return len(self._tokens) - 1

    def _step(self) -> None:
        prev = self._tokens[-1]
        nxt = tuple(
            "(" + prev[v] + ";" + ",".join(sorted(prev[w] for w in self._adj[v])) + ")"
            for v in range(self.graph.n)
        )
        self._tokens.append(nxt)
        if self.stable_t is None and self.partition_at(len(self._tokens) - 1) == self.partition_at(
            len(self._tokens) - 2
        ):
            self.stable_t = len(self._tokens) - 2

    def extend_to(self, t: int) -> None:
        while self.computed_t < t:
            self._step()

    def tokens_at(self, t: int) -> tuple[str, ...]:
        if t < 0:
            raise ValueError("iteration index must be nonnegative")
        self.extend_to(t)
        return self._tokens[t]

    def token(self, v: int, t: int) -> str:
        if not 0 <= v < self.graph.n:
            raise ValueError(f"unknown vertex {v}")
        return self.tokens_at(t)[v]

    def classes_at(self, t: int) -> dict[str, list[int]]:
        groups: dict[str, list[int]] = {}
        for v, tok in enumerate(self.tokens_at(t)):
            groups.setdefault(tok, []).append(v)
        return groups

    def partition_at(self, t: int) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(vs) for vs in self.classes_at(t).values())


def cr_run(g: FeaturedGraph, t_max: int | None = None) -> ColorHistory:
    """Refine through min(t_max, stabilization + 1) iterations eagerly.

    t_max defaults to |G|, by which point the partition has stabilized.
    The returned history still extends itself if later tokens are asked
    for, since fixed-t cross-graph comparison may need them.
    """
    limit = g.n if t_max is None else t_max
    history = ColorHistory(g)
    for t in range(1, limit + 1):
        history.extend_to(t)
        if history.stable_t is not None and t > history.stable_t:
            break
    return history


def vertex_color(g: FeaturedGraph, v: int, t: int) -> str:
    return cr_run(g, t).token(v, t)


def graph_color(g: FeaturedGraph, t: int) -> str:
    """Canonical serialization of the multiset of vertex tokens at t."""
    tokens = cr_run(g, t).tokens_at(t)
    return "{" + ",".join(sorted(tokens)) + "}"


def token_hash(token: str) -> str:
    return hashlib.sha256(token.encode()).hexdigest()[:16]


def cr_csv_rows(graph_id: str, g: FeaturedGraph, t_max: int | None = None) -> list[dict]:
    """Rows for the class-listing export: graph_id,vertex,t,token_hash,token."""
    history = cr_run(g, t_max)
    rows = []
    for t in range(history.computed_t + 1):
        tokens = history.tokens_at(t)
        for v in range(g.n):
            rows.append(
                {
                    "graph_id": graph_id,
                    "vertex": v + 1,
                    "t": t,
                    "token_hash": token_hash(tokens[v]),
                    "token": tokens[v],
                }
            )
    return rows


class ColorInterner:
    """Structure-to-id table shared across graphs within one sweep.

    Ids are dense ints from a single counter; level-0 keys are feature
    literals and level-t keys are (previous id, sorted neighbor id tuple),
    so ids from different iterations can never collide. Two vertices (in
    any graphs refined through the same interner) receive the same id at
    iteration t iff their canonical token strings at t are equal.
    """

    def __init__(self) -> None:
        self._table: dict = {}

    def _intern(self, key) -> int:
        table = self._table
        found = table.get(key)
        if found is None:
            found = len(table)
            table[key] = found
        return found

    def color_ids_levels(self, g: FeaturedGraph, t_max: int) -> list[list[int]]:
        """Per-vertex ids for every iteration 0..t_max in one refinement pass."""
        adj = g.adjacency()
        ids = [self._intern(("f", feature_token(g, v))) for v in range(g.n)]
        levels = [ids]
        for _ in range(t_max):
            ids = [
                self._intern((ids[v], tuple(sorted(ids[w] for w in adj[v]))))
                for v in range(g.n)
            ]
            levels.append(ids)
        return levels

    def color_ids(self, g: FeaturedGraph, t: int) -> list[int]:
        """Per-vertex color ids after exactly t iterations."""
        return self.color_ids_levels(g, t)[-1]

    def graph_id_of(self, level_ids) -> int:
        """Graph color id for an already-computed per-vertex id list."""
        return self._intern(("g", tuple(sorted(level_ids))))

    def graph_color_id(self, g: FeaturedGraph, t: int) -> int:
        return self.graph_id_of(self.color_ids(g, t))
