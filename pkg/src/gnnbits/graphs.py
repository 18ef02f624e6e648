"""Featured graphs, brute-force generators, and graph metrics.

Graphs are undirected and simple, vertices 0-based in memory (1-based in
files), each vertex carrying a rational feature vector. The default
feature map is the constant 1 in one dimension, the domain all counting
experiments quantify over.

Generators:
- every labeled simple graph on n vertices (binary counter over the
  n(n-1)/2 edge slots, so the order is deterministic and index ranges are
  well-defined for parallel chunking);
- compositions (k_0..k_n) of n into n+1 ordered nonnegative parts;
- the two-level star family: for a composition K, a center v adjacent to
  middle vertices u_1..u_n, and u_i adjacent to outer vertex w_j iff
  i > k_0 + ... + k_(j-1). The threshold includes k_0; under this
  convention the multiset of u-side degrees toward the w level is exactly
  {{ i with multiplicity k_i }}, which is checkable exhaustively.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .rationals import CapExceeded, RVec, as_rat, format_vec

DEFAULT_GRAPH_CAP_N = 7
DEFAULT_STAR_CAP_N = 6

TRIVIAL_FEATURE: RVec = (Fraction(1),)


@dataclass(frozen=True)
class FeaturedGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    features: tuple[RVec, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        seen = set()
        for a, b in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a},{b}) out of range for n={self.n}")
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        if not self.features:
            object.__setattr__(
                self, "features", tuple(TRIVIAL_FEATURE for _ in range(self.n))
            )
        if len(self.features) != self.n:
            raise ValueError(f"{len(self.features)} feature vectors for {self.n} vertices")
        if self.n:
            dim = len(self.features[0])
            if any(len(f) != dim for f in self.features):
                raise ValueError("feature vectors must share one dimension")

    @property
    def feature_dim(self) -> int:
        return len(self.features[0]) if self.n else 0

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for row in adj:
            row.sort()
        return adj


def make_graph(n: int, edges: Sequence[Sequence[int]], features=None) -> FeaturedGraph:
    canon = tuple(sorted((min(a, b), max(a, b)) for a, b in edges))
    feats = ()
    if features is not None:
        feats = tuple(tuple(as_rat(x) for x in row) for row in features)
    return FeaturedGraph(n, canon, feats)


def has_trivial_features(g: FeaturedGraph) -> bool:
    return all(f == TRIVIAL_FEATURE for f in g.features)


def edge_slots(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def labeled_graph_count(n: int) -> int:
    return 1 << (n * (n - 1) // 2)


def graph_from_mask(n: int, mask: int, slots: list[tuple[int, int]] | None = None) -> FeaturedGraph:
    slots = slots if slots is not None else edge_slots(n)
    edges = tuple(slots[i] for i in range(len(slots)) if mask >> i & 1)
    return FeaturedGraph(n, edges)


def enumerate_labeled_graphs(n: int, cap_n: int = DEFAULT_GRAPH_CAP_N) -> Iterator[FeaturedGraph]:
    """Every labeled simple graph on n vertices exactly once, mask order."""
    if n > cap_n:
        raise CapExceeded(
            f"labeled enumeration for n={n} exceeds cap n={cap_n}", labeled_graph_count(n)
        )
    slots = edge_slots(n)
    for mask in range(1 << len(slots)):
        yield graph_from_mask(n, mask, slots)


def compositions(n: int) -> Iterator[tuple[int, ...]]:
    """All (k_0..k_n) of nonnegative integers summing to n, lex ascending."""
    if n < 1:
        raise ValueError("compositions need n >= 1")

    def rec(prefix: tuple[int, ...], remaining: int, parts_left: int):
        if parts_left == 1:
            yield prefix + (remaining,)
            return
        for k in range(remaining + 1):
            yield from rec(prefix + (k,), remaining - k, parts_left - 1)

    yield from rec((), n, n + 1)


def composition_count(n: int) -> int:
    return math.comb(2 * n, n)


def star_graph(K: Sequence[int]) -> FeaturedGraph:
    """Two-level star for composition K: 2n+1 vertices, k_0-inclusive thresholds.

    Vertex 0 is the center; 1..n the middle level; n+1..2n the outer level,
    with u_i adjacent to w_j iff i > k_0 + ... + k_(j-1).
    """
    n = sum(K)
    if len(K) != n + 1 or any(k < 0 for k in K):
        raise ValueError(f"invalid composition {K!r}")
    edges = [(0, i) for i in range(1, n + 1)]
    threshold = 0
    for j in range(1, n + 1):
        threshold += K[j - 1]
        for i in range(threshold + 1, n + 1):
            edges.append((i, n + j))
    return make_graph(2 * n + 1, edges)


def star_family(n: int, cap_n: int = DEFAULT_STAR_CAP_N) -> Iterator[tuple[tuple[int, ...], FeaturedGraph]]:
    if n > cap_n:
        raise CapExceeded(
            f"star family for n={n} exceeds cap n={cap_n}", composition_count(n)
        )
    for K in compositions(n):
        yield K, star_graph(K)


def star_degree_check(K: Sequence[int], g: FeaturedGraph) -> bool:
    """Degree oracle: w-side degrees of u_1..u_n form {{ i repeated k_i }}."""
    n = sum(K)
    outer = set(range(n + 1, 2 * n + 1))
    adj = g.adjacency()
    observed = sorted(sum(1 for w in adj[i] if w in outer) for i in range(1, n + 1))
    expected = sorted(i for i, count in enumerate(K) for _ in range(count))
    return observed == expected


def diameter(g: FeaturedGraph, simple_path_cap: int = 10) -> dict:
    """Standard diameter (max shortest-path distance; inf when disconnected)
    plus the longest-simple-path length in edges for n <= cap (exponential DP,
    None above the cap)."""
    adj = g.adjacency()
    best = 0
    connected = True
    for src in range(g.n):
        dist = [-1] * g.n
        dist[src] = 0
        queue = [src]
        for v in queue:
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        if min(dist) < 0:
            connected = False
            break
        best = max(best, max(dist))
    shortest = best if connected else math.inf
    longest = _longest_simple_path(adj, g.n) if g.n <= simple_path_cap else None
    return {
        "shortest_path_diameter": shortest,
        "longest_simple_path": longest,
        "connected": connected,
    }


def _longest_simple_path(adj: list[list[int]], n: int) -> int:
    if n == 0:
        return 0
    # dp over (visited mask, endpoint): longest edge count of a simple path
    neighbor_mask = [0] * n
    for v in range(n):
        for w in adj[v]:
            neighbor_mask[v] |= 1 << w
    lengths = {(1 << v, v): 0 for v in range(n)}
    best = 0
    frontier = dict(lengths)
    while frontier:
        nxt: dict[tuple[int, int], int] = {}
        for (mask, v), length in frontier.items():
            candidates = neighbor_mask[v] & ~mask
            while candidates:
                bit = candidates & -candidates
                candidates ^= bit
                w = bit.bit_length() - 1
                key = (mask | bit, w)
                if nxt.get(key, -1) < length + 1:
                    nxt[key] = length + 1
                    best = max(best, length + 1)
        frontier = nxt
    return best


def random_graph(n: int, p, seed: int = 0) -> FeaturedGraph:
    """G(n, p) with seed-deterministic edges; p may be an exact rational."""
    p = as_rat(p) if not isinstance(p, float) else p
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    rng = random.Random(seed)
    edges = [slot for slot in edge_slots(n) if rng.random() < p]
    return FeaturedGraph(n, tuple(edges))


def graph_to_json(g: FeaturedGraph) -> dict:
    doc: dict = {"n": g.n, "edges": [[a + 1, b + 1] for a, b in g.edges]}
    if not has_trivial_features(g):
        doc["features"] = [format_vec(f) for f in g.features]
    return doc


def graph_from_json(doc: dict) -> FeaturedGraph:
    try:
        n = int(doc["n"])
        raw_edges = doc["edges"]
    except KeyError as exc:
        raise ValueError(f"graph document missing {exc}") from exc
    edges = []
    for pair in raw_edges:
        a, b = int(pair[0]), int(pair[1])
        if not (1 <= a <= n and 1 <= b <= n):
            raise ValueError(f"edge [{a},{b}] outside 1..{n}")
        edges.append((a - 1, b - 1))
    return make_graph(n, edges, doc.get("features"))


def parse_edgelist(text: str) -> FeaturedGraph:
    """Plain text alternative: first line n, then one '1-based i j' per line."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty edge-list document")
    n = int(lines[0])
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {line!r}")
        a, b = int(parts[0]) - 1, int(parts[1]) - 1
        edges.append((a, b))
    return make_graph(n, edges)


def format_edgelist(g: FeaturedGraph) -> str:
    lines = [str(g.n)]
    lines += [f"{a + 1} {b + 1}" for a, b in g.edges]
    return "\n".join(lines) + "\n"
