"""Message-passing GNN evaluation over exact rationals, with aggregation
tracing and the information-complexity measure.

A model is a sequence of layers (message MLP over the concatenated pair of
endpoint values, a multiset aggregator, a combine MLP over the vertex value
and the aggregation output) plus an optional readout (aggregator over all
final vertex values, then an MLP). Evaluation is exact and layer-by-layer;
every aggregation output is recorded, because those outputs are the
information bottleneck the complexity measure counts:

    trace(v)   = the per-layer aggregation output vectors at v
    L(n)       = max over graphs of size n and vertices v of the total
                 bit-length of trace(v)
    LG(n)      = L-style max plus the readout aggregation output's
                 bit-length (graph-level variant)

``Evaluator`` memoizes message/aggregate/combine applications keyed by
interned exact values. With constant input features, distinct intermediate
values collapse to roughly local-isomorphism classes, which makes
exhaustive sweeps over all labeled graphs at n <= 6 cheap. Results are
identical to the unmemoized path (pure functions; tested).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .aggregation import AGG_KINDS, aggregate
from .graphs import FeaturedGraph, graph_to_json
from .mlp import MLPSpec, linear_mlp, mlp_forward, mlp_from_json, mlp_to_json, random_mlp, zero_mlp
from .rationals import DimensionMismatch, RVec, bitlen_vec


@dataclass(frozen=True)
class GNNLayer:
    msg: MLPSpec
    agg: str
    combine: MLPSpec

    def __post_init__(self) -> None:
        if self.agg not in AGG_KINDS:
            raise ValueError(f"unknown aggregator {self.agg!r}")
        if self.msg.in_dim % 2 != 0:
            raise DimensionMismatch(
                f"message MLP input dim {self.msg.in_dim} must be 2 * vertex dim"
            )
        r_prev = self.msg.in_dim // 2
        # built-in aggregators preserve dimension, so q = msg.out_dim
        if self.combine.in_dim != r_prev + self.msg.out_dim:
            raise DimensionMismatch(
                f"combine MLP input dim {self.combine.in_dim} != "
                f"{r_prev} + {self.msg.out_dim}"
            )

    @property
    def in_dim(self) -> int:
        return self.msg.in_dim // 2

    @property
    def out_dim(self) -> int:
        return self.combine.out_dim


@dataclass(frozen=True)
class Readout:
    agg: str
    mlp: MLPSpec

    def __post_init__(self) -> None:
        if self.agg not in AGG_KINDS:
            raise ValueError(f"unknown aggregator {self.agg!r}")


@dataclass(frozen=True)
class GNNModel:
    layers: tuple[GNNLayer, ...]
    readout: Readout | None = None

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("a model needs at least one layer")
        for prev, cur in zip(self.layers, self.layers[1:]):
            if cur.in_dim != prev.out_dim:
                raise DimensionMismatch(
                    f"layer input dim {cur.in_dim} != previous output dim {prev.out_dim}"
                )
        if self.readout is not None and self.readout.mlp.in_dim != self.layers[-1].out_dim:
            raise DimensionMismatch(
                f"readout MLP input dim {self.readout.mlp.in_dim} != "
                f"final vertex dim {self.layers[-1].out_dim}"
            )

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim


@dataclass(frozen=True)
class EvalTrace:
    """Aggregation outputs per vertex per layer, plus the readout's."""

    agg_outputs: tuple[tuple[RVec, ...], ...]
    empty_neighborhood: tuple[bool, ...]
    readout_agg: RVec | None


@dataclass(frozen=True)
class EvalResult:
    values: tuple[RVec, ...]
    trace: EvalTrace
    readout_value: RVec | None


def trace_bitlen(trace: EvalTrace, v: int) -> int:
    """Total bit-length of the aggregation-output sequence at vertex v."""
    return sum(bitlen_vec(a) for a in trace.agg_outputs[v])


def graph_trace_bitlen(trace: EvalTrace) -> int:
    """Graph-level variant: worst vertex total plus readout aggregation bits."""
    if trace.readout_agg is None:
        raise ValueError("graph-level trace bit-length needs a readout")
    per_vertex = max(
        (trace_bitlen(trace, v) for v in range(len(trace.agg_outputs))), default=0
    )
    return per_vertex + bitlen_vec(trace.readout_agg)


class GraphEval:
    """Interned per-graph evaluation produced by Evaluator (ids, not vectors)."""

    __slots__ = (
        "final_vids",
        "vertex_traces",
        "trace_bitlens",
        "empty_flags",
        "readout_agg_vid",
        "readout_value_vid",
    )

    def __init__(self, final_vids, vertex_traces, trace_bitlens, empty_flags,
                 readout_agg_vid, readout_value_vid):
        self.final_vids = final_vids
        self.vertex_traces = vertex_traces
        self.trace_bitlens = trace_bitlens
        self.empty_flags = empty_flags
        self.readout_agg_vid = readout_agg_vid
        self.readout_value_vid = readout_value_vid

    def graph_signature(self) -> tuple:
        """Key such that equal keys force equal graph-level outputs."""
        return (tuple(sorted(self.vertex_traces)), self.readout_agg_vid)


class Evaluator:
    """Memoizing evaluator for one model, reusable across many graphs."""

    def __init__(self, model: GNNModel):
        self.model = model
        self._vecs: list[RVec] = []
        self._vec_ids: dict[RVec, int] = {}
        self._bitlens: list[int] = []
        self._msg_cache: list[dict[tuple[int, int], int]] = [{} for _ in model.layers]
        self._agg_cache: list[dict[tuple[int, ...], int]] = [{} for _ in model.layers]
        self._comb_cache: list[dict[tuple[int, int], int]] = [{} for _ in model.layers]
        self._readout_agg_cache: dict[tuple[int, ...], int] = {}
        self._readout_mlp_cache: dict[int, int] = {}

    def vid(self, vec: RVec) -> int:
        found = self._vec_ids.get(vec)
        if found is None:
            found = len(self._vecs)
            self._vec_ids[vec] = found
            self._vecs.append(vec)
            self._bitlens.append(bitlen_vec(vec))
        return found

    def vec(self, vid: int) -> RVec:
        return self._vecs[vid]

    def bitlen(self, vid: int) -> int:
        return self._bitlens[vid]

    def eval_graph(self, g: FeaturedGraph) -> GraphEval:
        model = self.model
        if g.n and g.feature_dim != model.in_dim:
            raise DimensionMismatch(
                f"feature dim {g.feature_dim} != model input dim {model.in_dim}"
            )
        adj = g.adjacency()
        values = [self.vid(g.features[v]) for v in range(g.n)]
        traces: list[list[int]] = [[] for _ in range(g.n)]
        trace_bits = [0] * g.n
        empty = [False] * g.n
        for li, layer in enumerate(model.layers):
            msg_cache = self._msg_cache[li]
            agg_cache = self._agg_cache[li]
            comb_cache = self._comb_cache[li]
            next_values = [0] * g.n
            for v in range(g.n):
                vv = values[v]
                msg_ids = []
                for w in adj[v]:
                    key = (vv, values[w])
                    mid = msg_cache.get(key)
                    if mid is None:
                        mid = self.vid(
                            mlp_forward(layer.msg, self.vec(vv) + self.vec(values[w]))
                        )
                        msg_cache[key] = mid
                    msg_ids.append(mid)
                if not msg_ids:
                    empty[v] = True
                akey = tuple(sorted(msg_ids))
                aid = agg_cache.get(akey)
                if aid is None:
                    aid = self.vid(
                        aggregate(layer.agg, [self.vec(m) for m in akey], dim=layer.msg.out_dim)
                    )
                    agg_cache[akey] = aid
                traces[v].append(aid)
                trace_bits[v] += self.bitlen(aid)
                ckey = (vv, aid)
                cid = comb_cache.get(ckey)
                if cid is None:
                    cid = self.vid(
                        mlp_forward(layer.combine, self.vec(vv) + self.vec(aid))
                    )
                    comb_cache[ckey] = cid
                next_values[v] = cid
            values = next_values
        readout_agg_vid = None
        readout_value_vid = None
        if model.readout is not None:
            rkey = tuple(sorted(values))
            raid = self._readout_agg_cache.get(rkey)
            if raid is None:
                raid = self.vid(
                    aggregate(
                        model.readout.agg,
                        [self.vec(m) for m in rkey],
                        dim=model.layers[-1].out_dim,
                    )
                )
                self._readout_agg_cache[rkey] = raid
            readout_agg_vid = raid
            rvid = self._readout_mlp_cache.get(raid)
            if rvid is None:
                rvid = self.vid(mlp_forward(model.readout.mlp, self.vec(raid)))
                self._readout_mlp_cache[raid] = rvid
            readout_value_vid = rvid
        return GraphEval(
            values,
            [tuple(t) for t in traces],
            trace_bits,
            empty,
            readout_agg_vid,
            readout_value_vid,
        )


def gnn_eval(model: GNNModel, g: FeaturedGraph) -> EvalResult:
    """Evaluate one graph, returning exact vectors and the full trace."""
    ev = Evaluator(model)
    ge = ev.eval_graph(g)
    agg_outputs = tuple(tuple(ev.vec(a) for a in ge.vertex_traces[v]) for v in range(g.n))
    trace = EvalTrace(
        agg_outputs,
        tuple(ge.empty_flags),
        ev.vec(ge.readout_agg_vid) if ge.readout_agg_vid is not None else None,
    )
    return EvalResult(
        tuple(ev.vec(v) for v in ge.final_vids),
        trace,
        ev.vec(ge.readout_value_vid) if ge.readout_value_vid is not None else None,
    )


def _domain_graphs(n: int, domain, seed: int, cap_n: int):
    from .graphs import enumerate_labeled_graphs, random_graph, star_family

    if domain == "exhaustive":
        for g in enumerate_labeled_graphs(n, cap_n=cap_n):
            yield g
    elif domain == "star":
        if n % 2 != 1:
            raise ValueError("star domain needs odd graph size 2m+1")
        for _, g in star_family((n - 1) // 2):
            yield g
    elif isinstance(domain, tuple) and domain[0] == "sample":
        count = domain[1]
        rng = random.Random(seed)
        for i in range(count):
            yield random_graph(n, rng.random(), seed=rng.randrange(1 << 30))
    else:
        raise ValueError(f"unknown domain {domain!r}")


def measure_LN(
    model: GNNModel,
    n: int,
    domain="exhaustive",
    seed: int = 0,
    cap_n: int = 7,
) -> dict:
    """Max total aggregation bit-length over (graph, vertex) in the domain.

    Exact on exhaustive domains, a lower-bound estimate otherwise (the
    report says which). The graph-level value is included when the model
    has a readout. Single-vertex graphs force empty neighborhoods; the
    flag records whether any were seen.
    """
    ev = Evaluator(model)
    best = 0
    best_graph = None
    best_vertex = None
    lg_best = 0
    lg_graph = None
    empty_seen = False
    for g in _domain_graphs(n, domain, seed, cap_n):
        ge = ev.eval_graph(g)
        empty_seen = empty_seen or any(ge.empty_flags)
        for v in range(g.n):
            if ge.trace_bitlens[v] > best:
                best = ge.trace_bitlens[v]
                best_graph = g
                best_vertex = v
        if ge.readout_agg_vid is not None and g.n:
            lg = max(ge.trace_bitlens) + ev.bitlen(ge.readout_agg_vid)
            if lg > lg_best:
                lg_best = lg
                lg_graph = g
    report = {
        "n": n,
        "domain": domain if isinstance(domain, str) else f"sample({domain[1]})",
        "exact": domain == "exhaustive",
        "L_N": best,
        "argmax_graph": graph_to_json(best_graph) if best_graph is not None else None,
        "argmax_vertex": best_vertex + 1 if best_vertex is not None else None,
        "empty_neighborhood_seen": empty_seen,
    }
    if model.readout is not None:
        report["LG_N"] = lg_best
        report["LG_argmax_graph"] = graph_to_json(lg_graph) if lg_graph is not None else None
    return report


def trace_csv_rows(graph_id: str, g: FeaturedGraph, result: EvalResult) -> list[dict]:
    """Rows for the trace export: graph_id,vertex,layer,agg_output,bitlen."""
    from .rationals import format_vec

    rows = []
    for v in range(g.n):
        for layer_idx, out in enumerate(result.trace.agg_outputs[v]):
            rows.append(
                {
                    "graph_id": graph_id,
                    "vertex": v + 1,
                    "layer": layer_idx + 1,
                    "agg_output": "[" + ",".join(format_vec(out)) + "]",
                    "bitlen": bitlen_vec(out),
                }
            )
    return rows


def projection_sum_model(readout: bool = False) -> GNNModel:
    """One layer: message (x, y) -> y, sum aggregation, combine (x, a) -> x + a.

    On the trivial-feature domain this computes degree + 1 at every vertex.
    """
    msg = linear_mlp([[0, 1]], [0])
    combine = linear_mlp([[1, 1]], [0])
    layer = GNNLayer(msg, "sum", combine)
    ro = Readout("sum", linear_mlp([[1]], [0])) if readout else None
    return GNNModel((layer,), ro)


def constant_model(readout: bool = True) -> GNNModel:
    """All-zero MLPs: every vertex and graph maps to zero (one output class)."""
    layer = GNNLayer(zero_mlp(2, 1), "sum", zero_mlp(2, 1))
    ro = Readout("sum", zero_mlp(1, 1)) if readout else None
    return GNNModel((layer,), ro)


def random_model(seed: int, always_readout: bool = True) -> GNNModel:
    """Seed-deterministic small model: depth <= 3, dims <= 4, 8-bit weights."""
    rng = random.Random(seed)
    depth = rng.randint(1, 3)
    layers = []
    r_prev = 1
    for _ in range(depth):
        p = rng.randint(1, 4)
        r_next = rng.randint(1, 4)
        msg = random_mlp(rng, 2 * r_prev, p, depth=rng.randint(1, 2))
        combine = random_mlp(rng, r_prev + p, r_next, depth=rng.randint(1, 2))
        layers.append(GNNLayer(msg, rng.choice(AGG_KINDS), combine))
        r_prev = r_next
    readout = None
    if always_readout or rng.random() < 0.5:
        readout = Readout(rng.choice(AGG_KINDS), random_mlp(rng, r_prev, rng.randint(1, 4), depth=1))
    return GNNModel(tuple(layers), readout)


def model_to_json(model: GNNModel) -> dict:
    doc: dict = {
        "layers": [
            {"msg": mlp_to_json(l.msg), "agg": l.agg, "combine": mlp_to_json(l.combine)}
            for l in model.layers
        ]
    }
    if model.readout is not None:
        doc["readout"] = {
            "agg": model.readout.agg,
            "mlp": mlp_to_json(model.readout.mlp),
        }
    return doc


def model_from_json(doc: dict) -> GNNModel:
    try:
        raw_layers = doc["layers"]
    except KeyError as exc:
        raise ValueError("model document missing 'layers'") from exc
    layers = tuple(
        GNNLayer(mlp_from_json(l["msg"]), l["agg"], mlp_from_json(l["combine"]))
        for l in raw_layers
    )
    readout = None
    if "readout" in doc:
        readout = Readout(doc["readout"]["agg"], mlp_from_json(doc["readout"]["mlp"]))
    return GNNModel(layers, readout)
