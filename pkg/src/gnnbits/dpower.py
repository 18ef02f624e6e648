"""Distinguishing-power experiments: equivalence-class counting and the
verification suites tying class counts to bit-length budgets.

The experiments here check, by exhaustive enumeration at desk scale:

- counting chains: the number of model-induced vertex classes is at most
  the number of distinct aggregation traces, which is at most 2^L(n);
  same shape at graph level with the readout aggregation output;
- functional implications: equal traces force equal final values, equal
  refinement tokens force equal final values (zero violations expected);
- the two-level star family: center tokens at refinement round 2 are
  pairwise distinct, the family meets its binomial lower bound, and the
  degree oracle holds for every composition;
- head-to-head tables: model class counts vs the star-family binomial
  bound vs the 2^L ceiling, plus a pigeonhole collision witness (two
  star centers with distinct round-2 tokens but equal model outputs).

All class equality is exact (rational vector equality, token string
equality); there are no tolerances.
"""

from __future__ import annotations

import math
import multiprocessing
from typing import Iterable, Sequence

from .gnn import Evaluator, GNNModel, _domain_graphs
from .graphs import (
    FeaturedGraph,
    composition_count,
    edge_slots,
    enumerate_labeled_graphs,
    graph_from_mask,
    labeled_graph_count,
    star_degree_check,
    star_family,
)
from .rationals import format_vec
from .refinement import ColorInterner, vertex_color


WITNESS_LIMIT = 16


def _domain_label(domain) -> str:
    return domain if isinstance(domain, str) else f"sample({domain[1]})"


def count_classes(
    graphs: Iterable[FeaturedGraph],
    *,
    model: GNNModel | None = None,
    cr_t: int | None = None,
    level: str = "vertex",
    exact: bool = True,
    domain_label: str = "",
) -> dict:
    """Count distinct values (model) or tokens (refinement) over a domain.

    Exactly one of model / cr_t selects the evaluator. Counts at both
    levels are reported when available; `level` names the headline one.
    Witness list (first representative per class) is capped.
    """
    if (model is None) == (cr_t is None):
        raise ValueError("pass exactly one of model=, cr_t=")
    if level not in ("vertex", "graph"):
        raise ValueError(f"unknown level {level!r}")
    vertex_keys: dict = {}
    graph_keys: dict = {}
    n_graphs = 0
    n_vertices = 0
    if model is not None:
        ev = Evaluator(model)
        for gi, g in enumerate(graphs):
            ge = ev.eval_graph(g)
            n_graphs += 1
            n_vertices += g.n
            for v, fv in enumerate(ge.final_vids):
                vertex_keys.setdefault(fv, (gi, v + 1))
            if ge.readout_value_vid is not None:
                graph_keys.setdefault(ge.readout_value_vid, (gi,))
        evaluator_label = "model"
        graph_supported = model.readout is not None
    else:
        interner = ColorInterner()
        for gi, g in enumerate(graphs):
            n_graphs += 1
            n_vertices += g.n
            ids = interner.color_ids(g, cr_t)
            for v, cid in enumerate(ids):
                vertex_keys.setdefault(cid, (gi, v + 1))
            graph_keys.setdefault(interner.graph_color_id(g, cr_t), (gi,))
        evaluator_label = f"cr(t={cr_t})"
        graph_supported = True
    if level == "graph" and not graph_supported:
        raise ValueError("graph-level counting needs a readout")
    witnesses_src = vertex_keys if level == "vertex" else graph_keys
    witnesses = [
        {"class_key": key, "first_seen": loc}
        for key, loc in list(witnesses_src.items())[:WITNESS_LIMIT]
    ]
    return {
        "domain": domain_label,
        "evaluator": evaluator_label,
        "level": level,
        "exact": exact,
        "graphs": n_graphs,
        "vertices": n_vertices,
        "vertex_classes": len(vertex_keys),
        "graph_classes": len(graph_keys) if graph_supported else None,
        "classes": len(vertex_keys) if level == "vertex" else len(graph_keys),
        "witnesses": witnesses,
    }


def verify_expobserve(
    model: GNNModel,
    n: int,
    domain="exhaustive",
    seed: int = 0,
    cap_n: int = 7,
) -> dict:
    """Check the counting chain classes <= distinct traces <= 2^L at size n.

    Also counts functional violations: a vertex trace seen with two
    different final values, or a full graph signature (vertex-trace
    multiset plus readout aggregation id) seen with two different graph
    outputs. Both counters must be zero; `bound_holds` is the conjunction
    of the vertex chain and, when the model has a readout, the graph
    chain graph_classes <= distinct readout aggregations <= 2^LG.
    """
    ev = Evaluator(model)
    traces: set = set()
    finals: set = set()
    trace_to_final: dict = {}
    violations = 0
    L = 0
    sig_to_out: dict = {}
    readout_aggs: set = set()
    readout_outs: set = set()
    graph_violations = 0
    LG = 0
    empty_seen = False
    n_graphs = 0
    for g in _domain_graphs(n, domain, seed, cap_n):
        ge = ev.eval_graph(g)
        n_graphs += 1
        empty_seen = empty_seen or any(ge.empty_flags)
        for v in range(g.n):
            tr = ge.vertex_traces[v]
            fv = ge.final_vids[v]
            traces.add(tr)
            finals.add(fv)
            prev = trace_to_final.setdefault(tr, fv)
            if prev != fv:
                violations += 1
            if ge.trace_bitlens[v] > L:
                L = ge.trace_bitlens[v]
        if ge.readout_agg_vid is not None and g.n:
            sig = ge.graph_signature()
            readout_aggs.add(ge.readout_agg_vid)
            readout_outs.add(ge.readout_value_vid)
            prev = sig_to_out.setdefault(sig, ge.readout_value_vid)
            if prev != ge.readout_value_vid:
                graph_violations += 1
            lg = max(ge.trace_bitlens) + ev.bitlen(ge.readout_agg_vid)
            if lg > LG:
                LG = lg
    vertex_chain = len(finals) <= len(traces) <= 2 ** L
    report = {
        "n": n,
        "domain": _domain_label(domain),
        "exact": domain == "exhaustive",
        "graphs": n_graphs,
        "vertex_classes": len(finals),
        "distinct_traces": len(traces),
        "L_N": L,
        "trace_implies_output_violations": violations,
        "empty_neighborhood_seen": empty_seen,
    }
    if model.readout is not None:
        graph_chain = len(readout_outs) <= len(readout_aggs) <= 2 ** LG
        report.update(
            {
                "graph_classes": len(readout_outs),
                "distinct_readout_aggs": len(readout_aggs),
                "LG_N": LG,
                "graph_bound_holds": graph_chain,
                "signature_implies_output_violations": graph_violations,
            }
        )
        report["bound_holds"] = vertex_chain and graph_chain
    else:
        report["bound_holds"] = vertex_chain
    return report


def verify_cr_bound(
    model: GNNModel,
    n: int,
    domain="exhaustive",
    seed: int = 0,
    cap_n: int = 7,
    t: int | None = None,
) -> dict:
    """Check that round-t refinement tokens determine model outputs.

    t defaults to the model depth. Vertex level: equal tokens force equal
    final values. Graph level (when the model has a readout): equal graph
    colors force equal readout outputs. Zero violations means the model's
    class count is bounded by the refinement class count, which the
    report states as classes_within_cr.
    """
    if t is None:
        t = model.depth
    ev = Evaluator(model)
    interner = ColorInterner()
    color_to_final: dict = {}
    vertex_violations = 0
    gcolor_to_out: dict = {}
    graph_violations = 0
    model_vertex: set = set()
    cr_vertex: set = set()
    model_graph: set = set()
    cr_graph: set = set()
    n_graphs = 0
    for g in _domain_graphs(n, domain, seed, cap_n):
        ge = ev.eval_graph(g)
        ids = interner.color_ids(g, t)
        n_graphs += 1
        for v in range(g.n):
            cid = ids[v]
            fv = ge.final_vids[v]
            model_vertex.add(fv)
            cr_vertex.add(cid)
            prev = color_to_final.setdefault(cid, fv)
            if prev != fv:
                vertex_violations += 1
        if ge.readout_value_vid is not None:
            gid = interner.graph_color_id(g, t)
            model_graph.add(ge.readout_value_vid)
            cr_graph.add(gid)
            prev = gcolor_to_out.setdefault(gid, ge.readout_value_vid)
            if prev != ge.readout_value_vid:
                graph_violations += 1
    report = {
        "n": n,
        "t": t,
        "domain": _domain_label(domain),
        "exact": domain == "exhaustive",
        "graphs": n_graphs,
        "vertex_violations": vertex_violations,
        "model_vertex_classes": len(model_vertex),
        "cr_vertex_classes": len(cr_vertex),
        "classes_within_cr": len(model_vertex) <= len(cr_vertex),
    }
    if model.readout is not None:
        report.update(
            {
                "graph_violations": graph_violations,
                "model_graph_classes": len(model_graph),
                "cr_graph_classes": len(cr_graph),
                "graph_classes_within_cr": len(model_graph) <= len(cr_graph),
            }
        )
    report["passed"] = vertex_violations == 0 and graph_violations == 0
    return report


def verify_star_lemma(n: int, t: int = 2, cap_n: int = 6) -> dict:
    """Two-level star family checks at refinement round t (default 2).

    Booleans reported: center tokens pairwise distinct across the family,
    graph colors pairwise distinct, degree oracle (w-side degrees of the
    middle vertices realize the composition) for every member. The
    distinct graph-color count is compared against the binomial bound
    C(2n-1, n-1) separately, because distinct compositions can yield
    isomorphic graphs: graph colors then coincide legitimately, the
    pairwise-distinctness boolean goes false, and the colliding pair is
    reported for inspection.
    """
    family = list(star_family(n, cap_n=cap_n))
    interner = ColorInterner()
    center_ids = []
    graph_ids = []
    degree_ok = True
    for key, g in family:
        center_ids.append(interner.color_ids(g, t)[0])
        graph_ids.append(interner.graph_color_id(g, t))
        if not star_degree_check(key, g):
            degree_ok = False
    first_graph_seen: dict = {}
    colliding_pair = None
    for (key, _), gid in zip(family, graph_ids):
        if gid in first_graph_seen and colliding_pair is None:
            colliding_pair = {
                "K1": list(first_graph_seen[gid]),
                "K2": list(key),
            }
        first_graph_seen.setdefault(gid, key)
    family_size = len(family)
    lemma_bound = math.comb(2 * n - 1, n - 1) if n >= 1 else 1
    graph_color_classes = len(set(graph_ids))
    report = {
        "n": n,
        "t": t,
        "family_size": family_size,
        "compositions_count": composition_count(n),
        "lemma_bound": lemma_bound,
        "family_ge_bound": family_size >= lemma_bound,
        "center_cr2_distinct": len(set(center_ids)) == family_size,
        "graph_cr2_distinct": graph_color_classes == family_size,
        "graph_color_classes": graph_color_classes,
        "graph_classes_ge_bound": graph_color_classes >= lemma_bound,
        "degree_oracle_pass": degree_ok,
        "colliding_pair": colliding_pair,
    }
    report["passed"] = (
        report["family_size"] == report["compositions_count"]
        and report["family_ge_bound"]
        and report["center_cr2_distinct"]
        and report["graph_cr2_distinct"]
        and report["degree_oracle_pass"]
    )
    return report


def star_collision_witness(model: GNNModel, m: int, cap_n: int = 6) -> dict | None:
    """Pigeonhole search over star-family centers for parameter m.

    Groups the centers by exact model output under the deterministic
    family order and reports the first output value shared by two
    members, together with their round-2 tokens (expected distinct). The
    search runs unconditionally; the caller decides what the result
    means. Returns None when all centers get distinct outputs.
    """
    ev = Evaluator(model)
    by_output: dict = {}
    for key, g in star_family(m, cap_n=cap_n):
        ge = ev.eval_graph(g)
        by_output.setdefault(ge.final_vids[0], []).append((key, g))
        group = by_output[ge.final_vids[0]]
        if len(group) == 2:
            (k1, g1), (k2, g2) = group
            tok1 = vertex_color(g1, 0, 2)
            tok2 = vertex_color(g2, 0, 2)
            return {
                "m": m,
                "K1": list(k1),
                "K2": list(k2),
                "center_token_1": tok1,
                "center_token_2": tok2,
                "tokens_distinct": tok1 != tok2,
                "shared_output": "(" + ",".join(format_vec(ev.vec(ge.final_vids[0]))) + ")",
            }
    return None


def _sweep_summary(model: GNNModel, graphs: Iterable[FeaturedGraph]) -> dict:
    """Schedule-independent sweep summary in canonical (vector) keys.

    Everything here merges commutatively: sets by union, maxima by max,
    implication maps by key with conflict detection. Used by the
    parallel path, where per-process interned ids cannot be compared.
    """
    ev = Evaluator(model)
    finals: set = set()
    traces: set = set()
    trace_map: dict = {}
    routs: set = set()
    raggs: set = set()
    sig_map: dict = {}
    L = 0
    LG = 0
    empty_seen = False
    n_graphs = 0
    for g in graphs:
        ge = ev.eval_graph(g)
        n_graphs += 1
        empty_seen = empty_seen or any(ge.empty_flags)
        canon_traces = []
        for v in range(g.n):
            tr = tuple(ev.vec(a) for a in ge.vertex_traces[v])
            fv = ev.vec(ge.final_vids[v])
            canon_traces.append(tr)
            finals.add(fv)
            traces.add(tr)
            trace_map.setdefault(tr, fv)
            if ge.trace_bitlens[v] > L:
                L = ge.trace_bitlens[v]
        if ge.readout_agg_vid is not None and g.n:
            ragg = ev.vec(ge.readout_agg_vid)
            rout = ev.vec(ge.readout_value_vid)
            raggs.add(ragg)
            routs.add(rout)
            sig_map.setdefault((tuple(sorted(canon_traces)), ragg), rout)
            lg = max(ge.trace_bitlens) + ev.bitlen(ge.readout_agg_vid)
            if lg > LG:
                LG = lg
    return {
        "graphs": n_graphs,
        "finals": finals,
        "traces": traces,
        "trace_map": trace_map,
        "routs": routs,
        "raggs": raggs,
        "sig_map": sig_map,
        "L": L,
        "LG": LG,
        "empty_seen": empty_seen,
    }


def _sweep_chunk(payload) -> dict:
    model, n, lo, hi = payload
    slots = edge_slots(n)
    return _sweep_summary(model, (graph_from_mask(n, m, slots) for m in range(lo, hi)))


def _merge_summaries(parts: Sequence[dict]) -> dict:
    merged = {
        "graphs": 0,
        "finals": set(),
        "traces": set(),
        "trace_map": {},
        "routs": set(),
        "raggs": set(),
        "sig_map": {},
        "L": 0,
        "LG": 0,
        "empty_seen": False,
        "trace_conflicts": 0,
        "sig_conflicts": 0,
    }
    for part in parts:
        merged["graphs"] += part["graphs"]
        merged["finals"] |= part["finals"]
        merged["traces"] |= part["traces"]
        merged["routs"] |= part["routs"]
        merged["raggs"] |= part["raggs"]
        merged["L"] = max(merged["L"], part["L"])
        merged["LG"] = max(merged["LG"], part["LG"])
        merged["empty_seen"] = merged["empty_seen"] or part["empty_seen"]
        for key, val in part["trace_map"].items():
            prev = merged["trace_map"].setdefault(key, val)
            if prev != val:
                merged["trace_conflicts"] += 1
        for key, val in part["sig_map"].items():
            prev = merged["sig_map"].setdefault(key, val)
            if prev != val:
                merged["sig_conflicts"] += 1
    return merged


def exhaustive_summary(model: GNNModel, n: int, jobs: int = 1, cap_n: int = 7) -> dict:
    """Sweep all labeled graphs of size n, optionally over worker processes.

    Workers take contiguous mask ranges of the deterministic enumeration
    and produce canonical summaries; the merge is commutative, so the
    result does not depend on the schedule or on the jobs count.
    """
    from .rationals import CapExceeded

    if n > cap_n:
        raise CapExceeded(
            f"exhaustive sweep needs n <= {cap_n}, got {n} "
            f"(computed size {labeled_graph_count(n)})",
            count=labeled_graph_count(n),
        )
    total = labeled_graph_count(n)
    if jobs <= 1 or total < 64:
        merged = _merge_summaries([_sweep_summary(model, enumerate_labeled_graphs(n, cap_n=cap_n))])
        return merged
    jobs = min(jobs, total)
    step = (total + jobs - 1) // jobs
    payloads = [(model, n, lo, min(lo + step, total)) for lo in range(0, total, step)]
    with multiprocessing.Pool(processes=jobs) as pool:
        parts = pool.map(_sweep_chunk, payloads)
    return _merge_summaries(parts)


def expobserve_report_from_summary(model: GNNModel, n: int, summary: dict, domain_label: str = "exhaustive") -> dict:
    """Shape a merged sweep summary like verify_expobserve's report."""
    vertex_chain = (
        len(summary["finals"]) <= len(summary["traces"]) <= 2 ** summary["L"]
    )
    report = {
        "n": n,
        "domain": domain_label,
        "exact": domain_label == "exhaustive",
        "graphs": summary["graphs"],
        "vertex_classes": len(summary["finals"]),
        "distinct_traces": len(summary["traces"]),
        "L_N": summary["L"],
        "trace_implies_output_violations": summary.get("trace_conflicts", 0),
        "empty_neighborhood_seen": summary["empty_seen"],
    }
    if model.readout is not None:
        graph_chain = (
            len(summary["routs"]) <= len(summary["raggs"]) <= 2 ** summary["LG"]
        )
        report.update(
            {
                "graph_classes": len(summary["routs"]),
                "distinct_readout_aggs": len(summary["raggs"]),
                "LG_N": summary["LG"],
                "graph_bound_holds": graph_chain,
                "signature_implies_output_violations": summary.get("sig_conflicts", 0),
            }
        )
        report["bound_holds"] = vertex_chain and graph_chain
    else:
        report["bound_holds"] = vertex_chain
    return report


def compare_report(
    model: GNNModel,
    n_list: Sequence[int],
    seed: int = 0,
    cap_n: int = 7,
    exact_up_to: int = 6,
    sample_count: int = 512,
    jobs: int = 1,
) -> dict:
    """Head-to-head table: model classes vs the star bound vs 2^L per n.

    Rows carry (n, vertex classes, star binomial bound for odd n = 2m+1,
    2^L(n), ratio = classes / bound). Counting is exact up to
    `exact_up_to`, seeded-sampled above it (marked). For each odd n the
    report also runs the pigeonhole collision witness over the star
    family of parameter m and separately says whether the sufficient
    condition L(2m+1) < ceil(log2 C(2m-1, m-1)) fired; the witness search
    does not wait for the condition. Ratio rows are report-only trend
    data: finite tables cannot verify a limit.
    """
    rows = []
    witnesses = []
    for n in n_list:
        exact = n <= exact_up_to
        if exact:
            summary = exhaustive_summary(model, n, jobs=jobs, cap_n=cap_n)
            n_classes = len(summary["finals"])
            g_classes = len(summary["routs"])
            L = summary["L"]
            LG = summary["LG"]
        else:
            domain = ("sample", sample_count)
            ev = Evaluator(model)
            finals: set = set()
            routs: set = set()
            L = 0
            LG = 0
            for g in _domain_graphs(n, domain, seed, cap_n):
                ge = ev.eval_graph(g)
                for v in range(g.n):
                    finals.add(ge.final_vids[v])
                    if ge.trace_bitlens[v] > L:
                        L = ge.trace_bitlens[v]
                if ge.readout_agg_vid is not None and g.n:
                    routs.add(ge.readout_value_vid)
                    lg = max(ge.trace_bitlens) + ev.bitlen(ge.readout_agg_vid)
                    if lg > LG:
                        LG = lg
            n_classes = len(finals)
            g_classes = len(routs)
        m = (n - 1) // 2 if n % 2 == 1 else None
        star_bound = math.comb(2 * m - 1, m - 1) if m is not None and m >= 1 else None
        row = {
            "n": n,
            "vertex_classes": n_classes,
            "exact": exact,
            "star_bound": star_bound,
            "L_N": L,
            "two_pow_LN": 2 ** L,
            "ratio": (n_classes / star_bound) if star_bound else None,
        }
        if model.readout is not None:
            row["graph_classes"] = g_classes
            row["LG_N"] = LG
            row["two_pow_LGN"] = 2 ** LG
        rows.append(row)
        if m is not None and 1 <= m <= 6:
            condition = bool(star_bound) and L < math.ceil(math.log2(star_bound))
            witness = star_collision_witness(model, m)
            witnesses.append(
                {
                    "n": n,
                    "m": m,
                    "L_N": L,
                    "log2_bound": math.ceil(math.log2(star_bound)) if star_bound else 0,
                    "condition_fired": condition,
                    "witness": witness,
                }
            )
    return {"rows": rows, "witnesses": witnesses, "seed": seed}
