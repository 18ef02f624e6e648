"""Batch experiment runner.

Subcommands:
    profile-agg   aggregation output bit-length profiles + growth classifier
    probe-mlp     observed MLP output bit-length vs the analytic ceiling
    verify        star-lemma | expobserve | cr-bound suites (exit 1 on failure)
    eval          evaluate a model file on graph files, export traces
    cr            run color refinement on a graph file, export tokens
    compare       model classes vs star binomial bound vs 2^L tables
    gen           write graph families (stars, labeled, random) to files

Every run writes its artifacts (JSON report, CSVs, plot-data, PNG figures
for report commands) under --out and finishes with a manifest listing
each artifact with a sha256 digest. Same config and seeds give
byte-identical digests. Exit status: 0 ok, 1 hard verification failure,
2 usage or cap refusal.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys

from .aggregation import (
    AGG_KINDS,
    VALUE_DOMAINS,
    classify_agg,
    log_schedule,
    measure_agg_complexity,
)
from .dpower import (
    compare_report,
    exhaustive_summary,
    expobserve_report_from_summary,
    verify_cr_bound,
    verify_expobserve,
    verify_star_lemma,
)
from .gnn import (
    gnn_eval,
    model_from_json,
    constant_model,
    random_model,
    trace_bitlen,
    trace_csv_rows,
)
from .graphs import (
    enumerate_labeled_graphs,
    graph_from_json,
    graph_to_json,
    format_edgelist,
    parse_edgelist,
    random_graph,
    star_family,
)
from .mlp import mlp_from_json, probe_mlp_complexity, random_mlp
from .rationals import CapExceeded, bitlen_rat, format_vec, Rat
from .refinement import cr_csv_rows, cr_run, graph_color, token_hash
from .reporting import (
    AGG_PROFILE_FIELDS,
    CR_EXPORT_FIELDS,
    TRACE_EXPORT_FIELDS,
    render_series_figure,
    write_csv,
    write_json_report,
    write_manifest,
    write_plot_data,
)


def parse_int_list(text: str) -> list[int]:
    """Accept '5', '1..4', or '3,5,7' (commas may mix with ranges)."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            values.extend(range(lo, hi + 1))
        elif part:
            values.append(int(part))
    if not values:
        raise ValueError(f"no integers in {text!r}")
    return values


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_graph(path: str):
    if path.endswith(".json"):
        return graph_from_json(_load_json(path))
    with open(path) as fh:
        return parse_edgelist(fh.read())


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func", "out"}
    return {
        key: val
        for key, val in sorted(vars(args).items())
        if key not in skip and not key.startswith("_")
    }


def _finish(args, artifacts: list[str], status: int) -> int:
    write_manifest(args.out, artifacts, extra={"config": _config_echo(args)})
    return status


def _resolve_model(args) -> tuple:
    """Model selection shared by verify/compare/eval-style commands."""
    if getattr(args, "model", None):
        return [("file:" + os.path.basename(args.model), model_from_json(_load_json(args.model)))]
    if getattr(args, "constant", False):
        return [("constant", constant_model())]
    count = getattr(args, "seeds", 1)
    return [(f"seed{i}", random_model(i)) for i in range(1, count + 1)]


def cmd_profile_agg(args) -> int:
    kinds = [k.strip() for k in args.kinds.split(",")]
    domains = [d.strip() for d in args.domains.split(",")]
    for k in kinds:
        if k not in AGG_KINDS:
            raise ValueError(f"unknown aggregator kind {k!r}")
    for d in domains:
        if d not in VALUE_DOMAINS:
            raise ValueError(f"unknown value domain {d!r}")
    exponents = parse_int_list(args.exponents)
    schedule = log_schedule(exponents, extra_bits=args.extra_bits)
    artifacts = []
    report: dict = {"schedule": schedule, "classification": {}, "bounds": {}}
    series: dict = {}
    all_ok = True
    for kind in kinds:
        rows = []
        for domain in domains:
            sampler = args.sampler if domain == "rational" else "uniform"
            for n, k in schedule:
                row = measure_agg_complexity(
                    kind,
                    n,
                    k,
                    mode=args.mode,
                    value_domain=domain,
                    seed=args.seed,
                    samples=args.samples,
                    sampler=sampler,
                )
                rows.append(row)
            series[f"{kind}/{domain}"] = [
                (r["n"], r["s"]) for r in rows if r["domain"] == domain
            ]
            cls = classify_agg(
                kind,
                schedule,
                mode=args.mode,
                value_domain=domain,
                seed=args.seed,
                samples=args.samples,
                sampler=sampler,
            )
            report["classification"][f"{kind}/{domain}"] = cls
        if "integer" in domains:
            checks = []
            for r in rows:
                if r["domain"] != "integer":
                    continue
                n, k, s = r["n"], r["k"], r["s"]
                sum_bound = math.ceil(math.log2(n)) + k + 2
                if kind == "sum":
                    bound = sum_bound
                elif kind == "max":
                    bound = k
                else:
                    bound = sum_bound + bitlen_rat(Rat(n))
                ok = s <= bound
                all_ok = all_ok and ok
                checks.append({"n": n, "k": k, "s": s, "bound": bound, "holds": ok})
            report["bounds"][kind] = checks
        path = os.path.join(args.out, f"agg_profile_{kind}.csv")
        artifacts.append(write_csv(path, AGG_PROFILE_FIELDS, rows))
    report["all_integer_bounds_hold"] = all_ok
    artifacts.append(
        write_json_report(os.path.join(args.out, "agg_profile_report.json"), report)
    )
    artifacts.append(
        write_plot_data(os.path.join(args.out, "agg_profile_plotdata.csv"), series)
    )
    fig = os.path.join(args.out, "agg_profile.png")
    render_series_figure(
        fig, series, "aggregation output bit-length", "n (multiset size)", "s(n) bits"
    )
    artifacts.append(fig)
    return _finish(args, artifacts, 0 if all_ok else 1)


def cmd_probe_mlp(args) -> int:
    if args.model:
        mlp = mlp_from_json(_load_json(args.model))
        label = os.path.basename(args.model)
    else:
        rng = random.Random(args.mlp_seed)
        mlp = random_mlp(rng, args.in_dim, args.out_dim, args.depth, max_bits=args.max_bits)
        label = f"sampled(seed={args.mlp_seed})"
    budgets = parse_int_list(args.budgets)
    probe = probe_mlp_complexity(mlp, budgets, samples_per_budget=args.samples, seed=args.seed)
    report = dict(probe)
    report["mlp"] = label
    artifacts = [
        write_json_report(os.path.join(args.out, "mlp_probe_report.json"), report),
        write_csv(
            os.path.join(args.out, "mlp_probe.csv"),
            ("budget", "observed_max", "bound"),
            [
                {"budget": b, "observed_max": obs, "bound": bound}
                for (b, obs), (_, bound) in zip(probe["rows"], probe["bound_curve"])
            ],
        ),
    ]
    series = {
        "observed": probe["rows"],
        "guaranteed_ceiling": probe["bound_curve"],
    }
    artifacts.append(
        write_plot_data(os.path.join(args.out, "mlp_probe_plotdata.csv"), series)
    )
    fig = os.path.join(args.out, "mlp_probe.png")
    render_series_figure(
        fig, series, "MLP output bit-length vs input budget", "input budget (bits)",
        "output bits", logy=True,
    )
    artifacts.append(fig)
    return _finish(args, artifacts, 0 if probe["within_bound"] else 1)


def _verify_star_lemma(args) -> int:
    ns = parse_int_list(args.n)
    reports = []
    ok = True
    for n in ns:
        rep = verify_star_lemma(n, t=args.t, cap_n=min(args.cap_n, 6) if args.cap_n else 6)
        reports.append(rep)
        ok = ok and rep["passed"]
    rows = [
        {
            key: rep[key]
            for key in (
                "n", "family_size", "lemma_bound", "center_cr2_distinct",
                "graph_cr2_distinct", "graph_color_classes", "degree_oracle_pass",
            )
        }
        for rep in reports
    ]
    artifacts = [
        write_json_report(
            os.path.join(args.out, "star_lemma_report.json"),
            {"reports": reports, "all_passed": ok},
        ),
        write_csv(os.path.join(args.out, "star_lemma.csv"), list(rows[0]), rows),
    ]
    series = {
        "family_size": [(r["n"], r["family_size"]) for r in rows],
        "lemma_bound": [(r["n"], r["lemma_bound"]) for r in rows],
        "graph_color_classes": [(r["n"], r["graph_color_classes"]) for r in rows],
    }
    artifacts.append(
        write_plot_data(os.path.join(args.out, "star_lemma_plotdata.csv"), series)
    )
    fig = os.path.join(args.out, "star_lemma.png")
    render_series_figure(
        fig, series, "star family vs binomial bound", "n (composition weight)",
        "count", logy=True,
    )
    artifacts.append(fig)
    return _finish(args, artifacts, 0 if ok else 1)


def _verify_expobserve(args) -> int:
    ns = parse_int_list(args.n)
    models = _resolve_model(args)
    rows = []
    ok = True
    for label, model in models:
        for n in ns:
            if args.jobs > 1:
                summary = exhaustive_summary(model, n, jobs=args.jobs, cap_n=args.cap_n)
                rep = expobserve_report_from_summary(model, n, summary)
            else:
                rep = verify_expobserve(model, n, cap_n=args.cap_n)
            rep["model"] = label
            rows.append(rep)
            violations = rep["trace_implies_output_violations"] + rep.get(
                "signature_implies_output_violations", 0
            )
            ok = ok and rep["bound_holds"] and violations == 0
    fields = [
        "model", "n", "graphs", "vertex_classes", "distinct_traces", "L_N",
        "bound_holds", "trace_implies_output_violations", "graph_classes",
        "distinct_readout_aggs", "LG_N", "graph_bound_holds",
        "signature_implies_output_violations",
    ]
    artifacts = [
        write_json_report(
            os.path.join(args.out, "expobserve_report.json"),
            {"rows": rows, "all_passed": ok},
        ),
        write_csv(os.path.join(args.out, "expobserve.csv"), fields, rows),
    ]
    series = {
        "max_vertex_classes": [
            (n, max(r["vertex_classes"] for r in rows if r["n"] == n)) for n in ns
        ],
        "max_distinct_traces": [
            (n, max(r["distinct_traces"] for r in rows if r["n"] == n)) for n in ns
        ],
        "max_2^L": [
            (n, 2 ** max(r["L_N"] for r in rows if r["n"] == n)) for n in ns
        ],
    }
    artifacts.append(
        write_plot_data(os.path.join(args.out, "expobserve_plotdata.csv"), series)
    )
    fig = os.path.join(args.out, "expobserve.png")
    render_series_figure(
        fig, series, "classes vs traces vs 2^L", "graph size n", "count", logy=True
    )
    artifacts.append(fig)
    return _finish(args, artifacts, 0 if ok else 1)


def _verify_cr_bound(args) -> int:
    ns = parse_int_list(args.n)
    models = _resolve_model(args)
    rows = []
    ok = True
    for label, model in models:
        for n in ns:
            rep = verify_cr_bound(model, n, cap_n=args.cap_n)
            rep["model"] = label
            rows.append(rep)
            ok = ok and rep["passed"]
    fields = [
        "model", "n", "t", "graphs", "vertex_violations", "model_vertex_classes",
        "cr_vertex_classes", "classes_within_cr", "graph_violations",
        "model_graph_classes", "cr_graph_classes", "graph_classes_within_cr",
    ]
    artifacts = [
        write_json_report(
            os.path.join(args.out, "cr_bound_report.json"),
            {"rows": rows, "all_passed": ok},
        ),
        write_csv(os.path.join(args.out, "cr_bound.csv"), fields, rows),
    ]
    series = {
        "max_model_classes": [
            (n, max(r["model_vertex_classes"] for r in rows if r["n"] == n)) for n in ns
        ],
        "max_cr_classes": [
            (n, max(r["cr_vertex_classes"] for r in rows if r["n"] == n)) for n in ns
        ],
    }
    artifacts.append(
        write_plot_data(os.path.join(args.out, "cr_bound_plotdata.csv"), series)
    )
    fig = os.path.join(args.out, "cr_bound.png")
    render_series_figure(
        fig, series, "model classes vs refinement classes", "graph size n", "classes"
    )
    artifacts.append(fig)
    return _finish(args, artifacts, 0 if ok else 1)


def cmd_verify(args) -> int:
    if args.what == "star-lemma":
        return _verify_star_lemma(args)
    if args.what == "expobserve":
        return _verify_expobserve(args)
    return _verify_cr_bound(args)


def cmd_eval(args) -> int:
    model = model_from_json(_load_json(args.model))
    trace_rows = []
    per_graph = {}
    for path in args.graphs:
        g = _load_graph(path)
        gid = os.path.splitext(os.path.basename(path))[0]
        result = gnn_eval(model, g)
        trace_rows.extend(trace_csv_rows(gid, g, result))
        per_graph[gid] = {
            "values": ["(" + ",".join(format_vec(v)) + ")" for v in result.values],
            "readout": (
                "(" + ",".join(format_vec(result.readout_value)) + ")"
                if result.readout_value is not None
                else None
            ),
            "trace_bitlens": [trace_bitlen(result.trace, v) for v in range(g.n)],
            "empty_neighborhood": list(result.trace.empty_neighborhood),
        }
    artifacts = [
        write_csv(os.path.join(args.out, "trace.csv"), TRACE_EXPORT_FIELDS, trace_rows),
        write_json_report(
            os.path.join(args.out, "eval_report.json"),
            {"model": os.path.basename(args.model), "graphs": per_graph},
        ),
    ]
    return _finish(args, artifacts, 0)


def cmd_cr(args) -> int:
    g = _load_graph(args.graph)
    gid = os.path.splitext(os.path.basename(args.graph))[0]
    hist = cr_run(g, t_max=args.t)
    rows = cr_csv_rows(gid, g, t_max=args.t)
    t_report = args.t if args.t is not None else hist.computed_t
    report = {
        "graph": gid,
        "n": g.n,
        "stable_t": hist.stable_t,
        "classes_by_t": {t: hist.classes_at(t) for t in range(hist.computed_t + 1)},
        "graph_color_hash": token_hash(graph_color(g, t_report)),
    }
    artifacts = [
        write_csv(os.path.join(args.out, "cr_tokens.csv"), CR_EXPORT_FIELDS, rows),
        write_json_report(os.path.join(args.out, "cr_report.json"), report),
    ]
    return _finish(args, artifacts, 0)


def cmd_compare(args) -> int:
    (label, model), = _resolve_model(args)
    ns = parse_int_list(args.n)
    report = compare_report(
        model,
        ns,
        seed=args.seed,
        cap_n=args.cap_n,
        exact_up_to=args.exact_up_to,
        sample_count=args.samples,
        jobs=args.jobs,
    )
    report["model"] = label
    fields = [
        "n", "vertex_classes", "exact", "star_bound", "L_N", "two_pow_LN",
        "ratio", "graph_classes", "LG_N", "two_pow_LGN",
    ]
    artifacts = [
        write_json_report(os.path.join(args.out, "compare_report.json"), report),
        write_csv(os.path.join(args.out, "compare.csv"), fields, report["rows"]),
    ]
    series = {
        "model_classes": [(r["n"], r["vertex_classes"]) for r in report["rows"]],
        "star_bound": [
            (r["n"], r["star_bound"]) for r in report["rows"] if r["star_bound"]
        ],
        "2^L": [(r["n"], r["two_pow_LN"]) for r in report["rows"]],
    }
    artifacts.append(
        write_plot_data(os.path.join(args.out, "compare_plotdata.csv"), series)
    )
    fig = os.path.join(args.out, "compare.png")
    render_series_figure(
        fig, series, "model classes vs star bound vs 2^L", "graph size n",
        "count", logy=True,
    )
    artifacts.append(fig)
    return _finish(args, artifacts, 0)


def cmd_gen(args) -> int:
    artifacts = []
    written = []

    def emit(name: str, g) -> None:
        if args.format == "json":
            path = os.path.join(args.out, f"{name}.json")
            with open(path, "w") as fh:
                json.dump(graph_to_json(g), fh, sort_keys=True)
                fh.write("\n")
        else:
            path = os.path.join(args.out, f"{name}.txt")
            with open(path, "w") as fh:
                fh.write(format_edgelist(g))
        artifacts.append(path)
        written.append(os.path.basename(path))

    if args.family == "stars":
        for key, g in star_family(args.n, cap_n=min(args.cap_n, 6)):
            emit("star_" + "-".join(str(k) for k in key), g)
    elif args.family == "labeled":
        for i, g in enumerate(enumerate_labeled_graphs(args.n, cap_n=args.cap_n)):
            emit(f"graph_{args.n}_{i:06d}", g)
    else:
        rng = random.Random(args.seed)
        for i in range(args.count):
            g = random_graph(args.n, args.p, seed=rng.randrange(1 << 30))
            emit(f"random_{args.n}_{i:04d}", g)
    artifacts.append(
        write_json_report(
            os.path.join(args.out, "gen_report.json"),
            {"family": args.family, "n": args.n, "files": written},
        )
    )
    return _finish(args, artifacts, 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--out", default="gnnbits-out", help="output directory")
    common.add_argument(
        "--cap-n", type=int, default=7, dest="cap_n",
        help="exhaustive graph enumeration cap (refuse above)",
    )
    common.add_argument(
        "--jobs", type=int, default=1,
        help="worker processes for exhaustive sweeps (expobserve, compare)",
    )
    parser = argparse.ArgumentParser(
        prog="gnnbits",
        description="exact-rational GNN / color-refinement verification lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile-agg", parents=[common], help="aggregation bit-length profiles")
    p.add_argument("--kinds", default="sum,mean,max")
    p.add_argument("--domains", default="integer")
    p.add_argument("--exponents", default="1..16", help="n = 2^e schedule, e list")
    p.add_argument("--extra-bits", type=int, default=4, dest="extra_bits")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default="sampled")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--sampler", choices=("uniform", "reciprocal-primes"), default="uniform")
    p.set_defaults(func=cmd_profile_agg)

    p = sub.add_parser("probe-mlp", parents=[common], help="MLP output bit-length probe")
    p.add_argument("--model", help="MLP JSON file (default: sampled)")
    p.add_argument("--mlp-seed", type=int, default=1, dest="mlp_seed")
    p.add_argument("--in-dim", type=int, default=2, dest="in_dim")
    p.add_argument("--out-dim", type=int, default=2, dest="out_dim")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--max-bits", type=int, default=8, dest="max_bits")
    p.add_argument("--budgets", default="8,16,32,64")
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_probe_mlp)

    p = sub.add_parser("verify", parents=[common], help="verification suites")
    p.add_argument("what", choices=("star-lemma", "expobserve", "cr-bound"))
    p.add_argument("--n", default=None, help="sizes, e.g. 1..6 or 3,5")
    p.add_argument("--t", type=int, default=2, help="refinement round (star-lemma)")
    p.add_argument("--seeds", type=int, default=20, help="number of seeded models")
    p.add_argument("--model", help="model JSON file instead of seeded models")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", parents=[common], help="evaluate model on graphs")
    p.add_argument("--model", required=True)
    p.add_argument("graphs", nargs="+", help="graph files (.json or edge list)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cr", parents=[common], help="color refinement on a graph")
    p.add_argument("graph", help="graph file (.json or edge list)")
    p.add_argument("--t", type=int, default=None)
    p.set_defaults(func=cmd_cr)

    p = sub.add_parser("compare", parents=[common], help="classes vs bounds table")
    p.add_argument("--n", default="3,5,7")
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--constant", action="store_true", help="use the all-zero model")
    p.add_argument("--seeds", type=int, default=1, help="seeded model count (first used)")
    p.add_argument("--exact-up-to", type=int, default=6, dest="exact_up_to")
    p.add_argument("--samples", type=int, default=512, help="sampled-domain size above the exact cutoff")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", parents=[common], help="write graph families to files")
    p.add_argument("--family", choices=("stars", "labeled", "random"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=8, help="random family size")
    p.add_argument("--p", type=float, default=0.5, help="edge probability (random)")
    p.add_argument("--format", choices=("json", "edgelist"), default="json")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is None and args.command == "verify":
        args.n = "1..6" if args.what == "star-lemma" else "3..6"
    os.makedirs(args.out, exist_ok=True)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
