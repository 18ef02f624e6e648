"""Acceptance gate: seven end-to-end criteria over the whole library.

Each test records one line for the terminal summary (via conftest)
before asserting, so the pass/fail table prints even when a criterion
fails. Criterion 1 contains a strict pairwise-distinctness requirement
that is structurally unattainable (isomorphic family members must share
a color); it is implemented faithfully and expected to fail, with the
numeric bounds it also demands verified separately.
"""

import math
import random
from fractions import Fraction

import pytest

from conftest import record_criterion
from gnnbits.aggregation import classify_agg, log_schedule
from gnnbits.dpower import compare_report, verify_cr_bound, verify_expobserve, verify_star_lemma
from gnnbits.gnn import constant_model, random_model
from gnnbits.mlp import layer_bound_check, make_layer, probe_mlp_complexity, random_mlp
from gnnbits.rationals import bitlen_rat

SEEDS = range(1, 21)
NS = (3, 4, 5, 6)


@pytest.fixture(scope="module")
def sweeps():
    """Exhaustive sweeps shared by criteria 2 and 3: 20 models x n=3..6."""
    results = []
    for seed in SEEDS:
        model = random_model(seed)
        for n in NS:
            results.append(
                (seed, n, verify_expobserve(model, n), verify_cr_bound(model, n))
            )
    return results


def test_criterion_1_star_family_round2_distinctness():
    bounds = {1: 1, 2: 3, 3: 10, 4: 35, 5: 126, 6: 462}
    reports = {n: verify_star_lemma(n) for n in range(1, 7)}
    numeric_ok = all(
        rep["family_size"] == rep["compositions_count"] == math.comb(2 * n, n)
        and rep["lemma_bound"] == bounds[n]
        and rep["family_ge_bound"]
        and rep["graph_classes_ge_bound"]
        and rep["center_cr2_distinct"]
        and rep["degree_oracle_pass"]
        for n, rep in reports.items()
    )
    strict_ok = all(rep["graph_cr2_distinct"] for rep in reports.values())
    first_bad = next(
        (n for n in sorted(reports) if not reports[n]["graph_cr2_distinct"]), None
    )
    record_criterion(
        1,
        "star family: sizes, binomial bounds, and round-2 distinctness (n=1..6)",
        numeric_ok and strict_ok,
        "family sizes, binomial bounds, center tokens, and degree oracle all "
        f"hold; strict pairwise graph-color distinctness fails from n={first_bad} "
        "because distinct compositions can build isomorphic graphs "
        "(isomorphism-oracle-confirmed), which no color assignment may separate",
    )
    assert numeric_ok
    assert strict_ok, (
        "graph-level round-2 colors are not pairwise distinct across the star "
        f"family from n={first_bad} on: compositions "
        f"{reports[first_bad]['colliding_pair']} build isomorphic graphs, so "
        "equal colors are forced (the distinct-color count still meets the "
        "binomial bound, e.g. 19 >= 10 at n=3). The strict all-distinct "
        "requirement is unattainable as stated; every numeric bound it also "
        "demands is verified above and in test_dpower."
    )


def test_criterion_2_counting_chain(sweeps):
    bad = []
    for seed, n, expo, _ in sweeps:
        chain = (
            expo["vertex_classes"] <= expo["distinct_traces"] <= 2 ** expo["L_N"]
            and expo["graph_classes"]
            <= expo["distinct_readout_aggs"]
            <= 2 ** expo["LG_N"]
        )
        clean = (
            expo["trace_implies_output_violations"] == 0
            and expo["signature_implies_output_violations"] == 0
        )
        if not (expo["bound_holds"] and chain and clean):
            bad.append((seed, n))
    record_criterion(
        2,
        "counting chain classes <= traces <= 2^L with zero violations "
        "(20 seeded models, exhaustive n=3..6, vertex and graph levels)",
        not bad,
        f"{len(sweeps)} sweeps" + (f"; failing (seed, n): {bad}" if bad else ""),
    )
    assert not bad


def test_criterion_3_refinement_determines_outputs(sweeps):
    bad = [
        (seed, n)
        for seed, n, _, cr in sweeps
        if not (
            cr["passed"]
            and cr["classes_within_cr"]
            and cr["graph_classes_within_cr"]
        )
    ]
    record_criterion(
        3,
        "equal refinement tokens force equal model outputs, model classes "
        "within refinement classes (same models and domains)",
        not bad,
        f"{len(sweeps)} sweeps" + (f"; failing (seed, n): {bad}" if bad else ""),
    )
    assert not bad


def test_criterion_4_aggregation_growth():
    schedule = log_schedule(range(4, 17), extra_bits=4)
    fits = {}
    over_bound = []
    for kind in ("sum", "max", "mean"):
        cls = classify_agg(kind, schedule, mode="sampled", samples=8)
        fits[kind] = cls["fit"]
        for row in cls["curve"]:
            n, k, s = row["n"], row["k"], row["s"]
            sum_bound = math.ceil(math.log2(n)) + k + 2
            bound = {
                "sum": sum_bound,
                "max": k,
                "mean": sum_bound + bitlen_rat(Fraction(n)),
            }[kind]
            if s > bound:
                over_bound.append((kind, n, s, bound))
    rational = classify_agg(
        "sum",
        log_schedule(range(2, 8), extra_bits=4),
        mode="sampled",
        value_domain="rational",
        sampler="reciprocal-primes",
    )
    ok = (
        all(fit == "log-consistent" for fit in fits.values())
        and not over_bound
        and rational["fit"] == "superlinear-evidence"
    )
    record_criterion(
        4,
        "aggregation growth: integer sum/max/mean log-consistent up to n=2^16 "
        "within their bit bounds; prime-reciprocal rationals superlinear",
        ok,
        f"fits {fits}, rational fit {rational['fit']}"
        + (f"; bound misses {over_bound}" if over_bound else ""),
    )
    assert not over_bound
    assert all(fit == "log-consistent" for fit in fits.values()), fits
    assert rational["fit"] == "superlinear-evidence"


def test_criterion_5_layer_bound_and_probe():
    rng = random.Random(0)
    top = (1 << 16) - 1
    failures = 0
    for _ in range(10_000):
        d1, d2 = rng.randint(1, 3), rng.randint(1, 3)
        layer = make_layer(
            [[rng.randint(-top, top) for _ in range(d1)] for _ in range(d2)],
            [rng.randint(-top, top) for _ in range(d2)],
        )
        x = tuple(Fraction(rng.randint(-top, top)) for _ in range(d1))
        if not layer_bound_check(layer, x)["holds"]:
            failures += 1
    probe = probe_mlp_complexity(
        random_mlp(random.Random(1), 2, 2, depth=2), [8, 16, 32, 64],
        samples_per_budget=32,
    )
    probe_ok = probe["within_bound"] and math.isfinite(probe["slope"])
    record_criterion(
        5,
        "per-layer bound holds on 10^4 random integer (layer, input) pairs; "
        "rational probe stays under the composed analytic ceiling",
        failures == 0 and probe_ok,
        f"{failures} violations; probe slope {probe['slope']:.2f} bits/bit",
    )
    assert failures == 0
    assert probe_ok


def test_criterion_6_collision_witness():
    rep = compare_report(constant_model(), [5])
    (wit,) = rep["witnesses"]
    w = wit["witness"]
    ok = (
        w is not None
        and w["m"] == 2
        and w["tokens_distinct"]
        and w["center_token_1"] != w["center_token_2"]
    )
    record_criterion(
        6,
        "pigeonhole witness at n=5: two star centers with distinct round-2 "
        "tokens and equal constant-model outputs",
        bool(ok),
        (
            f"K1={w['K1']} K2={w['K2']} shared output {w['shared_output']}; "
            f"sufficient condition fired: {wit['condition_fired']} "
            "(the witness search runs unconditionally)"
        )
        if w
        else "no witness found",
    )
    assert ok


def test_criterion_7_trend_tables_report_only():
    rep = compare_report(random_model(1), [3, 5, 7], sample_count=256)
    rows = rep["rows"]
    ok = (
        [r["n"] for r in rows] == [3, 5, 7]
        and all(r["vertex_classes"] <= r["two_pow_LN"] for r in rows)
        and all(r["ratio"] is not None for r in rows)
        and any(not r["exact"] for r in rows)
    )
    record_criterion(
        7,
        "asymptotic growth/limit claims: out of reach at desk scale, covered "
        "by the finite-instance suites plus report-only trend tables",
        ok,
        "class-to-bound ratios attached for n=3,5,7 (n=7 sampled); "
        "no pass/fail attached to trends",
    )
    assert ok
