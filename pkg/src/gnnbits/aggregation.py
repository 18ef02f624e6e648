"""Multiset-to-vector aggregations and output-size complexity measurement.

The built-in aggregators (sum, mean, max) apply dimension-wise to multisets
of equal-dimension rational vectors and are permutation-invariant by
construction. The measurement harness estimates

    S_agg(n, k) = max bitlen(agg(M)) over multisets M of n elements,
                  each element of bit-length <= k

over three scalar value domains: ``integer`` (denominator 1), ``dyadic``
(denominator a power of two), and ``rational`` (unrestricted). The domain
matters: over integers, sum/mean/max all have logarithmic output growth,
but over unrestricted rationals a sum of n reciprocals of distinct primes
multiplies denominators and grows superlinearly. The classifier reports
evidence, never proof.
"""

from __future__ import annotations

import math
import random
import statistics
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .rationals import (
    CapExceeded,
    DimensionMismatch,
    RVec,
    Rat,
    bitlen_rat,
    bitlen_vec,
)

AGG_KINDS = ("sum", "mean", "max")
VALUE_DOMAINS = ("integer", "dyadic", "rational")

DEFAULT_ENUMERATION_CAP = 2_000_000


def aggregate(kind: str, elements: Sequence[RVec], dim: int | None = None) -> RVec:
    """Dimension-wise sum / arithmetic mean / maximum of a multiset.

    The empty multiset aggregates to the zero vector of dimension ``dim``
    (a convention, not arithmetic: mean would be 0/0 and max a supremum of
    nothing). Callers that can hit the empty case must pass ``dim``.
    """
    if kind not in AGG_KINDS:
        raise ValueError(f"unknown aggregator {kind!r}")
    if not elements:
        if dim is None:
            raise ValueError("empty multiset needs an explicit dimension")
        return tuple(Fraction(0) for _ in range(dim))
    width = len(elements[0])
    if dim is not None and width != dim:
        raise DimensionMismatch(f"elements have dimension {width}, expected {dim}")
    for v in elements:
        if len(v) != width:
            raise DimensionMismatch("mixed element dimensions in multiset")
    if kind == "max":
        return tuple(max(v[i] for v in elements) for i in range(width))
    totals = tuple(sum((v[i] for v in elements), Fraction(0)) for i in range(width))
    if kind == "sum":
        return totals
    return tuple(t / len(elements) for t in totals)


def max_domain_value(k: int, domain: str) -> Rat:
    """Largest-magnitude domain value of bit-length <= k (k >= 2)."""
    if k < 2:
        raise ValueError("no rational has bit-length below 2")
    # The integer (2^(k-1)) - 1 has bit-length k in every domain and the
    # largest magnitude: spending bits on a denominator only shrinks.
    return Fraction((1 << (k - 1)) - 1)


def enumerate_domain_scalars(k: int, domain: str) -> list[Rat]:
    """All domain scalars with bit-length <= k, ascending."""
    if domain not in VALUE_DOMAINS:
        raise ValueError(f"unknown value domain {domain!r}")
    values: set[Fraction] = set()
    if k >= 2:
        values.add(Fraction(0))
    if domain == "integer":
        dens = [1]
    elif domain == "dyadic":
        dens = [1 << e for e in range(max(0, k - 1))]
    else:
        dens = list(range(1, 1 << max(0, k - 1)))
    for den in dens:
        den_bits = den.bit_length()
        num_bits = k - den_bits
        if num_bits < 1:
            continue
        top = (1 << num_bits) - 1
        for num in range(1, top + 1):
            if math.gcd(num, den) != 1:
                continue
            values.add(Fraction(num, den))
            values.add(Fraction(-num, den))
    return sorted(values)


def _multiset_count(values: int, n: int) -> int:
    return math.comb(values + n - 1, n)


def _sample_domain_scalar(rng: random.Random, k: int, domain: str) -> Rat:
    if domain == "integer":
        top = (1 << (k - 1)) - 1
        return Fraction(rng.randint(-top, top))
    if domain == "dyadic":
        e = rng.randint(0, k - 2)
        num_bits = k - e - 1
        num = rng.randrange(0, 1 << num_bits)
        if e > 0 and num % 2 == 0:
            num += 1  # keep lowest terms: odd numerator over 2^e
        if rng.random() < 0.5:
            num = -num
        return Fraction(num, 1 << e)
    den_bits = rng.randint(1, k - 1)
    num_bits = k - den_bits
    den = rng.randrange(1 << (den_bits - 1), 1 << den_bits)
    num = rng.randrange(0, 1 << num_bits)
    if rng.random() < 0.5:
        num = -num
    return Fraction(num, den)  # reduction can only shrink below k


def _first_odd_primes(count: int) -> list[int]:
    primes: list[int] = []
    candidate = 3
    while len(primes) < count:
        if all(candidate % p for p in primes) and all(
            candidate % d for d in range(3, int(candidate**0.5) + 1, 2)
        ):
            primes.append(candidate)
        candidate += 2
    return primes


def reciprocal_prime_multiset(n: int) -> list[RVec]:
    """Reciprocals of the first n odd primes, as 1-dim vectors.

    Pairwise-coprime denominators force the sum's denominator to be their
    full product, the worst case for rational-domain sum aggregation.
    """
    return [(Fraction(1, p),) for p in _first_odd_primes(n)]


def measure_agg_complexity(
    kind: str,
    n: int,
    k: int,
    mode: str = "exhaustive",
    value_domain: str = "integer",
    seed: int = 0,
    samples: int = 32,
    cap: int = DEFAULT_ENUMERATION_CAP,
    sampler: str = "uniform",
) -> dict:
    """One profile row: max observed bitlen(agg(M)) over size-n multisets.

    ``exhaustive`` enumerates every multiset of domain scalars with
    bit-length <= k (refused above ``cap`` with the computed count).
    ``sampled`` draws ``samples`` seeded multisets and always includes the
    all-max corner (n copies of the largest-magnitude domain value), which
    attains the true max for sum/max/mean over integers. The
    ``reciprocal-primes`` sampler instead measures the fixed prime-reciprocal
    multiset (rational domain only).
    """
    if kind not in AGG_KINDS:
        raise ValueError(f"unknown aggregator {kind!r}")
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    best = 0
    if sampler == "reciprocal-primes":
        multiset = reciprocal_prime_multiset(n)
        worst = max(bitlen_vec(v) for v in multiset)
        if worst > k:
            raise ValueError(f"prime reciprocals need bit budget {worst} > k={k}")
        best = bitlen_vec(aggregate(kind, multiset))
        mode = "sampled"
        value_domain = "rational"
    elif mode == "exhaustive":
        if (1 << k) * max(k, 1) > cap:
            raise CapExceeded(
                f"value domain at bit budget k={k} is too large to enumerate",
                (1 << k) * max(k, 1),
            )
        values = enumerate_domain_scalars(k, value_domain)
        count = _multiset_count(len(values), n)
        if count > cap:
            raise CapExceeded(
                f"exhaustive enumeration of {len(values)}-value multisets of size {n} refused",
                count,
            )
        for combo in combinations_with_replacement(values, n):
            best = max(best, bitlen_vec(aggregate(kind, [(v,) for v in combo])))
    else:
        rng = random.Random(seed)
        corner = [(max_domain_value(k, value_domain),)] * n
        best = bitlen_vec(aggregate(kind, corner))
        for _ in range(samples):
            multiset = [
                (_sample_domain_scalar(rng, k, value_domain),) for _ in range(n)
            ]
            best = max(best, bitlen_vec(aggregate(kind, multiset)))
    return {"n": n, "k": k, "s": best, "mode": mode, "domain": value_domain}


def classify_agg(
    kind: str,
    schedule: Sequence[tuple[int, int]],
    mode: str = "sampled",
    value_domain: str = "integer",
    seed: int = 0,
    samples: int = 32,
    sampler: str = "uniform",
) -> dict:
    """Fit the measured curve and classify its growth.

    Deterministic thresholds: superlinear-evidence iff s(n_max) > n_max/4;
    otherwise the lower least-squares residual wins between
    s ~ c1*log2(n) + c2 (log-consistent) and s ~ c3*n
    (sublinear-consistent). Evidence only: the raw curve is attached and
    finite data cannot prove an asymptotic class.
    """
    if len(schedule) < 4:
        raise ValueError("classification schedule needs at least 4 points")
    rows = [
        measure_agg_complexity(
            kind, n, k, mode=mode, value_domain=value_domain, seed=seed,
            samples=samples, sampler=sampler,
        )
        for n, k in schedule
    ]
    ns = [row["n"] for row in rows]
    ss = [row["s"] for row in rows]
    n_max = ns[-1]
    s_max = ss[-1]
    if s_max > n_max / 4:
        fit = "superlinear-evidence"
        log_resid = lin_resid = float("nan")
    else:
        logs = [math.log2(n) for n in ns]
        c1, c2 = statistics.linear_regression(logs, [float(s) for s in ss])
        log_resid = sum((c1 * x + c2 - s) ** 2 for x, s in zip(logs, ss))
        c3 = sum(n * s for n, s in zip(ns, ss)) / sum(n * n for n in ns)
        lin_resid = sum((c3 * n - s) ** 2 for n, s in zip(ns, ss))
        fit = "log-consistent" if log_resid <= lin_resid else "sublinear-consistent"
    return {
        "fit": fit,
        "curve": rows,
        "log_residual": log_resid,
        "linear_residual": lin_resid,
        "note": "growth classification is evidence from finite data, not proof",
    }


def log_schedule(exponents: Iterable[int], extra_bits: int = 4) -> list[tuple[int, int]]:
    """Schedule points (n, k) with n = 2^e and k = ceil(log2 n) + extra_bits."""
    return [(1 << e, e + extra_bits) for e in exponents]
