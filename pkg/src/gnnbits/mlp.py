"""ReLU MLPs over exact rationals, with per-layer output-size bound checks.

An MLP is a nonempty sequence of (weight matrix, bias vector) layers with
chained dimensions. Forward evaluation applies ReLU after every layer
except the last. All arithmetic is exact; evaluating the same input twice
is bit-identical.

Two output-size bounds live here:

- ``layer_bound_check`` evaluates the additive per-layer inequality
      bitlen(relu(Wx+b)) <= bitlen(b) + d2*d1*w_max + d2*d1*bitlen(x)
  with w_max the maximum bit-length of any weight entry. This holds
  whenever a sum of products cannot grow denominators (integer or
  common-denominator entries) but is NOT universally true for rationals:
  adding p1/q1 + p2/q2 with coprime denominators cross-multiplies
  numerators, and the growth is unbounded per addition. See
  ``tests/test_mlp.py`` for a fixed counterexample.

- ``composed_bound`` chains a weaker inequality that IS provable for all
  rationals (sum of r terms costs at most bits(r) plus twice the terms'
  total bit-length), giving a guaranteed ceiling for whole-MLP output
  sizes used by the complexity probe.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .rationals import (
    DimensionMismatch,
    RVec,
    Rat,
    as_rat,
    as_vec,
    bitlen_int,
    bitlen_rat,
    bitlen_vec,
    check_dim,
    format_rat,
    format_vec,
)

Matrix = tuple[tuple[Rat, ...], ...]


@dataclass(frozen=True)
class Layer:
    w: Matrix
    b: RVec

    def __post_init__(self) -> None:
        if not self.w or not self.w[0]:
            raise ValueError("layer weight matrix must be nonempty")
        width = len(self.w[0])
        if any(len(row) != width for row in self.w):
            raise ValueError("layer weight matrix must be rectangular")
        if len(self.b) != len(self.w):
            raise DimensionMismatch(
                f"bias dimension {len(self.b)} != output dimension {len(self.w)}"
            )

    @property
    def in_dim(self) -> int:
        return len(self.w[0])

    @property
    def out_dim(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class MLPSpec:
    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("an MLP needs at least one layer")
        for prev, cur in zip(self.layers, self.layers[1:]):
            if cur.in_dim != prev.out_dim:
                raise DimensionMismatch(
                    f"layer input dim {cur.in_dim} != previous output dim {prev.out_dim}"
                )

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def depth(self) -> int:
        return len(self.layers)


def make_layer(w: Iterable[Iterable[object]], b: Iterable[object]) -> Layer:
    return Layer(tuple(as_vec(row) for row in w), as_vec(b))


def make_mlp(layers: Iterable[tuple[Iterable[Iterable[object]], Iterable[object]]]) -> MLPSpec:
    return MLPSpec(tuple(make_layer(w, b) for w, b in layers))


def identity_mlp(dim: int) -> MLPSpec:
    w = tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim))
    return MLPSpec((Layer(w, tuple(Fraction(0) for _ in range(dim))),))


def zero_mlp(in_dim: int, out_dim: int) -> MLPSpec:
    w = tuple(tuple(Fraction(0) for _ in range(in_dim)) for _ in range(out_dim))
    return MLPSpec((Layer(w, tuple(Fraction(0) for _ in range(out_dim))),))


def linear_mlp(w: Iterable[Iterable[object]], b: Iterable[object]) -> MLPSpec:
    """Single-layer MLP; with one layer there is no activation at all."""
    return MLPSpec((make_layer(w, b),))


def relu_vec(v: Sequence[Rat]) -> RVec:
    zero = Fraction(0)
    return tuple(x if x > zero else zero for x in v)


def _affine(layer: Layer, x: Sequence[Rat]) -> RVec:
    return tuple(
        sum((wij * xj for wij, xj in zip(row, x)), Fraction(0)) + bi
        for row, bi in zip(layer.w, layer.b)
    )


# Optional global assertion mode: when enabled, every forward pass checks the
# additive per-layer inequality and raises on violation. Off by default
# because the inequality is falsifiable for rational weights (module doc).
_ASSERT_LAYER_BOUNDS = False


def set_layer_bound_assertions(enabled: bool) -> None:
    global _ASSERT_LAYER_BOUNDS
    _ASSERT_LAYER_BOUNDS = enabled


class LayerBoundViolation(AssertionError):
    pass


def mlp_forward(mlp: MLPSpec, x: Sequence[Rat]) -> RVec:
    check_dim(x, mlp.in_dim, "MLP input")
    value: RVec = tuple(x)
    last = len(mlp.layers) - 1
    for i, layer in enumerate(mlp.layers):
        if _ASSERT_LAYER_BOUNDS:
            report = layer_bound_check(layer, value)
            if not report["holds"]:
                raise LayerBoundViolation(
                    f"layer {i}: lhs={report['lhs']} > rhs={report['rhs']}"
                )
        value = _affine(layer, value)
        if i != last:
            value = relu_vec(value)
    return value


def max_weight_bitlen(layer: Layer) -> int:
    return max(bitlen_rat(w) for row in layer.w for w in row)


def layer_bound_check(layer: Layer, x: Sequence[Rat]) -> dict:
    """Evaluate the additive per-layer inequality on one concrete input.

    lhs is the bit-length of relu(Wx+b); rhs is
    bitlen(b) + d2*d1*w_max + d2*d1*bitlen(x). Returns lhs, rhs, and
    whether lhs <= rhs. Not universally true for rational entries (module
    doc); integer entries never violate it.
    """
    check_dim(x, layer.in_dim, "layer input")
    lhs = bitlen_vec(relu_vec(_affine(layer, x)))
    d1, d2 = layer.in_dim, layer.out_dim
    rhs = bitlen_vec(layer.b) + d2 * d1 * max_weight_bitlen(layer) + d2 * d1 * bitlen_vec(x)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs}


def safe_layer_bound(layer: Layer, input_budget: int) -> int:
    """Provable ceiling on bitlen(Wx+b) for ANY rational x with bitlen <= budget.

    Per output coordinate, b_i + sum_j w_ij*x_j is a (d1+1)-term rational
    sum; a sum of r terms has bit-length at most bits(r) + 2 * (total term
    bit-length) because the common denominator multiplies, and each product
    satisfies bitlen(w*x) <= bitlen(w) + bitlen(x). Summing coordinates:

        d2*bits(d1+1) + 2*bitlen(b) + 2*d2*d1*w_max + 2*d2*budget

    ReLU never increases an entry's bit-length, so this also bounds the
    activated output. Monotone in the budget, hence composable.
    """
    d1, d2 = layer.in_dim, layer.out_dim
    return (
        d2 * bitlen_int(d1 + 1)
        + 2 * bitlen_vec(layer.b)
        + 2 * d2 * d1 * max_weight_bitlen(layer)
        + 2 * d2 * input_budget
    )


def composed_bound(mlp: MLPSpec, input_budget: int) -> int:
    budget = input_budget
    for layer in mlp.layers:
        budget = safe_layer_bound(layer, budget)
    return budget


def _sample_probe_input(rng: random.Random, dim: int, budget: int) -> RVec:
    # Per-dim budget split evenly; odd numerators and denominators below
    # their halves keep the entry within budget even before reduction.
    per_dim = max(2, budget // dim)
    nb = max(1, per_dim // 2)
    db = max(1, per_dim - nb)
    entries = []
    for _ in range(dim):
        num = rng.randrange(1, 1 << nb, 2)
        den = rng.randrange(1, 1 << db, 2)
        if rng.random() < 0.5:
            num = -num
        entries.append(Fraction(num, den))
    return tuple(entries)


def _corner_probe_input(dim: int, budget: int) -> RVec:
    # All-max integer corner: each entry (2^(per-dim budget - 1)) - 1 over 1.
    per_dim = max(2, budget // dim)
    value = (1 << (per_dim - 1)) - 1
    return tuple(Fraction(max(value, 1)) for _ in range(dim))


def probe_mlp_complexity(
    mlp: MLPSpec,
    budgets: Sequence[int],
    samples_per_budget: int = 64,
    seed: int = 0,
) -> dict:
    """Estimate output bit-length growth against input bit budgets.

    For each budget n, samples inputs with bitlen(x) <= n (random odd
    num/den entries plus the all-max integer corner) and records the max
    observed bitlen(F(x)). Attaches a least-squares linear fit over
    (budget, observed) and the provable composed bound curve; the observed
    curve can never exceed the latter.
    """
    if not budgets:
        raise ValueError("budgets must be nonempty")
    rng = random.Random(seed)
    rows: list[tuple[int, int]] = []
    bound_curve: list[tuple[int, int]] = []
    for budget in budgets:
        best = 0
        inputs = [_corner_probe_input(mlp.in_dim, budget)]
        inputs += [
            _sample_probe_input(rng, mlp.in_dim, budget) for _ in range(samples_per_budget)
        ]
        for x in inputs:
            assert bitlen_vec(x) <= max(budget, 2 * mlp.in_dim)
            best = max(best, bitlen_vec(mlp_forward(mlp, x)))
        rows.append((budget, best))
        bound_curve.append((budget, composed_bound(mlp, budget)))
    if len(budgets) >= 2 and len(set(budgets)) >= 2:
        slope, intercept = statistics.linear_regression(
            [float(n) for n, _ in rows], [float(s) for _, s in rows]
        )
    else:
        slope, intercept = 0.0, float(rows[0][1])
    return {
        "rows": rows,
        "slope": slope,
        "intercept": intercept,
        "bound_curve": bound_curve,
        "within_bound": all(s <= b for (_, s), (_, b) in zip(rows, bound_curve)),
        "samples_per_budget": samples_per_budget,
        "seed": seed,
    }


def random_rat(rng: random.Random, max_bits: int = 8) -> Rat:
    top = (1 << max_bits) - 1
    return Fraction(rng.randint(-top, top), rng.randint(1, top))


def random_mlp(
    rng: random.Random,
    in_dim: int,
    out_dim: int,
    depth: int = 1,
    hidden_max: int = 4,
    max_bits: int = 8,
) -> MLPSpec:
    dims = [in_dim]
    for _ in range(depth - 1):
        dims.append(rng.randint(1, hidden_max))
    dims.append(out_dim)
    layers = []
    for d_in, d_out in zip(dims, dims[1:]):
        w = tuple(
            tuple(random_rat(rng, max_bits) for _ in range(d_in)) for _ in range(d_out)
        )
        b = tuple(random_rat(rng, max_bits) for _ in range(d_out))
        layers.append(Layer(w, b))
    return MLPSpec(tuple(layers))


def mlp_to_json(mlp: MLPSpec) -> dict:
    return {
        "in_dim": mlp.in_dim,
        "out_dim": mlp.out_dim,
        "layers": [
            {"w": [format_vec(row) for row in layer.w], "b": format_vec(layer.b)}
            for layer in mlp.layers
        ],
    }


def mlp_from_json(doc: dict) -> MLPSpec:
    try:
        raw_layers = doc["layers"]
    except KeyError as exc:
        raise ValueError("MLP document missing 'layers'") from exc
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ValueError("'layers' must be a nonempty list")
    layers = []
    for entry in raw_layers:
        w = tuple(tuple(as_rat(lit) for lit in row) for row in entry["w"])
        b = tuple(as_rat(lit) for lit in entry["b"])
        layers.append(Layer(w, b))
    mlp = MLPSpec(tuple(layers))
    for key, expected in (("in_dim", mlp.in_dim), ("out_dim", mlp.out_dim)):
        if key in doc and doc[key] != expected:
            raise ValueError(f"declared {key}={doc[key]} but layers imply {expected}")
    return mlp
