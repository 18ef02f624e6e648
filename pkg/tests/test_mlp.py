"""Exact MLPs: forward pass, the per-layer bit-length check, the provable
envelope, and the complexity probe."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnnbits.mlp import (
    LayerBoundViolation,
    MLPSpec,
    composed_bound,
    identity_mlp,
    layer_bound_check,
    linear_mlp,
    make_layer,
    make_mlp,
    max_weight_bitlen,
    mlp_forward,
    mlp_from_json,
    mlp_to_json,
    probe_mlp_complexity,
    random_mlp,
    relu_vec,
    safe_layer_bound,
    set_layer_bound_assertions,
    zero_mlp,
)
from gnnbits.rationals import DimensionMismatch, bitlen_vec

small_ints = st.integers(min_value=-9, max_value=9)


class TestConstruction:
    def test_rejects_ragged_matrix(self):
        with pytest.raises(ValueError):
            make_layer([[1, 2], [3]], [0, 0])

    def test_rejects_bias_mismatch(self):
        with pytest.raises(DimensionMismatch):
            make_layer([[1, 2]], [0, 0])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            make_mlp([])

    def test_rejects_dim_chain_break(self):
        l1 = make_layer([[1, 2]], [0])  # 2 -> 1
        l2 = make_layer([[1, 0], [0, 1]], [0, 0])  # 2 -> 2
        with pytest.raises(DimensionMismatch):
            MLPSpec((l1, l2))

    def test_dims(self):
        mlp = make_mlp([([[1, 2], [3, 4]], [0, 0]), ([[1, 1]], [5])])
        assert mlp.in_dim == 2 and mlp.out_dim == 1 and mlp.depth == 2


class TestForward:
    def test_relu(self):
        assert relu_vec((F(-3), F(0), F(5, 2))) == (F(0), F(0), F(5, 2))

    def test_identity_passes_negatives(self):
        # single-layer MLPs apply no activation (outermost layer is affine)
        assert mlp_forward(identity_mlp(2), (F(-3), F(5))) == (F(-3), F(5))

    def test_zero(self):
        assert mlp_forward(zero_mlp(3, 2), (F(1), F(2), F(3))) == (F(0), F(0))

    def test_hidden_relu_applies(self):
        # layer1 output -2 clamps to 0 before layer2
        mlp = make_mlp([([[1]], [-3]), ([[1]], [0])])
        assert mlp_forward(mlp, (F(1),)) == (F(0),)
        assert mlp_forward(mlp, (F(5),)) == (F(2),)

    def test_exact_rational_affine(self):
        mlp = linear_mlp([[F(1, 2), F(1, 3)]], [F(1, 6)])
        assert mlp_forward(mlp, (F(1), F(1))) == (F(1),)

    def test_input_dim_checked(self):
        with pytest.raises(DimensionMismatch):
            mlp_forward(identity_mlp(2), (F(1),))

    @given(st.lists(small_ints, min_size=2, max_size=2))
    def test_matches_direct_computation(self, xs):
        w = [[2, -1], [0, 3]]
        b = [1, -2]
        x = tuple(F(v) for v in xs)
        out = mlp_forward(linear_mlp(w, b), x)
        assert out == (2 * x[0] - x[1] + 1, 3 * x[1] - 2)


class TestLayerBound:
    def test_frozen_integer_example(self):
        # w=[[3]], b=(0), x=(5): lhs = <15> = 5, rhs = 2 + 1*1*3 + 1*1*4 = 9
        chk = layer_bound_check(make_layer([[3]], [0]), (F(5),))
        assert chk == {"lhs": 5, "rhs": 9, "holds": True}

    def test_frozen_rational_counterexample(self):
        # coprime denominators: 9/35 + 8/31 = 559/1085 needs 21 bits, while
        # the additive bound only grants 9 + 3 + 1*1*5 + ... = 19; sums of
        # rationals can exceed the per-term bit budget when denominators
        # multiply, so the inequality is domain-sensitive
        layer = make_layer([[F(3, 7)]], [F(8, 31)])
        chk = layer_bound_check(layer, (F(3, 5),))
        assert chk["lhs"] == 21
        assert chk["rhs"] == 19
        assert chk["holds"] is False

    def test_max_weight_bitlen(self):
        # the max is over <entry> as a rational: <3> = 3, <3/2> = 4
        assert max_weight_bitlen(make_layer([[3, F(3, 2)]], [0])) == 4

    @given(
        st.lists(st.lists(small_ints, min_size=2, max_size=2), min_size=2, max_size=2),
        st.lists(small_ints, min_size=2, max_size=2),
        st.lists(small_ints, min_size=2, max_size=2),
    )
    def test_holds_on_integers(self, w, b, xs):
        chk = layer_bound_check(make_layer(w, b), tuple(F(v) for v in xs))
        assert chk["holds"]

    def test_assert_mode_off_by_default(self):
        layer = make_layer([[F(3, 7)]], [F(8, 31)])
        mlp = MLPSpec((layer,))
        assert mlp_forward(mlp, (F(3, 5),)) == (F(559, 1085),)

    def test_assert_mode_raises_on_violation(self):
        layer = make_layer([[F(3, 7)]], [F(8, 31)])
        mlp = MLPSpec((layer,))
        set_layer_bound_assertions(True)
        try:
            with pytest.raises(LayerBoundViolation):
                mlp_forward(mlp, (F(3, 5),))
        finally:
            set_layer_bound_assertions(False)


class TestEnvelope:
    @given(
        st.lists(
            st.tuples(small_ints, st.integers(min_value=1, max_value=9)),
            min_size=2,
            max_size=2,
        ),
        st.tuples(small_ints, st.integers(min_value=1, max_value=9)),
    )
    @settings(max_examples=200)
    def test_safe_layer_bound_is_sound(self, wparts, xpart):
        # unrestricted rationals: the envelope must hold where the
        # additive per-layer check may not
        w = [[F(n, d) for n, d in wparts]]
        x = (F(xpart[0], xpart[1]), F(1, 3))
        layer = make_layer(w, [F(1, 7)])
        out = relu_vec(mlp_forward(MLPSpec((layer,)), x))
        assert bitlen_vec(out) <= safe_layer_bound(layer, bitlen_vec(x))

    def test_envelope_covers_the_counterexample(self):
        layer = make_layer([[F(3, 7)]], [F(8, 31)])
        assert safe_layer_bound(layer, 5) >= 21

    def test_composed_bound_monotone(self):
        rng = random.Random(3)
        mlp = random_mlp(rng, 2, 2, depth=2)
        assert composed_bound(mlp, 8) <= composed_bound(mlp, 16)

    @given(st.integers(min_value=0, max_value=10))
    @settings(max_examples=30)
    def test_composed_bound_sound_on_samples(self, seed):
        rng = random.Random(seed)
        mlp = random_mlp(rng, 2, 2, depth=2, max_bits=5)
        x = (F(rng.randint(-7, 7), rng.randint(1, 7)), F(rng.randint(-7, 7), rng.randint(1, 7)))
        assert bitlen_vec(mlp_forward(mlp, x)) <= composed_bound(mlp, bitlen_vec(x))


class TestProbe:
    def test_probe_report_shape_and_bound(self):
        rng = random.Random(7)
        mlp = random_mlp(rng, 2, 2, depth=2)
        probe = probe_mlp_complexity(mlp, [8, 16, 32], samples_per_budget=16, seed=1)
        assert [b for b, _ in probe["rows"]] == [8, 16, 32]
        assert probe["within_bound"] is True
        assert isinstance(probe["slope"], float)
        for (b, obs), (b2, bound) in zip(probe["rows"], probe["bound_curve"]):
            assert b == b2 and obs <= bound

    def test_probe_deterministic(self):
        rng = random.Random(7)
        mlp = random_mlp(rng, 2, 1, depth=1)
        a = probe_mlp_complexity(mlp, [8, 16], samples_per_budget=8, seed=5)
        b = probe_mlp_complexity(mlp, [8, 16], samples_per_budget=8, seed=5)
        assert a == b


class TestSerialization:
    def test_round_trip(self):
        rng = random.Random(11)
        mlp = random_mlp(rng, 3, 2, depth=2)
        assert mlp_from_json(mlp_to_json(mlp)) == mlp

    def test_declared_dims_validated(self):
        doc = mlp_to_json(identity_mlp(2))
        doc["in_dim"] = 3
        with pytest.raises(ValueError):
            mlp_from_json(doc)

    def test_rational_literals_in_doc(self):
        doc = mlp_to_json(linear_mlp([[F(1, 2)]], [F(-3, 4)]))
        assert doc["layers"][0]["w"] == [["1/2"]]
        assert doc["layers"][0]["b"] == ["-3/4"]
