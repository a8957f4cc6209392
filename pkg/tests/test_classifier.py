import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from oracles import logits_loop, numeric_gradient_decimal, weighted_ce_loop

from skewlens.classifier import (
    DEFAULT_SEEDS,
    ClassWeights,
    ModelParams,
    TrainConfig,
    batch_loss,
    cross_entropy,
    fit,
    forward,
    gradient,
    load_model,
    predict,
    run_repeated,
    save_model,
    train,
    weighted_loss,
)
from skewlens.corpus_io import LabeledDataset, Sentence
from skewlens.features import EmbeddingEncoder, EmbeddingStore, FeatureVector

finite = st.floats(-50, 50, allow_nan=False)


def random_params(gen, C, D):
    return ModelParams(gen.standard_normal((C, D)), gen.standard_normal(C))


def rel_error(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12))


def test_zero_params_give_zero_logits():
    p = ModelParams.zeros(3, 5)
    assert forward(p, np.arange(5.0)).tolist() == [0.0, 0.0, 0.0]


def test_one_hot_selects_column_plus_bias():
    W = np.arange(9.0).reshape(3, 3)
    p = ModelParams(W, np.array([0.5, -1.0, 2.0]))
    x = FeatureVector(3, dense=np.array([0.0, 1.0, 0.0]))
    assert forward(p, x).tolist() == (W[:, 1] + p.bias).tolist()


def test_forward_matches_loop_oracle():
    gen = np.random.default_rng(1)
    for _ in range(50):
        C, D = int(gen.integers(2, 5)), int(gen.integers(1, 20))
        p = random_params(gen, C, D)
        x = gen.standard_normal(D)
        assert np.max(np.abs(forward(p, x) - logits_loop(p.weight_matrix, p.bias, x))) <= 1e-12


def test_forward_dim_mismatch():
    with pytest.raises(ValueError):
        forward(ModelParams.zeros(2, 3), np.ones(4))


def test_cross_entropy_values():
    assert cross_entropy([0.0, 0.0], 0) == pytest.approx(math.log(2), abs=1e-15)
    assert cross_entropy([2.0, 0.0], 0) == pytest.approx(math.log1p(math.exp(-2)), abs=1e-15)
    assert cross_entropy([2.0, 0.0], 0) == pytest.approx(0.126928011, abs=1e-9)
    big = cross_entropy([1000.0, 0.0], 0)
    assert math.isfinite(big) and 0.0 <= big < 1e-300
    assert cross_entropy([0.0, 1000.0], 0) == pytest.approx(1000.0)


def test_cross_entropy_rejects_bad_input():
    with pytest.raises(ValueError):
        cross_entropy([0.0, math.inf], 0)
    with pytest.raises(ValueError):
        cross_entropy([0.0, 0.0], 2)


def test_weighted_loss_scaling():
    assert weighted_loss([0.0, 0.0], 0, ClassWeights(np.array([4.0, 1.0]))) == pytest.approx(4 * math.log(2), abs=1e-12)
    assert weighted_loss([0.3, -1.2], 1, ClassWeights.uniform()) == cross_entropy([0.3, -1.2], 1)


@given(st.lists(finite, min_size=2, max_size=4), st.data(), st.floats(0.1, 10))
def test_weighted_loss_is_linear_in_weight(logits, data, w):
    cls = data.draw(st.integers(0, len(logits) - 1))
    base = np.ones(len(logits))
    doubled = base.copy()
    doubled[cls] = 2 * w
    base[cls] = w
    a = weighted_loss(logits, cls, ClassWeights(base))
    b = weighted_loss(logits, cls, ClassWeights(doubled))
    assert b == pytest.approx(2 * a, rel=1e-12, abs=1e-300)


@given(st.lists(finite, min_size=2, max_size=4), st.floats(-1e3, 1e3), st.data())
def test_shift_invariance(logits, shift, data):
    cls = data.draw(st.integers(0, len(logits) - 1))
    shifted = [v + shift for v in logits]
    assert cross_entropy(shifted, cls) == pytest.approx(cross_entropy(logits, cls), abs=1e-9)
    # argmax is shift invariant only when distinct logits stay distinct after rounding
    levels = sorted(set(logits))
    assume(all(hi - lo > 1e-9 * max(1.0, abs(shift)) for lo, hi in zip(levels, levels[1:])))
    assert predict_logits(shifted) == predict_logits(logits)


def predict_logits(logits):
    C = len(logits)
    return predict(ModelParams(np.zeros((C, 1)), np.array(logits)), np.zeros(1))


def test_predict_rules():
    assert predict_logits([0.1, 0.9]) == 1
    assert predict_logits([0.4, 0.4]) == 0
    X = np.array([[1.0], [-1.0]])
    assert predict(ModelParams(np.array([[0.0], [1.0]]), np.zeros(2)), X).tolist() == [1, 0]


def test_uniform_gradient_single_example():
    p = ModelParams.zeros(2, 1)
    dW, db = gradient(p, [(np.array([1.0]), 0)], ClassWeights.uniform())
    assert db.tolist() == [-0.5, 0.5]
    assert dW.ravel().tolist() == [-0.5, 0.5]


def test_gradient_matches_finite_differences():
    gen = np.random.default_rng(7)
    worst = 0.0
    for trial in range(120):
        C, D = (2, 3)[trial % 2], (4, 16)[(trial // 2) % 2]
        p = random_params(gen, C, D)
        weights = gen.uniform(0.2, 8.0, size=C)
        batch = [(gen.standard_normal(D), int(gen.integers(C))) for _ in range(int(gen.integers(1, 6)))]
        l2 = float(gen.choice([0.0, 0.01]))
        dW, db = gradient(p, batch, ClassWeights(weights), l2)
        nW, nb = numeric_gradient_decimal(p.weight_matrix, p.bias, batch, weights)
        # the l2 term is a quadratic, its derivative exact
        nW = np.asarray(nW) + 2 * l2 * p.weight_matrix
        worst = max(worst, rel_error(np.concatenate([dW.ravel(), db]), np.concatenate([nW.ravel(), nb])))
    assert worst < 1e-5


def test_batch_loss_matches_oracle():
    gen = np.random.default_rng(8)
    p = random_params(gen, 3, 6)
    batch = [(gen.standard_normal(6), k % 3) for k in range(5)]
    w = np.array([1.0, 2.0, 0.5])
    assert batch_loss(p, batch, ClassWeights(w)) == pytest.approx(weighted_ce_loop(p.weight_matrix, p.bias, batch, w), rel=1e-12)


def test_gradient_scales_with_example_weight():
    gen = np.random.default_rng(9)
    p = random_params(gen, 2, 4)
    batch = [(gen.standard_normal(4), 1)]
    g1 = gradient(p, batch, ClassWeights(np.array([1.0, 1.0])))
    g3 = gradient(p, batch, ClassWeights(np.array([1.0, 3.0])))
    assert np.allclose(g3[0], 3 * g1[0], rtol=1e-14) and np.allclose(g3[1], 3 * g1[1], rtol=1e-14)


def test_separable_toy_reaches_full_accuracy():
    gen = np.random.default_rng(2)
    X = np.vstack([gen.normal(-2, 0.5, (30, 2)), gen.normal(2, 0.5, (30, 2))])
    y = np.array([0] * 30 + [1] * 30)
    p = fit(X, y, TrainConfig(learning_rate=0.5, epochs=100, batch_size=8))
    assert (predict(p, X) == y).all()


def test_training_is_deterministic():
    gen = np.random.default_rng(3)
    X, y = gen.standard_normal((40, 5)), gen.integers(0, 2, 40)
    cfg = TrainConfig(epochs=5, batch_size=7, seed=11)
    assert fit(X, y, cfg) == fit(X, y, cfg)


@pytest.mark.parametrize(
    "kwargs", [{"epochs": 0}, {"batch_size": 0}, {"learning_rate": 0.0}, {"l2": -1.0}, {"seed": -1}]
)
def test_train_config_invariants(kwargs):
    with pytest.raises(ValueError):
        TrainConfig(**kwargs)


@pytest.mark.parametrize("w", [[1.0], [1.0, 0.0], [1.0, math.nan]])
def test_class_weight_invariants(w):
    with pytest.raises(ValueError):
        ClassWeights(np.array(w))


def test_divergence_is_reported():
    X = np.array([[1e154, -1e154], [-1e154, 1e154]])
    with pytest.raises((FloatingPointError, ValueError)):
        with np.errstate(all="ignore"):
            fit(X, np.array([0, 1]), TrainConfig(learning_rate=1e10, epochs=3, batch_size=1))


def embedding_fixture(seed=0, n=60):
    gen = np.random.default_rng(seed)
    store = EmbeddingStore()
    sentences = []
    for i in range(n):
        y = int(i % 3 == 0)
        store.add("1", i + 1, gen.normal(1.5 * y - 0.5, 1.0, size=2))
        sentences.append(Sentence("1", i + 1, f"s{i}", y))
    return LabeledDataset(tuple(sentences)), EmbeddingEncoder(store)


def test_run_repeated_same_seed_equals_single_run():
    ds, enc = embedding_fixture()
    cfg = TrainConfig(epochs=5, batch_size=8)
    single = run_repeated(ds, ds, enc, cfg, seeds=[4])
    triple = run_repeated(ds, ds, enc, cfg, seeds=[4, 4, 4])
    assert triple.mean.macro_f1 == pytest.approx(single.mean.macro_f1, abs=1e-15)
    assert np.allclose(triple.mean.confusion, single.mean.confusion)


def test_run_repeated_mean_is_hand_average():
    ds, enc = embedding_fixture(1)
    res = run_repeated(ds, ds, enc, TrainConfig(epochs=5, batch_size=8), seeds=[1, 2, 3])
    assert res.mean.macro_f1 == pytest.approx(sum(r.macro_f1 for r in res.per_seed) / 3, abs=1e-12)
    assert DEFAULT_SEEDS == (0, 1, 2) and len(DEFAULT_SEEDS) == 3


def test_train_wrapper_and_model_round_trip(tmp_path):
    ds, enc = embedding_fixture(2)
    p = train(ds, enc, TrainConfig(epochs=3, batch_size=5, seed=1))
    save_model(p, tmp_path / "m.txt")
    assert load_model(tmp_path / "m.txt") == p


def test_load_model_rejects_garbage(tmp_path):
    (tmp_path / "m.txt").write_text("hello\n")
    with pytest.raises(ValueError):
        load_model(tmp_path / "m.txt")
