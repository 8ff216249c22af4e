import math

import numpy as np
import pytest

from semshift.classifier import (
    CLASS_ORDER,
    SoftmaxHead,
    TrainConfig,
    TrainingError,
    gradient_check,
    load_head,
    save_head,
    softmax,
    train_head,
)


def _clusters(rng, n_per=100, dim=4, separation=5.0):
    centers = separation * np.eye(3, dim)
    X = np.vstack([rng.normal(c, 1.0, size=(n_per, dim)) for c in centers])
    labels = ["Yes"] * n_per + ["No"] * n_per + ["Maybe"] * n_per
    return X, labels


class TestPredictProba:
    def test_zero_head_gives_uniform(self):
        head = SoftmaxHead(np.zeros((3, 5)), np.zeros(3))
        assert np.allclose(head.predict_proba(np.ones(5)), 1.0 / 3.0, atol=1e-15)

    def test_hand_softmax(self):
        head = SoftmaxHead(np.array([[math.log(2.0)], [0.0], [0.0]]), np.zeros(3))
        assert head.predict_proba(np.array([1.0])) == pytest.approx([0.5, 0.25, 0.25], abs=1e-12)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(0)
        head = SoftmaxHead(rng.normal(size=(3, 6)), rng.normal(size=3))
        for _ in range(50):
            p = head.predict_proba(rng.normal(scale=10.0, size=6))
            assert (p > 0).all()
            assert abs(p.sum() - 1.0) < 1e-12

    def test_non_finite_input_errors(self):
        head = SoftmaxHead(np.zeros((3, 2)), np.zeros(3))
        with pytest.raises(TrainingError):
            head.predict_proba(np.array([np.nan, 0.0]))

    def test_bias_shift_invariance(self):
        rng = np.random.default_rng(1)
        head = SoftmaxHead(rng.normal(size=(3, 4)), rng.normal(size=3))
        shifted = SoftmaxHead(head.weights.copy(), head.bias + 7.5)
        x = rng.normal(size=4)
        assert np.allclose(head.predict_proba(x), shifted.predict_proba(x), atol=1e-9)
        assert head.predict_label(x) == shifted.predict_label(x)

    def test_label_permutation_equivariance(self):
        rng = np.random.default_rng(2)
        head = SoftmaxHead(rng.normal(size=(3, 4)), rng.normal(size=3))
        perm = [2, 0, 1]
        permuted = SoftmaxHead(head.weights[perm], head.bias[perm])
        x = rng.normal(size=4)
        assert np.allclose(head.predict_proba(x)[perm], permuted.predict_proba(x), atol=1e-15)

    def test_argmax_tie_resolved_by_class_order(self):
        head = SoftmaxHead(np.zeros((3, 2)), np.zeros(3))
        assert head.predict_label(np.array([1.0, 1.0])) == CLASS_ORDER[0]

    def test_head_parameters_are_immutable(self):
        source = np.zeros((3, 2))
        head = SoftmaxHead(source, np.zeros(3))
        with pytest.raises(ValueError):
            head.weights[0, 0] = 1.0
        with pytest.raises(ValueError):
            head.bias[0] = 1.0
        source[0, 0] = 5.0  # the head held a copy, and the caller's array stays writable
        assert head.weights[0, 0] == 0.0


class TestTrainHead:
    def test_zero_epochs_returns_seeded_initialization(self):
        rng = np.random.default_rng(3)
        X, labels = _clusters(rng, n_per=10)
        cfg = TrainConfig(epochs=0, seed=11)
        a = train_head(X, labels, cfg)
        b = train_head(X, labels, cfg)
        assert a.selected_epoch == 0 and a.train_losses == []
        assert np.array_equal(a.head.weights, b.head.weights)
        assert np.abs(a.head.weights).max() <= 0.01
        assert np.array_equal(a.head.bias, np.zeros(3))

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(4)
        X, labels = _clusters(rng, n_per=12)
        cfg = TrainConfig(epochs=15, seed=5)
        a = train_head(X, labels, cfg)
        b = train_head(X, labels, cfg)
        assert a.train_losses == b.train_losses
        assert a.val_losses == b.val_losses
        assert a.selected_epoch == b.selected_epoch
        assert np.array_equal(a.head.weights, b.head.weights)
        assert np.array_equal(a.head.bias, b.head.bias)

    def test_separable_clusters_reach_full_accuracy(self):
        rng = np.random.default_rng(6)
        X, labels = _clusters(rng, n_per=100, separation=5.0)
        report = train_head(X, labels, TrainConfig(epochs=80, seed=3))
        probs = report.head.predict_proba_batch(X)
        predicted = np.argmax(probs, axis=1)
        truth = np.array([CLASS_ORDER.index(l) for l in labels])
        assert (predicted == truth).mean() == 1.0

    def test_selected_epoch_is_first_minimum(self):
        rng = np.random.default_rng(7)
        X, labels = _clusters(rng, n_per=20)
        report = train_head(X, labels, TrainConfig(epochs=40, seed=8))
        vals = np.array(report.val_losses)
        assert report.selected_epoch == int(np.argmin(vals)) + 1

    def test_full_batch_loss_non_increasing_at_small_lr(self):
        rng = np.random.default_rng(9)
        X, labels = _clusters(rng, n_per=100)
        cfg = TrainConfig(learning_rate=1e-3, epochs=60, batch_size=len(labels), seed=1)
        report = train_head(X, labels, cfg)
        diffs = np.diff(report.train_losses)
        assert (diffs <= 1e-12).all(), diffs.max()

    def test_single_class_errors(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(30, 4))
        with pytest.raises(TrainingError, match="single class"):
            train_head(X, ["Yes"] * 30, TrainConfig(seed=0))

    def test_too_few_examples_errors(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(10, 4))
        with pytest.raises(TrainingError, match="at least 20"):
            train_head(X, ["Yes", "No"] * 5, TrainConfig(seed=0))

    def test_divergence_is_reported(self):
        rng = np.random.default_rng(12)
        X, labels = _clusters(rng, n_per=10)
        cfg = TrainConfig(learning_rate=1e160, epochs=5, seed=0)
        with pytest.raises(TrainingError, match="diverged"):
            train_head(X * 1e120, labels, cfg)

    def test_validation_fraction_bounds(self):
        with pytest.raises(TrainingError):
            TrainConfig(validation_fraction=0.5)
        with pytest.raises(TrainingError):
            TrainConfig(validation_fraction=0.0)

    def test_checkpoint_roundtrip(self, tmp_path):
        rng = np.random.default_rng(13)
        X, labels = _clusters(rng, n_per=10)
        report = train_head(X, labels, TrainConfig(epochs=5, seed=2))
        path = tmp_path / "head.json"
        save_head(report.head, path, report.selected_epoch)
        head, epoch = load_head(path)
        assert epoch == report.selected_epoch
        assert np.array_equal(head.weights, report.head.weights)
        assert np.array_equal(head.bias, report.head.bias)
        assert head.class_order == report.head.class_order


class TestGradientCheck:
    def test_random_head_and_batch(self):
        rng = np.random.default_rng(14)
        head = SoftmaxHead(rng.normal(size=(3, 6)), rng.normal(size=3))
        X = rng.normal(size=(12, 6))
        labels = [CLASS_ORDER[i % 3] for i in range(12)]
        assert gradient_check(head, X, labels) <= 1e-5

    def test_zero_head_matches_closed_form(self):
        # At zero parameters every class probability is 1/3, so the weight
        # gradient is the mean of (1/3 - onehot) outer x, computed here by hand.
        rng = np.random.default_rng(15)
        X = rng.normal(size=(9, 4))
        labels = [CLASS_ORDER[i % 3] for i in range(9)]
        hand = np.zeros((3, 4))
        for x, label in zip(X, labels):
            p = np.full(3, 1.0 / 3.0)
            p[CLASS_ORDER.index(label)] -= 1.0
            hand += np.outer(p, x)
        hand /= len(labels)

        from semshift.classifier import _ce_gradient

        g_w, g_b = _ce_gradient(np.zeros((3, 4)), np.zeros(3), X, np.array([i % 3 for i in range(9)]))
        assert np.allclose(g_w, hand, atol=1e-12)
        # balanced labels: mean of (1/3 - onehot) vanishes per class
        assert np.allclose(g_b, np.zeros(3), atol=1e-12)

    def test_repeated_example_equals_single_example_gradient(self):
        rng = np.random.default_rng(16)
        head = SoftmaxHead(rng.normal(size=(3, 5)), rng.normal(size=3))
        x = rng.normal(size=5)
        from semshift.classifier import _ce_gradient

        single = _ce_gradient(head.weights, head.bias, x[None, :], np.array([1]))
        repeated = _ce_gradient(head.weights, head.bias, np.tile(x, (6, 1)), np.array([1] * 6))
        assert np.allclose(single[0], repeated[0], atol=1e-14)
        assert np.allclose(single[1], repeated[1], atol=1e-14)

    def test_empty_batch_errors(self):
        head = SoftmaxHead(np.zeros((3, 2)), np.zeros(3))
        with pytest.raises(TrainingError):
            gradient_check(head, np.zeros((0, 2)), [])


def test_softmax_rows_normalized():
    rng = np.random.default_rng(17)
    logits = rng.normal(scale=50.0, size=(20, 3))
    p = softmax(logits)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)
    assert (p > 0).all()
