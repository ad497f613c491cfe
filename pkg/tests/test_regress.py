"""
Tests for the gradient-boosted regressor, its metrics and cross-validation.
"""

import json
import logging
import math

import numpy as np
import pytest

from qcph.config.settings import GbtParams
from qcph.exceptions import LengthMismatch, RegressionError, ShapeMismatch, TooFewRows
from qcph.regress.evaluation import cross_validate, evaluate, mean_report
from qcph.regress.gbt import (
    LEAF,
    GbtModel,
    RegressionTree,
    fit,
    model_from_json,
    model_to_json,
    predict,
    split_counts,
)


@pytest.fixture
def linear_data():
    rng = np.random.default_rng(7)
    X = rng.uniform(0.0, 1.0, size=(100, 3))
    return X, X[:, 1].copy()


@pytest.fixture
def fast_params():
    return GbtParams(n_estimators=200, max_depth=7, learning_rate=0.1, subsample=0.7, seed=3)


def stump() -> RegressionTree:
    return RegressionTree(
        feature=np.array([0, LEAF, LEAF]),
        threshold=np.array([0.5, 0.0, 0.0]),
        left=np.array([1, LEAF, LEAF]),
        right=np.array([2, LEAF, LEAF]),
        value=np.array([0.0, -0.5, 0.5]),
    )


class TestFit:

    def test_constant_target(self, caplog):
        X = np.arange(10, dtype=float).reshape(5, 2)
        with caplog.at_level(logging.WARNING):
            model = fit(X, [4.0] * 5)
        assert model.degenerate
        assert model.trees == []
        assert predict(model, X).tolist() == [4.0] * 5
        assert "constant target" in caplog.text

    def test_learns_one_column(self, linear_data, fast_params):
        X, y = linear_data
        model = fit(X, y, fast_params)
        assert evaluate(y, predict(model, X)).cod > 0.99
        assert split_counts(model)[1] > 0

    def test_identical_rows_predict_mean(self):
        X = np.ones((3, 2))
        model = fit(X, [1.0, 2.0, 3.0], GbtParams(n_estimators=5))
        assert predict(model, X) == pytest.approx([2.0, 2.0, 2.0])
        assert all(tree.n_nodes == 1 for tree in model.trees)

    def test_depth_limit(self, linear_data):
        X, y = linear_data
        model = fit(X, y, GbtParams(n_estimators=10, max_depth=2))
        assert max(tree.depth for tree in model.trees) <= 2

    def test_training_loss_never_increases(self, linear_data, fast_params):
        X, y = linear_data
        losses = fit(X, y, fast_params).train_loss
        assert len(losses) == fast_params.n_estimators
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_seeded_fit_is_deterministic(self, linear_data, fast_params):
        X, y = linear_data
        first = predict(fit(X, y, fast_params), X)
        second = predict(fit(X, y, fast_params), X)
        np.testing.assert_array_equal(first, second)

    def test_power_of_two_scaling_changes_nothing(self, linear_data, fast_params):
        X, y = linear_data
        plain = predict(fit(X, y, fast_params), X)
        scaled = predict(fit(4.0 * X, y, fast_params), 4.0 * X)
        np.testing.assert_array_equal(plain, scaled)

    def test_shape_errors(self):
        with pytest.raises(ShapeMismatch):
            fit(np.zeros((3, 2)), [1.0, 2.0])
        with pytest.raises(ShapeMismatch):
            fit(np.zeros((1, 2)), [1.0])
        with pytest.raises(ShapeMismatch):
            fit(np.array([[0.0], [np.nan]]), [1.0, 2.0])
        with pytest.raises(ShapeMismatch):
            fit(np.zeros(4), [1.0] * 4)


class TestPredict:

    def test_stump(self):
        model = GbtModel(base_prediction=0.0, learning_rate=1.0, n_features=1, trees=[stump()])
        assert predict(model, [[0.0], [1.0]]).tolist() == [-0.5, 0.5]

    def test_threshold_goes_right(self):
        model = GbtModel(base_prediction=0.0, learning_rate=1.0, n_features=1, trees=[stump()])
        assert predict(model, [[0.5]]).tolist() == [0.5]

    def test_no_trees(self):
        model = GbtModel(base_prediction=1.25, learning_rate=0.1, n_features=3)
        assert predict(model, np.zeros((2, 3))).tolist() == [1.25, 1.25]

    def test_matches_training_accumulation(self, linear_data, fast_params):
        X, y = linear_data
        model = fit(X, y, fast_params)
        assert float(np.mean((y - predict(model, X)) ** 2)) == model.train_loss[-1]

    def test_wrong_column_count(self):
        model = GbtModel(base_prediction=0.0, learning_rate=1.0, n_features=2)
        with pytest.raises(ShapeMismatch):
            predict(model, np.zeros((2, 3)))


class TestModelJson:

    def test_round_trip_predicts_identically(self, linear_data):
        X, y = linear_data
        model = fit(X, y, GbtParams(n_estimators=20, max_depth=3))
        restored = model_from_json(model_to_json(model, ["a", "b", "c"]))
        np.testing.assert_array_equal(predict(model, X), predict(restored, X))

    def test_document_keys(self, linear_data):
        X, y = linear_data
        model = fit(X, y, GbtParams(n_estimators=3, max_depth=2))
        document = json.loads(model_to_json(model, ["a", "b", "c"]))
        assert {"base", "lr", "trees", "split_counts", "feature_names"} <= set(document)
        assert sum(document["split_counts"]) == int(split_counts(model).sum())

    def test_not_a_model(self):
        with pytest.raises(RegressionError):
            model_from_json("{}")
        with pytest.raises(RegressionError):
            model_from_json("not json")


class TestEvaluate:

    def test_perfect(self):
        report = evaluate([0, 1, 2], [0, 1, 2])
        assert (report.cod, report.mae, report.rmse) == (1.0, 0.0, 0.0)
        assert report.pcc == pytest.approx(1.0)

    def test_worked_example(self):
        report = evaluate([0, 1, 2], [0, 1, 4])
        assert report.cod == pytest.approx(-1.0)
        assert report.pcc == pytest.approx(4 / math.sqrt(52 / 3))
        assert report.pcc == pytest.approx(0.9608, abs=1e-4)
        assert report.mae == pytest.approx(2 / 3)
        assert report.rmse == pytest.approx(math.sqrt(4 / 3))

    def test_constant_truth(self, caplog):
        with caplog.at_level(logging.WARNING):
            report = evaluate([1, 1], [1, 1])
        assert report.cod == 1.0
        assert report.pcc == 0.0
        assert not report.pcc_defined
        assert "PCC undefined" in caplog.text

    def test_constant_truth_wrong_prediction(self):
        assert evaluate([1, 1], [1, 2]).cod == 0.0

    def test_rmse_at_least_mae(self):
        rng = np.random.default_rng(3)
        y_true = rng.normal(size=50)
        y_pred = y_true + rng.normal(0.0, 1e-9, size=50)
        report = evaluate(y_true, y_pred)
        assert report.rmse == pytest.approx(math.sqrt(np.mean((y_true - y_pred) ** 2)))
        assert report.rmse >= report.mae - 1e-15

    def test_rmse_matches_mae_for_equal_residuals(self):
        report = evaluate([0.0, 1.0, 2.0], [0.5, 1.5, 2.5])
        assert report.rmse == pytest.approx(report.mae)
        assert report.rmse == pytest.approx(0.5)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            evaluate([1, 2], [1])
        with pytest.raises(LengthMismatch):
            evaluate([], [])

    def test_to_dict_keys(self):
        assert list(evaluate([0, 1], [0, 1]).to_dict()) == ["cod", "pcc", "pcc_defined", "mae", "rmse"]

    def test_to_dict_reports_undefined_pcc(self):
        assert evaluate([1, 1], [1, 1]).to_dict()["pcc_defined"] is False

    def test_mean_report(self):
        mean = mean_report([evaluate([0, 1], [0, 1]), evaluate([0, 1, 2], [0, 1, 4])])
        assert mean.mae == pytest.approx(1 / 3)


class TestCrossValidate:

    def test_leave_one_out_constant_target(self):
        X = np.arange(8, dtype=float).reshape(4, 2)
        result = cross_validate(X, [2.0] * 4, folds=4, repeats=1,
                                p=GbtParams(n_estimators=5))
        assert result.mean.mae == 0.0
        assert len(result.folds) == 4
        assert all(f.n_train == 3 and f.n_test == 1 for f in result.folds)

    def test_deterministic(self, linear_data):
        X, y = linear_data
        p = GbtParams(n_estimators=10, max_depth=3)
        first = cross_validate(X, y, folds=3, repeats=2, p=p, seed=11)
        second = cross_validate(X, y, folds=3, repeats=2, p=p, seed=11)
        assert first.to_dict() == second.to_dict()
        assert len(first.folds) == 6

    def test_linear_signal(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(0.0, 1.0, size=(200, 3))
        y = 2.0 * X[:, 0] + 0.5 * X[:, 1]
        p = GbtParams(n_estimators=300, max_depth=4, learning_rate=0.1, subsample=1.0)
        result = cross_validate(X, y, folds=5, repeats=1, p=p, seed=0)
        assert result.mean.cod > 0.9

    def test_noisy_signal_with_desk_params(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(0.0, 1.0, size=(200, 3))
        y = 2.0 * X[:, 0] + 0.5 * X[:, 1] + rng.normal(0.0, 0.01, size=200)
        result = cross_validate(X, y, folds=5, repeats=5, p=GbtParams.desk(), seed=0)
        assert len(result.folds) == 25
        assert result.mean.cod > 0.95

    def test_fold_sizes_cover_all_rows(self, linear_data):
        X, y = linear_data
        result = cross_validate(X, y, folds=3, repeats=1, p=GbtParams(n_estimators=2))
        assert sorted(f.n_test for f in result.folds) == [33, 33, 34]

    @pytest.mark.parametrize("n, folds", [(3, 2), (4, 1), (2, 5)])
    def test_too_few_rows(self, n, folds):
        X = np.arange(n, dtype=float).reshape(n, 1)
        with pytest.raises(TooFewRows):
            cross_validate(X, np.arange(n, dtype=float), folds=folds, repeats=1)
