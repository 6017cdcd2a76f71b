from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from gas_forecast.common.errors import (
    AllFailedError,
    DegenerateFoldError,
    InvalidConfigError,
)
from gas_forecast.models import gp_log_marginal_likelihood
from gas_forecast.tuning import (
    GridSpec,
    cv_score,
    gp_tune,
    kfold_grid_search,
    kfold_splits,
    torus_tune,
)


def test_kfold_splits_are_contiguous_and_cover_every_row():
    splits = kfold_splits(23, 5)
    assert len(splits) == 5
    validations = [validation for _, validation in splits]
    np.testing.assert_array_equal(np.concatenate(validations), np.arange(23))
    for train_rows, validation in splits:
        np.testing.assert_array_equal(np.diff(validation), 1)
        np.testing.assert_array_equal(
            np.sort(np.concatenate([train_rows, validation])), np.arange(23)
        )


def test_kfold_splits_put_the_extra_rows_first():
    sizes = [len(validation) for _, validation in kfold_splits(23, 5)]
    assert sizes == [5, 5, 5, 4, 4]


@pytest.mark.parametrize("n, folds", [(3, 5), (9, 5)])
def test_kfold_splits_degenerate(n, folds):
    with pytest.raises(DegenerateFoldError):
        kfold_splits(n, folds)


def test_grid_spec_validation_and_order():
    grid = GridSpec({"k": [1, 2], "weighting": ["uniform", "inverse_distance"]})
    assert len(grid) == 4
    assert grid.points[1] == {"k": 1, "weighting": "inverse_distance"}
    with pytest.raises(InvalidConfigError):
        GridSpec({"lam": []})
    with pytest.raises(InvalidConfigError):
        GridSpec({"lam": [1.0]}, folds=1)


def test_ridge_grid_search(train):
    lams = [1e-4, 1e-2, 1.0, 1e2]
    result = kfold_grid_search("ridge", train, GridSpec({"lam": lams}))
    assert list(result.table["lam"]) == lams
    assert result.score == pytest.approx(result.table["cv_mse"].min())
    assert result.best["lam"] == lams[int(np.argmin(result.table["cv_mse"]))]
    assert 0 < result.df <= train.p
    # Degrees of freedom fall as lambda grows
    assert result.table["df"].is_monotonic_decreasing
    assert result.score == pytest.approx(cv_score("ridge", train, result.best))


def test_grid_search_ties_pick_the_first_point(train):
    # Identical points score identically, the first one wins
    result = kfold_grid_search("knn", train, GridSpec({"k": [3, 3, 3]}))
    assert result.best == {"k": 3}
    assert (result.table["cv_mse"] == result.score).all()


def test_grid_search_skips_failed_points(train):
    result = kfold_grid_search("knn", train, GridSpec({"k": [100000, 4]}))
    assert np.isnan(result.table["cv_mse"].iloc[0])
    assert result.best["k"] == 4


def test_grid_search_all_failed(train):
    with pytest.raises(AllFailedError):
        kfold_grid_search("knn", train, GridSpec({"k": [100000]}))


def test_grid_search_runs_in_threads(train):
    grid = GridSpec({"lam": [1e-3, 1.0]})
    serial = kfold_grid_search("ridge", train, grid)
    threaded = kfold_grid_search("ridge", train, grid, n_jobs=2)
    pd.testing.assert_frame_equal(serial.table, threaded.table)


def test_gp_tune_maximizes_log_likelihood(train):
    X = train.X[:200]
    z = train.scaler.scale_target(train.y[:200])
    result = gp_tune(X, z, [0.5, 2.5], [3.0, 10.0], [0.1, 1.0])
    assert len(result.table) == 8
    assert result.score == pytest.approx(result.table["log_likelihood"].max())
    best = result.best
    assert result.score == pytest.approx(
        gp_log_marginal_likelihood(
            X, z, best["nu"], best["length_scale"], best["sigma2"]
        )
    )


def test_torus_tune_minimizes_aic(dataset):
    rgd = dataset["rgd"]
    result = torus_tune(rgd, dataset["temp_forecast"], [0, 1], [0, 1, 2, 3])
    assert list(result.table.columns) == ["n_d", "n_w", "rss", "k", "aic"]
    assert result.score == pytest.approx(result.table["aic"].min())
    # Demand follows the weekly profile, so weekly harmonics must be selected
    assert result.best["n_w"] >= 1


def test_torus_tune_recovers_exact_harmonics(torus_data):
    rgd, temperature, _ = torus_data(1, 3)
    result = torus_tune(rgd, temperature, range(5), range(5))
    assert result.best == {"n_d": 1, "n_w": 3}


def test_torus_tune_recovers_harmonics_under_noise(torus_data):
    rgd, temperature, _ = torus_data(1, 3, noise=0.001, seed=3)
    result = torus_tune(rgd, temperature, [0, 1], [0, 1, 2, 3])
    assert result.best == {"n_d": 1, "n_w": 3}


def test_torus_tune_single_point(torus_data):
    rgd, temperature, _ = torus_data(0, 1)
    assert torus_tune(rgd, temperature, [0], [0]).best == {"n_d": 0, "n_w": 0}


def test_ridge_prefers_least_regularization_on_noiseless_data(train):
    beta = np.linspace(-1.0, 1.0, train.p)
    exact = replace(train, y=train.X @ beta + 30.0)
    grid = GridSpec({"lam": [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0]})
    result = kfold_grid_search("ridge", exact, grid)
    assert result.best["lam"] == 1e-4
