import numpy as np
import pytest

from qsvdsim import DataMatrix, compute_svd, knn_cv
from qsvdsim.errors import StratificationError
from qsvdsim.experiments import (
    accuracy_vs_error_sweep,
    fsr_distribution_csv,
    stratified_folds,
)


def blobs(n_per_class, centers, spread, seed):
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for label, center in enumerate(centers):
        xs.append(rng.normal(size=(n_per_class, len(center))) * spread + np.asarray(center))
        ys.extend([label] * n_per_class)
    return np.vstack(xs), np.array(ys)


def test_knn_separable_blobs():
    X, y = blobs(40, [(0.0, 0.0), (10.0, 10.0)], 0.5, seed=0)
    res = knn_cv(X, y, neighbors=1, folds=5, seed=0)
    assert res.accuracy > 0.99
    assert len(res.per_fold) == 5


def test_knn_chance_level_on_shuffled_labels():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(600, 8))
    y = np.repeat(np.arange(10), 60)
    res = knn_cv(X, y, neighbors=7, folds=10, seed=2)
    assert abs(res.accuracy - 0.1) < 0.03


def test_knn_deterministic():
    X, y = blobs(30, [(0, 0), (3, 3), (0, 4)], 1.0, seed=3)
    a = knn_cv(X, y, neighbors=7, folds=5, seed=9)
    b = knn_cv(X, y, neighbors=7, folds=5, seed=9)
    assert a == b


def test_stratified_folds_proportional():
    y = np.repeat([0, 1], [40, 20])
    folds = stratified_folds(y, 4, seed=5)
    for f in range(4):
        assert np.sum((folds == f) & (y == 0)) == 10
        assert np.sum((folds == f) & (y == 1)) == 5


def test_stratification_error_small_class():
    y = np.array([0, 0, 0, 1])
    with pytest.raises(StratificationError):
        stratified_folds(y, 3, seed=0)


def test_knn_matches_naive_reference_exactly():
    from reference import naive_knn_cv

    X, y = blobs(50, [(0, 0), (2, 2), (4, 0), (0, 4)], 1.2, seed=7)
    assert X.shape[0] == 200
    fast = knn_cv(X, y, neighbors=7, folds=5, seed=11).accuracy
    slow = naive_knn_cv(X, y, neighbors=7, folds=5, seed=11)
    assert fast == slow


def test_sweep_zero_xi_equals_benchmark():
    X, y = blobs(30, [(0, 0), (4, 4)], 1.0, seed=13)
    res = accuracy_vs_error_sweep(X, y, xi_grid=[0.0, 1.0], trials=2, folds=5, seed=1)
    assert res.rows[0].xi == 0.0
    assert res.rows[0].mean_accuracy == res.benchmark_accuracy
    assert res.rows[0].observed_error == 0.0


def test_sweep_degrades_with_large_noise():
    X, y = blobs(40, [(0, 0, 0), (1.5, 1.5, 1.5)], 0.4, seed=17)
    scale = np.linalg.norm(X)
    res = accuracy_vs_error_sweep(
        X, y, xi_grid=[0.0, 0.5 * scale, 2.0 * scale, 8.0 * scale],
        trials=2, folds=5, seed=3,
    )
    assert res.rows[-1].mean_accuracy < res.benchmark_accuracy
    assert res.spearman_rho < 0


def test_fsr_distribution_rows():
    s = compute_svd(DataMatrix.from_values(np.diag([4.0, 3.0])))
    lines = fsr_distribution_csv(s).strip().split("\n")
    assert lines[0] == "index,sigma,factor_score,ratio,cumulative"
    assert len(lines) == 3
    last = lines[2].split(",")
    assert float(last[4]) == pytest.approx(1.0)
    first = lines[1].split(",")
    assert float(first[3]) == pytest.approx(0.64)

    rank1 = compute_svd(DataMatrix.from_values(np.outer([2.0, 0.0], [1.0, 0.0])))
    lines = fsr_distribution_csv(rank1).strip().split("\n")
    assert len(lines) == 2
    assert float(lines[1].split(",")[4]) == pytest.approx(1.0)
