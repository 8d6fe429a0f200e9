"""Experiment drivers: k-NN cross-validation, accuracy-vs-error sweeps and
factor-score-ratio distribution reports.

Everything here is deterministic given a seed. Tie handling in the k-NN
classifier is fully specified (distance ties to the lowest sample index,
vote ties to the lowest class label) so results are reproducible bit for
bit and a naive reference implementation can match them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import StratificationError
from .noise import derive_seed, perturb_matrix_frobenius
from .oracle import SvdModel


def stratified_folds(labels: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Class-proportional fold assignment; every class needs >= folds samples."""
    labels = np.asarray(labels)
    if folds < 2:
        raise ValueError("folds must be at least 2")
    rng = np.random.default_rng(seed)
    assignment = np.empty(labels.size, dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if idx.size < folds:
            raise StratificationError(
                f"class {cls!r} has {idx.size} samples, fewer than {folds} folds"
            )
        idx = idx[rng.permutation(idx.size)]
        assignment[idx] = np.arange(idx.size) % folds
    return assignment


def _knn_predict(
    train_x: np.ndarray,
    train_y: np.ndarray,
    test_x: np.ndarray,
    neighbors: int,
    classes: np.ndarray,
    chunk: int = 512,
) -> np.ndarray:
    """Euclidean majority vote with deterministic tie rules."""
    train_sq = np.sum(train_x**2, axis=1)
    code_of = {c: i for i, c in enumerate(classes)}
    train_codes = np.array([code_of[c] for c in train_y])
    n_train = train_x.shape[0]
    out = np.empty(test_x.shape[0], dtype=train_codes.dtype)
    for start in range(0, test_x.shape[0], chunk):
        block = test_x[start : start + chunk]
        d2 = np.sum(block**2, axis=1)[:, None] - 2.0 * block @ train_x.T + train_sq[None, :]
        if n_train <= 4096:
            order = np.argsort(d2, axis=1, kind="stable")[:, :neighbors]
        else:
            # partition down to a margin, then stable-order the candidates so
            # distance ties still resolve to the lowest training index
            margin = min(neighbors + 32, n_train)
            cand = np.argpartition(d2, margin - 1, axis=1)[:, :margin]
            cand_d = np.take_along_axis(d2, cand, axis=1)
            refine = np.lexsort((cand, cand_d), axis=1)[:, :neighbors]
            order = np.take_along_axis(cand, refine, axis=1)
        votes = train_codes[order]
        for row, v in enumerate(votes):
            counts = np.bincount(v, minlength=classes.size)
            out[start + row] = int(np.argmax(counts))  # lowest label wins ties
    return classes[out]


@dataclass(frozen=True)
class KnnResult:
    accuracy: float
    per_fold: tuple[float, ...]


def knn_cv(
    X: np.ndarray,
    labels: np.ndarray,
    neighbors: int = 7,
    folds: int = 10,
    seed: int = 0,
    stratified: bool = True,
) -> KnnResult:
    """k-nearest-neighbor accuracy under seeded cross-validation.

    Folds are stratified by default; accuracy is the mean of the per-fold
    accuracies.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    if neighbors < 1:
        raise ValueError("neighbors must be at least 1")
    if X.shape[0] != labels.size:
        raise ValueError("label count does not match the number of rows")
    if stratified:
        assignment = stratified_folds(labels, folds, seed)
    else:
        rng = np.random.default_rng(seed)
        assignment = rng.permutation(labels.size) % folds
    classes = np.unique(labels)
    per_fold = []
    for f in range(folds):
        test = assignment == f
        pred = _knn_predict(X[~test], labels[~test], X[test], neighbors, classes)
        per_fold.append(float(np.mean(pred == labels[test])))
    return KnnResult(accuracy=float(np.mean(per_fold)), per_fold=tuple(per_fold))


@dataclass(frozen=True)
class SweepRow:
    xi: float
    observed_error: float  # mean realized Frobenius deviation over trials
    mean_accuracy: float
    std_accuracy: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    benchmark_accuracy: float
    spearman_rho: float
    spearman_pvalue: float

    def csv(self) -> str:
        lines = ["xi,observed_error,mean_accuracy,std_accuracy"]
        for r in self.rows:
            lines.append(
                f"{r.xi:.17g},{r.observed_error:.17g},"
                f"{r.mean_accuracy:.17g},{r.std_accuracy:.17g}"
            )
        return "\n".join(lines) + "\n"


def accuracy_vs_error_sweep(
    representation: np.ndarray,
    labels: np.ndarray,
    xi_grid,
    trials: int = 3,
    neighbors: int = 7,
    folds: int = 10,
    seed: int = 0,
) -> SweepResult:
    """Classification accuracy as Frobenius error is injected into a representation.

    Each grid point perturbs the representation ``trials`` times within the
    budget xi and reruns the cross-validation. The xi = 0 row reproduces
    the benchmark accuracy exactly. The Spearman statistic over (xi, mean
    accuracy) quantifies the expected downward trend.
    """
    xi_grid = sorted(float(x) for x in xi_grid)
    if not xi_grid:
        raise ValueError("xi grid must be nonempty")
    representation = np.asarray(representation, dtype=np.float64)
    benchmark = knn_cv(representation, labels, neighbors, folds, seed).accuracy
    rows = []
    for xi in xi_grid:
        accs, errs = [], []
        for t in range(trials):
            pert = perturb_matrix_frobenius(
                representation, xi, derive_seed(seed, f"sweep-{xi!r}-{t}")
            )
            errs.append(float(np.linalg.norm(pert - representation)))
            accs.append(knn_cv(pert, labels, neighbors, folds, seed).accuracy)
        rows.append(
            SweepRow(
                xi=xi,
                observed_error=float(np.mean(errs)),
                mean_accuracy=float(np.mean(accs)),
                std_accuracy=float(np.std(accs)),
            )
        )
    acc = [r.mean_accuracy for r in rows]
    if len(rows) > 2 and len(set(acc)) > 1:
        rho, pval = stats.spearmanr(xi_grid, acc)
    else:
        rho, pval = float("nan"), float("nan")
    return SweepResult(
        rows=tuple(rows),
        benchmark_accuracy=benchmark,
        spearman_rho=float(rho),
        spearman_pvalue=float(pval),
    )


def fsr_distribution_csv(s: SvdModel) -> str:
    """Rows of (rank index, sigma, factor score, ratio, cumulative ratio)."""
    ratios = s.factor_score_ratios()
    cum = np.cumsum(ratios)
    lines = ["index,sigma,factor_score,ratio,cumulative"]
    for i in range(s.rank):
        lines.append(
            f"{i + 1},{s.sigmas[i]:.17g},{s.sigmas[i] ** 2:.17g},"
            f"{ratios[i]:.17g},{cum[i]:.17g}"
        )
    return "\n".join(lines) + "\n"


def fsr_distribution_report(s: SvdModel, out_path: str | Path) -> Path:
    """Write the factor-score-ratio distribution to a CSV file."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(fsr_distribution_csv(s))
    return out_path
