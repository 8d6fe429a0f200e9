"""Independent naive reference implementations used by equivalence tests.

Everything here is written as plain loops from first principles, so the
vectorized library code has something genuinely independent to agree with.
"""

from __future__ import annotations

import math

import numpy as np

from qsvdsim.experiments import stratified_folds


def naive_rounded_values(sigmas, eps: float) -> list[float]:
    """Grid rounding, reimplemented: round(sigma * 2^b) / 2^b, b = ceil(log2(1/eps))."""
    b = math.ceil(math.log2(1.0 / eps))
    out = []
    for s in sigmas:
        cell = round(float(s) * (1 << b))
        out.append(cell / (1 << b))
    return out


def naive_count_retained(sigmas, eps: float, theta: float) -> int:
    return sum(1 for v in naive_rounded_values(sigmas, eps) if v >= theta)


def naive_mass_retained(sigmas, eps: float, theta: float) -> float:
    total = sum(float(s) ** 2 for s in sigmas)
    kept = 0.0
    for s, v in zip(sigmas, naive_rounded_values(sigmas, eps)):
        if v >= theta:
            kept += float(s) ** 2
    return kept / total


def naive_knn_cv(X, labels, neighbors: int, folds: int, seed: int) -> float:
    """Quadratic-loop k-NN CV with the documented tie rules: distance ties
    go to the lowest training index, vote ties to the lowest class label."""
    assignment = stratified_folds(labels, folds, seed)
    classes = sorted(set(np.asarray(labels).tolist()))
    fold_accs = []
    for f in range(folds):
        test_idx = [i for i in range(len(labels)) if assignment[i] == f]
        train_idx = [i for i in range(len(labels)) if assignment[i] != f]
        correct = 0
        for i in test_idx:
            scored = []
            for pos, j in enumerate(train_idx):
                d = 0.0
                for c in range(X.shape[1]):
                    d += (X[i, c] - X[j, c]) ** 2
                scored.append((d, pos, labels[j]))
            scored.sort(key=lambda t: (t[0], t[1]))
            votes = [t[2] for t in scored[:neighbors]]
            best, best_count = None, -1
            for cls in classes:
                count = votes.count(cls)
                if count > best_count:
                    best, best_count = cls, count
            if best == labels[i]:
                correct += 1
        fold_accs.append(correct / len(test_idx))
    return float(np.mean(fold_accs))
