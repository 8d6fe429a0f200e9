import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synthetic import load_mnist, make_preprocessed, mnist_dir  # noqa: E402

from qsvdsim import DataMatrix, SvdModel, compute_svd, exact_selection  # noqa: E402


@dataclass(frozen=True)
class Dataset:
    """A preprocessed matrix with labels and its Table-1-style expectations."""

    name: str
    matrix: DataMatrix
    labels: np.ndarray
    svd: SvdModel
    exact_k: int
    exact_p: float
    p_tol: float
    theta: float
    theta_tol: float
    frobenius: float
    frobenius_tol: float
    thresholding_eps: float
    k_hat_band: tuple[int, int]


def _mnist_dataset(d: Path) -> Dataset:
    from qsvdsim import preprocess
    from qsvdsim.runtime import thresholding_epsilon

    raw, labels = load_mnist(d)
    m = preprocess(raw, center=True, spectral_normalize=True)
    s = compute_svd(m)
    sel = exact_selection(s, 0.85)
    return Dataset(
        name="mnist",
        matrix=m,
        labels=labels,
        svd=s,
        exact_k=59,
        exact_p=0.8580,
        p_tol=0.001,
        theta=0.1564,
        theta_tol=0.002,
        frobenius=3.2032,
        frobenius_tol=0.005,
        thresholding_eps=thresholding_epsilon(s.sigmas, sel.k, "full_gap"),
        k_hat_band=(54, 64),
    )


def _synthetic_dataset() -> Dataset:
    from qsvdsim.runtime import thresholding_epsilon

    m, labels = make_preprocessed()
    s = compute_svd(m)
    sel = exact_selection(s, 0.85)
    # frozen oracle values for the seeded generator (seed 11)
    return Dataset(
        name="synthetic",
        matrix=m,
        labels=labels,
        svd=s,
        exact_k=22,
        exact_p=0.8501603367,
        p_tol=1e-6,
        theta=0.2759974708,
        theta_tol=0.002,
        frobenius=2.7039652477,
        frobenius_tol=1e-6,
        thresholding_eps=thresholding_epsilon(s.sigmas, sel.k, "full_gap"),
        k_hat_band=(17, 27),
    )


@pytest.fixture(scope="session")
def dataset() -> Dataset:
    d = mnist_dir()
    if d is not None:
        return _mnist_dataset(d)
    return _synthetic_dataset()
