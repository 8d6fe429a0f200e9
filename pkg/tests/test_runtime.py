import numpy as np
import pytest

from qsvdsim import (
    DataMatrix,
    RuntimeParams,
    compute_mu,
    compute_svd,
    cost_report,
    estimate_delta,
    sve_round,
    thresholding_epsilon,
)
from qsvdsim.errors import IncompleteParamsError, InfeasibleBudgetError
from qsvdsim.runtime import cost_report_csv


def test_mu_scalar_matrix():
    res = compute_mu(DataMatrix.from_values(np.array([[-2.5]])))
    assert res.mu == pytest.approx(2.5)


def test_mu_row_orthonormal_padded():
    rng = np.random.default_rng(1)
    k, m = 3, 8
    v, _ = np.linalg.qr(rng.normal(size=(m, k)))
    padded = np.vstack([v.T, np.zeros((m - k, m))])
    res = compute_mu(DataMatrix.from_values(padded))
    assert res.mu <= np.sqrt(k) + 1e-9


def test_mu_never_exceeds_frobenius():
    rng = np.random.default_rng(2)
    for _ in range(20):
        m = DataMatrix.from_values(rng.normal(size=(6, 9)))
        assert compute_mu(m).mu <= m.frobenius + 1e-9


def test_mu_winner_reporting():
    # a dense well-spread matrix: the Frobenius norm is the usual winner
    rng = np.random.default_rng(3)
    m = DataMatrix.from_values(rng.normal(size=(30, 20)) / 10.0)
    res = compute_mu(m)
    if res.winner == "frobenius":
        assert res.mu == pytest.approx(m.frobenius)


def test_thresholding_epsilon_rules():
    assert thresholding_epsilon([4.0, 3.0], 1, "half_gap") == pytest.approx(0.5)
    assert thresholding_epsilon([4.0, 3.0], 1, "full_gap") == pytest.approx(1.0)
    assert thresholding_epsilon([4.0, 3.0], 2) == pytest.approx(1.5)  # k = count: sigma_k / 2
    with pytest.warns(UserWarning, match="zero gap"):
        assert thresholding_epsilon([3.0, 3.0], 1) == 0.0


def test_thresholding_epsilon_never_merges_boundary():
    rng = np.random.default_rng(4)
    for trial in range(40):
        r = int(rng.integers(3, 10))
        sig = np.sort(rng.uniform(0.05, 1.0, size=r))[::-1]
        qu, _ = np.linalg.qr(rng.normal(size=(r + 2, r)))
        qv, _ = np.linalg.qr(rng.normal(size=(r + 2, r)))
        s = compute_svd(DataMatrix.from_values((qu * sig) @ qv.T))
        k = int(rng.integers(1, r))
        if s.sigmas[k - 1] - s.sigmas[k] <= 1e-9:
            continue
        eps = thresholding_epsilon(s.sigmas, k, "half_gap")
        spectrum = sve_round(s, eps)
        assert spectrum.value_of(k - 1) > spectrum.value_of(k)


def test_estimate_delta_inversion():
    k = 4
    assert estimate_delta(np.sqrt(k) * (0.05 + 0.1), k, 0.05) == pytest.approx(0.1)
    with pytest.raises(InfeasibleBudgetError):
        estimate_delta(0.0, 4, 0.05)
    # spectral norm folded in for unnormalized data
    assert estimate_delta(np.sqrt(k) * (0.05 + 0.2), k, 0.05, spectral=2.0) == pytest.approx(0.1)


def test_estimate_delta_round_trip_with_us_bound():
    from qsvdsim import bound_us

    # inverting the budget at the published MNIST numbers recovers delta
    k, eps, xi = 59, 0.0030, 0.8864
    delta = estimate_delta(xi, k, eps, spectral=1.0)
    assert delta == pytest.approx(0.1124, abs=1e-4)
    loose = bound_us(np.full(k, 1.0), eps, delta)[1]
    assert loose <= xi + 1e-9


def mnist_style_params(**overrides):
    base = dict(
        mu=3.2032,
        best_p=1.0,
        spectral=1.0,
        frobenius=3.2032,
        theta=0.1564,
        thresholding_eps=0.0030,
        k=59,
        p=0.858,
        delta=0.1124,
        gamma=0.0316,
        n=70000,
        m=784,
        eta=0.1,
        r=784,
    )
    base.update(overrides)
    return RuntimeParams(**base)


def test_cost_report_extraction_dominates_sampling():
    rows = {r.routine: r.value for r in cost_report(mnist_style_params())}
    assert rows["topk-extraction-left-l2"] > rows["factor-score-sampling"]
    assert rows["topk-extraction-right-l2"] > rows["factor-score-sampling"]
    assert rows["topk-extraction-linf"] < rows["topk-extraction-left-l2"]


def test_cost_report_delta_limit():
    huge_delta = mnist_style_params(delta=1e9)
    rows = {r.routine: r.value for r in cost_report(huge_delta)}
    assert rows["topk-extraction-left-l2"] < 1e-3


def test_cost_report_missing_field():
    with pytest.raises(IncompleteParamsError):
        cost_report(mnist_style_params(delta=0.0))


def test_cost_report_ladder_and_crossover():
    rows = cost_report(mnist_style_params(), ladder=[10**3, 10**6, 10**9, 10**12])
    classical = [r.value for r in rows if r.routine.startswith("ladder-classical")]
    assert classical == sorted(classical)
    cross = [r for r in rows if r.routine == "ladder-crossover"]
    assert len(cross) == 1
    quantum = next(r.value for r in rows if r.routine.startswith("ladder-quantum"))
    if np.isfinite(cross[0].value):
        n_star = int(cross[0].value)
        base = n_star * 784 * 59 * np.log(784 / 0.0030) / np.sqrt(0.0030)
        assert quantum < base


def test_cost_report_csv_shape():
    text = cost_report_csv(cost_report(mnist_style_params()))
    lines = text.strip().split("\n")
    assert lines[0].startswith("#")
    assert lines[1] == "routine,expression,value"
    assert all(line.count(",") >= 2 for line in lines[2:])


def test_runtime_params_validation():
    with pytest.raises(ValueError):
        mnist_style_params(theta=0.001)  # theta below the thresholding eps
    with pytest.raises(ValueError):
        mnist_style_params(mu=10.0)  # mu above the Frobenius norm
    rp = mnist_style_params(xi=None)
    assert rp.resolved_xi() == pytest.approx(np.sqrt(59) * (0.0030 + 0.1124))
    assert rp.resolved_r() == 784
