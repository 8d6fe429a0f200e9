import numpy as np
import pytest

from qsvdsim import bound_du, bound_us, bound_us_half, bound_us_inv, verify_bound
from qsvdsim.noise import tomography_noise


def test_bound_us_values():
    assert bound_us([4.0, 3.0], 0.0, 0.0) == (0.0, 0.0)
    tight, loose = bound_us([4.0, 3.0], 0.1, 0.01)
    assert tight == pytest.approx(np.sqrt(0.14**2 + 0.13**2))
    assert tight == pytest.approx(0.1910, abs=5e-4)
    assert loose == pytest.approx(np.sqrt(2) * 0.14)
    assert tight <= loose


def test_bound_us_table_one_style_inputs():
    # k = 59 unit-spectral values with eps = 0.0030 and delta = 0.1124
    _, loose = bound_us(np.full(59, 1.0), 0.0030, 0.1124)
    assert loose == pytest.approx(np.sqrt(59) * 0.1154, rel=1e-6)
    assert loose == pytest.approx(0.8864, abs=5e-4)


def test_bound_du_values():
    assert bound_du(2.0, 0.0, 4) == 0.0
    assert bound_du(2.0, 0.1, 4) == pytest.approx(0.4)
    # uniform marginals 1/4: ||diag(1/sqrt(p))||_F = sqrt(sum 1/p) = 4
    marg = np.full(4, 0.25)
    fro = float(np.linalg.norm(1.0 / np.sqrt(marg)))
    assert fro == pytest.approx(4.0)
    assert bound_du(fro, 0.1, 4) == pytest.approx(4 * 2 * 0.1)


def test_bound_us_half_values():
    assert bound_us_half([4.0], 0.0, 0.0, 4.0) == (0.0, 0.0)
    tight, loose = bound_us_half([4.0], 0.2, 0.1, 4.0)
    assert tight == pytest.approx(0.25)
    assert loose == pytest.approx(0.25)
    with pytest.raises(ValueError):
        bound_us_half([4.0], 0.1, 0.1, 0.0)
    with pytest.raises(ValueError):
        bound_us_half([1.0, 0.5], 0.1, 0.1, 0.8)  # sigma below theta refused


def test_bound_us_half_grows_as_theta_shrinks():
    prev = 0.0
    for theta in (1.0, 0.1, 0.01):
        val = bound_us_half([4.0], 0.2, 0.0, theta)[0]
        assert val > prev
        prev = val


def test_bound_us_inv_values():
    assert bound_us_inv(1e-12, 0.0, 2.0, 3) == pytest.approx(0.0, abs=1e-11)
    assert bound_us_inv(0.2, 0.1, 2.0, 1) == pytest.approx(0.05 + 0.2 / 3.6)
    with pytest.raises(ValueError):
        bound_us_inv(2.0, 0.1, 2.0, 1)


def test_tight_bounds_never_exceed_loose():
    rng = np.random.default_rng(21)
    for _ in range(200):
        k = int(rng.integers(1, 8))
        sig = np.sort(rng.uniform(0.2, 3.0, size=k))[::-1]
        eps, delta = rng.uniform(0, 0.3), rng.uniform(0, 0.3)
        tight, loose = bound_us(sig, eps, delta)
        assert tight <= loose + 1e-12
        theta = float(sig.min())
        tight_h, loose_h = bound_us_half(sig, eps, delta, theta)
        assert tight_h <= loose_h + 1e-12


def test_verify_bound_reports():
    a = np.zeros((3, 3))
    assert verify_bound(a, a, 0.0, "identity").holds
    rng = np.random.default_rng(13)
    exact = rng.normal(size=(10, 5))
    noise = rng.normal(size=(10, 5))
    approx = exact + 0.5 * noise / np.linalg.norm(noise)
    report = verify_bound(exact, approx, 0.4, "constructed-violation")
    assert report.observed_error == pytest.approx(0.5)
    assert not report.holds
    with pytest.raises(ValueError):
        verify_bound(np.zeros((2, 2)), np.zeros((3, 2)), 1.0, "shape")


def test_verify_bound_csv_row():
    row = verify_bound(np.zeros((2, 2)), np.zeros((2, 2)), 0.0, "zero").csv_row()
    assert row.split(",")[0] == "zero"
    assert row.split(",")[-1] == "1"


def test_us_bound_holds_under_injected_noise():
    rng = np.random.default_rng(99)
    for trial in range(200):
        k = int(rng.integers(1, 5))
        sig = np.sort(rng.uniform(0.5, 3.0, size=k))[::-1]
        q, _ = np.linalg.qr(rng.normal(size=(8, k)))
        eps, delta = float(rng.uniform(0.001, 0.2)), float(rng.uniform(0.001, 0.2))
        sig_bar = sig + rng.choice([-eps, eps], size=k)
        u_bar = np.column_stack(
            [tomography_noise(q[:, j], delta, "l2", seed=1000 * trial + j) for j in range(k)]
        )
        report = verify_bound(
            q * sig, u_bar * sig_bar, bound_us(sig, eps, delta)[0], "us-noise"
        )
        assert report.holds, report
