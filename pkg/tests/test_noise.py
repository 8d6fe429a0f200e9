import numpy as np
import pytest

from qsvdsim import (
    NoiseSpec,
    amplitude_estimate,
    derive_seed,
    perturb_matrix_frobenius,
    state_distance,
    tomography_noise,
)
from qsvdsim.errors import NormalizationError, UndefinedStateError


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_derive_seed_deterministic_and_label_sensitive():
    assert derive_seed(7, "a") == derive_seed(7, "a")
    assert derive_seed(7, "a") != derive_seed(7, "b")
    assert derive_seed(7, "a") != derive_seed(8, "a")


def test_tomography_zero_delta_is_identity():
    v = unit([1.0, 2.0, -3.0])
    assert np.array_equal(tomography_noise(v, 0.0, "l2", seed=1), v)
    assert np.array_equal(tomography_noise(v, 0.0, "linf", seed=1), v)


def test_tomography_l2_bound_and_orientation():
    v = np.array([1.0, 0.0])
    out = tomography_noise(v, 0.1, "l2", seed=3)
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(v - out) <= 0.1
    assert out[0] > 0


def test_tomography_l2_exercises_the_budget():
    delta = 0.05
    devs = []
    for seed in range(1000):
        v = unit(np.random.default_rng(seed).normal(size=6))
        out = tomography_noise(v, delta, "l2", seed=seed)
        devs.append(np.linalg.norm(v - out))
    devs = np.array(devs)
    assert devs.max() <= delta + 1e-12
    assert 0.045 <= devs.max() <= 0.05
    assert devs.min() >= 0.9 * delta - 1e-9


def test_tomography_linf_bound_support_and_orientation():
    rng = np.random.default_rng(2)
    delta = 0.08
    for seed in range(200):
        v = np.zeros(12)
        nz = rng.integers(2, 9)
        v[:nz] = rng.normal(size=nz)
        v = unit(v)
        out = tomography_noise(v, delta, "linf", seed=seed)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(v - out)) <= delta + 1e-12
        assert v @ out > 0
        assert np.array_equal(out[np.abs(v) == 0], np.zeros(12 - nz))
        # support-restricted perturbation keeps the l2 error under delta*sqrt(z)
        assert np.linalg.norm(v - out) <= delta * np.sqrt(nz) + 1e-12


def test_tomography_rejects_non_unit_input():
    with pytest.raises(NormalizationError):
        tomography_noise(np.array([1.0, 1.0]), 0.1, "l2", seed=0)


def test_amplitude_estimate_modes():
    assert amplitude_estimate(0.64, mode="exact") == 0.64
    for seed in range(200):
        val = amplitude_estimate(0.64, 0.05, "additive", seed=seed)
        assert 0.59 <= val <= 0.69
        rel = amplitude_estimate(0.64, 0.1, "relative", seed=seed)
        assert 0.64 * 0.9 <= rel <= 0.64 * 1.1
    assert amplitude_estimate(0.0, 0.1, "relative", seed=5) == 0.0
    assert amplitude_estimate(0.99, 1.0, "additive", seed=0) <= 1.0


def test_perturb_matrix_zero_xi_identity():
    m = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(perturb_matrix_frobenius(m, 0.0, seed=4), m)


def test_perturb_matrix_hard_bound():
    rng = np.random.default_rng(6)
    m = rng.normal(size=(100, 100))
    for seed in range(50):
        pert = perturb_matrix_frobenius(m, 0.1, seed=seed)
        assert np.linalg.norm(pert - m) <= 0.1


def test_perturb_matrix_error_distribution_shape():
    # the realized error concentrates near the bound / sqrt(3), i.e. about
    # half the budget, and the trial distribution is unimodal
    m = np.zeros((40, 40))
    errs = np.array(
        [np.linalg.norm(perturb_matrix_frobenius(m, 0.1, seed=s) - m) for s in range(2000)]
    )
    assert errs.max() <= 0.1
    assert 0.4 * 0.1 <= errs.mean() <= 0.7 * 0.1
    hist, _ = np.histogram(errs, bins=10)
    assert np.argmax(hist) not in (0, 9)


def test_state_distance_identity():
    d = state_distance(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
    assert d.raw == 0.0 and d.normalized_state == 0.0
    assert d.bound_holds and d.angle_ok


def test_state_distance_unit_pair():
    d = state_distance(np.array([1.0, 0.0]), np.array([0.8, 0.6]))
    assert d.raw == pytest.approx(np.sqrt(0.4))
    assert d.normalized_state == pytest.approx(d.raw)
    assert d.bound_holds


def test_state_distance_scaled_pair():
    d = state_distance(np.array([2.0, 0.0]), np.array([2.0, 0.2]))
    assert d.raw == pytest.approx(0.2)
    assert d.claim_bound == pytest.approx(np.sqrt(2) * 0.1)
    assert d.normalized_state == pytest.approx(0.09962, abs=1e-4)
    assert d.bound_holds


def test_state_distance_zero_vector_rejected():
    with pytest.raises(UndefinedStateError):
        state_distance(np.zeros(3), np.array([1.0, 0.0, 0.0]))


def test_state_distance_claim_property():
    rng = np.random.default_rng(123)
    checked = 0
    while checked < 10_000:
        x = rng.normal(size=4)
        if np.linalg.norm(x) < 1e-6:
            continue
        xbar = x + rng.normal(scale=0.3, size=4)
        if np.linalg.norm(xbar) < 1e-9 or x @ xbar <= 0:
            continue  # the claim assumes an angle below pi/2
        d = state_distance(x, xbar)
        assert d.bound_holds
        checked += 1


def test_noise_spec_dispatch_and_zero_magnitude():
    v = unit([0.0, 1.0, 1.0])
    spec = NoiseSpec("tomography_l2", 0.0, seed=9)
    assert np.array_equal(spec.apply(v), v)
    assert NoiseSpec("amplitude_additive", 0.0).apply(0.3) == 0.3
    m = np.ones((3, 3))
    assert np.array_equal(NoiseSpec("matrix_frobenius", 0.0).apply(m), m)
    out = NoiseSpec("tomography_linf", 0.05, seed=2).apply(v)
    assert np.max(np.abs(out - v)) <= 0.05
    with pytest.raises(ValueError):
        NoiseSpec("bogus", 0.1)


def test_adversarial_hooks_sit_on_the_boundary():
    v = unit([1.0, 2.0, 2.0])
    out = tomography_noise(v, 0.2, "l2", seed=3, adversarial=True)
    assert np.linalg.norm(v - out) == pytest.approx(0.2, abs=1e-12)
    assert amplitude_estimate(0.3, 0.05, "additive", adversarial=True) == pytest.approx(0.35)
    assert amplitude_estimate(0.9, 0.05, "additive", adversarial=True) == pytest.approx(0.85)
    assert amplitude_estimate(0.4, 0.1, "relative", adversarial=True) == pytest.approx(0.44)
