"""Seeded stochastic injectors standing in for quantum readout.

Tomography, amplitude estimation and the matrix-perturbation experiment are
all modeled as bounded noise on exactly computed quantities. The readout
primitives being simulated promise only error bounds, not distributions, so the shapes
here are a choice: bounded tangent perturbations for tomography and uniform
noise for amplitude estimation. Tomography pushes the error close to its
budget on purpose, so downstream bound checks are exercised near equality
rather than with cosmetically tiny noise.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import NormalizationError, UndefinedStateError

# Fraction of the budget the injected error is pushed up to.
_BUDGET_FLOOR = 0.9


def derive_seed(master: int, label: str) -> int:
    """Deterministic, platform-independent child seed for (master, label)."""
    digest = hashlib.sha256(f"{master}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


@dataclass(frozen=True)
class NoiseSpec:
    """A noise kind with its magnitude (delta, eta or xi) and seed.

    Magnitude zero always yields the identity transformation.
    """

    kind: str  # tomography_l2 | tomography_linf | amplitude_additive |
    #            amplitude_relative | matrix_frobenius
    magnitude: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.magnitude < 0:
            raise ValueError("noise magnitude must be >= 0")
        kinds = (
            "tomography_l2",
            "tomography_linf",
            "amplitude_additive",
            "amplitude_relative",
            "matrix_frobenius",
        )
        if self.kind not in kinds:
            raise ValueError(f"unknown noise kind: {self.kind!r}")

    def apply(self, x):
        """Dispatch to the injector matching ``kind``."""
        if self.kind == "tomography_l2":
            return tomography_noise(x, self.magnitude, "l2", self.seed)
        if self.kind == "tomography_linf":
            return tomography_noise(x, self.magnitude, "linf", self.seed)
        if self.kind == "amplitude_additive":
            mode = "exact" if self.magnitude == 0 else "additive"
            return amplitude_estimate(x, self.magnitude, mode, self.seed)
        if self.kind == "amplitude_relative":
            mode = "exact" if self.magnitude == 0 else "relative"
            return amplitude_estimate(x, self.magnitude, mode, self.seed)
        return perturb_matrix_frobenius(x, self.magnitude, self.seed)


def _linf_noise(v: np.ndarray, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Unit vector within linf distance delta of v, perturbed only on supp(v).

    Restricting the perturbation to the support keeps the l2 error below
    delta * sqrt(nnz(v)), which is the sparse-vector speedup the linf
    readout guarantee is used for.
    """
    support = np.flatnonzero(v)
    if support.size <= 1:
        return v.copy()
    target = delta * rng.uniform(_BUDGET_FLOOR, 1.0)

    def candidate(direction: np.ndarray, s: float) -> np.ndarray:
        out = v.copy()
        w = v[support] + s * direction
        out[support] = w / np.linalg.norm(w)
        return out

    for _ in range(8):
        g = rng.standard_normal(support.size)
        g -= (g @ v[support]) * v[support]
        gn = np.linalg.norm(g)
        if gn < 1e-12:
            continue
        g /= gn
        err = lambda s: float(np.max(np.abs(v - candidate(g, s))))
        s_hi = 1.0
        for _ in range(60):
            if err(s_hi) >= target:
                break
            s_hi *= 2.0
        else:
            continue  # this direction plateaus below the target; redraw
        s_lo = 0.0
        for _ in range(80):
            mid = 0.5 * (s_lo + s_hi)
            if err(mid) < target:
                s_lo = mid
            else:
                s_hi = mid
        # err(s_lo) < target <= delta by the bisection invariant
        return candidate(g, s_lo)
    # No direction reached the target; the largest reachable error still
    # respects the bound, so fall back to a plain capped perturbation.
    g = rng.standard_normal(support.size)
    g -= (g @ v[support]) * v[support]
    gn = np.linalg.norm(g)
    if gn < 1e-12:
        return v.copy()
    out = candidate(g / gn, 1.0)
    if float(np.max(np.abs(v - out))) <= delta:
        return out
    return v.copy()


def tomography_noise(
    v: np.ndarray, delta: float, norm: str = "l2", seed: int = 0, adversarial: bool = False
) -> np.ndarray:
    """Unit vector within ``delta`` of ``v`` in the requested norm.

    The error is pushed into [0.9*delta, delta] where the geometry allows,
    and the orientation is preserved (<v, v_bar> > 0) because the accuracy
    bounds downstream assume no sign flips. With ``adversarial`` the l2
    error sits exactly on the delta boundary (stress-test hook).
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise NormalizationError("tomography expects a 1-d state vector")
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise NormalizationError(f"input is not a unit vector: norm={np.linalg.norm(v)!r}")
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    if delta == 0.0 or v.size == 1:
        return v.copy()
    if norm not in ("l2", "linf"):
        raise ValueError(f"unknown norm: {norm!r}")

    rng = np.random.default_rng(seed)
    if norm == "linf":
        return _linf_noise(v, delta, rng)

    # l2: rotate by the exact angle that realizes the drawn error.
    t = delta if adversarial else delta * rng.uniform(_BUDGET_FLOOR, 1.0)
    for _ in range(8):
        g = rng.standard_normal(v.size)
        g -= (g @ v) * v
        gn = np.linalg.norm(g)
        if gn >= 1e-12:
            w = g / gn
            return (1.0 - t**2 / 2.0) * v + np.sqrt(t**2 - t**4 / 4.0) * w
    return v.copy()


def amplitude_estimate(
    p: float, eta: float = 0.0, mode: str = "additive", seed: int = 0, adversarial: bool = False
) -> float:
    """Probability estimate with additive or relative error at most eta.

    ``adversarial`` pins the error to the boundary of its band, away from
    the nearest clamp, instead of drawing it uniformly (stress-test hook).
    """
    if not -1e-12 <= p <= 1.0 + 1e-12:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    p = min(max(p, 0.0), 1.0)
    if mode == "exact":
        return p
    if eta <= 0:
        raise ValueError("eta must be positive unless mode is exact")
    if adversarial:
        u = eta if p <= 0.5 else -eta
    else:
        rng = np.random.default_rng(seed)
        u = float(rng.uniform(-eta, eta))
    if mode == "additive":
        return min(max(p + u, 0.0), 1.0)
    if mode == "relative":
        return min(max(p * (1.0 + u), 0.0), 1.0)
    raise ValueError(f"unknown mode: {mode!r}")


def perturb_matrix_frobenius(m: np.ndarray, xi: float, seed: int = 0) -> np.ndarray:
    """Entry-wise truncated standard Gaussian noise with a hard Frobenius cap.

    Each entry receives an independent draw from the standard normal
    truncated to [-xi/sqrt(nm), xi/sqrt(nm)], so ||M - M_bar||_F <= xi always.
    Note the truncation interval is tiny, so the effective variance is far
    below the nominal unit variance of the untruncated Gaussian.
    """
    m = np.asarray(m, dtype=np.float64)
    if xi < 0:
        raise ValueError("xi must be >= 0")
    if xi == 0.0:
        return m.copy()
    cap = xi / np.sqrt(m.size)
    rng = np.random.default_rng(seed)
    noise = stats.truncnorm.rvs(-cap, cap, loc=0.0, scale=1.0, size=m.shape, random_state=rng)
    return m + noise


@dataclass(frozen=True)
class StateDistance:
    """Raw and normalized-state distances with the sqrt(2)*eps/||x|| bound."""

    raw: float
    normalized_state: float
    claim_bound: float
    bound_holds: bool
    angle_ok: bool


def state_distance(x: np.ndarray, xbar: np.ndarray) -> StateDistance:
    """Distance between vectors and between their normalized states.

    ``claim_bound`` is sqrt(2) * ||x - xbar|| / ||x||; when the angle between
    the vectors is below pi/2 it upper-bounds the normalized-state distance.
    ``angle_ok`` is False when that hypothesis fails and the bound does not
    apply.
    """
    x = np.asarray(x, dtype=np.float64)
    xbar = np.asarray(xbar, dtype=np.float64)
    nx = float(np.linalg.norm(x))
    nbar = float(np.linalg.norm(xbar))
    if nx == 0.0:
        raise UndefinedStateError("x has zero norm, its state is undefined")
    if nbar == 0.0:
        raise UndefinedStateError("xbar has zero norm, its state is undefined")
    raw = float(np.linalg.norm(x - xbar))
    normalized = float(np.linalg.norm(x / nx - xbar / nbar))
    bound = float(np.sqrt(2.0)) * raw / nx
    return StateDistance(
        raw=raw,
        normalized_state=normalized,
        claim_bound=bound,
        bound_holds=normalized <= bound + 1e-12,
        angle_ok=float(x @ xbar) > 0.0,
    )
