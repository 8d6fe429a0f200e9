"""Closed-form evaluators for the error-propagation bounds, plus an
empirical checker that compares an observed deviation against a bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class BoundReport:
    bound_name: str
    analytic_bound: float
    observed_error: float
    holds: bool
    inputs: dict

    def csv_row(self) -> str:
        return (
            f"{self.bound_name},{self.analytic_bound:.17g},"
            f"{self.observed_error:.17g},{int(self.holds)}"
        )


def bound_us(sigmas, eps: float, delta: float) -> tuple[float, float]:
    """Frobenius error of a scaled singular basis U*Sigma (or V*Sigma).

    Returns the tight per-column form sqrt(sum_j (eps + delta*sigma_j)^2)
    and the loose form sqrt(k) * (eps + delta * sigma_max).
    """
    if eps < 0 or delta < 0:
        raise ValueError("eps and delta must be >= 0")
    sigmas = np.asarray(sigmas, dtype=np.float64)
    tight = float(np.sqrt(np.sum((eps + delta * sigmas) ** 2)))
    loose = float(np.sqrt(sigmas.size) * (eps + delta * sigmas.max(initial=0.0)))
    return tight, loose


def bound_du(d_inv_sqrt_frobenius: float, delta: float, k: int) -> float:
    """Frobenius error of D^{-1/2} U: ||D^{-1/2}||_F * sqrt(k) * delta."""
    if delta < 0 or d_inv_sqrt_frobenius < 0 or k < 0:
        raise ValueError("arguments must be >= 0")
    return d_inv_sqrt_frobenius * np.sqrt(k) * delta


def bound_us_half(sigmas, eps: float, delta: float, theta: float) -> tuple[float, float]:
    """Frobenius error of U*Sigma^{1/2}; requires every sigma >= theta > 0.

    Returns the tight form sqrt(sum_j (delta*sqrt(sigma_j) + eps/(2 sqrt(theta)))^2)
    and the loose sqrt(k) * (delta*sqrt(sigma_max) + eps/(2 sqrt(theta))).
    """
    if theta <= 0:
        raise ValueError("theta must be positive, the bound is singular at 0")
    if eps < 0 or delta < 0:
        raise ValueError("eps and delta must be >= 0")
    sigmas = np.asarray(sigmas, dtype=np.float64)
    if np.any(sigmas < theta):
        raise ValueError("every sigma must be >= theta for this bound to apply")
    per_col = delta * np.sqrt(sigmas) + eps / (2.0 * np.sqrt(theta))
    tight = float(np.sqrt(np.sum(per_col**2)))
    loose = float(
        np.sqrt(sigmas.size)
        * (delta * np.sqrt(sigmas.max(initial=0.0)) + eps / (2.0 * np.sqrt(theta)))
    )
    return tight, loose


def bound_us_inv(eps: float, delta: float, theta: float, k: int) -> float:
    """Frobenius error of U*Sigma^{-1}: sqrt(k)*(delta/theta + eps/(theta^2 - theta*eps)).

    Valid only for eps < theta; the inverse bound blows up at eps = theta.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if not 0 <= eps < theta:
        raise ValueError("the bound requires 0 <= eps < theta")
    if delta < 0 or k < 0:
        raise ValueError("delta and k must be >= 0")
    return float(np.sqrt(k) * (delta / theta + eps / (theta**2 - theta * eps)))


def verify_bound(exact, approx, bound: float, name: str, inputs: dict | None = None) -> BoundReport:
    """Compare the Frobenius deviation of two matrices against a bound."""
    exact = np.asarray(exact, dtype=np.float64)
    approx = np.asarray(approx, dtype=np.float64)
    if exact.shape != approx.shape:
        raise ValueError(f"shape mismatch: {exact.shape} vs {approx.shape}")
    observed = float(np.linalg.norm(exact - approx))
    return BoundReport(
        bound_name=name,
        analytic_bound=float(bound),
        observed_error=observed,
        holds=observed <= bound + BOUND_SLACK,
        inputs=dict(inputs or {}),
    )
