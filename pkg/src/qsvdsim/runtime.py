"""Run-time parameter evaluation and quantum-vs-classical cost curves.

All asymptotic expressions are evaluated with unit constants and explicit
base-2 logarithms. The resulting numbers are for trend comparison only and
every emitted table says so in its header.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IncompleteParamsError, InfeasibleBudgetError
from .store import DataMatrix


@dataclass(frozen=True)
class MuResult:
    mu: float
    best_p: float
    winner: str  # "frobenius" or "s_p"


def _s_p(values: np.ndarray, p: float) -> float:
    """max_i ||row_i||_p^p with the p -> 0 limit counting nonzeros."""
    a = np.abs(values)
    if p == 0.0:
        return float(np.max(np.count_nonzero(a, axis=1)))
    return float(np.max(np.sum(np.where(a > 0, a**p, 0.0), axis=1)))


def compute_mu(m: DataMatrix, grid=None) -> MuResult:
    """min over p of (||A||_F, sqrt(s_2p(A) * s_2(1-p)(A^T))).

    A coarse grid scan is refined once around the best point; the row-norm
    family is smooth in p, and on typical dense data the Frobenius norm wins
    anyway.
    """
    if grid is None:
        grid = np.linspace(0.0, 1.0, 21)
    grid = np.asarray(sorted(grid), dtype=np.float64)
    if grid.size == 0 or grid.min() < 0 or grid.max() > 1:
        raise ValueError("grid must be a nonempty subset of [0, 1]")

    def term(p: float) -> float:
        return math.sqrt(_s_p(m.values, 2.0 * p) * _s_p(m.values.T, 2.0 * (1.0 - p)))

    best_p = float(grid[0])
    best_val = term(best_p)
    for p in grid[1:]:
        val = term(float(p))
        if val < best_val:
            best_val, best_p = val, float(p)
    step = float(grid[1] - grid[0]) if grid.size > 1 else 0.05
    for p in np.linspace(max(0.0, best_p - step / 2), min(1.0, best_p + step / 2), 11):
        val = term(float(p))
        if val < best_val:
            best_val, best_p = val, float(p)

    if m.frobenius <= best_val:
        return MuResult(mu=m.frobenius, best_p=best_p, winner="frobenius")
    return MuResult(mu=best_val, best_p=best_p, winner="s_p")


def thresholding_epsilon(sigmas, k: int, rule: str = "half_gap") -> float:
    """Resolution separating the k-th retained singular value from the next.

    ``half_gap`` returns half the gap, ``full_gap`` the whole gap; with no
    value below, half the k-th value is used. A vanishing gap (degenerate
    boundary) cannot be thresholded and yields 0 with a warning.
    """
    sigmas = np.asarray(sigmas, dtype=np.float64)
    if not 1 <= k <= sigmas.size:
        raise ValueError(f"k must lie in [1, {sigmas.size}]")
    if rule not in ("half_gap", "full_gap"):
        raise ValueError(f"unknown rule: {rule!r}")
    if k == sigmas.size:
        return float(sigmas[k - 1] / 2.0)
    gap = float(sigmas[k - 1] - sigmas[k])
    if gap <= 0.0:
        warnings.warn(
            f"zero gap between singular values {k} and {k + 1}, thresholding impossible",
            stacklevel=2,
        )
        return 0.0
    return gap / 2.0 if rule == "half_gap" else gap


def estimate_delta(xi: float, k: int, eps: float, spectral: float = 1.0) -> float:
    """Invert the representation budget xi = sqrt(k) * (eps + delta * ||A||)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if spectral <= 0:
        raise ValueError("spectral norm must be positive")
    if xi / math.sqrt(k) <= eps:
        raise InfeasibleBudgetError(
            f"xi={xi} is too small: xi/sqrt(k)={xi / math.sqrt(k):.6g} must exceed eps={eps}"
        )
    return (xi / math.sqrt(k) - eps) / spectral


@dataclass(frozen=True)
class RuntimeParams:
    """The parameter tuple entering every cost expression."""

    mu: float
    best_p: float
    spectral: float
    frobenius: float
    theta: float
    thresholding_eps: float
    k: int
    p: float
    delta: float
    gamma: float
    n: int
    m: int
    eta: float = 0.1
    xi: float | None = None
    r: int | None = None

    def __post_init__(self) -> None:
        if self.theta < self.thresholding_eps or self.thresholding_eps < 0:
            raise ValueError("need theta >= thresholding_eps >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.mu > self.frobenius * (1 + 1e-9):
            raise ValueError("mu cannot exceed the Frobenius norm")

    def resolved_xi(self) -> float:
        if self.xi is not None:
            return self.xi
        return math.sqrt(self.k) * (self.thresholding_eps + self.delta) * self.spectral

    def resolved_r(self) -> int:
        return self.r if self.r is not None else min(self.n, self.m)


@dataclass(frozen=True)
class CostRow:
    routine: str
    expression: str
    value: float

    def csv_row(self) -> str:
        return f"{self.routine},{self.expression},{self.value:.17g}"


CSV_HEADER = "routine,expression,value"
TREND_NOTE = "# unit constants and base-2 logs; values are for trend comparison only"


def cost_report(rp: RuntimeParams, ladder=None) -> list[CostRow]:
    """Numeric evaluation of every asymptotic cost expression.

    With a ladder of sample counts, quantum extraction and the classical
    baseline are evaluated at each rung and the crossover rung (first n
    where the linf extraction beats the classical baseline) is reported.
    """
    for name in ("mu", "theta", "thresholding_eps", "k", "p", "delta", "gamma"):
        if getattr(rp, name) in (None, 0):
            raise IncompleteParamsError(f"runtime parameter {name!r} is missing or zero")
    mu, eps, theta = rp.mu, rp.thresholding_eps, rp.theta
    k, p, delta, gamma, eta = rp.k, rp.p, rp.delta, rp.gamma, rp.eta
    xi, r = rp.resolved_xi(), rp.resolved_r()
    inv_sqrt_p = 1.0 / math.sqrt(p) if p > 0 else float("inf")
    ratio = rp.spectral / theta

    rows = [
        CostRow(
            "factor-score-sampling",
            f"(1/{gamma}^2)*({mu:.6g}/{eps:.6g})",
            (1.0 / gamma**2) * (mu / eps),
        ),
        CostRow(
            "fsr-sum-check",
            f"{mu:.6g}/({eps:.6g}*{eta}*sqrt({p:.6g}))",
            mu / (eps * eta) * inv_sqrt_p,
        ),
        CostRow(
            "threshold-binary-search",
            f"{mu:.6g}*log2({mu:.6g}/{eps:.6g})/({eps:.6g}*{eta})",
            mu * math.log2(mu / eps) / (eps * eta),
        ),
        CostRow(
            "rank-count-exact",
            f"({mu:.6g}/{eps:.6g})*sqrt(({k}+1)*({r}-{k}+1))",
            (mu / eps) * math.sqrt((k + 1) * (r - k + 1)),
        ),
        CostRow(
            "rank-count-relative",
            f"{mu:.6g}/({eps:.6g}*{eta})*sqrt({r}/{k})",
            mu / (eps * eta) * math.sqrt(r / k),
        ),
    ]
    for z, name in ((rp.n, "left"), (rp.m, "right")):
        rows.append(
            CostRow(
                f"topk-extraction-{name}-l2",
                f"({rp.spectral:.6g}/{theta:.6g})*(1/sqrt({p:.6g}))*({mu:.6g}/{eps:.6g})"
                f"*({k}*{z}/{delta}^2)",
                ratio * inv_sqrt_p * (mu / eps) * k * z / delta**2,
            )
        )
    rows.append(
        CostRow(
            "topk-extraction-linf",
            f"({rp.spectral:.6g}/{theta:.6g})*(1/sqrt({p:.6g}))*({mu:.6g}/{eps:.6g})"
            f"*({k}/{delta}^2)",
            ratio * inv_sqrt_p * (mu / eps) * k / delta**2,
        )
    )
    rows.append(
        CostRow(
            "pca-fitting",
            f"{mu:.6g}*{k}^2*{rp.m}/({theta:.6g}*{eps:.6g}*{xi:.6g}^2)",
            mu * k**2 * rp.m / (theta * eps * xi**2),
        )
    )
    rows.append(
        CostRow(
            "classical-baseline",
            f"{rp.n}*{rp.m}*{k}*ln({rp.m}/{eps:.6g})/sqrt({eps:.6g})",
            rp.n * rp.m * k * math.log(rp.m / eps) / math.sqrt(eps),
        )
    )
    if ladder is not None:
        crossover = None
        for n_i in sorted(int(x) for x in ladder):
            quantum = ratio * inv_sqrt_p * (mu / eps) * k / delta**2
            classical = n_i * rp.m * k * math.log(rp.m / eps) / math.sqrt(eps)
            rows.append(
                CostRow(f"ladder-quantum-linf@n={n_i}", "independent of n", quantum)
            )
            rows.append(
                CostRow(
                    f"ladder-classical@n={n_i}",
                    f"{n_i}*{rp.m}*{k}*ln({rp.m}/{eps:.6g})/sqrt({eps:.6g})",
                    classical,
                )
            )
            if crossover is None and quantum < classical:
                crossover = n_i
        rows.append(
            CostRow(
                "ladder-crossover",
                "first rung where linf extraction beats the classical baseline",
                float(crossover) if crossover is not None else float("nan"),
            )
        )
    return rows


def cost_report_csv(rows: list[CostRow]) -> str:
    lines = [TREND_NOTE, CSV_HEADER]
    lines.extend(r.csv_row() for r in rows)
    return "\n".join(lines) + "\n"
