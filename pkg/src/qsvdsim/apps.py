"""PCA, CA and LSA model extraction on top of the simulated routines.

Each fit runs the same pipeline: sample the factor score ratios, turn the
requested target (variance mass, component count or explicit threshold)
into a singular value threshold, then extract the singular vectors with
bounded readout noise. The returned models carry the error-budget
provenance (theta, epsilon, delta, gamma, seed) needed to reproduce them
and, where the accuracy bounds apply, their evaluated values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import bounds as bounds_mod
from .errors import EmptyRetentionError, UnreachableTargetError
from .noise import amplitude_estimate, derive_seed
from .oracle import SvdModel, compute_svd
from .routines import (
    CostLedger,
    SpectralSample,
    binary_search_threshold,
    check_fsr_sum,
    count_retained,
    extract_topk,
    sample_factor_scores,
    select_k_for_variance,
)
from .store import ContingencyTable, DataMatrix, build_ca_matrix


@dataclass(frozen=True)
class PcaModel:
    components: np.ndarray      # (m, k) unit columns
    sigmas: np.ndarray
    ratios: np.ndarray
    p_retained: float
    theta: float
    epsilon: float
    delta: float
    gamma: float
    seed: int

    @property
    def k(self) -> int:
        return self.components.shape[1]


@dataclass(frozen=True)
class CaModel:
    row_coords: np.ndarray      # (n, k) rows of D_x^{-1/2} U
    col_coords: np.ndarray      # (m, k) rows of D_y^{-1/2} V
    sigmas: np.ndarray
    ratios: np.ndarray
    bound_row: float
    bound_col: float
    theta: float
    epsilon: float
    delta: float
    gamma: float
    seed: int

    @property
    def k(self) -> int:
        return self.row_coords.shape[1]


@dataclass(frozen=True)
class LsaModel:
    word_space: np.ndarray      # (n, k) U * Sigma
    doc_space: np.ndarray       # (m, k) V * Sigma
    word_half: np.ndarray       # (n, k) U * Sigma^{1/2}
    doc_half: np.ndarray        # (m, k) V * Sigma^{1/2}
    fold_matrix: np.ndarray     # (n, k) U * Sigma^{-1}
    sigmas: np.ndarray
    p_retained: float
    bound_us: float
    bound_us_half: float
    bound_us_inv: float
    theta: float
    epsilon: float
    delta: float
    gamma: float
    seed: int

    @property
    def k(self) -> int:
        return self.word_space.shape[1]


def _threshold_for_k(sample: SpectralSample, k_target: int, theta_rule: str) -> float:
    """Threshold just below the bucket that completes k_target indices."""
    if k_target < 1:
        raise ValueError("k_target must be at least 1")
    covered = 0
    for used, bucket in enumerate(sample.buckets, start=1):
        covered += len(bucket.members)
        if covered >= k_target:
            nxt = sample.buckets[used].sigma_hat if used < len(sample.buckets) else None
            if theta_rule == "last":
                return bucket.sigma_hat
            if nxt is None:
                return bucket.sigma_hat - sample.epsilon
            return 0.5 * (bucket.sigma_hat + nxt)
    raise UnreachableTargetError(
        f"sample exposes only {covered} singular values, k_target={k_target}"
    )


def _resolve_threshold(
    svd: SvdModel,
    gamma: float,
    epsilon: float,
    seed: int,
    p_target: float | None,
    k_target: int | None,
    theta_target: float | None,
    n_samples: int | None,
    eta: float,
    use_binary_search: bool,
    theta_rule: str,
    ledger: CostLedger | None,
) -> tuple[float, float]:
    """Turn whichever target was given into (theta, estimated mass)."""
    given = [t is not None for t in (p_target, k_target, theta_target)]
    if sum(given) != 1:
        raise ValueError("exactly one of p_target, k_target, theta_target is required")
    if theta_target is not None:
        return theta_target, float("nan")
    if use_binary_search:
        if p_target is None:
            raise ValueError("binary search needs a variance target")
        search = binary_search_threshold(
            svd, p_target, epsilon, eta, seed=derive_seed(seed, "search"), ledger=ledger
        )
        if search.theta is None:
            raise UnreachableTargetError(
                f"no threshold reaches p={p_target} within eta={eta}"
            )
        return search.theta, p_target
    N = n_samples if n_samples is not None else max(1, round(1.0 / gamma**2))
    sample = sample_factor_scores(
        svd, gamma, epsilon, N, seed=derive_seed(seed, "sample"), ledger=ledger
    )
    if p_target is not None:
        sel = select_k_for_variance(sample, p_target, theta_rule=theta_rule)
        return sel.theta, sel.p_est
    return _threshold_for_k(sample, k_target, theta_rule), float("nan")


def _delta_from_xi(xi: float, p_est: float, k: int) -> float:
    """Vector precision implied by a representation budget: xi*sqrt(p)/sqrt(2k)."""
    p_eff = p_est if np.isfinite(p_est) and p_est > 0 else 1.0
    return xi * math.sqrt(p_eff) / math.sqrt(2 * k)


def pca_fit(
    m: DataMatrix,
    p_target: float | None = None,
    k_target: int | None = None,
    theta_target: float | None = None,
    gamma: float = 0.0316,
    epsilon: float = 1e-3,
    delta: float | None = None,
    xi: float | None = None,
    n_samples: int | None = None,
    eta: float = 0.05,
    seed: int = 0,
    use_binary_search: bool = False,
    theta_rule: str = "midpoint",
    tom: str = "l2",
    ledger: CostLedger | None = None,
) -> PcaModel:
    """Fit a PCA model: principal components are the right singular vectors.

    The vector precision can be given directly as ``delta`` or derived from
    a representation budget ``xi`` through delta = xi*sqrt(p)/sqrt(2k).
    """
    if not m.row_mean_centered:
        raise ValueError("pca_fit expects a centered matrix; run preprocess(center=True)")
    if (delta is None) == (xi is None):
        raise ValueError("give exactly one of delta or xi")
    svd = compute_svd(m)
    theta, p_est = _resolve_threshold(
        svd, gamma, epsilon, seed, p_target, k_target, theta_target,
        n_samples, eta, use_binary_search, theta_rule, ledger,
    )
    if xi is not None:
        k_est = count_retained(svd, theta, epsilon)
        if k_est == 0:
            raise EmptyRetentionError(f"no singular value reaches theta={theta:.6g}")
        if not np.isfinite(p_est):
            p_est = check_fsr_sum(svd, theta, epsilon, noise_mode="exact")
        delta = _delta_from_xi(xi, p_est, k_est)
    res = extract_topk(
        svd, theta, epsilon, delta, side="right", tom=tom, seed=seed, ledger=ledger
    )
    if ledger is not None and xi is not None:
        mu = svd.frobenius
        ledger.add(
            "pca-fitting",
            f"mu*k^2*m/(theta*eps*xi^2) = {mu:.6g}*{res.k}^2*{m.shape[1]}"
            f"/({theta:.6g}*{epsilon}*{xi}^2)",
            mu * res.k**2 * m.shape[1] / (theta * epsilon * xi**2),
        )
    return PcaModel(
        components=res.V_hat,
        sigmas=res.sigma_hats,
        ratios=res.ratios,
        p_retained=float(res.ratios.sum()),
        theta=theta,
        epsilon=epsilon,
        delta=delta,
        gamma=gamma,
        seed=seed,
    )


@dataclass(frozen=True)
class VectorProjection:
    y: np.ndarray
    norm_est: float
    state_error_bound: float
    defined: bool


def pca_transform_vector(
    model: PcaModel, a: np.ndarray, eta: float = 0.05, seed: int = 0
) -> VectorProjection:
    """Project a vector onto the fitted components.

    The norm estimate carries relative noise eta; since the estimated
    amplitude is ||y||/||a|| (always in [0, 1] for a projection), the noise
    injector's probability clamp stays valid. The state error bound is
    (||a||/||y||) * sqrt(2k) * delta with delta from the model provenance.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (model.components.shape[0],):
        raise ValueError(f"expected a vector of length {model.components.shape[0]}")
    y = model.components.T @ a
    norm_a = float(np.linalg.norm(a))
    norm_y = float(np.linalg.norm(y))
    if norm_y == 0.0:
        return VectorProjection(y=y, norm_est=0.0, state_error_bound=float("inf"), defined=False)
    mode = "exact" if eta == 0 else "relative"
    est_ratio = amplitude_estimate(min(norm_y / norm_a, 1.0), eta, mode, seed)
    bound = (norm_a / norm_y) * math.sqrt(2 * model.k) * model.delta
    return VectorProjection(
        y=y, norm_est=norm_a * est_ratio, state_error_bound=bound, defined=True
    )


@dataclass(frozen=True)
class MatrixProjection:
    Y: np.ndarray
    xi_bound: float
    p: float


def pca_transform_matrix(model: PcaModel, m: DataMatrix) -> MatrixProjection:
    """Project a whole matrix; p is the retained fraction ||Y||_F^2/||A||_F^2."""
    if m.shape[1] != model.components.shape[0]:
        raise ValueError(
            f"matrix has {m.shape[1]} columns, model expects {model.components.shape[0]}"
        )
    Y = m.values @ model.components
    norm_y = float(np.linalg.norm(Y))
    p = (norm_y / m.frobenius) ** 2
    if norm_y == 0.0:
        xi_bound = float("inf")
    else:
        xi_bound = (m.frobenius / norm_y) * math.sqrt(2 * model.k) * model.delta
    return MatrixProjection(Y=Y, xi_bound=xi_bound, p=p)


@dataclass(frozen=True)
class RepresentabilityPoint:
    p: float
    k_p: int
    alpha: float
    beta: float
    zero_rows: int


def pca_representability(
    m: DataMatrix, s: SvdModel, p_grid=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
) -> list[RepresentabilityPoint]:
    """Fraction alpha of rows keeping at least beta = p of their norm in the top-k span.

    For each grid p, k_p is the smallest k whose cumulative factor score
    ratio reaches p. Zero-norm rows cannot be scored and are excluded and
    counted separately.
    """
    ratios = np.cumsum(s.factor_score_ratios())
    norms = m.row_norms
    nonzero = norms > 0
    zero_rows = int(np.count_nonzero(~nonzero))
    rows = m.values[nonzero]
    row_norms = norms[nonzero]

    out = []
    for p in p_grid:
        if not 0.0 < p <= 1.0:
            raise ValueError("grid values must lie in (0, 1]")
        k_p = int(np.searchsorted(ratios, p - 1e-12)) + 1
        k_p = min(k_p, s.rank)
        proj = rows @ s.V[:, :k_p]
        kept = np.linalg.norm(proj, axis=1) / row_norms
        alpha = float(np.mean(kept >= p)) if rows.size else 0.0
        out.append(RepresentabilityPoint(p=p, k_p=k_p, alpha=alpha, beta=p, zero_rows=zero_rows))
    return out


def ca_fit(
    t: ContingencyTable,
    p_target: float | None = None,
    k_target: int | None = None,
    theta_target: float | None = None,
    gamma: float = 0.0316,
    epsilon: float = 1e-3,
    delta: float = 0.0,
    n_samples: int | None = None,
    eta: float = 0.05,
    seed: int = 0,
    theta_rule: str = "midpoint",
    laplace_smoothing: float = 0.0,
    ledger: CostLedger | None = None,
) -> CaModel:
    """Fit a correspondence analysis model from a contingency table.

    Builds the standardized-residual matrix, extracts both singular sides
    and rescales them by the inverse square-root marginals. The attached
    bound fields are the D^{-1/2} U accuracy values for this delta and k.
    """
    counts = t.counts
    if laplace_smoothing > 0:
        counts = counts + laplace_smoothing
        t = ContingencyTable(counts, t.row_labels, t.col_labels)
    built = build_ca_matrix(t)
    residual = built.matrix
    if residual.frobenius < 1e-10:
        raise EmptyRetentionError(
            "residual matrix is zero (the table factors as an outer product); "
            f"||A||_F = {residual.frobenius:.3e}, nothing to extract"
        )
    svd = compute_svd(residual)
    theta, _ = _resolve_threshold(
        svd, gamma, epsilon, seed, p_target, k_target, theta_target,
        n_samples, eta, use_binary_search=False, theta_rule=theta_rule, ledger=ledger,
    )
    res = extract_topk(svd, theta, epsilon, delta, side="both", seed=seed, ledger=ledger)
    dx = 1.0 / np.sqrt(built.row_marginals)
    dy = 1.0 / np.sqrt(built.col_marginals)
    bound_row = bounds_mod.bound_du(float(np.linalg.norm(dx)), delta, res.k)
    bound_col = bounds_mod.bound_du(float(np.linalg.norm(dy)), delta, res.k)
    return CaModel(
        row_coords=dx[:, None] * res.U_hat,
        col_coords=dy[:, None] * res.V_hat,
        sigmas=res.sigma_hats,
        ratios=res.ratios,
        bound_row=bound_row,
        bound_col=bound_col,
        theta=theta,
        epsilon=epsilon,
        delta=delta,
        gamma=gamma,
        seed=seed,
    )


def lsa_fit(
    m: DataMatrix,
    p_target: float | None = None,
    k_target: int | None = None,
    theta_target: float | None = None,
    gamma: float = 0.0316,
    epsilon: float = 1e-3,
    delta: float = 0.0,
    n_samples: int | None = None,
    eta: float = 0.05,
    seed: int = 0,
    theta_rule: str = "midpoint",
    ledger: CostLedger | None = None,
) -> LsaModel:
    """Fit an LSA model over a words-by-documents matrix.

    Builds the four representation spaces and the query folding matrix
    U*Sigma^{-1}. When no target is given the classic default of 100
    factors is used, capped at the available rank. The fold matrix needs
    strictly positive value estimates, hence theta > epsilon.
    """
    if p_target is None and k_target is None and theta_target is None:
        k_target = 100
    svd = compute_svd(m)
    if k_target is not None:
        k_target = min(k_target, svd.rank)
    theta, _ = _resolve_threshold(
        svd, gamma, epsilon, seed, p_target, k_target, theta_target,
        n_samples, eta, use_binary_search=False, theta_rule=theta_rule, ledger=ledger,
    )
    if theta <= epsilon:
        raise ValueError(
            f"fold matrix needs theta > epsilon (got theta={theta:.6g}, eps={epsilon:.6g})"
        )
    res = extract_topk(svd, theta, epsilon, delta, side="both", seed=seed, ledger=ledger)
    sig = res.sigma_hats
    exact_sig = svd.sigmas[list(res.retained_indices)]
    b_us = bounds_mod.bound_us(exact_sig, epsilon, delta)[0]
    # the sqrt bound is two-sided sound only for theta <= sigma_min - eps;
    # at theta = sigma_min the minus branch overshoots it at second order
    theta_half = float(exact_sig.min()) - epsilon
    if theta_half > 0:
        b_half = bounds_mod.bound_us_half(exact_sig, epsilon, delta, theta_half)[0]
    else:
        b_half = float("inf")
    theta_floor = float(exact_sig.min())
    if epsilon < theta_floor:
        b_inv = bounds_mod.bound_us_inv(epsilon, delta, theta_floor, res.k)
    else:
        warnings.warn("epsilon reaches the smallest retained value, inverse bound undefined")
        b_inv = float("inf")
    return LsaModel(
        word_space=res.U_hat * sig,
        doc_space=res.V_hat * sig,
        word_half=res.U_hat * np.sqrt(sig),
        doc_half=res.V_hat * np.sqrt(sig),
        fold_matrix=res.U_hat / sig,
        sigmas=sig,
        p_retained=float(res.ratios.sum()),
        bound_us=b_us,
        bound_us_half=b_half,
        bound_us_inv=b_inv,
        theta=theta,
        epsilon=epsilon,
        delta=delta,
        gamma=gamma,
        seed=seed,
    )


def lsa_fold_query(model: LsaModel, x_q: np.ndarray) -> np.ndarray:
    """Fold a word-count query vector into the document space: x_q^T U Sigma^{-1}."""
    x_q = np.asarray(x_q, dtype=np.float64)
    if x_q.shape != (model.fold_matrix.shape[0],):
        raise ValueError(f"expected a query of length {model.fold_matrix.shape[0]}")
    return x_q @ model.fold_matrix


def doc_similarities(model: LsaModel, query_rep: np.ndarray, metric: str = "cosine") -> np.ndarray:
    """Similarity of a folded query against every document representation."""
    docs = model.doc_space
    if metric == "inner":
        return docs @ query_rep
    if metric != "cosine":
        raise ValueError(f"unknown metric: {metric!r}")
    qn = np.linalg.norm(query_rep)
    dn = np.linalg.norm(docs, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = (docs @ query_rep) / (dn * qn)
    return np.nan_to_num(sims, nan=0.0)
