"""Exact dense SVD oracle plus classical stand-ins for singular value
and spectral norm estimation.

Singular value estimation is modeled as deterministic fixed-grid rounding:
the same spectrum and resolution always land in the same buckets, which is
exactly the property consistent phase estimation provides across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NumericError, ResolutionError
from .store import DataMatrix

DEGENERACY_REL_GAP = 1e-12


@dataclass(frozen=True)
class SvdModel:
    """Thin SVD with descending singular values and a fixed sign convention."""

    sigmas: np.ndarray          # (r,) descending, all > rank tolerance
    U: np.ndarray               # (n, r) column-orthonormal
    V: np.ndarray               # (m, r) column-orthonormal
    rank: int
    degenerate_groups: tuple[tuple[int, ...], ...] = ()

    @property
    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.sigmas**2)))

    @property
    def spectral(self) -> float:
        return float(self.sigmas[0]) if self.rank else 0.0

    def factor_scores(self) -> np.ndarray:
        """lambda_i = sigma_i**2."""
        return self.sigmas**2

    def factor_score_ratios(self) -> np.ndarray:
        """lambda_i / sum_j lambda_j, the sampling distribution of the spectrum."""
        scores = self.sigmas**2
        return scores / scores.sum()

    def reconstruction(self) -> np.ndarray:
        return (self.U * self.sigmas) @ self.V.T


@dataclass(frozen=True)
class Bucket:
    """One cell of the rounding grid: a value, its members and their mass."""

    value: float
    grid_index: int
    members: tuple[int, ...]
    mass: float


@dataclass(frozen=True)
class RoundedSpectrum:
    """Deterministically rounded singular values, grouped by grid cell.

    ``buckets`` are sorted by value descending. Each original index appears
    in exactly one bucket and |sigma_i - value| <= eps for its bucket.
    """

    buckets: tuple[Bucket, ...]
    eps: float
    mu: float
    bits: int
    sigmas: np.ndarray

    @property
    def step(self) -> float:
        return self.mu / (1 << self.bits)

    def mass_at_or_above(self, theta: float) -> float:
        return float(sum(b.mass for b in self.buckets if b.value >= theta))

    def count_at_or_above(self, theta: float) -> int:
        return sum(len(b.members) for b in self.buckets if b.value >= theta)

    def retained(self, theta: float) -> tuple[Bucket, ...]:
        return tuple(b for b in self.buckets if b.value >= theta)

    def value_of(self, index: int) -> float:
        for b in self.buckets:
            if index in b.members:
                return b.value
        raise IndexError(index)


def compute_svd(m: DataMatrix, rank_tol: float = 1e-10) -> SvdModel:
    """Full thin SVD with values below ``rank_tol * sigma_max`` discarded.

    Sign convention: the largest-magnitude coordinate of each right singular
    vector is made positive (ties broken by lowest index), so vectors are
    reproducible across runs and platforms for non-degenerate spectra.
    """
    if rank_tol < 0:
        raise ValueError("rank_tol must be >= 0")
    values = m.values
    if not np.all(np.isfinite(values)):
        raise NumericError("matrix contains non-finite entries")
    U, s, Vt = np.linalg.svd(values, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise DegenerateInputError("zero matrix has no singular triples to model")
    keep = s > rank_tol * s[0]
    U, s, Vt = U[:, keep], s[keep], Vt[keep, :]
    V = Vt.T.copy()
    U = U.copy()

    for j in range(s.size):
        pivot = int(np.argmax(np.abs(V[:, j])))  # argmax takes the lowest index on ties
        if V[pivot, j] < 0:
            V[:, j] = -V[:, j]
            U[:, j] = -U[:, j]

    groups: list[tuple[int, ...]] = []
    gap_tol = DEGENERACY_REL_GAP * s[0]
    start = 0
    for i in range(1, s.size + 1):
        if i == s.size or s[i - 1] - s[i] >= gap_tol:
            if i - start > 1:
                groups.append(tuple(range(start, i)))
            start = i

    for arr in (s, U, V):
        arr.setflags(write=False)
    return SvdModel(sigmas=s, U=U, V=V, rank=int(s.size), degenerate_groups=tuple(groups))


def sve_round(
    s: SvdModel,
    eps: float,
    scale_mode: str = "absolute",
    mu: float = 1.0,
) -> RoundedSpectrum:
    """Round the spectrum onto the fixed binary grid of a b-bit register.

    ``absolute`` mode uses mu = 1 (callers pre-scale if they need another
    unit) and an unbounded grid; ``relative_to_mu`` rounds sigma/mu like a
    b-bit phase register, whose cells run from 0 to 2^b - 1 (the value 1.0
    is not representable), so a sigma within half a step of mu lands in the
    top cell instead of at mu itself. With b = ceil(log2(mu/eps)) the grid
    step is at most eps and |sigma_i - value| <= eps for every member, with
    equality-half only away from the clamped top cell. The mapping is a
    pure function of (spectrum, eps, mu): identical inputs give identical
    buckets on every call.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if scale_mode == "absolute":
        mu = 1.0
    elif scale_mode == "relative_to_mu":
        if mu <= 0:
            raise ValueError("mu must be positive in relative_to_mu mode")
        if mu < s.spectral * (1 - 1e-12):
            raise ValueError("relative_to_mu mode needs mu >= sigma_max")
    else:
        raise ValueError(f"unknown scale_mode: {scale_mode!r}")
    if eps >= mu:
        raise ResolutionError(
            f"eps={eps} >= mu={mu} leaves zero bits for the singular value register"
        )
    bits = math.ceil(math.log2(mu / eps))
    scale = float(1 << bits) / mu
    # dividing mu by a power of two is exact, and cell * step commutes with
    # rounding for dyadic cells, so a threshold tau * mu compares against
    # grid-aligned values without an ulp of slack (retain-on-equality)
    step = mu / float(1 << bits)

    ratios = s.factor_score_ratios()
    grid = np.rint(s.sigmas * scale).astype(np.int64)
    if scale_mode == "relative_to_mu":
        grid = np.minimum(grid, (1 << bits) - 1)
    by_cell: dict[int, list[int]] = {}
    for i, cell in enumerate(grid):
        by_cell.setdefault(int(cell), []).append(i)

    buckets = tuple(
        Bucket(
            value=cell * step,
            grid_index=cell,
            members=tuple(members),
            mass=float(ratios[members].sum()),
        )
        for cell, members in sorted(by_cell.items(), reverse=True)
    )
    return RoundedSpectrum(buckets=buckets, eps=eps, mu=mu, bits=bits, sigmas=s.sigmas)


def estimate_spectral_norm(
    m: DataMatrix, eps: float = 0.0, mode: str = "exact", seed: int = 0
) -> float:
    """Largest singular value, optionally with additive eps*||A||_F noise."""
    smax = float(np.linalg.svd(m.values, compute_uv=False)[0])
    if mode == "exact":
        return smax
    if mode == "noisy":
        if eps <= 0:
            raise ValueError("eps must be positive in noisy mode")
        rng = np.random.default_rng(seed)
        return smax + float(rng.uniform(-eps, eps)) * m.frobenius
    raise ValueError(f"unknown mode: {mode!r}")
