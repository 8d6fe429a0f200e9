"""Classical simulators for the sampling-based spectrum routines.

Four processes are simulated over the exact SVD oracle: factor-score-ratio
sampling, the thresholded ratio-sum check, the binary search for a singular
value threshold, and top-k singular vector extraction with its coupon
collector measurement loop. Every routine is a pure function of its inputs
and a seed, and can append the asymptotic cost expression it models, with
the actual parameter values substituted, to an optional :class:`CostLedger`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRetentionError, UnreachableTargetError
from .noise import NoiseSpec, amplitude_estimate, derive_seed, tomography_noise
from .oracle import RoundedSpectrum, SvdModel, sve_round

_MAX_BATCH = 4_000_000


@dataclass(frozen=True)
class CostRecord:
    routine: str
    expression: str
    value: float

    def line(self) -> str:
        return f"{self.routine}: {self.expression} = {self.value:.6g}"


@dataclass
class CostLedger:
    """Accumulates one line per asymptotic cost expression, values substituted."""

    records: list[CostRecord] = field(default_factory=list)

    def add(self, routine: str, expression: str, value: float) -> None:
        self.records.append(CostRecord(routine, expression, value))

    def lines(self) -> list[str]:
        return [r.line() for r in self.records]


def wald_sample_size(gamma: float, z: float = 2.0) -> int:
    """Measurements needed for a Wald interval of half-width gamma: z^2/(4 gamma^2)."""
    if gamma <= 0 or z <= 0:
        raise ValueError("gamma and z must be positive")
    return math.ceil(z**2 / (4.0 * gamma**2))


def conservative_sample_size(gamma: float, r: int) -> int:
    """The 36 ln(r) / gamma^2 prescription; far larger than the Wald count."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if r < 2:
        raise ValueError("r must be at least 2")
    return math.ceil(36.0 * math.log(r) / gamma**2)


@dataclass(frozen=True)
class SampleBucket:
    """One measured register value with its Wald and squared-value estimates."""

    sigma_hat: float
    members: tuple[int, ...]
    count: int          # times this value was measured
    ratio_wald: float   # count / N
    score_sve: float    # sigma_hat^2
    ratio_sve: float    # sigma_hat^2 / ||A||_F^2
    reported: bool      # ratio_wald > gamma


@dataclass(frozen=True)
class SpectralSample:
    """Multiset of measured singular values, sorted by value descending."""

    buckets: tuple[SampleBucket, ...]
    N: int
    gamma: float
    epsilon: float
    frobenius: float
    spectrum: RoundedSpectrum

    def total_mass(self) -> float:
        return sum(b.ratio_wald for b in self.buckets)


def sample_factor_scores(
    s: SvdModel,
    gamma: float,
    epsilon: float,
    N: int,
    seed: int = 0,
    ledger: CostLedger | None = None,
) -> SpectralSample:
    """Draw N measurements from the factor-score-ratio distribution.

    The rounded spectrum fixes the measurable values; each draw lands on a
    bucket with probability equal to its aggregated factor score ratio. A
    bucket is flagged as reported when its Wald estimate exceeds gamma.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    spectrum = sve_round(s, epsilon)
    masses = np.array([b.mass for b in spectrum.buckets])
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(N, masses / masses.sum())

    fro2 = s.frobenius**2
    buckets = tuple(
        SampleBucket(
            sigma_hat=b.value,
            members=b.members,
            count=int(c),
            ratio_wald=c / N,
            score_sve=b.value**2,
            ratio_sve=b.value**2 / fro2,
            reported=c / N > gamma,
        )
        for b, c in zip(spectrum.buckets, counts)
        if c > 0
    )
    if ledger is not None:
        mu = s.frobenius
        ledger.add(
            "factor-score-sampling",
            f"(1/gamma^2)*(mu/eps) = (1/{gamma}^2)*({mu:.6g}/{epsilon})",
            (1.0 / gamma**2) * (mu / epsilon),
        )
    return SpectralSample(
        buckets=buckets,
        N=N,
        gamma=gamma,
        epsilon=epsilon,
        frobenius=s.frobenius,
        spectrum=spectrum,
    )


@dataclass(frozen=True)
class SelectionResult:
    k: int
    p_est: float
    theta: float
    buckets_used: int


def _theta_below(last_value: float, next_value: float | None, epsilon: float, rule: str) -> float:
    if rule == "last":
        return last_value
    if rule != "midpoint":
        raise ValueError(f"unknown theta rule: {rule!r}")
    if next_value is None:
        return last_value - epsilon
    return 0.5 * (last_value + next_value)


def select_k_for_variance(
    sample: SpectralSample, p_target: float, theta_rule: str = "midpoint"
) -> SelectionResult:
    """Accumulate measured ratios from the top until p_target is reached.

    k counts original singular value indices (bucket degeneracy resolved
    through the oracle's membership lists, not through estimated masses).
    theta lands between the last included value and the next one below it,
    or at the last value itself under the ``last`` rule.
    """
    if not 0.0 < p_target <= 1.0:
        raise ValueError("p_target must lie in (0, 1]")
    if not sample.buckets:
        raise UnreachableTargetError("sample contains no measurements")
    cum = 0.0
    for used, bucket in enumerate(sample.buckets, start=1):
        cum += bucket.ratio_wald
        if cum >= p_target - 1e-12:
            k = sum(len(b.members) for b in sample.buckets[:used])
            nxt = sample.buckets[used].sigma_hat if used < len(sample.buckets) else None
            theta = _theta_below(bucket.sigma_hat, nxt, sample.epsilon, theta_rule)
            return SelectionResult(k=k, p_est=cum, theta=theta, buckets_used=used)
    raise UnreachableTargetError(
        f"sample mass {cum:.6f} never reaches the target {p_target}"
    )


def exact_selection(
    s: SvdModel, p_target: float, epsilon: float = 0.0, theta_rule: str = "midpoint"
) -> SelectionResult:
    """Reference selection over the exact ratios, mirroring the sampled rule."""
    if not 0.0 < p_target <= 1.0:
        raise ValueError("p_target must lie in (0, 1]")
    ratios = s.factor_score_ratios()
    cum = np.cumsum(ratios)
    idx = int(np.searchsorted(cum, p_target - 1e-12))
    k = min(idx + 1, s.rank)
    nxt = float(s.sigmas[k]) if k < s.rank else None
    eps = epsilon if epsilon > 0 else float(s.sigmas[k - 1]) / 2.0
    theta = _theta_below(float(s.sigmas[k - 1]), nxt, eps, theta_rule)
    return SelectionResult(k=k, p_est=float(cum[k - 1]), theta=theta, buckets_used=k)


def check_fsr_sum(
    s: SvdModel,
    theta: float,
    epsilon: float,
    eta: float = 0.0,
    noise_mode: str = "relative",
    seed: int = 0,
    mu: float | None = None,
    ledger: CostLedger | None = None,
) -> float:
    """Estimate the factor score ratio mass at or above ``theta``.

    The exact mass is computed over the rounded spectrum (retain on value
    equality) and then passed through amplitude estimation, relative mode by
    default. A zero mass makes the relative error undefined; the estimate is
    0 and a warning flags it.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if mu is None:
        spectrum = sve_round(s, epsilon)
    else:
        spectrum = sve_round(s, epsilon, scale_mode="relative_to_mu", mu=mu)
    p = spectrum.mass_at_or_above(theta)
    if ledger is not None:
        mu_eff = mu if mu is not None else s.frobenius
        denom = epsilon * max(eta, 1e-300) * math.sqrt(p) if p > 0 else float("inf")
        ledger.add(
            "fsr-sum-check",
            f"mu/(eps*eta*sqrt(p)) = {mu_eff:.6g}/({epsilon}*{eta}*sqrt({p:.6g}))",
            mu_eff / denom if np.isfinite(denom) else float("inf"),
        )
    if noise_mode == "exact":
        return p
    if p == 0.0 and noise_mode == "relative":
        warnings.warn("retained mass is 0, relative error is undefined", stacklevel=2)
        return 0.0
    return amplitude_estimate(p, eta, noise_mode, seed)


@dataclass(frozen=True)
class ThresholdSearch:
    """Outcome of the bisection; ``theta`` is None when no threshold exists."""

    theta: float | None
    iterations: int
    max_iterations: int
    probes: tuple[tuple[float, float], ...]  # (tau, estimated mass)


def binary_search_threshold(
    s: SvdModel,
    p_target: float,
    epsilon: float,
    eta: float,
    seed: int = 0,
    mu: float | None = None,
    probe_mode: str = "additive",
    ledger: CostLedger | None = None,
) -> ThresholdSearch:
    """Bisect tau in [0, 1] for a threshold matching the target ratio sum.

    Early exits return theta = 0 when p_target is within eta of 1 and
    theta = mu when within eta of 0. Each probe estimates the mass at
    tau * mu to additive error eta/2 and the loop stops when the estimate
    is within eta/2 of the target, which keeps the true mass within eta.
    The loop runs at most ceil(log2(mu/epsilon)) times; exhausting it means
    no threshold on the value grid fits and None is reported.
    """
    if not 0.0 <= p_target <= 1.0:
        raise ValueError("p_target must lie in [0, 1]")
    if eta <= 0:
        raise ValueError("eta must be positive")
    if mu is None:
        mu = s.frobenius
    if epsilon >= mu:
        raise ValueError("epsilon must be smaller than mu")

    max_iters = math.ceil(math.log2(mu / epsilon))
    if ledger is not None:
        ledger.add(
            "threshold-binary-search",
            f"mu*log2(mu/eps)/(eps*eta) = {mu:.6g}*{max_iters}/({epsilon}*{eta})",
            mu * max_iters / (epsilon * eta),
        )
    if abs(1.0 - p_target) <= eta:
        return ThresholdSearch(0.0, 0, max_iters, ())
    if abs(0.0 - p_target) <= eta:
        return ThresholdSearch(mu, 0, max_iters, ())

    lo, hi = 0.0, 1.0
    tau = 0.5
    probes: list[tuple[float, float]] = []
    for it in range(1, max_iters + 1):
        p_tau = check_fsr_sum(
            s,
            theta=tau * mu,
            epsilon=epsilon,
            eta=eta / 2.0,
            noise_mode=probe_mode,
            seed=derive_seed(seed, f"bisect-{it}"),
            mu=mu,
        )
        probes.append((tau, p_tau))
        if abs(p_tau - p_target) <= eta / 2.0:
            return ThresholdSearch(tau * mu, it, max_iters, tuple(probes))
        if p_tau < p_target:
            hi = tau
        else:
            lo = tau
        tau = 0.5 * (lo + hi)
    return ThresholdSearch(None, max_iters, max_iters, tuple(probes))


def count_retained(
    s: SvdModel,
    theta: float,
    epsilon: float,
    mode: str = "exact",
    eta: float = 0.0,
    seed: int = 0,
    mu: float | None = None,
    ledger: CostLedger | None = None,
) -> int:
    """Number of singular values whose rounded estimate is at or above theta."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    if mu is None:
        spectrum = sve_round(s, epsilon)
    else:
        spectrum = sve_round(s, epsilon, scale_mode="relative_to_mu", mu=mu)
    k = spectrum.count_at_or_above(theta)
    if ledger is not None:
        mu_eff = mu if mu is not None else s.frobenius
        r = s.rank
        ledger.add(
            "rank-count-exact",
            f"(mu/eps)*sqrt((k+1)*(r-k+1)) = ({mu_eff:.6g}/{epsilon})*sqrt({(k + 1) * (r - k + 1)})",
            (mu_eff / epsilon) * math.sqrt((k + 1) * (r - k + 1)),
        )
        if eta > 0 and k > 0:
            ledger.add(
                "rank-count-relative",
                f"mu/(eps*eta)*sqrt(r/k) = {mu_eff:.6g}/({epsilon}*{eta})*sqrt({r}/{k})",
                mu_eff / (epsilon * eta) * math.sqrt(r / k),
            )
    if mode == "exact":
        return k
    if mode != "relative":
        raise ValueError(f"unknown mode: {mode!r}")
    if eta <= 0:
        raise ValueError("eta must be positive in relative mode")
    if k == 0:
        warnings.warn("no singular value retained, relative count is undefined", stacklevel=2)
        return 0
    rng = np.random.default_rng(seed)
    k_hat = int(round(k * (1.0 + float(rng.uniform(-eta, eta)))))
    lo = math.ceil(k * (1.0 - eta))
    hi = math.floor(k * (1.0 + eta))
    return min(max(k_hat, lo), hi)


def _measurements_until_quota(q: np.ndarray, quota: int, rng: np.random.Generator) -> int:
    """Draws from categorical(q) until every category was seen ``quota`` times.

    Large gaps to the quota are crossed with count-only multinomial jumps
    sized to stay below every quota with overwhelming probability; the final
    stretch materializes draw order so the stopping index is exact. Past
    1e12 required sightings per category the relative fluctuation of the
    stopping time drops below 1e-6 and the expected crossing is returned
    instead of simulating.
    """
    k = q.size
    if quota > 1_000_000_000_000:
        return math.ceil(quota / float(q.min()))
    counts = np.zeros(k, dtype=np.int64)
    total = 0
    while True:
        deficit = quota - counts
        active = deficit > 0
        if not np.any(active):
            return total
        d_act = deficit[active].astype(np.float64)
        q_act = q[active]
        safe = float(np.min((d_act - 10.0 * np.sqrt(d_act) - 10.0) / q_act))
        if safe > _MAX_BATCH:
            jump = int(safe)
            counts += rng.multinomial(jump, q)
            total += jump
            continue
        expected = float(np.max(d_act / q_act))
        batch = int(min(max(64.0, 2.0 * expected + 8.0 * k), _MAX_BATCH))
        draws = rng.choice(k, size=batch, p=q)
        got = np.bincount(draws, minlength=k)
        if np.all(got >= deficit):
            stop = 0
            for i in np.flatnonzero(active):
                pos = int(np.flatnonzero(draws == i)[deficit[i] - 1])
                stop = max(stop, pos)
            return total + stop + 1
        counts += got
        total += batch


def _measurement_distribution(spectrum: RoundedSpectrum, theta: float):
    """Post-amplification distribution over retained indices: q_i ~ (sigma_i/value_i)^2."""
    retained = spectrum.retained(theta)
    if not retained:
        raise EmptyRetentionError(f"no rounded singular value reaches theta={theta}")
    indices: list[int] = []
    weights: list[float] = []
    for b in retained:
        for i in b.members:
            indices.append(i)
            weights.append((spectrum.sigmas[i] / b.value) ** 2)
    w = np.array(weights)
    return np.array(indices, dtype=np.int64), w / w.sum(), retained


def tomography_shots(z: int, delta: float, tom: str, shot_constant: float = 36.0) -> int:
    """Per-vector shot budget: c*z*ln(z)/delta^2 for l2, c*ln(z)/delta^2 for linf."""
    if delta <= 0:
        return 1
    ln_z = math.log(z) if z > 1 else 0.0
    if tom == "l2":
        raw = shot_constant * z * ln_z / delta**2
    elif tom == "linf":
        raw = shot_constant * ln_z / delta**2
    else:
        raise ValueError(f"unknown tomography norm: {tom!r}")
    return max(1, math.ceil(raw))


@dataclass(frozen=True)
class ExtractionResult:
    """Top-k estimated singular triples with measurement accounting."""

    k: int
    sigma_hats: np.ndarray
    factor_scores: np.ndarray
    ratios: np.ndarray
    U_hat: np.ndarray | None
    V_hat: np.ndarray | None
    retained_indices: tuple[int, ...]
    measurements_used: int
    tomography: NoiseSpec
    theta: float
    epsilon: float
    delta: float
    p_retained: float


def extract_topk(
    s: SvdModel,
    theta: float,
    epsilon: float,
    delta: float,
    side: str = "right",
    tom: str = "l2",
    seed: int = 0,
    shot_constant: float = 36.0,
    ledger: CostLedger | None = None,
) -> ExtractionResult:
    """Simulate the top-k singular vector extraction loop.

    Retained indices are those whose rounded value reaches theta. The
    measurement register follows q_i proportional to (sigma_i/value_i)^2,
    the exact pre-normalization amplitudes, so near-threshold resolution
    loss degrades the coupon collector the way it would on hardware. The
    loop runs until every retained index has been measured as often as its
    tomography budget requires, then per-vector estimates are produced by
    the bounded noise injector.

    delta = 0 is the exact readout regime: vectors are returned unchanged
    and one sighting per index suffices.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    if side not in ("left", "right", "both"):
        raise ValueError(f"unknown side: {side!r}")

    spectrum = sve_round(s, epsilon)
    indices, q, retained = _measurement_distribution(spectrum, theta)
    k = indices.size

    n, m = s.U.shape[0], s.V.shape[0]
    quota = 0
    if side in ("left", "both"):
        quota += tomography_shots(n, delta, tom, shot_constant)
    if side in ("right", "both"):
        quota += tomography_shots(m, delta, tom, shot_constant)
    rng = np.random.default_rng(derive_seed(seed, "coupon"))
    measurements = _measurements_until_quota(q, quota, rng)

    sigma_hats = np.array([spectrum.value_of(int(i)) for i in indices])
    fro2 = s.frobenius**2
    tom_kind = "tomography_l2" if tom == "l2" else "tomography_linf"

    def read_out(basis: np.ndarray, tag: str) -> np.ndarray:
        cols = [
            tomography_noise(basis[:, int(i)], delta, tom, derive_seed(seed, f"{tag}{i}"))
            for i in indices
        ]
        return np.column_stack(cols)

    U_hat = read_out(s.U, "u") if side in ("left", "both") else None
    V_hat = read_out(s.V, "v") if side in ("right", "both") else None

    p_retained = float(sum(b.mass for b in retained))
    if ledger is not None and delta > 0:
        mu = s.frobenius
        base = (s.spectral / theta) * (1.0 / math.sqrt(p_retained)) * (mu / epsilon)
        for z, name in ((n, "left"), (m, "right")):
            if side in (name, "both"):
                dims = k * z if tom == "l2" else k
                ledger.add(
                    f"topk-extraction-{name}-{tom}",
                    f"(||A||/theta)*(1/sqrt(p))*(mu/eps)*({'k*z' if tom == 'l2' else 'k'}/delta^2)"
                    f" = ({s.spectral:.6g}/{theta})*(1/sqrt({p_retained:.6g}))"
                    f"*({mu:.6g}/{epsilon})*({dims}/{delta}^2)",
                    base * dims / delta**2,
                )
    return ExtractionResult(
        k=k,
        sigma_hats=sigma_hats,
        factor_scores=sigma_hats**2,
        ratios=sigma_hats**2 / fro2,
        U_hat=U_hat,
        V_hat=V_hat,
        retained_indices=tuple(int(i) for i in indices),
        measurements_used=measurements,
        tomography=NoiseSpec(kind=tom_kind, magnitude=delta, seed=seed),
        theta=theta,
        epsilon=epsilon,
        delta=delta,
        p_retained=p_retained,
    )


@dataclass(frozen=True)
class CouponStats:
    mean: float
    std: float
    benchmark: float
    k: int
    draws: np.ndarray


def coupon_collector_trials(
    s: SvdModel,
    theta: float,
    epsilon: float,
    trials: int,
    seed: int = 0,
) -> CouponStats:
    """Repeat the measure-until-all-seen process with one copy per index.

    The benchmark line is k * log_{2.4}(k) for k >= 2 and 1 for a single
    coupon; the measurement distribution is the same near-uniform q used by
    the extraction loop, so growing epsilon visibly degrades the mean.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    spectrum = sve_round(s, epsilon)
    _, q, _ = _measurement_distribution(spectrum, theta)
    k = q.size
    draws = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        rng = np.random.default_rng(derive_seed(seed, f"coupon-trial-{t}"))
        draws[t] = _measurements_until_quota(q, 1, rng)
    benchmark = k * math.log(k) / math.log(2.4) if k >= 2 else 1.0
    return CouponStats(
        mean=float(draws.mean()),
        std=float(draws.std()),
        benchmark=benchmark,
        k=k,
        draws=draws,
    )
