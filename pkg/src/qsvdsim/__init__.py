"""Classical, desk-scale simulator for quantum SVD-based data representation.

The package reproduces sampling-based spectrum routines (factor score ratio
sampling, thresholded sum checks, threshold binary search, top-k singular
vector extraction) as seeded stochastic processes over an exact SVD oracle,
verifies the error-propagation bounds empirically, and runs PCA, CA and LSA
pipelines end to end.
"""

from .apps import (
    CaModel,
    LsaModel,
    PcaModel,
    ca_fit,
    doc_similarities,
    lsa_fit,
    lsa_fold_query,
    pca_fit,
    pca_representability,
    pca_transform_matrix,
    pca_transform_vector,
)
from .bounds import bound_du, bound_us, bound_us_half, bound_us_inv, verify_bound
from .experiments import accuracy_vs_error_sweep, fsr_distribution_report, knn_cv
from .noise import (
    NoiseSpec,
    amplitude_estimate,
    derive_seed,
    perturb_matrix_frobenius,
    state_distance,
    tomography_noise,
)
from .oracle import RoundedSpectrum, SvdModel, compute_svd, estimate_spectral_norm, sve_round
from .routines import (
    CostLedger,
    ExtractionResult,
    SpectralSample,
    binary_search_threshold,
    check_fsr_sum,
    conservative_sample_size,
    count_retained,
    coupon_collector_trials,
    exact_selection,
    extract_topk,
    sample_factor_scores,
    select_k_for_variance,
    wald_sample_size,
)
from .runtime import (
    RuntimeParams,
    compute_mu,
    cost_report,
    estimate_delta,
    thresholding_epsilon,
)
from .store import (
    ContingencyTable,
    DataMatrix,
    build_ca_matrix,
    build_contingency,
    load_matrix,
    preprocess,
    stack_rows,
)

__version__ = "0.1.0"
