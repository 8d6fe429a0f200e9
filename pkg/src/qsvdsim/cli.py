"""Command-line front end and experiment dispatcher.

Every subcommand writes its outputs under ``--out``: a ``params.json`` with
the fully resolved configuration, one or more CSV result files, and a
``cost_ledger.txt`` when the invoked routines have asymptotic costs to report.
With a fixed ``--seed`` every command is reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import apps, experiments, routines, runtime, serialize, store
from .errors import QsvdsimError
from .noise import perturb_matrix_frobenius
from .oracle import compute_svd
from .routines import CostLedger


@dataclass
class ExperimentConfig:
    command: str
    out: Path
    seed: int = 0
    options: dict = field(default_factory=dict)


def _write_csv(path: Path, header: str, rows: list[str]) -> None:
    path.write_text("\n".join([header] + rows) + "\n")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _load_input_matrix(opts: dict) -> store.DataMatrix:
    paths = opts.get("input")
    if not paths:
        raise ValueError("an input matrix is required (--input)")
    mats = [store.load_matrix(p, opts.get("format", "csv"), opts.get("header", False)) for p in paths]
    m = mats[0] if len(mats) == 1 else store.stack_rows(mats)
    if opts.get("center") or opts.get("normalize"):
        m = store.preprocess(m, center=opts.get("center", False),
                             spectral_normalize=opts.get("normalize", False))
    return m


def _get_svd(opts: dict):
    if opts.get("model"):
        return serialize.load_svd_model(opts["model"])
    return compute_svd(_load_input_matrix(opts))


def _targets(opts: dict) -> dict:
    return {
        "p_target": opts.get("p_target"),
        "k_target": opts.get("k_target"),
        "theta_target": opts.get("theta"),
    }


def _cmd_preprocess(cfg: ExperimentConfig, out: Path) -> dict:
    m = _load_input_matrix(cfg.options)
    fmt = cfg.options.get("out_format", "csv")
    if fmt == "csv":
        serialize.save_array_csv(out / "matrix.csv", m.values)
        matrix_file = "matrix.csv"
    else:
        import struct

        with open(out / "matrix.raw", "wb") as fh:
            fh.write(struct.pack("<QQ", *m.shape))
            fh.write(np.ascontiguousarray(m.values, dtype="<f8").tobytes())
        matrix_file = "matrix.raw"
    _write_csv(
        out / "summary.csv",
        "rows,cols,frobenius,nnz,row_mean_centered,spectral_normalized",
        [
            f"{m.shape[0]},{m.shape[1]},{_fmt(m.frobenius)},{m.nnz},"
            f"{int(m.row_mean_centered)},{int(m.spectral_normalized)}"
        ],
    )
    return {"matrix_file": matrix_file, "frobenius": m.frobenius, "shape": list(m.shape)}


def _cmd_svd(cfg: ExperimentConfig, out: Path) -> dict:
    m = _load_input_matrix(cfg.options)
    s = compute_svd(m, rank_tol=cfg.options.get("rank_tol", 1e-10))
    serialize.save_svd_model(s, out / "model")
    _write_csv(
        out / "spectrum.csv",
        "index,sigma",
        [f"{i + 1},{_fmt(float(v))}" for i, v in enumerate(s.sigmas)],
    )
    return {"rank": s.rank, "spectral": s.spectral, "frobenius": s.frobenius}


def _cmd_sample_fsr(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    s = _get_svd(opts)
    ledger = CostLedger()
    gamma = opts.get("gamma", 0.0316)
    n_samples = opts.get("n_samples") or max(1, round(1.0 / gamma**2))
    sample = routines.sample_factor_scores(
        s, gamma, opts["epsilon"], n_samples, seed=cfg.seed, ledger=ledger
    )
    _write_csv(
        out / "sample.csv",
        "sigma_hat,count,ratio_wald,ratio_sve,reported",
        [
            f"{_fmt(b.sigma_hat)},{b.count},{_fmt(b.ratio_wald)},"
            f"{_fmt(b.ratio_sve)},{int(b.reported)}"
            for b in sample.buckets
        ],
    )
    summary: dict = {"N": sample.N, "buckets": len(sample.buckets)}
    if opts.get("p_target") is not None:
        sel = routines.select_k_for_variance(
            sample, opts["p_target"], theta_rule=opts.get("theta_rule", "midpoint")
        )
        _write_csv(
            out / "selection.csv",
            "k,p_est,theta",
            [f"{sel.k},{_fmt(sel.p_est)},{_fmt(sel.theta)}"],
        )
        summary.update({"k": sel.k, "p_est": sel.p_est, "theta": sel.theta})
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return summary


def _cmd_check_sum(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    s = _get_svd(opts)
    ledger = CostLedger()
    p = routines.check_fsr_sum(
        s,
        theta=opts["theta"],
        epsilon=opts["epsilon"],
        eta=opts.get("eta", 0.05),
        noise_mode=opts.get("mode", "relative"),
        seed=cfg.seed,
        ledger=ledger,
    )
    _write_csv(out / "result.csv", "p_estimate", [_fmt(p)])
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return {"p_estimate": p}


def _cmd_find_threshold(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    s = _get_svd(opts)
    ledger = CostLedger()
    res = routines.binary_search_threshold(
        s,
        p_target=opts["p_target"],
        epsilon=opts["epsilon"],
        eta=opts.get("eta", 0.05),
        seed=cfg.seed,
        probe_mode=opts.get("mode", "additive"),
        ledger=ledger,
    )
    theta = res.theta if res.theta is not None else -1.0
    _write_csv(
        out / "result.csv",
        "theta,iterations,max_iterations",
        [f"{_fmt(theta)},{res.iterations},{res.max_iterations}"],
    )
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return {"theta": theta, "iterations": res.iterations}


def _cmd_count_k(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    s = _get_svd(opts)
    ledger = CostLedger()
    k = routines.count_retained(
        s,
        theta=opts["theta"],
        epsilon=opts["epsilon"],
        mode=opts.get("mode", "exact"),
        eta=opts.get("eta", 0.0),
        seed=cfg.seed,
        ledger=ledger,
    )
    _write_csv(out / "result.csv", "k", [str(k)])
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return {"k": k}


def _cmd_extract_topk(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    s = _get_svd(opts)
    ledger = CostLedger()
    res = routines.extract_topk(
        s,
        theta=opts["theta"],
        epsilon=opts["epsilon"],
        delta=opts.get("delta", 0.0),
        side=opts.get("side", "right"),
        tom=opts.get("tom", "l2"),
        seed=cfg.seed,
        ledger=ledger,
    )
    _write_csv(
        out / "sigma_hats.csv",
        "index,sigma_hat,ratio",
        [
            f"{i},{_fmt(float(sh))},{_fmt(float(r))}"
            for i, sh, r in zip(res.retained_indices, res.sigma_hats, res.ratios)
        ],
    )
    if res.U_hat is not None:
        serialize.save_array_csv(out / "U_hat.csv", res.U_hat)
    if res.V_hat is not None:
        serialize.save_array_csv(out / "V_hat.csv", res.V_hat)
    _write_csv(
        out / "accounting.csv",
        "k,measurements_used,p_retained",
        [f"{res.k},{res.measurements_used},{_fmt(res.p_retained)}"],
    )
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return {"k": res.k, "measurements_used": res.measurements_used}


def _cmd_pca(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    m = _load_input_matrix(opts)
    ledger = CostLedger()
    model = apps.pca_fit(
        m,
        **_targets(opts),
        gamma=opts.get("gamma", 0.0316),
        epsilon=opts["epsilon"],
        delta=opts.get("delta"),
        xi=opts.get("xi"),
        n_samples=opts.get("n_samples"),
        eta=opts.get("eta", 0.05),
        seed=cfg.seed,
        use_binary_search=opts.get("binary_search", False),
        theta_rule=opts.get("theta_rule", "midpoint"),
        tom=opts.get("tom", "l2"),
        ledger=ledger,
    )
    serialize.save_pca_model(model, out / "model")
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return {"k": model.k, "p_retained": model.p_retained, "theta": model.theta}


def _load_corpus(path: str) -> list[list[str]]:
    text = Path(path).read_text()
    return [line.split() for line in text.splitlines() if line.strip()]


def _cmd_ca(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    if opts.get("table"):
        counts = serialize.load_array_csv(Path(opts["table"]))
        table = store.ContingencyTable(
            counts,
            tuple(f"row{i}" for i in range(counts.shape[0])),
            tuple(f"col{j}" for j in range(counts.shape[1])),
        )
    else:
        table = store.build_contingency(
            _load_corpus(opts["corpus"]),
            drop_stopwords=opts.get("drop_stopwords", False),
            min_doc_freq=opts.get("min_doc_freq", 2),
            max_doc_ratio=opts.get("max_doc_ratio", 0.5),
        )
    ledger = CostLedger()
    model = apps.ca_fit(
        table,
        **_targets(opts),
        gamma=opts.get("gamma", 0.0316),
        epsilon=opts["epsilon"],
        delta=opts.get("delta", 0.0),
        n_samples=opts.get("n_samples"),
        seed=cfg.seed,
        theta_rule=opts.get("theta_rule", "midpoint"),
        laplace_smoothing=opts.get("laplace", 0.0),
        ledger=ledger,
    )
    serialize.save_ca_model(model, out / "model")
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return {"k": model.k, "theta": model.theta}


def _cmd_lsa(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    if opts.get("corpus"):
        table = store.build_contingency(
            _load_corpus(opts["corpus"]),
            drop_stopwords=opts.get("drop_stopwords", False),
            min_doc_freq=opts.get("min_doc_freq", 2),
            max_doc_ratio=opts.get("max_doc_ratio", 0.5),
        )
        # contingency rows are documents; LSA wants words by documents
        m = store.DataMatrix.from_values(table.counts.T)
    else:
        m = _load_input_matrix(opts)
    ledger = CostLedger()
    model = apps.lsa_fit(
        m,
        **_targets(opts),
        gamma=opts.get("gamma", 0.0316),
        epsilon=opts["epsilon"],
        delta=opts.get("delta", 0.0),
        n_samples=opts.get("n_samples"),
        seed=cfg.seed,
        theta_rule=opts.get("theta_rule", "midpoint"),
        ledger=ledger,
    )
    serialize.save_lsa_model(model, out / "model")
    (out / "cost_ledger.txt").write_text("\n".join(ledger.lines()) + "\n")
    return {"k": model.k, "theta": model.theta}


def _cmd_fold_query(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    model = serialize.load_lsa_model(opts["model"])
    x_q = serialize.load_array_csv(Path(opts["query"])).ravel()
    rep = apps.lsa_fold_query(model, x_q)
    sims = apps.doc_similarities(model, rep, metric=opts.get("metric", "cosine"))
    _write_csv(
        out / "representation.csv",
        "factor,value",
        [f"{i + 1},{_fmt(float(v))}" for i, v in enumerate(rep)],
    )
    _write_csv(
        out / "similarities.csv",
        "document,similarity",
        [f"{i + 1},{_fmt(float(v))}" for i, v in enumerate(sims)],
    )
    return {"k": model.k}


def _cmd_representability(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    m = _load_input_matrix(opts)
    s = compute_svd(m)
    grid = opts.get("p_grid") or [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    points = apps.pca_representability(m, s, grid)
    _write_csv(
        out / "representability.csv",
        "p,k_p,alpha,beta,zero_rows",
        [
            f"{_fmt(pt.p)},{pt.k_p},{_fmt(pt.alpha)},{_fmt(pt.beta)},{pt.zero_rows}"
            for pt in points
        ],
    )
    return {"alpha_min": min(pt.alpha for pt in points)}


def _cmd_runtime_params(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    m = _load_input_matrix(opts)
    s = compute_svd(m)
    mu = runtime.compute_mu(m)
    sel = routines.exact_selection(s, opts.get("p_target", 0.85))
    k = sel.k
    eps_half = runtime.thresholding_epsilon(s.sigmas, k, "half_gap")
    eps_full = runtime.thresholding_epsilon(s.sigmas, k, "full_gap")
    delta = None
    if opts.get("xi") is not None:
        delta = runtime.estimate_delta(opts["xi"], k, eps_full, s.spectral)
    rows = [
        f"mu,{_fmt(mu.mu)}",
        f"best_p,{_fmt(mu.best_p)}",
        f"mu_winner,{mu.winner}",
        f"frobenius,{_fmt(m.frobenius)}",
        f"spectral,{_fmt(s.spectral)}",
        f"k,{k}",
        f"exact_p,{_fmt(sel.p_est)}",
        f"theta,{_fmt(sel.theta)}",
        f"theta_last_retained,{_fmt(float(s.sigmas[k - 1]))}",
        f"thresholding_eps_half_gap,{_fmt(eps_half)}",
        f"thresholding_eps_full_gap,{_fmt(eps_full)}",
    ]
    if delta is not None:
        rows.append(f"delta,{_fmt(delta)}")
    _write_csv(out / "runtime_params.csv", "parameter,value", rows)
    return {"mu": mu.mu, "k": k, "theta": sel.theta}


def _cmd_cost_report(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    rp = runtime.RuntimeParams(
        mu=opts["mu"],
        best_p=opts.get("best_p", 1.0),
        spectral=opts.get("spectral", 1.0),
        frobenius=opts.get("frobenius", opts["mu"]),
        theta=opts["theta"],
        thresholding_eps=opts["epsilon"],
        k=opts["k"],
        p=opts.get("p", 0.85),
        delta=opts["delta"],
        gamma=opts.get("gamma", 0.0316),
        n=opts["n"],
        m=opts["m"],
        eta=opts.get("eta", 0.1),
        xi=opts.get("xi"),
        r=opts.get("r"),
    )
    rows = runtime.cost_report(rp, ladder=opts.get("ladder"))
    (out / "cost_report.csv").write_text(runtime.cost_report_csv(rows))
    return {"rows": len(rows)}


def _cmd_coupon(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    s = _get_svd(opts)
    stats = routines.coupon_collector_trials(
        s,
        theta=opts["theta"],
        epsilon=opts["epsilon"],
        trials=opts.get("trials", 1000),
        seed=cfg.seed,
    )
    _write_csv(
        out / "coupon.csv",
        "k,mean,std,benchmark,trials",
        [f"{stats.k},{_fmt(stats.mean)},{_fmt(stats.std)},{_fmt(stats.benchmark)},"
         f"{stats.draws.size}"],
    )
    return {"mean": stats.mean, "benchmark": stats.benchmark}


def _cmd_perturb(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    m = _load_input_matrix(opts)
    pert = perturb_matrix_frobenius(m.values, opts["xi"], seed=cfg.seed)
    serialize.save_array_csv(out / "perturbed.csv", pert)
    err = float(np.linalg.norm(pert - m.values))
    _write_csv(out / "error.csv", "xi,observed_frobenius_error", [f"{_fmt(opts['xi'])},{_fmt(err)}"])
    return {"observed_error": err}


def _cmd_knn_eval(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    X = serialize.load_array_csv(Path(opts["features"]))
    labels = np.loadtxt(opts["labels"], dtype=np.int64, ndmin=1)
    res = experiments.knn_cv(
        X,
        labels,
        neighbors=opts.get("neighbors", 7),
        folds=opts.get("folds", 10),
        seed=cfg.seed,
        stratified=not opts.get("plain_folds", False),
    )
    _write_csv(
        out / "accuracy.csv",
        "fold,accuracy",
        [f"{i + 1},{_fmt(a)}" for i, a in enumerate(res.per_fold)]
        + [f"mean,{_fmt(res.accuracy)}"],
    )
    return {"accuracy": res.accuracy}


def _cmd_sweep(cfg: ExperimentConfig, out: Path) -> dict:
    opts = cfg.options
    m = _load_input_matrix(opts)
    labels = np.loadtxt(opts["labels"], dtype=np.int64, ndmin=1)
    model = serialize.load_pca_model(opts["model"])
    rep = apps.pca_transform_matrix(model, m).Y
    res = experiments.accuracy_vs_error_sweep(
        rep,
        labels,
        xi_grid=opts["xi_grid"],
        trials=opts.get("trials", 3),
        neighbors=opts.get("neighbors", 7),
        folds=opts.get("folds", 10),
        seed=cfg.seed,
    )
    (out / "sweep.csv").write_text(res.csv())
    _write_csv(
        out / "summary.csv",
        "benchmark_accuracy,spearman_rho,spearman_pvalue",
        [f"{_fmt(res.benchmark_accuracy)},{_fmt(res.spearman_rho)},{_fmt(res.spearman_pvalue)}"],
    )
    return {"benchmark": res.benchmark_accuracy, "rho": res.spearman_rho}


def _cmd_fsr_report(cfg: ExperimentConfig, out: Path) -> dict:
    s = _get_svd(cfg.options)
    experiments.fsr_distribution_report(s, out / "fsr.csv")
    return {"rank": s.rank}


_HANDLERS = {
    "preprocess": _cmd_preprocess,
    "svd": _cmd_svd,
    "sample-fsr": _cmd_sample_fsr,
    "check-sum": _cmd_check_sum,
    "find-threshold": _cmd_find_threshold,
    "count-k": _cmd_count_k,
    "extract-topk": _cmd_extract_topk,
    "pca": _cmd_pca,
    "ca": _cmd_ca,
    "lsa": _cmd_lsa,
    "fold-query": _cmd_fold_query,
    "representability": _cmd_representability,
    "runtime-params": _cmd_runtime_params,
    "cost-report": _cmd_cost_report,
    "coupon": _cmd_coupon,
    "perturb": _cmd_perturb,
    "knn-eval": _cmd_knn_eval,
    "sweep": _cmd_sweep,
    "fsr-report": _cmd_fsr_report,
}


def run_experiment(cfg: ExperimentConfig) -> int:
    """Dispatch a configuration to its pipeline and write the artifacts.

    Returns 0 on success. Failures leave a machine-readable ``error.json``
    in the output directory and return 1.
    """
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    params = {"command": cfg.command, "seed": cfg.seed, "out": str(cfg.out)}
    params.update({k: v for k, v in sorted(cfg.options.items())})
    (out / "params.json").write_text(
        json.dumps(params, indent=2, sort_keys=True, default=str) + "\n"
    )
    try:
        handler = _HANDLERS[cfg.command]
    except KeyError:
        (out / "error.json").write_text(
            json.dumps({"error": "UnknownCommand", "message": cfg.command}) + "\n"
        )
        print(f"unknown command: {cfg.command}", file=sys.stderr)
        return 1
    try:
        summary = handler(cfg, out)
    except (QsvdsimError, ValueError, OSError) as exc:
        (out / "error.json").write_text(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        print(f"error: {exc}", file=sys.stderr)
        return 1
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n"
    )
    return 0


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _add_matrix_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", action="append", default=None, required=False,
                   help="input matrix path (repeat to stack rows)")
    p.add_argument("--format", choices=["csv", "idx", "raw_f64"], default="csv")
    p.add_argument("--header", action="store_true", help="skip one CSV header line")
    p.add_argument("--center", action="store_true", help="column-mean center after loading")
    p.add_argument("--normalize", action="store_true", help="divide by the spectral norm")


def _add_model_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", default=None, help="saved SVD model directory")


def _add_targets(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-target", type=float, default=None)
    p.add_argument("--k-target", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsvdsim",
        description="Simulated quantum SVD routines for PCA, CA and LSA",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="qsvdsim-out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="load, center/normalize and re-emit a matrix")
    _add_matrix_args(p)
    p.add_argument("--out-format", choices=["csv", "raw_f64"], default="csv")

    p = sub.add_parser("svd", help="exact SVD oracle, exported as a model directory")
    _add_matrix_args(p)
    p.add_argument("--rank-tol", type=float, default=1e-10, dest="rank_tol")

    p = sub.add_parser("sample-fsr", help="sample the factor score ratio distribution")
    _add_matrix_args(p)
    _add_model_arg(p)
    p.add_argument("--gamma", type=float, default=0.0316)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n-samples", type=int, default=None)
    p.add_argument("--p-target", type=float, default=None)
    p.add_argument("--theta-rule", choices=["midpoint", "last"], default="midpoint")

    p = sub.add_parser("check-sum", help="estimate the ratio mass above a threshold")
    _add_matrix_args(p)
    _add_model_arg(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--mode", choices=["exact", "relative", "additive"], default="relative")

    p = sub.add_parser("find-threshold", help="binary search the singular value threshold")
    _add_matrix_args(p)
    _add_model_arg(p)
    p.add_argument("--p-target", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--mode", choices=["exact", "additive"], default="additive")

    p = sub.add_parser("count-k", help="count singular values above a threshold")
    _add_matrix_args(p)
    _add_model_arg(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--mode", choices=["exact", "relative"], default="exact")
    p.add_argument("--eta", type=float, default=0.0)

    p = sub.add_parser("extract-topk", help="extract top-k singular vectors with readout noise")
    _add_matrix_args(p)
    _add_model_arg(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--side", choices=["left", "right", "both"], default="right")
    p.add_argument("--tom", choices=["l2", "linf"], default="l2")

    p = sub.add_parser("pca", help="fit a PCA model")
    _add_matrix_args(p)
    _add_targets(p)
    p.add_argument("--gamma", type=float, default=0.0316)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--n-samples", type=int, default=None)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--binary-search", action="store_true")
    p.add_argument("--theta-rule", choices=["midpoint", "last"], default="midpoint")
    p.add_argument("--tom", choices=["l2", "linf"], default="l2")

    p = sub.add_parser("ca", help="fit a correspondence analysis model")
    p.add_argument("--table", default=None, help="contingency counts CSV")
    p.add_argument("--corpus", default=None, help="text file, one document per line")
    p.add_argument("--drop-stopwords", action="store_true")
    p.add_argument("--min-doc-freq", type=int, default=2)
    p.add_argument("--max-doc-ratio", type=float, default=0.5)
    _add_targets(p)
    p.add_argument("--gamma", type=float, default=0.0316)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--n-samples", type=int, default=None)
    p.add_argument("--theta-rule", choices=["midpoint", "last"], default="midpoint")
    p.add_argument("--laplace", type=float, default=0.0)

    p = sub.add_parser("lsa", help="fit an LSA model over a words-by-documents matrix")
    _add_matrix_args(p)
    p.add_argument("--corpus", default=None, help="text file, one document per line")
    p.add_argument("--drop-stopwords", action="store_true")
    p.add_argument("--min-doc-freq", type=int, default=2)
    p.add_argument("--max-doc-ratio", type=float, default=0.5)
    _add_targets(p)
    p.add_argument("--gamma", type=float, default=0.0316)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--n-samples", type=int, default=None)
    p.add_argument("--theta-rule", choices=["midpoint", "last"], default="midpoint")

    p = sub.add_parser("fold-query", help="fold a query vector into an LSA document space")
    p.add_argument("--model", required=True, help="saved LSA model directory")
    p.add_argument("--query", required=True, help="CSV holding the n-vector")
    p.add_argument("--metric", choices=["cosine", "inner"], default="cosine")

    p = sub.add_parser("representability", help="projection-mass profile over a p grid")
    _add_matrix_args(p)
    p.add_argument("--p-grid", type=_float_list, default=None, dest="p_grid")

    p = sub.add_parser("runtime-params", help="evaluate mu, theta, epsilon and friends")
    _add_matrix_args(p)
    p.add_argument("--p-target", type=float, default=0.85)
    p.add_argument("--xi", type=float, default=None)

    p = sub.add_parser("cost-report", help="evaluate the cost expressions numerically")
    for name in ("mu", "theta", "epsilon", "delta"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=float, default=0.85)
    p.add_argument("--gamma", type=float, default=0.0316)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--spectral", type=float, default=1.0)
    p.add_argument("--frobenius", type=float, default=None)
    p.add_argument("--ladder", type=_int_list, default=None)

    p = sub.add_parser("coupon", help="coupon-collector measurement statistics")
    _add_matrix_args(p)
    _add_model_arg(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("perturb", help="inject Frobenius-bounded truncated Gaussian noise")
    _add_matrix_args(p)
    p.add_argument("--xi", type=float, required=True)

    p = sub.add_parser("knn-eval", help="k-NN cross-validation accuracy")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--neighbors", type=int, default=7)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--plain-folds", action="store_true")

    p = sub.add_parser("sweep", help="accuracy-vs-error sweep over a xi grid")
    _add_matrix_args(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--model", required=True, help="saved PCA model directory")
    p.add_argument("--xi-grid", type=_float_list, required=True, dest="xi_grid")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--neighbors", type=int, default=7)
    p.add_argument("--folds", type=int, default=10)

    p = sub.add_parser("fsr-report", help="factor score ratio distribution CSV")
    _add_matrix_args(p)
    _add_model_arg(p)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "seed", "out")}
    opts = {k: v for k, v in opts.items() if v is not None and v is not False}
    return ExperimentConfig(
        command=args.command, out=Path(args.out), seed=args.seed, options=opts
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run_experiment(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
