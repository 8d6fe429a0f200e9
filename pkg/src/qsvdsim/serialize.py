"""Directory-based export and import of fitted models.

Matrices are written as plain CSV (one row per line, 17 significant digits,
enough to round-trip doubles exactly) next to a ``meta.json`` carrying the
parameters needed to reproduce the fit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .apps import CaModel, LsaModel, PcaModel
from .oracle import SvdModel

_FMT = "%.17g"


def save_array_csv(path: Path, arr: np.ndarray) -> None:
    arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
    np.savetxt(path, arr, fmt=_FMT, delimiter=",")


def load_array_csv(path: Path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64))


def _write_meta(directory: Path, meta: dict) -> None:
    (directory / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _read_meta(directory: Path) -> dict:
    return json.loads((directory / "meta.json").read_text())


def save_svd_model(s: SvdModel, directory: str | Path, extra_meta: dict | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_array_csv(directory / "sigmas.csv", s.sigmas[None, :])
    save_array_csv(directory / "U.csv", s.U)
    save_array_csv(directory / "V.csv", s.V)
    meta = {
        "kind": "svd",
        "rank": s.rank,
        "degenerate_groups": [list(g) for g in s.degenerate_groups],
    }
    meta.update(extra_meta or {})
    _write_meta(directory, meta)
    return directory


def load_svd_model(directory: str | Path) -> SvdModel:
    directory = Path(directory)
    meta = _read_meta(directory)
    sigmas = load_array_csv(directory / "sigmas.csv").ravel()
    U = load_array_csv(directory / "U.csv")
    V = load_array_csv(directory / "V.csv")
    return SvdModel(
        sigmas=sigmas,
        U=U,
        V=V,
        rank=int(meta["rank"]),
        degenerate_groups=tuple(tuple(g) for g in meta.get("degenerate_groups", [])),
    )


def _provenance(model) -> dict:
    return {
        "theta": model.theta,
        "epsilon": model.epsilon,
        "delta": model.delta,
        "gamma": model.gamma,
        "k": model.k,
        "seed": model.seed,
    }


def save_pca_model(model: PcaModel, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_array_csv(directory / "components.csv", model.components)
    save_array_csv(directory / "sigmas.csv", model.sigmas[None, :])
    save_array_csv(directory / "ratios.csv", model.ratios[None, :])
    meta = {"kind": "pca", "p": model.p_retained, "p_retained": model.p_retained}
    meta.update(_provenance(model))
    _write_meta(directory, meta)
    return directory


def load_pca_model(directory: str | Path) -> PcaModel:
    directory = Path(directory)
    meta = _read_meta(directory)
    return PcaModel(
        components=load_array_csv(directory / "components.csv"),
        sigmas=load_array_csv(directory / "sigmas.csv").ravel(),
        ratios=load_array_csv(directory / "ratios.csv").ravel(),
        p_retained=float(meta["p_retained"]),
        theta=float(meta["theta"]),
        epsilon=float(meta["epsilon"]),
        delta=float(meta["delta"]),
        gamma=float(meta["gamma"]),
        seed=int(meta["seed"]),
    )


def save_ca_model(model: CaModel, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_array_csv(directory / "row_coords.csv", model.row_coords)
    save_array_csv(directory / "col_coords.csv", model.col_coords)
    save_array_csv(directory / "sigmas.csv", model.sigmas[None, :])
    save_array_csv(directory / "ratios.csv", model.ratios[None, :])
    meta = {
        "kind": "ca",
        "p": float(model.ratios.sum()),
        "bound_row": model.bound_row,
        "bound_col": model.bound_col,
    }
    meta.update(_provenance(model))
    _write_meta(directory, meta)
    return directory


def load_ca_model(directory: str | Path) -> CaModel:
    directory = Path(directory)
    meta = _read_meta(directory)
    return CaModel(
        row_coords=load_array_csv(directory / "row_coords.csv"),
        col_coords=load_array_csv(directory / "col_coords.csv"),
        sigmas=load_array_csv(directory / "sigmas.csv").ravel(),
        ratios=load_array_csv(directory / "ratios.csv").ravel(),
        bound_row=float(meta["bound_row"]),
        bound_col=float(meta["bound_col"]),
        theta=float(meta["theta"]),
        epsilon=float(meta["epsilon"]),
        delta=float(meta["delta"]),
        gamma=float(meta["gamma"]),
        seed=int(meta["seed"]),
    )


def save_lsa_model(model: LsaModel, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_array_csv(directory / "word_space.csv", model.word_space)
    save_array_csv(directory / "doc_space.csv", model.doc_space)
    save_array_csv(directory / "word_half.csv", model.word_half)
    save_array_csv(directory / "doc_half.csv", model.doc_half)
    save_array_csv(directory / "fold_matrix.csv", model.fold_matrix)
    save_array_csv(directory / "sigmas.csv", model.sigmas[None, :])
    meta = {
        "kind": "lsa",
        "p": model.p_retained,
        "bound_us": model.bound_us,
        "bound_us_half": model.bound_us_half,
        "bound_us_inv": model.bound_us_inv,
    }
    meta.update(_provenance(model))
    _write_meta(directory, meta)
    return directory


def load_lsa_model(directory: str | Path) -> LsaModel:
    directory = Path(directory)
    meta = _read_meta(directory)
    return LsaModel(
        word_space=load_array_csv(directory / "word_space.csv"),
        doc_space=load_array_csv(directory / "doc_space.csv"),
        word_half=load_array_csv(directory / "word_half.csv"),
        doc_half=load_array_csv(directory / "doc_half.csv"),
        fold_matrix=load_array_csv(directory / "fold_matrix.csv"),
        sigmas=load_array_csv(directory / "sigmas.csv").ravel(),
        p_retained=float(meta["p"]),
        bound_us=float(meta["bound_us"]),
        bound_us_half=float(meta["bound_us_half"]),
        bound_us_inv=float(meta["bound_us_inv"]),
        theta=float(meta["theta"]),
        epsilon=float(meta["epsilon"]),
        delta=float(meta["delta"]),
        gamma=float(meta["gamma"]),
        seed=int(meta["seed"]),
    )
