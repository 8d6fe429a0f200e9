"""Dataset ingestion, preprocessing and contingency-table construction.

A :class:`DataMatrix` is a dense real matrix together with the metadata a
sampling-based pipeline needs up front: the l2 norm of every row and the
Frobenius norm (the classical mirror of a quantum-access data structure),
plus provenance flags recording which preprocessing steps have been applied.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateInputError,
    EmptyVocabularyError,
    MatrixFormatError,
    NumericError,
)

IDX_MAGIC_IMAGES = 0x00000803
IDX_MAGIC_LABELS = 0x00000801

_STOPWORDS_PATH = Path(__file__).parent / "data" / "stopwords_en.txt"
_stopwords_cache: frozenset[str] | None = None


def english_stopwords() -> frozenset[str]:
    """Built-in English stop-word list shipped as a data file."""
    global _stopwords_cache
    if _stopwords_cache is None:
        words = []
        for line in _STOPWORDS_PATH.read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                words.append(line.lower())
        _stopwords_cache = frozenset(words)
    return _stopwords_cache


@dataclass(frozen=True)
class DataMatrix:
    """Dense matrix plus row norms, Frobenius norm and provenance flags."""

    values: np.ndarray
    row_norms: np.ndarray
    frobenius: float
    nnz: int
    row_mean_centered: bool = False
    spectral_normalized: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @classmethod
    def from_values(
        cls,
        values: np.ndarray,
        row_mean_centered: bool = False,
        spectral_normalized: bool = False,
    ) -> "DataMatrix":
        """Wrap an array, computing all metadata eagerly."""
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise MatrixFormatError(f"expected a 2-d matrix, got shape {values.shape}")
        if values.size == 0:
            raise DegenerateInputError("matrix has no entries")
        if not np.all(np.isfinite(values)):
            raise NumericError("matrix contains non-finite entries")
        row_norms = np.linalg.norm(values, axis=1)
        frobenius = float(np.linalg.norm(values))
        nnz = int(np.count_nonzero(values))
        values.setflags(write=False)
        row_norms.setflags(write=False)
        return cls(
            values=values,
            row_norms=row_norms,
            frobenius=frobenius,
            nnz=nnz,
            row_mean_centered=row_mean_centered,
            spectral_normalized=spectral_normalized,
        )

    def check_metadata(self, rel_tol: float = 1e-10) -> None:
        """Verify stored metadata against a recomputation from the values."""
        norms = np.linalg.norm(self.values, axis=1)
        fro = np.linalg.norm(self.values)
        scale = max(fro, 1.0)
        if not np.allclose(norms, self.row_norms, rtol=rel_tol, atol=rel_tol * scale):
            raise NumericError("stored row norms disagree with the values")
        if abs(fro**2 - float(np.sum(self.row_norms**2))) > rel_tol * max(fro**2, 1.0):
            raise NumericError("Frobenius norm disagrees with the row norms")
        if abs(fro - self.frobenius) > rel_tol * scale:
            raise NumericError("stored Frobenius norm disagrees with the values")


@dataclass(frozen=True)
class ContingencyTable:
    """Non-negative co-occurrence counts with row and column labels."""

    counts: np.ndarray
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        counts = np.ascontiguousarray(self.counts, dtype=np.float64)
        if counts.ndim != 2:
            raise MatrixFormatError("contingency counts must be a 2-d matrix")
        if np.any(counts < 0):
            raise DegenerateInputError("contingency counts must be non-negative")
        if counts.sum() <= 0:
            raise DegenerateInputError("contingency table has zero total count")
        if len(self.row_labels) != counts.shape[0] or len(self.col_labels) != counts.shape[1]:
            raise MatrixFormatError("label count does not match table shape")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True)
class CaMatrixResult:
    """Standardized-residual matrix plus the marginals that built it."""

    matrix: DataMatrix
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    dropped_rows: tuple[str, ...] = ()
    dropped_cols: tuple[str, ...] = ()


def _load_csv(path: Path, header: bool) -> np.ndarray:
    text = path.read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if header:
        lines = lines[1:]
    if not lines:
        raise MatrixFormatError(f"{path}: no data rows")
    try:
        return np.array(
            [[float(tok) for tok in ln.split(",")] for ln in lines], dtype=np.float64
        )
    except ValueError:
        pass  # fall through and locate the offending cell
    rows = []
    width = None
    for i, ln in enumerate(lines):
        toks = ln.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise MatrixFormatError(
                f"{path}: row {i + 1} has {len(toks)} columns, expected {width}"
            )
        row = []
        for j, tok in enumerate(toks):
            try:
                row.append(float(tok))
            except ValueError:
                raise MatrixFormatError(
                    f"{path}: cannot parse value at row {i + 1}, column {j + 1}: {tok!r}"
                ) from None
        rows.append(row)
    return np.array(rows, dtype=np.float64)


def _load_idx(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < 4:
        raise MatrixFormatError(f"{path}: too short for an idx header")
    (magic,) = struct.unpack(">I", raw[:4])
    if magic == IDX_MAGIC_IMAGES:
        if len(raw) < 16:
            raise MatrixFormatError(f"{path}: truncated idx image header")
        count, rows, cols = struct.unpack(">III", raw[4:16])
        expected = 16 + count * rows * cols
        if len(raw) != expected:
            raise MatrixFormatError(
                f"{path}: idx payload is {len(raw) - 16} bytes, header promises "
                f"{count}x{rows}x{cols}={count * rows * cols}"
            )
        data = np.frombuffer(raw, dtype=np.uint8, offset=16)
        return data.reshape(count, rows * cols).astype(np.float64)
    if magic == IDX_MAGIC_LABELS:
        if len(raw) < 8:
            raise MatrixFormatError(f"{path}: truncated idx label header")
        (count,) = struct.unpack(">I", raw[4:8])
        if len(raw) != 8 + count:
            raise MatrixFormatError(
                f"{path}: idx payload is {len(raw) - 8} bytes, header promises {count}"
            )
        data = np.frombuffer(raw, dtype=np.uint8, offset=8)
        return data.reshape(count, 1).astype(np.float64)
    raise MatrixFormatError(f"{path}: unknown idx magic 0x{magic:08x}")


def _load_raw_f64(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < 16:
        raise MatrixFormatError(f"{path}: too short for a raw_f64 header")
    n, m = struct.unpack("<QQ", raw[:16])
    expected = 16 + 8 * n * m
    if len(raw) != expected:
        raise MatrixFormatError(
            f"{path}: raw_f64 payload is {len(raw) - 16} bytes, header promises {8 * n * m}"
        )
    data = np.frombuffer(raw, dtype="<f8", offset=16)
    return data.reshape(n, m).copy()


def load_matrix(path: str | Path, format: str = "csv", header: bool = False) -> DataMatrix:
    """Load a dense matrix from disk with metadata computed eagerly.

    Supported formats: ``csv`` (comma separated, no header unless
    ``header=True``), ``idx`` (MNIST distribution format, big endian) and
    ``raw_f64`` (two little-endian u64 for the shape, then row-major
    little-endian doubles).
    """
    path = Path(path)
    if not path.exists():
        raise MatrixFormatError(f"{path}: file not found")
    if format == "csv":
        values = _load_csv(path, header=header)
    elif format == "idx":
        values = _load_idx(path)
    elif format == "raw_f64":
        values = _load_raw_f64(path)
    else:
        raise MatrixFormatError(f"unknown matrix format: {format!r}")
    return DataMatrix.from_values(values)


def stack_rows(matrices: Sequence[DataMatrix]) -> DataMatrix:
    """Concatenate matrices row-wise (e.g. a train and a test split)."""
    if not matrices:
        raise DegenerateInputError("nothing to stack")
    widths = {m.shape[1] for m in matrices}
    if len(widths) != 1:
        raise MatrixFormatError(f"column counts differ across inputs: {sorted(widths)}")
    return DataMatrix.from_values(np.vstack([m.values for m in matrices]))


def preprocess(m: DataMatrix, center: bool = False, spectral_normalize: bool = False) -> DataMatrix:
    """Apply column-mean centering and/or spectral normalization, in that order.

    Centering is feature-wise: after it, every column mean is zero.
    Spectral normalization divides by the largest singular value so that
    the preprocessed matrix has sigma_max = 1.
    """
    values = np.array(m.values, dtype=np.float64)
    if center:
        values = values - values.mean(axis=0, keepdims=True)
    if spectral_normalize:
        smax = float(np.linalg.svd(values, compute_uv=False)[0])
        if smax <= 0.0:
            raise DegenerateInputError("cannot spectral-normalize the zero matrix")
        values = values / smax
    return DataMatrix.from_values(
        values,
        row_mean_centered=center or m.row_mean_centered,
        spectral_normalized=spectral_normalize,
    )


def build_contingency(
    corpus: Iterable[Sequence[str]],
    drop_stopwords: bool = False,
    min_doc_freq: int = 2,
    max_doc_ratio: float = 0.5,
    doc_labels: Sequence[str] | None = None,
) -> ContingencyTable:
    """Count word occurrences per document after vocabulary filtering.

    Cell (i, j) holds the number of times word j occurs in document i.
    Filters drop stop-words, words appearing in fewer than ``min_doc_freq``
    documents, and words appearing in more than ``max_doc_ratio`` of the
    documents. The vocabulary is sorted so output is deterministic.
    """
    docs = [list(tokens) for tokens in corpus]
    if not docs:
        raise DegenerateInputError("corpus is empty")
    n_docs = len(docs)
    stop = english_stopwords() if drop_stopwords else frozenset()

    doc_freq: dict[str, int] = {}
    for tokens in docs:
        for w in set(tokens):
            doc_freq[w] = doc_freq.get(w, 0) + 1

    vocab = sorted(
        w
        for w, df in doc_freq.items()
        if w.lower() not in stop and df >= min_doc_freq and df <= max_doc_ratio * n_docs
    )
    if not vocab:
        raise EmptyVocabularyError("all words were removed by the filters")
    col_of = {w: j for j, w in enumerate(vocab)}

    counts = np.zeros((n_docs, len(vocab)), dtype=np.float64)
    for i, tokens in enumerate(docs):
        for w in tokens:
            j = col_of.get(w)
            if j is not None:
                counts[i, j] += 1.0

    if doc_labels is None:
        doc_labels = [f"doc{i}" for i in range(n_docs)]
    elif len(doc_labels) != n_docs:
        raise MatrixFormatError("doc_labels length does not match the corpus")
    return ContingencyTable(counts, tuple(doc_labels), tuple(vocab))


def build_ca_matrix(t: ContingencyTable) -> CaMatrixResult:
    """Standardized residuals of a contingency table.

    Computes D_x^{-1/2} (P - p_x p_y^T) D_y^{-1/2} where P is the table
    normalized to joint probabilities and p_x, p_y the marginals. All-zero
    rows and columns are dropped first (the scaling is undefined there) and
    reported by label.
    """
    counts = t.counts
    total = counts.sum()
    if total <= 0:
        raise DegenerateInputError("contingency table has zero total count")

    row_ok = counts.sum(axis=1) > 0
    col_ok = counts.sum(axis=0) > 0
    dropped_rows = tuple(lbl for lbl, ok in zip(t.row_labels, row_ok) if not ok)
    dropped_cols = tuple(lbl for lbl, ok in zip(t.col_labels, col_ok) if not ok)
    counts = counts[np.ix_(row_ok, col_ok)]

    p = counts / counts.sum()
    p_x = p.sum(axis=1)
    p_y = p.sum(axis=0)
    residual = (p - np.outer(p_x, p_y)) / np.sqrt(np.outer(p_x, p_y))
    return CaMatrixResult(
        matrix=DataMatrix.from_values(residual),
        row_marginals=p_x,
        col_marginals=p_y,
        dropped_rows=dropped_rows,
        dropped_cols=dropped_cols,
    )
