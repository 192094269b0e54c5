"""Score functions: mutual information, Pearson correlation, and the greedy
relevance-minus-mean-redundancy combination rule.

Mutual information uses the plug-in estimator over a contingency table
(empirical cell frequencies, no smoothing), in bits.  Per-cell
contributions are accumulated with ``math.fsum``, which is exact and hence
independent of cell order and of zero padding: a table carrying extra
all-zero rows or columns scores bit-identically to its trimmed form.  That
is what lets the two pipeline encodings and the sequential reference
produce equal floats, not merely close ones.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from .core import ContingencyTable
from .errors import InvalidArgumentError, StructuralError, UnsupportedDataError


def mutual_information(table: ContingencyTable, base: float = 2.0) -> float:
    """Plug-in mutual information of a contingency table, in bits by default.

    I = sum over cells of p(r,c) * log(p(r,c) / (p(r) p(c))), with the
    0 * log(0) = 0 convention.  Raises on an all-zero table: there is no
    distribution to estimate.
    """
    total = table.total()
    if total < 1:
        raise InvalidArgumentError("cannot estimate mutual information from an all-zero table")
    counts = table.counts
    p = counts / total
    pr = p.sum(axis=1, keepdims=True)
    pc = p.sum(axis=0, keepdims=True)
    nz = counts > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = p[nz] * (np.log(p[nz]) - np.log((pr * pc)[nz])) / math.log(base)
    value = math.fsum(terms)
    # exact arithmetic guarantees >= 0; guard against float residue
    return value if value > 0.0 else 0.0


def pair_table(x: Sequence, y: Sequence) -> ContingencyTable:
    """Contingency table of two equal-length categorical (integer-coded) vectors.

    Labels are the sorted distinct codes observed in each vector.  Real-
    valued input is accepted only when every entry is integral.
    """
    xi = _as_codes(x)
    yi = _as_codes(y)
    if xi.shape != yi.shape:
        raise StructuralError(f"vector lengths differ: {xi.shape[0]} vs {yi.shape[0]}")
    row_labels, xpos = np.unique(xi, return_inverse=True)
    col_labels, ypos = np.unique(yi, return_inverse=True)
    ncols = len(col_labels)
    counts = np.bincount(xpos * ncols + ypos, minlength=len(row_labels) * ncols)
    return ContingencyTable(
        tuple(int(v) for v in row_labels),
        tuple(int(v) for v in col_labels),
        counts.reshape(len(row_labels), ncols),
    )


def _as_codes(v) -> np.ndarray:
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"expected a 1-d vector, got shape {arr.shape}")
    if arr.dtype.kind in "iub":
        return arr.astype(np.int64)
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)):
            raise UnsupportedDataError("categorical vector contains non-finite values")
        rounded = np.rint(arr)
        if not np.array_equal(rounded, arr):
            raise UnsupportedDataError(
                "mutual information needs categorical (integer-coded) data; "
                "got non-integral values"
            )
        return rounded.astype(np.int64)
    raise UnsupportedDataError(f"cannot treat dtype {arr.dtype} as categorical codes")


def pearson(x: Sequence, y: Sequence) -> float:
    """Sample Pearson correlation coefficient, clamped to [-1, 1].

    Returns 0.0 when either vector has zero variance: a constant feature
    carries no signal, and 0 removes it from contention without poisoning
    the argmax the way NaN would.
    """
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape:
        raise StructuralError(f"vector lengths differ: {xa.shape} vs {ya.shape}")
    n = xa.shape[0]
    if n < 2:
        raise InvalidArgumentError(f"pearson needs at least 2 observations, got {n}")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    ssx = float(dx @ dx)
    ssy = float(dy @ dy)
    if ssx == 0.0 or ssy == 0.0:
        return 0.0
    r = float(dx @ dy) / math.sqrt(ssx * ssy)
    return max(-1.0, min(1.0, r))


def mrmr_combine(relevance: float, redundancies: Sequence[float]) -> float:
    """Greedy selection score: relevance minus the mean redundancy.

    With no selected features yet (empty ``redundancies``) the score is the
    relevance alone.  Summation uses ``math.fsum``, so the result does not
    depend on the order of the redundancy terms.
    """
    if not math.isfinite(relevance):
        raise InvalidArgumentError(f"relevance must be finite, got {relevance}")
    reds = list(redundancies)
    if not reds:
        return relevance
    if not all(math.isfinite(r) for r in reds):
        raise InvalidArgumentError(f"redundancies must be finite, got {reds}")
    return relevance - math.fsum(reds) / len(reds)


class ScoreFunction(ABC):
    """Pluggable per-candidate score.

    ``get_result`` receives the candidate vector, the class vector, and the
    vectors of the already-selected features (empty on the first
    iteration), and returns a scalar score.  Implementations must be pure:
    identical inputs give identical outputs, and concurrent calls from many
    mappers must be safe.
    """

    name: str = "?"
    requires_discrete: bool = False

    @abstractmethod
    def get_result(
        self,
        candidate: np.ndarray,
        class_vector: np.ndarray,
        selected_vectors: Sequence[np.ndarray],
    ) -> float:
        ...


class MutualInformationScore(ScoreFunction):
    """Relevance and redundancy both measured as pairwise mutual information."""

    name = "mi"
    requires_discrete = True

    def get_result(self, candidate, class_vector, selected_vectors):
        relevance = mutual_information(pair_table(candidate, class_vector))
        redundancies = [mutual_information(pair_table(candidate, s)) for s in selected_vectors]
        return mrmr_combine(relevance, redundancies)


class PearsonCorrelationScore(ScoreFunction):
    """Correlation-based approximation; works for continuous data too.

    Uses the signed coefficient, so strong anti-correlation with a selected
    feature lowers the redundancy penalty instead of raising it.
    """

    name = "pearson"

    def get_result(self, candidate, class_vector, selected_vectors):
        relevance = pearson(candidate, class_vector)
        redundancies = [pearson(candidate, s) for s in selected_vectors]
        return mrmr_combine(relevance, redundancies)


_SCORES: dict[str, type[ScoreFunction]] = {}


def register_score(cls: type[ScoreFunction]) -> type[ScoreFunction]:
    """Register a ScoreFunction subclass under its ``name``; the extension point."""
    if not cls.name or cls.name == "?":
        raise InvalidArgumentError(f"{cls.__name__} must define a name")
    _SCORES[cls.name] = cls
    return cls


register_score(MutualInformationScore)
register_score(PearsonCorrelationScore)


def get_score_function(name: str) -> ScoreFunction:
    try:
        return _SCORES[name]()
    except KeyError:
        raise InvalidArgumentError(
            f"unknown score function {name!r}; available: {sorted(_SCORES)}"
        ) from None


def available_scores() -> list[str]:
    return sorted(_SCORES)
