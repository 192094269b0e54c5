"""Domain types shared by every other module.

Categorical values are handled as small integer codes.  A dataset declares
two domains: the class domain (codes the label can take) and the value
domain (union of codes over all feature columns).  Contingency tables are
labelled count matrices over those domains; merging two tables with equal
labels is an element-wise sum, which is commutative and associative and
therefore safe to apply in any grouping order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, NamedTuple, Sequence

import numpy as np

from .errors import DomainViolationError, InvalidArgumentError, StructuralError

Code = int


class KeyedEmission(NamedTuple):
    """One (key, value) unit flowing through map / combine / shuffle / reduce."""

    key: Hashable
    value: Any


@dataclass(frozen=True)
class DomainSpec:
    """Declared categorical domains of a discrete dataset.

    Both domains are stored sorted ascending with no duplicates; table
    labels inherit that canonical order, so a label mismatch between two
    tables is always a real structural problem and never an ordering one.
    """

    class_domain: tuple[Code, ...]
    value_domain: tuple[Code, ...]

    def __post_init__(self):
        for name, dom in (("class_domain", self.class_domain), ("value_domain", self.value_domain)):
            if len(dom) == 0:
                raise InvalidArgumentError(f"{name} must not be empty")
            if len(set(dom)) != len(dom):
                raise InvalidArgumentError(f"{name} contains duplicates: {dom}")
            if tuple(sorted(dom)) != tuple(dom):
                raise InvalidArgumentError(f"{name} must be sorted ascending: {dom}")

    def class_position(self, code: Code) -> int:
        try:
            return self.class_domain.index(code)
        except ValueError:
            raise DomainViolationError(f"class code {code!r} not in class domain {self.class_domain}") from None

    def value_position(self, code: Code) -> int:
        try:
            return self.value_domain.index(code)
        except ValueError:
            raise DomainViolationError(f"value code {code!r} not in value domain {self.value_domain}") from None


@dataclass(frozen=True)
class Sample:
    """One observation: feature values plus its class label (conventional record)."""

    values: tuple[Code, ...]
    class_label: Code


@dataclass(frozen=True, eq=False)
class FeatureRow:
    """One feature: its row index, display name and value vector (alternative record)."""

    index: int
    name: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values))


@dataclass
class ContingencyTable:
    """Labelled co-occurrence count matrix.

    ``counts[i, j]`` counts observations whose pair of codes equals
    ``(row_labels[i], col_labels[j])``.  Counts are plain int64; merging is
    exact integer addition.
    """

    row_labels: tuple[Code, ...]
    col_labels: tuple[Code, ...]
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (len(self.row_labels), len(self.col_labels)):
            raise StructuralError(
                f"counts shape {self.counts.shape} does not match labels "
                f"({len(self.row_labels)} x {len(self.col_labels)})"
            )
        if np.any(self.counts < 0):
            raise StructuralError("contingency table contains negative counts")

    @classmethod
    def zeros(cls, row_labels: Sequence[Code], col_labels: Sequence[Code]) -> "ContingencyTable":
        return cls(
            tuple(row_labels),
            tuple(col_labels),
            np.zeros((len(row_labels), len(col_labels)), dtype=np.int64),
        )

    def total(self) -> int:
        return int(self.counts.sum())

    def same_labels(self, other: "ContingencyTable") -> bool:
        return self.row_labels == other.row_labels and self.col_labels == other.col_labels

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return self.same_labels(other) and np.array_equal(self.counts, other.counts)

    def __repr__(self):
        return f"ContingencyTable(rows={self.row_labels}, cols={self.col_labels}, counts={self.counts.tolist()})"


def merge_tables(a: ContingencyTable, b: ContingencyTable) -> ContingencyTable:
    """Element-wise sum of two tables with identical labels.

    Commutative and associative, hence usable as a combiner in any order
    and grouping.  A label mismatch signals a pipeline bug, not bad input.
    """
    if not a.same_labels(b):
        raise StructuralError(
            f"cannot merge tables with different labels: "
            f"({a.row_labels}, {a.col_labels}) vs ({b.row_labels}, {b.col_labels})"
        )
    return ContingencyTable(a.row_labels, a.col_labels, a.counts + b.counts)


def single_observation_table(
    row_code: Code,
    col_code: Code,
    row_domain: Sequence[Code],
    col_domain: Sequence[Code],
) -> ContingencyTable:
    """Table for one observed pair: a single 1 at (row_code, col_code), zeros elsewhere."""
    row_domain = tuple(row_domain)
    col_domain = tuple(col_domain)
    try:
        r = row_domain.index(row_code)
    except ValueError:
        raise DomainViolationError(f"row code {row_code!r} not in domain {row_domain}") from None
    try:
        c = col_domain.index(col_code)
    except ValueError:
        raise DomainViolationError(f"column code {col_code!r} not in domain {col_domain}") from None
    counts = np.zeros((len(row_domain), len(col_domain)), dtype=np.int64)
    counts[r, c] = 1
    return ContingencyTable(row_domain, col_domain, counts)


@dataclass
class SelectionState:
    """Candidate / selected bookkeeping across greedy iterations.

    Invariant: candidates and selected indices partition the initial
    candidate set; each step moves exactly one index across.
    """

    candidates: list[int]
    selected: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        self.candidates = sorted(self.candidates)
        if len(set(self.candidates)) != len(self.candidates):
            raise InvalidArgumentError("candidate indices contain duplicates")

    @property
    def step(self) -> int:
        """Current 1-based iteration number."""
        return len(self.selected) + 1

    @property
    def selected_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.selected)

    def advance(self, index: int, score: float) -> None:
        """Move ``index`` from candidates to selected, recording its score."""
        if index not in self.candidates:
            raise StructuralError(f"feature {index} is not a current candidate")
        self.candidates.remove(index)
        self.selected.append((index, score))
