"""Shared fixtures: the worked 4-entry example dataset and seeded random
discrete datasets used by the equivalence suites."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from mrfs.data import ConventionalDataset, read_conventional

# Four observations, binary class, four ternary features over {-2, 0, 2}.
# Class is the first column.  This tiny dataset drives the golden mapper
# and combiner tests.
EXAMPLE_HEADER = ["class", "x1", "x2", "x3", "x4"]
EXAMPLE_ROWS = [
    [0, 2, 0, 0, -2],
    [0, 0, -2, 2, 0],
    [0, 0, 2, 0, -2],
    [1, -2, 0, 0, 0],
]
EXAMPLE_CLASS_DOMAIN = (0, 1)
EXAMPLE_VALUE_DOMAIN = (-2, 0, 2)


def example_csv_text() -> str:
    lines = [",".join(EXAMPLE_HEADER)]
    lines += [",".join(str(v) for v in row) for row in EXAMPLE_ROWS]
    return "\n".join(lines) + "\n"


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.csv"
    path.write_text(example_csv_text())
    return path


@pytest.fixture
def example_dataset(example_file) -> ConventionalDataset:
    return read_conventional(example_file)


def write_conventional_csv(path, features: np.ndarray, labels: np.ndarray,
                           class_name: str = "class") -> None:
    """Write a feature matrix + label vector as a conventional-layout file,
    class column last."""
    n = features.shape[1]
    names = [f"f{j + 1}" for j in range(n)] + [class_name]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(features.shape[0]):
            cells = [str(int(v)) for v in features[i]] + [str(int(labels[i]))]
            fh.write(",".join(cells) + "\n")


@dataclass(frozen=True)
class DatasetCase:
    """One seeded random dataset plus the selection depth to run on it."""

    seed: int
    rows: int
    cols: int
    arity: int
    num_features: int

    def build(self) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        features = rng.integers(0, self.arity, size=(self.rows, self.cols))
        if self.seed % 2 == 0:
            # plant a noisy signal so rankings are not pure noise
            labels = (features[:, 0] + features[:, min(2, self.cols - 1)]) % 2
            flips = rng.random(self.rows) < 0.1
            labels = np.where(flips, 1 - labels, labels)
        else:
            labels = rng.integers(0, 2, size=self.rows)
        return features.astype(np.int64), labels.astype(np.int64)

    def dataset(self, tmp_path) -> ConventionalDataset:
        path = tmp_path / f"case_{self.seed}.csv"
        features, labels = self.build()
        write_conventional_csv(path, features, labels)
        return read_conventional(path)


# >= 20 cases spanning 200..2000 rows, 8..32 features, L up to N-1.
EQUIVALENCE_CASES = [
    DatasetCase(seed=101, rows=200, cols=8, arity=2, num_features=7),   # L = N-1
    DatasetCase(seed=102, rows=240, cols=9, arity=2, num_features=4),
    DatasetCase(seed=103, rows=280, cols=10, arity=3, num_features=3),
    DatasetCase(seed=104, rows=320, cols=11, arity=2, num_features=5),
    DatasetCase(seed=105, rows=250, cols=8, arity=3, num_features=7),   # L = N-1
    DatasetCase(seed=106, rows=400, cols=12, arity=2, num_features=6),
    DatasetCase(seed=107, rows=450, cols=13, arity=3, num_features=2),
    DatasetCase(seed=108, rows=500, cols=14, arity=2, num_features=4),
    DatasetCase(seed=109, rows=550, cols=15, arity=2, num_features=3),
    DatasetCase(seed=110, rows=600, cols=16, arity=3, num_features=5),
    DatasetCase(seed=111, rows=300, cols=10, arity=2, num_features=9),  # L = N-1
    DatasetCase(seed=112, rows=350, cols=12, arity=2, num_features=1),  # L = 1
    DatasetCase(seed=113, rows=700, cols=18, arity=2, num_features=4),
    DatasetCase(seed=114, rows=800, cols=20, arity=3, num_features=3),
    DatasetCase(seed=115, rows=900, cols=22, arity=2, num_features=2),
    DatasetCase(seed=116, rows=1000, cols=24, arity=2, num_features=3),
    DatasetCase(seed=117, rows=1200, cols=26, arity=2, num_features=2),
    DatasetCase(seed=118, rows=1500, cols=28, arity=3, num_features=2),
    DatasetCase(seed=119, rows=1800, cols=30, arity=2, num_features=2),
    DatasetCase(seed=120, rows=2000, cols=32, arity=2, num_features=3),
]
