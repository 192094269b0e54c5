"""Dataset ingestion, validation, layout conversion and synthetic generation.

Two delimited-text layouts are supported.  Conventional: one observation
per line, a header naming the columns, the class column named ``class`` by
default.  Alternative: one feature per line, the first field being the
feature identifier, with the class stored as a distinguished row (id
``class`` by default).  Files are UTF-8, comma-separated, line-feed
terminated, unquoted.

Values are dictionary-encoded at ingestion: integral input is kept as raw
integer codes; anything else is mapped to the index of its cell token in
the sorted token vocabulary.  The value domain is the union over all
feature columns, so every contingency table in a dataset has one uniform
shape and tables can be merged blindly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .core import DomainSpec, FeatureRow, Sample
from .errors import IngestionError, InvalidArgumentError, UnsupportedDataError

LAYOUT_CONVENTIONAL = "conventional"
LAYOUT_ALTERNATIVE = "alternative"
DEFAULT_CLASS_NAME = "class"

_WRITE_CHUNK_ROWS = 65536


@dataclass(frozen=True)
class DatasetMeta:
    """Shape, class location and (for discrete data) domains of a dataset."""

    layout: str
    num_observations: int
    num_features: int
    class_name: str
    class_position: int  # column index (conventional) or row index (alternative)
    feature_names: tuple[str, ...]
    domains: DomainSpec | None = None

    def __post_init__(self):
        if self.num_observations < 1 or self.num_features < 1:
            raise IngestionError(
                f"dataset must have at least one observation and one feature, "
                f"got M={self.num_observations}, N={self.num_features}"
            )


@dataclass(frozen=True, eq=False)
class SampleBlock:
    """A contiguous run of observations in position-encoded form.

    ``feature_positions[i, k]`` indexes into the value domain;
    ``class_positions[i]`` indexes into the class domain.  Blocks are what
    the fast conventional mapper consumes.
    """

    class_positions: np.ndarray
    feature_positions: np.ndarray


class ConventionalDataset:
    """Observations-as-records dataset: M x N categorical matrix plus labels."""

    def __init__(
        self,
        class_positions: np.ndarray,
        feature_positions: np.ndarray,
        meta: DatasetMeta,
        value_tokens: tuple[str, ...] | None = None,
        class_tokens: tuple[str, ...] | None = None,
    ):
        self.class_positions = np.ascontiguousarray(class_positions, dtype=np.int32)
        self.feature_positions = np.ascontiguousarray(feature_positions, dtype=np.int32)
        self.meta = meta
        self.value_tokens = value_tokens
        self.class_tokens = class_tokens
        self._value_codes = np.asarray(meta.domains.value_domain, dtype=np.int64)
        self._class_codes = np.asarray(meta.domains.class_domain, dtype=np.int64)

    @property
    def num_observations(self) -> int:
        return self.meta.num_observations

    @property
    def num_features(self) -> int:
        return self.meta.num_features

    def column_codes(self, k: int) -> np.ndarray:
        """Raw codes of feature column ``k`` (for oracle-style column access)."""
        return self._value_codes[self.feature_positions[:, k]]

    def class_codes(self) -> np.ndarray:
        return self._class_codes[self.class_positions]

    def samples(self) -> list[Sample]:
        """Materialize one ``Sample`` per observation (record-level mapping)."""
        values = self._value_codes[self.feature_positions]
        labels = self.class_codes()
        return [
            Sample(values=tuple(int(v) for v in values[i]), class_label=int(labels[i]))
            for i in range(self.num_observations)
        ]

    def blocks(self, num_blocks: int) -> list[SampleBlock]:
        """Split the dataset into contiguous position-encoded blocks."""
        bounds = np.linspace(0, self.num_observations, num_blocks + 1).astype(int)
        return [
            SampleBlock(
                class_positions=self.class_positions[bounds[i] : bounds[i + 1]],
                feature_positions=self.feature_positions[bounds[i] : bounds[i + 1]],
            )
            for i in range(num_blocks)
        ]

    def to_alternative(self) -> "AlternativeDataset":
        """Same data, features-as-rows; the class becomes a distinguished row."""
        names = list(self.meta.feature_names)
        names.insert(self.meta.class_position, self.meta.class_name)
        rows = []
        for k in range(self.num_features):
            rows.append(self.column_codes(k))
        rows.insert(self.meta.class_position, self.class_codes())
        meta = DatasetMeta(
            layout=LAYOUT_ALTERNATIVE,
            num_observations=self.num_observations,
            num_features=self.num_features,
            class_name=self.meta.class_name,
            class_position=self.meta.class_position,
            feature_names=tuple(names),
            domains=self.meta.domains,
        )
        return AlternativeDataset(
            values=np.vstack(rows),
            row_names=tuple(names),
            class_row_index=self.meta.class_position,
            meta=meta,
            value_tokens=self.value_tokens,
            class_tokens=self.class_tokens,
        )


class AlternativeDataset:
    """Features-as-records dataset: one value vector per feature row.

    ``values`` has one row per file line (class row included); candidates
    are every row except the class row.  Values may be continuous; the
    ``values_integral`` flag tells discrete-only scores whether they apply.
    """

    def __init__(
        self,
        values: np.ndarray,
        row_names: tuple[str, ...],
        class_row_index: int,
        meta: DatasetMeta,
        value_tokens: tuple[str, ...] | None = None,
        class_tokens: tuple[str, ...] | None = None,
    ):
        self.values = np.asarray(values)
        self.row_names = tuple(row_names)
        self.class_row_index = class_row_index
        self.meta = meta
        self.value_tokens = value_tokens
        self.class_tokens = class_tokens
        if self.values.ndim != 2 or self.values.shape[0] != len(self.row_names):
            raise IngestionError(
                f"value matrix shape {self.values.shape} does not match {len(self.row_names)} row names"
            )
        if self.values.dtype.kind in "iub":
            self.values_integral = True
        else:
            self.values_integral = bool(np.array_equal(np.rint(self.values), self.values))

    @property
    def num_observations(self) -> int:
        return self.values.shape[1]

    def records(self) -> list[FeatureRow]:
        return [
            FeatureRow(index=i, name=self.row_names[i], values=self.values[i])
            for i in range(self.values.shape[0])
        ]

    def row_names_by_index(self) -> tuple[str, ...]:
        return self.row_names

    def to_conventional(self) -> ConventionalDataset:
        """Same data, observations-as-rows; requires integer-codable values."""
        if not self.values_integral:
            raise UnsupportedDataError(
                "cannot convert to the conventional layout: values are not integer-coded"
            )
        codes = np.rint(self.values).astype(np.int64)
        class_codes = codes[self.class_row_index]
        feature_codes = np.delete(codes, self.class_row_index, axis=0).T
        feature_names = tuple(
            n for i, n in enumerate(self.row_names) if i != self.class_row_index
        )
        return _build_conventional(
            feature_codes,
            class_codes,
            feature_names,
            class_name=self.row_names[self.class_row_index],
            class_position=self.class_row_index,
            value_tokens=self.value_tokens,
            class_tokens=self.class_tokens,
        )


def _build_conventional(
    feature_codes: np.ndarray,
    class_codes: np.ndarray,
    feature_names: tuple[str, ...],
    class_name: str,
    class_position: int,
    value_tokens=None,
    class_tokens=None,
) -> ConventionalDataset:
    value_domain = np.unique(feature_codes)
    class_domain = np.unique(class_codes)
    domains = DomainSpec(
        class_domain=tuple(int(c) for c in class_domain),
        value_domain=tuple(int(c) for c in value_domain),
    )
    meta = DatasetMeta(
        layout=LAYOUT_CONVENTIONAL,
        num_observations=feature_codes.shape[0],
        num_features=feature_codes.shape[1],
        class_name=class_name,
        class_position=class_position,
        feature_names=feature_names,
        domains=domains,
    )
    return ConventionalDataset(
        class_positions=np.searchsorted(class_domain, class_codes),
        feature_positions=np.searchsorted(value_domain, feature_codes),
        meta=meta,
        value_tokens=value_tokens,
        class_tokens=class_tokens,
    )


# ---------------------------------------------------------------------------
# readers
# ---------------------------------------------------------------------------


def _read_table(path, skiprows: int, num_columns: int) -> pd.DataFrame:
    try:
        df = pd.read_csv(
            path,
            header=None,
            skiprows=skiprows,
            names=list(range(num_columns)),
            sep=",",
        )
    except pd.errors.EmptyDataError:
        raise IngestionError(f"{path}: no data rows") from None
    except pd.errors.ParserError as exc:
        raise IngestionError(f"{path}: {exc}") from None
    if len(df) == 0:
        raise IngestionError(f"{path}: no data rows")
    return df


def _fail_on_missing(df: pd.DataFrame, path, line_offset: int) -> None:
    mask = df.isna()
    if mask.to_numpy().any():
        row = int(mask.any(axis=1).idxmax())
        col = mask.columns[int(mask.iloc[row].to_numpy().argmax())]
        raise IngestionError(
            f"{path}: missing or unparseable cell at line {row + 1 + line_offset}, column {col}"
        )


def _numeric_codes(block: np.ndarray) -> np.ndarray | None:
    """Return integer codes when every value is integral, else None."""
    if block.dtype.kind in "iub":
        return block.astype(np.int64)
    if block.dtype.kind == "f":
        if np.array_equal(np.rint(block), block):
            return np.rint(block).astype(np.int64)
    return None


def _tokenize(cells: np.ndarray, path, line_offset: int) -> tuple[np.ndarray, tuple[str, ...]]:
    """Dictionary-encode string cells; codes are vocabulary indices."""
    flat = cells.ravel()
    empties = np.flatnonzero(flat == "")
    if empties.size:
        row, col = divmod(int(empties[0]), cells.shape[1])
        raise IngestionError(f"{path}: empty cell at line {row + 1 + line_offset}, column {col}")
    vocab, codes = np.unique(cells, return_inverse=True)
    return codes.reshape(cells.shape).astype(np.int64), tuple(str(t) for t in vocab)


def read_conventional(path, class_column: str = DEFAULT_CLASS_NAME) -> ConventionalDataset:
    """Parse an observations-as-rows file; scans domains over the whole file."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    if not header.strip():
        raise IngestionError(f"{path}: empty file")
    names = header.rstrip("\n").split(",")
    if len(names) < 2:
        raise IngestionError(f"{path}: expected at least a feature column and a class column")
    if len(set(names)) != len(names):
        raise IngestionError(f"{path}: duplicate column names in header")

    class_position = _resolve_locator(names, class_column, path, kind="column")
    df = _read_table(path, skiprows=1, num_columns=len(names))
    _fail_on_missing(df, path, line_offset=1)

    feature_idx = [i for i in range(len(names)) if i != class_position]
    feature_block = df[feature_idx].to_numpy()
    class_block = df[class_position].to_numpy()

    value_tokens = class_tokens = None
    feature_codes = _numeric_codes(feature_block)
    class_codes = _numeric_codes(class_block)
    if feature_codes is None or class_codes is None:
        # dictionary-encode only the non-integral side; the other keeps raw codes
        cells = pd.read_csv(
            path, header=None, skiprows=1, names=list(range(len(names))),
            sep=",", dtype=str, keep_default_na=False,
        ).to_numpy()
        if feature_codes is None:
            feature_codes, value_tokens = _tokenize(cells[:, feature_idx], path, 1)
        if class_codes is None:
            class_codes, class_tokens = _tokenize(cells[:, [class_position]], path, 1)
            class_codes = class_codes.ravel()

    return _build_conventional(
        feature_codes,
        class_codes,
        feature_names=tuple(names[i] for i in feature_idx),
        class_name=names[class_position],
        class_position=class_position,
        value_tokens=value_tokens,
        class_tokens=class_tokens,
    )


def read_alternative(path, class_row: str = DEFAULT_CLASS_NAME) -> AlternativeDataset:
    """Parse a features-as-rows file; the first field of each line is the row id."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    if not first.strip():
        raise IngestionError(f"{path}: empty file")
    num_columns = first.rstrip("\n").count(",") + 1
    if num_columns < 2:
        raise IngestionError(f"{path}: each line needs a row id and at least one value")

    df = _read_table(path, skiprows=0, num_columns=num_columns)
    _fail_on_missing(df, path, line_offset=0)

    row_names = tuple(str(v) for v in df[0].to_numpy())
    if len(set(row_names)) != len(row_names):
        raise IngestionError(f"{path}: duplicate feature row identifiers")
    if len(row_names) < 2:
        raise IngestionError(f"{path}: expected at least one feature row and one class row")

    class_row_index = _resolve_locator(list(row_names), class_row, path, kind="row")

    value_block = df[list(range(1, num_columns))].to_numpy()
    value_tokens = None
    if value_block.dtype.kind in "iub":
        values = value_block.astype(np.int64)
    elif value_block.dtype.kind == "f":
        values = value_block.astype(np.float64)
    else:
        cells = pd.read_csv(
            path, header=None, skiprows=0, names=list(range(num_columns)),
            sep=",", dtype=str, keep_default_na=False,
        ).to_numpy()
        values, value_tokens = _tokenize(cells[:, 1:], path, 0)

    meta = DatasetMeta(
        layout=LAYOUT_ALTERNATIVE,
        num_observations=num_columns - 1,
        num_features=len(row_names) - 1,
        class_name=row_names[class_row_index],
        class_position=class_row_index,
        feature_names=row_names,
    )
    return AlternativeDataset(
        values=values,
        row_names=row_names,
        class_row_index=class_row_index,
        meta=meta,
        value_tokens=value_tokens,
    )


def _resolve_locator(names: list[str], locator: str, path, kind: str) -> int:
    if locator in names:
        return names.index(locator)
    try:
        position = int(locator)
    except (TypeError, ValueError):
        raise IngestionError(f"{path}: no {kind} named {locator!r}") from None
    if not 0 <= position < len(names):
        raise IngestionError(
            f"{path}: class {kind} index {position} out of range (0..{len(names) - 1})"
        )
    return position


def read_dataset(path, layout: str, class_locator: str = DEFAULT_CLASS_NAME):
    if layout == LAYOUT_CONVENTIONAL:
        return read_conventional(path, class_locator)
    if layout == LAYOUT_ALTERNATIVE:
        return read_alternative(path, class_locator)
    raise InvalidArgumentError(f"unknown layout {layout!r}")


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def _format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    return str(int(f)) if f.is_integer() else repr(f)


def _code_formatter(tokens):
    if tokens is None:
        return _format_value
    return lambda code: tokens[int(code)]


def write_conventional(dataset: ConventionalDataset, path) -> None:
    """Write the canonical conventional form: header line, then one
    observation per line, class column at its recorded position."""
    fmt_v = _code_formatter(dataset.value_tokens)
    fmt_c = _code_formatter(dataset.class_tokens)
    names = list(dataset.meta.feature_names)
    names.insert(dataset.meta.class_position, dataset.meta.class_name)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        value_codes = dataset._value_codes
        class_codes = dataset._class_codes
        pos = dataset.meta.class_position
        for start in range(0, dataset.num_observations, _WRITE_CHUNK_ROWS):
            stop = min(start + _WRITE_CHUNK_ROWS, dataset.num_observations)
            block = value_codes[dataset.feature_positions[start:stop]]
            labels = class_codes[dataset.class_positions[start:stop]]
            lines = []
            for i in range(stop - start):
                cells = [fmt_v(v) for v in block[i]]
                cells.insert(pos, fmt_c(labels[i]))
                lines.append(",".join(cells))
            fh.write("\n".join(lines) + "\n")


def write_alternative(dataset: AlternativeDataset, path) -> None:
    """Write the canonical alternative form: one feature row per line."""
    fmt_row = _code_formatter(dataset.value_tokens)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, name in enumerate(dataset.row_names):
            row = dataset.values[i]
            fh.write(name)
            for start in range(0, row.shape[0], _WRITE_CHUNK_ROWS):
                chunk = row[start : start + _WRITE_CHUNK_ROWS]
                fh.write("," + ",".join(fmt_row(v) for v in chunk))
            fh.write("\n")


def transpose(input_path, output_path, input_layout: str = LAYOUT_CONVENTIONAL,
              class_locator: str = DEFAULT_CLASS_NAME) -> None:
    """Rewrite a dataset file in the other layout.

    Cell (i, j) of the input becomes cell (j, i) of the output, with the
    class column/row keeping its position; applying transpose twice yields
    the original canonical bytes.  The whole table is held in memory.
    """
    if input_layout == LAYOUT_CONVENTIONAL:
        ds = read_conventional(input_path, class_locator)
        write_alternative(ds.to_alternative(), output_path)
    elif input_layout == LAYOUT_ALTERNATIVE:
        ds = read_alternative(input_path, class_locator)
        write_conventional(ds.to_conventional(), output_path)
    else:
        raise InvalidArgumentError(f"unknown layout {input_layout!r}")


# ---------------------------------------------------------------------------
# synthetic generator
# ---------------------------------------------------------------------------

_MIX_INC = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer: a counter-indexed source of uniform bits."""
    with np.errstate(over="ignore"):
        z = z + _MIX_INC
        z = (z ^ (z >> np.uint64(30))) * _MIX_A
        z = (z ^ (z >> np.uint64(27))) * _MIX_B
        return z ^ (z >> np.uint64(31))


def _cell_bits(seed: int, rows: np.ndarray, cols: np.ndarray, num_cols: int) -> np.ndarray:
    """Deterministic uniform bit for every (row, col) cell, addressable in
    any order; this is what lets both layouts stream the same dataset."""
    base = _mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    flat = rows.astype(np.uint64) * np.uint64(num_cols) + cols.astype(np.uint64)
    return (_mix64(base ^ _mix64(flat)) & np.uint64(1)).astype(np.int8)


def _class_from_features(x: np.ndarray) -> np.ndarray:
    """Class rule: ((x1 and x2) or (x3 and x4)) and ((x5 and x6) or (x7 and x8))."""
    a = (x[:, 0] & x[:, 1]) | (x[:, 2] & x[:, 3])
    b = (x[:, 4] & x[:, 5]) | (x[:, 6] & x[:, 7])
    return a & b


def generate_synthetic(
    rows: int,
    cols: int,
    seed: int,
    layout: str,
    path,
    class_name: str = DEFAULT_CLASS_NAME,
    chunk_rows: int = _WRITE_CHUNK_ROWS,
) -> None:
    """Stream a binary benchmark dataset to ``path``.

    Features are i.i.d. uniform over {0, 1}; the class depends on features
    f1..f8 through a fixed two-level and/or rule, so exactly eight columns
    are relevant and the rest carry no signal.  Output is deterministic in
    (rows, cols, seed) and identical in content across layouts.  Class
    column/row is written last.
    """
    if cols < 8:
        raise InvalidArgumentError(f"need at least 8 feature columns for the class rule, got {cols}")
    if rows < 1:
        raise InvalidArgumentError(f"need at least one observation, got {rows}")
    if layout == LAYOUT_CONVENTIONAL:
        _generate_conventional(rows, cols, seed, path, class_name, chunk_rows)
    elif layout == LAYOUT_ALTERNATIVE:
        _generate_alternative(rows, cols, seed, path, class_name, chunk_rows)
    else:
        raise InvalidArgumentError(f"unknown layout {layout!r}")


def _binary_chunk(rows: np.ndarray, cols: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    grid_cols = np.arange(cols, dtype=np.uint64)[None, :]
    x = _cell_bits(seed, rows[:, None], grid_cols, cols)
    return x, _class_from_features(x)


def _digit_lines(matrix: np.ndarray) -> bytes:
    """Render a {0,1} matrix as comma-separated lines in one numpy pass."""
    m, n = matrix.shape
    out = np.empty((m, 2 * n), dtype=np.uint8)
    out[:, 0::2] = matrix + ord("0")
    out[:, 1::2] = ord(",")
    out[:, -1] = ord("\n")
    return out.tobytes()


def _generate_conventional(rows, cols, seed, path, class_name, chunk_rows):
    header = ",".join([f"f{j + 1}" for j in range(cols)] + [class_name])
    with open(path, "wb") as fh:
        fh.write((header + "\n").encode("utf-8"))
        for start in range(0, rows, chunk_rows):
            idx = np.arange(start, min(start + chunk_rows, rows), dtype=np.uint64)
            x, c = _binary_chunk(idx, cols, seed)
            fh.write(_digit_lines(np.column_stack([x, c])))


def _generate_alternative(rows, cols, seed, path, class_name, chunk_rows):
    # one pass per feature row; memory stays O(chunk)
    with open(path, "wb") as fh:
        col_ids = np.arange(cols, dtype=np.uint64)
        for j in range(cols):
            fh.write(f"f{j + 1}".encode("utf-8"))
            for start in range(0, rows, chunk_rows):
                idx = np.arange(start, min(start + chunk_rows, rows), dtype=np.uint64)
                vals = _cell_bits(seed, idx, np.full_like(idx, j), cols)
                fh.write(b"," + _digits_joined(vals))
            fh.write(b"\n")
        fh.write(class_name.encode("utf-8"))
        for start in range(0, rows, chunk_rows):
            idx = np.arange(start, min(start + chunk_rows, rows), dtype=np.uint64)
            x = _cell_bits(seed, idx[:, None], col_ids[None, :8], cols)
            fh.write(b"," + _digits_joined(_class_from_features(x)))
        fh.write(b"\n")


def _digits_joined(vec: np.ndarray) -> bytes:
    out = np.empty(2 * vec.shape[0] - 1, dtype=np.uint8)
    out[0::2] = vec + ord("0")
    out[1::2] = ord(",")
    return out.tobytes()
