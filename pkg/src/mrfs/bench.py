"""Scalability sweeps with machine-readable timing output.

A sweep varies one axis (dataset rows, dataset columns, number of selected
features, or worker count) while holding the rest of the configuration
fixed, timing the selection call only (ingestion excluded) and repeating
each point three times by default.  Two derived quantities accompany every
record: the execution time relative to the mean at the smallest axis
value, and the computational gain over a one-worker run of the same point.
Bytes crossing the combine-to-reduce boundary are reported as a proxy for
what a cluster would ship over the network during the shuffle.
"""

from __future__ import annotations

import csv
import tempfile
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .data import LAYOUT_CONVENTIONAL, generate_synthetic, read_dataset
from .errors import InvalidArgumentError
from .selector import RunLog, select_alternative, select_conventional

SWEEP_AXES = ("rows", "cols", "features", "workers")

CSV_HEADER = (
    "sweep_axis",
    "axis_value",
    "repetition",
    "wall_time_ms",
    "bytes_shuffled",
    "relative_et",
    "computational_gain",
)


@dataclass(frozen=True)
class BenchRecord:
    sweep_axis: str
    axis_value: int
    repetition: int
    wall_time_ms: float
    bytes_shuffled: int
    relative_et: float
    computational_gain: float

    def row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


@dataclass(frozen=True)
class BenchConfig:
    """Fixed part of a sweep: everything the axis does not vary."""

    rows: int = 10_000
    cols: int = 20
    num_features: int = 5
    workers: int = 1
    layout: str = LAYOUT_CONVENTIONAL
    score: str = "mi"
    seed: int = 0
    repetitions: int = 3
    partitions: int | None = None


def parse_axis_values(text: str) -> list[int]:
    """Parse '100k,400k,1m' style sweep values (k = thousand, m = million)."""
    values = []
    for raw in text.split(","):
        token = raw.strip().lower()
        if not token:
            continue
        mult = 1
        if token.endswith("k"):
            mult, token = 1_000, token[:-1]
        elif token.endswith("m"):
            mult, token = 1_000_000, token[:-1]
        try:
            values.append(int(float(token) * mult))
        except ValueError:
            raise InvalidArgumentError(f"cannot parse sweep value {raw!r}") from None
    if not values:
        raise InvalidArgumentError("no sweep values given")
    return values


def _timed_select(dataset, layout: str, num_features: int, score: str,
                  workers: int, partitions) -> tuple[float, int]:
    """One timed selection; returns (wall ms, shuffled bytes)."""
    log = RunLog()
    start = time.perf_counter()
    if layout == LAYOUT_CONVENTIONAL:
        select_conventional(
            dataset, num_features, score=score, workers=workers,
            partitions=partitions, run_log=log, measure_shuffle=True,
        )
    else:
        select_alternative(
            dataset, num_features, score=score, workers=workers,
            partitions=partitions, run_log=log, measure_shuffle=True,
        )
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return elapsed_ms, log.total_shuffled_bytes


def _dataset_for(cfg: BenchConfig, rows: int, cols: int, workdir: Path):
    file_path = workdir / f"bench_{cfg.layout}_{rows}x{cols}_s{cfg.seed}.csv"
    if not file_path.exists():
        generate_synthetic(rows, cols, cfg.seed, cfg.layout, file_path)
    return read_dataset(file_path, cfg.layout)


def run_sweep(
    axis: str,
    values: Sequence[int],
    cfg: BenchConfig,
    *,
    workdir: Path | str | None = None,
    on_record: Callable[[BenchRecord], None] | None = None,
) -> list[BenchRecord]:
    """Measure every (axis value, repetition) point of one sweep.

    Baseline for ``relative_et`` is the smallest axis value; the gain
    baseline is a one-worker measurement of the same point (taken from the
    sweep itself when the axis is ``workers``).  Records stream through
    ``on_record`` as they are produced so partial output survives aborts.
    """
    if axis not in SWEEP_AXES:
        raise InvalidArgumentError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if not values:
        raise InvalidArgumentError("sweep needs at least one axis value")
    values = sorted(set(int(v) for v in values))

    own_tmp = None
    if workdir is None:
        own_tmp = tempfile.TemporaryDirectory(prefix="mrfs-bench-")
        workdir = own_tmp.name
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    try:
        # a workers sweep without a 1-worker point still needs a gain base
        shared_gain_base = None
        if axis == "workers" and 1 not in values:
            dataset = _dataset_for(cfg, cfg.rows, cfg.cols, workdir)
            baseline = [
                _timed_select(dataset, cfg.layout, cfg.num_features, cfg.score, 1, cfg.partitions)[0]
                for _ in range(cfg.repetitions)
            ]
            shared_gain_base = sum(baseline) / len(baseline)
            del dataset

        records = []
        baseline_mean = None  # mean ET at the smallest axis value
        for value in values:
            rows, cols, num_features, workers = cfg.rows, cfg.cols, cfg.num_features, cfg.workers
            if axis == "rows":
                rows = value
            elif axis == "cols":
                cols = value
            elif axis == "features":
                num_features = value
            else:
                workers = value
            if num_features > cols:
                raise InvalidArgumentError(
                    f"num_features {num_features} exceeds feature count {cols}"
                )

            dataset = _dataset_for(cfg, rows, cols, workdir)
            times, sizes = [], []
            for _ in range(cfg.repetitions):
                elapsed, shuffled = _timed_select(
                    dataset, cfg.layout, num_features, cfg.score, workers, cfg.partitions
                )
                times.append(elapsed)
                sizes.append(shuffled)
            mean_time = sum(times) / len(times)
            if baseline_mean is None:
                baseline_mean = mean_time

            if workers == 1:
                gain_base = mean_time
                if axis == "workers":
                    shared_gain_base = mean_time  # value 1 sorts first
            elif axis == "workers":
                gain_base = shared_gain_base
            else:
                # dedicated single-worker baseline for the gain column
                baseline = [
                    _timed_select(dataset, cfg.layout, num_features, cfg.score, 1, cfg.partitions)[0]
                    for _ in range(cfg.repetitions)
                ]
                gain_base = sum(baseline) / len(baseline)
            del dataset

            # emit the point's records immediately: an aborted sweep keeps
            # everything measured so far
            for rep, (elapsed, shuffled) in enumerate(zip(times, sizes), start=1):
                record = BenchRecord(
                    sweep_axis=axis,
                    axis_value=value,
                    repetition=rep,
                    wall_time_ms=elapsed,
                    bytes_shuffled=shuffled,
                    relative_et=elapsed / baseline_mean,
                    computational_gain=gain_base / mean_time,
                )
                records.append(record)
                if on_record is not None:
                    on_record(record)
        return records
    finally:
        if own_tmp is not None:
            own_tmp.cleanup()


def write_records(records: Iterable[BenchRecord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.row())


def mean_time_by_value(records: Sequence[BenchRecord]) -> dict[int, float]:
    """Mean wall time (ms) per axis value; convenience for trend checks."""
    grouped: dict[int, list[float]] = {}
    for r in records:
        grouped.setdefault(r.axis_value, []).append(r.wall_time_ms)
    return {v: sum(ts) / len(ts) for v, ts in grouped.items()}
