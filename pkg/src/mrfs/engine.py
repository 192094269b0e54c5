"""In-process MapReduce executor over partitioned in-memory datasets.

The execution model mirrors the classic map / combine / shuffle / reduce
stages.  A dataset is split into contiguous partitions; each worker maps
one partition at a time, locally combining emissions that share a key when
a combiner is given.  The shuffle is a deterministic in-memory group-by,
after which the reducer runs once per key.  Output is independent of the
worker count, the partition count and scheduling order; a well-behaved
(commutative, associative) combiner never changes the result, only the
amount of data crossing the combine-to-reduce boundary.

Workers are separate processes forked per job, standing in for cluster
nodes.  On fork, children inherit the parent's dataset and broadcast
variables through copy-on-write memory, so only partition ids travel to
workers and only per-partition emission groups travel back.  With
``workers=1`` everything runs serially in the calling process.
"""

from __future__ import annotations

import copy
import itertools
import multiprocessing
import pickle
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError, JobError

MapperFn = Callable[[Any], Iterable[tuple[Hashable, Any]]]
CombinerFn = Callable[[Any, Any], Any]
ReducerFn = Callable[[Hashable, list], Any]


@dataclass(frozen=True)
class Partition:
    """A contiguous slice of dataset records."""

    id: int
    records: Sequence


def partition_records(records: Sequence, num_partitions: int) -> list[Partition]:
    """Split ``records`` into ``num_partitions`` contiguous, balanced slices.

    Partitions are disjoint, their union is the input, and empty partitions
    are permitted when there are more partitions than records.
    """
    if num_partitions < 1:
        raise InvalidArgumentError(f"partition count must be >= 1, got {num_partitions}")
    n = len(records)
    bounds = np.linspace(0, n, num_partitions + 1).astype(int)
    return [Partition(i, records[bounds[i] : bounds[i + 1]]) for i in range(num_partitions)]


class Broadcast:
    """Read-only snapshot of a value, shared with every mapper of a job.

    The payload is deep-copied at creation, so later mutation of the source
    object cannot leak into running jobs.  Numpy arrays in the snapshot are
    additionally marked non-writeable.
    """

    _ids = itertools.count()

    def __init__(self, value):
        self._id = next(Broadcast._ids)
        self._value = _freeze(copy.deepcopy(value))

    @property
    def value(self):
        return self._value

    def __repr__(self):
        return f"Broadcast(id={self._id}, type={type(self._value).__name__})"


def _freeze(obj):
    if isinstance(obj, np.ndarray):
        obj.setflags(write=False)
    elif isinstance(obj, (list, tuple)):
        for item in obj:
            _freeze(item)
    elif isinstance(obj, dict):
        for item in obj.values():
            _freeze(item)
    return obj


@dataclass(frozen=True)
class JobSpec:
    """What a job runs: a mapper, an optional combiner, and a reducer.

    ``mapper`` turns one record into any number of (key, value) emissions.
    ``combiner``, when present, must be commutative and associative over
    the value type; it is applied both within a worker's partition and when
    the driver merges partitions, so the reducer sees exactly one value per
    emission key.  ``reduce_key`` optionally projects emission keys onto
    reducer keys, letting one reducer invocation consume several combined
    emission groups (values arrive sorted by emission key).
    """

    mapper: MapperFn
    reducer: Optional[ReducerFn] = None
    combiner: Optional[CombinerFn] = None
    reduce_key: Optional[Callable[[Hashable], Hashable]] = None


@dataclass
class JobStats:
    """Counters for one executed job."""

    records: int = 0
    emissions: int = 0
    post_combine_emissions: int = 0
    shuffled_bytes: int = 0

    def add(self, other: "JobStats") -> None:
        self.records += other.records
        self.emissions += other.emissions
        self.post_combine_emissions += other.post_combine_emissions
        self.shuffled_bytes += other.shuffled_bytes


# Set immediately before forking a worker pool; children inherit it.  Holds
# (partitions, spec, measure_shuffle) so that only partition ids need to be
# pickled to workers.
_ACTIVE_JOB = None


def _map_partition(partition: Partition, spec: JobSpec, measure: bool):
    """Run the mapper (and local combiner) over one partition.

    Returns (stats, groups) where groups maps emission key to either the
    combined value (combiner present) or the list of raw values.
    """
    stats = JobStats(records=len(partition.records))
    groups: dict[Hashable, Any] = {}
    combiner = spec.combiner
    for idx, record in enumerate(partition.records):
        try:
            emissions = spec.mapper(record)
        except Exception as exc:
            raise JobError("mapper", partition.id, idx, exc) from exc
        for key, value in emissions:
            stats.emissions += 1
            if combiner is not None:
                if key in groups:
                    groups[key] = combiner(groups[key], value)
                else:
                    groups[key] = value
            else:
                groups.setdefault(key, []).append(value)
    if combiner is not None:
        stats.post_combine_emissions = len(groups)
    else:
        stats.post_combine_emissions = stats.emissions
    if measure:
        for key, value in groups.items():
            stats.shuffled_bytes += len(pickle.dumps((key, value), protocol=pickle.HIGHEST_PROTOCOL))
    return stats, groups


def _map_only_partition(partition: Partition, mapper: MapperFn):
    stats = JobStats(records=len(partition.records))
    out = []
    for idx, record in enumerate(partition.records):
        try:
            emissions = mapper(record)
        except Exception as exc:
            raise JobError("mapper", partition.id, idx, exc) from exc
        for item in emissions:
            out.append(item)
    stats.emissions = len(out)
    stats.post_combine_emissions = len(out)
    return stats, out


def _run_job_task(pid: int):
    partitions, spec, measure = _ACTIVE_JOB
    return _map_partition(partitions[pid], spec, measure)


def _map_only_task(pid: int):
    partitions, mapper = _ACTIVE_JOB
    return _map_only_partition(partitions[pid], mapper)


class MapReduceEngine:
    """Executor with a fixed worker count and default partition count.

    One engine instance runs one job at a time.  ``last_stats`` holds the
    counters of the most recent job; with ``measure_shuffle`` enabled they
    include the serialized size of everything crossing the combine-to-
    reduce boundary.
    """

    def __init__(self, workers: int = 1, partitions: int | None = None, measure_shuffle: bool = False):
        if workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self.partitions = partitions if partitions is not None else 4 * workers
        if self.partitions < 1:
            raise InvalidArgumentError(f"partitions must be >= 1, got {self.partitions}")
        self.measure_shuffle = measure_shuffle
        self.last_stats = JobStats()

    def broadcast(self, value) -> Broadcast:
        """Snapshot ``value`` for read-only use by every mapper of a job."""
        return Broadcast(value)

    # -- execution ---------------------------------------------------------

    def _partitions_of(self, dataset) -> list[Partition]:
        if len(dataset) > 0 and isinstance(dataset[0], Partition):
            return list(dataset)
        return partition_records(dataset, self.partitions)

    def _execute(self, partitions: list[Partition], task_fn, job_ctx):
        global _ACTIVE_JOB
        n = len(partitions)
        if self.workers == 1 or n <= 1:
            _ACTIVE_JOB = job_ctx
            try:
                return [task_fn(pid) for pid in range(n)]
            finally:
                _ACTIVE_JOB = None
        ctx = multiprocessing.get_context("fork")
        _ACTIVE_JOB = job_ctx
        try:
            with ctx.Pool(min(self.workers, n)) as pool:
                # one partition per worker at a time; results stay in
                # partition order regardless of completion order
                return pool.map(task_fn, range(n), chunksize=1)
        finally:
            _ACTIVE_JOB = None

    def run_job(self, dataset: Sequence, spec: JobSpec) -> dict:
        """Run map / combine / shuffle / reduce and return {key: reducer output}.

        The result equals the sequential semantics: group every mapper
        emission by key (projected through ``reduce_key`` when given) and
        apply the reducer once per key, in sorted key order.
        """
        if spec.reducer is None:
            raise InvalidArgumentError("run_job requires a reducer; use map_only for map-only jobs")
        partitions = self._partitions_of(dataset)
        results = self._execute(partitions, _run_job_task, (partitions, spec, self.measure_shuffle))

        stats = JobStats()
        merged: dict[Hashable, Any] = {}
        for part_stats, groups in results:  # partition-id order: pool.map preserves it
            stats.add(part_stats)
            if spec.combiner is not None:
                for key, value in groups.items():
                    if key in merged:
                        merged[key] = spec.combiner(merged[key], value)
                    else:
                        merged[key] = value
            else:
                for key, values in groups.items():
                    merged.setdefault(key, []).extend(values)

        project = spec.reduce_key
        reduce_groups: dict[Hashable, list] = {}
        for key in sorted(merged):
            rkey = project(key) if project is not None else key
            bucket = reduce_groups.setdefault(rkey, [])
            if spec.combiner is not None:
                bucket.append(merged[key])
            else:
                bucket.extend(merged[key])

        output = {}
        for rkey in sorted(reduce_groups):
            try:
                output[rkey] = spec.reducer(rkey, reduce_groups[rkey])
            except JobError:
                raise
            except Exception as exc:
                raise JobError(f"reducer(key={rkey!r})", -1, None, exc) from exc
        self.last_stats = stats
        return output

    def map_only(self, dataset: Sequence, mapper: MapperFn) -> list:
        """Apply ``mapper`` to every record; returns the concatenated emissions.

        Output order is partition order then record order, making repeated
        runs reproducible, though callers should rely only on the multiset.
        """
        partitions = self._partitions_of(dataset)
        results = self._execute(partitions, _map_only_task, (partitions, mapper))
        stats = JobStats()
        out: list = []
        for part_stats, items in results:
            stats.add(part_stats)
            out.extend(items)
        if self.measure_shuffle:
            stats.shuffled_bytes = len(pickle.dumps(out, protocol=pickle.HIGHEST_PROTOCOL))
        self.last_stats = stats
        return out
