"""The greedy forward-selection pipelines.

Three interchangeable routes compute the same ordered feature ranking:

* ``sequential_oracle``: a plain nested loop over column vectors, no
  executor involved; the ground truth the other two are tested against.
* ``select_conventional``: observations-as-records layout; every
  iteration runs one map/combine/shuffle/reduce job whose intermediate
  values are contingency tables, merged by the combiner.
* ``select_alternative``: features-as-records layout; every iteration
  broadcasts the class vector and the already-selected vectors and runs a
  map-only job in which each mapper scores its feature locally.

All three iterate candidates in ascending index order and take the
strictly-greatest score, so ties break toward the lowest feature index,
and all three produce bit-identical scores on discrete data with the
mutual-information score.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    ContingencyTable,
    DomainSpec,
    KeyedEmission,
    Sample,
    SelectionState,
    merge_tables,
    single_observation_table,
)
from .engine import Broadcast, JobSpec, MapReduceEngine
from .errors import (
    FeatureNotFoundError,
    InvalidArgumentError,
    StructuralError,
    UnsupportedDataError,
)
from .scoring import (
    MutualInformationScore,
    ScoreFunction,
    get_score_function,
    mrmr_combine,
    mutual_information,
)

# Partner tag for the candidate/class pair; selected-feature partners use
# the selected feature's own (non-negative) index.
CLASS_PARTNER = -1


@dataclass(frozen=True)
class TaggedTable:
    """A contingency table plus the pair it describes.

    ``partner`` is CLASS_PARTNER for the (candidate, class) pair, or the
    selected feature's index for a (candidate, selected) pair.  Class
    tables have class-domain rows; pair tables have value-domain rows.
    Columns are always the value domain of the candidate.
    """

    candidate: int
    partner: int
    table: ContingencyTable

    @property
    def emission_key(self) -> tuple[int, int]:
        return (self.candidate, self.partner)


@dataclass(frozen=True)
class SelectedFeature:
    index: int
    name: str
    score: float
    iteration: int


@dataclass(frozen=True)
class SelectionResult:
    """Ordered outcome of a selection run, plus the configuration echo."""

    features: tuple[SelectedFeature, ...]
    num_requested: int
    score_name: str
    layout: str

    def __post_init__(self):
        if len(self.features) != self.num_requested:
            raise StructuralError(
                f"selected {len(self.features)} features but {self.num_requested} were requested"
            )
        indices = [f.index for f in self.features]
        if len(set(indices)) != len(indices):
            raise StructuralError(f"selected indices are not distinct: {indices}")
        iterations = [f.iteration for f in self.features]
        if iterations != list(range(1, len(self.features) + 1)):
            raise StructuralError(f"iteration numbers must be 1..L in order, got {iterations}")

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(f.index for f in self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def as_dict(self) -> dict:
        return {
            "layout": self.layout,
            "score": self.score_name,
            "num_features": self.num_requested,
            "selected": [
                {"rank": f.iteration, "feature": f.name, "index": f.index, "score": f.score}
                for f in self.features
            ],
        }


@dataclass
class IterationLog:
    iteration: int
    num_candidates: int
    num_selected: int
    emissions: int
    post_combine_emissions: int
    shuffled_bytes: int


@dataclass
class RunLog:
    """Per-iteration executor counters, filled in when a caller passes one."""

    iterations: list[IterationLog] = field(default_factory=list)

    @property
    def total_shuffled_bytes(self) -> int:
        return sum(it.shuffled_bytes for it in self.iterations)

    @property
    def total_emissions(self) -> int:
        return sum(it.emissions for it in self.iterations)


# ---------------------------------------------------------------------------
# conventional encoding: contingency-table mappers, merging combiner,
# scoring reducer
# ---------------------------------------------------------------------------


def conventional_mapper(
    sample: Sample,
    candidates: Sequence[int],
    selected: Sequence[int],
    domains: DomainSpec,
) -> list[KeyedEmission]:
    """Emissions of one observation: per candidate, one single-observation
    table against the class and one against each selected feature.

    Emission count is exactly ``len(candidates) * (1 + len(selected))``.
    """
    out = []
    for k in candidates:
        table = single_observation_table(
            sample.class_label, sample.values[k], domains.class_domain, domains.value_domain
        )
        tagged = TaggedTable(k, CLASS_PARTNER, table)
        out.append(KeyedEmission(tagged.emission_key, tagged))
        for j in selected:
            table = single_observation_table(
                sample.values[j], sample.values[k], domains.value_domain, domains.value_domain
            )
            tagged = TaggedTable(k, j, table)
            out.append(KeyedEmission(tagged.emission_key, tagged))
    return out


def merge_tagged_tables(a: TaggedTable, b: TaggedTable) -> TaggedTable:
    """Combiner for the conventional pipeline: element-wise table sum."""
    if (a.candidate, a.partner) != (b.candidate, b.partner):
        raise StructuralError(
            f"combiner received tables of different pairs: "
            f"{(a.candidate, a.partner)} vs {(b.candidate, b.partner)}"
        )
    return TaggedTable(a.candidate, a.partner, merge_tables(a.table, b.table))


def score_from_tables(
    candidate: int,
    tables: Sequence[TaggedTable],
    expected_selected: Sequence[int],
) -> float:
    """Reduce a candidate's tables to its greedy score.

    Accepts several tables per partner (the combiner may be disabled) and
    merges them first; a missing or unexpected partner means the shuffle
    mis-grouped something and raises a structural error.
    """
    by_partner: dict[int, ContingencyTable] = {}
    for tagged in tables:
        if tagged.candidate != candidate:
            raise StructuralError(
                f"reducer for candidate {candidate} received a table of candidate {tagged.candidate}"
            )
        if tagged.partner in by_partner:
            by_partner[tagged.partner] = merge_tables(by_partner[tagged.partner], tagged.table)
        else:
            by_partner[tagged.partner] = tagged.table

    expected = {CLASS_PARTNER, *expected_selected}
    if set(by_partner) != expected:
        raise StructuralError(
            f"candidate {candidate}: expected partner tags {sorted(expected)}, "
            f"got {sorted(by_partner)}"
        )
    relevance = mutual_information(by_partner[CLASS_PARTNER])
    redundancies = [mutual_information(by_partner[j]) for j in expected_selected]
    return mrmr_combine(relevance, redundancies)


@dataclass(frozen=True)
class _SampleMapper:
    """Record-at-a-time mapper for one iteration (observation records)."""

    candidates: tuple[int, ...]
    selected: tuple[int, ...]
    domains: DomainSpec

    def __call__(self, sample: Sample):
        return conventional_mapper(sample, self.candidates, self.selected, self.domains)


@dataclass(frozen=True)
class _BlockMapper:
    """Block-at-a-time mapper, the vectorized equivalent of _SampleMapper.

    Emits, per block, one already-aggregated table per (candidate, partner),
    exactly what the per-record mapper plus a per-block combiner would
    produce; equality of the two routes is covered by tests.
    """

    candidates: tuple[int, ...]
    selected: tuple[int, ...]
    domains: DomainSpec

    def __call__(self, block):
        d_c = self.domains.class_domain
        d_v = self.domains.value_domain
        n_v = len(d_v)
        out = []
        class_rows = block.class_positions.astype(np.int64) * n_v
        partner_rows = {
            j: block.feature_positions[:, j].astype(np.int64) * n_v for j in self.selected
        }
        for k in self.candidates:
            col = block.feature_positions[:, k]
            counts = np.bincount(class_rows + col, minlength=len(d_c) * n_v)
            tagged = TaggedTable(
                k, CLASS_PARTNER, ContingencyTable(d_c, d_v, counts.reshape(len(d_c), n_v))
            )
            out.append(KeyedEmission(tagged.emission_key, tagged))
            for j in self.selected:
                counts = np.bincount(partner_rows[j] + col, minlength=n_v * n_v)
                tagged = TaggedTable(k, j, ContingencyTable(d_v, d_v, counts.reshape(n_v, n_v)))
                out.append(KeyedEmission(tagged.emission_key, tagged))
        return out


@dataclass(frozen=True)
class _ScoreReducer:
    expected_selected: tuple[int, ...]

    def __call__(self, candidate: int, tables: list[TaggedTable]):
        return score_from_tables(candidate, tables, self.expected_selected)


def _argmax_lowest_index(scores: dict[int, float]) -> tuple[int, float]:
    best_index = None
    best_score = -np.inf
    for k in sorted(scores):
        if scores[k] > best_score:
            best_index = k
            best_score = scores[k]
    if best_index is None:
        raise StructuralError("no candidate scores to take the argmax of")
    return best_index, float(best_score)


def _check_num_features(num_features: int, num_candidates: int) -> None:
    if num_features < 1:
        raise InvalidArgumentError(f"number of features to select must be >= 1, got {num_features}")
    if num_features > num_candidates:
        raise InvalidArgumentError(
            f"L exceeds candidate count: asked for {num_features} of {num_candidates} candidates"
        )


def select_conventional(
    dataset,
    num_features: int,
    *,
    score: str | ScoreFunction = "mi",
    workers: int = 1,
    partitions: int | None = None,
    record_level: bool = False,
    run_log: Optional[RunLog] = None,
    measure_shuffle: bool = False,
) -> SelectionResult:
    """Greedy selection over an observations-as-records dataset.

    One executor job per iteration: mappers emit per-pair contingency
    tables, the combiner merges them per (candidate, partner) key, and the
    reducer turns each candidate's merged tables into its score.  By
    default records are numpy blocks; ``record_level=True`` switches to
    one-``Sample``-at-a-time mapping (same output, far more emissions).
    """
    score_fn = get_score_function(score) if isinstance(score, str) else score
    if not isinstance(score_fn, MutualInformationScore):
        raise UnsupportedDataError(
            "the conventional pipeline works on contingency tables and supports only "
            f"the 'mi' score, not {score_fn.name!r}"
        )
    if dataset.meta.domains is None:
        raise UnsupportedDataError("the conventional pipeline needs a discrete, domain-scanned dataset")

    state = SelectionState(candidates=list(range(dataset.meta.num_features)))
    _check_num_features(num_features, len(state.candidates))

    engine = MapReduceEngine(workers=workers, partitions=partitions, measure_shuffle=measure_shuffle)
    records = dataset.samples() if record_level else dataset.blocks(engine.partitions)

    for _ in range(num_features):
        candidates = tuple(state.candidates)
        selected = state.selected_indices
        mapper_cls = _SampleMapper if record_level else _BlockMapper
        spec = JobSpec(
            mapper=mapper_cls(candidates, selected, dataset.meta.domains),
            combiner=merge_tagged_tables,
            reducer=_ScoreReducer(selected),
            reduce_key=lambda key: key[0],
        )
        scores = engine.run_job(records, spec)
        _log_iteration(run_log, state, engine)
        best, best_score = _argmax_lowest_index(scores)
        state.advance(best, best_score)

    return _result_from_state(state, dataset.meta.feature_names, num_features, "mi", "conventional")


# ---------------------------------------------------------------------------
# alternative encoding: broadcast class/selected vectors, map-only scoring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _EntryProbe:
    index: int
    by_name: bool = False

    def __call__(self, row):
        key = row.name if self.by_name else row.index
        return [(row.index, row.values)] if key == self.index else []


def get_entry(dataset, index, *, engine: MapReduceEngine | None = None) -> np.ndarray:
    """Fetch one feature row's value vector by index (or name) via a
    filtering map-only job over the partitions."""
    engine = engine or MapReduceEngine()
    by_name = isinstance(index, str)
    matches = engine.map_only(dataset.records(), _EntryProbe(index, by_name))
    if not matches:
        raise FeatureNotFoundError(f"no feature row with {'name' if by_name else 'index'} {index!r}")
    if len(matches) > 1:
        raise StructuralError(
            f"feature row {'name' if by_name else 'index'} {index!r} matched "
            f"{len(matches)} rows; dataset is corrupted"
        )
    return np.asarray(matches[0][1])


@dataclass(frozen=True)
class _ScoringMapper:
    """Scores one candidate feature row against broadcast vectors."""

    score: ScoreFunction
    class_vector: Broadcast
    selected_vectors: Broadcast
    selected_indices: Broadcast
    class_row_index: int

    def __call__(self, row):
        if row.index == self.class_row_index or row.index in self.selected_indices.value:
            return []
        value = self.score.get_result(
            row.values, self.class_vector.value, self.selected_vectors.value
        )
        return [(row.index, value)]


def select_alternative(
    dataset,
    num_features: int,
    *,
    score: str | ScoreFunction = "mi",
    workers: int = 1,
    partitions: int | None = None,
    run_log: Optional[RunLog] = None,
    measure_shuffle: bool = False,
) -> SelectionResult:
    """Greedy selection over a features-as-records dataset.

    Each iteration broadcasts the class vector, the selected vectors and
    the selected indices, then runs a map-only job: every mapper that holds
    a still-candidate row scores it locally and emits (index, score).  The
    driver takes the argmax, fetches the winner's vector, and extends the
    broadcasts for the next round.  Works with any registered score
    function, including continuous-data ones.
    """
    score_fn = get_score_function(score) if isinstance(score, str) else score
    if score_fn.requires_discrete and not dataset.values_integral:
        raise UnsupportedDataError(
            f"score {score_fn.name!r} needs categorical (integer-coded) data, but the "
            "dataset contains non-integral values"
        )

    engine = MapReduceEngine(workers=workers, partitions=partitions, measure_shuffle=measure_shuffle)
    class_index = dataset.class_row_index
    class_vector = get_entry(dataset, class_index, engine=engine)

    state = SelectionState(
        candidates=[row.index for row in dataset.records() if row.index != class_index]
    )
    _check_num_features(num_features, len(state.candidates))

    records = dataset.records()
    class_bc = engine.broadcast(class_vector)
    selected_vectors: list[np.ndarray] = []

    for _ in range(num_features):
        mapper = _ScoringMapper(
            score=score_fn,
            class_vector=class_bc,
            selected_vectors=engine.broadcast(tuple(selected_vectors)),
            selected_indices=engine.broadcast(frozenset(state.selected_indices)),
            class_row_index=class_index,
        )
        emissions = engine.map_only(records, mapper)
        _log_iteration(run_log, state, engine)
        scores = dict(emissions)
        if len(scores) != len(emissions):
            raise StructuralError("duplicate feature indices in scoring emissions")
        best, best_score = _argmax_lowest_index(scores)
        state.advance(best, best_score)
        selected_vectors.append(get_entry(dataset, best, engine=engine))

    return _result_from_state(
        state, dataset.row_names_by_index(), num_features, score_fn.name, "alternative"
    )


# ---------------------------------------------------------------------------
# sequential reference
# ---------------------------------------------------------------------------


def sequential_oracle(
    columns: Sequence[np.ndarray],
    class_vector: np.ndarray,
    num_features: int,
    score: str | ScoreFunction = "mi",
    *,
    feature_names: Sequence[str] | None = None,
    memoize_pairs: bool = False,
) -> SelectionResult:
    """Plain greedy loop over column vectors; the engine-free ground truth.

    By default each candidate is scored with one direct
    ``score.get_result(candidate, class, selected)`` call, matching what
    the pipelines' mappers do, so it is valid for any score function.
    ``memoize_pairs`` instead exploits the relevance-minus-mean-redundancy
    decomposition to cache pairwise terms across iterations; scores are
    unchanged for the built-in scores, only repeated work is skipped.  Off
    by default so that cost counting matches the pipelines, which recompute
    every term each iteration.
    """
    score_fn = get_score_function(score) if isinstance(score, str) else score
    columns = [np.asarray(c) for c in columns]
    class_vector = np.asarray(class_vector)
    if feature_names is None:
        feature_names = [f"f{i + 1}" for i in range(len(columns))]
    elif len(feature_names) != len(columns):
        raise InvalidArgumentError("feature_names length must match the number of columns")

    state = SelectionState(candidates=list(range(len(columns))))
    _check_num_features(num_features, len(state.candidates))

    # get_result with no selected vectors reduces to the raw pair score
    pair_cache: dict[tuple[int, int], float] = {}

    def cached_pair(k: int, j: int) -> float:
        key = (min(k, j), max(k, j))
        if key not in pair_cache:
            pair_cache[key] = score_fn.get_result(columns[k], columns[j], ())
        return pair_cache[key]

    relevance_cache: dict[int, float] = {}

    def cached_relevance(k: int) -> float:
        if k not in relevance_cache:
            relevance_cache[k] = score_fn.get_result(columns[k], class_vector, ())
        return relevance_cache[k]

    for _ in range(num_features):
        best_index, best_score = None, -np.inf
        for k in state.candidates:
            if memoize_pairs:
                g = mrmr_combine(
                    cached_relevance(k),
                    [cached_pair(k, j) for j in state.selected_indices],
                )
            else:
                g = score_fn.get_result(
                    columns[k],
                    class_vector,
                    tuple(columns[j] for j in state.selected_indices),
                )
            if g > best_score:
                best_index, best_score = k, g
        state.advance(best_index, best_score)

    return _result_from_state(state, feature_names, num_features, score_fn.name, "reference")


# ---------------------------------------------------------------------------


def _result_from_state(state, names, num_features, score_name, layout) -> SelectionResult:
    features = tuple(
        SelectedFeature(index=idx, name=names[idx], score=score, iteration=i + 1)
        for i, (idx, score) in enumerate(state.selected)
    )
    return SelectionResult(
        features=features, num_requested=num_features, score_name=score_name, layout=layout
    )


def _log_iteration(run_log: Optional[RunLog], state: SelectionState, engine: MapReduceEngine) -> None:
    if run_log is None:
        return
    stats = engine.last_stats
    run_log.iterations.append(
        IterationLog(
            iteration=state.step,
            num_candidates=len(state.candidates),
            num_selected=len(state.selected),
            emissions=stats.emissions,
            post_combine_emissions=stats.post_combine_emissions,
            shuffled_bytes=stats.shuffled_bytes,
        )
    )
