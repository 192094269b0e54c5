"""Greedy minimum-redundancy / maximum-relevance feature selection on an
in-process MapReduce executor, supporting observations-as-records and
features-as-records data layouts with pluggable score functions."""

from .core import (
    ContingencyTable,
    DomainSpec,
    FeatureRow,
    KeyedEmission,
    Sample,
    SelectionState,
    merge_tables,
    single_observation_table,
)
from .data import (
    AlternativeDataset,
    ConventionalDataset,
    DatasetMeta,
    generate_synthetic,
    read_alternative,
    read_conventional,
    read_dataset,
    transpose,
    write_alternative,
    write_conventional,
)
from .engine import Broadcast, JobSpec, JobStats, MapReduceEngine, Partition, partition_records
from .scoring import (
    MutualInformationScore,
    PearsonCorrelationScore,
    ScoreFunction,
    available_scores,
    get_score_function,
    mrmr_combine,
    mutual_information,
    pair_table,
    pearson,
    register_score,
)
from .selector import (
    RunLog,
    SelectionResult,
    TaggedTable,
    conventional_mapper,
    get_entry,
    score_from_tables,
    select_alternative,
    select_conventional,
    sequential_oracle,
)

__version__ = "0.1.0"
