import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from engine_utils.directory_info import DirectoryInfo
from engine_utils.random_streams import derive_seed
from mixmatch.common.csv_output import write_csv
from mixmatch.common.mixmatch_errors import IngestError, SuiteConfigError
from mixmatch.data_models.ingest_config_data import IngestSpec, SplitPercentages
from mixmatch.data_models.samples import SampleBatch
from mixmatch.data_models.suite_config_data import LossConfigModel
from mixmatch.problems.problem_suite import ProblemSuite
from mixmatch.problems.sample_sources import FiniteSource
from mixmatch.problems.suite_builder import assemble_suite, build_loss_problem

INGEST_SPLITS_HEADER = ("source", "total", "train", "validate", "test", "discard")
SPLIT_NAMES = ("train", "validate", "test", "discard")


def _floor_share(total: int, percent: float) -> int:
    # exact decimal arithmetic so 49.34% of 14605 floors to 7206 without float drift
    return math.floor(Fraction(repr(float(percent))) * total / 100)


def split_counts(total: int, percentages: SplitPercentages) -> Dict[str, int]:
    """
    Floor each share of `total`. Rows left over by the rounding are discarded
    when the discard share is positive, otherwise they join the training split.
    """
    counts = {
        "train": _floor_share(total, percentages.train),
        "validate": _floor_share(total, percentages.validate_),
        "test": _floor_share(total, percentages.test),
        "discard": _floor_share(total, percentages.discard),
    }
    leftover = total - sum(counts.values())
    counts["discard" if percentages.discard > 0 else "train"] += leftover
    return counts


@dataclass
class SourceSplit:
    source: str
    # row positions in the original file
    train: np.ndarray
    validate: np.ndarray
    test: np.ndarray
    discard: np.ndarray

    @property
    def total(self) -> int:
        return sum(len(getattr(self, name)) for name in SPLIT_NAMES)

    def csv_row(self):
        return (self.source, self.total, len(self.train), len(self.validate), len(self.test), len(self.discard))


def _read_table(spec: IngestSpec) -> pd.DataFrame:
    path = DirectoryInfo.resolve_path(spec.path)
    if not os.path.isfile(path):
        raise IngestError(f"Ingest file {path} does not exist")
    frame = pd.read_csv(path)
    required = [spec.source_column, spec.label_column] + list(spec.feature_columns or []) + list(spec.one_hot_columns)
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise IngestError(f"Columns {missing} missing from {path}")
    logger.info(f"Read {len(frame)} rows from {path}")
    return frame


def _feature_matrix(frame: pd.DataFrame, spec: IngestSpec) -> Tuple[np.ndarray, List[str]]:
    if spec.feature_columns is None:
        excluded = {spec.source_column, spec.label_column, *spec.one_hot_columns}
        columns = [column for column in frame.columns if column not in excluded]
    else:
        columns = list(spec.feature_columns)
    numeric = frame[columns]
    for column in columns:
        if not pd.api.types.is_numeric_dtype(numeric[column]):
            raise IngestError(f"Feature column {column} is not numeric; list it under one_hot_columns")
    if spec.one_hot_columns:
        dummies = pd.get_dummies(frame[spec.one_hot_columns].astype(str), dtype=np.float64)
        numeric = pd.concat([numeric, dummies], axis=1)
    if numeric.shape[1] == 0:
        raise IngestError("No feature columns left after excluding source and label columns")
    values = numeric.to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise IngestError("Feature columns contain missing or non-finite values")
    return values, list(numeric.columns)


def _labels(frame: pd.DataFrame, spec: IngestSpec) -> np.ndarray:
    column = frame[spec.label_column]
    if spec.loss.lower() == "quadratic":
        if not pd.api.types.is_numeric_dtype(column):
            raise IngestError(f"Label column {spec.label_column} must be numeric for the quadratic loss")
        labels = column.to_numpy(dtype=np.float64)
        if not np.all(np.isfinite(labels)):
            raise IngestError(f"Label column {spec.label_column} has missing values")
        return labels
    classes = sorted(column.dropna().unique().tolist())
    if len(classes) != 2 or column.isna().any():
        raise IngestError(f"Label column {spec.label_column} must hold exactly two classes, found {classes}")
    # the larger class maps to +1
    return np.where(column.to_numpy() == classes[1], 1.0, -1.0)


def split_sources(source_values: np.ndarray, spec: IngestSpec) -> List[SourceSplit]:
    """Partition row positions per source value, shuffled under the ingest seed."""
    splits = []
    for value in sorted(set(source_values.tolist())):
        rows = np.flatnonzero(source_values == value)
        percentages = spec.splits.get(value, spec.default_split)
        counts = split_counts(rows.size, percentages)
        rng = np.random.default_rng(derive_seed(spec.seed, "ingest", value))
        shuffled = rows[rng.permutation(rows.size)]
        bounds = np.cumsum([0] + [counts[name] for name in SPLIT_NAMES])
        parts = {name: np.sort(shuffled[bounds[i]:bounds[i + 1]]) for i, name in enumerate(SPLIT_NAMES)}
        splits.append(SourceSplit(source=value, **parts))
        logger.debug(f"Source {value}: {counts}")
    return splits


def ingest_csv_with_splits(spec: IngestSpec) -> Tuple[ProblemSuite, List[SourceSplit]]:
    frame = _read_table(spec)
    x, feature_names = _feature_matrix(frame, spec)
    y = _labels(frame, spec)
    source_values = frame[spec.source_column].astype(str).to_numpy()
    unknown = set(spec.splits) - set(source_values.tolist())
    if unknown:
        logger.warning(f"Split percentages given for absent sources {sorted(unknown)}")
    splits = split_sources(source_values, spec)
    if not splits:
        raise IngestError(f"{spec.path} has no rows")

    sources = []
    for split in splits:
        if len(split.train) == 0:
            raise IngestError(f"Source {split.source} has no training rows")
        sources.append(FiniteSource(x[split.train], y[split.train], name=split.source))
    validation_rows = np.sort(np.concatenate([split.validate for split in splits]))
    test_rows = np.sort(np.concatenate([split.test for split in splits]))
    if validation_rows.size == 0:
        raise IngestError("Validation split is empty for every source")

    def batch(rows: np.ndarray) -> SampleBatch:
        return SampleBatch(x=x[rows], y=y[rows], u=np.zeros((rows.size, 0)))

    loss_config = LossConfigModel(kind=spec.loss, embedding=spec.embedding, regularization=spec.regularization)
    try:
        loss = build_loss_problem(loss_config, x.shape[1])
    except SuiteConfigError as e:
        raise IngestError(str(e)) from e
    name = spec.name or os.path.splitext(os.path.basename(spec.path))[0]
    suite = assemble_suite(name, loss, sources, batch(validation_rows), loss_config, spec.seed,
                           true_mixture=None, test=batch(test_rows) if test_rows.size else None)
    logger.info(f"Ingested {name}: sources {[split.source for split in splits]}, "
                f"{len(feature_names)} features, {validation_rows.size} validation rows")
    return suite, splits


def ingest_csv(spec: IngestSpec) -> ProblemSuite:
    return ingest_csv_with_splits(spec)[0]


def write_ingest_splits(splits: List[SourceSplit], path: Optional[str]):
    write_csv(path, INGEST_SPLITS_HEADER, [split.csv_row() for split in splits])
