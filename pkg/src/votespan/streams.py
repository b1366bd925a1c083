"""Instance sources for the stream-ensemble harness.

Two sources are provided: a synthetic radial-basis generator (a mixture of
spherical Gaussians around randomly placed centroids, labels assigned to
centroids round-robin) and a CSV loader for desk-scale datasets with a
header row, numeric feature columns, and the label in the final column.
Both yield :class:`StreamInstance` values.

The module also reads and writes vote dumps: long-format CSV files with
one row per (instance, member) pair carrying the member's per-class
scores, which is the interchange format the dependence estimator consumes
offline.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import IngestionError, ValidationError

#: Instances are synthesized in fixed-size blocks so the sequence produced
#: by a seed does not depend on how much of it the caller consumes.
GENERATION_BLOCK = 4096


@dataclass(frozen=True)
class StreamInstance:
    """One labelled example: a feature vector and its class index."""

    features: np.ndarray
    label: int


@dataclass(frozen=True)
class RbfStreamConfig:
    """Parameters for the radial-basis stream.

    ``spread`` scales the cube the centroids are drawn from and therefore
    sets the task difficulty: tightly packed centroids overlap more and
    are harder to separate. ``offset_scale`` is the standard deviation of
    the spherical Gaussian around each centroid. The stream ends after
    ``instance_count`` instances.
    """

    m: int
    n_features: int = 20
    n_centroids: int = 50
    spread: float = 6.0
    offset_scale: float = 1.0
    seed: int = 0
    instance_count: int = 1_000_000

    def __post_init__(self):
        if self.m < 2:
            raise ValidationError(f"class count m must be >= 2, got {self.m}")
        if self.n_features < 1:
            raise ValidationError(
                f"n_features must be >= 1, got {self.n_features}"
            )
        if self.n_centroids < self.m:
            raise ValidationError(
                f"need at least one centroid per class: "
                f"{self.n_centroids} < {self.m}"
            )
        if self.spread <= 0 or self.offset_scale <= 0:
            raise ValidationError("spread and offset_scale must be positive")
        if self.instance_count < 1:
            raise ValidationError(
                f"instance_count must be >= 1, got {self.instance_count}"
            )


class RbfStream:
    """Endless mixture-of-Gaussians stream with round-robin class labels."""

    def __init__(self, config: RbfStreamConfig):
        self.config = config
        rng = np.random.default_rng([config.seed, 0])
        self.centroids = rng.uniform(
            0.0, config.spread, size=(config.n_centroids, config.n_features)
        )
        self.centroid_labels = np.arange(config.n_centroids) % config.m

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def n_features(self) -> int:
        return self.config.n_features

    def __len__(self) -> int:
        return self.config.instance_count

    def __iter__(self) -> Iterator[StreamInstance]:
        # every iteration replays the same sequence for this seed; fixed
        # generation blocks keep the prefix independent of the total
        cfg = self.config
        rng = np.random.default_rng([cfg.seed, 1])
        remaining = cfg.instance_count
        while remaining > 0:
            picks = rng.integers(0, cfg.n_centroids, size=GENERATION_BLOCK)
            offsets = rng.standard_normal(
                (GENERATION_BLOCK, cfg.n_features)
            ) * cfg.offset_scale
            block = self.centroids[picks] + offsets
            labels = self.centroid_labels[picks]
            for i in range(min(GENERATION_BLOCK, remaining)):
                yield StreamInstance(block[i], int(labels[i]))
            remaining -= GENERATION_BLOCK


@dataclass(frozen=True)
class CsvDataset:
    """A fully loaded CSV dataset, iterable as a stream."""

    features: np.ndarray
    labels: np.ndarray
    label_names: tuple[str, ...]
    feature_names: tuple[str, ...]
    path: Path

    @property
    def m(self) -> int:
        return len(self.label_names)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.features.shape[0]

    def __iter__(self) -> Iterator[StreamInstance]:
        for i in range(len(self)):
            yield StreamInstance(self.features[i], int(self.labels[i]))


def csv_ingest(
    path, expected_labels: Sequence[str] | None = None
) -> CsvDataset:
    """Load a header+rows CSV with numeric features and a final label column.

    Labels are mapped to class indices in first-appearance order, or in
    the order of ``expected_labels`` when given (then any other label is
    an error). Malformed rows raise :class:`IngestionError` carrying the
    1-based line number.
    """
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"dataset file not found: {path}")
    label_index: dict[str, int] = {}
    if expected_labels is not None:
        if len(expected_labels) < 2:
            raise ValidationError("expected_labels needs at least 2 classes")
        label_index = {name: i for i, name in enumerate(expected_labels)}
        if len(label_index) != len(expected_labels):
            raise ValidationError("expected_labels contains duplicates")
    rows: list[list[float]] = []
    labels: list[int] = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"empty dataset file: {path}") from None
        if len(header) < 2:
            raise IngestionError(
                "need at least one feature column and a label column",
                line_no=1,
            )
        width = len(header)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise IngestionError(
                    f"expected {width} columns, found {len(row)}",
                    line_no=line_no,
                )
            try:
                rows.append([float(cell) for cell in row[:-1]])
            except ValueError:
                raise IngestionError(
                    f"non-numeric feature value in {row[:-1]!r}",
                    line_no=line_no,
                ) from None
            name = row[-1].strip()
            if name not in label_index:
                if expected_labels is not None:
                    raise IngestionError(
                        f"label {name!r} not in the expected label set",
                        line_no=line_no,
                    )
                label_index[name] = len(label_index)
            labels.append(label_index[name])
    if not rows:
        raise IngestionError(f"dataset has a header but no rows: {path}")
    if len(label_index) < 2:
        raise IngestionError(
            f"dataset must contain at least 2 classes, found "
            f"{len(label_index)}"
        )
    names = tuple(sorted(label_index, key=label_index.__getitem__))
    return CsvDataset(
        features=np.asarray(rows, dtype=float),
        labels=np.asarray(labels, dtype=np.int64),
        label_names=names,
        feature_names=tuple(header[:-1]),
        path=path,
    )


def write_vote_dump(path, matrices) -> None:
    """Write per-instance vote matrices in the long interchange format.

    Columns: instance_id, classifier_id, then one score column per
    class. Instances are numbered in iteration order, classifiers in
    row order.
    """
    matrices = [np.asarray(m, dtype=float) for m in matrices]
    if not matrices:
        raise ValidationError("no vote matrices to write")
    width = matrices[0].shape[1]
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["instance_id", "classifier_id"]
            + [f"score_{c}" for c in range(width)]
        )
        for i, matrix in enumerate(matrices):
            if matrix.ndim != 2 or matrix.shape[1] != width:
                raise ValidationError(
                    f"matrix {i} has shape {matrix.shape}, expected "
                    f"(*, {width})"
                )
            for j, row in enumerate(matrix):
                writer.writerow([i, j] + [repr(float(x)) for x in row])


def read_vote_dump(path) -> list[np.ndarray]:
    """Read vote matrices written by :func:`write_vote_dump`.

    Rows are grouped by instance in file order; within an instance,
    classifier ids must be unique and are sorted ascending. Malformed
    rows raise :class:`IngestionError` with the line number.
    """
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"vote dump not found: {path}")
    groups: dict[str, list[tuple[int, list[float]]]] = {}
    order: list[str] = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"empty vote dump: {path}") from None
        if len(header) < 4 or header[:2] != ["instance_id", "classifier_id"]:
            raise IngestionError(
                "expected columns instance_id, classifier_id, score_0, ...",
                line_no=1,
            )
        width = len(header) - 2
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width + 2:
                raise IngestionError(
                    f"expected {width + 2} columns, found {len(row)}",
                    line_no=line_no,
                )
            try:
                member = int(row[1])
                scores = [float(cell) for cell in row[2:]]
            except ValueError:
                raise IngestionError(
                    f"non-numeric value in {row!r}", line_no=line_no
                ) from None
            key = row[0]
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append((member, scores))
    if not order:
        raise IngestionError(f"vote dump has a header but no rows: {path}")
    matrices = []
    for key in order:
        entries = groups[key]
        members = [member for member, _ in entries]
        if len(set(members)) != len(members):
            raise IngestionError(
                f"instance {key!r} repeats a classifier id"
            )
        entries.sort(key=lambda pair: pair[0])
        matrices.append(np.array([scores for _, scores in entries]))
    return matrices
