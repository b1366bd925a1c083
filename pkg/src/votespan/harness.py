"""Prequential evaluation and the ensemble-size experiment grid.

The harness answers the empirical half of the sizing question: run online
ensembles of several sizes over a data stream, measure accuracy
prequentially (predict, score, then train on each instance), estimate the
per-dimension dependence profile of the member votes on the fly, and
compare the accuracy curve against the PLI curve the profile predicts.

Grid cells are keyed by (dataset, method, size, seed) and are pure
functions of the configuration and the seed: streams and bagging draws
both derive from the cell key, so reruns (and parallel runs) reproduce
byte-identical reports. Cell results are merged in sorted key order no
matter what order they finish in.

Reports are four CSV files: raw per-cell results, per-size aggregate
rows, the measured dependence profiles, and the PLI curve; see
:func:`write_reports`.
"""

from __future__ import annotations

import csv
import datetime as _dt
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .algebra import RANK_TOL
from .ensemble import EnsembleModel, make_ensemble
from .errors import UndefinedCorrelationError, ValidationError
from .estimation import RankCounters, finalize_p, update_counters
from .pli import (
    DEFAULT_MAX_N,
    DependenceProfile,
    SizingRequest,
    pli_exact,
    solve_inc,
    solve_sinc,
)
from .streams import RbfStream, RbfStreamConfig, csv_ingest

#: Column order of the four report files, fixed as an external contract.
RAW_HEADER = ["dataset", "method", "m", "n", "seed", "instances",
              "accuracy", "full_rank_fraction"]
SUMMARY_HEADER = ["dataset", "method", "m", "SINC", "INC", "n_INC",
                  "acc_pct_of_max", "correlation"]
PROFILE_HEADER = ["dataset", "method", "n", "l", "p_l"]
CURVE_HEADER = ["dataset", "method", "n", "pli"]


@dataclass(frozen=True)
class PrequentialRecord:
    """Outcome of one predict-score-train pass over a stream."""

    instances: int
    correct: int
    windowed: tuple[tuple[int, float], ...]

    @property
    def accuracy(self) -> float:
        return self.correct / self.instances


def prequential_run(
    stream: Iterable,
    ensemble: EnsembleModel,
    rng: np.random.Generator,
    limit: int | None = None,
    window: int = 1000,
    vote_sink: Callable[[np.ndarray], None] | None = None,
) -> PrequentialRecord:
    """Predict, score, then train on each instance; first-n if ``limit``.

    ``vote_sink`` receives every prediction-time vote matrix (before the
    instance trains anything), which is where dependence counting hooks
    in. A stream shorter than ``limit`` is processed to exhaustion; an
    empty pass is an error, as is a non-positive ``limit``.
    """
    if limit is not None and limit < 1:
        raise ValidationError(f"limit must be >= 1, got {limit}")
    if window < 1:
        raise ValidationError(f"window must be >= 1, got {window}")
    instances = 0
    correct = 0
    window_correct = 0
    windowed: list[tuple[int, float]] = []
    for instance in islice(iter(stream), limit):
        votes, predicted = ensemble.predict(instance.features)
        if vote_sink is not None:
            vote_sink(votes)
        hit = predicted == instance.label
        correct += hit
        window_correct += hit
        ensemble.train(instance.features, instance.label, rng, votes=votes)
        instances += 1
        if instances % window == 0:
            windowed.append((instances, window_correct / window))
            window_correct = 0
    if instances == 0:
        raise ValidationError("the stream yielded no instances")
    return PrequentialRecord(instances, correct, tuple(windowed))


def pearson_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation; undefined for constant series."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError(
            f"need two equal-length 1-D series, got {x.shape} and {y.shape}"
        )
    if x.size < 2:
        raise ValidationError("correlation needs at least two points")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt((xc * xc).sum()))
    sy = float(np.sqrt((yc * yc).sum()))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError(
            "correlation is undefined when a series has zero variance"
        )
    return float((xc * yc).sum() / (sx * sy))


def nearest_tested_size(target: int, sizes: Sequence[int]) -> int:
    """Grid size closest to ``target``; ties resolve to the smaller size."""
    if not sizes:
        raise ValidationError("no tested sizes to choose from")
    return min(sizes, key=lambda size: (abs(size - target), size))


def percent_of_max(
    accuracy_by_size: Mapping[int, float], size: int
) -> float:
    """Accuracy at ``size`` as a percentage of the best size's accuracy."""
    if not accuracy_by_size:
        raise ValidationError("no accuracies supplied")
    if size not in accuracy_by_size:
        raise ValidationError(f"size {size} was not tested")
    best = max(accuracy_by_size.values())
    if best <= 0.0:
        raise ValidationError("accuracies must contain a positive value")
    return 100.0 * accuracy_by_size[size] / best


@dataclass(frozen=True)
class DatasetSpec:
    """A named instance source the grid can instantiate per seed.

    ``rbf`` datasets synthesize a fresh stream per seed; ``csv`` datasets
    replay the file in order every seed (only the bagging randomness
    varies). Construct via :func:`rbf_dataset` / :func:`csv_dataset`.
    """

    name: str
    kind: str
    m: int
    n_features: int
    rbf: RbfStreamConfig | None = None
    csv_path: str | None = None
    expected_labels: tuple[str, ...] | None = None

    def stream(self, seed: int) -> Iterable:
        if self.kind == "rbf":
            return RbfStream(
                replace(self.rbf, seed=self.rbf.seed * 1_000_003 + seed)
            )
        return _load_csv(self.csv_path, self.expected_labels)

    @property
    def length(self) -> int:
        """Instance count one full pass of the stream yields."""
        if self.kind == "csv":
            return len(_load_csv(self.csv_path, self.expected_labels))
        return self.rbf.instance_count


@lru_cache(maxsize=8)
def _load_csv(path: str, expected_labels: tuple[str, ...] | None):
    return csv_ingest(path, expected_labels)


def rbf_dataset(
    name: str,
    m: int,
    n_features: int = 20,
    n_centroids: int = 50,
    spread: float = 6.0,
    offset_scale: float = 1.0,
    base_seed: int = 0,
) -> DatasetSpec:
    config = RbfStreamConfig(
        m=m, n_features=n_features, n_centroids=n_centroids,
        spread=spread, offset_scale=offset_scale, seed=base_seed,
    )
    return DatasetSpec(name=name, kind="rbf", m=m, n_features=n_features,
                       rbf=config)


def csv_dataset(
    path, name: str | None = None,
    expected_labels: Sequence[str] | None = None,
) -> DatasetSpec:
    labels = None if expected_labels is None else tuple(expected_labels)
    data = _load_csv(str(path), labels)
    return DatasetSpec(
        name=name or Path(path).stem, kind="csv", m=data.m,
        n_features=data.n_features, csv_path=str(path),
        expected_labels=labels,
    )


@dataclass(frozen=True)
class MethodSpec:
    """A named ensemble recipe: combiner, base learner, bagging rate."""

    name: str
    combiner: str = "majority"
    learner: str = "ht"
    bag_lambda: float = 1.0
    window_capacity: int = 100
    learner_params: tuple[tuple[str, object], ...] = ()

    def build(self, size: int, m: int, n_features: int) -> EnsembleModel:
        return make_ensemble(
            size, m, n_features, combiner=self.combiner,
            learner=self.learner, bag_lambda=self.bag_lambda,
            window_capacity=self.window_capacity,
            **dict(self.learner_params),
        )


@dataclass(frozen=True)
class GridConfig:
    """Shape of the experiment grid and the sizing targets."""

    sizes: tuple[int, ...] = (2, 4, 8, 16, 32, 64, 128)
    seeds: int = 10
    instance_limit: int = 100_000
    threshold: float = 0.9999
    max_n: int = DEFAULT_MAX_N
    accuracy_window: int = 1000
    tol: float = RANK_TOL
    workers: int = 1

    def __post_init__(self):
        if not self.sizes:
            raise ValidationError("the grid needs at least one size")
        if any(size < 1 for size in self.sizes):
            raise ValidationError(f"sizes must be >= 1, got {self.sizes}")
        if len(set(self.sizes)) != len(self.sizes):
            raise ValidationError(f"sizes repeat: {self.sizes}")
        if self.seeds < 1:
            raise ValidationError(f"seeds must be >= 1, got {self.seeds}")
        if self.instance_limit < 1:
            raise ValidationError(
                f"instance_limit must be >= 1, got {self.instance_limit}"
            )
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        SizingRequest(self.threshold, self.max_n)  # reuse the range checks

    @property
    def sizing(self) -> SizingRequest:
        return SizingRequest(self.threshold, self.max_n)


@dataclass(frozen=True)
class CellResult:
    """One (dataset, method, size, seed) prequential run."""

    dataset: str
    method: str
    m: int
    size: int
    seed: int
    instances: int
    accuracy: float
    full_rank_fraction: float
    p_profile: tuple[float, ...]


@dataclass(frozen=True)
class SizeRow:
    """Seed aggregate for one (dataset, method, size)."""

    dataset: str
    method: str
    m: int
    size: int
    seeds: int
    mean_accuracy: float
    accuracy_stddev: float
    p_profile: tuple[float, ...]
    pli: float


@dataclass(frozen=True)
class MethodSummary:
    """Sizing verdict for one (dataset, method) pair."""

    dataset: str
    method: str
    m: int
    profile: tuple[float, ...]
    sinc: int | None
    inc: int | None
    n_inc: int | None
    acc_pct_of_max: float | None
    correlation: float | None


@dataclass(frozen=True)
class GridResult:
    config: GridConfig
    cells: tuple[CellResult, ...]
    rows: tuple[SizeRow, ...]
    summaries: tuple[MethodSummary, ...]


def _stable_id(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def run_cell(
    dataset: DatasetSpec,
    method: MethodSpec,
    size: int,
    seed: int,
    config: GridConfig,
) -> CellResult:
    """Run one grid cell; pure in (arguments), independent of the rest."""
    stream = dataset.stream(seed)
    ensemble = method.build(size, dataset.m, dataset.n_features)
    rng = np.random.default_rng(
        [_stable_id(dataset.name), _stable_id(method.name), size, seed]
    )
    counters = RankCounters.zeros(dataset.m)
    full_rank = 0

    def sink(votes: np.ndarray) -> None:
        nonlocal full_rank
        full_rank += update_counters(counters, votes, config.tol)

    record = prequential_run(
        stream, ensemble, rng, limit=config.instance_limit,
        window=config.accuracy_window, vote_sink=sink,
    )
    return CellResult(
        dataset=dataset.name,
        method=method.name,
        m=dataset.m,
        size=size,
        seed=seed,
        instances=record.instances,
        accuracy=record.accuracy,
        full_rank_fraction=full_rank / record.instances,
        p_profile=finalize_p(counters).p,
    )


def _run_cell_packed(args) -> CellResult:
    return run_cell(*args)


def run_experiment_grid(
    datasets: Sequence[DatasetSpec],
    methods: Sequence[MethodSpec],
    config: GridConfig = GridConfig(),
) -> GridResult:
    """Run every (dataset, method, size, seed) cell and aggregate.

    ``config.workers > 1`` fans cells out to a process pool; the merge
    order is fixed by the cell key either way.
    """
    if not datasets:
        raise ValidationError("no datasets supplied")
    if not methods:
        raise ValidationError("no methods supplied")
    names = [d.name for d in datasets]
    if len(set(names)) != len(names):
        raise ValidationError(f"dataset names repeat: {names}")
    jobs = [
        (dataset, method, size, seed, config)
        for dataset in datasets
        for method in methods
        for size in config.sizes
        for seed in range(config.seeds)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            cells = list(pool.map(_run_cell_packed, jobs, chunksize=1))
    else:
        cells = [run_cell(*job) for job in jobs]
    cells.sort(key=lambda c: (c.dataset, c.method, c.size, c.seed))
    rows = _aggregate_rows(cells, config)
    summaries = _summarize(rows, config)
    return GridResult(config, tuple(cells), tuple(rows), tuple(summaries))


def _aggregate_rows(
    cells: Sequence[CellResult], config: GridConfig
) -> list[SizeRow]:
    groups: dict[tuple[str, str, int], list[CellResult]] = {}
    for cell in cells:
        groups.setdefault((cell.dataset, cell.method, cell.size),
                          []).append(cell)
    rows = []
    for (dataset, method, size), members in sorted(groups.items()):
        accuracies = np.array([c.accuracy for c in members])
        profile = np.mean([c.p_profile for c in members], axis=0)
        m = members[0].m
        rows.append(SizeRow(
            dataset=dataset,
            method=method,
            m=m,
            size=size,
            seeds=len(members),
            mean_accuracy=float(accuracies.mean()),
            accuracy_stddev=float(accuracies.std()),
            p_profile=tuple(float(x) for x in profile),
            pli=pli_exact(DependenceProfile(m, tuple(profile)), size),
        ))
    return rows


def _summarize(
    rows: Sequence[SizeRow], config: GridConfig
) -> list[MethodSummary]:
    groups: dict[tuple[str, str], list[SizeRow]] = {}
    for row in rows:
        groups.setdefault((row.dataset, row.method), []).append(row)
    summaries = []
    for (dataset, method), group in sorted(groups.items()):
        group = sorted(group, key=lambda r: r.size)
        m = group[0].m
        profile_matrix = np.array([row.p_profile for row in group])
        profile = DependenceProfile(
            m, tuple(float(x) for x in profile_matrix.mean(axis=0))
        )
        inc = solve_inc(profile, config.sizing)
        sinc = solve_sinc(m, profile.mean_p, config.sizing)
        sizes = [row.size for row in group]
        accuracy_by_size = {row.size: row.mean_accuracy for row in group}
        n_inc = None if inc is None else nearest_tested_size(inc, sizes)
        pct = None if n_inc is None else percent_of_max(accuracy_by_size,
                                                        n_inc)
        try:
            correlation = pearson_correlation(
                [row.pli for row in group],
                [row.mean_accuracy for row in group],
            )
        except (UndefinedCorrelationError, ValidationError):
            correlation = None
        summaries.append(MethodSummary(
            dataset=dataset,
            method=method,
            m=m,
            profile=profile.p,
            sinc=sinc,
            inc=inc,
            n_inc=n_inc,
            acc_pct_of_max=pct,
            correlation=correlation,
        ))
    return summaries


def _fmt(value) -> str:
    if value is None:
        return "--"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows: Iterable[Sequence],
               reproducible: bool) -> None:
    with path.open("w", newline="") as handle:
        if not reproducible:
            stamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
            handle.write(f"# generated {stamp}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])


def write_reports(
    result: GridResult, outdir, reproducible: bool = False
) -> dict[str, Path]:
    """Write the four report CSVs; returns name -> path.

    With ``reproducible`` the files carry no timestamp comment and are
    byte-identical across reruns of the same configuration.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "raw": outdir / "results_raw.csv",
        "summary": outdir / "results_summary.csv",
        "profiles": outdir / "p_profiles.csv",
        "curve": outdir / "pli_curve.csv",
    }
    _write_csv(
        paths["raw"], RAW_HEADER,
        (
            (c.dataset, c.method, c.m, c.size, c.seed, c.instances,
             c.accuracy, c.full_rank_fraction)
            for c in result.cells
        ),
        reproducible,
    )
    _write_csv(
        paths["summary"], SUMMARY_HEADER,
        (
            (s.dataset, s.method, s.m, s.sinc, s.inc, s.n_inc,
             s.acc_pct_of_max, s.correlation)
            for s in result.summaries
        ),
        reproducible,
    )
    _write_csv(
        paths["profiles"], PROFILE_HEADER,
        (
            (row.dataset, row.method, row.size, l + 1, p)
            for row in result.rows
            for l, p in enumerate(row.p_profile)
        ),
        reproducible,
    )
    _write_csv(
        paths["curve"], CURVE_HEADER,
        (
            (row.dataset, row.method, row.size, row.pli)
            for row in result.rows
        ),
        reproducible,
    )
    return paths
