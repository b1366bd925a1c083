"""votespan: ensemble sizing from the probability of linearly independent votes.

The library answers three questions about an ensemble that combines
normalized classifier score vectors:

- how likely are ``n`` votes to span all ``m`` class dimensions (``pli``),
- how many members does a target confidence require (``solve_inc`` /
  ``solve_sinc``),
- what are the per-dimension dependence probabilities of a real vote
  source (``estimation``), measured live on a data stream (``harness``).
"""

from .errors import (
    DegenerateVoteError,
    IngestionError,
    RepresentationalDeficiencyError,
    ResourceBudgetError,
    UndefinedCorrelationError,
    ValidationError,
    VotespanError,
)
from .pli import (
    DEFAULT_MAX_N,
    DependenceProfile,
    PliCurve,
    SizingRequest,
    enumeration_term_count,
    pli_curve,
    pli_enumeration_oracle,
    pli_exact,
    pli_monte_carlo,
    pli_uniform,
    solve_inc,
    solve_sinc,
)
from .algebra import (
    RANK_TOL,
    RowSpanTracker,
    combine_votes,
    exact_recovery_weights,
    ideal_vector,
    independent_row_indices,
    matrix_rank,
    normalize_vote,
)
from .estimation import (
    EstimationReport,
    RankCounters,
    dependence_process_votes,
    estimate_p,
    finalize_p,
    update_counters,
)
from .streams import (
    CsvDataset,
    RbfStream,
    RbfStreamConfig,
    StreamInstance,
    csv_ingest,
    read_vote_dump,
    write_vote_dump,
)
from .learners import HoeffdingTreeLearner, NaiveBayesLearner
from .ensemble import EnsembleModel, make_ensemble
from .harness import (
    DatasetSpec,
    GridConfig,
    GridResult,
    MethodSpec,
    csv_dataset,
    nearest_tested_size,
    pearson_correlation,
    percent_of_max,
    prequential_run,
    rbf_dataset,
    run_cell,
    run_experiment_grid,
    write_reports,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MAX_N",
    "CsvDataset",
    "DatasetSpec",
    "DegenerateVoteError",
    "DependenceProfile",
    "EnsembleModel",
    "EstimationReport",
    "GridConfig",
    "GridResult",
    "HoeffdingTreeLearner",
    "IngestionError",
    "MethodSpec",
    "NaiveBayesLearner",
    "PliCurve",
    "RANK_TOL",
    "RankCounters",
    "RbfStream",
    "RbfStreamConfig",
    "RepresentationalDeficiencyError",
    "ResourceBudgetError",
    "RowSpanTracker",
    "SizingRequest",
    "StreamInstance",
    "UndefinedCorrelationError",
    "ValidationError",
    "VotespanError",
    "__version__",
    "combine_votes",
    "csv_dataset",
    "csv_ingest",
    "dependence_process_votes",
    "enumeration_term_count",
    "estimate_p",
    "exact_recovery_weights",
    "finalize_p",
    "ideal_vector",
    "independent_row_indices",
    "make_ensemble",
    "matrix_rank",
    "nearest_tested_size",
    "normalize_vote",
    "pearson_correlation",
    "percent_of_max",
    "pli_curve",
    "pli_enumeration_oracle",
    "pli_exact",
    "pli_monte_carlo",
    "pli_uniform",
    "prequential_run",
    "read_vote_dump",
    "rbf_dataset",
    "run_cell",
    "run_experiment_grid",
    "solve_inc",
    "solve_sinc",
    "update_counters",
    "write_reports",
    "write_vote_dump",
]
