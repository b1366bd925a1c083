"""Linear algebra over classifier vote matrices.

A vote matrix ``S`` has one row per ensemble member and one column per
class; every row is normalized to sum 1. Because the rows live on an affine
hyperplane that misses the origin, up to ``m`` of them can be linearly
independent, and whenever ``m`` independent rows exist there is a weight
vector ``W`` with ``S^T W`` equal to any chosen target, in particular the
ideal one-hot vector of the true class. :func:`exact_recovery_weights`
constructs that vector the same way the existence argument does: pick the
first ``m`` independent rows, solve the square system, give every other
row weight zero. The weights then sum to 1 automatically, since both the
target and each vote row sum to 1.

Rank questions are decided by Gaussian elimination with partial pivoting;
a pivot counts when its magnitude exceeds ``tol`` times the largest entry
of the original matrix. :class:`RowSpanTracker` applies the same rule one
row at a time for streaming callers.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateVoteError,
    RepresentationalDeficiencyError,
    ValidationError,
)

#: Relative pivot tolerance for all rank decisions.
RANK_TOL = 1e-9


def _as_matrix(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValidationError(
            f"expected a non-empty 2-D matrix, got shape {a.shape}"
        )
    if not np.isfinite(a).all():
        raise ValidationError("matrix entries must be finite")
    return a


def normalize_vote(raw) -> np.ndarray:
    """Scale a non-negative score vector to sum 1.

    Raises :class:`DegenerateVoteError` when every entry is zero and
    :class:`ValidationError` for negative or non-finite scores.
    """
    v = np.asarray(raw, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValidationError(
            f"a vote needs at least two class scores, got shape {v.shape}"
        )
    if not np.isfinite(v).all():
        raise ValidationError("vote scores must be finite")
    if (v < 0).any():
        raise ValidationError("vote scores must be non-negative")
    total = v.sum()
    if total == 0.0:
        raise DegenerateVoteError("cannot normalize an all-zero vote")
    return v / total


def ideal_vector(m: int, true_class: int) -> np.ndarray:
    """One-hot target vector for the true class."""
    if m < 2:
        raise ValidationError(f"class count m must be >= 2, got {m}")
    if not (0 <= true_class < m):
        raise ValidationError(
            f"true_class must lie in [0, {m}), got {true_class}"
        )
    out = np.zeros(m)
    out[true_class] = 1.0
    return out


def matrix_rank(matrix, tol: float = RANK_TOL) -> int:
    """Rank by Gaussian elimination with partial pivoting.

    A pivot is accepted when its magnitude exceeds ``tol * max|entry|`` of
    the original matrix, so the decision is scale-invariant.
    """
    a = _as_matrix(matrix).copy()
    threshold = tol * float(np.abs(a).max())
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        pivot = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[pivot, col]) <= threshold:
            continue
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        factors = a[rank + 1:, col] / a[rank, col]
        a[rank + 1:, col:] -= np.outer(factors, a[rank, col:])
        rank += 1
    return rank


class RowSpanTracker:
    """Incremental span-dimension tracking with the shared pivot rule.

    Rows are appended one at a time; each is reduced against the running
    unit-pivot basis and accepted when a residual entry survives the
    relative tolerance. The tolerance reference is the largest magnitude
    seen across all appended rows, mirroring the batch rank contract.
    """

    __slots__ = ("width", "tol", "rank", "_basis", "_pivots", "_max_abs")

    def __init__(self, width: int, tol: float = RANK_TOL):
        if width < 1:
            raise ValidationError(f"row width must be >= 1, got {width}")
        self.width = width
        self.tol = tol
        self.rank = 0
        self._basis: list[np.ndarray] = []
        self._pivots: list[int] = []
        self._max_abs = 0.0

    def append(self, row) -> bool:
        """Reduce ``row`` against the basis; True when the span grew."""
        v = np.array(row, dtype=float)
        if v.shape != (self.width,):
            raise ValidationError(
                f"expected a row of width {self.width}, got shape {v.shape}"
            )
        magnitude = float(np.abs(v).max())
        if magnitude > self._max_abs:
            self._max_abs = magnitude
        for basis_row, pivot in zip(self._basis, self._pivots):
            v -= v[pivot] * basis_row
        pivot = int(np.argmax(np.abs(v)))
        if abs(v[pivot]) <= self.tol * self._max_abs:
            return False
        v /= v[pivot]
        self._basis.append(v)
        self._pivots.append(pivot)
        self.rank += 1
        return True


def independent_row_indices(
    matrix, count: int | None = None, tol: float = RANK_TOL
) -> list[int]:
    """Indices of the greedily chosen first independent rows.

    Scans rows in order, keeping each row that grows the span, until
    ``count`` rows are found (default: as many as possible).
    """
    a = _as_matrix(matrix)
    tracker = RowSpanTracker(a.shape[1], tol)
    chosen: list[int] = []
    for i, row in enumerate(a):
        if tracker.append(row):
            chosen.append(i)
            if count is not None and len(chosen) == count:
                break
    return chosen


def exact_recovery_weights(
    matrix, true_class: int, tol: float = RANK_TOL
) -> np.ndarray:
    """Weights ``W`` with ``S^T W`` equal to the true class's one-hot vector.

    ``matrix`` is the n x m vote matrix ``S`` with sum-1 rows and must
    contain ``m`` linearly independent rows; otherwise
    :class:`RepresentationalDeficiencyError` is raised. Surplus rows get
    weight exactly zero. The returned weights sum to 1 (a consequence of
    the sum-1 rows, not an enforced constraint).
    """
    a = _as_matrix(matrix)
    n, m = a.shape
    if n < m:
        raise RepresentationalDeficiencyError(
            f"{n} votes cannot span {m} class dimensions"
        )
    chosen = independent_row_indices(a, count=m, tol=tol)
    if len(chosen) < m:
        raise RepresentationalDeficiencyError(
            f"vote matrix has rank {len(chosen)} < m={m}; "
            "no exact recovery weights exist"
        )
    square = a[chosen].T
    target = ideal_vector(m, true_class)
    try:
        w = np.linalg.solve(square, target)
        w += np.linalg.solve(square, target - square @ w)
    except np.linalg.LinAlgError as exc:
        raise RepresentationalDeficiencyError(
            f"selected vote rows are numerically singular: {exc}"
        ) from exc
    weights = np.zeros(n)
    weights[chosen] = w
    return weights


def combine_votes(matrix, weights) -> tuple[np.ndarray, int]:
    """Weighted vote aggregate and its argmax class (lowest index on ties)."""
    a = _as_matrix(matrix)
    w = np.asarray(weights, dtype=float)
    if w.shape != (a.shape[0],):
        raise ValidationError(
            f"need one weight per vote row: matrix has {a.shape[0]} rows, "
            f"got weight shape {w.shape}"
        )
    aggregate = w @ a
    return aggregate, int(np.argmax(aggregate))
