"""Empirical estimation of per-dimension dependence probabilities.

Given a stream of vote matrices (one n x m matrix per classified instance),
the estimator replays each matrix row by row, tracking the dimension of the
span so far. While the span has dimension ``l`` (``1 <= l <= m-1``), the
next row is an *attempt* at dimension ``l``: it either stays inside the
span (a dependent attempt) or grows it. ``p_hat_l`` is the dependent
fraction of attempts at ``l``, pooled across instances.

Counting conventions, fixed by the replay semantics:

- the first non-zero row spans one dimension and is not an attempt
  (normalized votes cannot be zero, so dimension 0 is never attempted);
- the attempt that grows the span to full rank ``m`` *is* counted at
  dimension ``m - 1`` before the instance stops contributing;
- rows after full rank are ignored (there is nothing left to escape);
- a dimension never attempted finalizes to ``p_hat = 1.0``, the
  conservative reading of "never observed to escape".

:func:`dependence_process_votes` synthesizes vote matrices whose true
profile is known by construction: a dependent vote is a convex combination
of the current basis rows (exactly in-span, still a valid sum-1 vote) and
an independent vote is a fresh point of the probability simplex (almost
surely outside any fixed proper subspace). It is the ground-truth
generator for consistency tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import RANK_TOL, RowSpanTracker
from .errors import ValidationError
from .pli import DependenceProfile


@dataclass
class RankCounters:
    """Pooled attempt/dependent counts per transient dimension.

    ``attempts[l-1]`` and ``dependent[l-1]`` tally attempts at dimension
    ``l`` for ``l = 1..m-1``.
    """

    m: int
    attempts: np.ndarray
    dependent: np.ndarray

    @classmethod
    def zeros(cls, m: int) -> "RankCounters":
        if m < 2:
            raise ValidationError(f"class count m must be >= 2, got {m}")
        return cls(
            m,
            np.zeros(m - 1, dtype=np.int64),
            np.zeros(m - 1, dtype=np.int64),
        )

    def __post_init__(self):
        if self.m < 2:
            raise ValidationError(f"class count m must be >= 2, got {self.m}")
        self.attempts = np.asarray(self.attempts, dtype=np.int64)
        self.dependent = np.asarray(self.dependent, dtype=np.int64)
        shape = (self.m - 1,)
        if self.attempts.shape != shape or self.dependent.shape != shape:
            raise ValidationError(
                f"counters for m={self.m} need shape {shape}, got "
                f"{self.attempts.shape} and {self.dependent.shape}"
            )
        if (self.dependent > self.attempts).any() or (self.attempts < 0).any():
            raise ValidationError(
                "dependent counts must lie in [0, attempts]"
            )

    def merge(self, other: "RankCounters") -> "RankCounters":
        """Pooled counters for two disjoint sets of instances."""
        if other.m != self.m:
            raise ValidationError(
                f"cannot merge counters for m={self.m} and m={other.m}"
            )
        return RankCounters(
            self.m,
            self.attempts + other.attempts,
            self.dependent + other.dependent,
        )


def update_counters(
    counters: RankCounters, matrix, tol: float = RANK_TOL
) -> bool:
    """Fold one instance's vote matrix into the counters.

    Returns True when the matrix reached full rank ``m``. Mutates
    ``counters`` in place.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[1] != counters.m:
        raise ValidationError(
            f"expected an n x {counters.m} vote matrix, got shape {a.shape}"
        )
    m = counters.m
    tracker = RowSpanTracker(m, tol)
    dim = 0
    for row in a:
        if dim == 0:
            if tracker.append(row):
                dim = 1
            continue
        counters.attempts[dim - 1] += 1
        if tracker.append(row):
            dim += 1
            if dim == m:
                return True
        else:
            counters.dependent[dim - 1] += 1
    return False


def finalize_p(counters: RankCounters) -> DependenceProfile:
    """Dependent fractions per dimension; never-attempted dims become 1.0."""
    p = np.ones(counters.m - 1)
    seen = counters.attempts > 0
    p[seen] = counters.dependent[seen] / counters.attempts[seen]
    return DependenceProfile(counters.m, tuple(float(x) for x in p))


@dataclass(frozen=True)
class EstimationReport:
    """Result of replaying a batch of vote matrices."""

    profile: DependenceProfile
    counters: RankCounters
    instances: int
    full_rank_instances: int

    @property
    def full_rank_fraction(self) -> float:
        """Empirical PLI: the fraction of instances that reached rank m."""
        return self.full_rank_instances / self.instances


def estimate_p(
    instance_votes: Iterable, tol: float = RANK_TOL,
    shuffle_seed: int | None = None,
) -> EstimationReport:
    """Estimate the dependence profile from per-instance vote matrices.

    All matrices must share the same class count. ``shuffle_seed`` permutes
    each matrix's rows before replay (member order is arbitrary, so a
    shuffled replay probes order sensitivity); None keeps file order.
    """
    rng = None if shuffle_seed is None else np.random.default_rng(shuffle_seed)
    counters: RankCounters | None = None
    instances = 0
    full_rank = 0
    for matrix in instance_votes:
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2:
            raise ValidationError(
                f"each instance needs a 2-D vote matrix, got shape {a.shape}"
            )
        if counters is None:
            counters = RankCounters.zeros(a.shape[1])
        if rng is not None:
            a = a[rng.permutation(a.shape[0])]
        full_rank += update_counters(counters, a, tol)
        instances += 1
    if counters is None:
        raise ValidationError("no vote matrices supplied")
    return EstimationReport(finalize_p(counters), counters, instances,
                            full_rank)


def dependence_process_votes(
    profile: DependenceProfile,
    n: int,
    instances: int,
    seed: int = 0,
) -> np.ndarray:
    """Synthesize ``(instances, n, m)`` vote matrices with known profile.

    Per instance, rows are drawn by the dimension chain itself: while the
    span has dimension ``l < m``, the next row is (with probability
    ``p_l``) a convex combination of the current basis rows, otherwise a
    fresh uniform simplex point. Fresh points are almost surely outside
    any fixed proper subspace, so the realized profile matches ``profile``
    exactly in distribution.
    """
    if n < 1:
        raise ValidationError(f"ensemble size n must be >= 1, got {n}")
    if instances < 1:
        raise ValidationError(f"instances must be >= 1, got {instances}")
    m = profile.m
    rng = np.random.default_rng(seed)
    votes = rng.dirichlet(np.ones(m), size=(instances, n))
    coins = rng.random(size=(instances, n))
    mixers = rng.standard_exponential(size=(instances, n, m))
    p = profile.p
    for i in range(instances):
        basis = np.empty((m, m))
        basis[0] = votes[i, 0]
        dim = 1
        for j in range(1, n):
            if dim == m:
                break  # absorbed; remaining fresh rows stay as drawn
            if coins[i, j] < p[dim - 1]:
                w = mixers[i, j, :dim]
                votes[i, j] = (w / w.sum()) @ basis[:dim]
            else:
                basis[dim] = votes[i, j]
                dim += 1
    return votes
