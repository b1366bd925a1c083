"""Probability of linear independence (PLI) for ensemble vote vectors.

Model
-----
An ensemble of ``n`` classifiers votes over ``m`` classes; each vote is a
score vector normalized to sum 1, so votes live on an affine hyperplane that
does not pass through the origin and up to ``m`` of them can be linearly
independent. Votes arrive one at a time. While the votes collected so far
span an ``l``-dimensional subspace (``1 <= l <= m-1``), the next vote falls
inside that subspace with probability ``p_l`` and grows the span otherwise.
The first vote always spans one dimension (a normalized vote cannot be the
zero vector), and once the span reaches dimension ``m`` it can grow no
further, so the span dimension is an absorbing Markov chain on states
``0..m``.

PLI is the probability that ``n`` votes reach full rank ``m``:

    P(n) = prod_{l=1}^{m-1} (1 - p_l)
           * sum over ways of distributing the n - m "wasted" dependent
             votes across the m-1 transient dimensions, each way weighted
             by prod p_l^(wasted at l).

``pli_exact`` evaluates this by stepping the absorbing chain directly, which
costs O(n * m). ``pli_enumeration_oracle`` evaluates the literal sum over
compositions; it is exponentially slower (C(n-1, m-1) terms) and exists as
an independent second route for testing. ``pli_uniform`` is the closed form
for a profile with one shared ``p``. ``pli_monte_carlo`` samples the chain.

``solve_inc`` inverts P(n) >= threshold for the smallest sufficient
ensemble size under a full per-dimension profile; ``solve_sinc`` does the
same under the simplifying uniform assumption. Either returns ``None`` when
no size up to the scan bound suffices, which is always the case when some
``p_l = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ResourceBudgetError, ValidationError

#: Default upper bound for ensemble-size scans.
DEFAULT_MAX_N = 4096

#: The enumeration oracle refuses to expand more composition terms than this.
ENUMERATION_TERM_BUDGET = 10_000_000


@dataclass(frozen=True)
class DependenceProfile:
    """Per-dimension linear-dependence probabilities for one vote source.

    ``p[l-1]`` is the probability that a new vote lies inside an existing
    ``l``-dimensional span, for ``l = 1..m-1``. There is no entry for
    ``l = 0``: a normalized vote cannot be the zero vector, so the first
    vote always escapes the trivial subspace.
    """

    m: int
    p: tuple[float, ...]

    def __post_init__(self):
        if self.m < 2:
            raise ValidationError(f"class count m must be >= 2, got {self.m}")
        if len(self.p) != self.m - 1:
            raise ValidationError(
                f"profile for m={self.m} needs {self.m - 1} entries, "
                f"got {len(self.p)}"
            )
        for l, value in enumerate(self.p, start=1):
            if not (0.0 <= value <= 1.0) or math.isnan(value):
                raise ValidationError(
                    f"p_{l} must lie in [0, 1], got {value!r}"
                )

    @classmethod
    def uniform(cls, m: int, p: float) -> "DependenceProfile":
        """Profile with the same dependence probability at every dimension."""
        if m < 2:
            raise ValidationError(f"class count m must be >= 2, got {m}")
        return cls(m, (float(p),) * (m - 1))

    @property
    def mean_p(self) -> float:
        """Scalar summary used by the uniform-assumption solver."""
        return sum(self.p) / len(self.p)


@dataclass(frozen=True)
class SizingRequest:
    """Target confidence and scan bound for ensemble-size solving."""

    threshold: float = 0.9999
    max_n: int = DEFAULT_MAX_N

    def __post_init__(self):
        if not (0.0 < self.threshold < 1.0):
            raise ValidationError(
                f"threshold must lie strictly inside (0, 1), "
                f"got {self.threshold!r}"
            )
        if self.max_n < 2:
            raise ValidationError(f"max_n must be >= 2, got {self.max_n}")


@dataclass(frozen=True)
class PliCurve:
    """PLI evaluated over a contiguous range of ensemble sizes."""

    profile: DependenceProfile
    n_start: int
    values: tuple[float, ...]

    def __post_init__(self):
        if self.n_start < 1:
            raise ValidationError(f"n_start must be >= 1, got {self.n_start}")

    @property
    def sizes(self) -> range:
        return range(self.n_start, self.n_start + len(self.values))


def _validate_n(n: int) -> int:
    if n < 1:
        raise ValidationError(f"ensemble size n must be >= 1, got {n}")
    return int(n)


def _dimension_chain(profile: DependenceProfile) -> Iterator[float]:
    """Yield P(n) for n = 0, 1, 2, ... by stepping the absorbing chain.

    State d holds the probability that the span of the votes so far has
    dimension exactly d. A vote keeps the dimension with probability p_d
    (p_0 := 0) and grows it otherwise; d = m absorbs.
    """
    m = profile.m
    stay = (0.0,) + profile.p
    q = [0.0] * (m + 1)
    q[0] = 1.0
    while True:
        yield q[m]
        nxt = [0.0] * (m + 1)
        for d in range(m):
            mass = q[d]
            if mass == 0.0:
                continue
            nxt[d] += mass * stay[d]
            nxt[d + 1] += mass * (1.0 - stay[d])
        nxt[m] += q[m]
        q = nxt


def pli_exact(profile: DependenceProfile, n: int) -> float:
    """Probability that ``n`` votes drawn under ``profile`` reach full rank.

    Exact up to float rounding; O(n * m) time. Returns 0.0 for ``n < m``.
    """
    _validate_n(n)
    chain = _dimension_chain(profile)
    value = 0.0
    for _ in range(n + 1):
        value = next(chain)
    return min(value, 1.0)


def pli_curve(
    profile: DependenceProfile, n_stop: int, n_start: int = 1
) -> PliCurve:
    """PLI for every size in ``n_start..n_stop`` (inclusive), one chain pass."""
    _validate_n(n_start)
    if n_stop < n_start:
        raise ValidationError(
            f"size range is empty: {n_start}..{n_stop}"
        )
    values = []
    for n, value in enumerate(_dimension_chain(profile)):
        if n > n_stop:
            break
        if n >= n_start:
            values.append(min(value, 1.0))
    return PliCurve(profile, n_start, tuple(values))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumeration_term_count(m: int, n: int) -> int:
    """Number of composition terms the literal sum expands: C(n-1, m-1)."""
    return math.comb(n - 1, m - 1)


def pli_enumeration_oracle(
    profile: DependenceProfile, n: int
) -> tuple[float, int]:
    """Evaluate PLI by literally summing over dependent-vote compositions.

    Returns ``(value, term_count)``. This is the independent slow route used
    to validate :func:`pli_exact`; it expands one product term per way of
    distributing the ``n - m`` dependent votes over the ``m - 1`` transient
    dimensions, ``C(n-1, m-1)`` terms in total.

    Pre: ``n >= m``. Raises :class:`ResourceBudgetError` when the term count
    exceeds :data:`ENUMERATION_TERM_BUDGET`.
    """
    _validate_n(n)
    m = profile.m
    if n < m:
        raise ValidationError(
            f"enumeration needs n >= m, got n={n} < m={m}"
        )
    budget = enumeration_term_count(m, n)
    if budget > ENUMERATION_TERM_BUDGET:
        raise ResourceBudgetError(
            f"enumeration would expand C(n-1, m-1) = C({n - 1}, {m - 1}) = "
            f"{budget} terms, over the {ENUMERATION_TERM_BUDGET} budget"
        )
    prefactor = 1.0
    for pl in profile.p:
        prefactor *= 1.0 - pl
    total = 0.0
    count = 0
    for k in range(n - m + 1):
        for exponents in _compositions(k, m - 1):
            term = 1.0
            for pl, x in zip(profile.p, exponents):
                if x:
                    term *= pl ** x
            total += term
            count += 1
    return prefactor * total, count


def pli_uniform(m: int, p: float, n: int) -> float:
    """Closed-form PLI when every dimension shares the same ``p``.

    Evaluates ``(1-p)^(m-1) * sum_{k=0}^{n-m} C(k+m-2, m-2) p^k`` with
    incrementally updated coefficients; ``m = 2`` reduces to the exact
    analytic ``1 - p^(n-1)``.
    """
    profile = DependenceProfile.uniform(m, p)  # reuse the range checks
    _validate_n(n)
    p = profile.p[0]
    if n < m:
        return 0.0
    if p == 1.0:
        return 0.0
    if m == 2:
        return 1.0 - p ** (n - 1)
    coef = 1.0
    pk = 1.0
    total = 1.0
    for k in range(1, n - m + 1):
        coef *= (k + m - 2) / k
        pk *= p
        total += coef * pk
    return min(total * (1.0 - p) ** (m - 1), 1.0)


def pli_monte_carlo(
    profile: DependenceProfile, n: int, trials: int, seed: int = 0
) -> tuple[float, float]:
    """Estimate PLI by sampling the dimension chain; returns (est, stderr).

    The chain dwells at each transient dimension ``l >= 1`` for an
    independent Geometric(1 - p_l) number of votes, so full rank within
    ``n`` votes is equivalent to ``1 + sum_l Geom(1 - p_l) <= n``. Any
    ``p_l = 1`` makes full rank impossible and short-circuits to exactly
    (0.0, 0.0). Deterministic for a given seed.
    """
    _validate_n(n)
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    if any(pl == 1.0 for pl in profile.p):
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    votes_needed = np.ones(trials, dtype=np.int64)
    for pl in profile.p:
        votes_needed += rng.geometric(1.0 - pl, size=trials)
    est = float(np.count_nonzero(votes_needed <= n)) / trials
    stderr = math.sqrt(est * (1.0 - est) / trials)
    return est, stderr


def solve_inc(
    profile: DependenceProfile, request: SizingRequest = SizingRequest()
) -> int | None:
    """Smallest n with ``pli_exact(profile, n) >= threshold``, else None.

    Scans n = m..max_n with a single incremental chain pass. Any
    ``p_l = 1`` makes the threshold unreachable at every n, so the scan is
    skipped and None is returned directly.
    """
    if any(pl == 1.0 for pl in profile.p):
        return None
    for n, value in enumerate(_dimension_chain(profile)):
        if value >= request.threshold:
            return n
        if n >= request.max_n:
            return None


def solve_sinc(
    m: int, p: float, request: SizingRequest = SizingRequest()
) -> int | None:
    """Smallest sufficient n under the uniform assumption, else None.

    Same contract as :func:`solve_inc` with a uniform profile; kept as a
    separate entry point because callers summarize measured profiles down
    to one scalar before asking for the simplified size.
    """
    profile = DependenceProfile.uniform(m, p)
    return solve_inc(profile, request)
