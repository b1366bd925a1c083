"""Incremental base learners producing normalized per-class score votes.

Both learners share the same tiny protocol: ``partial_fit(features,
label)`` absorbs one labelled instance and ``predict_scores(features)``
returns a vote vector over the ``m`` classes that is non-negative and sums
to 1 (uniform before any training). Feature count and class count are
fixed at construction, which is what a stream harness knows up front.

``NaiveBayesLearner`` keeps per-class running moments and combines
Gaussian likelihoods under feature independence. ``HoeffdingTreeLearner``
grows a decision tree whose splits are gated by the Hoeffding bound:
a leaf splits only once the best candidate's information gain beats the
runner-up by more than the bound epsilon (or the bound has shrunk below
the tie threshold), so with high probability the split matches the one
infinite data would pick. Numeric features are summarized per class by
Gaussian estimators; candidate thresholds are evenly spaced over a
mu +/- 3 sigma range, and each feature contributes its best candidate,
competing against an always-present "no split" option of zero gain.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .errors import ValidationError

#: Variance floor for Gaussian likelihoods and threshold ranges.
VAR_FLOOR = 1e-9

_LOG_TWO_PI = math.log(2.0 * math.pi)


def _check_dims(m: int, n_features: int) -> None:
    if m < 2:
        raise ValidationError(f"class count m must be >= 2, got {m}")
    if n_features < 1:
        raise ValidationError(f"n_features must be >= 1, got {n_features}")


class NaiveBayesLearner:
    """Gaussian naive Bayes over running per-class feature moments."""

    def __init__(self, m: int, n_features: int):
        _check_dims(m, n_features)
        self.m = m
        self.n_features = n_features
        self.class_counts = np.zeros(m)
        self.feat_sums = np.zeros((m, n_features))
        self.feat_sumsq = np.zeros((m, n_features))
        self._uniform = np.full(m, 1.0 / m)

    def clone(self) -> "NaiveBayesLearner":
        return NaiveBayesLearner(self.m, self.n_features)

    def partial_fit(self, features, label: int) -> None:
        x = np.asarray(features, dtype=float)
        self.class_counts[label] += 1.0
        self.feat_sums[label] += x
        self.feat_sumsq[label] += x * x

    def predict_scores(self, features) -> np.ndarray:
        total = self.class_counts.sum()
        if total == 0.0:
            return self._uniform
        x = np.asarray(features, dtype=float)
        seen = self.class_counts > 0
        counts = self.class_counts[seen]
        mu = self.feat_sums[seen] / counts[:, None]
        var = self.feat_sumsq[seen] / counts[:, None] - mu * mu
        var = np.maximum(var, VAR_FLOOR)
        log_lik = (
            np.log(counts / total)
            - 0.5 * (np.log(var) + _LOG_TWO_PI).sum(axis=1)
            - 0.5 * ((x - mu) ** 2 / var).sum(axis=1)
        )
        log_lik -= log_lik.max()
        weights = np.exp(log_lik)
        scores = np.zeros(self.m)
        scores[seen] = weights / weights.sum()
        return scores


class _Node:
    """Tree node; a leaf until ``split_feature`` is set."""

    __slots__ = (
        "class_counts", "feat_sums", "feat_sumsq", "updates_since_eval",
        "dist", "split_feature", "threshold", "left", "right",
    )

    def __init__(self, m: int, n_features: int,
                 initial_counts: np.ndarray | None = None):
        if initial_counts is None:
            self.class_counts = np.zeros(m)
        else:
            self.class_counts = initial_counts
        self.feat_sums = np.zeros((m, n_features))
        self.feat_sumsq = np.zeros((m, n_features))
        self.updates_since_eval = 0
        self.dist = None
        self.split_feature = None
        self.threshold = 0.0
        self.left = None
        self.right = None


class HoeffdingTreeLearner:
    """Incremental decision tree gated by the Hoeffding bound.

    ``grace_period`` is the number of leaf updates between split attempts,
    ``delta`` the bound's confidence parameter, ``tie_threshold`` the
    epsilon below which near-ties split anyway, and ``n_thresholds`` the
    number of candidate cut points examined per feature.
    """

    def __init__(
        self,
        m: int,
        n_features: int,
        grace_period: int = 200,
        delta: float = 1e-7,
        tie_threshold: float = 0.05,
        n_thresholds: int = 10,
    ):
        _check_dims(m, n_features)
        if grace_period < 1:
            raise ValidationError(
                f"grace_period must be >= 1, got {grace_period}"
            )
        if not (0.0 < delta < 1.0):
            raise ValidationError(f"delta must lie in (0, 1), got {delta}")
        if n_thresholds < 1:
            raise ValidationError(
                f"n_thresholds must be >= 1, got {n_thresholds}"
            )
        self.m = m
        self.n_features = n_features
        self.grace_period = grace_period
        self.delta = delta
        self.tie_threshold = tie_threshold
        self.n_thresholds = n_thresholds
        self._range = math.log2(m)
        self._log_inv_delta = math.log(1.0 / delta)
        self._uniform = np.full(m, 1.0 / m)
        self._root = _Node(m, n_features)
        self.leaf_count = 1

    def clone(self) -> "HoeffdingTreeLearner":
        return HoeffdingTreeLearner(
            self.m, self.n_features, self.grace_period, self.delta,
            self.tie_threshold, self.n_thresholds,
        )

    def _sort(self, features) -> _Node:
        node = self._root
        while node.split_feature is not None:
            if features[node.split_feature] <= node.threshold:
                node = node.left
            else:
                node = node.right
        return node

    def partial_fit(self, features, label: int) -> None:
        x = np.asarray(features, dtype=float)
        leaf = self._sort(x)
        leaf.class_counts[label] += 1.0
        leaf.feat_sums[label] += x
        leaf.feat_sumsq[label] += x * x
        leaf.dist = None
        leaf.updates_since_eval += 1
        if leaf.updates_since_eval >= self.grace_period:
            leaf.updates_since_eval = 0
            self._try_split(leaf)

    def predict_scores(self, features) -> np.ndarray:
        leaf = self._sort(np.asarray(features, dtype=float))
        dist = leaf.dist
        if dist is None:
            total = leaf.class_counts.sum()
            if total > 0.0:
                dist = leaf.class_counts / total
            else:
                dist = self._uniform
            leaf.dist = dist
        return dist

    def _hoeffding_epsilon(self, weight: float) -> float:
        return math.sqrt(
            self._range * self._range * self._log_inv_delta / (2.0 * weight)
        )

    def _try_split(self, leaf: _Node) -> None:
        counts = leaf.class_counts
        total = counts.sum()
        present = counts > 0
        if present.sum() < 2:
            return
        gains, cuts = self._candidate_gains(leaf, counts, total, present)
        order = np.argsort(gains)
        best = int(order[-1])
        best_gain = float(gains[best])
        if best_gain <= 1e-10:
            return
        runner_up = float(gains[order[-2]]) if gains.size > 1 else 0.0
        runner_up = max(runner_up, 0.0)  # the "no split" candidate
        epsilon = self._hoeffding_epsilon(total)
        if best_gain - runner_up > epsilon or epsilon < self.tie_threshold:
            self._split(leaf, best, float(cuts[best]))

    def _candidate_gains(
        self, leaf: _Node, counts: np.ndarray, total: float,
        present: np.ndarray,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Best information gain and cut point for every feature."""
        c = counts[present]
        mu = leaf.feat_sums[present] / c[:, None]
        var = leaf.feat_sumsq[present] / c[:, None] - mu * mu
        sd = np.sqrt(np.maximum(var, VAR_FLOOR))
        lo = (mu - 3.0 * sd).min(axis=0)
        hi = (mu + 3.0 * sd).max(axis=0)
        steps = np.linspace(0.0, 1.0, self.n_thresholds + 2)[1:-1]
        cuts = lo[:, None] + (hi - lo)[:, None] * steps[None, :]
        z = (cuts[None, :, :] - mu[:, :, None]) / sd[:, :, None]
        left = c[:, None, None] * ndtr(z)
        right = c[:, None, None] - left
        n_left = left.sum(axis=0)
        n_right = total - n_left
        base = _entropy_bits(c, total)
        child_bits = (
            _weighted_entropy_bits(left, n_left)
            + _weighted_entropy_bits(right, n_right)
        ) / total
        gains = base - child_bits
        best = np.argmax(gains, axis=1)
        rows = np.arange(gains.shape[0])
        return gains[rows, best], cuts[rows, best]

    def _split(self, leaf: _Node, feature: int, threshold: float) -> None:
        counts = leaf.class_counts
        present = counts > 0
        c = counts[present]
        mu = leaf.feat_sums[present, feature] / c
        var = leaf.feat_sumsq[present, feature] / c - mu * mu
        sd = np.sqrt(np.maximum(var, VAR_FLOOR))
        left_share = ndtr((threshold - mu) / sd)
        left_counts = np.zeros(self.m)
        left_counts[present] = c * left_share
        right_counts = np.maximum(counts - left_counts, 0.0)
        leaf.left = _Node(self.m, self.n_features, left_counts)
        leaf.right = _Node(self.m, self.n_features, right_counts)
        leaf.split_feature = feature
        leaf.threshold = threshold
        leaf.class_counts = leaf.feat_sums = leaf.feat_sumsq = None
        leaf.dist = None
        self.leaf_count += 1


def _entropy_bits(counts: np.ndarray, total: float) -> float:
    p = counts / total
    return float(-(p * np.log2(p)).sum())


def _weighted_entropy_bits(counts: np.ndarray, totals: np.ndarray):
    """``totals * H(counts/totals)`` in bits, zero where ``totals`` is zero.

    Computed as ``totals*log2(totals) - sum_c counts*log2(counts)`` so no
    division is needed and empty children contribute nothing.
    """
    safe_counts = np.where(counts > 0, counts, 1.0)
    safe_totals = np.where(totals > 0, totals, 1.0)
    return totals * np.log2(safe_totals) \
        - (counts * np.log2(safe_counts)).sum(axis=0)
