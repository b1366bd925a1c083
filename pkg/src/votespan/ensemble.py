"""Online ensembles over incremental learners.

Members are trained by Poisson online bagging: each arriving instance is
replayed ``k ~ Poisson(lambda)`` times to each member, the streaming
analogue of bootstrap resampling. Two vote combiners are provided:

- ``majority``: each member casts one vote for its argmax class;
- ``geometric``: members' score votes are mixed by a weight vector fitted
  over a sliding window, minimizing the squared distance between the
  weighted vote aggregate and the ideal one-hot vector of each windowed
  instance. The normal equations are solved with a small ridge term;
  when the window system is numerically singular the previous weights
  are kept and a warning is logged.

Both combiners expose the same surface: ``predict`` returns the full vote
matrix (one row per member, informative for rank analysis) along with the
predicted class, and ``train`` updates the members and, for the geometric
combiner, the window and weights.
"""

from __future__ import annotations

import logging
from collections import deque

import numpy as np

from .errors import ValidationError
from .learners import HoeffdingTreeLearner, NaiveBayesLearner

logger = logging.getLogger(__name__)

#: Ridge term added to the window normal equations.
RIDGE = 1e-8

#: Default sliding-window capacity for the geometric combiner.
WINDOW_CAPACITY = 100

COMBINERS = ("majority", "geometric")
LEARNERS = ("ht", "nb")


class EnsembleModel:
    """A fixed roster of incremental members behind one combiner."""

    def __init__(
        self,
        members,
        combiner: str = "majority",
        bag_lambda: float = 1.0,
        window_capacity: int = WINDOW_CAPACITY,
        ridge: float = RIDGE,
    ):
        members = list(members)
        if not members:
            raise ValidationError("an ensemble needs at least one member")
        if combiner not in COMBINERS:
            raise ValidationError(
                f"unknown combiner {combiner!r}; expected one of {COMBINERS}"
            )
        if bag_lambda < 0:
            raise ValidationError(
                f"bag_lambda must be >= 0, got {bag_lambda}"
            )
        if window_capacity < 1:
            raise ValidationError(
                f"window_capacity must be >= 1, got {window_capacity}"
            )
        first = members[0]
        for member in members:
            if member.m != first.m or member.n_features != first.n_features:
                raise ValidationError(
                    "all members must share class and feature counts"
                )
        self.members = members
        self.combiner = combiner
        self.bag_lambda = bag_lambda
        self.ridge = ridge
        self.m = first.m
        self.n_features = first.n_features
        self.weights = np.full(len(members), 1.0 / len(members))
        self.window: deque[tuple[np.ndarray, int]] = deque(
            maxlen=window_capacity
        )
        # running window normal equations: gram = sum_k S_k S_k^T and
        # moment = sum_k S_k o_k, maintained under append/evict so each
        # instance costs one rank-m update instead of a window rescan
        size = len(members)
        self._gram = np.zeros((size, size))
        self._moment = np.zeros(size)

    @property
    def size(self) -> int:
        return len(self.members)

    def vote_matrix(self, features) -> np.ndarray:
        """Fresh (size x m) matrix of member votes for one instance."""
        votes = np.empty((len(self.members), self.m))
        for i, member in enumerate(self.members):
            votes[i] = member.predict_scores(features)
        return votes

    def predict(self, features) -> tuple[np.ndarray, int]:
        """Member vote matrix and the combined class prediction."""
        votes = self.vote_matrix(features)
        if self.combiner == "majority":
            cast = np.bincount(np.argmax(votes, axis=1), minlength=self.m)
            predicted = int(np.argmax(cast))
        else:
            predicted = int(np.argmax(self.weights @ votes))
        return votes, predicted

    def train(
        self, features, label: int, rng: np.random.Generator,
        votes: np.ndarray | None = None,
    ) -> None:
        """Bag the instance into every member; refresh combiner state.

        ``votes`` lets prequential callers hand over the matrix they
        already computed at prediction time; the geometric window stores
        prediction-time votes, so recomputing after training would see a
        different (already updated) ensemble.
        """
        if self.combiner == "geometric":
            if votes is None:
                votes = self.vote_matrix(features)
            self._push_window(votes, label)
            self.update_weights()
        replays = rng.poisson(self.bag_lambda, size=len(self.members))
        for member, k in zip(self.members, replays):
            for _ in range(k):
                member.partial_fit(features, label)

    def _push_window(self, votes: np.ndarray, label: int) -> None:
        if votes.shape != (self.size, self.m):
            raise ValidationError(
                f"vote matrix shape {votes.shape} does not match "
                f"({self.size}, {self.m})"
            )
        if len(self.window) == self.window.maxlen:
            old_votes, old_label = self.window[0]
            self._gram -= old_votes @ old_votes.T
            self._moment -= old_votes[:, old_label]
        self.window.append((votes, label))
        self._gram += votes @ votes.T
        self._moment += votes[:, label]

    def update_weights(self) -> np.ndarray:
        """Refit geometric weights over the window's normal equations."""
        if not self.window:
            raise ValidationError("cannot fit weights over an empty window")
        a = self._gram.copy()
        a[np.diag_indices_from(a)] += self.ridge
        try:
            weights = np.linalg.solve(a, self._moment)
        except np.linalg.LinAlgError:
            weights = None
        if weights is None or not np.isfinite(weights).all():
            logger.warning(
                "window normal equations singular for size %d; "
                "keeping previous weights", self.size,
            )
            return self.weights
        self.weights = weights
        return weights


def make_ensemble(
    size: int,
    m: int,
    n_features: int,
    combiner: str = "majority",
    learner: str = "ht",
    bag_lambda: float = 1.0,
    window_capacity: int = WINDOW_CAPACITY,
    **learner_params,
) -> EnsembleModel:
    """Build an ensemble of identically configured fresh learners."""
    if size < 1:
        raise ValidationError(f"ensemble size must be >= 1, got {size}")
    if learner == "ht":
        prototype = HoeffdingTreeLearner(m, n_features, **learner_params)
    elif learner == "nb":
        prototype = NaiveBayesLearner(m, n_features, **learner_params)
    else:
        raise ValidationError(
            f"unknown learner {learner!r}; expected one of {LEARNERS}"
        )
    members = [prototype.clone() for _ in range(size)]
    return EnsembleModel(
        members, combiner=combiner, bag_lambda=bag_lambda,
        window_capacity=window_capacity,
    )
