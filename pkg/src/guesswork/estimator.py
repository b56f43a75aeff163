"""scikit-learn style front end: fit a channel, get the optimal guessing measurement."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .model import QubitCqChannel, validate_channel
from .score import as_cost, build_optimal_measurement, guesswork_of_numbering_measurement
from .solver import solve
from .symmetry import symmetries_or_trivial


def check_bloch_array(X) -> np.ndarray:
    """2-D float array with three columns, one Bloch vector per row."""
    if isinstance(X, QubitCqChannel):
        return np.asarray(X.bloch)
    X = check_array(X, dtype=np.float64, ensure_min_samples=1)
    if X.shape[1] != 3:
        raise ValueError(f"expected Bloch vectors with 3 columns, got {X.shape[1]}")
    return X


def check_channel(X, labels=None) -> QubitCqChannel:
    if isinstance(X, QubitCqChannel):
        return X
    X = check_bloch_array(X)
    labels = list(range(len(X))) if labels is None else list(labels)
    return validate_channel(labels, X)


class GuessworkSolver(BaseEstimator):
    """Exact maximin guesswork of a qubit channel.

    ``fit`` takes the channel's Bloch vectors ``X`` of shape ``(M, 3)`` (and optional
    labels ``y``) and stores the optimal numbering, the guesswork ``value_`` and the
    two-outcome optimal measurement ``measurement_``.
    """

    def __init__(self, cost="identity", regime="auto", threads=1, time_budget=None):
        self.cost = cost
        self.regime = regime
        self.threads = threads
        self.time_budget = time_budget

    def fit(self, X, y=None):
        channel = check_channel(X, y)
        cost = as_cost(self.cost, channel.size)
        self.channel_ = channel
        self.symmetry_ = symmetries_or_trivial(channel)
        self.result_ = solve(channel, cost, threads=self.threads, regime=self.regime,
                             time_budget=self.time_budget, info=self.symmetry_)
        self.value_ = self.result_.value
        self.best_numbering_ = self.result_.best_numbering
        self.regime_ = self.result_.regime.value
        self.measurement_ = build_optimal_measurement(channel, cost, self.best_numbering_)
        self.n_states_ = channel.size
        return self

    def predict_proba(self, X) -> np.ndarray:
        """Probability of each measurement outcome for every state row of ``X``."""
        check_is_fitted(self, "measurement_")
        X = check_bloch_array(X)
        return self.measurement_.outcome_probabilities(X).T

    def predict(self, X) -> np.ndarray:
        """Query order (label indices) of the most likely outcome for each state."""
        proba = self.predict_proba(X)
        numberings = np.array(self.measurement_.numberings)
        return numberings[np.argmax(proba, axis=1)]

    def guesswork(self, X=None, prior=None) -> float:
        """Expected cost of the fitted measurement on channel ``X`` (default: the fitted one)."""
        check_is_fitted(self, "measurement_")
        channel = self.channel_ if X is None else check_channel(X)
        cost = as_cost(self.cost, channel.size)
        return guesswork_of_numbering_measurement(channel, prior, cost, self.measurement_).value

    def score(self, X=None, y=None) -> float:
        """Negative guesswork, so that larger is better."""
        return -self.guesswork(X)
