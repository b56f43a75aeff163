"""Monte Carlo guessing game and numerical game-theoretic checks.

The simulator stands in for running the optimal measurement on hardware: outcome
probabilities come from the Born rule and shots are drawn with numpy's PCG64.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .model import (
    AGGREGATE_TOL,
    Effect,
    GuessworkError,
    NumberingMeasurement,
    QubitCqChannel,
    uniform_prior,
    validate_prior,
)
from .score import as_cost, guesswork_of_numbering_measurement, label_costs
from .symmetry import SymmetryInfo


class NegativeProbability(GuessworkError):
    pass


class EffectSumMismatch(GuessworkError):
    pass


@dataclass(frozen=True, eq=False)
class SimReport:
    shots_per_state: int
    empirical_guesswork: float
    standard_error: float
    per_state_mean_cost: np.ndarray
    q_histogram: np.ndarray  # fraction of (prior-weighted) shots succeeding at query t
    exact_guesswork: float

    def to_dict(self) -> dict:
        return {
            "shots_per_state": self.shots_per_state,
            "empirical_guesswork": self.empirical_guesswork,
            "standard_error": self.standard_error,
            "exact_guesswork": self.exact_guesswork,
            "per_state_mean_cost": self.per_state_mean_cost.tolist(),
            "q_histogram": self.q_histogram.tolist(),
        }


def _born_table(channel: QubitCqChannel, measurement: NumberingMeasurement) -> np.ndarray:
    probs = measurement.outcome_probabilities(channel.bloch)
    if probs.min() < -AGGREGATE_TOL:
        k, m = np.unravel_index(np.argmin(probs), probs.shape)
        raise NegativeProbability(f"outcome {measurement.numberings[k]} has probability {probs[k, m]} on state {m}")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum(axis=0, keepdims=True)


def simulate_game(channel: QubitCqChannel, prior, cost, measurement: NumberingMeasurement,
                  shots_per_state: int = 4000, seed: int = 0) -> SimReport:
    """Play ``shots_per_state`` rounds per state and average the incurred costs."""
    if shots_per_state < 1:
        raise GuessworkError("shots_per_state must be positive")
    size = channel.size
    cost = as_cost(cost, size)
    p = uniform_prior(size) if prior is None else validate_prior(prior, size)
    probs = _born_table(channel, measurement)  # [k, m]
    costs = label_costs(cost, measurement)  # [k, m]
    positions = np.array([np.argsort(n) for n in measurement.numberings])  # [k, m] -> query index
    rng = np.random.Generator(np.random.PCG64(seed))

    means = np.empty(size)
    variances = np.empty(size)
    q = np.zeros(size)
    for m in range(size):
        counts = rng.multinomial(shots_per_state, probs[:, m])
        shot_costs = costs[:, m]
        mean = counts @ shot_costs / shots_per_state
        means[m] = mean
        variances[m] = counts @ (shot_costs - mean) ** 2 / max(shots_per_state - 1, 1)
        np.add.at(q, positions[:, m], p[m] * counts / shots_per_state)
    empirical = float(p @ means)
    stderr = float(np.sqrt(np.sum(p**2 * variances) / shots_per_state))
    exact = guesswork_of_numbering_measurement(channel, p, cost, measurement).value
    return SimReport(shots_per_state, empirical, stderr, means, q, exact)


def max_over_priors(channel: QubitCqChannel, cost, measurement: NumberingMeasurement) -> tuple[float, int]:
    """Worst-case prior for a fixed measurement.

    The guesswork is linear in the prior, so the maximum sits at a vertex of the
    simplex: a point mass on the worst-served label.
    """
    cost = as_cost(cost, channel.size)
    per_label = np.sum(measurement.outcome_probabilities(channel.bloch) * label_costs(cost, measurement), axis=0)
    worst = int(np.argmax(per_label))
    return float(per_label[worst]), worst


def _merge(pairs) -> NumberingMeasurement:
    acc = defaultdict(lambda: [0.0, np.zeros(3)])
    for n, c0, c in pairs:
        acc[n][0] += c0
        acc[n][1] = acc[n][1] + c
    return NumberingMeasurement.from_pairs(
        (n, Effect.from_vector(c0, c)) for n, (c0, c) in sorted(acc.items()))


def covariantize_measurement(channel: QubitCqChannel, info: SymmetryInfo,
                             measurement: NumberingMeasurement) -> NumberingMeasurement:
    """Group average: outcome ``g o n`` receives effect ``R_g pi(n) R_g^-1 / |G|``.

    Identical numberings produced by different group elements are merged by summing
    their effects, which leaves every guesswork value unchanged.
    """
    order = len(info.group)
    pairs = []
    for g in info.group:
        perm = g.perm
        for n, eff in measurement.outcomes:
            pairs.append((tuple(perm[i] for i in n), eff.c0 / order, g.realization @ eff.vector / order))
    total_c0 = sum(c0 for _, c0, _ in pairs)
    total_c = np.sum([c for _, _, c in pairs], axis=0)
    if abs(total_c0 - 1) > AGGREGATE_TOL or np.linalg.norm(total_c) > AGGREGATE_TOL:
        raise EffectSumMismatch(f"averaged effects sum to {total_c0} I + {total_c}.s")
    return _merge(pairs)


@dataclass(frozen=True, eq=False)
class BayesCheck:
    ordered: bool
    witness: tuple[int, ...] | None  # first outcome whose row increases somewhere
    reordered: NumberingMeasurement
    value: float
    reordered_value: float


def bayes_order_check(channel: QubitCqChannel, prior, cost, measurement: NumberingMeasurement,
                      tol: float = 1e-12) -> BayesCheck:
    """Check that each outcome's row ``p(n(t)) Tr[pi(n) sigma(n(t))]`` is nonincreasing in ``t``.

    If some row is not, every numbering is re-sorted by decreasing posterior and the
    measurement coarse-grained onto the re-sorted numberings; for a nondecreasing
    cost this never raises the guesswork.
    """
    cost = as_cost(cost, channel.size)
    if not cost.is_nondecreasing:
        raise GuessworkError("the Bayes ordering check needs a nondecreasing cost")
    ev = guesswork_of_numbering_measurement(channel, prior, cost, measurement)
    witness = None
    pairs = []
    for (n, eff), row in zip(measurement.outcomes, ev.joint):
        if witness is None and np.any(np.diff(row) > tol):
            witness = n
        g = np.argsort(-row, kind="stable")
        pairs.append((tuple(n[i] for i in g), eff.c0, eff.vector))
    reordered = _merge(pairs)
    new_value = guesswork_of_numbering_measurement(channel, prior, cost, reordered).value
    return BayesCheck(witness is None, witness, reordered, ev.value, new_value)
