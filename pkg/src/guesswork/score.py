"""Objective of the numbering search and guesswork evaluation.

For a uniform prior and a centered cost ``g0`` the guessing problem reduces to
maximizing ``|v(n)|`` where ``v(n) = sum_t g0(t) r_{n(t)}``.  The optimal guesswork
is ``mean(gamma) - max_n |v(n)| / M``, attained by a two-outcome measurement
projecting along ``-+ v(n*)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    AGGREGATE_TOL,
    AlphabetMismatch,
    CostFunction,
    Effect,
    GuessworkError,
    NumberingMeasurement,
    QubitCqChannel,
    blind_measurement,
    inverse_numbering,
    uniform_prior,
    validate_numbering,
    validate_prior,
)

# Relative tolerance (to sum |g0|) under which two leaf norms count as tied.
TIE_RTOL = 1e-11


class NotBalanced(GuessworkError):
    pass


def as_cost(cost, size: int) -> CostFunction:
    if cost is None or (isinstance(cost, str) and cost == "identity"):
        return CostFunction.identity(size)
    if not isinstance(cost, CostFunction):
        cost = CostFunction(cost)
    if len(cost) != size:
        raise GuessworkError(f"cost has {len(cost)} entries but the channel has {size} states")
    return cost


@dataclass(frozen=True)
class NormalizedCost:
    mean: float
    weights: np.ndarray  # centered cost, nonincreasing
    rearrangement: np.ndarray  # weights[k] == centered[rearrangement[k]]
    balanced: bool


def normalize_cost(cost: CostFunction, size: int) -> NormalizedCost:
    cost = as_cost(cost, size)
    order = cost.rearrangement
    return NormalizedCost(cost.mean, cost.centered[order], order, cost.is_balanced)


def weighted_sum(channel: QubitCqChannel, centered: Sequence[float], numbering: Sequence[int]) -> np.ndarray:
    """``sum_t centered[t] * r_{n(t)}``; not norm-bounded."""
    return np.asarray(centered, float) @ channel.bloch[np.asarray(numbering)]


def e_norm(channel: QubitCqChannel, centered: Sequence[float], numbering: Sequence[int]) -> float:
    """Operator norm of the E-operator of a numbering, ``|v(n)| / M`` for qubits."""
    return float(np.linalg.norm(weighted_sum(channel, centered, numbering))) / channel.size


def tie_tolerance(centered: Sequence[float]) -> float:
    return TIE_RTOL * (1.0 + float(np.sum(np.abs(centered))))


def guesswork_value(channel: QubitCqChannel, cost, best_norm: float) -> float:
    """Optimal uniform-prior guesswork ``mean - best_norm`` given the maximal e_norm."""
    cost = as_cost(cost, channel.size)
    if not cost.is_balanced:
        raise NotBalanced(f"cost {cost.values.tolist()} is not balanced")
    return cost.mean - best_norm


@dataclass(frozen=True, eq=False)
class GuessworkEvaluation:
    value: float
    joint: np.ndarray  # joint[k, t]: outcome k observed and query t correct
    marginal: np.ndarray  # q(t)


def guesswork_of_numbering_measurement(
    channel: QubitCqChannel, prior, cost, measurement: NumberingMeasurement
) -> GuessworkEvaluation:
    """Expected cost ``sum_{t,n} p(n(t)) Tr[pi(n) sigma(n(t))] gamma(t)``."""
    size = channel.size
    if measurement.size != size:
        raise AlphabetMismatch(f"measurement is over {measurement.size} labels, channel has {size}")
    cost = as_cost(cost, size)
    p = uniform_prior(size) if prior is None else validate_prior(prior, size)
    numberings = np.array(measurement.numberings)
    probs = measurement.outcome_probabilities(channel.bloch)  # [k, m]
    rows = np.arange(len(numberings))[:, None]
    joint = p[numberings] * probs[rows, numberings]
    return GuessworkEvaluation(float(np.sum(joint @ cost.values)), joint, joint.sum(axis=0))


def reversed_numbering(numbering: Sequence[int]) -> tuple[int, ...]:
    return tuple(numbering[::-1])


def build_optimal_measurement(channel: QubitCqChannel, cost, numbering: Sequence[int]) -> NumberingMeasurement:
    """Two-outcome measurement attaining ``mean - |v(n*)|/M`` for an optimal numbering.

    Falls back to the blind single-outcome measurement when ``v(n*)`` vanishes.
    """
    cost = as_cost(cost, channel.size)
    if not cost.is_balanced:
        raise NotBalanced(f"cost {cost.values.tolist()} is not balanced")
    n = validate_numbering(numbering, channel.size)
    v = weighted_sum(channel, cost.centered, n)
    norm = float(np.linalg.norm(v))
    if norm <= AGGREGATE_TOL:
        return blind_measurement(channel.size)
    u = v / norm
    return NumberingMeasurement.from_pairs([
        (n, Effect.from_vector(0.5, -0.5 * u)),
        (reversed_numbering(n), Effect.from_vector(0.5, 0.5 * u)),
    ])


def label_costs(cost, measurement: NumberingMeasurement) -> np.ndarray:
    """``C[k, m] = gamma(position of label m in numbering k)``."""
    vals = np.asarray(cost.values)
    return np.array([vals[inverse_numbering(n)] for n in measurement.numberings])
