import math

import numpy as np
import pytest

from guesswork.model import CostFunction, Effect, NumberingMeasurement, blind_measurement, validate_channel
from guesswork.oracle import random_channel
from guesswork.score import build_optimal_measurement, guesswork_of_numbering_measurement
from guesswork.sim import (
    NegativeProbability,
    bayes_order_check,
    covariantize_measurement,
    max_over_priors,
    simulate_game,
)
from guesswork.solver import solve
from guesswork.symmetry import detect_symmetries

OCTA = 7 / 2 - math.sqrt(35) / 6


def optimal(ch):
    return build_optimal_measurement(ch, None, solve(ch).best_numbering)


def test_antipodal_pair_is_exact():
    ch = validate_channel("ab", [(0, 0, 1), (0, 0, -1)])
    rep = simulate_game(ch, None, None, optimal(ch), shots_per_state=500, seed=1)
    assert rep.empirical_guesswork == 1.0
    assert rep.standard_error == 0.0
    assert np.allclose(rep.q_histogram, [1, 0])


def test_icosahedron_within_three_se(hsic):
    ch = hsic["icosahedron"]
    rep = simulate_game(ch, None, None, optimal(ch), seed=3)
    assert rep.exact_guesswork == pytest.approx(solve(ch).value, abs=1e-12)
    assert abs(rep.empirical_guesswork - rep.exact_guesswork) <= 3 * rep.standard_error
    assert rep.q_histogram.sum() == pytest.approx(1.0)


def test_simulation_is_seeded(hsic):
    ch = hsic["cube"]
    m = optimal(ch)
    a = simulate_game(ch, None, None, m, 1000, seed=5)
    b = simulate_game(ch, None, None, m, 1000, seed=5)
    assert a.empirical_guesswork == b.empirical_guesswork
    assert simulate_game(ch, None, None, m, 1000, seed=6).empirical_guesswork != a.empirical_guesswork


def test_negative_probability_is_rejected():
    # bypass validation to build effects 0.5 I +- 0.9 z, which are not PSD
    ch = validate_channel("ab", [(0, 0, 1), (0, 0, -1)])
    good = blind_measurement(2)
    bad = NumberingMeasurement.__new__(NumberingMeasurement)
    object.__setattr__(bad, "outcomes", (((0, 1), Effect(0.5, (0, 0, 0.9))), ((1, 0), Effect(0.5, (0, 0, -0.9)))))
    with pytest.raises(NegativeProbability):
        simulate_game(ch, None, None, bad, 10)
    simulate_game(ch, None, None, good, 10)


def test_max_over_priors_examples(hsic):
    ch = hsic["octahedron"]
    # a fixed query order is beaten by a point mass on its last label
    assert max_over_priors(ch, None, blind_measurement(6)) == (6.0, 5)
    pair = validate_channel("ab", [(0, 0, 1), (0, 0, -1)])
    assert max_over_priors(pair, None, optimal(pair))[0] == pytest.approx(1.0)
    cov = covariantize_measurement(ch, detect_symmetries(ch), optimal(ch))
    worst, _ = max_over_priors(ch, None, cov)
    assert worst == pytest.approx(OCTA, abs=1e-9)


def test_covariantized_effects_sum_to_identity(hsic):
    ch = hsic["cube"]
    cov = covariantize_measurement(ch, detect_symmetries(ch), optimal(ch))
    assert sum(e.c0 for _, e in cov.outcomes) == pytest.approx(1.0)
    assert np.allclose(sum(np.asarray(e.c) for _, e in cov.outcomes), 0, atol=1e-12)
    assert guesswork_of_numbering_measurement(ch, None, None, cov).value == pytest.approx(solve(ch).value, abs=1e-12)


def test_trivial_group_leaves_measurement_unchanged():
    ch = random_channel(5, 11)
    info = detect_symmetries(ch)
    assert info.order == 1
    m = optimal(ch)
    cov = covariantize_measurement(ch, info, m)
    assert cov.numberings == m.numberings
    for (_, a), (_, b) in zip(cov.outcomes, m.outcomes):
        assert a.c0 == pytest.approx(b.c0) and np.allclose(a.c, b.c)


def test_bayes_optimal_is_ordered(hsic):
    for name in ["tetrahedron", "octahedron", "icosahedron"]:
        ch = hsic[name]
        check = bayes_order_check(ch, None, None, optimal(ch))
        assert check.ordered and check.witness is None


def test_bayes_reordering_improves_a_bad_pairing():
    ch = validate_channel("ab", [(0, 0, 1), (0, 0, -1)])
    # each outcome queries the less likely state first
    m = NumberingMeasurement.from_pairs([((1, 0), Effect(0.5, (0, 0, 0.5))), ((0, 1), Effect(0.5, (0, 0, -0.5)))])
    check = bayes_order_check(ch, None, None, m)
    assert not check.ordered
    assert check.value == pytest.approx(2.0)
    assert check.reordered_value == pytest.approx(1.0)
    assert check.reordered_value < check.value


def test_bayes_blind_is_unchanged(hsic):
    ch = hsic["cube"]
    check = bayes_order_check(ch, None, None, blind_measurement(8))
    assert check.reordered_value == pytest.approx(check.value, abs=1e-12)


def test_bayes_needs_nondecreasing_cost():
    ch = validate_channel("ab", [(0, 0, 1), (0, 0, -1)])
    with pytest.raises(ValueError):
        bayes_order_check(ch, None, CostFunction([2, 1]), blind_measurement(2))
