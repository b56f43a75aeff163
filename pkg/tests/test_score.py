import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from guesswork.model import CostFunction, blind_measurement, validate_channel
from guesswork.oracle import random_channel
from guesswork.score import (
    NotBalanced,
    build_optimal_measurement,
    e_norm,
    guesswork_of_numbering_measurement,
    guesswork_value,
    normalize_cost,
)
from guesswork.sim import bayes_order_check
from guesswork.solver import solve

TETRA = 5 / 2 - math.sqrt(15) / 6
OCTA = 7 / 2 - math.sqrt(35) / 6
CUBE = 9 / 2 - math.sqrt(7) / 2


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diag(r))


def test_normalize_cost_examples():
    nc = normalize_cost(CostFunction.identity(4), 4)
    assert nc.mean == 2.5 and nc.balanced
    assert np.array_equal(nc.weights, [1.5, 0.5, -0.5, -1.5])
    nc = normalize_cost(CostFunction([2, 2, 2]), 3)
    assert nc.mean == 2 and np.all(nc.weights == 0) and nc.balanced
    nc = normalize_cost(CostFunction([1, 2, 4]), 3)
    assert nc.mean == pytest.approx(7 / 3) and not nc.balanced
    assert np.allclose(CostFunction([1, 2, 4]).centered[nc.rearrangement], nc.weights)


def test_tetrahedron_e_norm_is_constant(hsic):
    ch = hsic["tetrahedron"]
    g0 = CostFunction.identity(4).centered
    # equal off-diagonal Gram -1/3: |v|^2 = sum g0^2 - (1/3)((sum g0)^2 - sum g0^2) = 20/3
    expected = math.sqrt(20 / 3) / 4
    assert expected == pytest.approx(math.sqrt(15) / 6, abs=1e-15)
    for n in itertools.permutations(range(4)):
        assert e_norm(ch, g0, n) == pytest.approx(expected, abs=1e-15)


def test_octahedron_axis_pairing(hsic):
    ch = hsic["octahedron"]  # order +x -x +y -y +z -z
    g0 = CostFunction.identity(6).centered
    n = (1, 3, 5, 4, 2, 0)
    assert e_norm(ch, g0, n) == pytest.approx(math.sqrt(35) / 6, abs=1e-15)


def test_identical_states_have_zero_norm(rng):
    ch = validate_channel("abcd", [(0.3, 0.1, -0.2)] * 4)
    g0 = CostFunction.identity(4).centered
    for n in itertools.permutations(range(4)):
        assert e_norm(ch, g0, n) == pytest.approx(0, abs=1e-15)


def test_guesswork_value_golden(hsic):
    assert guesswork_value(hsic["tetrahedron"], None, math.sqrt(15) / 6) == pytest.approx(TETRA, abs=1e-15)
    assert guesswork_value(hsic["cube"], None, math.sqrt(7) / 2) == pytest.approx(CUBE, abs=1e-15)
    ch = validate_channel("abc", [(0, 0, 1)] * 3)
    assert guesswork_value(ch, None, 0.0) == 2.0
    with pytest.raises(NotBalanced):
        guesswork_value(ch, [1, 2, 4], 0.0)


def test_perfectly_distinguishable_pair():
    ch = validate_channel("ab", [(0, 0, 1), (0, 0, -1)])
    m = build_optimal_measurement(ch, None, (0, 1))
    ev = guesswork_of_numbering_measurement(ch, None, None, m)
    assert ev.value == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(ev.marginal, [1, 0])
    # outcome (0, 1) projects onto +z, i.e. its Bloch direction is -v with v = r_1/2 - r_0/2
    assert np.allclose(m.outcomes[0][1].c, (0, 0, 0.5))


def test_blind_measurement_gives_mean(hsic):
    for ch in hsic.values():
        ev = guesswork_of_numbering_measurement(ch, None, None, blind_measurement(ch.size))
        assert ev.value == pytest.approx((ch.size + 1) / 2, abs=1e-12)


def test_zero_score_falls_back_to_blind():
    ch = validate_channel("abc", [(0.1, 0, 0)] * 3)
    m = build_optimal_measurement(ch, None, (0, 1, 2))
    assert len(m.outcomes) == 1
    assert guesswork_of_numbering_measurement(ch, None, None, m).value == pytest.approx(2.0)


@pytest.mark.parametrize("name, value", [("tetrahedron", TETRA), ("octahedron", OCTA), ("cube", CUBE)])
def test_optimal_measurement_attains_closed_form(hsic, name, value):
    ch = hsic[name]
    res = solve(ch)
    m = build_optimal_measurement(ch, None, res.best_numbering)
    assert len(m.outcomes) == 2
    got = guesswork_of_numbering_measurement(ch, None, None, m).value
    assert got == pytest.approx(res.value, abs=1e-12)
    assert got == pytest.approx(value, abs=1e-12)


def test_nonuniform_prior_evaluation():
    ch = validate_channel("ab", [(0, 0, 1), (0, 0, 0)])
    m = blind_measurement(2)
    # query a first: cost 1 with prob p(a), cost 2 otherwise
    assert guesswork_of_numbering_measurement(ch, [0.8, 0.2], None, m).value == pytest.approx(1.2)


channels = st.builds(lambda size, seed, surf: random_channel(size, seed, surf),
                     st.integers(2, 7), st.integers(0, 10_000), st.booleans())


@settings(max_examples=40, deadline=None)
@given(channels, st.integers(0, 2**32 - 1))
def test_rotation_invariance(ch, seed):
    rng = np.random.default_rng(seed)
    rot = random_rotation(rng)
    g0 = CostFunction.identity(ch.size).centered
    turned = ch.transformed(rot)
    for n in itertools.islice(itertools.permutations(range(ch.size)), 50):
        assert e_norm(turned, g0, n) == pytest.approx(e_norm(ch, g0, n), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(channels, st.sampled_from([0.0, 0.25, 0.5, 1.0]))
def test_shrink_linearity(ch, lam):
    base = solve(ch).value
    mean = (ch.size + 1) / 2
    shrunk = solve(ch.transformed(lam * np.eye(3))).value
    assert shrunk == pytest.approx(mean - lam * (mean - base), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(channels)
def test_triangle_bound(ch):
    g0 = CostFunction.identity(ch.size).centered
    cap = np.abs(g0).sum() / ch.size
    for n in itertools.islice(itertools.permutations(range(ch.size)), 100):
        assert e_norm(ch, g0, n) <= cap + 1e-12


@settings(max_examples=40, deadline=None)
@given(channels)
def test_measurement_consistency_and_bayes_rows(ch):
    res = solve(ch)
    m = build_optimal_measurement(ch, None, res.best_numbering)
    ev = guesswork_of_numbering_measurement(ch, None, None, m)
    assert ev.value == pytest.approx(res.value, abs=1e-12)
    assert bayes_order_check(ch, None, None, m).ordered
