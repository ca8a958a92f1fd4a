# tests/test_prob.py
import numpy as np
import pytest
from hypothesis import given, strategies as st

from icregions.core import prob
from icregions.core.prob import (
    EntropyOracle,
    EntropyQuery,
    JointDistribution,
    duplicate_variable,
    entropy,
    extend_constant,
    marginal,
    mutual_info,
    random_distribution,
)
from icregions.exceptions import (
    EmptySelection,
    OverlappingSets,
    ParseError,
    StateSpaceTooLarge,
    UnknownVariable,
    ValidationFailed,
)

TOL = 1e-9

seeds = st.integers(min_value=0, max_value=2**32 - 1)
shapes = st.lists(st.integers(min_value=1, max_value=4), min_size=3, max_size=4)


def _random(seed, sizes, zero_fraction=0.0):
    names = ["A", "B", "C", "D"][: len(sizes)]
    rng = np.random.default_rng(seed)
    return random_distribution(list(zip(names, sizes)), rng, zero_fraction=zero_fraction)


# ============================================================================
# Identities
# ============================================================================


@given(seeds, shapes)
def test_chain_rule(seed, sizes):
    dist = _random(seed, sizes, zero_fraction=0.2)
    H = lambda t, g=(): entropy(dist, EntropyQuery(t, g))
    assert H(["A", "B", "C"]) == pytest.approx(
        H(["A"]) + H(["B"], ["A"]) + H(["C"], ["A", "B"]), abs=TOL
    )


@given(seeds, shapes)
def test_mutual_information_identities(seed, sizes):
    dist = _random(seed, sizes)
    H = lambda t, g=(): entropy(dist, EntropyQuery(t, g))
    i_ab = mutual_info(dist, ["A"], ["B"])
    assert i_ab == pytest.approx(H(["A"]) - H(["A"], ["B"]), abs=TOL)
    assert i_ab == pytest.approx(mutual_info(dist, ["B"], ["A"]), abs=TOL)
    # I(A; B, C) = I(A; B) + I(A; C | B)
    assert mutual_info(dist, ["A"], ["B", "C"]) == pytest.approx(
        i_ab + mutual_info(dist, ["A"], ["C"], ["B"]), abs=TOL
    )
    assert i_ab >= 0.0


@given(seeds, shapes)
def test_oracle_matches_direct_evaluation(seed, sizes):
    dist = _random(seed, sizes)
    oracle = EntropyOracle(dist)
    assert oracle.H(["A", "C"], ["B"]) == pytest.approx(
        entropy(dist, EntropyQuery(["A", "C"], ["B"])), abs=TOL
    )
    assert oracle.I(["A"], ["C"], ["B"]) == pytest.approx(
        mutual_info(dist, ["A"], ["C"], ["B"]), abs=TOL
    )


def test_xor_of_uniform_bits_is_independent_of_each():
    probs = np.zeros((2, 2, 2))
    for x in range(2):
        for y in range(2):
            probs[x, y, x ^ y] = 0.25
    dist = JointDistribution((("X", 2), ("Y", 2), ("Z", 2)), probs)
    oracle = EntropyOracle(dist)
    assert oracle.I(["X"], ["Z"]) == pytest.approx(0.0, abs=TOL)
    assert oracle.I(["Y"], ["Z"]) == pytest.approx(0.0, abs=TOL)
    assert oracle.H(["Z"], ["X", "Y"]) == pytest.approx(0.0, abs=TOL)
    assert oracle.I(["X", "Y"], ["Z"]) == pytest.approx(1.0, abs=TOL)


@given(seeds)
def test_markov_chain_has_no_conditional_information(seed):
    rng = np.random.default_rng(seed)
    a = rng.dirichlet(np.ones(3))
    b_given_a = rng.dirichlet(np.ones(2), size=3)
    c_given_b = rng.dirichlet(np.ones(4), size=2)
    dist = JointDistribution.from_factors(
        [("A", 3), ("B", 2), ("C", 4)],
        [(["A"], a), (["A", "B"], b_given_a), (["B", "C"], c_given_b)],
    )
    assert mutual_info(dist, ["A"], ["C"], ["B"]) == pytest.approx(0.0, abs=TOL)
    # data processing
    assert mutual_info(dist, ["A"], ["C"]) <= mutual_info(dist, ["A"], ["B"]) + TOL


@given(seeds)
def test_independent_time_sharing_variable_adds_nothing(seed):
    rng = np.random.default_rng(seed)
    base = random_distribution([("X", 2), ("Y", 3)], rng)
    q = JointDistribution.uniform([("Q", 4)])
    dist = JointDistribution.product(q, base)
    assert mutual_info(dist, ["Q"], ["X", "Y"]) == pytest.approx(0.0, abs=TOL)
    assert mutual_info(dist, ["X"], ["Y"], ["Q"]) == pytest.approx(
        mutual_info(base, ["X"], ["Y"]), abs=TOL
    )


@pytest.mark.parametrize("excess, expected", [(1e-13, 0.0), (1e-6, -1e-6)])
def test_only_rounding_noise_is_clamped(monkeypatch, rng, excess, expected):
    dist = random_distribution([("A", 2), ("B", 2)], rng)
    joint = {
        frozenset(): 0.0,
        frozenset("A"): 1.0,
        frozenset("B"): 1.0,
        frozenset("AB"): 2.0 + excess,
    }
    monkeypatch.setattr(prob, "_joint_entropy", lambda _, names: joint[frozenset(names)])
    assert mutual_info(dist, ["A"], ["B"]) == pytest.approx(expected, abs=1e-15)
    assert EntropyOracle(dist).I(["A"], ["B"]) == pytest.approx(expected, abs=1e-15)


# ============================================================================
# Structure
# ============================================================================


def test_marginal_sums_out_dropped_axes(rng):
    dist = random_distribution([("A", 2), ("B", 3), ("C", 2)], rng)
    m = marginal(dist, ["A", "C"])
    assert m.names == ("A", "C")
    np.testing.assert_allclose(m.probs, dist.probs.sum(axis=1))


def test_reorder_and_rename_keep_the_law(rng):
    dist = random_distribution([("A", 2), ("B", 3)], rng)
    flipped = dist.reorder(["B", "A"])
    np.testing.assert_allclose(flipped.probs, dist.probs.T)
    renamed = dist.rename({"A": "U"})
    assert renamed.names == ("U", "B")


def test_duplicate_variable_is_a_copy(rng):
    dist = random_distribution([("X", 3), ("Y", 2)], rng)
    copied = duplicate_variable(dist, "X", "Z")
    assert copied.names == ("X", "Z", "Y")
    oracle = EntropyOracle(copied)
    assert oracle.H(["Z"], ["X"]) == pytest.approx(0.0, abs=TOL)
    assert oracle.H(["Z"]) == pytest.approx(oracle.H(["X"]), abs=TOL)


def test_extend_constant_adds_zero_entropy_variables(rng):
    dist = random_distribution([("X", 2)], rng)
    extended = extend_constant(dist, ["U", "V"], order=["U", "X", "V"])
    assert extended.names == ("U", "X", "V")
    assert extended.size_of("U") == 1
    assert EntropyOracle(extended).H(["U", "V"]) == 0.0


def test_json_round_trip(rng):
    dist = random_distribution([("A", 2), ("B", 3)], rng)
    loaded = JointDistribution.from_json(dist.to_json())
    assert loaded.vars == dist.vars
    np.testing.assert_allclose(loaded.probs, dist.probs)


# ============================================================================
# Errors
# ============================================================================


def test_unnormalized_probabilities_are_rejected():
    with pytest.raises(ValidationFailed):
        JointDistribution((("A", 2),), np.array([0.5, 0.6]))


def test_negative_probabilities_are_rejected():
    with pytest.raises(ValidationFailed):
        JointDistribution((("A", 2),), np.array([1.5, -0.5]))


def test_state_cap():
    with pytest.raises(StateSpaceTooLarge):
        JointDistribution((("A", 2**14), ("B", 2**13)), np.zeros(1))


def test_query_errors(rng):
    dist = random_distribution([("A", 2), ("B", 2)], rng)
    with pytest.raises(UnknownVariable):
        entropy(dist, EntropyQuery(["Q"]))
    with pytest.raises(OverlappingSets):
        entropy(dist, EntropyQuery(["A"], ["A"]))
    with pytest.raises(EmptySelection):
        entropy(dist, EntropyQuery([]))
    with pytest.raises(OverlappingSets):
        mutual_info(dist, ["A"], ["B"], ["B"])
    with pytest.raises(EmptySelection):
        marginal(dist, [])


def test_malformed_json():
    with pytest.raises(ParseError):
        JointDistribution.from_json({"vars": [{"name": "A"}], "probs": [1.0]})
