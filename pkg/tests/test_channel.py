# tests/test_channel.py
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icregions.config.families import FAMILY_CONFIGS, Family, parse_family
from icregions.core.channel import (
    AuxInputSpec,
    ChannelSpec,
    build_from_factors,
    compose,
    degenerate_spec,
)
from icregions.core.prob import EntropyOracle, random_distribution
from icregions.exceptions import (
    AlphabetMismatch,
    FamilyMismatch,
    ParseError,
    ValidationFailed,
    VariableSetMismatch,
)
from icregions.services.validators.factorization import (
    ensure_valid,
    validate_factorization,
)

TOL = 1e-9


# ============================================================================
# Channels
# ============================================================================


def test_noiseless_channel_copies_inputs():
    oracle = EntropyOracle(compose(degenerate_spec(Family.CRNG), ChannelSpec.noiseless(2)))
    assert oracle.H(["Y1"], ["X1"]) == pytest.approx(0.0, abs=TOL)
    assert oracle.H(["Y2"], ["X2"]) == pytest.approx(0.0, abs=TOL)
    assert oracle.I(["X1"], ["Y1"]) == pytest.approx(1.0, abs=TOL)


def test_binary_interference_without_crossover_is_noiseless():
    w = ChannelSpec.binary_interference(p_noise=0.0, p_cross=0.0).w
    np.testing.assert_allclose(w, ChannelSpec.noiseless(2).w)


def test_binary_interference_flip_probability():
    ch = ChannelSpec.binary_interference(p_noise=0.1, p_cross=0.2)
    w1 = ch.output_marginal(1)
    # other user silent: only the noise flips
    assert w1[0, 0, 1] == pytest.approx(0.1)
    # other user active: flip = 0.1 * 0.8 + 0.9 * 0.2
    assert w1[1, 1, 0] == pytest.approx(0.26)


def test_product_channel_has_no_interference(rng):
    w1 = rng.dirichlet(np.ones(3), size=2)
    w2 = rng.dirichlet(np.ones(2), size=2)
    spec = build_from_factors(Family.CMG, {}, rng)
    oracle = EntropyOracle(compose(spec, ChannelSpec.product(w1, w2)))
    assert oracle.I(["X2"], ["Y1"], ["X1"]) == pytest.approx(0.0, abs=TOL)
    assert oracle.I(["X1"], ["Y2"], ["X2"]) == pytest.approx(0.0, abs=TOL)


def test_random_channel_is_stochastic(rng):
    ch = ChannelSpec.random(2, 3, 2, 4, rng)
    assert ch.w.shape == (2, 3, 2, 4)
    np.testing.assert_allclose(ch.w.sum(axis=(2, 3)), 1.0)


def test_channel_rows_must_sum_to_one():
    with pytest.raises(ValidationFailed):
        ChannelSpec(np.full((2, 2, 2, 2), 0.3))
    with pytest.raises(ValidationFailed):
        ChannelSpec(np.ones((2, 2, 2)))


def test_channel_json(rng):
    ch = ChannelSpec.random(2, 2, 3, 2, rng)
    np.testing.assert_allclose(ChannelSpec.from_json(ch.to_json()).w, ch.w)
    with pytest.raises(ParseError):
        ChannelSpec.from_json({"x1": 2, "w": []})


def test_compose_rejects_mismatched_alphabets():
    spec = degenerate_spec(Family.CRNG, 3)
    with pytest.raises(AlphabetMismatch):
        compose(spec, ChannelSpec.noiseless(2))


# ============================================================================
# Input laws
# ============================================================================


@pytest.mark.parametrize("family", list(Family))
def test_degenerate_specs_satisfy_their_factorization(family):
    spec = degenerate_spec(family)
    assert list(spec.dist.names) == FAMILY_CONFIGS[family]["variables"]
    assert validate_factorization(spec).passed


@settings(max_examples=20)
@given(st.sampled_from(list(Family)), st.integers(min_value=0, max_value=2**32 - 1))
def test_sampled_specs_satisfy_their_factorization(family, seed):
    rng = np.random.default_rng(seed)
    sizes = {name: int(rng.integers(1, 3)) for name in FAMILY_CONFIGS[family]["variables"]}
    spec = build_from_factors(family, sizes, rng)
    report = validate_factorization(spec)
    assert report.passed, report.to_json()
    ensure_valid(spec)


def test_correlated_inputs_fail_validation(rng):
    names = FAMILY_CONFIGS[Family.CMG]["variables"]
    spec = AuxInputSpec(Family.CMG, random_distribution([(n, 2) for n in names], rng))
    report = validate_factorization(spec)
    assert not report.passed
    assert report.failures[0].startswith("I(U1,X1;U2,X2|U0)")
    with pytest.raises(ValidationFailed):
        ensure_valid(spec)


def test_hk_inputs_must_be_deterministic(rng):
    names = FAMILY_CONFIGS[Family.HK]["variables"]
    spec = AuxInputSpec(Family.HK, random_distribution([(n, 2) for n in names], rng))
    failures = validate_factorization(spec).failures
    assert any(label.startswith("H(X1|") for label in failures)


def test_spec_reorders_to_family_order(rng):
    names = list(reversed(FAMILY_CONFIGS[Family.CRNG]["variables"]))
    spec = AuxInputSpec(Family.CRNG, random_distribution([(n, 2) for n in names], rng))
    assert list(spec.dist.names) == FAMILY_CONFIGS[Family.CRNG]["variables"]


def test_spec_variable_set_must_match_family(rng):
    dist = random_distribution([("U0", 2), ("X1", 2), ("X2", 2)], rng)
    with pytest.raises(VariableSetMismatch):
        AuxInputSpec(Family.CMG, dist)


def test_family_aliases():
    assert parse_family("jxg") is Family.CMG
    assert parse_family("crng_full") is Family.CRNG_FULL
    with pytest.raises(FamilyMismatch):
        parse_family("MAC")


def test_spec_json_round_trip(rng):
    spec = build_from_factors(Family.CRNG, {"Z11": 3}, rng)
    loaded = AuxInputSpec.from_json(spec.to_json())
    assert loaded.family is Family.CRNG
    np.testing.assert_allclose(loaded.dist.probs, spec.dist.probs)
    with pytest.raises(ParseError):
        AuxInputSpec.from_json({"dist": {}})
