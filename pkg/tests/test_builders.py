# tests/test_builders.py
import numpy as np
import pytest

from icregions.config.families import Family
from icregions.config.rates import VARIANT_FAMILIES
from icregions.core.channel import ChannelSpec, build_from_factors, degenerate_spec
from icregions.exceptions import (
    FamilyMismatch,
    InfeasibleSubstitution,
    MissingAssignment,
    ParseError,
    PointNotInRegion,
    QTooSmall,
    UnknownVariable,
    ValidationFailed,
)
from icregions.models.system import InequalitySystem, LinearInequality, RatePoint
from icregions.services.builders import build_crng, build_variant, evaluate
from icregions.services.builders.transforms import (
    embed_in_full,
    embed_point_in_full,
    jxg_to_crng_embed,
    lift_with_time_sharing,
    slice_named,
    slice_system,
    tilde_point_to_base,
)
from icregions.services.polytope import compare_regions, lp_feasible, membership

EXPECTED_SIZES = {
    "hk": 14,
    "hk-reduced": 12,
    "cmg": 8,
    "jxg-raw": 12,
    "jxg-reduced": 14,
    "crng-base": 37,
    "crng-full": 147,
    "crng-tilde": 16,
    "crng-eliminated0": 74,
}

EXPECTED_RATES = {
    "hk": ("R10", "R11", "R20", "R22"),
    "hk-reduced": ("R1", "R2"),
    "cmg": ("R1", "R2"),
    "jxg-raw": ("R00", "R10", "R11", "R20", "R22"),
    "jxg-reduced": ("R0", "R1", "R2"),
    "crng-base": ("R00", "R10", "R11", "R20", "R22"),
    "crng-tilde": ("R0", "R1", "R2"),
    "crng-eliminated0": ("R0", "R1", "R2"),
}


def _spec(variant, rng=None):
    family = VARIANT_FAMILIES[variant]
    if rng is None:
        return degenerate_spec(family, 2)
    return build_from_factors(family, {}, rng)


# ============================================================================
# Template counts and variables
# ============================================================================


@pytest.mark.parametrize("variant", sorted(EXPECTED_SIZES))
def test_inequality_counts(variant, rng):
    system = build_variant(variant, _spec(variant, rng), ChannelSpec.random(2, 2, 2, 2, rng))
    assert len(system) == EXPECTED_SIZES[variant]
    assert len(set(system.tags)) == len(system.tags)
    assert system.name == variant


@pytest.mark.parametrize("variant", sorted(EXPECTED_RATES))
def test_rate_variables(variant, noiseless):
    system = build_variant(variant, _spec(variant), noiseless)
    assert system.rate_vars == EXPECTED_RATES[variant]


def test_crng_base_binning_rates(trivial_crng, noiseless):
    system = build_crng(trivial_crng, noiseless, "base")
    assert system.aux_vars == ("r00", "r10", "r11", "r20", "r22")
    decoder_rows = [t for t in system.tags if t.startswith("crng-sum-rj")]
    assert len(decoder_rows) == 30


def test_closed_forms_have_no_binning_rates(trivial_crng, noiseless):
    for variant in ("tilde", "eliminated0"):
        assert build_crng(trivial_crng, noiseless, variant).aux_vars == ()


def test_family_mismatch(trivial_crng, noiseless):
    with pytest.raises(FamilyMismatch):
        build_variant("cmg", trivial_crng, noiseless)
    with pytest.raises(FamilyMismatch):
        build_variant("hk", degenerate_spec(Family.CMG), noiseless)


def test_unknown_variant(trivial_crng, noiseless):
    with pytest.raises(ValidationFailed):
        build_variant("crng-partial", trivial_crng, noiseless)
    with pytest.raises(ValidationFailed):
        build_crng(trivial_crng, noiseless, "partial")


# ============================================================================
# Noiseless channel
# ============================================================================


def test_tilde_contains_full_private_rates(trivial_crng, noiseless):
    tilde = build_crng(trivial_crng, noiseless, "tilde")
    assert tilde.contains({"R0": 0.0, "R1": 1.0, "R2": 1.0})
    assert not tilde.contains({"R0": 0.0, "R1": 1.1, "R2": 1.0})


def test_evaluate_reports_violated_tags(trivial_crng, noiseless):
    tilde = build_crng(trivial_crng, noiseless, "tilde")
    assert evaluate(tilde, {"R0": 0.0, "R1": 1.0, "R2": 1.0}) == []
    violated = evaluate(tilde, {"R0": 0.5, "R1": 1.0, "R2": 1.0})
    assert "crng-R0+Ri[i=1]" in violated
    assert "crng-R0+Ri[i=2]" in violated


def test_evaluate_needs_aux_free_system(trivial_crng, noiseless):
    base = build_crng(trivial_crng, noiseless, "base")
    with pytest.raises(ValidationFailed):
        evaluate(base, {"R00": 0, "R10": 0, "R11": 1, "R20": 0, "R22": 1})


def test_hk_split_slice(noiseless):
    system = build_variant("hk", degenerate_spec(Family.HK), noiseless, "00")
    assert system.rate_vars == ("R1", "R2")
    assert system.name == "hk^00"
    assert system.contains({"R1": 1.0, "R2": 1.0})
    assert not system.contains({"R1": 1.0, "R2": 1.2})


def test_cmg_noiseless_corner(noiseless):
    system = build_variant("cmg", degenerate_spec(Family.CMG), noiseless)
    assert system.contains({"R1": 1.0, "R2": 1.0})
    assert not system.contains({"R1": 1.5, "R2": 0.0})


# ============================================================================
# Slices
# ============================================================================


def test_named_slices_rename_survivors(trivial_crng, noiseless):
    base = build_crng(trivial_crng, noiseless, "base")
    sliced = slice_named(base, "crng-base", "0")
    assert sliced.rate_vars == ("R0", "R1", "R2")
    assert sliced.aux_vars == ("r00", "r10", "r11", "r20", "r22")
    assert sliced.name == "crng-base^0"
    assert slice_named(base, "crng-base", "none") is base


def test_slice_keeps_names_when_other_rates_survive():
    system = InequalitySystem(
        rate_vars=("R00", "R10", "R11"),
        inequalities=[LinearInequality({"R00": 1, "R10": 1, "R11": 1}, 2.0, tag="sum")],
    )
    sliced = slice_system(system, ["R00"])
    assert sliced.rate_vars == ("R10", "R11")


def test_slice_at_values_moves_constants():
    system = InequalitySystem(
        rate_vars=("R1", "R2"),
        inequalities=[LinearInequality({"R1": 1, "R2": 1}, 2.0, tag="sum")],
        nonneg=False,
    )
    sliced = slice_system(system, {"R1": 0.5})
    assert sliced.inequalities[0].bound == pytest.approx(1.5)


def test_slice_errors():
    system = InequalitySystem(
        rate_vars=("R1", "R2"),
        inequalities=[
            LinearInequality({"R1": 1}, 1.0, tag="cap"),
            LinearInequality({"R1": -1}, -0.5, tag="floor"),
        ],
    )
    with pytest.raises(InfeasibleSubstitution):
        slice_system(system, ["R1"])
    with pytest.raises(UnknownVariable):
        slice_system(system, ["R7"])
    with pytest.raises(ValidationFailed):
        slice_named(system, "cmg", "00")


# ============================================================================
# Embeddings and lift
# ============================================================================


def test_embed_in_full(trivial_crng, noiseless):
    full_spec = embed_in_full(trivial_crng)
    assert full_spec.family is Family.CRNG_FULL
    full = build_crng(full_spec, noiseless, "full")
    point = embed_point_in_full({"R00": 0, "R10": 0, "R11": 1, "R20": 0, "R22": 1})
    assert point["R01"] == 0.0
    assert lp_feasible(full, point)
    with pytest.raises(FamilyMismatch):
        embed_in_full(full_spec)


def test_jxg_embedding_relabels_inputs(noiseless):
    crng = jxg_to_crng_embed(degenerate_spec(Family.CMG))
    assert crng.family is Family.CRNG
    tilde = build_crng(crng, noiseless, "tilde")
    jxg = build_variant("jxg-reduced", degenerate_spec(Family.CMG), noiseless)
    point = {"R0": 0.0, "R1": 1.0, "R2": 1.0}
    assert membership(jxg, point) and membership(tilde, point)
    with pytest.raises(FamilyMismatch):
        jxg_to_crng_embed(crng)


def test_lift_rejects_short_time_sharing(trivial_crng, noiseless):
    with pytest.raises(QTooSmall):
        lift_with_time_sharing(trivial_crng, noiseless, {"R0": 0, "R1": 1, "R2": 1}, qbits=0)


def test_lift_rejects_points_outside(trivial_crng, noiseless):
    with pytest.raises(PointNotInRegion):
        lift_with_time_sharing(trivial_crng, noiseless, {"R0": 1, "R1": 1, "R2": 1}, qbits=1)
    with pytest.raises(MissingAssignment):
        lift_with_time_sharing(trivial_crng, noiseless, {"R0": 0, "R1": 1}, qbits=1)


def test_lifted_law_reaches_the_tilde_point(trivial_crng, noiseless):
    point = {"R0": 0.0, "R1": 1.0, "R2": 1.0}
    lifted = lift_with_time_sharing(trivial_crng, noiseless, point, qbits=1)
    assert lifted.family is Family.CRNG
    assert lifted.dist.size_of("Z00") == 2
    base = build_crng(lifted, noiseless, "base")
    assert lp_feasible(base, tilde_point_to_base(point))


def test_eliminated_form_matches_sliced_base_on_noiseless(trivial_crng, noiseless):
    base = build_variant("crng-base", trivial_crng, noiseless, "0")
    closed = build_variant("crng-eliminated0", trivial_crng, noiseless)
    report = compare_regions(base, closed, n_dirs=12, n_points=60, seed=7)
    assert report.max_support_gap < 1e-6
    assert report.a_only == 0 and report.b_only == 0


@pytest.mark.slow
def test_eliminated_form_matches_sliced_base_on_random_laws():
    rng = np.random.default_rng(11)
    for _ in range(3):
        spec = build_from_factors(Family.CRNG, {}, rng)
        channel = ChannelSpec.random(2, 2, 2, 2, rng)
        base = build_variant("crng-base", spec, channel, "0")
        closed = build_variant("crng-eliminated0", spec, channel)
        report = compare_regions(base, closed, n_dirs=16, n_points=100, seed=3)
        assert report.max_support_gap < 1e-6


# ============================================================================
# Systems
# ============================================================================


def test_system_json_round_trip(trivial_crng, noiseless):
    base = build_crng(trivial_crng, noiseless, "base")
    loaded = InequalitySystem.from_json(base.to_json())
    assert loaded.variables == base.variables
    assert loaded.tags == base.tags
    assert loaded.to_frame().equals(base.to_frame())
    with pytest.raises(ParseError):
        InequalitySystem.from_json({"vars": ["R1"]})


def test_rate_point_parsing():
    order = ("R0", "R1", "R2")
    assert RatePoint.parse("0, 1, 1", order).values == {"R0": 0.0, "R1": 1.0, "R2": 1.0}
    assert RatePoint.parse("R1=0.5,R2=1", order).values == {"R1": 0.5, "R2": 1.0}
    with pytest.raises(ParseError):
        RatePoint.parse("0,1", order)
    with pytest.raises(ParseError):
        RatePoint.parse("a,b,c", order)
    with pytest.raises(ValidationFailed):
        RatePoint.parse("0,-1,1", order)
