# tests/test_codec.py
import numpy as np
import pytest

from icregions.defs.assets.codec import budget_lengths, toy_instance
from icregions.exceptions import (
    CosetEmpty,
    EncoderError,
    FamilyMismatch,
    SupportTooLarge,
    ValidationFailed,
)
from icregions.config.families import Family
from icregions.core.channel import degenerate_spec
from icregions.services.codec import (
    BlockSpace,
    CodeInstance,
    HashConstraint,
    LinearHash,
    code_from_json,
    crng_distribution,
    crng_sample,
    decode,
    encode,
    exact_error,
    rate_conditions,
    simulate,
    source_decoding_error,
    transmit,
    within_budget,
)
from icregions.services.codec.hashing import sparse_degree, symbol_digits

LABELS = ["00", "10", "11", "20", "22"]


def _identity_code(spec, channel, n=2):
    """Private messages sent uncoded: g_ii is the identity, nothing is binned."""
    f, g, c = {}, {}, {}
    for s in LABELS:
        width = n if s in ("11", "22") else 0
        f[s] = LinearHash(np.zeros((0, width), dtype=np.int64))
        g[s] = LinearHash(np.eye(n, dtype=np.int64) if width else np.zeros((0, 0), dtype=np.int64))
        c[s] = np.zeros(0, dtype=np.int64)
    return CodeInstance(spec, channel, n, f, g, c)


def _toy_code(n=3, seed=5):
    spec, channel = toy_instance(0.1, 0.2)
    return CodeInstance.random(spec, channel, {"11": (1, 1), "22": (1, 1)}, n, seed=seed)


# ============================================================================
# Hashes and blocks
# ============================================================================


def test_symbol_digits_most_significant_first():
    np.testing.assert_array_equal(symbol_digits(np.array([[3, 1]]), 4, 2), [[1, 1, 0, 1]])


def test_sparse_degree():
    assert sparse_degree(8, 5) == 3
    assert sparse_degree(8, 2) == 2
    assert sparse_degree(8, 0) == 0


def test_sparse_hash_has_fixed_column_degree(rng):
    h = LinearHash.random(16, 6, mode="sparse", rng=rng)
    assert h.degree == 4
    np.testing.assert_array_equal(np.count_nonzero(h.matrix, axis=0), 4)
    with pytest.raises(ValidationFailed):
        LinearHash(np.array([[1, 0], [1, 0]]), mode="sparse", degree=1)


def test_hash_validation():
    with pytest.raises(ValidationFailed):
        LinearHash(np.eye(2, dtype=np.int64), q=4)
    with pytest.raises(ValidationFailed):
        LinearHash(np.array([[2, 0]]), q=2)
    h = LinearHash(np.array([[1, 1, 0], [0, 1, 1]]))
    np.testing.assert_array_equal(h.apply([1, 1, 1]), [0, 0])
    np.testing.assert_array_equal(LinearHash.from_json(h.to_json()).matrix, h.matrix)


def test_constrained_law_vanishes_off_the_coset():
    space = BlockSpace([2], 3)
    parity = HashConstraint(0, LinearHash(np.array([[1, 1, 1]])), (1,))
    law = crng_distribution(space, np.array([0.3, 0.7]), [parity])
    weights = space.blocks(np.arange(space.size)).sum(axis=1)
    assert law[weights % 2 == 0].sum() == 0.0
    assert law.sum() == pytest.approx(1.0)
    # single-one blocks share one base weight
    np.testing.assert_allclose(law[weights == 1], law[weights == 1][0])


def test_constrained_sampler_stays_in_the_coset(rng):
    space = BlockSpace([2], 3)
    parity = HashConstraint(0, LinearHash(np.array([[1, 1, 1]])), (1,))
    for _ in range(50):
        assert crng_sample(space, np.array([0.3, 0.7]), [parity], rng).sum() % 2 == 1


def test_sampler_frequencies_match_the_constrained_law(rng):
    space = BlockSpace([3], 3)
    table = np.array([0.5, 0.3, 0.2])
    constraint = HashConstraint(0, LinearHash(np.array([[1, 0, 1, 1, 0, 1]])), (0,))
    law = crng_distribution(space, table, [constraint])
    draws = 20000
    counts = np.zeros(space.size)
    for _ in range(draws):
        counts[space.index_of(crng_sample(space, table, [constraint], rng))[0]] += 1
    sigma = np.sqrt(law * (1 - law) / draws)
    assert np.all(np.abs(counts / draws - law) <= 4 * sigma + 1e-12)


def test_empty_coset():
    space = BlockSpace([2], 3)
    parity = HashConstraint(0, LinearHash(np.array([[1, 1, 1]])), (1,))
    with pytest.raises(CosetEmpty):
        crng_distribution(space, np.array([1.0, 0.0]), [parity])


def test_block_space_cap():
    with pytest.raises(SupportTooLarge):
        BlockSpace([4], 13, cap=2**24)
    space = BlockSpace([2, 3], 2)
    blocks = space.blocks(np.arange(space.size))
    np.testing.assert_array_equal(space.index_of(blocks), np.arange(space.size))
    np.testing.assert_array_equal(space.join(space.components(blocks)), blocks)


# ============================================================================
# Code instances
# ============================================================================


def test_rates_from_hash_lengths(trivial_crng, noiseless):
    code = CodeInstance.random(trivial_crng, noiseless, {"11": (2, 1)}, 4, seed=3)
    rates = code.rates()
    assert rates["r11"] == pytest.approx(0.5)
    assert rates["R11"] == pytest.approx(0.25)
    assert rates["R00"] == 0.0
    assert code.message_count == 2
    assert code.seed == 3


def test_code_draw_is_reproducible(trivial_crng, noiseless):
    params = {
        "n": 4,
        "input": trivial_crng.to_json(),
        "channel": noiseless.to_json(),
        "rates": {"11": {"l_f": 2, "l_g": 1}, "22": {"l_f": 1, "l_g": 1}},
    }
    a, b = code_from_json(params, seed=9), code_from_json(params, seed=9)
    np.testing.assert_array_equal(a.f["11"].matrix, b.f["11"].matrix)
    np.testing.assert_array_equal(a.c["22"], b.c["22"])
    loaded = CodeInstance.from_json(a.to_json())
    np.testing.assert_array_equal(loaded.g["22"].matrix, a.g["22"].matrix)


def test_code_needs_a_crng_law(noiseless):
    with pytest.raises(FamilyMismatch):
        CodeInstance.random(degenerate_spec(Family.CMG), noiseless, {}, 2)
    with pytest.raises(ValidationFailed):
        CodeInstance.random(degenerate_spec(Family.CRNG), noiseless, {"33": (1, 1)}, 2)


def test_identity_code_round_trip(trivial_crng, noiseless, rng):
    code = _identity_code(trivial_crng, noiseless)
    messages = {s: np.zeros(0, dtype=np.int64) for s in LABELS}
    messages.update({"11": np.array([1, 0]), "22": np.array([0, 1])})
    x1, x2 = encode(code, messages, rng)
    np.testing.assert_array_equal(x1, [1, 0])
    np.testing.assert_array_equal(x2, [0, 1])
    y1, y2 = transmit(code, x1, x2, rng)
    np.testing.assert_array_equal(decode(code, 1, y1, rng)["11"], [1, 0])
    np.testing.assert_array_equal(decode(code, 2, y2, rule="map")["22"], [0, 1])


def test_encoder_reports_the_empty_stage(trivial_crng, noiseless, rng):
    f, g, c = {}, {}, {}
    for s in LABELS:
        width = 1 if s in ("11", "22") else 0
        f[s] = LinearHash(np.ones((width, width), dtype=np.int64))
        g[s] = LinearHash(np.ones((width, width), dtype=np.int64))
        c[s] = np.zeros(width, dtype=np.int64)
    code = CodeInstance(trivial_crng, noiseless, 1, f, g, c)
    messages = {s: np.zeros(len(c[s]), dtype=np.int64) for s in LABELS}
    messages["11"] = np.array([1])
    with pytest.raises(EncoderError) as excinfo:
        encode(code, messages, rng)
    assert excinfo.value.stage == "S1"


def test_decode_arguments(trivial_crng, noiseless):
    code = _identity_code(trivial_crng, noiseless)
    with pytest.raises(ValidationFailed):
        decode(code, 3, np.zeros(2, dtype=np.int64), rule="map")
    with pytest.raises(ValidationFailed):
        decode(code, 1, np.zeros(3, dtype=np.int64), rule="map")
    with pytest.raises(ValidationFailed):
        decode(code, 1, np.zeros(2, dtype=np.int64))


# ============================================================================
# Error evaluation
# ============================================================================


@pytest.mark.parametrize("rule", ["stochastic", "map"])
def test_uncoded_noiseless_transmission_never_fails(trivial_crng, noiseless, rule):
    code = _identity_code(trivial_crng, noiseless)
    assert exact_error(code, rule) == pytest.approx(0.0, abs=1e-12)
    assert simulate(code, 200, seed=1, rule=rule).estimate == 0.0


def test_exact_error_cap(trivial_crng, noiseless):
    with pytest.raises(SupportTooLarge):
        exact_error(_identity_code(trivial_crng, noiseless), cap=10)


def test_stochastic_decoding_within_twice_map():
    code = _toy_code()
    for j in (1, 2):
        best = source_decoding_error(code, j, "map")
        sampled = source_decoding_error(code, j, "stochastic")
        assert best - 1e-12 <= sampled <= 2 * best + 1e-12


def test_simulation_is_reproducible_across_workers():
    code = _toy_code()
    serial = simulate(code, 300, seed=17)
    threaded = simulate(code, 300, seed=17, workers=4)
    assert serial.errors == threaded.errors
    assert serial.encoder_errors == threaded.encoder_errors
    assert serial.seed == threaded.seed == 17


def test_simulation_records_a_fresh_seed():
    result = simulate(_toy_code(), 5)
    assert result.seed is not None
    assert simulate(_toy_code(), 5, seed=result.seed).errors == result.errors


def test_simulation_needs_trials():
    with pytest.raises(ValidationFailed):
        simulate(_toy_code(), 0)


@pytest.mark.slow
def test_simulation_agrees_with_exact_error():
    code = _toy_code()
    exact = exact_error(code)
    result = simulate(code, 4000, seed=23, workers=2)
    assert abs(result.estimate - exact) <= 4 * result.std_error + 0.01


# ============================================================================
# Rate conditions
# ============================================================================


def _budget_codes(n, seed, message_rate=0.125):
    spec, channel = toy_instance(0.0, 0.02)
    lengths = budget_lengths(spec, channel, n, 0.2, 0.25, message_rate)
    return tuple(
        CodeInstance.random(spec, channel, lengths[setting], n, seed=seed)
        for setting in ("in_budget", "over_budget")
    )


def test_budget_lengths_on_the_toy_channel():
    spec, channel = toy_instance(0.0, 0.02)
    short = budget_lengths(spec, channel, 4, margin=0.2, over_budget=0.25, message_rate=0.125)
    assert short["in_budget"] == {"11": (2, 1), "22": (2, 1)}
    assert short["over_budget"] == {"11": (2, 3), "22": (2, 3)}
    long = budget_lengths(spec, channel, 8, margin=0.2, over_budget=0.25, message_rate=0.125)
    assert long["in_budget"] == {"11": (5, 1), "22": (5, 1)}
    assert long["over_budget"] == {"11": (5, 5), "22": (5, 5)}


def test_budget_lengths_reject_a_noisy_short_block():
    # equivocation near 0.36 bit leaves no room for the binning at n=4
    spec, channel = toy_instance(0.02, 0.1)
    with pytest.raises(ValidationFailed):
        budget_lengths(spec, channel, 4, margin=0.2, over_budget=0.25, message_rate=0.125)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_within_budget_follows_the_conditions(n):
    inside, outside = _budget_codes(n, seed=1)
    assert within_budget(inside)
    assert not within_budget(outside)
    assert outside.rates()["r11"] == inside.rates()["r11"]
    conditions = rate_conditions(outside)
    assert list(conditions.columns) == [
        "kind", "index", "subset", "lhs", "bound", "margin", "trivial", "holds"
    ]
    assert not conditions["holds"].all()
    assert conditions.loc[conditions["trivial"], "holds"].all()
    violated = conditions[~conditions["holds"]]
    assert set(violated["kind"]) == {"S"}


@pytest.mark.slow
def test_raising_the_message_rate_over_budget_raises_the_error():
    inside_errors, outside_errors = [], []
    for seed in range(5):
        inside, outside = _budget_codes(8, seed)
        inside_errors.append(simulate(inside, 300, seed=seed).estimate)
        outside_errors.append(simulate(outside, 300, seed=seed).estimate)
    assert np.median(inside_errors) < np.median(outside_errors)
    # at most 2^8 of the 2^10 (c, m) labels of each encoder have a block
    assert min(outside_errors) >= 0.5
