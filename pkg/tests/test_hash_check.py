# tests/test_hash_check.py
import pytest

from icregions.exceptions import SupportTooLarge, ValidationFailed
from icregions.services.codec import hash_check
from icregions.services.codec.hash_check import ensemble_size, enumerate_ensemble


def test_dense_ensemble_is_exactly_universal():
    profile = hash_check("dense", n=3, l=2, exact=True, seed=1)
    assert len(profile.pairs) == 7
    assert profile.pairs["collision"].tolist() == pytest.approx([0.25] * 7)
    assert profile.alpha_hat == pytest.approx(1.0)
    assert profile.beta_hat == 0.0
    assert not profile.pairs["above"].any()


def test_zero_output_length_collides_always():
    profile = hash_check("dense", n=3, l=0, exact=True, seed=1)
    assert profile.alpha_hat == pytest.approx(1.0)
    assert profile.pairs["collision"].tolist() == [1.0] * 7


def test_sparse_ensemble_favors_even_differences():
    # degree 2 with two rows: every column is (1, 1)
    assert ensemble_size("sparse", 3, 2, 2) == 1
    assert enumerate_ensemble("sparse", 3, 2).tolist() == [[[1, 1, 1], [1, 1, 1]]]
    profile = hash_check("sparse", n=3, l=2, exact=True, seed=1)
    assert profile.alpha_hat == pytest.approx(4.0)
    assert profile.beta_hat == pytest.approx(3.0)
    even = profile.pairs[profile.pairs["weight"] % 2 == 0]
    assert even["above"].all() and len(even) == 3


def test_independent_hashes_compose():
    profile = hash_check("dense", n=6, l=2, l_g=1, samples=20000, seed=7)
    composition = profile.composition
    assert composition["relative_error"] <= 0.02
    assert composition["holds"]
    assert profile.samples == 20000


def test_exact_composition_enumerates_every_pair():
    profile = hash_check("dense", n=3, l=2, l_g=1, exact=True, seed=1)
    composition = profile.composition
    assert composition["joint_members"] == 64 * 8
    assert composition["alpha_fg"] == pytest.approx(1.0)
    assert composition["holds"]


def test_exact_composition_cap():
    # each ensemble fits, their 2^24 pairs over 15 differences do not
    with pytest.raises(SupportTooLarge):
        hash_check("dense", n=4, l=3, l_g=3, exact=True)


def test_sampled_differences_are_capped_and_reproducible():
    a = hash_check("dense", n=16, l=2, samples=50, seed=3, max_differences=100)
    b = hash_check("dense", n=16, l=2, samples=50, seed=3, max_differences=100)
    assert len(a.pairs) == 100
    assert a.pairs.equals(b.pairs)
    assert a.seed == 3


def test_exact_census_cap():
    with pytest.raises(SupportTooLarge):
        hash_check("dense", n=13, l=2, exact=True)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mode": "banded"},
        {"q": 6},
        {"n": 0},
        {"samples": 0},
        {"l": -1},
    ],
)
def test_invalid_arguments(kwargs):
    with pytest.raises(ValidationFailed):
        hash_check(**{"n": 4, "l": 1, "samples": 10, **kwargs})


def test_profile_json():
    data = hash_check("dense", n=3, l=1, exact=True, seed=2).to_json()
    assert data["exact"] is True
    assert data["worst_ratio"] == pytest.approx(1.0)
    assert data["composition"] is None
