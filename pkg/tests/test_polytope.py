# tests/test_polytope.py
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icregions.exceptions import (
    BlowupCapExceeded,
    RegionInfeasible,
    UnboundedSystem,
    UnknownVariable,
    VariableSetMismatch,
)
from icregions.models.system import GEQ, InequalitySystem, LinearInequality
from icregions.services.builders import build_crng
from icregions.services.builders.lemma import (
    ELIMINATED,
    PARAMETERS,
    lemma_fme_closed_form,
    lemma_fme_system,
)
from icregions.services.polytope import (
    bounding_box,
    compare_regions,
    eliminate_aux,
    fm_eliminate,
    lp_feasible,
    membership,
    prune_redundant,
    support,
    support_point,
    sweep_boundary,
)

DIRECTIONS = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 1.0)]


def _system(rows, rate_vars=("R1", "R2"), aux_vars=(), nonneg=True, name="test"):
    inequalities = [
        LinearInequality(coeffs, bound, sense, tag)
        for tag, (coeffs, bound, sense) in rows.items()
    ]
    return InequalitySystem(rate_vars, aux_vars, inequalities, nonneg, name)


def _pentagon(name="pentagon"):
    return _system(
        {
            "R1": ({"R1": 1}, 1.0, "<="),
            "R2": ({"R2": 1}, 1.0, "<="),
            "sum": ({"R1": 1, "R2": 1}, 1.5, "<="),
        },
        name=name,
    )


# ============================================================================
# LP
# ============================================================================


def test_lp_feasibility_over_binning_rate():
    system = _system(
        {
            "load": ({"R1": 1, "r": 1}, 1.0, "<="),
            "floor": ({"r": 1}, 0.5, GEQ),
        },
        rate_vars=("R1",),
        aux_vars=("r",),
    )
    assert lp_feasible(system, {"R1": 0.4})
    assert lp_feasible(system, {"R1": 0.5})
    assert not lp_feasible(system, {"R1": 0.6})
    assert not lp_feasible(system, {"R1": -0.1})


def test_lp_feasibility_ignores_row_scaling():
    def scaled(k):
        return _system(
            {
                "load": ({"R1": k, "r": k}, k, "<="),
                "floor": ({"r": 1}, 0.5, GEQ),
            },
            rate_vars=("R1",),
            aux_vars=("r",),
        )

    for point, expected in ((0.5 + 1e-11, True), (0.5 + 1e-6, False)):
        assert lp_feasible(scaled(1.0), {"R1": point}) is expected
        assert lp_feasible(scaled(1000.0), {"R1": point}) is expected


def test_support_and_maximizer():
    system = _pentagon()
    assert support(system, {"R1": 1, "R2": 1}) == pytest.approx(1.5)
    value, point = support_point(system, {"R1": 1.0})
    assert value == pytest.approx(1.0)
    assert point["R1"] == pytest.approx(1.0)
    assert bounding_box(system) == {"R1": (0.0, pytest.approx(1.0)), "R2": (0.0, pytest.approx(1.0))}


def test_support_errors():
    open_cone = _system({"slope": ({"R1": 1, "R2": -1}, 1.0, "<=")})
    with pytest.raises(UnboundedSystem):
        support(open_cone, {"R1": 1, "R2": 1})
    empty = _system({"neg": ({"R1": 1}, -1.0, "<=")})
    with pytest.raises(RegionInfeasible):
        support(empty, {"R1": 1})
    with pytest.raises(UnknownVariable):
        support(_pentagon(), {"R9": 1})


def test_membership_dispatch():
    pentagon = _pentagon()
    assert membership(pentagon, {"R1": 0.5, "R2": 1.0})
    assert not membership(pentagon, {"R1": 1.0, "R2": 1.0})


# ============================================================================
# Fourier-Motzkin
# ============================================================================


def _random_system(seed):
    rng = np.random.default_rng(seed)
    variables = ["R1", "R2", "r1", "r2"]
    rows = {
        "box1": ({"R1": 1}, 3.0, "<="),
        "box2": ({"R2": 1}, 3.0, "<="),
    }
    for k in range(5):
        coeffs = rng.integers(-2, 3, size=len(variables))
        if not coeffs.any():
            coeffs[rng.integers(len(variables))] = 1
        rows[f"row{k}"] = (dict(zip(variables, coeffs.tolist())), float(rng.uniform(0.5, 3.0)), "<=")
    return _system(rows, aux_vars=("r1", "r2"))


@settings(max_examples=15)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.booleans())
def test_projection_preserves_supports(seed, prune):
    system = _random_system(seed)
    projected = fm_eliminate(system, ["r1", "r2"], prune=prune)
    assert projected.aux_vars == ()
    for d1, d2 in DIRECTIONS:
        direction = {"R1": d1, "R2": d2}
        assert support(projected, direction) == pytest.approx(
            support(system, direction), rel=1e-6, abs=1e-7
        )


def test_projection_keeps_membership(rng):
    system = _random_system(5)
    projected = eliminate_aux(system)
    for R1, R2 in rng.uniform(0.0, 3.0, size=(50, 2)):
        point = {"R1": R1, "R2": R2}
        assert projected.contains(point) == lp_feasible(system, point)


def test_contradiction_marks_result_empty():
    system = _system(
        {"neg": ({"r": 1}, -1.0, "<=")}, rate_vars=("R1",), aux_vars=("r",)
    )
    projected = fm_eliminate(system, ["r"])
    assert projected.empty
    assert not projected.contains({"R1": 0.0})
    with pytest.raises(RegionInfeasible):
        support(projected, {"R1": 1})


def test_blowup_cap(trivial_crng, noiseless):
    base = build_crng(trivial_crng, noiseless, "base")
    with pytest.raises(BlowupCapExceeded):
        fm_eliminate(base, base.aux_vars, cap=1)
    with pytest.raises(UnknownVariable):
        fm_eliminate(base, ["r99"])


def test_projected_base_region_on_noiseless(trivial_crng, noiseless):
    projected = eliminate_aux(build_crng(trivial_crng, noiseless, "base"))
    assert projected.rate_vars == ("R00", "R10", "R11", "R20", "R22")
    point = {"R00": 0.0, "R10": 0.0, "R11": 1.0, "R20": 0.0, "R22": 1.0}
    assert projected.contains(point)
    assert not projected.contains({**point, "R11": 1.2})


def test_prune_redundant_rows():
    system = _system(
        {
            "a": ({"R1": 1}, 1.0, "<="),
            "b": ({"R1": 1}, 2.0, "<="),
            "c": ({"R1": 1, "R2": 1}, 5.0, "<="),
            "d": ({"R2": 1}, 1.0, "<="),
        }
    )
    assert prune_redundant(system).tags == ["a", "d"]


# ============================================================================
# Two-variable elimination instance
# ============================================================================


def test_lemma_projection_matches_closed_form(rng):
    system = lemma_fme_system()
    projected = fm_eliminate(system, ELIMINATED)
    closed = lemma_fme_closed_form()
    assert projected.rate_vars == PARAMETERS
    points = [dict.fromkeys(PARAMETERS, 0.0)]
    points += [dict(zip(PARAMETERS, row)) for row in rng.uniform(-2, 2, size=(300, 8))]
    for point in points:
        expected = lp_feasible(system, point)
        assert closed.contains(point) == expected
        assert projected.contains(point) == expected
    assert lp_feasible(system, points[0])


# ============================================================================
# Comparison and sweeps
# ============================================================================


def test_identical_regions_compare_equal():
    report = compare_regions(_pentagon("a"), _pentagon("b"), n_dirs=8, n_points=50, seed=1)
    assert report.max_support_gap < 1e-9
    assert report.a_only == 0 and report.b_only == 0
    assert report.summary()["directions"] == 8


def test_comparison_finds_the_larger_region():
    small = _system({"R1": ({"R1": 1}, 1.0, "<="), "R2": ({"R2": 1}, 1.0, "<=")}, name="small")
    large = _system({"R1": ({"R1": 1}, 1.0, "<="), "R2": ({"R2": 1}, 2.0, "<=")}, name="large")
    report = compare_regions(small, large, n_points=200, seed=2, directions=[[0.0, 1.0]])
    assert report.max_support_gap == pytest.approx(1.0)
    assert report.a_only == 0
    assert report.b_only > 0
    assert report.witnesses_b_only and report.witnesses_b_only[0]["R2"] > 1.0


def test_comparison_is_reproducible_across_workers():
    a, b = _pentagon("a"), _system({"R1": ({"R1": 1}, 1.2, "<=")}, name="b")
    b = b.replace(inequalities=b.inequalities + (LinearInequality({"R2": 1}, 0.8, tag="R2"),))
    serial = compare_regions(a, b, n_dirs=10, n_points=40, seed=9, workers=1)
    threaded = compare_regions(a, b, n_dirs=10, n_points=40, seed=9, workers=3)
    assert serial.supports.equals(threaded.supports)
    assert serial.memberships.equals(threaded.memberships)


def test_comparison_needs_same_rates():
    other = _system({"R0": ({"R0": 1}, 1.0, "<=")}, rate_vars=("R0",))
    with pytest.raises(VariableSetMismatch):
        compare_regions(_pentagon(), other)


def test_sweep_boundary():
    sweep = sweep_boundary(_pentagon(), [0.0, np.pi / 4, np.pi / 2])
    assert list(sweep.columns) == ["theta", "support", "R1", "R2"]
    np.testing.assert_allclose(sweep["support"], [1.0, 1.5 / np.sqrt(2), 1.0], atol=1e-9)
    with pytest.raises(VariableSetMismatch):
        sweep_boundary(_pentagon(), [0.0], axes=("R0", "R1"))
