# services/builders/transforms.py
"""
Slices of region systems and the input-law transformations that relate the
regions to each other: embedding into the full configuration, the
time-sharing lift of the closed-form region, and the JXG-to-CRNG relabeling.
"""

from typing import Dict, Iterable, Mapping, Union
import logging

import numpy as np

from icregions.config.families import FAMILY_CONFIGS, Family
from icregions.config.rates import SLICE_RENAMES, SLICE_TABLE
from icregions.core.channel import AuxInputSpec, ChannelSpec
from icregions.core.prob import (
    EntropyOracle,
    JointDistribution,
    duplicate_variable,
    extend_constant,
)
from icregions.exceptions import (
    FamilyMismatch,
    InfeasibleSubstitution,
    PointNotInRegion,
    QTooSmall,
    UnknownVariable,
    ValidationFailed,
)
from icregions.models.system import (
    LEQ,
    MEMBERSHIP_TOL,
    InequalitySystem,
    LinearInequality,
    PointLike,
    RatePoint,
    point_values,
)
from icregions.services.builders.crng import CRNGTildeBuilder

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9

CROSS_LABELS = ("01", "02", "12", "21")


# ============================================================================
# Slices
# ============================================================================


def slice_system(
    system: InequalitySystem,
    fixed: Union[Mapping[str, float], Iterable[str]],
    tol: float = MEMBERSHIP_TOL,
) -> InequalitySystem:
    """
    Substitute fixed values (zero when only names are given) into a system.

    Rows left without variables are dropped when they hold and raise
    InfeasibleSubstitution when they do not. Survivors are renamed
    R00 -> R0, R11 -> R1, R22 -> R2 when no other rate variable remains.

    Args:
        system: System to slice
        fixed: Rate variables to fix, as names or a name -> value mapping
        tol: Slack allowed on dropped rows

    Returns:
        The sliced system
    """
    if isinstance(fixed, Mapping):
        values = {str(k): float(v) for k, v in fixed.items()}
    else:
        values = {str(k): 0.0 for k in fixed}
    if not values:
        return system

    unknown = [v for v in values if v not in system.variables]
    if unknown:
        raise UnknownVariable(f"cannot slice {system.name or 'system'} at {unknown}")

    kept = []
    for ineq in system.inequalities:
        coeffs = {v: c for v, c in ineq.coeffs.items() if v not in values}
        bound = ineq.bound - sum(
            c * values[v] for v, c in ineq.coeffs.items() if v in values
        )
        if coeffs:
            kept.append(LinearInequality(coeffs, bound, ineq.sense, ineq.tag))
            continue
        holds = 0.0 <= bound + tol if ineq.sense == LEQ else 0.0 >= bound - tol
        if not holds:
            raise InfeasibleSubstitution(
                f"slice {values} violates {ineq.tag!r}: 0 {ineq.sense} {bound:.6g}"
            )

    rate_vars = [v for v in system.rate_vars if v not in values]
    aux_vars = [v for v in system.aux_vars if v not in values]
    sliced = InequalitySystem(
        rate_vars=rate_vars,
        aux_vars=aux_vars,
        inequalities=kept,
        nonneg=system.nonneg,
        name=system.name,
        empty=system.empty,
    )
    if rate_vars and set(rate_vars) <= set(SLICE_RENAMES):
        sliced = rename_system(sliced, SLICE_RENAMES)
    return sliced


def rename_system(system: InequalitySystem, mapping: Dict[str, str]) -> InequalitySystem:
    def rename(name: str) -> str:
        return mapping.get(name, name)

    inequalities = [
        LinearInequality(
            {rename(v): c for v, c in ineq.coeffs.items()},
            ineq.bound,
            ineq.sense,
            ineq.tag,
        )
        for ineq in system.inequalities
    ]
    return system.replace(
        rate_vars=tuple(rename(v) for v in system.rate_vars),
        aux_vars=tuple(rename(v) for v in system.aux_vars),
        inequalities=tuple(inequalities),
    )


def slice_named(system: InequalitySystem, variant: str, name: str) -> InequalitySystem:
    """Apply one of the named slices (none, 0, 00, 000) of a region variant."""
    try:
        slices = SLICE_TABLE[variant]
    except KeyError:
        raise ValidationFailed(f"unknown variant {variant!r}")
    if name not in slices:
        raise ValidationFailed(
            f"variant {variant!r} has no slice {name!r}; expected one of {sorted(slices)}"
        )
    fixed = slices[name]
    sliced = slice_system(system, fixed)
    if fixed:
        sliced = sliced.replace(name=f"{system.name}^{name}")
    return sliced


# ============================================================================
# Embeddings
# ============================================================================


def embed_in_full(spec: AuxInputSpec) -> AuxInputSpec:
    """Extend a CRNG input law with constant cross auxiliaries Z01, Z02, Z12, Z21."""
    if spec.family != Family.CRNG:
        raise FamilyMismatch(f"embed_in_full needs a CRNG spec, got {spec.family.value}")
    order = FAMILY_CONFIGS[Family.CRNG_FULL]["variables"]
    dist = extend_constant(spec.dist, [f"Z{s}" for s in CROSS_LABELS], order=order)
    return AuxInputSpec(Family.CRNG_FULL, dist)


def embed_point_in_full(point: PointLike) -> RatePoint:
    """Base-region rates with the cross messages set to rate zero."""
    values = point_values(point, ("R00", "R10", "R11", "R20", "R22"))
    values.update({f"R{s}": 0.0 for s in CROSS_LABELS})
    return RatePoint(values)


def jxg_to_crng_embed(spec: AuxInputSpec) -> AuxInputSpec:
    """
    Read a JXG input law as a CRNG one: U0 -> Z00, Ui -> Zi0, and Xi kept as the
    channel input with an identical copy Zii.
    """
    if spec.family != Family.CMG:
        raise FamilyMismatch(f"jxg_to_crng_embed needs a CMG/JXG spec, got {spec.family.value}")
    dist = duplicate_variable(spec.dist, "X1", "Z11")
    dist = duplicate_variable(dist, "X2", "Z22")
    dist = dist.rename({"U0": "Z00", "U1": "Z10", "U2": "Z20"})
    return AuxInputSpec(Family.CRNG, dist)


# ============================================================================
# Time-sharing lift
# ============================================================================


def tilde_point_to_base(point: PointLike) -> RatePoint:
    """(R0, R1, R2) -> (R00, R10, R11, R20, R22) = (R0, 0, R1, 0, R2)."""
    values = point_values(point, ("R0", "R1", "R2"))
    return RatePoint(
        {"R00": values["R0"], "R10": 0.0, "R11": values["R1"], "R20": 0.0, "R22": values["R2"]}
    )


def common_routing_threshold(oracle: EntropyOracle, i: int) -> float:
    """I(Vii;Yi|V00,V10,V20) + I(Vi0;Yi'|V00,Vi'0,Vi'i') on the unlifted law."""
    ip = 3 - i
    return oracle.I([f"Z{i}{i}"], [f"Y{i}"], ["Z00", "Z10", "Z20"]) + oracle.I(
        [f"Z{i}0"], [f"Y{ip}"], ["Z00", f"Z{ip}0", f"Z{ip}{ip}"]
    )


def lift_with_time_sharing(
    spec: AuxInputSpec,
    ch: ChannelSpec,
    point: PointLike,
    qbits: int,
    tie_tol: float = TIE_TOL,
    tol: float = MEMBERSHIP_TOL,
) -> AuxInputSpec:
    """
    Enlarge a CRNG input law with a uniform time-sharing variable Q of ``qbits``
    bits, independent of everything else:

        Z00 = (Q, V00)    Zii = (Q, Vi0, Vii)    Zi0 = (Q, Vi0) or Q

    Zi0 keeps Vi0 when Ri is at most the common-routing threshold (ties within
    ``tie_tol`` included), and drops it otherwise.

    Args:
        spec: CRNG input law (the V variables, named Z in the spec)
        ch: Channel
        point: Rates (R0, R1, R2) inside the closed-form region of ``spec``
        qbits: Entropy of Q in bits

    Returns:
        The lifted CRNG input law
    """
    if spec.family != Family.CRNG:
        raise FamilyMismatch(f"lift needs a CRNG spec, got {spec.family.value}")
    if qbits < 0:
        raise QTooSmall(f"qbits must be >= 0, got {qbits}")

    builder = CRNGTildeBuilder(spec, ch)
    tilde = builder.build()
    rates = point_values(point, tilde.rate_vars)
    violated = tilde.violated(rates, tol)
    if violated:
        raise PointNotInRegion(
            f"point {rates} is outside {tilde.name}: {[ineq.tag for ineq in violated]}"
        )

    oracle = builder.oracle
    required = min(
        oracle.I(["Z00", "Z10", "Z20", f"Z{i}{i}"], [f"Y{i}"]) for i in (1, 2)
    )
    if qbits < required - tie_tol:
        raise QTooSmall(
            f"H(Q) = {qbits} bits is below min_i I(V00,V10,V20,Vii;Yi) = {required:.6g}"
        )

    keep_common = {
        i: rates[f"R{i}"] <= common_routing_threshold(oracle, i) + tie_tol for i in (1, 2)
    }
    logger.debug(f"lift qbits={qbits} required={required:.6g} keep_common={keep_common}")
    return AuxInputSpec(Family.CRNG, _lift_distribution(spec.dist, 2**qbits, keep_common))


def _lift_distribution(
    dist: JointDistribution, q_size: int, keep_common: Dict[int, bool]
) -> JointDistribution:
    size = {name: dist.size_of(name) for name in dist.names}
    cells = np.nonzero(dist.probs)
    mass = dist.probs[cells]
    value = {name: cells[dist.axis(name)] for name in dist.names}

    # every Q value is paired with every cell of the original law
    q = np.repeat(np.arange(q_size), len(mass))
    tiled = {name: np.tile(v, q_size) for name, v in value.items()}
    weight = np.tile(mass, q_size) / q_size

    lifted = {"Z00": q * size["Z00"] + tiled["Z00"]}
    sizes = {"Z00": q_size * size["Z00"]}
    for i in (1, 2):
        common, private = f"Z{i}0", f"Z{i}{i}"
        with_common = q * size[common] + tiled[common]
        if keep_common[i]:
            lifted[common] = with_common
            sizes[common] = q_size * size[common]
        else:
            lifted[common] = q
            sizes[common] = q_size
        lifted[private] = with_common * size[private] + tiled[private]
        sizes[private] = q_size * size[common] * size[private]
        lifted[f"X{i}"] = tiled[f"X{i}"]
        sizes[f"X{i}"] = size[f"X{i}"]

    order = FAMILY_CONFIGS[Family.CRNG]["variables"]
    shape = tuple(sizes[name] for name in order)
    probs = np.zeros(shape)
    np.add.at(probs, tuple(lifted[name] for name in order), weight)
    return JointDistribution.normalized([(name, sizes[name]) for name in order], probs)
