# services/builders/__init__.py
"""
Region builders: one entry point per family plus ``build_variant`` for the
named variants the CLI and the batch assets use.
"""

from typing import List

from icregions.config.rates import VARIANT_FAMILIES
from icregions.core.channel import AuxInputSpec, ChannelSpec
from icregions.exceptions import ValidationFailed
from icregions.models.system import MEMBERSHIP_TOL, InequalitySystem, PointLike
from icregions.services.builders.base_builder import BaseRegionBuilder
from icregions.services.builders.cmg import CMGBuilder
from icregions.services.builders.crng import (
    CRNGBaseBuilder,
    CRNGEliminatedBuilder,
    CRNGFullBuilder,
    CRNGTildeBuilder,
)
from icregions.services.builders.hk import HKBuilder
from icregions.services.builders.jxg import JXGBuilder
from icregions.services.builders.transforms import slice_named

CRNG_VARIANTS = {
    "base": CRNGBaseBuilder,
    "full": CRNGFullBuilder,
    "tilde": CRNGTildeBuilder,
    "eliminated0": CRNGEliminatedBuilder,
}


def build_hk(spec: AuxInputSpec, ch: ChannelSpec, form: str = "split") -> InequalitySystem:
    return HKBuilder(spec, ch, form=form).build()


def build_cmg(spec: AuxInputSpec, ch: ChannelSpec) -> InequalitySystem:
    return CMGBuilder(spec, ch).build()


def build_jxg(spec: AuxInputSpec, ch: ChannelSpec, form: str = "reduced") -> InequalitySystem:
    return JXGBuilder(spec, ch, form=form).build()


def build_crng(spec: AuxInputSpec, ch: ChannelSpec, variant: str = "base") -> InequalitySystem:
    try:
        builder = CRNG_VARIANTS[variant]
    except KeyError:
        raise ValidationFailed(
            f"unknown CRNG variant {variant!r}; expected one of {sorted(CRNG_VARIANTS)}"
        )
    return builder(spec, ch).build()


def get_builder(variant: str, spec: AuxInputSpec, ch: ChannelSpec) -> BaseRegionBuilder:
    """Factory function to get the builder of a named variant."""
    if variant == "hk":
        return HKBuilder(spec, ch, form="split")
    if variant == "hk-reduced":
        return HKBuilder(spec, ch, form="reduced")
    if variant == "cmg":
        return CMGBuilder(spec, ch)
    if variant.startswith("jxg-"):
        return JXGBuilder(spec, ch, form=variant[len("jxg-"):])
    if variant.startswith("crng-") and variant[len("crng-"):] in CRNG_VARIANTS:
        return CRNG_VARIANTS[variant[len("crng-"):]](spec, ch)
    raise ValidationFailed(
        f"unknown variant {variant!r}; expected one of {sorted(VARIANT_FAMILIES)}"
    )


def build_variant(
    variant: str, spec: AuxInputSpec, ch: ChannelSpec, slice_name: str = "none"
) -> InequalitySystem:
    system = get_builder(variant, spec, ch).build()
    return slice_named(system, variant, slice_name)


def evaluate(
    system: InequalitySystem, point: PointLike, tol: float = MEMBERSHIP_TOL
) -> List[str]:
    """Tags of the inequalities an aux-free system's point violates."""
    return [ineq.tag for ineq in system.violated(point, tol)]


__all__ = [
    "CRNG_VARIANTS",
    "build_cmg",
    "build_crng",
    "build_hk",
    "build_jxg",
    "build_variant",
    "evaluate",
    "get_builder",
]
