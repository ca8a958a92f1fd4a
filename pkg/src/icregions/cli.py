# icregions/cli.py
"""
Command-line front end.

    icregions region build|member|project|support|compare --input spec.json ...
    icregions codec simulate|exact|hash-check ...
    icregions sweep --input spec.json --variant crng-tilde --slice 00

Inputs are JSON; reports go to stdout (or --output, written atomically) as an
aligned table, CSV or JSON. Logs go to stderr. The exit code is 0 on success
and the ``exit_code`` of the raised error otherwise.
"""

from typing import Dict, Optional, Sequence, Tuple
import argparse
import logging
import sys

import numpy as np

from icregions.config.rates import SLICE_TABLE, SWEEP_SLICES, VARIANT_FAMILIES
from icregions.core.channel import AuxInputSpec, ChannelSpec
from icregions.defs.resources import ExperimentConfigResource, SolverConfigResource
from icregions.exceptions import ParseError, RegionError, ValidationFailed
from icregions.models.system import InequalitySystem, RatePoint
from icregions.services.builders import build_variant, evaluate
from icregions.services.codec import (
    code_from_json,
    exact_error,
    hash_check,
    rate_conditions,
    simulate,
)
from icregions.services.codec.code import DECODE_RULES
from icregions.services.codec.hashing import DEFAULT_DEGREE_CONSTANT, HASH_MODES
from icregions.services.polytope import (
    compare_regions,
    eliminate_aux,
    membership,
    support_point,
    sweep_boundary,
)
from icregions.utils.io import OUTPUT_FORMATS, Report, atomic_write, load_json, render

logger = logging.getLogger("icregions.cli")

VARIANTS = tuple(VARIANT_FAMILIES)
VARIANT_ALIASES = {name[len("crng-"):]: name for name in VARIANTS if name.startswith("crng-")}
SLICES = ("none", "0", "00", "000")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


# ============================================================================
# Inputs
# ============================================================================


def variant_name(text: str) -> str:
    name = VARIANT_ALIASES.get(text, text)
    if name not in VARIANT_FAMILIES:
        raise argparse.ArgumentTypeError(
            f"unknown variant {text!r}; expected one of {sorted(VARIANTS)}"
        )
    return name


def load_instance(path: str) -> Tuple[AuxInputSpec, ChannelSpec]:
    data = load_json(path)
    for key in ("input", "channel"):
        if key not in data:
            raise ParseError(f"{path}: missing {key!r}")
    return AuxInputSpec.from_json(data["input"]), ChannelSpec.from_json(data["channel"])


def parse_assignment(text: str) -> Dict[str, float]:
    """``"R1=1,R2=0.5"`` -> {"R1": 1.0, "R2": 0.5}; signs allowed."""
    values = {}
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if "=" not in part:
            raise ParseError(f"expected name=value in {text!r}, got {part!r}")
        name, value = part.split("=", 1)
        try:
            values[name.strip()] = float(value)
        except ValueError as exc:
            raise ParseError(f"malformed value in {part!r}: {exc}") from exc
    if not values:
        raise ParseError(f"empty assignment {text!r}")
    return values


def solver_config(args: argparse.Namespace) -> SolverConfigResource:
    overrides = {
        "membership_tol": args.tol,
        "fm_cap": getattr(args, "fm_cap", None),
        "block_space_cap": getattr(args, "block_cap", None),
        "exact_state_cap": getattr(args, "exact_cap", None),
        "fm_prune": getattr(args, "prune", None),
    }
    return SolverConfigResource(
        **{k: v for k, v in overrides.items() if v is not None}
    ).checked()


def resolve_seed(seed: Optional[int]) -> int:
    """A fresh seed is drawn when none is given, so every report can be replayed."""
    return int(np.random.SeedSequence(seed).entropy)


def build_system(args: argparse.Namespace, solver: SolverConfigResource) -> InequalitySystem:
    spec, channel = load_instance(args.input)
    if args.slice not in SLICE_TABLE[args.variant]:
        raise ValidationFailed(
            f"slice {args.slice!r} is not defined for {args.variant}; "
            f"expected one of {sorted(SLICE_TABLE[args.variant])}"
        )
    system = build_variant(args.variant, spec, channel, args.slice)
    if getattr(args, "eliminate", False) and system.aux_vars:
        system = eliminate_aux(system, prune=solver.fm_prune, cap=solver.fm_cap)
    return system


# ============================================================================
# Commands
# ============================================================================


def cmd_region_build(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    system = build_system(args, solver)
    logger.info(f"built {system.name}: {len(system)} inequalities")
    args.header = f"{len(system)} inequalities"
    if args.format == "json":
        return system.to_json()
    return system.to_frame()


def cmd_region_member(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    if args.point is None:
        raise ValidationFailed("region member needs --point")
    system = build_system(args, solver)
    point = RatePoint.parse(args.point, system.rate_vars)
    accepted = membership(system, point, solver.membership_tol)
    violated = [] if accepted or system.aux_vars else evaluate(system, point, solver.membership_tol)
    return {
        "variant": args.variant,
        "slice": args.slice,
        **dict(point.items()),
        "verdict": "ACCEPT" if accepted else "REJECT",
        "violated": ", ".join(violated),
    }


def cmd_region_project(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    args.eliminate = True
    return cmd_region_build(args, solver)


def cmd_region_support(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    if args.direction is None:
        raise ValidationFailed("region support needs --direction")
    system = build_system(args, solver)
    value, point = support_point(system, parse_assignment(args.direction))
    return {"variant": args.variant, "slice": args.slice, "support": value, **point}


def cmd_region_compare(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    if args.against is None:
        raise ValidationFailed("region compare needs --against")
    system_a = build_system(args, solver)
    other = argparse.Namespace(**vars(args))
    other.variant = args.against
    other.input = args.against_input or args.input
    system_b = build_system(other, solver)
    seed = resolve_seed(args.seed)
    report = compare_regions(
        system_a,
        system_b,
        n_dirs=args.dirs,
        n_points=args.points,
        seed=seed,
        tol=solver.membership_tol,
        workers=args.workers,
    )
    if args.format == "json":
        return report.to_json()
    if args.format == "csv":
        return report.supports
    return report.summary()


def cmd_codec_simulate(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    seed = resolve_seed(args.seed)
    code = code_from_json(load_json(args.input), seed=seed, block_space_cap=solver.block_space_cap)
    result = simulate(code, args.trials, seed=seed, rule=args.rule, workers=args.workers)
    return {**result.to_json(), "code_seed": code.seed, "rule": args.rule, **code.rates()}


def cmd_codec_exact(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    seed = resolve_seed(args.seed)
    code = code_from_json(load_json(args.input), seed=seed, block_space_cap=solver.block_space_cap)
    if args.conditions:
        return rate_conditions(code)
    error = exact_error(code, rule=args.rule, cap=solver.exact_state_cap)
    return {"error": error, "rule": args.rule, "code_seed": code.seed, **code.rates()}


def cmd_codec_hash_check(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    seed = resolve_seed(args.seed)
    profile = hash_check(
        args.mode,
        args.n,
        args.l,
        samples=args.samples,
        seed=seed,
        q=args.q,
        exact=args.exact,
        c=args.c,
        l_g=args.l_g,
    )
    if args.format == "csv":
        return profile.pairs
    return profile.to_json()


def cmd_sweep(args: argparse.Namespace, solver: SolverConfigResource) -> Report:
    if args.slice == "none":
        args.slice = SWEEP_SLICES[args.variant]
    system = build_system(args, solver)
    angles = np.linspace(0.0, np.pi / 2, args.angles)
    sweep = sweep_boundary(system, angles)
    sweep.insert(0, "variant", args.variant)
    return sweep


COMMANDS = {
    ("region", "build"): cmd_region_build,
    ("region", "member"): cmd_region_member,
    ("region", "project"): cmd_region_project,
    ("region", "support"): cmd_region_support,
    ("region", "compare"): cmd_region_compare,
    ("codec", "simulate"): cmd_codec_simulate,
    ("codec", "exact"): cmd_codec_exact,
    ("codec", "hash-check"): cmd_codec_hash_check,
    ("sweep", None): cmd_sweep,
}


# ============================================================================
# Parser
# ============================================================================


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="Seed; drawn and recorded when omitted")
    parser.add_argument("--tol", type=float, default=None, help="Membership tolerance")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default="table")
    parser.add_argument("--output", default=None, help="Write the report to this file")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")


def _region_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="JSON with 'input' and 'channel'")
    parser.add_argument("--variant", type=variant_name, required=True)
    parser.add_argument("--slice", choices=SLICES, default="none")
    parser.add_argument("--eliminate", action="store_true", help="Project out binning rates")
    parser.add_argument("--prune", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--fm-cap", type=positive_int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icregions",
        description="Interference-channel rate regions and hash/CRNG code simulation",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    region = commands.add_parser("region", help="Build and query rate regions")
    actions = region.add_subparsers(dest="action", required=True)
    for action in ("build", "member", "project", "support", "compare"):
        sub = actions.add_parser(action)
        _region_args(sub)
        _common(sub)
        sub.add_argument("--point", default=None, help='"R0=0,R1=1,R2=1" or "0,1,1"')
        sub.add_argument("--direction", default=None, help='"R1=1,R2=1"')
        sub.add_argument("--against", type=variant_name, default=None)
        sub.add_argument("--against-input", default=None)
        sub.add_argument("--dirs", type=int, default=32)
        sub.add_argument("--points", type=int, default=200)
        sub.add_argument("--workers", type=positive_int, default=1)

    codec = commands.add_parser("codec", help="Simulate and analyze codes")
    actions = codec.add_subparsers(dest="action", required=True)
    for action in ("simulate", "exact"):
        sub = actions.add_parser(action)
        _common(sub)
        sub.add_argument("--input", required=True, help="Code JSON or generator parameters")
        sub.add_argument("--rule", choices=DECODE_RULES, default="stochastic")
        sub.add_argument("--block-cap", type=positive_int, default=None)
        if action == "simulate":
            sub.add_argument("--trials", type=positive_int, default=ExperimentConfigResource().trials)
            sub.add_argument("--workers", type=positive_int, default=1)
        else:
            sub.add_argument("--exact-cap", type=positive_int, default=None)
            sub.add_argument("--conditions", action="store_true", help="Report the rate conditions")
    sub = actions.add_parser("hash-check")
    _common(sub)
    sub.add_argument("--mode", choices=HASH_MODES, default="dense")
    sub.add_argument("--n", type=positive_int, default=8)
    sub.add_argument("--l", type=int, default=2)
    sub.add_argument("--l-g", type=int, default=None, help="Output length of a second ensemble")
    sub.add_argument("--q", type=int, default=2)
    sub.add_argument("--samples", type=positive_int, default=10000)
    sub.add_argument("--exact", action="store_true", help="Enumerate the whole ensemble")
    sub.add_argument("--c", type=float, default=DEFAULT_DEGREE_CONSTANT)

    sweep = commands.add_parser("sweep", help="Two-rate boundary samples for plotting")
    _region_args(sweep)
    _common(sweep)
    sweep.add_argument("--angles", type=positive_int, default=ExperimentConfigResource().sweep_angles)
    return parser


# ============================================================================
# Entry point
# ============================================================================


def emit(
    report: Report, fmt: str, output: Optional[str], header: Optional[str] = None
) -> None:
    text = render(report, fmt)
    if header and fmt == "table":
        text = f"{header}\n{text}"
    if output:
        atomic_write(output, text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    command = COMMANDS[(args.command, getattr(args, "action", None))]
    try:
        solver = solver_config(args)
        report = command(args, solver)
        emit(report, args.format, args.output, getattr(args, "header", None))
    except RegionError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
