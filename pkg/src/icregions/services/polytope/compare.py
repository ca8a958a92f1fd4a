# services/polytope/compare.py
"""
Numeric comparison of two regions over the same rate variables: support
functions along random directions and membership of random points in the
joint bounding box.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar
import logging

import numpy as np
import pandas as pd

from icregions.exceptions import VariableSetMismatch
from icregions.models.reports import ComparisonReport
from icregions.models.system import MEMBERSHIP_TOL, InequalitySystem
from icregions.services.polytope.lp import (
    bounding_box,
    membership,
    support,
    support_point,
)

logger = logging.getLogger(__name__)

MAX_WITNESSES = 5

T = TypeVar("T")


def random_directions(n_dirs: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. standard normal components, normalized to unit length."""
    dirs = rng.standard_normal((n_dirs, dim))
    norms = np.linalg.norm(dirs, axis=1)
    while np.any(norms == 0):
        zero = norms == 0
        dirs[zero] = rng.standard_normal((int(zero.sum()), dim))
        norms = np.linalg.norm(dirs, axis=1)
    return dirs / norms[:, None]


def _map(fn: Callable[[int], T], count: int, workers: int) -> List[T]:
    if workers <= 1:
        return [fn(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def compare_regions(
    sys_a: InequalitySystem,
    sys_b: InequalitySystem,
    n_dirs: int = 32,
    n_points: int = 200,
    seed: Optional[int] = None,
    tol: float = MEMBERSHIP_TOL,
    workers: int = 1,
    directions: Optional[Sequence[Sequence[float]]] = None,
) -> ComparisonReport:
    """
    Compare two regions.

    Args:
        sys_a: First region
        sys_b: Second region, over the same rate variables
        n_dirs: Number of random unit directions for support comparison
        n_points: Number of uniform points in the joint bounding box
        seed: Seed of the direction and point streams
        tol: Membership tolerance
        workers: Thread count for the per-direction and per-point LPs
        directions: Explicit directions used instead of random ones

    Returns:
        ComparisonReport
    """
    if set(sys_a.rate_vars) != set(sys_b.rate_vars):
        raise VariableSetMismatch(
            f"cannot compare regions over {list(sys_a.rate_vars)} and {list(sys_b.rate_vars)}"
        )
    variables = list(sys_a.rate_vars)
    dir_seq, point_seq = np.random.SeedSequence(seed).spawn(2)

    if directions is not None:
        dirs = np.asarray(directions, dtype=float).reshape(-1, len(variables))
    else:
        dirs = random_directions(n_dirs, len(variables), np.random.default_rng(dir_seq))

    def support_row(k: int) -> dict:
        d = dict(zip(variables, dirs[k]))
        s_a, s_b = support(sys_a, d), support(sys_b, d)
        return {**d, "support_a": s_a, "support_b": s_b, "gap": s_a - s_b}

    supports = pd.DataFrame(
        _map(support_row, len(dirs), workers),
        columns=variables + ["support_a", "support_b", "gap"],
    )

    box_a, box_b = bounding_box(sys_a), bounding_box(sys_b)
    lower = np.array([min(box_a[v][0], box_b[v][0]) for v in variables])
    upper = np.array([max(box_a[v][1], box_b[v][1]) for v in variables])
    points = np.random.default_rng(point_seq).uniform(
        lower, upper, size=(n_points, len(variables))
    )

    def member_row(k: int) -> dict:
        p = dict(zip(variables, points[k]))
        return {**p, "in_a": membership(sys_a, p, tol), "in_b": membership(sys_b, p, tol)}

    memberships = pd.DataFrame(
        _map(member_row, n_points, workers), columns=variables + ["in_a", "in_b"]
    )
    if not memberships.empty:
        memberships[["in_a", "in_b"]] = memberships[["in_a", "in_b"]].astype(bool)

    report = ComparisonReport(
        name_a=sys_a.name,
        name_b=sys_b.name,
        variables=variables,
        seed=seed,
        supports=supports,
        memberships=memberships,
    )
    if not memberships.empty:
        a_only = memberships[memberships["in_a"] & ~memberships["in_b"]]
        b_only = memberships[~memberships["in_a"] & memberships["in_b"]]
        report.witnesses_a_only = a_only[variables].head(MAX_WITNESSES).to_dict(orient="records")
        report.witnesses_b_only = b_only[variables].head(MAX_WITNESSES).to_dict(orient="records")

    logger.info(
        f"compared {sys_a.name} vs {sys_b.name}: max gap {report.max_support_gap:.3g}, "
        f"A-only {report.a_only}, B-only {report.b_only}"
    )
    return report


def sweep_boundary(
    system: InequalitySystem, angles: Sequence[float], axes: Sequence[str] = ("R1", "R2")
) -> pd.DataFrame:
    """
    Support of a two-rate region along (cos t, sin t) for every angle t, with
    the maximizing point, ready for external plotting.
    """
    if set(system.rate_vars) != set(axes):
        raise VariableSetMismatch(
            f"sweep needs a region over {list(axes)}, got {list(system.rate_vars)}"
        )
    x, y = axes
    rows = []
    for theta in angles:
        value, point = support_point(system, {x: float(np.cos(theta)), y: float(np.sin(theta))})
        rows.append({"theta": float(theta), "support": value, x: point[x], y: point[y]})
    return pd.DataFrame(rows, columns=["theta", "support", x, y])
