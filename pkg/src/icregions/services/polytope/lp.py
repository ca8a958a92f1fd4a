# services/polytope/lp.py
"""
Linear programs over inequality systems: feasibility of the binning rates at
fixed message rates, support functions and membership.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple
import logging

import numpy as np
from scipy.optimize import linprog

from icregions.exceptions import (
    RegionError,
    RegionInfeasible,
    UnboundedSystem,
    UnknownVariable,
    ValidationFailed,
)
from icregions.models.system import (
    MEMBERSHIP_TOL,
    InequalitySystem,
    PointLike,
    point_values,
)

logger = logging.getLogger(__name__)

LP_METHOD = "highs-ds"
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}

LP_SENSES = ("max", "min", "feasibility")

# linprog status codes
STATUS_OPTIMAL = 0
STATUS_INFEASIBLE = 2
STATUS_UNBOUNDED = 3
STATUS_AMBIGUOUS = 4  # presolve: unbounded or infeasible


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float = 0.0
    point: Dict[str, float] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


@dataclass(frozen=True)
class LPProblem:
    """
    Optimize ``objective`` over ``constraints`` with the variables in ``fixed``
    pinned to their values. Every other variable is free, or >= 0 when the
    system is nonnegative.
    """

    objective: Dict[str, float]
    constraints: InequalitySystem
    sense: str = "feasibility"
    fixed: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.sense not in LP_SENSES:
            raise ValidationFailed(f"unknown LP sense {self.sense!r}; expected {LP_SENSES}")
        if self.sense == "feasibility" and any(self.objective.values()):
            raise ValidationFailed("a feasibility problem takes an empty objective")
        declared = set(self.constraints.variables)
        unknown = sorted((set(self.objective) | set(self.fixed)) - declared)
        if unknown:
            raise UnknownVariable(
                f"LP references {unknown} not declared in {self.constraints.name or 'system'}"
            )

    @property
    def free_vars(self) -> Tuple[str, ...]:
        return tuple(v for v in self.constraints.variables if v not in self.fixed)

    def standard_form(self, relax: float = 0.0) -> Tuple[np.ndarray, np.ndarray, bool]:
        """
        Rows over the free variables in A x <= b form, each scaled so its largest
        coefficient has magnitude 1, then relaxed by ``relax``.

        Returns:
            (A, b, consistent): ``consistent`` is False when a row without free
            variables already fails
        """
        A, b = self.constraints.to_matrix()
        order = list(self.constraints.variables)
        fixed_idx = [order.index(v) for v in self.fixed]
        free_idx = [order.index(v) for v in self.free_vars]
        if fixed_idx:
            values = np.array([self.fixed[v] for v in self.fixed])
            b = b - A[:, fixed_idx] @ values
        A = A[:, free_idx]

        scale = np.abs(A).max(axis=1) if A.shape[1] else np.zeros(len(b))
        constant = scale == 0
        consistent = bool(np.all(b[constant] >= -relax))
        A, b, scale = A[~constant], b[~constant], scale[~constant]
        return A / scale[:, None], b / scale + relax, consistent

    def solve(self, relax: float = 0.0) -> LPSolution:
        if self.constraints.empty:
            return LPSolution("infeasible")
        if self.constraints.nonneg and any(v < -relax for v in self.fixed.values()):
            return LPSolution("infeasible")

        A, b, consistent = self.standard_form(relax)
        if not consistent:
            return LPSolution("infeasible")
        free = self.free_vars
        if not free:
            return LPSolution("optimal", 0.0, {})

        c = np.array([self.objective.get(v, 0.0) for v in free])
        if self.sense == "max":
            c = -c
        res = self._linprog(c, A, b)
        if res.status == STATUS_AMBIGUOUS and "unbounded" in str(res.message).lower():
            # the zero objective tells the two cases apart
            probe = self._linprog(np.zeros_like(c, dtype=float), A, b)
            if probe.status == STATUS_OPTIMAL:
                return LPSolution("unbounded", float("inf"))
            res = probe
        if res.status == STATUS_INFEASIBLE:
            return LPSolution("infeasible")
        if res.status == STATUS_UNBOUNDED:
            return LPSolution("unbounded", float("inf"))
        if res.status != STATUS_OPTIMAL:
            raise RegionError(f"LP solver failed with status {res.status}: {res.message}")

        value = float(-res.fun if self.sense == "max" else res.fun)
        return LPSolution("optimal", value, dict(zip(free, map(float, res.x))))

    def _linprog(self, c: np.ndarray, A: np.ndarray, b: np.ndarray):
        bounds = (0, None) if self.constraints.nonneg else (None, None)
        return linprog(
            c,
            A_ub=A if len(b) else None,
            b_ub=b if len(b) else None,
            bounds=bounds,
            method=LP_METHOD,
            options=LP_OPTIONS,
        )


# ============================================================================
# Operations
# ============================================================================


def lp_feasible(
    system: InequalitySystem, fixed: PointLike, tol: float = MEMBERSHIP_TOL
) -> bool:
    """
    True iff some assignment of the auxiliary variables satisfies every
    inequality with the rate variables pinned to ``fixed``.

    Rows are scaled to unit max-coefficient and relaxed by ``tol``, so the
    answer does not change when a row is multiplied by a positive constant.
    """
    values = point_values(fixed, system.rate_vars)
    problem = LPProblem({}, system, "feasibility", values)
    return problem.solve(relax=tol).feasible


def _direction(system: InequalitySystem, direction: Mapping[str, float]) -> Dict[str, float]:
    unknown = [v for v in direction if v not in system.variables]
    if unknown:
        raise UnknownVariable(f"direction uses undeclared {unknown}")
    aux = [v for v in direction if v in system.aux_vars and direction[v] != 0]
    if aux:
        raise ValidationFailed(f"support directions range over rate variables, got {aux}")
    return {v: float(direction.get(v, 0.0)) for v in system.rate_vars}


def support_point(
    system: InequalitySystem,
    direction: Mapping[str, float],
    relax: float = 0.0,
) -> Tuple[float, Dict[str, float]]:
    """
    Maximize direction . R over the region.

    Args:
        system: Region system; auxiliary variables range freely (>= 0 if nonneg)
        direction: Coefficients per rate variable; missing ones are 0
        relax: Slack added to every normalized row; 0 gives the exact support

    Returns:
        (value, maximizer over the rate variables)
    """
    objective = _direction(system, direction)
    solution = LPProblem(objective, system, "max").solve(relax=relax)
    if solution.status == "infeasible":
        raise RegionInfeasible(f"region {system.name or 'system'} is empty")
    if solution.status == "unbounded":
        raise UnboundedSystem(
            f"region {system.name or 'system'} is unbounded along {objective}"
        )
    maximizer = {v: solution.point.get(v, 0.0) for v in system.rate_vars}
    return solution.value, maximizer


def support(
    system: InequalitySystem, direction: Mapping[str, float], relax: float = 0.0
) -> float:
    return support_point(system, direction, relax)[0]


def membership(
    system: InequalitySystem, point: PointLike, tol: float = MEMBERSHIP_TOL
) -> bool:
    """Bound evaluation for aux-free systems, LP feasibility otherwise."""
    if system.aux_vars:
        return lp_feasible(system, point, tol)
    return system.contains(point_values(point, system.rate_vars), tol)


def bounding_box(system: InequalitySystem) -> Dict[str, Tuple[float, float]]:
    """Per-rate (lower, upper) extent of the region."""
    box = {}
    for v in system.rate_vars:
        upper = support(system, {v: 1.0})
        lower = 0.0 if system.nonneg else -support(system, {v: -1.0})
        box[v] = (lower, upper)
    return box


def relaxed_optimum(
    A: np.ndarray,
    b: np.ndarray,
    objective: np.ndarray,
    bounds,
) -> Optional[float]:
    """max objective . x over A x <= b; None when infeasible or unbounded."""
    res = linprog(
        -objective, A_ub=A, b_ub=b, bounds=bounds, method=LP_METHOD, options=LP_OPTIONS
    )
    if res.status != STATUS_OPTIMAL:
        if res.status not in (STATUS_INFEASIBLE, STATUS_UNBOUNDED, STATUS_AMBIGUOUS):
            logger.warning(f"redundancy LP status {res.status}: {res.message}")
        return None
    return float(-res.fun)
