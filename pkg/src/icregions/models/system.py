# models/system.py
"""
Linear inequality systems over named rate variables.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from icregions.exceptions import (
    MissingAssignment,
    ParseError,
    UnknownVariable,
    ValidationFailed,
)

LEQ = "<="
GEQ = ">="

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class LinearInequality:
    """sum(coeffs[v] * v) <sense> bound"""

    coeffs: Dict[str, float]
    bound: float
    sense: str = LEQ
    tag: str = ""

    def __post_init__(self):
        coeffs = {str(k): float(v) for k, v in self.coeffs.items() if v != 0}
        if not coeffs:
            raise ValidationFailed(f"inequality {self.tag!r} has no nonzero coefficient")
        if self.sense not in (LEQ, GEQ):
            raise ValidationFailed(f"unknown sense {self.sense!r}")
        if not np.isfinite(self.bound):
            raise ValidationFailed(f"inequality {self.tag!r} has non-finite bound")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "bound", float(self.bound))

    def lhs(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.coeffs.items())

    def violation(self, values: Mapping[str, float]) -> float:
        """Positive amount by which the inequality fails, else <= 0."""
        lhs = self.lhs(values)
        return lhs - self.bound if self.sense == LEQ else self.bound - lhs

    def as_leq(self) -> Tuple[Dict[str, float], float]:
        if self.sense == LEQ:
            return dict(self.coeffs), self.bound
        return {v: -c for v, c in self.coeffs.items()}, -self.bound

    def to_json(self) -> Dict:
        return {
            "coeffs": dict(self.coeffs),
            "sense": self.sense,
            "bound": self.bound,
            "tag": self.tag,
        }

    def __str__(self) -> str:
        terms = " + ".join(
            (f"{c:g}*{v}" if c != 1 else v) for v, c in self.coeffs.items()
        )
        return f"{terms} {self.sense} {self.bound:.6g}  [{self.tag}]"


@dataclass(frozen=True)
class InequalitySystem:
    """
    Inequalities over ``rate_vars`` (message rates) and ``aux_vars`` (binning
    rates). With ``nonneg`` every variable is implicitly >= 0; ``empty`` marks a
    system proven infeasible during elimination.
    """

    rate_vars: Tuple[str, ...]
    aux_vars: Tuple[str, ...] = ()
    inequalities: Tuple[LinearInequality, ...] = ()
    nonneg: bool = True
    name: str = ""
    empty: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rate_vars", tuple(self.rate_vars))
        object.__setattr__(self, "aux_vars", tuple(self.aux_vars))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        known = set(self.variables)
        if len(known) != len(self.variables):
            raise ValidationFailed(f"duplicate variables in {self.variables}")
        for ineq in self.inequalities:
            unknown = set(ineq.coeffs) - known
            if unknown:
                raise UnknownVariable(
                    f"inequality {ineq.tag!r} uses undeclared {sorted(unknown)}"
                )

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.rate_vars + self.aux_vars

    @property
    def tags(self) -> List[str]:
        return [ineq.tag for ineq in self.inequalities]

    def __len__(self) -> int:
        return len(self.inequalities)

    def replace(self, **changes) -> "InequalitySystem":
        return replace(self, **changes)

    # ------------------------------------------------------------------------
    # Matrix form
    # ------------------------------------------------------------------------

    def to_matrix(
        self, order: Optional[Sequence[str]] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Return (A, b) with every row in A x <= b form."""
        order = list(order or self.variables)
        index = {v: k for k, v in enumerate(order)}
        A = np.zeros((len(self.inequalities), len(order)))
        b = np.zeros(len(self.inequalities))
        for row, ineq in enumerate(self.inequalities):
            coeffs, bound = ineq.as_leq()
            for v, c in coeffs.items():
                A[row, index[v]] = c
            b[row] = bound
        return A, b

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for ineq in self.inequalities:
            row = {v: ineq.coeffs.get(v, 0.0) for v in self.variables}
            row.update({"sense": ineq.sense, "bound": ineq.bound, "tag": ineq.tag})
            rows.append(row)
        columns = list(self.variables) + ["sense", "bound", "tag"]
        return pd.DataFrame(rows, columns=columns)

    # ------------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------------

    def violated(
        self, point: Mapping[str, float], tol: float = MEMBERSHIP_TOL
    ) -> List[LinearInequality]:
        """Inequalities of an aux-free system that ``point`` violates."""
        if self.aux_vars:
            raise ValidationFailed(
                "direct evaluation needs an aux-free system; use lp_feasible"
            )
        values = point_values(point, self.rate_vars)
        if self.nonneg and any(values[v] < -tol for v in self.rate_vars):
            return [
                LinearInequality({v: -1.0}, 0.0, LEQ, f"nonneg[{v}]")
                for v in self.rate_vars
                if values[v] < -tol
            ]
        return [ineq for ineq in self.inequalities if ineq.violation(values) > tol]

    def contains(self, point: Mapping[str, float], tol: float = MEMBERSHIP_TOL) -> bool:
        if self.empty:
            return False
        return not self.violated(point, tol)

    # ------------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------------

    def to_json(self) -> Dict:
        return {
            "name": self.name,
            "vars": list(self.rate_vars),
            "aux": list(self.aux_vars),
            "nonneg": self.nonneg,
            "empty": self.empty,
            "ineqs": [ineq.to_json() for ineq in self.inequalities],
        }

    @classmethod
    def from_json(cls, data: Dict) -> "InequalitySystem":
        try:
            inequalities = tuple(
                LinearInequality(
                    coeffs=item["coeffs"],
                    bound=float(item["bound"]),
                    sense=item.get("sense", LEQ),
                    tag=item.get("tag", ""),
                )
                for item in data["ineqs"]
            )
            return cls(
                rate_vars=tuple(data["vars"]),
                aux_vars=tuple(data.get("aux", ())),
                inequalities=inequalities,
                nonneg=bool(data.get("nonneg", True)),
                name=data.get("name", ""),
                empty=bool(data.get("empty", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed system JSON: {exc}") from exc


@dataclass(frozen=True)
class RatePoint:
    """Nonnegative rates in bits/symbol keyed by rate variable."""

    values: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        values = {str(k): float(v) for k, v in self.values.items()}
        negative = {k: v for k, v in values.items() if v < 0}
        if negative:
            raise ValidationFailed(f"rates must be nonnegative, got {negative}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def keys(self):
        return self.values.keys()

    def items(self):
        return self.values.items()

    @classmethod
    def parse(cls, text: str, order: Sequence[str]) -> "RatePoint":
        """Parse ``"R0=0,R1=1"`` or positional ``"0,1,1"`` against ``order``."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            if parts and all("=" in p for p in parts):
                values = {
                    k.strip(): float(v) for k, v in (p.split("=", 1) for p in parts)
                }
            else:
                if len(parts) != len(order):
                    raise ParseError(
                        f"point has {len(parts)} values, expected {len(order)} for {list(order)}"
                    )
                values = dict(zip(order, (float(p) for p in parts)))
        except ValueError as exc:
            raise ParseError(f"malformed point {text!r}: {exc}") from exc
        return cls(values)


PointLike = Union[RatePoint, Mapping[str, float]]


def point_values(point: PointLike, names: Iterable[str]) -> Dict[str, float]:
    """Pull ``names`` out of a point, failing on anything missing."""
    names = list(names)
    missing = [v for v in names if v not in point]
    if missing:
        raise MissingAssignment(f"point does not assign {missing}")
    return {v: float(point[v]) for v in names}
