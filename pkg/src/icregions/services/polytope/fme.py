# services/polytope/fme.py
"""
Fourier-Motzkin projection of inequality systems, with duplicate and
dominated-row removal after each round and optional LP redundancy pruning.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from icregions.exceptions import BlowupCapExceeded, UnknownVariable
from icregions.models.system import LEQ, InequalitySystem, LinearInequality
from icregions.services.polytope.lp import relaxed_optimum

logger = logging.getLogger(__name__)

FM_CAP = 20000
FM_TOL = 1e-9
COEFF_ZERO = 1e-12
ROUND_DECIMALS = 10


class _RowSet:
    """Rows A x <= b over a fixed column order, each scaled to max |a| = 1."""

    def __init__(self, columns: Sequence[str], A: np.ndarray, b: np.ndarray, tags: List[str]):
        self.columns = list(columns)
        self.A = A
        self.b = b
        self.tags = tags
        self.contradiction = False

    def __len__(self) -> int:
        return len(self.b)

    def normalize(self, tol: float) -> None:
        A = np.where(np.abs(self.A) < COEFF_ZERO, 0.0, self.A)
        scale = np.abs(A).max(axis=1) if A.shape[1] else np.zeros(len(self.b))
        constant = scale == 0
        if np.any(self.b[constant] < -tol):
            self.contradiction = True
        keep = ~constant
        self.A = A[keep] / scale[keep, None]
        self.b = self.b[keep] / scale[keep]
        self.tags = [t for t, k in zip(self.tags, keep) if k]

    def deduplicate(self) -> None:
        """Keep the tightest bound among rows with the same normalized left side."""
        best: Dict[Tuple[float, ...], int] = {}
        for k, row in enumerate(np.round(self.A, ROUND_DECIMALS)):
            key = tuple(row.tolist())
            if key not in best or self.b[k] < self.b[best[key]]:
                best[key] = k
        keep = sorted(best.values())
        self.A = self.A[keep]
        self.b = self.b[keep]
        self.tags = [self.tags[k] for k in keep]

    def drop(self, keep: np.ndarray) -> None:
        self.A = self.A[keep]
        self.b = self.b[keep]
        self.tags = [t for t, k in zip(self.tags, keep) if k]


def _rows_from_system(system: InequalitySystem, extra_nonneg: Iterable[str]) -> _RowSet:
    A, b = system.to_matrix()
    tags = list(system.tags)
    columns = list(system.variables)
    extra = list(extra_nonneg)
    if extra:
        nonneg = np.zeros((len(extra), len(columns)))
        for row, v in enumerate(extra):
            nonneg[row, columns.index(v)] = -1.0
        A = np.vstack([A, nonneg])
        b = np.concatenate([b, np.zeros(len(extra))])
        tags += [f"nonneg[{v}]" for v in extra]
    return _RowSet(columns, A, b, tags)


def _pick_variable(rows: _RowSet, pending: List[str]) -> str:
    """Greedy order: the variable whose elimination creates the fewest rows."""

    def growth(v: str) -> int:
        col = rows.A[:, rows.columns.index(v)]
        pos, neg = int(np.sum(col > 0)), int(np.sum(col < 0))
        return pos * neg - pos - neg

    return min(pending, key=lambda v: (growth(v), pending.index(v)))


def _eliminate_one(rows: _RowSet, var: str, cap: int) -> None:
    j = rows.columns.index(var)
    col = rows.A[:, j]
    pos, neg, zero = np.where(col > 0)[0], np.where(col < 0)[0], np.where(col == 0)[0]
    produced = len(zero) + len(pos) * len(neg)
    if produced > cap:
        raise BlowupCapExceeded(
            f"eliminating {var} would produce {produced} inequalities (cap {cap})"
        )

    new_A = [rows.A[zero]]
    new_b = [rows.b[zero]]
    new_tags = [rows.tags[k] for k in zero]
    if len(pos) and len(neg):
        # a_p[j] > 0 and a_n[j] < 0: -a_n[j] * row_p + a_p[j] * row_n cancels column j
        wp = -col[neg][None, :, None]
        wn = col[pos][:, None, None]
        combined = wp * rows.A[pos][:, None, :] + wn * rows.A[neg][None, :, :]
        bounds = wp[..., 0] * rows.b[pos][:, None] + wn[..., 0] * rows.b[neg][None, :]
        combined = combined.reshape(-1, rows.A.shape[1])
        combined[:, j] = 0.0
        new_A.append(combined)
        new_b.append(bounds.reshape(-1))
        new_tags += [f"fm[{var}]" for _ in range(len(combined))]

    rows.A = np.vstack(new_A)
    rows.b = np.concatenate(new_b)
    rows.tags = new_tags
    rows.A[:, j] = 0.0


def _prune_rows(rows: _RowSet, bounds: List[Tuple[Optional[float], Optional[float]]], tol: float) -> int:
    """
    Drop rows implied by the others: row k is redundant when the maximum of
    a_k . x with row k relaxed by 1 stays within b_k.
    """
    keep = np.ones(len(rows), dtype=bool)
    for k in range(len(rows)):
        keep[k] = False
        others = np.where(keep)[0]
        relaxed_A = np.vstack([rows.A[others], rows.A[k : k + 1]])
        relaxed_b = np.concatenate([rows.b[others], [rows.b[k] + 1.0]])
        optimum = relaxed_optimum(relaxed_A, relaxed_b, rows.A[k], bounds)
        if optimum is None or optimum > rows.b[k] + tol:
            keep[k] = True
    removed = int(np.sum(~keep))
    rows.drop(keep)
    return removed


def _to_system(
    rows: _RowSet, template: InequalitySystem, eliminated: Sequence[str], name: str
) -> InequalitySystem:
    if rows.contradiction:
        return template.replace(
            rate_vars=tuple(v for v in template.rate_vars if v not in eliminated),
            aux_vars=tuple(v for v in template.aux_vars if v not in eliminated),
            inequalities=(),
            empty=True,
            name=name,
        )
    inequalities = []
    for row, bound, tag in zip(rows.A, rows.b, rows.tags):
        coeffs = {
            v: float(c)
            for v, c in zip(rows.columns, row)
            if v not in eliminated and abs(c) >= COEFF_ZERO
        }
        inequalities.append(LinearInequality(coeffs, float(bound), LEQ, tag))
    return InequalitySystem(
        rate_vars=[v for v in template.rate_vars if v not in eliminated],
        aux_vars=[v for v in template.aux_vars if v not in eliminated],
        inequalities=inequalities,
        nonneg=template.nonneg,
        name=name,
    )


# ============================================================================
# Operations
# ============================================================================


def fm_eliminate(
    system: InequalitySystem,
    vars: Sequence[str],
    prune: bool = False,
    cap: int = FM_CAP,
    tol: float = FM_TOL,
) -> InequalitySystem:
    """
    Project ``vars`` out of ``system``.

    The nonnegativity of eliminated variables becomes explicit rows before
    elimination; the remaining variables keep it implicitly through the
    ``nonneg`` flag of the result. A row reduced to 0 <= b with b < -tol marks
    the result empty.

    Args:
        system: System to project
        vars: Variables to eliminate
        prune: Remove LP-redundant rows after every round
        cap: Largest number of rows any round may produce
        tol: Tolerance on constant rows and on redundancy tests

    Returns:
        System over the remaining variables
    """
    vars = list(dict.fromkeys(vars))
    unknown = [v for v in vars if v not in system.variables]
    if unknown:
        raise UnknownVariable(f"cannot eliminate undeclared {unknown}")
    name = f"{system.name}|elim" if system.name else "elim"
    if not vars:
        return system

    # variables absent from every row project away without touching the rows
    used = {v for ineq in system.inequalities for v in ineq.coeffs}
    if not used.intersection(vars):
        return system.replace(
            rate_vars=tuple(v for v in system.rate_vars if v not in vars),
            aux_vars=tuple(v for v in system.aux_vars if v not in vars),
        )
    if system.empty:
        return _to_system(_contradiction(system), system, vars, name)

    rows = _rows_from_system(system, vars if system.nonneg else [])
    rows.normalize(tol)
    rows.deduplicate()
    logger.debug(f"fm start: {len(rows)} rows, eliminating {vars}")

    pending = list(vars)
    while pending and not rows.contradiction:
        var = _pick_variable(rows, pending)
        pending.remove(var)
        _eliminate_one(rows, var, cap)
        rows.normalize(tol)
        rows.deduplicate()
        if prune and len(rows) and not rows.contradiction:
            removed = _prune_rows(rows, _bounds(rows.columns, system, pending, vars), tol)
            logger.debug(f"fm pruned {removed} rows")
        logger.debug(f"fm eliminated {var}: {len(rows)} rows remain")

    result = _to_system(rows, system, vars, name)
    logger.info(f"fm_eliminate {system.name or 'system'}: {len(system)} -> {len(result)} inequalities")
    return result


def _contradiction(system: InequalitySystem) -> _RowSet:
    rows = _RowSet(system.variables, np.zeros((0, len(system.variables))), np.zeros(0), [])
    rows.contradiction = True
    return rows


def _bounds(
    columns: Sequence[str],
    system: InequalitySystem,
    pending: Sequence[str],
    eliminated: Sequence[str],
) -> List[Tuple[Optional[float], Optional[float]]]:
    """Pending variables carry explicit nonnegativity rows; survivors use bounds."""
    bounds = []
    for v in columns:
        if v in eliminated:
            bounds.append((0.0, 0.0) if v not in pending else (None, None))
        elif system.nonneg:
            bounds.append((0.0, None))
        else:
            bounds.append((None, None))
    return bounds


def prune_redundant(system: InequalitySystem, tol: float = FM_TOL) -> InequalitySystem:
    """Remove every inequality implied by the others (and nonnegativity)."""
    if system.empty or not len(system):
        return system
    rows = _rows_from_system(system, [])
    rows.normalize(tol)
    if rows.contradiction:
        return _to_system(rows, system, [], system.name)
    rows.deduplicate()
    bounds = [(0.0, None) if system.nonneg else (None, None)] * len(rows.columns)
    removed = _prune_rows(rows, bounds, tol)
    logger.debug(f"pruned {removed} of {len(system)} inequalities from {system.name or 'system'}")
    return _to_system(rows, system, [], system.name)


def eliminate_aux(
    system: InequalitySystem, prune: bool = True, cap: int = FM_CAP
) -> InequalitySystem:
    """Project out every auxiliary (binning-rate) variable."""
    return fm_eliminate(system, system.aux_vars, prune=prune, cap=cap)
