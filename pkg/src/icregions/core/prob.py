# core/prob.py
"""
Finite joint distributions over named variables, with entropy and mutual
information in bits.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging
import string

import numpy as np
from scipy.stats import entropy as _scipy_entropy

from icregions.exceptions import (
    EmptySelection,
    OverlappingSets,
    ParseError,
    StateSpaceTooLarge,
    UnknownVariable,
    ValidationFailed,
)

logger = logging.getLogger(__name__)

STATE_CAP = 2**26
NORMALIZATION_TOL = 1e-12
CLAMP_TOL = 1e-12

VarSpec = Tuple[str, int]


def _einsum_letters(count: int) -> str:
    letters = string.ascii_letters
    if count > len(letters):
        raise StateSpaceTooLarge(f"too many variables for one tensor: {count}")
    return letters[:count]


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """
    Dense probability tensor over an ordered list of named finite variables.

    Axis k of ``probs`` is indexed by the alphabet of ``vars[k]``.
    """

    vars: Tuple[VarSpec, ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        vars_ = tuple((str(name), int(size)) for name, size in self.vars)
        names = [name for name, _ in vars_]

        if not vars_:
            raise ValidationFailed("a distribution needs at least one variable")
        if any(not name for name in names):
            raise ValidationFailed("variable names must be nonempty")
        if len(set(names)) != len(names):
            raise ValidationFailed(f"duplicate variable names in {names}")
        if any(size < 1 for _, size in vars_):
            raise ValidationFailed(f"alphabet sizes must be >= 1, got {vars_}")

        shape = tuple(size for _, size in vars_)
        cells = int(np.prod(shape, dtype=np.int64))
        if cells > STATE_CAP:
            raise StateSpaceTooLarge(
                f"state space of {cells} cells exceeds cap {STATE_CAP}"
            )

        probs = np.asarray(self.probs, dtype=float)
        if probs.size != cells:
            raise ValidationFailed(
                f"tensor has {probs.size} entries, expected {cells} for {shape}"
            )
        probs = probs.reshape(shape).copy()
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValidationFailed("probabilities must be finite and nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValidationFailed(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)

        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "probs", probs)

    # ------------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------------

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.vars)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(size for _, size in self.vars)

    def size_of(self, name: str) -> int:
        return self.vars[self.axis(name)][1]

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}; have {self.names}")

    def check_known(self, names: Iterable[str]) -> None:
        missing = [name for name in names if name not in self.names]
        if missing:
            raise UnknownVariable(f"unknown variables {missing}; have {self.names}")

    # ------------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------------

    @classmethod
    def normalized(cls, vars: Sequence[VarSpec], weights) -> "JointDistribution":
        """Build a distribution from nonnegative weights, rescaling to sum 1."""
        weights = np.asarray(weights, dtype=float)
        total = weights.sum()
        if total <= 0:
            raise ValidationFailed("weights have no positive mass")
        return cls(tuple(vars), weights / total)

    @classmethod
    def uniform(cls, vars: Sequence[VarSpec]) -> "JointDistribution":
        shape = tuple(size for _, size in vars)
        cells = int(np.prod(shape, dtype=np.int64))
        return cls(tuple(vars), np.full(shape, 1.0 / cells))

    @classmethod
    def product(cls, *dists: "JointDistribution") -> "JointDistribution":
        """Independent product; variable order is the concatenation."""
        vars_: List[VarSpec] = []
        probs = np.ones(())
        for dist in dists:
            vars_.extend(dist.vars)
            probs = np.multiply.outer(probs, dist.probs)
        return cls.normalized(vars_, probs)

    @classmethod
    def from_factors(
        cls,
        vars: Sequence[VarSpec],
        factors: Sequence[Tuple[Sequence[str], np.ndarray]],
    ) -> "JointDistribution":
        """
        Multiply conditional tables into a joint.

        Args:
            vars: Output variable order with alphabet sizes
            factors: (names, table) pairs; ``table`` has one axis per name,
                in that order. The caller supplies properly conditional tables
                (marginal, then conditionals given earlier variables).

        Returns:
            The joint distribution over ``vars``
        """
        names = [name for name, _ in vars]
        letters = dict(zip(names, _einsum_letters(len(names))))
        operands = []
        subscripts = []
        for factor_names, table in factors:
            unknown = [name for name in factor_names if name not in letters]
            if unknown:
                raise UnknownVariable(f"factor over unknown variables {unknown}")
            operands.append(np.asarray(table, dtype=float))
            subscripts.append("".join(letters[name] for name in factor_names))
        covered = {name for factor_names, _ in factors for name in factor_names}
        for name, size in vars:
            if name not in covered:
                operands.append(np.full(size, 1.0 / size))
                subscripts.append(letters[name])
        expr = ",".join(subscripts) + "->" + "".join(letters[n] for n in names)
        return cls.normalized(vars, np.einsum(expr, *operands))

    @classmethod
    def from_json(cls, data: Dict) -> "JointDistribution":
        try:
            vars_ = [(str(v["name"]), int(v["size"])) for v in data["vars"]]
            probs = np.asarray(data["probs"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed distribution JSON: {exc}") from exc
        return cls(tuple(vars_), probs)

    def to_json(self) -> Dict:
        return {
            "vars": [{"name": name, "size": size} for name, size in self.vars],
            "probs": self.probs.ravel().tolist(),
        }

    # ------------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------------

    def marginal(self, keep: Iterable[str]) -> "JointDistribution":
        return marginal(self, keep)

    def reorder(self, order: Sequence[str]) -> "JointDistribution":
        if sorted(order) != sorted(self.names):
            raise UnknownVariable(f"reorder {list(order)} does not match {self.names}")
        axes = [self.axis(name) for name in order]
        vars_ = tuple(self.vars[a] for a in axes)
        return JointDistribution(vars_, np.transpose(self.probs, axes))

    def rename(self, mapping: Dict[str, str]) -> "JointDistribution":
        vars_ = tuple((mapping.get(name, name), size) for name, size in self.vars)
        return JointDistribution(vars_, self.probs)


# ============================================================================
# Core operations
# ============================================================================


def marginal(dist: JointDistribution, keep: Iterable[str]) -> JointDistribution:
    keep = set(keep)
    if not keep:
        raise EmptySelection("marginal needs a nonempty variable set")
    dist.check_known(keep)
    drop = tuple(k for k, name in enumerate(dist.names) if name not in keep)
    vars_ = tuple(v for v in dist.vars if v[0] in keep)
    probs = dist.probs.sum(axis=drop) if drop else dist.probs
    return JointDistribution.normalized(vars_, probs)


@dataclass(frozen=True, init=False)
class EntropyQuery:
    target: frozenset
    given: frozenset = frozenset()

    def __init__(self, target: Iterable[str], given: Iterable[str] = ()):
        object.__setattr__(self, "target", frozenset(target))
        object.__setattr__(self, "given", frozenset(given))

    def validate(self, dist: JointDistribution) -> None:
        if not self.target:
            raise EmptySelection("entropy target must be nonempty")
        overlap = self.target & self.given
        if overlap:
            raise OverlappingSets(f"target and given share {sorted(overlap)}")
        dist.check_known(self.target | self.given)


def _joint_entropy(dist: JointDistribution, names: frozenset) -> float:
    if not names:
        return 0.0
    drop = tuple(k for k, name in enumerate(dist.names) if name not in names)
    p = dist.probs.sum(axis=drop) if drop else dist.probs
    return float(_scipy_entropy(p.ravel(), base=2))


def _clamped(value: float) -> float:
    return 0.0 if -CLAMP_TOL <= value < 0 else value


def entropy(dist: JointDistribution, q: EntropyQuery) -> float:
    """H(target | given) in bits."""
    q.validate(dist)
    value = _joint_entropy(dist, q.target | q.given) - _joint_entropy(dist, q.given)
    return max(value, 0.0)


def mutual_info(
    dist: JointDistribution,
    a: Iterable[str],
    b: Iterable[str],
    given: Iterable[str] = (),
) -> float:
    """I(a; b | given) in bits; rounding noise within CLAMP_TOL below 0 reads as 0."""
    a, b, given = frozenset(a), frozenset(b), frozenset(given)
    if not a or not b:
        raise EmptySelection("mutual information needs nonempty a and b")
    for left, right in ((a, b), (a, given), (b, given)):
        if left & right:
            raise OverlappingSets(f"sets overlap on {sorted(left & right)}")
    dist.check_known(a | b | given)
    value = (
        _joint_entropy(dist, a | given)
        + _joint_entropy(dist, b | given)
        - _joint_entropy(dist, a | b | given)
        - _joint_entropy(dist, given)
    )
    return _clamped(value)


class EntropyOracle:
    """
    Memoizing evaluator of entropies on one distribution. Region builders ask
    for many overlapping subsets; each joint entropy is computed once.
    """

    def __init__(self, dist: JointDistribution):
        self.dist = dist
        self._cache: Dict[frozenset, float] = {}

    def joint(self, names: Iterable[str]) -> float:
        key = frozenset(names)
        if key not in self._cache:
            self.dist.check_known(key)
            self._cache[key] = _joint_entropy(self.dist, key)
        return self._cache[key]

    def H(self, target: Iterable[str], given: Iterable[str] = ()) -> float:
        target, given = frozenset(target), frozenset(given)
        return max(self.joint(target | given) - self.joint(given), 0.0)

    def I(
        self, a: Iterable[str], b: Iterable[str], given: Iterable[str] = ()
    ) -> float:
        a, b, given = frozenset(a), frozenset(b), frozenset(given)
        value = (
            self.joint(a | given)
            + self.joint(b | given)
            - self.joint(a | b | given)
            - self.joint(given)
        )
        return _clamped(value)


# ============================================================================
# Structural helpers
# ============================================================================


def duplicate_variable(
    dist: JointDistribution, source: str, new_name: str, after: Optional[str] = None
) -> JointDistribution:
    """Add ``new_name`` as an exact copy of ``source``, placed after ``after``."""
    if new_name in dist.names:
        raise ValidationFailed(f"variable {new_name!r} already present")
    axis = dist.axis(source)
    size = dist.size_of(source)
    letters = _einsum_letters(len(dist.vars) + 1)
    src = letters[: len(dist.vars)]
    new_letter = letters[-1]
    expr = f"{src},{src[axis]}{new_letter}->{src}{new_letter}"
    probs = np.einsum(expr, dist.probs, np.eye(size))
    extended = JointDistribution.normalized(dist.vars + ((new_name, size),), probs)

    order = list(dist.names)
    anchor = order.index(after) if after is not None else axis
    order.insert(anchor + 1, new_name)
    return extended.reorder(order)


def extend_constant(
    dist: JointDistribution, names: Sequence[str], order: Optional[Sequence[str]] = None
) -> JointDistribution:
    """Add size-1 variables; optionally reorder the result."""
    vars_ = dist.vars + tuple((name, 1) for name in names)
    probs = dist.probs.reshape(dist.sizes + (1,) * len(names))
    extended = JointDistribution(vars_, probs)
    return extended.reorder(order) if order is not None else extended


def random_distribution(
    vars: Sequence[VarSpec],
    rng: np.random.Generator,
    concentration: float = 1.0,
    zero_fraction: float = 0.0,
) -> JointDistribution:
    """Dirichlet-distributed joint; ``zero_fraction`` of cells forced to 0."""
    shape = tuple(size for _, size in vars)
    weights = rng.gamma(concentration, size=shape)
    if zero_fraction > 0:
        mask = rng.random(shape) < zero_fraction
        if not mask.all():
            weights = np.where(mask, 0.0, weights)
    return JointDistribution.normalized(vars, weights)


def random_conditional(
    parent_shape: Tuple[int, ...],
    child_size: int,
    rng: np.random.Generator,
    concentration: float = 1.0,
) -> np.ndarray:
    """Random table p(child | parents), last axis sums to 1."""
    weights = rng.gamma(concentration, size=parent_shape + (child_size,))
    weights = weights + 1e-12
    return weights / weights.sum(axis=-1, keepdims=True)
