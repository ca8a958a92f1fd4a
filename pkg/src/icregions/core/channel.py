# core/channel.py
"""
Two-user interference channels, auxiliary-input laws per region
family, and composition of the input law with the channel law.
"""

from dataclasses import dataclass, field
from typing import Dict, Sequence
import logging

import numpy as np

from icregions.config.families import (
    FAMILY_CONFIGS,
    Family,
    parse_family,
)
from icregions.core.prob import (
    JointDistribution,
    NORMALIZATION_TOL,
    _einsum_letters,
    duplicate_variable,
    extend_constant,
    random_conditional,
)
from icregions.exceptions import (
    AlphabetMismatch,
    ParseError,
    ValidationFailed,
    VariableSetMismatch,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """Conditional law W(y1, y2 | x1, x2), stored with axes (x1, x2, y1, y2)."""

    w: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 4:
            raise ValidationFailed(f"channel tensor must be 4-D, got shape {w.shape}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValidationFailed("channel probabilities must be finite and >= 0")
        rows = w.sum(axis=(2, 3))
        worst = float(np.max(np.abs(rows - 1.0)))
        if worst > NORMALIZATION_TOL:
            raise ValidationFailed(f"channel rows do not sum to 1 (off by {worst:.3g})")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def x1(self) -> int:
        return self.w.shape[0]

    @property
    def x2(self) -> int:
        return self.w.shape[1]

    @property
    def y1(self) -> int:
        return self.w.shape[2]

    @property
    def y2(self) -> int:
        return self.w.shape[3]

    def output_marginal(self, j: int) -> np.ndarray:
        """W(y_j | x1, x2) with axes (x1, x2, y_j)."""
        return self.w.sum(axis=3) if j == 1 else self.w.sum(axis=2)

    # ------------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------------

    @classmethod
    def noiseless(cls, size: int = 2) -> "ChannelSpec":
        """Y1 = X1 and Y2 = X2."""
        eye = np.eye(size)
        return cls(np.einsum("ac,bd->abcd", eye, eye))

    @classmethod
    def product(cls, w1: np.ndarray, w2: np.ndarray) -> "ChannelSpec":
        """No interference: Y1 depends on X1 only, Y2 on X2 only."""
        return cls(np.einsum("ac,bd->abcd", np.asarray(w1), np.asarray(w2)))

    @classmethod
    def from_marginals(cls, w1: np.ndarray, w2: np.ndarray) -> "ChannelSpec":
        """Outputs conditionally independent given (x1, x2); w_j has axes (x1, x2, y_j)."""
        return cls(np.einsum("abc,abd->abcd", np.asarray(w1), np.asarray(w2)))

    @classmethod
    def independent_output(
        cls, x1: int, x2: int, outputs: np.ndarray
    ) -> "ChannelSpec":
        """Outputs drawn from ``outputs`` (axes y1, y2) regardless of the inputs."""
        outputs = np.asarray(outputs, dtype=float)
        return cls(np.broadcast_to(outputs, (x1, x2) + outputs.shape))

    @classmethod
    def binary_interference(
        cls, p_noise: float = 0.0, p_cross: float = 0.1
    ) -> "ChannelSpec":
        """
        Y_i = X_i xor N_i xor (X_i' and B_i), N_i ~ Bern(p_noise), B_i ~ Bern(p_cross),
        all independent.
        """
        marginals = []
        for i in (1, 2):
            w = np.zeros((2, 2, 2))
            for x1 in range(2):
                for x2 in range(2):
                    own, other = (x1, x2) if i == 1 else (x2, x1)
                    flip = p_noise * (1 - p_cross * other) + (1 - p_noise) * (
                        p_cross * other
                    )
                    w[x1, x2, own] += 1 - flip
                    w[x1, x2, 1 - own] += flip
            marginals.append(w)
        return cls.from_marginals(*marginals)

    @classmethod
    def random(
        cls,
        x1: int,
        x2: int,
        y1: int,
        y2: int,
        rng: np.random.Generator,
        concentration: float = 1.0,
    ) -> "ChannelSpec":
        """A Dirichlet-drawn joint output law for every input pair."""
        table = random_conditional((x1, x2), y1 * y2, rng, concentration)
        return cls(table.reshape(x1, x2, y1, y2))

    @classmethod
    def from_json(cls, data: Dict) -> "ChannelSpec":
        try:
            shape = (int(data["x1"]), int(data["x2"]), int(data["y1"]), int(data["y2"]))
            w = np.asarray(data["w"], dtype=float).reshape(shape)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed channel JSON: {exc}") from exc
        return cls(w)

    def to_json(self) -> Dict:
        return {
            "x1": self.x1,
            "x2": self.x2,
            "y1": self.y1,
            "y2": self.y2,
            "w": self.w.ravel().tolist(),
        }


@dataclass(frozen=True, eq=False)
class AuxInputSpec:
    """A family tag plus the joint law of its auxiliaries and channel inputs."""

    family: Family
    dist: JointDistribution

    def __post_init__(self):
        family = parse_family(self.family)
        expected = FAMILY_CONFIGS[family]["variables"]
        if sorted(self.dist.names) != sorted(expected):
            raise VariableSetMismatch(
                f"{family.value} needs variables {expected}, got {list(self.dist.names)}"
            )
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "dist", self.dist.reorder(expected))

    @classmethod
    def from_json(cls, data: Dict) -> "AuxInputSpec":
        try:
            family = data["family"]
            dist = data["dist"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed input JSON: {exc}") from exc
        return cls(parse_family(family), JointDistribution.from_json(dist))

    def to_json(self) -> Dict:
        return {"family": self.family.value, "dist": self.dist.to_json()}


# ============================================================================
# Composition
# ============================================================================


def compose(spec: AuxInputSpec, ch: ChannelSpec) -> JointDistribution:
    """Joint over the spec's variables plus Y1, Y2."""
    dist = spec.dist
    for name, size in (("X1", ch.x1), ("X2", ch.x2)):
        if dist.size_of(name) != size:
            raise AlphabetMismatch(
                f"{name} has alphabet {dist.size_of(name)} in the input law "
                f"but {size} in the channel"
            )
    letters = _einsum_letters(len(dist.vars) + 2)
    src = letters[: len(dist.vars)]
    y1, y2 = letters[-2], letters[-1]
    w_sub = src[dist.axis("X1")] + src[dist.axis("X2")] + y1 + y2
    probs = np.einsum(f"{src},{w_sub}->{src}{y1}{y2}", dist.probs, ch.w)
    vars_ = dist.vars + (("Y1", ch.y1), ("Y2", ch.y2))
    return JointDistribution.normalized(vars_, probs)


# ============================================================================
# Structural constructors
# ============================================================================


def build_from_factors(
    family: Family,
    sizes: Dict[str, int],
    rng: np.random.Generator,
    concentration: float = 1.0,
) -> AuxInputSpec:
    """
    Sample each factor of the family's joint law at random, so the result
    satisfies the family's factorization by construction.

    Args:
        family: Region family
        sizes: Alphabet size per variable of the family (missing entries default to 2)
        rng: Random generator
        concentration: Dirichlet concentration of every sampled table

    Returns:
        A valid AuxInputSpec
    """
    family = parse_family(family)
    config = FAMILY_CONFIGS[family]
    size = {name: int(sizes.get(name, 2)) for name in config["variables"]}
    vars_ = [(name, size[name]) for name in config["variables"]]

    shared = config["time_sharing"]
    factors = []
    shared_shape = tuple(size[name] for name in shared)
    shared_table = rng.gamma(concentration, size=shared_shape) + 1e-12
    factors.append((shared, shared_table / shared_table.sum()))

    for i, branch in config["branches"].items():
        split = config["split_pairs"].get(i)
        deterministic = config["deterministic_inputs"].get(i)
        parents = list(shared)
        for name in branch:
            if deterministic and name == f"X{i}":
                table = _deterministic_table(
                    [size[p] for p in deterministic], size[name], rng
                )
                factors.append((deterministic + [name], table))
                continue
            # split pairs are drawn independently given the shared variables
            cond_parents = list(shared) if split and name == split[1] else parents
            table = random_conditional(
                tuple(size[p] for p in cond_parents), size[name], rng, concentration
            )
            factors.append((cond_parents + [name], table))
            parents = parents + [name]

    dist = JointDistribution.from_factors(vars_, factors)
    return AuxInputSpec(family, dist)


def _deterministic_table(
    parent_sizes: Sequence[int], child_size: int, rng: np.random.Generator
) -> np.ndarray:
    choice = rng.integers(0, child_size, size=tuple(parent_sizes))
    return np.eye(child_size)[choice]


def degenerate_spec(family: Family, size: int = 2) -> AuxInputSpec:
    """
    Uniform independent inputs with trivial auxiliaries: every time-sharing and
    common variable is constant, private variables equal the channel inputs.
    """
    family = parse_family(family)
    x = JointDistribution.uniform([("X1", size), ("X2", size)])
    if family == Family.CMG:
        dist = extend_constant(x, ["U0", "U1", "U2"])
    elif family == Family.HK:
        dist = duplicate_variable(x, "X1", "U11")
        dist = duplicate_variable(dist, "X2", "U22")
        dist = extend_constant(dist, ["U0", "U10", "U20"])
    else:
        dist = duplicate_variable(x, "X1", "Z11")
        dist = duplicate_variable(dist, "X2", "Z22")
        dist = extend_constant(dist, ["Z00", "Z10", "Z20"])
        if family == Family.CRNG_FULL:
            dist = extend_constant(dist, ["Z01", "Z02", "Z12", "Z21"])
    return AuxInputSpec(family, dist)
