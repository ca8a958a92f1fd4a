# services/builders/base_builder.py

from abc import ABC, abstractmethod
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Tuple
import logging

from icregions.config.families import Family
from icregions.core.channel import AuxInputSpec, ChannelSpec, compose
from icregions.core.prob import EntropyOracle
from icregions.exceptions import FamilyMismatch
from icregions.models.system import LEQ, InequalitySystem, LinearInequality
from icregions.services.validators.factorization import ensure_valid


def other(i: int) -> int:
    """The index i' of the other user."""
    return 3 - i


class BaseRegionBuilder(ABC):
    """
    Abstract base class for region builders.

    A builder composes the input law with the channel once, then emits one
    LinearInequality per template instance. Bound constants are entropy
    expressions evaluated on the composed joint.
    """

    family: Family
    name: str = ""

    def __init__(
        self,
        spec: AuxInputSpec,
        ch: ChannelSpec,
        validate: bool = True,
        logger: Optional[logging.Logger] = None,
    ):
        if spec.family != self.family:
            raise FamilyMismatch(
                f"{type(self).__name__} needs a {self.family.value} spec, "
                f"got {spec.family.value}"
            )
        if validate:
            ensure_valid(spec)
        self.spec = spec
        self.ch = ch
        self.logger = logger or logging.getLogger(__name__)
        self.joint = compose(spec, ch)
        self.oracle = EntropyOracle(self.joint)

    @abstractmethod
    def rate_vars(self) -> Tuple[str, ...]:
        """
        Message-rate variables of the region, in output order.

        Returns:
            Tuple of rate variable names
        """
        pass

    def aux_vars(self) -> Tuple[str, ...]:
        """Auxiliary binning-rate variables; empty for closed-form regions."""
        return ()

    @abstractmethod
    def templates(self) -> Iterator[LinearInequality]:
        """
        Yield every inequality of the region for this spec and channel.

        Returns:
            Iterator of LinearInequality
        """
        pass

    def build(self) -> InequalitySystem:
        inequalities = tuple(self.templates())
        system = InequalitySystem(
            rate_vars=self.rate_vars(),
            aux_vars=self.aux_vars(),
            inequalities=inequalities,
            nonneg=True,
            name=self.name,
        )
        self.logger.debug(
            f"built {self.name}: {len(system)} inequalities over {system.variables}"
        )
        return system

    # ------------------------------------------------------------------------
    # Entropy shorthands
    # ------------------------------------------------------------------------

    def H(self, target: Iterable[str], given: Iterable[str] = ()) -> float:
        return self.oracle.H(target, given)

    def I(
        self, a: Iterable[str], b: Iterable[str], given: Iterable[str] = ()
    ) -> float:
        return self.oracle.I(a, b, given)

    @staticmethod
    def ineq(
        coeffs: Dict[str, float], bound: float, tag: str, sense: str = LEQ
    ) -> LinearInequality:
        return LinearInequality(coeffs=coeffs, bound=bound, sense=sense, tag=tag)


def rates(*terms: Tuple[str, float]) -> Dict[str, float]:
    """Accumulate (variable, coefficient) terms; repeated variables add up."""
    coeffs: Dict[str, float] = {}
    for var, coeff in terms:
        coeffs[var] = coeffs.get(var, 0.0) + coeff
    return coeffs


def unit(*names: str) -> Dict[str, float]:
    return rates(*((name, 1.0) for name in names))


def subsets(items: List[str]) -> Iterator[Tuple[str, ...]]:
    """Nonempty subsets in increasing size, lexicographic within a size."""
    for k in range(1, len(items) + 1):
        yield from combinations(items, k)
