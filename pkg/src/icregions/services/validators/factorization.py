# services/validators/factorization.py

from dataclasses import dataclass, field
from typing import Dict, List, Optional
import logging

from icregions.config.families import FAMILY_CONFIGS
from icregions.core.channel import AuxInputSpec
from icregions.core.prob import EntropyOracle
from icregions.exceptions import ValidationFailed, VariableSetMismatch

FACTORIZATION_TOL = 1e-9


@dataclass
class FactorizationReport:
    """Outcome of the numeric factorization checks for one input spec."""

    family: str
    checks: Dict[str, float] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    tol: float = FACTORIZATION_TOL

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> Dict:
        return {
            "family": self.family,
            "passed": self.passed,
            "checks": dict(self.checks),
            "failures": list(self.failures),
        }


class FactorizationValidator:
    """
    Checks the conditional independences that define each family's joint law.

    Every check is a mutual information (or conditional entropy, for the
    deterministic HK encoders) that must vanish within ``tol``.
    """

    def __init__(
        self, tol: float = FACTORIZATION_TOL, logger: Optional[logging.Logger] = None
    ):
        self.tol = tol
        self.logger = logger or logging.getLogger(__name__)

    def validate(self, spec: AuxInputSpec) -> FactorizationReport:
        config = FAMILY_CONFIGS[spec.family]
        if sorted(spec.dist.names) != sorted(config["variables"]):
            raise VariableSetMismatch(
                f"{spec.family.value} needs {config['variables']}, got {spec.dist.names}"
            )

        oracle = EntropyOracle(spec.dist)
        report = FactorizationReport(family=spec.family.value, tol=self.tol)
        shared = config["time_sharing"]
        branch1, branch2 = config["branches"][1], config["branches"][2]

        label = f"I({','.join(branch1)};{','.join(branch2)}|{','.join(shared)})"
        report.checks[label] = oracle.I(branch1, branch2, shared)

        for i, (a, b) in config["split_pairs"].items():
            report.checks[f"I({a};{b}|{','.join(shared)})"] = oracle.I([a], [b], shared)

        for i, parents in config["deterministic_inputs"].items():
            report.checks[f"H(X{i}|{','.join(parents)})"] = oracle.H([f"X{i}"], parents)

        for label, value in report.checks.items():
            if value > self.tol:
                report.failures.append(label)

        if report.failures:
            self.logger.warning(
                f"{spec.family.value} factorization failed: "
                + ", ".join(f"{k}={report.checks[k]:.3g}" for k in report.failures)
            )
        return report


def validate_factorization(
    spec: AuxInputSpec, tol: float = FACTORIZATION_TOL
) -> FactorizationReport:
    return FactorizationValidator(tol).validate(spec)


def ensure_valid(spec: AuxInputSpec, tol: float = FACTORIZATION_TOL) -> None:
    report = validate_factorization(spec, tol)
    if not report.passed:
        details = ", ".join(f"{k}={report.checks[k]:.3g}" for k in report.failures)
        raise ValidationFailed(
            f"{spec.family.value} input law violates its factorization: {details}"
        )
