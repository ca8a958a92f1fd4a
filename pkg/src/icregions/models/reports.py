# models/reports.py
"""
Result records of the comparison, simulation and hash-census workflows.
Tabular parts are pandas DataFrames so every report can go to CSV or JSON.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional
import math

import pandas as pd
from scipy.stats import norm

from icregions.exceptions import ValidationFailed


@dataclass
class ComparisonReport:
    """Support and membership cross-check of two regions over the same rates."""

    name_a: str
    name_b: str
    variables: List[str]
    seed: Optional[int]
    supports: pd.DataFrame
    memberships: pd.DataFrame
    witnesses_a_only: List[Dict[str, float]] = field(default_factory=list)
    witnesses_b_only: List[Dict[str, float]] = field(default_factory=list)

    @property
    def max_support_gap(self) -> float:
        if self.supports.empty:
            return 0.0
        return float(self.supports["gap"].abs().max())

    @property
    def a_only(self) -> int:
        if self.memberships.empty:
            return 0
        return int((self.memberships["in_a"] & ~self.memberships["in_b"]).sum())

    @property
    def b_only(self) -> int:
        if self.memberships.empty:
            return 0
        return int((~self.memberships["in_a"] & self.memberships["in_b"]).sum())

    def summary(self) -> Dict:
        return {
            "a": self.name_a,
            "b": self.name_b,
            "variables": list(self.variables),
            "seed": self.seed,
            "directions": len(self.supports),
            "points": len(self.memberships),
            "max_support_gap": self.max_support_gap,
            "a_only": self.a_only,
            "b_only": self.b_only,
            "witnesses_a_only": self.witnesses_a_only,
            "witnesses_b_only": self.witnesses_b_only,
        }

    def to_json(self) -> Dict:
        data = self.summary()
        data["supports"] = self.supports.to_dict(orient="records")
        data["memberships"] = self.memberships.to_dict(orient="records")
        return data


@dataclass(frozen=True)
class SimResult:
    """
    Outcome of a batch of independent coding trials.

    A trial fails when an encoding stage reports an empty coset, a decoder's
    coset is empty, or any decoded message differs from the one sent.
    """

    trials: int
    errors: int
    encoder_errors: int = 0
    decoder_errors: int = 0
    seed: Optional[int] = None
    confidence: float = 0.95

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationFailed(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.errors <= self.trials:
            raise ValidationFailed(f"errors {self.errors} outside [0, {self.trials}]")
        if self.encoder_errors + self.decoder_errors > self.errors:
            raise ValidationFailed("stage failures exceed the failed-trial count")

    @property
    def estimate(self) -> float:
        return self.errors / self.trials

    @property
    def half_width(self) -> float:
        """Normal-approximation binomial half-width at ``confidence``."""
        z = norm.ppf(0.5 + self.confidence / 2)
        p = self.estimate
        return float(z * math.sqrt(p * (1 - p) / self.trials))

    @property
    def std_error(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials)

    def merge(self, other: "SimResult") -> "SimResult":
        """Pool two batches; the first seed is kept."""
        return SimResult(
            trials=self.trials + other.trials,
            errors=self.errors + other.errors,
            encoder_errors=self.encoder_errors + other.encoder_errors,
            decoder_errors=self.decoder_errors + other.decoder_errors,
            seed=self.seed,
            confidence=self.confidence,
        )

    def to_json(self) -> Dict:
        return {
            "trials": self.trials,
            "errors": self.errors,
            "encoder_errors": self.encoder_errors,
            "decoder_errors": self.decoder_errors,
            "estimate": self.estimate,
            "half_width": self.half_width,
            "confidence": self.confidence,
            "seed": self.seed,
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([self.to_json()])


@dataclass
class HashProfile:
    """
    Collision census of a hash ensemble: per input-pair collision rates relative
    to q^-l, summarized as (alpha_hat, beta_hat).
    """

    mode: str
    n: int
    l: int
    q: int
    samples: int
    seed: Optional[int]
    exact: bool
    alpha_hat: float
    beta_hat: float
    pairs: pd.DataFrame
    composition: Optional[Dict[str, float]] = None

    @property
    def worst_ratio(self) -> float:
        if self.pairs.empty:
            return 0.0
        return float(self.pairs["ratio"].max())

    def to_json(self) -> Dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "l": self.l,
            "q": self.q,
            "samples": self.samples,
            "seed": self.seed,
            "exact": self.exact,
            "alpha_hat": self.alpha_hat,
            "beta_hat": self.beta_hat,
            "worst_ratio": self.worst_ratio,
            "composition": self.composition,
        }
