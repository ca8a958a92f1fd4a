# /icregions/defs/resources.py
"""
Dagster resources carrying solver tolerances, enumeration caps and
experiment sizes. Every default can be overridden from the environment.
"""
from typing import List
import os

from dagster import ConfigurableResource

from icregions.exceptions import ValidationFailed

HARD_STATE_CAP = 2**30
HARD_FM_CAP = 10**6


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


def _env_bool(name: str, default: bool) -> bool:
    return os.getenv(name, str(default)).strip().lower() in ("1", "true", "yes")


class SolverConfigResource(ConfigurableResource):
    """Tolerances and caps shared by the region and codec services"""

    membership_tol: float = _env_float("ICREGIONS_MEMBERSHIP_TOL", 1e-9)
    agreement_tol: float = _env_float("ICREGIONS_AGREEMENT_TOL", 1e-7)
    support_tol: float = _env_float("ICREGIONS_SUPPORT_TOL", 1e-8)
    tie_tol: float = _env_float("ICREGIONS_TIE_TOL", 1e-9)

    # Enumeration caps
    block_space_cap: int = _env_int("ICREGIONS_BLOCK_SPACE_CAP", 2**24)
    exact_state_cap: int = _env_int("ICREGIONS_EXACT_STATE_CAP", 2**26)
    fm_cap: int = _env_int("ICREGIONS_FM_CAP", 20000)

    fm_prune: bool = _env_bool("ICREGIONS_FM_PRUNE", True)

    def checked(self) -> "SolverConfigResource":
        """Reject caps above the hard limits."""
        for name in ("block_space_cap", "exact_state_cap"):
            if getattr(self, name) > HARD_STATE_CAP:
                raise ValidationFailed(f"{name} {getattr(self, name)} exceeds hard limit {HARD_STATE_CAP}")
        if self.fm_cap > HARD_FM_CAP:
            raise ValidationFailed(f"fm_cap {self.fm_cap} exceeds hard limit {HARD_FM_CAP}")
        return self


class ExperimentConfigResource(ConfigurableResource):
    """Sizes and seeds of the batch acceptance experiments"""

    seed: int = _env_int("ICREGIONS_SEED", 20240601)

    # Region experiments
    specs_per_experiment: int = _env_int("ICREGIONS_SPECS", 20)
    points_per_spec: int = _env_int("ICREGIONS_POINTS", 500)
    inclusion_specs: int = _env_int("ICREGIONS_INCLUSION_SPECS", 10)
    inclusion_points: int = _env_int("ICREGIONS_INCLUSION_POINTS", 50)
    alphabet_sizes: List[int] = [2, 3]
    lift_qbits: int = 1
    sweep_angles: int = 64

    # Codec experiments
    trials: int = _env_int("ICREGIONS_TRIALS", 2000)
    seeds_per_length: int = _env_int("ICREGIONS_SEEDS_PER_LENGTH", 10)
    p_noise: float = 0.0
    p_cross: float = 0.02
    rate_margin: float = 0.2
    message_rate: float = 0.125
    over_budget: float = 0.25
    hash_n: int = 8
    hash_l: int = 2
    hash_samples: int = _env_int("ICREGIONS_HASH_SAMPLES", 20000)
    degree_constant: float = 1.0
    log_progress_every: int = 5
