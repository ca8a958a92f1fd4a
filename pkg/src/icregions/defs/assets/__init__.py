# defs/assets/__init__.py
"""
Batch acceptance experiments.

Asset dependency flow:
    eliminated_equivalence_census, inclusion_census, degenerate_channel_sweep (independent)
    hash_census (independent)
    rate_budget_trend [n = 4, 6, 8] → rate_budget_summary
"""

from .regions import (
    eliminated_equivalence_census,
    inclusion_census,
    degenerate_channel_sweep,
)
from .codec import (
    hash_census,
    rate_budget_trend,
    rate_budget_summary,
)

__all__ = [
    "eliminated_equivalence_census",
    "inclusion_census",
    "degenerate_channel_sweep",
    "hash_census",
    "rate_budget_trend",
    "rate_budget_summary",
]
