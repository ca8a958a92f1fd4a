# services/polytope/__init__.py
from icregions.services.polytope.compare import compare_regions, sweep_boundary
from icregions.services.polytope.fme import eliminate_aux, fm_eliminate, prune_redundant
from icregions.services.polytope.lp import (
    LPProblem,
    bounding_box,
    lp_feasible,
    membership,
    support,
    support_point,
)

__all__ = [
    "LPProblem",
    "bounding_box",
    "compare_regions",
    "eliminate_aux",
    "fm_eliminate",
    "lp_feasible",
    "membership",
    "prune_redundant",
    "support",
    "support_point",
    "sweep_boundary",
]
