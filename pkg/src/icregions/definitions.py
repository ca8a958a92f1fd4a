"""
Dagster code location of the interference-region acceptance experiments.
"""

from dagster import Definitions
from dotenv import load_dotenv

load_dotenv()

# ============================================================================
# Import Experiment Components
# ============================================================================
from icregions.defs import (  # noqa: E402
    region_assets,
    codec_assets,
    region_checks_job,
    codec_checks_job,
    rate_budget_job,
    region_checks_schedule,
    resources,
)

# ============================================================================
# Combine All Assets
# ============================================================================
all_assets = [
    *region_assets,
    *codec_assets,
]

all_jobs = [
    region_checks_job,
    codec_checks_job,
    rate_budget_job,
]

all_schedules = [
    region_checks_schedule,
]

# ============================================================================
# Unified Definitions
# ============================================================================
defs = Definitions(
    assets=all_assets,
    jobs=all_jobs,
    schedules=all_schedules,
    resources=resources,
)
