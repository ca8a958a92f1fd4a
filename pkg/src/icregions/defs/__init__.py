# /icregions/defs/__init__.py
from dagster import (
    Definitions,
    ScheduleDefinition,
    define_asset_job,
    AssetSelection,
)

from .assets import (
    eliminated_equivalence_census,
    inclusion_census,
    degenerate_channel_sweep,
    hash_census,
    rate_budget_trend,
    rate_budget_summary,
)

from .resources import SolverConfigResource, ExperimentConfigResource


region_assets = [
    eliminated_equivalence_census,
    inclusion_census,
    degenerate_channel_sweep,
]

codec_assets = [
    hash_census,
    rate_budget_trend,
    rate_budget_summary,
]


region_checks_job = define_asset_job(
    name="region_checks",
    selection=AssetSelection.assets(*region_assets),
    description="Closed-form equivalence, inclusion census and degenerate-channel sweep",
    tags={"dagster/max_workers": 3},
)

codec_checks_job = define_asset_job(
    name="codec_checks",
    selection=AssetSelection.assets(hash_census),
    description="Collision census of the hash ensembles",
)

rate_budget_job = define_asset_job(
    name="rate_budget",
    selection=AssetSelection.assets(rate_budget_trend),
    partitions_def=rate_budget_trend.partitions_def,
    description="Simulate in- and over-budget codes for one block length",
)


region_checks_schedule = ScheduleDefinition(
    job=region_checks_job,
    cron_schedule="0 2 * * *",
    description="Run region checks nightly",
)


resources = {
    "solver": SolverConfigResource(),
    "experiment": ExperimentConfigResource(),
}


defs = Definitions(
    assets=[
        *region_assets,
        *codec_assets,
    ],
    jobs=[
        region_checks_job,
        codec_checks_job,
        rate_budget_job,
    ],
    schedules=[
        region_checks_schedule,
    ],
    resources=resources,
)
