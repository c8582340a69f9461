"""Business process simulation with individually calendared resources, and
discovery of such models from event logs."""

from .calendars import (
    CalendarEntry,
    CandidateMultiset,
    WeeklyCalendar,
    extract_candidates,
    granule_of,
    idle_processing_completion,
    in_calendar_duration,
    next_available,
)
from .distributions import DistributionSpec, sample
from .model import (
    BranchingProbabilities,
    ClassicSimModel,
    DifferentiatedSimModel,
    Flow,
    GatewayKind,
    ProcessGraph,
    ResourcePool,
    ResourceProfile,
    classic_to_differentiated,
    validate_model,
)
from .bpmn import parse_bpmn
from .scenario import ScenarioBundle, load_scenario, store_scenario
from .eventlog import (
    Event,
    EventLog,
    KpiReport,
    LogIndex,
    Trace,
    compute_kpis,
    estimate_branching,
    estimate_interarrival,
    read_log,
    write_log,
)
from .discovery import (
    DiscoveryParams,
    DiscoveryReport,
    best_fitted_distribution,
    confidence,
    discover_calendar,
    discover_processing_times,
    discover_resource_profiles,
    max_disjoint_intervals,
    participation,
    support,
)
from .simulator import (
    DiffResourceQueue,
    RunReport,
    SimConfig,
    generate_arrival_events,
    pop_resource,
    simulate,
    update_process_state,
)
from .metrics import Histogram, compare_runs, emd_1d, emd_ct, emd_wr

__version__ = "0.1.0"
