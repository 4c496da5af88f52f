"""Multi-scenario task-offloading scheduler for cloud-edge-terminal
vehicular networks.

The package splits into a reusable optimization core (types, radio and
latency models, the three per-level solvers, utility accounting) and an
experiment layer (scenario generation, the full schedule, comparison
baselines, and a CLI harness).
"""

from .types import (
    EconParams,
    InfeasibleBudgetError,
    InfeasibleMatchingError,
    InfeasibleSubproblemError,
    InvalidRateError,
    MscetError,
    OffloadDecision,
    QosDomainError,
    RadioParams,
    ResourcePool,
    Rsu,
    Scenario,
    TaskExpiredError,
    TaskSpec,
    Vehicle,
    ZeroAllocationError,
)
from .scenario import (
    GenConfig,
    generate_scenario,
    scenario_from_json,
    scenario_to_json,
)
from .solvers import (
    AlphaProblem,
    AlphaResult,
    IpmResult,
    KktResult,
    ResourceProblem,
    SolverConfig,
    ga_solve_alpha_c,
    ipm_solve_f,
    kkt_solve_alpha_e,
    minimum_resources,
)
from .schedule import (
    ScheduleResult,
    TraceRecord,
    default_init,
    frozen_rates,
    run_mscet,
)
from .baselines import (
    BaselineResult,
    run_cloud_terminal,
    run_edge_terminal,
    run_nearby,
    run_sgrr,
)
from .utility import (
    UtilityReport,
    check_constraints,
    system_utility,
    vehicle_utility,
)
from .latency import processing_delay

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # types
    "EconParams",
    "MscetError",
    "InfeasibleBudgetError",
    "InfeasibleMatchingError",
    "InfeasibleSubproblemError",
    "InvalidRateError",
    "QosDomainError",
    "TaskExpiredError",
    "ZeroAllocationError",
    "OffloadDecision",
    "RadioParams",
    "ResourcePool",
    "Rsu",
    "Scenario",
    "TaskSpec",
    "Vehicle",
    # scenario generation
    "GenConfig",
    "generate_scenario",
    "scenario_from_json",
    "scenario_to_json",
    # solvers
    "AlphaProblem",
    "AlphaResult",
    "IpmResult",
    "KktResult",
    "ResourceProblem",
    "SolverConfig",
    "ga_solve_alpha_c",
    "ipm_solve_f",
    "kkt_solve_alpha_e",
    "minimum_resources",
    # schedule
    "ScheduleResult",
    "TraceRecord",
    "default_init",
    "frozen_rates",
    "run_mscet",
    # baselines
    "BaselineResult",
    "run_cloud_terminal",
    "run_edge_terminal",
    "run_nearby",
    "run_sgrr",
    # reporting
    "UtilityReport",
    "check_constraints",
    "system_utility",
    "vehicle_utility",
    "processing_delay",
]
