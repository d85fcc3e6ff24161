"""RISC2WIN: reputation-driven QoS game simulator for a two-hop wireless relay.

Two stations share an uplink through a relay. Each can misreport traffic
priority (selfish QoS manipulation); an access point maintains the relay's
reputation to keep both stations honest. This package simulates the slotted
session traffic, QoS outcomes and reputation dynamics, and analyses the
induced two-player game (payoff matrices, epsilon-Nash equilibria).
"""

__version__ = "0.1.0"

from .model import (
    TrafficClass,
    TrafficConfig,
    Session,
    SessionSchedule,
    SessionRecord,
    StationUtilities,
    UtilityReport,
    ConfigurationError,
    generate_schedule,
    qos_level,
    session_utility,
    aggregate_utilities,
)
from .reputation import (
    FloorPolicy,
    ReputationConfig,
    ReputationState,
    ReputationEvent,
    EventKind,
    modified_reputation,
    record_utility,
    on_b_session_end,
    on_a_session_end,
)
from .strategy import (
    ALWAYS_BELOW,
    NEVER,
    ThresholdsA,
    ThresholdsB,
    StrategyProfile,
    neutral_profile,
    parse_profile,
    format_profile,
    enumerate_space,
    decide_b_at_b_start,
    decide_a_at_b_start,
    decide_b_at_a_start,
    decide_a_at_a_start,
)
from .engine import Scenario, SimulationResult, run, smooth_trajectory
from .game import (
    PayoffTable,
    EquilibriumSet,
    SweepSummary,
    sweep,
    epsilon_nash,
    summarize,
)
