"""Deterministic slot-stepped simulation binding traffic, strategies, QoS
and reputation into session records, trajectories and a utility report."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__ as _version
from ._kernel import simulate_kernel
from .model import (
    SUBSTREAM_SCHEME,
    SessionRecord,
    SessionSchedule,
    TrafficClass,
    TrafficConfig,
    UtilityReport,
    aggregate_utilities,
    config_digest,
    generate_schedule,
)
from .reputation import EventKind, FloorPolicy, ReputationConfig, ReputationEvent
from .strategy import StrategyProfile, format_profile

_FLOOR_CODE = {
    FloorPolicy.UNCLAMPED: 0,
    FloorPolicy.CLAMP_AT_ZERO: 1,
    FloorPolicy.HALT_ON_REVOCATION: 2,
}
_EVENT_KIND = {
    0: EventKind.UNCHANGED,
    1: EventKind.INCREMENTED,
    2: EventKind.DECREMENTED,
    3: EventKind.REVOKED,
}


@dataclass(frozen=True)
class Scenario:
    """Everything one simulation run needs besides the master seed."""

    traffic: TrafficConfig
    reputation: ReputationConfig
    w: float
    profile: StrategyProfile

    def __post_init__(self) -> None:
        if self.w <= 0:
            raise ValueError(f"w must be positive, got {self.w}")


@dataclass
class SimulationResult:
    scenario: Scenario
    seed: int
    schedule_a: SessionSchedule
    schedule_b: SessionSchedule
    records_a: List[SessionRecord]
    records_b: List[SessionRecord]
    events: List[ReputationEvent]
    r_trace: np.ndarray  # reputation governing each slot; empty if not traced
    report: UtilityReport
    revoked_slot: Optional[int]
    halted: bool
    metadata: Dict[str, str] = field(default_factory=dict)

    @property
    def records(self) -> List[SessionRecord]:
        return self.records_a + self.records_b


def run(scenario: Scenario, seed: Optional[int] = None, record_trace: bool = True) -> SimulationResult:
    """Run one deterministic simulation.

    seed overrides the traffic config's seed when given. Traffic schedules
    depend only on (seed, station), never on the strategy profile, so runs
    that differ only in profile share identical schedules (common random
    numbers). Sessions still in progress at the horizon are discarded;
    sessions ending exactly on it are recorded.
    """
    traffic = scenario.traffic if seed is None else replace(scenario.traffic, seed=seed)
    sched_a = generate_schedule(traffic, "A")
    sched_b = generate_schedule(traffic, "B")
    starts_a, lens_a, icos_a = sched_a.as_arrays()
    starts_b, lens_b, icos_b = sched_b.as_arrays()
    rep = scenario.reputation
    ta_comb, ta_down, tb_down, tb_up = scenario.profile.as_tuple()

    (
        n_a,
        n_b,
        u_a,
        cos_ann_a,
        u_b,
        cos_ann_b,
        r_trace,
        events_arr,
        n_events,
        revoked,
        halted,
    ) = simulate_kernel(
        starts_a,
        lens_a,
        icos_a,
        starts_b,
        lens_b,
        icos_b,
        float(ta_comb),
        float(ta_down),
        float(tb_down),
        float(tb_up),
        rep.ceiling,
        rep.r0,
        rep.cap,
        _FLOOR_CODE[rep.floor_policy],
        traffic.horizon,
        record_trace,
    )

    records_a = _build_records("A", sched_a, u_a, cos_ann_a, n_a)
    records_b = _build_records("B", sched_b, u_b, cos_ann_b, n_b)
    events = _build_events(events_arr, n_events)

    halted_flag = bool(halted)
    trace = r_trace
    if halted_flag and record_trace:
        # A halted run only governed slots up to the revocation boundary.
        trace = r_trace[: int(revoked)]

    report = aggregate_utilities(records_a + records_b, scenario.w)
    metadata = {
        "seed": str(traffic.seed),
        "substream_scheme": SUBSTREAM_SCHEME,
        "code_version": _version,
        "profile": format_profile(scenario.profile),
        "horizon": str(traffic.horizon),
        "config_digest": scenario_digest(scenario, traffic.seed),
    }
    return SimulationResult(
        scenario=scenario,
        seed=traffic.seed,
        schedule_a=sched_a,
        schedule_b=sched_b,
        records_a=records_a,
        records_b=records_b,
        events=events,
        r_trace=trace,
        report=report,
        revoked_slot=None if revoked < 0 else int(revoked),
        halted=halted_flag,
        metadata=metadata,
    )


def scenario_digest(scenario: Scenario, seed: int) -> str:
    traffic = scenario.traffic
    rep = scenario.reputation
    return config_digest(
        {
            "rho_a": traffic.rho_a,
            "rho_b": traffic.rho_b,
            "length_pmf": tuple(sorted(traffic.length_pmf.items())),
            "horizon": traffic.horizon,
            "seed": seed,
            "ceiling": rep.ceiling,
            "r0": rep.r0,
            "floor_policy": rep.floor_policy.value,
            "r_am_cap": rep.cap,
            "w": scenario.w,
            "profile": format_profile(scenario.profile),
        }
    )


def _build_records(
    station: str,
    schedule: SessionSchedule,
    u: np.ndarray,
    cos_ann: np.ndarray,
    n_done: int,
) -> List[SessionRecord]:
    records = []
    for i in range(n_done):
        sess = schedule.sessions[i]
        records.append(
            SessionRecord(
                station=station,
                k=sess.k,
                start=sess.start,
                length=sess.length,
                icos=sess.icos,
                cos=TrafficClass(int(cos_ann[i])),
                u=float(u[i]),
            )
        )
    return records


def _build_events(events_arr: np.ndarray, n_events: int) -> List[ReputationEvent]:
    events = []
    for i in range(n_events):
        row = events_arr[i]
        station = "B" if row[1] > 0.5 else "A"
        events.append(
            ReputationEvent(
                slot=int(row[0]),
                station=station,
                kind=_EVENT_KIND[int(row[2])],
                r_before=int(row[3]),
                r_after=int(row[4]),
                r_am=float(row[5]),
                cos_ended=TrafficClass(int(row[6])),
                u_ended=float(row[7]),
                cos_b_current=None if station == "B" else TrafficClass(int(row[8])),
            )
        )
    return events


def smooth_trajectory(values: Sequence[float]) -> np.ndarray:
    """Moving average with learning constant n**-0.05 (plotting aid only).

    y[0] = v[0]; y[n] = (1 - g) * y[n-1] + g * v[n] with g = (n+1)**-0.05.
    Constant inputs are fixed points. Never used in utility aggregation.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.size == 0:
        raise ValueError("expected a nonempty 1-D sequence")
    out = np.empty_like(vals)
    y = vals[0]
    out[0] = y
    for n in range(2, vals.size + 1):
        g = n ** -0.05
        y = (1.0 - g) * y + g * vals[n - 1]
        out[n - 1] = y
    return out
