"""Relay reputation automaton.

The access point scores the relay (station A) with an integer reputation
r <= R, updated at session ends: incremented when B's announced-VO session
received good enough QoS, decremented when A's announced-VO session received
good enough QoS while B was announcing BE. "Good enough" thresholds scale
with a modified reputation that is boosted whenever B's running average
utility exceeds A's, which self-regulates the comparison in B's favour.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

from .model import TrafficClass


class FloorPolicy(str, Enum):
    """What happens when a decrement would push r below zero.

    UNCLAMPED lets r go negative and records the first crossing as status
    revocation; CLAMP_AT_ZERO floors r at 0; HALT_ON_REVOCATION tells the
    simulation to stop at the first revocation.
    """

    UNCLAMPED = "unclamped"
    CLAMP_AT_ZERO = "clamp_at_zero"
    HALT_ON_REVOCATION = "halt_on_revocation"


class EventKind(str, Enum):
    UNCHANGED = "unchanged"
    INCREMENTED = "incremented"
    DECREMENTED = "decremented"
    REVOKED = "revoked"


@dataclass(frozen=True)
class ReputationConfig:
    """Reputation ceiling, initial value, floor handling and ratio cap.

    r_am_cap caps the modified reputation; None means cap at R. (A cap of
    1 reproduces a degenerate variant kept available for comparison.)
    """

    ceiling: int
    r0: int
    floor_policy: FloorPolicy = FloorPolicy.UNCLAMPED
    r_am_cap: Optional[float] = None

    def __post_init__(self) -> None:
        if self.ceiling < 1:
            raise ValueError(f"ceiling must be >= 1, got {self.ceiling}")
        if not 0 <= self.r0 <= self.ceiling:
            raise ValueError(f"r0 must be in [0, {self.ceiling}], got {self.r0}")

    @property
    def cap(self) -> float:
        return float(self.ceiling) if self.r_am_cap is None else float(self.r_am_cap)


@dataclass(frozen=True)
class ReputationState:
    """Current reputation plus running per-session utility means.

    Means are kept as (total, count) so they match a left-to-right sum of
    the recorded utilities exactly.
    """

    r: int
    total_u_a: float = 0.0
    count_a: int = 0
    total_u_b: float = 0.0
    count_b: int = 0
    revoked_at: Optional[int] = None

    @property
    def mean_u_a(self) -> float:
        return self.total_u_a / self.count_a if self.count_a else 0.0

    @property
    def mean_u_b(self) -> float:
        return self.total_u_b / self.count_b if self.count_b else 0.0

    @classmethod
    def initial(cls, r0: int) -> "ReputationState":
        return cls(r=r0)


@dataclass(frozen=True)
class ReputationEvent:
    """One reputation check at a session end; the log replays exactly."""

    slot: int
    station: str  # which station's session ended
    kind: EventKind
    r_before: int
    r_after: int
    r_am: float
    cos_ended: TrafficClass
    u_ended: float
    cos_b_current: Optional[TrafficClass] = None  # only for A-end events


def modified_reputation(state: ReputationState, ceiling: int, cap: Optional[float] = None) -> float:
    """Reputation value used inside the increment/decrement comparisons.

    Equals r unless both stations have completed sessions and B's mean
    utility strictly exceeds A's, in which case (r + 1) * mean_b / mean_a - 1
    capped from above. mean_a == 0 < mean_b yields the cap. May be
    non-integer; it is never stored back into r.
    """
    cap_v = float(ceiling) if cap is None else float(cap)
    if state.count_a > 0 and state.count_b > 0:
        mean_a = state.total_u_a / state.count_a
        mean_b = state.total_u_b / state.count_b
        if mean_b > mean_a:
            if mean_a == 0.0:
                return cap_v
            v = (state.r + 1) * mean_b / mean_a - 1.0
            return v if v < cap_v else cap_v
    return float(state.r)


def record_utility(state: ReputationState, station: str, u: float) -> ReputationState:
    """Fold a finished session's utility into that station's running mean."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"utility must be in [0, 1], got {u}")
    if station == "A":
        return replace(state, total_u_a=state.total_u_a + u, count_a=state.count_a + 1)
    if station == "B":
        return replace(state, total_u_b=state.total_u_b + u, count_b=state.count_b + 1)
    raise ValueError(f"unknown station {station!r}")


def on_b_session_end(
    state: ReputationState,
    cos_b_ended: TrafficClass,
    u_b: float,
    ceiling: int,
    cap: Optional[float] = None,
    slot: int = -1,
) -> Tuple[ReputationState, ReputationEvent]:
    """Increment check when one of B's sessions ends.

    r goes up by one (never past the ceiling) iff B announced VO and its
    session utility reached 1 - r_am/R. The ended session's utility must
    not have been folded into the running means yet.
    """
    r_am = modified_reputation(state, ceiling, cap)
    r_before = state.r
    if cos_b_ended == TrafficClass.VO and u_b >= 1.0 - r_am / ceiling:
        r_after = min(ceiling, r_before + 1)
        kind = EventKind.INCREMENTED
    else:
        r_after = r_before
        kind = EventKind.UNCHANGED
    new_state = replace(state, r=r_after)
    event = ReputationEvent(
        slot=slot,
        station="B",
        kind=kind,
        r_before=r_before,
        r_after=r_after,
        r_am=r_am,
        cos_ended=cos_b_ended,
        u_ended=u_b,
    )
    return new_state, event


def on_a_session_end(
    state: ReputationState,
    cos_a_ended: TrafficClass,
    u_a: float,
    cos_b_current: TrafficClass,
    ceiling: int,
    policy: FloorPolicy = FloorPolicy.UNCLAMPED,
    cap: Optional[float] = None,
    slot: int = -1,
) -> Tuple[ReputationState, ReputationEvent]:
    """Decrement check when one of A's sessions ends.

    r goes down by one iff A announced VO, its session utility reached
    r_am/R, and B's current session announces BE. When both stations'
    sessions end on the same boundary, apply the B-end check first and call
    this with the resulting state; cos_b_current is then the just-ended B
    session's announced class.
    """
    r_am = modified_reputation(state, ceiling, cap)
    r_before = state.r
    kind = EventKind.UNCHANGED
    r_after = r_before
    revoked_at = state.revoked_at
    if (
        cos_a_ended == TrafficClass.VO
        and u_a >= r_am / ceiling
        and cos_b_current == TrafficClass.BE
    ):
        kind = EventKind.DECREMENTED
        if policy == FloorPolicy.CLAMP_AT_ZERO:
            r_after = max(0, r_before - 1)
        else:
            r_after = r_before - 1
            if r_after < 0 and revoked_at is None:
                revoked_at = slot
                kind = EventKind.REVOKED
    new_state = replace(state, r=r_after, revoked_at=revoked_at)
    event = ReputationEvent(
        slot=slot,
        station="A",
        kind=kind,
        r_before=r_before,
        r_after=r_after,
        r_am=r_am,
        cos_ended=cos_a_ended,
        u_ended=u_a,
        cos_b_current=cos_b_current,
    )
    return new_state, event
