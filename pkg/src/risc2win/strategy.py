"""Threshold strategies: memoryless, reputation-driven behavior rules.

Station B downgrades its announcements when the relay's reputation is high
(to stop it rising further) and upgrades when it is low; station A mounts a
combined attack (upgrade own traffic, downgrade B's transit traffic) when
reputation is high and downgrades its own traffic when reputation is low.
Each station is characterised by two integer thresholds; +/-inf sentinels
disable a branch.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import List, Tuple

from .model import TrafficClass

ALWAYS_BELOW = float("-inf")  # a threshold no reputation value reaches
NEVER = float("inf")  # a threshold no reputation value attains


@dataclass(frozen=True)
class ThresholdsA:
    """(combined-attack threshold, self-downgrade threshold), t_comb >= t_down."""

    t_comb: float
    t_down: float

    def __post_init__(self) -> None:
        if not self.t_comb >= self.t_down:
            raise ValueError(f"need t_comb >= t_down, got ({self.t_comb}, {self.t_down})")


@dataclass(frozen=True)
class ThresholdsB:
    """(downgrade threshold, upgrade threshold), t_down >= t_up."""

    t_down: float
    t_up: float

    def __post_init__(self) -> None:
        if not self.t_down >= self.t_up:
            raise ValueError(f"need t_down >= t_up, got ({self.t_down}, {self.t_up})")


@dataclass(frozen=True)
class StrategyProfile:
    """Both stations' thresholds; canonical order (t_a_comb, t_a_down, t_b_down, t_b_up)."""

    a: ThresholdsA
    b: ThresholdsB

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a.t_comb, self.a.t_down, self.b.t_down, self.b.t_up)

    @classmethod
    def from_tuple(cls, values: Tuple[float, float, float, float]) -> "StrategyProfile":
        ta_comb, ta_down, tb_down, tb_up = values
        return cls(a=ThresholdsA(ta_comb, ta_down), b=ThresholdsB(tb_down, tb_up))


def neutral_profile() -> StrategyProfile:
    """Sentinel profile under which both stations always behave neutrally."""
    return StrategyProfile(a=ThresholdsA(NEVER, ALWAYS_BELOW), b=ThresholdsB(NEVER, ALWAYS_BELOW))


def _format_threshold(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v):
        return str(int(v))
    return repr(v)


def format_profile(profile: StrategyProfile) -> str:
    """Render as "(t_a_comb, t_a_down, t_b_down, t_b_up)" with inf/-inf sentinels."""
    return "(" + ", ".join(_format_threshold(v) for v in profile.as_tuple()) + ")"


def parse_profile(text: str) -> StrategyProfile:
    """Parse the canonical 4-tuple form, e.g. "(3, 1, 4, 1)" or "(inf, 0, inf, -inf)"."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = [p.strip() for p in re.split(r"[,\s]+", body) if p.strip()]
    if len(parts) != 4:
        raise ValueError(f"expected 4 thresholds, got {len(parts)} in {text!r}")
    values = []
    for p in parts:
        if p in ("inf", "+inf"):
            values.append(NEVER)
        elif p == "-inf":
            values.append(ALWAYS_BELOW)
        else:
            values.append(float(p))
    return StrategyProfile.from_tuple(tuple(values))


# Branch order in every rule below is fixed: the downgrading branch is
# checked before the upgrading/combined one, so equal thresholds favour
# downgrading.


def decide_b_at_b_start(
    th: ThresholdsB, r: float, icos_b: TrafficClass
) -> Tuple[TrafficClass, TrafficClass]:
    """B's announcement and access priority at its own session start."""
    if r >= th.t_down:
        return TrafficClass.BE, TrafficClass.BE
    if r <= th.t_up:
        return TrafficClass.VO, TrafficClass.VO
    return icos_b, icos_b


def decide_a_at_b_start(
    th: ThresholdsA, r: float, cos_a_current: TrafficClass, cos_b_new: TrafficClass
) -> Tuple[TrafficClass, TrafficClass]:
    """A's access priorities refreshed when B starts a session mid-A-session.

    cos_b_new is B's freshly announced class (B decides first).
    """
    if r <= th.t_down:
        return TrafficClass.BE, cos_b_new
    if r >= th.t_comb:
        return cos_a_current, TrafficClass.BE
    return cos_a_current, cos_b_new


def decide_b_at_a_start(th: ThresholdsB, r: float, cos_b_current: TrafficClass) -> TrafficClass:
    """B's access priority refreshed when A starts a session mid-B-session."""
    if r >= th.t_down:
        return TrafficClass.BE
    return cos_b_current


def decide_a_at_a_start(
    th: ThresholdsA, r: float, icos_a: TrafficClass, cos_b_current: TrafficClass
) -> Tuple[TrafficClass, TrafficClass, TrafficClass]:
    """A's announcement and both access priorities at its own session start.

    cos_b_current is the announced class of B's session in force at this
    boundary; when both stations start together it is B's fresh announcement
    (B decides first).
    """
    if r <= th.t_down:
        return TrafficClass.BE, TrafficClass.BE, cos_b_current
    if r >= th.t_comb:
        return TrafficClass.VO, TrafficClass.VO, TrafficClass.BE
    return icos_a, icos_a, cos_b_current


def enumerate_space(ceiling: int, station: str) -> List[Tuple[int, int]]:
    """Feasible threshold pairs for one station, lexicographically ordered.

    All (x, y) with ceiling >= x >= y >= 0, minus (R, R) for A and (0, 0)
    for B (each would force permanent downgrading of own VO traffic).
    """
    if ceiling < 1:
        raise ValueError(f"ceiling must be >= 1, got {ceiling}")
    pairs = [(x, y) for x in range(ceiling + 1) for y in range(x + 1)]
    if station == "A":
        pairs.remove((ceiling, ceiling))
    elif station == "B":
        pairs.remove((0, 0))
    else:
        raise ValueError(f"unknown station {station!r}")
    return pairs
