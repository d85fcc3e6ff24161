"""Traffic model: session generation, per-slot QoS and utility aggregation.

Time is slotted; one slot carries one chunk. Each station transmits
back-to-back sessions (saturation), every session having an integer length
and an intrinsic traffic class drawn i.i.d. from station-specific
distributions. QoS per slot is binary and depends only on the access
categories in force; per-session utility is the mean slot QoS level.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

# Version tag of the master-seed -> per-(station, attribute) substream
# derivation. Emitted in run metadata; bump if the derivation changes.
SUBSTREAM_SCHEME = "seedseq-station-attr-v1"

STATIONS = ("A", "B")
_STATION_INDEX = {"A": 0, "B": 1}
_LENGTH_STREAM = 0
_ICOS_STREAM = 1

_PMF_TOL = 1e-12


class ConfigurationError(ValueError):
    """Invalid traffic or scheme configuration."""


class TrafficClass(IntEnum):
    """Two-level traffic priority; VO (voice) outranks BE (best effort)."""

    BE = 0
    VO = 1


@dataclass(frozen=True)
class TrafficConfig:
    """Traffic generation parameters for both stations.

    rho_a / rho_b are the per-station probabilities that a session is
    intrinsically VO. length_pmf maps session length (slots) to probability.
    """

    rho_a: float
    rho_b: float
    length_pmf: Mapping[int, float]
    horizon: int
    seed: int

    def __post_init__(self) -> None:
        for name, rho in (("rho_a", self.rho_a), ("rho_b", self.rho_b)):
            if not 0.0 <= rho <= 1.0:
                raise ConfigurationError(f"{name} must be in [0, 1], got {rho}")
        if self.horizon < 1:
            raise ConfigurationError(f"horizon must be positive, got {self.horizon}")
        pmf = dict(sorted(self.length_pmf.items()))
        if not pmf:
            raise ConfigurationError("length_pmf is empty")
        for length, p in pmf.items():
            if not (isinstance(length, (int, np.integer)) and length >= 1):
                raise ConfigurationError(f"session length must be a positive integer, got {length!r}")
            if p < 0.0:
                raise ConfigurationError(f"negative probability for length {length}")
        total = sum(pmf.values())
        if abs(total - 1.0) > _PMF_TOL:
            raise ConfigurationError(f"length_pmf sums to {total!r}, expected 1")
        object.__setattr__(self, "length_pmf", pmf)

    def rho(self, station: str) -> float:
        if station == "A":
            return self.rho_a
        if station == "B":
            return self.rho_b
        raise ValueError(f"unknown station {station!r}")


def uniform_length_pmf(lo: int = 6, hi: int = 15) -> Dict[int, float]:
    """Uniform session-length distribution on {lo, ..., hi}."""
    if lo < 1 or hi < lo:
        raise ConfigurationError(f"bad length range [{lo}, {hi}]")
    n = hi - lo + 1
    return {length: 1.0 / n for length in range(lo, hi + 1)}


@dataclass(frozen=True)
class Session:
    """One session: 1-based index, start slot, length and intrinsic class."""

    k: int
    start: int
    length: int
    icos: TrafficClass

    @property
    def end(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class SessionSchedule:
    """Saturated per-station session sequence covering the horizon."""

    station: str
    sessions: Tuple[Session, ...]

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(starts, lengths, icos) as int64/int64/int8 arrays."""
        starts = np.fromiter((s.start for s in self.sessions), np.int64, len(self.sessions))
        lengths = np.fromiter((s.length for s in self.sessions), np.int64, len(self.sessions))
        icos = np.fromiter((int(s.icos) for s in self.sessions), np.int8, len(self.sessions))
        return starts, lengths, icos


@dataclass(frozen=True)
class SessionRecord:
    """A completed session with its announced class and realised utility."""

    station: str
    k: int
    start: int
    length: int
    icos: TrafficClass
    cos: TrafficClass
    u: float


@dataclass(frozen=True)
class StationUtilities:
    """Long-term per-class average utilities of one station.

    Classes are keyed by *intrinsic* class; sessions announced differently
    still count under their intrinsic class. An empty class reports 0 with
    its empty flag set.
    """

    u_be: float
    u_vo: float
    weighted: float
    n_be: int
    n_vo: int
    empty_be: bool
    empty_vo: bool


@dataclass(frozen=True)
class UtilityReport:
    a: StationUtilities
    b: StationUtilities
    w: float


def generate_schedule(config: TrafficConfig, station: str) -> SessionSchedule:
    """Draw a saturated session schedule for one station.

    Deterministic given (config.seed, station): lengths and intrinsic
    classes come from separate substreams derived per SUBSTREAM_SCHEME, so
    schedules never depend on strategy choices. Generates sessions until
    their cumulative length reaches the horizon; the last session may
    extend past it.
    """
    if station not in _STATION_INDEX:
        raise ValueError(f"unknown station {station!r}")
    rho = config.rho(station)
    sidx = _STATION_INDEX[station]
    len_rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(sidx, _LENGTH_STREAM))
    )
    icos_rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(sidx, _ICOS_STREAM))
    )

    support = np.array(sorted(config.length_pmf), dtype=np.int64)
    probs = np.array([config.length_pmf[int(v)] for v in support], dtype=np.float64)
    mean_len = float(np.dot(support, probs))
    batch = max(16, int(config.horizon / mean_len * 1.1) + 8)

    lengths: list = []
    total = 0
    while total < config.horizon:
        draw = len_rng.choice(support, size=batch, p=probs)
        cum = total + np.cumsum(draw)
        take = int(np.searchsorted(cum, config.horizon)) + 1
        take = min(take, len(draw))
        lengths.extend(int(v) for v in draw[:take])
        total = int(cum[take - 1])

    n = len(lengths)
    vo_draw = icos_rng.random(n) < rho
    sessions = []
    start = 0
    for k in range(n):
        icos = TrafficClass.VO if vo_draw[k] else TrafficClass.BE
        sessions.append(Session(k=k + 1, start=start, length=lengths[k], icos=icos))
        start += lengths[k]
    return SessionSchedule(station=station, sessions=tuple(sessions))


def qos_level(
    station: str,
    ac_a: TrafficClass,
    ac_ba: TrafficClass,
    ac_b: TrafficClass,
) -> int:
    """Binary QoS received by a station's source chunk in one slot.

    A gets high QoS iff its own traffic is high priority and at least one
    segment of B's flow (incoming or relayed) is low priority. B gets high
    QoS iff its traffic is relayed at high priority end to end while A's own
    traffic is low priority. The two conditions are mutually exclusive.
    """
    if station == "A":
        return int(ac_a == TrafficClass.VO and (ac_b == TrafficClass.BE or ac_ba == TrafficClass.BE))
    if station == "B":
        return int(ac_a == TrafficClass.BE and ac_b == TrafficClass.VO and ac_ba == TrafficClass.VO)
    raise ValueError(f"unknown station {station!r}")


def session_utility(slot_levels: Sequence[int]) -> float:
    """Mean of a session's per-slot QoS levels."""
    if len(slot_levels) == 0:
        raise ValueError("session has no slots")
    return sum(slot_levels) / len(slot_levels)


def aggregate_utilities(records: Iterable[SessionRecord], w: float) -> UtilityReport:
    """Long-term per-class average utilities and weighted totals.

    Grouping is by intrinsic class. w weighs the VO class in the combined
    utility U = u_be + w * u_vo.
    """
    if w <= 0:
        raise ValueError(f"w must be positive, got {w}")
    records = list(records)
    per_station = {}
    for station in STATIONS:
        sums = {TrafficClass.BE: 0.0, TrafficClass.VO: 0.0}
        counts = {TrafficClass.BE: 0, TrafficClass.VO: 0}
        for rec in records:
            if rec.station == station:
                sums[rec.icos] += rec.u
                counts[rec.icos] += 1
        n_be = counts[TrafficClass.BE]
        n_vo = counts[TrafficClass.VO]
        u_be = sums[TrafficClass.BE] / n_be if n_be else 0.0
        u_vo = sums[TrafficClass.VO] / n_vo if n_vo else 0.0
        per_station[station] = StationUtilities(
            u_be=u_be,
            u_vo=u_vo,
            weighted=u_be + w * u_vo,
            n_be=n_be,
            n_vo=n_vo,
            empty_be=n_be == 0,
            empty_vo=n_vo == 0,
        )
    return UtilityReport(a=per_station["A"], b=per_station["B"], w=w)


def config_digest(items: Mapping[str, object]) -> str:
    """Stable short hash of configuration key/value pairs."""
    text = "\n".join(f"{k}={items[k]!r}" for k in sorted(items))
    return hashlib.sha256(text.encode()).hexdigest()[:16]
