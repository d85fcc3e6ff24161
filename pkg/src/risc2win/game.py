"""Strategy-space sweep, payoff matrices and epsilon-Nash equilibria.

A sweep fixes the traffic randomness (one seed) and replays the identical
schedules under every feasible threshold profile, so payoff differences
reflect strategy choices alone. Equilibria follow the multiplicative
epsilon rule: a profile survives if each station gets at least (1 - eps)
times its best-reply payoff against the other's fixed strategy.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._kernel import simulate_kernel
from .model import TrafficConfig, generate_schedule
from .reputation import FloorPolicy, ReputationConfig
from .strategy import enumerate_space

_FLOOR_CODE = {
    FloorPolicy.UNCLAMPED: 0,
    FloorPolicy.CLAMP_AT_ZERO: 1,
    FloorPolicy.HALT_ON_REVOCATION: 2,
}

# Sweeps default to a shorter horizon than single runs; it keeps a full
# ceiling-10 sweep at desk scale while leaving per-class utilities stable
# to a couple of percent.
SWEEP_HORIZON_DEFAULT = 20_000


@dataclass
class PayoffTable:
    """Per-profile utilities for one sweep (one traffic seed)."""

    strategies_a: List[Tuple[int, int]]
    strategies_b: List[Tuple[int, int]]
    u_a_be: np.ndarray
    u_a_vo: np.ndarray
    u_b_be: np.ndarray
    u_b_vo: np.ndarray
    payoff_a: np.ndarray
    payoff_b: np.ndarray
    halted: np.ndarray
    seed: int
    w: float
    ceiling: int
    rho_a: float
    rho_b: float
    horizon: int

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.strategies_a), len(self.strategies_b))


@dataclass(frozen=True)
class EquilibriumSet:
    """Profiles satisfying the epsilon-Nash condition on one table."""

    epsilon: float
    indices: Tuple[Tuple[int, int], ...]
    table: PayoffTable = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.indices)


def sweep(
    traffic: TrafficConfig,
    reputation: ReputationConfig,
    w: float,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> PayoffTable:
    """Fill the payoff table over the full feasible strategy space.

    Cells are independent and evaluated on identical schedules; the result
    does not depend on evaluation order or the worker count. A cell halted
    by the halt-on-revocation policy is flagged, its utilities reflect the
    truncated run.
    """
    if w <= 0:
        raise ValueError(f"w must be positive, got {w}")
    if seed is not None:
        traffic = replace(traffic, seed=seed)
    sched_a = generate_schedule(traffic, "A")
    sched_b = generate_schedule(traffic, "B")
    starts_a, lens_a, icos_a = sched_a.as_arrays()
    starts_b, lens_b, icos_b = sched_b.as_arrays()
    ceiling = reputation.ceiling
    strategies_a = enumerate_space(ceiling, "A")
    strategies_b = enumerate_space(ceiling, "B")
    n_i = len(strategies_a)
    n_j = len(strategies_b)

    u_a_be = np.zeros((n_i, n_j))
    u_a_vo = np.zeros((n_i, n_j))
    u_b_be = np.zeros((n_i, n_j))
    u_b_vo = np.zeros((n_i, n_j))
    halted = np.zeros((n_i, n_j), dtype=bool)
    floor_code = _FLOOR_CODE[reputation.floor_policy]
    cap = reputation.cap
    mask_a_be = icos_a == 0
    mask_b_be = icos_b == 0

    def fill_row(i: int) -> None:
        ta_comb, ta_down = strategies_a[i]
        for j, (tb_down, tb_up) in enumerate(strategies_b):
            out = simulate_kernel(
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
                ceiling,
                reputation.r0,
                cap,
                floor_code,
                traffic.horizon,
                False,
            )
            n_a, n_b, u_a, _, u_b, _, _, _, _, _, was_halted = out
            u_a_be[i, j], u_a_vo[i, j] = _class_means(u_a, mask_a_be, n_a)
            u_b_be[i, j], u_b_vo[i, j] = _class_means(u_b, mask_b_be, n_b)
            halted[i, j] = bool(was_halted)

    n_workers = workers if workers else min(4, os.cpu_count() or 1)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(fill_row, range(n_i)))
    else:
        for i in range(n_i):
            fill_row(i)

    return PayoffTable(
        strategies_a=strategies_a,
        strategies_b=strategies_b,
        u_a_be=u_a_be,
        u_a_vo=u_a_vo,
        u_b_be=u_b_be,
        u_b_vo=u_b_vo,
        payoff_a=u_a_be + w * u_a_vo,
        payoff_b=u_b_be + w * u_b_vo,
        halted=halted,
        seed=traffic.seed,
        w=w,
        ceiling=ceiling,
        rho_a=traffic.rho_a,
        rho_b=traffic.rho_b,
        horizon=traffic.horizon,
    )


def _class_means(u: np.ndarray, mask_be: np.ndarray, n_done: int) -> Tuple[float, float]:
    done = u[:n_done]
    be = done[mask_be[:n_done]]
    vo = done[~mask_be[:n_done]]
    u_be = float(be.mean()) if be.size else 0.0
    u_vo = float(vo.mean()) if vo.size else 0.0
    return u_be, u_vo


def epsilon_nash(table: PayoffTable, epsilon: float) -> EquilibriumSet:
    """Profiles where both stations are within factor (1 - epsilon) of a
    best reply. Uses column maxima for A and row maxima for B; ties all
    qualify. Halted cells are excluded from both candidacy and maxima."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    n_i, n_j = table.shape
    if n_i == 0 or n_j == 0:
        raise ValueError("empty payoff table")
    ua = np.where(table.halted, -np.inf, table.payoff_a)
    ub = np.where(table.halted, -np.inf, table.payoff_b)
    col_max_a = ua.max(axis=0)  # A's best reply to each B strategy
    row_max_b = ub.max(axis=1)  # B's best reply to each A strategy
    ok = (
        ~table.halted
        & (table.payoff_a >= (1.0 - epsilon) * col_max_a[np.newaxis, :])
        & (table.payoff_b >= (1.0 - epsilon) * row_max_b[:, np.newaxis])
    )
    indices = tuple((int(i), int(j)) for i, j in np.argwhere(ok))
    return EquilibriumSet(epsilon=epsilon, indices=indices, table=table)


@dataclass(frozen=True)
class RunSummary:
    seed: int
    n_equilibria: int
    empty: bool
    starvation: int
    points_a: Tuple[Tuple[float, float], ...]  # (u_be, u_vo) at each equilibrium
    points_b: Tuple[Tuple[float, float], ...]
    frac_vo_a_ge_b: float
    frac_be_a_ge_b: float


@dataclass(frozen=True)
class SweepSummary:
    epsilon: float
    per_run: Tuple[RunSummary, ...]
    pooled_points_a: Tuple[Tuple[float, float], ...]
    pooled_points_b: Tuple[Tuple[float, float], ...]
    pooled_starvation: int
    pooled_frac_vo_a_ge_b: float
    pooled_frac_be_a_ge_b: float


def summarize(sets: Sequence[EquilibriumSet], tables: Sequence[PayoffTable]) -> SweepSummary:
    """Scatter data and headline statistics across runs of one configuration.

    Starvation counts equilibria where either station ends with zero total
    utility. An empty equilibrium set is flagged, not an error.
    """
    if len(sets) != len(tables) or not sets:
        raise ValueError("need one equilibrium set per table")
    ref = tables[0]
    eps = sets[0].epsilon
    for es, table in zip(sets, tables):
        if es.table is not table:
            raise ValueError("equilibrium set does not belong to its table")
        if es.epsilon != eps:
            raise ValueError("mixed epsilon values")
        if (
            table.strategies_a != ref.strategies_a
            or table.strategies_b != ref.strategies_b
            or table.w != ref.w
            or table.ceiling != ref.ceiling
            or table.rho_a != ref.rho_a
            or table.rho_b != ref.rho_b
            or table.horizon != ref.horizon
        ):
            raise ValueError("tables come from different configurations")

    per_run = []
    pooled_a: List[Tuple[float, float]] = []
    pooled_b: List[Tuple[float, float]] = []
    pooled_starved = 0
    pooled_vo_ge = 0
    pooled_be_ge = 0
    pooled_n = 0
    for es, table in zip(sets, tables):
        pts_a = []
        pts_b = []
        starved = 0
        vo_ge = 0
        be_ge = 0
        for i, j in es.indices:
            pa = (float(table.u_a_be[i, j]), float(table.u_a_vo[i, j]))
            pb = (float(table.u_b_be[i, j]), float(table.u_b_vo[i, j]))
            pts_a.append(pa)
            pts_b.append(pb)
            if table.payoff_a[i, j] == 0.0 or table.payoff_b[i, j] == 0.0:
                starved += 1
            if pa[1] >= pb[1]:
                vo_ge += 1
            if pa[0] >= pb[0]:
                be_ge += 1
        n = len(es.indices)
        per_run.append(
            RunSummary(
                seed=table.seed,
                n_equilibria=n,
                empty=n == 0,
                starvation=starved,
                points_a=tuple(pts_a),
                points_b=tuple(pts_b),
                frac_vo_a_ge_b=vo_ge / n if n else 0.0,
                frac_be_a_ge_b=be_ge / n if n else 0.0,
            )
        )
        pooled_a.extend(pts_a)
        pooled_b.extend(pts_b)
        pooled_starved += starved
        pooled_vo_ge += vo_ge
        pooled_be_ge += be_ge
        pooled_n += n

    return SweepSummary(
        epsilon=eps,
        per_run=tuple(per_run),
        pooled_points_a=tuple(pooled_a),
        pooled_points_b=tuple(pooled_b),
        pooled_starvation=pooled_starved,
        pooled_frac_vo_a_ge_b=pooled_vo_ge / pooled_n if pooled_n else 0.0,
        pooled_frac_be_a_ge_b=pooled_be_ge / pooled_n if pooled_n else 0.0,
    )
