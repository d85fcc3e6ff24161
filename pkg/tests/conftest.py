"""Shared fixtures and helpers."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from risc2win import (
    ReputationConfig,
    Scenario,
    StrategyProfile,
    TrafficConfig,
    neutral_profile,
)
from risc2win.model import uniform_length_pmf


def make_scenario(
    rho_a=0.5,
    rho_b=0.5,
    horizon=20_000,
    seed=1,
    ceiling=10,
    r0=None,
    w=10.0,
    profile=None,
    floor_policy=None,
    pmf=None,
):
    traffic = TrafficConfig(
        rho_a=rho_a,
        rho_b=rho_b,
        length_pmf=pmf or uniform_length_pmf(),
        horizon=horizon,
        seed=seed,
    )
    kwargs = {}
    if floor_policy is not None:
        kwargs["floor_policy"] = floor_policy
    reputation = ReputationConfig(ceiling=ceiling, r0=ceiling if r0 is None else r0, **kwargs)
    return Scenario(
        traffic=traffic,
        reputation=reputation,
        w=w,
        profile=profile or neutral_profile(),
    )


@pytest.fixture(scope="session")
def warm_kernel():
    """Compile the jitted kernel once so timing tests see steady state."""
    from risc2win import run

    run(make_scenario(horizon=100), record_trace=True)
    return True
