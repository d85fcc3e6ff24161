"""Utility and reputation trajectories under three behavior profiles.

Runs the relay game once per profile with identical traffic and prints
where the reputation walk settles and what the per-class utilities look
like. The three profiles mirror the classic progression: do nothing,
protect the score with a self-downgrade barrier, then play nontrivial
thresholds on both sides.
"""

from risc2win import parse_profile, run, smooth_trajectory
from risc2win.model import TrafficConfig, uniform_length_pmf
from risc2win.engine import Scenario
from risc2win.reputation import ReputationConfig

HORIZON = 100_000
SEED = 7

PROFILES = {
    "neutral": "(inf, -inf, inf, -inf)",
    "barrier at zero": "(inf, 0, inf, -inf)",
    "nontrivial thresholds": "(3, 1, 4, 1)",
}


def main():
    traffic = TrafficConfig(0.5, 0.5, uniform_length_pmf(), HORIZON, seed=SEED)
    reputation = ReputationConfig(ceiling=10, r0=10)
    for name, text in PROFILES.items():
        scenario = Scenario(
            traffic=traffic,
            reputation=reputation,
            w=10.0,
            profile=parse_profile(text),
        )
        res = run(scenario)
        print(f"\n== {name}  {text} ==")
        print(f"  reputation: min={res.r_trace.min()} max={res.r_trace.max()}"
              f" final={res.r_trace[-1]}"
              + (f" first_revocation_slot={res.revoked_slot}" if res.revoked_slot else ""))
        for label, report in (("A", res.report.a), ("B", res.report.b)):
            print(f"  station {label}: u_be={report.u_be:.4f} u_vo={report.u_vo:.4f}"
                  f" weighted={report.weighted:.4f}")
        u_vo_a = [r.u for r in res.records_a if r.cos.name == "VO"]
        if u_vo_a:
            tail = smooth_trajectory(u_vo_a)[-1]
            print(f"  smoothed tail of A's VO session utilities: {tail:.4f}")


if __name__ == "__main__":
    main()
