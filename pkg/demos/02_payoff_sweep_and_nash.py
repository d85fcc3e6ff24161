"""Full strategy-space sweep and epsilon-Nash equilibria for a small game.

Sweeps every feasible threshold pair for both stations with shared traffic
randomness, then filters the payoff table down to the epsilon-Nash set and
prints it along with the starvation and dominance summary.
"""

from risc2win import epsilon_nash, summarize, sweep
from risc2win.model import TrafficConfig, uniform_length_pmf
from risc2win.reputation import ReputationConfig

CEILING = 4
HORIZON = 20_000
EPSILON = 0.15


def main():
    traffic = TrafficConfig(0.5, 0.5, uniform_length_pmf(), HORIZON, seed=3)
    reputation = ReputationConfig(ceiling=CEILING, r0=CEILING)
    table = sweep(traffic, reputation, 10.0)
    n_i, n_j = table.shape
    print(f"swept {n_i} x {n_j} = {n_i * n_j} strategy profiles at R={CEILING}")

    es = epsilon_nash(table, EPSILON)
    print(f"\n{len(es)} equilibria at epsilon={EPSILON}:")
    print(f"  {'A thresholds':>14} {'B thresholds':>14} {'U_A':>7} {'U_B':>7}")
    for i, j in es.indices:
        print(f"  {str(table.strategies_a[i]):>14} {str(table.strategies_b[j]):>14}"
              f" {table.payoff_a[i, j]:7.3f} {table.payoff_b[i, j]:7.3f}")

    summary = summarize([es], [table])
    print(f"\nstarvation count: {summary.pooled_starvation}")
    print(f"fraction with u_A^VO >= u_B^VO: {summary.pooled_frac_vo_a_ge_b:.3f}")
    print(f"fraction with u_A^BE >= u_B^BE: {summary.pooled_frac_be_a_ge_b:.3f}")


if __name__ == "__main__":
    main()
