"""Replicate a Match Odds bet by trading the Next Goal pair.

Holdings in the two instruments are chosen each second so the portfolio
jumps exactly as the target would if either team scored; cash makes the
book self-financing.  Next Goal bets never degenerate as hedging
instruments: their delta matrix has determinant
exp(-(lam_home+lam_away)(1-clock)) > 0, whereas match odds bets collapse
once one side has the game sewn up.
"""

import numpy as np

from inplay import (
    Bet,
    Intensities,
    MATCH_ODDS_AWAY,
    MATCH_ODDS_HOME,
    NEXT_GOAL_AWAY,
    NEXT_GOAL_HOME,
    ScoreState,
    SingularHedgeError,
    Team,
    greeks,
    jump_scatter_stats,
    replay_hedge,
    solve_replication_weights,
)
from inplay.synthetic import make_model_timeline

lam = Intensities(1.3, 0.7)
goals = [(1200.0, Team.AWAY), (2700.0, Team.HOME), (4500.0, Team.HOME)]

print("Replicating MATCH_ODDS_HOME with Next Goal home/away, 1s rebalancing")
print("Goals: away @20', home @45', home @75'")
print("-" * 68)
timeline = make_model_timeline(
    lam, goals=goals, step_s=1.0, bets=[MATCH_ODDS_HOME, NEXT_GOAL_HOME, NEXT_GOAL_AWAY]
)
report = replay_hedge(timeline, MATCH_ODDS_HOME, (NEXT_GOAL_HOME, NEXT_GOAL_AWAY), lam)

for g in report.goals:
    tj = g.target_post - g.target_pre
    pj = g.portfolio_post - g.portfolio_pre
    print(
        f"  goal @{g.timestamp_s:5.0f}s ({g.team.value:4s}): target jump {tj:+.6f}, "
        f"portfolio jump {pj:+.6f}, mismatch {abs(tj - pj):.2e}"
    )
print(f"\n  terminal tracking error: {report.terminal_error:.2e}")
corr, pairs = jump_scatter_stats(report)
print(f"  jump correlation over {len(pairs)} goals: {corr:.6f}")

mid = report.steps[len(report.steps) // 2]
print(
    f"\n  mid-match book: psi = ({mid.psi1:+.4f}, {mid.psi2:+.4f}), "
    f"cash = {mid.cash:+.4f}, portfolio = {mid.portfolio_value:.4f}"
)

print("\nWhy not hedge with match odds bets themselves?")
state = ScoreState(4, 0, clock=0.9)  # four-goal lead, ten minutes left
g_home = greeks(MATCH_ODDS_HOME, state, lam)
g_away = greeks(MATCH_ODDS_AWAY, state, lam)
matrix = np.array(
    [[g_home.delta_home, g_away.delta_home], [g_home.delta_away, g_away.delta_away]]
)
print(f"  4-0 at 90%: match-odds delta matrix determinant = {np.linalg.det(matrix):.2e}")
try:
    solve_replication_weights(greeks(Bet.over(4.5), state, lam), matrix)
except SingularHedgeError as exc:
    print(f"  solve fails as it should: {exc}")
