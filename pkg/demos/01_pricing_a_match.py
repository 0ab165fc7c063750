"""Walk through pricing the bet catalogue during a live match.

Scores are modelled as two independent Poisson processes with constant
per-match intensities.  Every bet value is the risk-neutral expectation of
its payoff given the current score and clock, so related markets must fit
together exactly: match odds sum to one, over/under pairs sum to one, and a
goal moves every price simultaneously.
"""

from inplay import (
    Bet,
    EVEN_TOTAL,
    Intensities,
    MATCH_ODDS_AWAY,
    MATCH_ODDS_DRAW,
    MATCH_ODDS_HOME,
    ODD_TOTAL,
    ScoreState,
    Team,
    price,
    price_european,
)

lam = Intensities(home=1.4, away=0.9)  # expected goals per match
state = ScoreState(home_goals=0, away_goals=0, clock=0.0)

print("=" * 64)
print("Kickoff: 0-0, intensities", (lam.home, lam.away))
print("=" * 64)

catalogue = [
    MATCH_ODDS_HOME,
    MATCH_ODDS_DRAW,
    MATCH_ODDS_AWAY,
    Bet.over(2.5),
    Bet.under(2.5),
    ODD_TOTAL,
    EVEN_TOTAL,
    Bet.correct_score(1, 0),
    Bet.correct_score(1, 1),
    Bet.winning_margin(1),
    Bet.winning_margin(-1),
]
for bet in catalogue:
    result = price(bet, state, lam)
    print(f"  {str(bet):22s} value = {result.value:.6f}")

trio = sum(price(b, state, lam).value for b in (MATCH_ODDS_HOME, MATCH_ODDS_DRAW, MATCH_ODDS_AWAY))
pair = price(Bet.over(2.5), state, lam).value + price(Bet.under(2.5), state, lam).value
print(f"\n  match odds sum  = {trio:.12f}")
print(f"  over+under sum  = {pair:.12f}")

print("\n" + "=" * 64)
print("Minute 30: the away team scores (0-1)")
print("=" * 64)
before = ScoreState(0, 0, 30 / 90)
after = before.with_goal(Team.AWAY)
for bet in (MATCH_ODDS_HOME, MATCH_ODDS_DRAW, MATCH_ODDS_AWAY, Bet.under(2.5)):
    v0 = price(bet, before, lam).value
    v1 = price(bet, after, lam).value
    print(f"  {str(bet):22s} {v0:.4f} -> {v1:.4f}   (jump {v1 - v0:+.4f})")

print("\n" + "=" * 64)
print("Stoppage time: prices pin to the payoff")
print("=" * 64)
final = ScoreState(1, 1, 1.0)
for bet in (MATCH_ODDS_DRAW, Bet.under(2.5), EVEN_TOTAL, Bet.correct_score(1, 1)):
    v = price_european(bet, final, lam).value
    print(f"  {str(bet):22s} value at the whistle = {v:.1f}")
