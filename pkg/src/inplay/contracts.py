"""Bet contract catalogue, payoff functions and odds conversions.

All types are immutable value objects, freely shareable across threads.
Canonical text tokens (``MATCH_ODDS_HOME``, ``UNDER_2_5``,
``CORRECT_SCORE_2_1``, ``WINNING_MARGIN_-1``, ``ODD``, ``NEXT_GOAL_AWAY``,
``HT_FT_HOME_DRAW``) are parsed case-insensitively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Outcome(Enum):
    HOME = "HOME"
    DRAW = "DRAW"
    AWAY = "AWAY"


class Team(Enum):
    HOME = "HOME"
    AWAY = "AWAY"


class BetKind(Enum):
    MATCH_ODDS_HOME = "MATCH_ODDS_HOME"
    MATCH_ODDS_AWAY = "MATCH_ODDS_AWAY"
    MATCH_ODDS_DRAW = "MATCH_ODDS_DRAW"
    CORRECT_SCORE = "CORRECT_SCORE"
    OVER = "OVER"
    UNDER = "UNDER"
    ODD = "ODD"
    EVEN = "EVEN"
    WINNING_MARGIN = "WINNING_MARGIN"
    NEXT_GOAL_HOME = "NEXT_GOAL_HOME"
    NEXT_GOAL_AWAY = "NEXT_GOAL_AWAY"
    HT_FT = "HT_FT"


_EUROPEAN_KINDS = frozenset(
    {
        BetKind.MATCH_ODDS_HOME,
        BetKind.MATCH_ODDS_AWAY,
        BetKind.MATCH_ODDS_DRAW,
        BetKind.CORRECT_SCORE,
        BetKind.OVER,
        BetKind.UNDER,
        BetKind.ODD,
        BetKind.EVEN,
        BetKind.WINNING_MARGIN,
    }
)


class NonEuropeanBetError(ValueError):
    """Raised when a path-dependent bet reaches a European-only code path."""


@dataclass(frozen=True)
class Bet:
    """One bet contract.  Parameter fields are only set for the kinds
    that use them (score for CORRECT_SCORE, line for OVER/UNDER, ...)."""

    kind: BetKind
    score: tuple[int, int] | None = None
    line: float | None = None
    margin: int | None = None
    half_time: Outcome | None = None
    full_time: Outcome | None = None

    def __post_init__(self) -> None:
        k = self.kind
        if k is BetKind.CORRECT_SCORE:
            if self.score is None:
                raise ValueError("CORRECT_SCORE needs a score")
            h, a = self.score
            if h < 0 or a < 0:
                raise ValueError("CORRECT_SCORE goals must be nonnegative")
        elif self.score is not None:
            raise ValueError(f"{k.value} takes no score")
        if k in (BetKind.OVER, BetKind.UNDER):
            if self.line is None:
                raise ValueError(f"{k.value} needs a line")
            base = self.line - 0.5
            if base < 0 or base != int(base):
                raise ValueError(f"line must be X.5 with X >= 0, got {self.line}")
        elif self.line is not None:
            raise ValueError(f"{k.value} takes no line")
        if k is BetKind.WINNING_MARGIN:
            if self.margin is None:
                raise ValueError("WINNING_MARGIN needs a margin")
        elif self.margin is not None:
            raise ValueError(f"{k.value} takes no margin")
        if k is BetKind.HT_FT:
            if self.half_time is None or self.full_time is None:
                raise ValueError("HT_FT needs half-time and full-time outcomes")
        elif self.half_time is not None or self.full_time is not None:
            raise ValueError(f"{k.value} takes no half/full time outcomes")

    @property
    def european(self) -> bool:
        return self.kind in _EUROPEAN_KINDS

    # Factories for the parametrised kinds.
    @staticmethod
    def correct_score(home: int, away: int) -> "Bet":
        return Bet(BetKind.CORRECT_SCORE, score=(int(home), int(away)))

    @staticmethod
    def over(line: float) -> "Bet":
        return Bet(BetKind.OVER, line=float(line))

    @staticmethod
    def under(line: float) -> "Bet":
        return Bet(BetKind.UNDER, line=float(line))

    @staticmethod
    def winning_margin(margin: int) -> "Bet":
        return Bet(BetKind.WINNING_MARGIN, margin=int(margin))

    @staticmethod
    def ht_ft(half_time: Outcome, full_time: Outcome) -> "Bet":
        return Bet(BetKind.HT_FT, half_time=half_time, full_time=full_time)

    def __str__(self) -> str:
        return format_bet(self)


MATCH_ODDS_HOME = Bet(BetKind.MATCH_ODDS_HOME)
MATCH_ODDS_AWAY = Bet(BetKind.MATCH_ODDS_AWAY)
MATCH_ODDS_DRAW = Bet(BetKind.MATCH_ODDS_DRAW)
ODD_TOTAL = Bet(BetKind.ODD)
EVEN_TOTAL = Bet(BetKind.EVEN)
NEXT_GOAL_HOME = Bet(BetKind.NEXT_GOAL_HOME)
NEXT_GOAL_AWAY = Bet(BetKind.NEXT_GOAL_AWAY)


def payoff(bet: Bet, final_home: int, final_away: int) -> int:
    """Terminal payoff of a European bet given the final score.

    Path-dependent bets (Next Goal, HT/FT) have no payoff function of the
    final score alone and raise :class:`NonEuropeanBetError`.
    """
    if final_home < 0 or final_away < 0:
        raise ValueError("final scores must be nonnegative")
    k = bet.kind
    if k is BetKind.MATCH_ODDS_HOME:
        return int(final_home > final_away)
    if k is BetKind.MATCH_ODDS_AWAY:
        return int(final_home < final_away)
    if k is BetKind.MATCH_ODDS_DRAW:
        return int(final_home == final_away)
    if k is BetKind.CORRECT_SCORE:
        return int((final_home, final_away) == bet.score)
    total = final_home + final_away
    if k is BetKind.OVER:
        return int(total > bet.line)
    if k is BetKind.UNDER:
        return int(total <= bet.line)
    if k is BetKind.ODD:
        return total % 2
    if k is BetKind.EVEN:
        return 1 - total % 2
    if k is BetKind.WINNING_MARGIN:
        return int(final_home - final_away == bet.margin)
    raise NonEuropeanBetError(f"{format_bet(bet)} is not a European payoff")


def format_bet(bet: Bet) -> str:
    """Canonical text token for a bet."""
    k = bet.kind
    if k is BetKind.CORRECT_SCORE:
        return f"CORRECT_SCORE_{bet.score[0]}_{bet.score[1]}"
    if k in (BetKind.OVER, BetKind.UNDER):
        return f"{k.value}_{int(bet.line - 0.5)}_5"
    if k is BetKind.WINNING_MARGIN:
        return f"WINNING_MARGIN_{bet.margin}"
    if k is BetKind.HT_FT:
        return f"HT_FT_{bet.half_time.value}_{bet.full_time.value}"
    return k.value


def _parse_token(tok: str) -> Bet:
    if tok in (
        "MATCH_ODDS_HOME",
        "MATCH_ODDS_AWAY",
        "MATCH_ODDS_DRAW",
        "ODD",
        "EVEN",
        "NEXT_GOAL_HOME",
        "NEXT_GOAL_AWAY",
    ):
        return Bet(BetKind(tok))
    if tok.startswith("CORRECT_SCORE_"):
        h, a = tok[len("CORRECT_SCORE_"):].split("_")
        return Bet.correct_score(int(h), int(a))
    if tok.startswith("OVER_") or tok.startswith("UNDER_"):
        kind, rest = tok.split("_", 1)
        base, half = rest.split("_")
        if half != "5":
            raise ValueError(tok)
        line = int(base) + 0.5
        return Bet.over(line) if kind == "OVER" else Bet.under(line)
    if tok.startswith("WINNING_MARGIN_"):
        return Bet.winning_margin(int(tok[len("WINNING_MARGIN_"):]))
    if tok.startswith("HT_FT_"):
        ht, ft = tok[len("HT_FT_"):].split("_")
        return Bet.ht_ft(Outcome(ht), Outcome(ft))
    raise ValueError(tok)


def parse_bet(token: str) -> Bet:
    """Parse a canonical bet token (case-insensitive)."""
    try:
        return _parse_token(token.strip().upper())
    except (ValueError, KeyError):
        raise ValueError(f"unrecognised bet token {token!r}") from None


def value_from_decimal(d: float) -> float:
    """Bet value implied by decimal odds: 1/d."""
    d = float(d)
    if not math.isfinite(d) or d < 1.0:
        raise ValueError(f"decimal odds below 1 are arbitrageable, got {d!r}")
    return 1.0 / d


def value_from_fractional(f: float) -> float:
    """Bet value implied by fractional odds: 1/(f+1)."""
    f = float(f)
    if not math.isfinite(f) or f < 0.0:
        raise ValueError(f"fractional odds must be nonnegative, got {f!r}")
    return 1.0 / (f + 1.0)


@dataclass(frozen=True)
class ScoreState:
    """Current score and match clock, the state every pricer conditions on.

    The clock runs over [0, 1] as the played fraction of regulation time;
    ingestion converts minutes by dividing by the configured match length.
    """

    home_goals: int
    away_goals: int
    clock: float

    def __post_init__(self) -> None:
        if self.home_goals < 0 or self.away_goals < 0:
            raise ValueError("goals must be nonnegative")
        if not (0.0 <= self.clock <= 1.0) or not math.isfinite(self.clock):
            raise ValueError(f"clock must lie in [0, 1], got {self.clock!r}")

    def with_goal(self, team: Team, clock: float | None = None) -> "ScoreState":
        clock = self.clock if clock is None else clock
        if team is Team.HOME:
            return ScoreState(self.home_goals + 1, self.away_goals, clock)
        return ScoreState(self.home_goals, self.away_goals + 1, clock)

    def at_clock(self, clock: float) -> "ScoreState":
        return ScoreState(self.home_goals, self.away_goals, clock)


@dataclass(frozen=True)
class Intensities:
    """Risk-neutral goal intensities per match (per regulation time unit)."""

    home: float
    away: float

    def __post_init__(self) -> None:
        for name, lam in (("home", self.home), ("away", self.away)):
            if not math.isfinite(lam) or lam < 0.0:
                raise ValueError(f"{name} intensity must be finite and >= 0, got {lam!r}")

    @property
    def total(self) -> float:
        return self.home + self.away


@dataclass(frozen=True)
class Quote:
    """Back/lay odds for one bet at one timestamp, with derived values.

    Backing buys the payout, so the back value is the buy price; laying
    sells it.  Mid and spread are only defined when both sides are present,
    and only such quotes enter calibration.
    """

    bet: Bet
    back_decimal: float | None = None
    lay_decimal: float | None = None
    value_buy: float | None = None
    value_sell: float | None = None

    @staticmethod
    def from_decimals(bet: Bet, back: float | None, lay: float | None) -> "Quote":
        buy = value_from_decimal(back) if back is not None else None
        sell = value_from_decimal(lay) if lay is not None else None
        return Quote(bet, back_decimal=back, lay_decimal=lay, value_buy=buy, value_sell=sell)

    @staticmethod
    def from_values(bet: Bet, mid: float, spread: float) -> "Quote":
        """Synthetic two-sided quote centred on a model value."""
        if spread <= 0.0:
            raise ValueError("spread must be positive")
        buy = mid + spread / 2.0
        sell = mid - spread / 2.0
        back = 1.0 / buy if 0.0 < buy <= 1.0 else None
        lay = 1.0 / sell if 0.0 < sell <= 1.0 else None
        return Quote(bet, back_decimal=back, lay_decimal=lay, value_buy=buy, value_sell=sell)

    @property
    def two_sided(self) -> bool:
        return self.value_buy is not None and self.value_sell is not None

    @property
    def value_mid(self) -> float | None:
        if not self.two_sided:
            return None
        return 0.5 * (self.value_buy + self.value_sell)

    @property
    def spread(self) -> float | None:
        if not self.two_sided:
            return None
        return abs(self.value_buy - self.value_sell)
