"""Independent verification engines: path simulation, Monte Carlo pricing and
an extended-precision enumeration pricer.

Nothing in here is used by the production pricing paths; the point is to
cross-check them.  Randomness is PCG64, seeded per batch of 65536 paths by
``SeedSequence([seed, batch_index])`` so results are reproducible and
independent of how batches might be farmed out to workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .contracts import Bet, BetKind, Intensities, ScoreState, Team, payoff
from .distributions import cap_for_tail

__all__ = [
    "SimulatedPath",
    "simulate_paths",
    "mc_price",
    "enumerate_price",
    "enumeration_remainder",
]

_BATCH = 1 << 16


@dataclass(frozen=True)
class SimulatedPath:
    """Goal events (time in match units, scoring team) and the terminal score."""

    events: tuple[tuple[float, Team], ...]
    home_goals: int
    away_goals: int


def _batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, batch_index])))


def _arrival_matrix(
    rng: np.random.Generator, lam: float, start_clock: float, n: int
) -> np.ndarray:
    """Absolute goal times per path, padded with +inf beyond the final whistle.

    Times are exponential inter-arrivals accumulated from the current clock;
    the column count is chosen so the chance of overflowing it is < 1e-14.
    """
    horizon = 1.0 - start_clock
    if lam <= 0.0 or horizon <= 0.0:
        return np.full((n, 1), np.inf)
    cols = cap_for_tail(lam * horizon, 1e-14, 4) + 2
    gaps = rng.exponential(scale=1.0 / lam, size=(n, cols))
    times = start_clock + np.cumsum(gaps, axis=1)
    times[times > 1.0] = np.inf
    return times


def simulate_paths(
    lam: Intensities, start: ScoreState, n: int, seed: int
) -> list[SimulatedPath]:
    """Simulate n goal-event paths from the given state to the final whistle."""
    if n < 1:
        raise ValueError("need at least one path")
    paths: list[SimulatedPath] = []
    done = 0
    batch_index = 0
    while done < n:
        size = min(_BATCH, n - done)
        rng = _batch_rng(seed, batch_index)
        t_home = _arrival_matrix(rng, lam.home, start.clock, size)
        t_away = _arrival_matrix(rng, lam.away, start.clock, size)
        for i in range(size):
            th = t_home[i][np.isfinite(t_home[i])]
            ta = t_away[i][np.isfinite(t_away[i])]
            events = sorted(
                [(float(t), Team.HOME) for t in th] + [(float(t), Team.AWAY) for t in ta]
            )
            paths.append(
                SimulatedPath(
                    events=tuple(events),
                    home_goals=start.home_goals + len(th),
                    away_goals=start.away_goals + len(ta),
                )
            )
        done += size
        batch_index += 1
    return paths


def _outcome_sign(hs: np.ndarray, aw: np.ndarray) -> np.ndarray:
    return np.sign(hs - aw)


_SIGN_FOR = {"HOME": 1, "DRAW": 0, "AWAY": -1}


def _payoff_batch(
    bet: Bet,
    state: ScoreState,
    t_home: np.ndarray,
    t_away: np.ndarray,
    half_clock: float,
    ht_score: tuple[int, int] | None,
) -> np.ndarray:
    n_home = state.home_goals + np.isfinite(t_home).sum(axis=1)
    n_away = state.away_goals + np.isfinite(t_away).sum(axis=1)

    if bet.kind in (BetKind.NEXT_GOAL_HOME, BetKind.NEXT_GOAL_AWAY):
        first_home = t_home[:, 0]
        first_away = t_away[:, 0]
        if bet.kind is BetKind.NEXT_GOAL_HOME:
            return (first_home < first_away).astype(float)
        return (first_away < first_home).astype(float)

    if bet.kind is BetKind.HT_FT:
        if state.clock < half_clock:
            ht_h = state.home_goals + (t_home <= half_clock).sum(axis=1)
            ht_a = state.away_goals + (t_away <= half_clock).sum(axis=1)
            ht_sign = _outcome_sign(ht_h, ht_a)
        else:
            if ht_score is None:
                raise ValueError("half-time score required once clock >= half_clock")
            ht_sign = np.full(len(n_home), np.sign(ht_score[0] - ht_score[1]))
        ft_sign = _outcome_sign(n_home, n_away)
        ok = (ht_sign == _SIGN_FOR[bet.half_time.value]) & (
            ft_sign == _SIGN_FOR[bet.full_time.value]
        )
        return ok.astype(float)

    # European payoffs: evaluate the scalar payoff once per distinct final
    # score rather than re-deriving grid logic from the pricers.
    finals = n_home * 10_000 + n_away
    uniq, inverse = np.unique(finals, return_inverse=True)
    values = np.array([payoff(bet, int(f // 10_000), int(f % 10_000)) for f in uniq], float)
    return values[inverse]


def mc_price(
    bet: Bet,
    state: ScoreState,
    lam: Intensities,
    n: int,
    seed: int,
    half_clock: float = 0.5,
    ht_score: tuple[int, int] | None = None,
) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of a bet value."""
    if n < 1000:
        raise ValueError("Monte Carlo pricing needs n >= 1000")
    total = 0.0
    total_sq = 0.0
    done = 0
    batch_index = 0
    while done < n:
        size = min(_BATCH, n - done)
        rng = _batch_rng(seed, batch_index)
        t_home = _arrival_matrix(rng, lam.home, state.clock, size)
        t_away = _arrival_matrix(rng, lam.away, state.clock, size)
        pays = _payoff_batch(bet, state, t_home, t_away, half_clock, ht_score)
        total += float(pays.sum())
        total_sq += float((pays * pays).sum())
        done += size
        batch_index += 1
    mean = total / n
    var = max(total_sq - total * total / n, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


def _payoff_grid_longdouble(
    payoff_spec: Mapping[tuple[int, int], float] | np.ndarray | Callable[[int, int], float],
    state: ScoreState,
    cap: int,
) -> np.ndarray:
    grid = np.zeros((cap + 1, cap + 1), dtype=np.longdouble)
    if isinstance(payoff_spec, np.ndarray):
        if payoff_spec.shape != (cap + 1, cap + 1):
            raise ValueError(f"payoff array must have shape {(cap + 1, cap + 1)}")
        grid[:, :] = payoff_spec
    elif isinstance(payoff_spec, Mapping):
        for (k1, k2), v in payoff_spec.items():
            i, j = k1 - state.home_goals, k2 - state.away_goals
            if 0 <= i <= cap and 0 <= j <= cap:
                grid[i, j] = v
    else:
        for i in range(cap + 1):
            for j in range(cap + 1):
                grid[i, j] = payoff_spec(state.home_goals + i, state.away_goals + j)
    return grid


def _pmf_longdouble(mean: float, cap: int) -> np.ndarray:
    p = np.zeros(cap + 1, dtype=np.longdouble)
    if mean == 0.0:
        p[0] = 1.0
        return p
    m = np.longdouble(mean)
    p[0] = np.exp(-m)
    ratios = m / np.arange(1, cap + 1, dtype=np.longdouble)
    p[1:] = p[0] * np.cumprod(ratios)
    return p


def enumerate_price(
    payoff_spec: Mapping[tuple[int, int], float] | np.ndarray | Callable[[int, int], float],
    state: ScoreState,
    lam: Intensities,
    cap: int = 60,
) -> float:
    """Ground-truth double sum in 80-bit extended precision.

    The Poisson weights come from a cumulative-product recurrence, a
    different algorithm from the log-space route the pricers use.  Payoffs
    may be given as a dict keyed by absolute final score, a dense
    (cap+1)x(cap+1) array anchored at the current score, or a callable.
    """
    if cap < 25:
        raise ValueError("cap must be at least 25")
    grid = _payoff_grid_longdouble(payoff_spec, state, cap)
    horizon = 1.0 - state.clock
    p1 = _pmf_longdouble(lam.home * horizon, cap)
    p2 = _pmf_longdouble(lam.away * horizon, cap)
    return float(p1 @ grid @ p2)


def enumeration_remainder(state: ScoreState, lam: Intensities, cap: int = 60) -> float:
    """Upper bound on the probability mass outside the enumeration grid."""
    horizon = 1.0 - state.clock
    p1 = _pmf_longdouble(lam.home * horizon, cap)
    p2 = _pmf_longdouble(lam.away * horizon, cap)
    return float(1.0 - p1.sum() * p2.sum())
