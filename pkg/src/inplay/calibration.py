"""Implied-intensity calibration against quote snapshots.

A snapshot is fitted by minimising the root-mean-square of the mid-versus-
model differences, each measured in units of that quote's half bid-ask
spread.  The search runs a Nelder-Mead simplex on (log lam_home,
log lam_away), then applies a single Gauss-Newton polish using the exact
intensity sensitivities dV/dlam_i = (1 - tau) * delta_i.  Parameter
uncertainties come from inverting the Gauss-Newton normal matrix, so they
inherit the bid-ask spreads' scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .contracts import Intensities, Quote, ScoreState
from . import pricing

__all__ = [
    "QuoteSnapshot",
    "CalibrationResult",
    "SeriesPoint",
    "IntensitySeries",
    "IdentifiabilityError",
    "usable_quotes",
    "objective",
    "calibrate_snapshot",
    "calibrate_series",
    "estimate_drift_vol",
]

COLD_START = Intensities(1.3, 1.1)

# Quotes in effectively settled bets carry no information and break the
# spread weighting, so they are dropped from the residual.
MID_FILTER = (0.001, 0.999)

_GRAD_TOL = 1e-8
_SIMPLEX_TOL = 1e-10


class IdentifiabilityError(ValueError):
    """Snapshot cannot pin down two intensities."""


@dataclass(frozen=True)
class QuoteSnapshot:
    """All quotes observed at one timestamp, with the score in effect."""

    timestamp_s: float
    state: ScoreState
    quotes: tuple[Quote, ...]


@dataclass(frozen=True)
class CalibrationResult:
    intensities: Intensities
    residual: float
    stderr_home: float
    stderr_away: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class SeriesPoint:
    """One calibration step; result is None where the step failed (a gap)."""

    timestamp_s: float
    result: CalibrationResult | None


@dataclass(frozen=True)
class IntensitySeries:
    points: tuple[SeriesPoint, ...]

    def __post_init__(self) -> None:
        ts = [p.timestamp_s for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("series timestamps must be strictly increasing")

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def valid(self) -> list[SeriesPoint]:
        return [p for p in self.points if p.result is not None]


def usable_quotes(snapshot: QuoteSnapshot) -> list[Quote]:
    """Two-sided European quotes inside the mid filter; zero spread is an error.

    Path-dependent bets are left out of the residual: the Gauss-Newton
    machinery leans on the European identity dV/dlam_i = (1-tau) delta_i.
    """
    out = []
    for q in snapshot.quotes:
        if not q.two_sided or not q.bet.european:
            continue
        mid = q.value_mid
        if not (MID_FILTER[0] < mid < MID_FILTER[1]):
            continue
        if q.spread == 0.0:
            raise ValueError(f"zero spread on quote for {q.bet}")
        out.append(q)
    return out


def _residuals(lam: Intensities, quotes: list[Quote], state: ScoreState) -> np.ndarray:
    return np.array(
        [
            (q.value_mid - pricing.price(q.bet, state, lam).value) / (0.5 * q.spread)
            for q in quotes
        ]
    )


def objective(lam: Intensities, snapshot: QuoteSnapshot) -> float:
    """Root mean square of spread-weighted mid-versus-model differences."""
    quotes = usable_quotes(snapshot)
    if not quotes:
        raise ValueError("no usable quotes in snapshot")
    r = _residuals(lam, quotes, snapshot.state)
    return float(math.sqrt(np.mean(r * r)))


def _jacobian(lam: Intensities, quotes: list[Quote], state: ScoreState) -> np.ndarray:
    """d(residual_i)/d(lam_j), from the exact sensitivity (1-tau)*delta_j."""
    rows = []
    for q in quotes:
        s1, s2 = pricing.intensity_sensitivity(q.bet, state, lam)
        w = 0.5 * q.spread
        rows.append((-s1 / w, -s2 / w))
    return np.array(rows)


def _check_identifiable(quotes: list[Quote], state: ScoreState, lam0: Intensities) -> None:
    if len(quotes) < 2:
        raise IdentifiabilityError("need at least two usable quotes")
    distinct = {q.bet for q in quotes}
    if len(distinct) < 2:
        raise IdentifiabilityError("need at least two distinct bet variants")
    deltas = []
    for bet in distinct:
        g = pricing.greeks(bet, state, lam0)
        deltas.append((g.delta_home, g.delta_away))
    for i in range(len(deltas)):
        for j in range(i + 1, len(deltas)):
            a, b = deltas[i], deltas[j]
            cross = abs(a[0] * b[1] - a[1] * b[0])
            scale = math.hypot(*a) * math.hypot(*b)
            if scale > 0.0 and cross > 1e-9 * scale:
                return
    raise IdentifiabilityError(
        "quoted bets have linearly dependent goal sensitivities; "
        "intensities are not identifiable"
    )


def calibrate_snapshot(
    snapshot: QuoteSnapshot, init: Intensities | None = None
) -> CalibrationResult:
    """Fit implied intensities to one snapshot.

    Raises :class:`IdentifiabilityError` when the quoted bets cannot pin
    down two parameters.  A non-converged search still returns its best
    point, flagged ``converged=False``.
    """
    quotes = usable_quotes(snapshot)
    state = snapshot.state
    lam0 = init if init is not None else COLD_START
    if lam0.home <= 0.0 or lam0.away <= 0.0:
        lam0 = COLD_START
    _check_identifiable(quotes, state, lam0)

    def f(u: np.ndarray) -> float:
        lam = Intensities(math.exp(u[0]), math.exp(u[1]))
        r = _residuals(lam, quotes, state)
        return float(math.sqrt(np.mean(r * r)))

    u0 = np.array([math.log(lam0.home), math.log(lam0.away)])
    simplex = np.array([u0, u0 + (0.25, 0.0), u0 + (0.0, 0.25)])
    res = minimize(
        f,
        u0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": _SIMPLEX_TOL,
            "fatol": 1e-12,
            "maxiter": 1000,
            "maxfev": 1500,
        },
    )
    lam = Intensities(math.exp(res.x[0]), math.exp(res.x[1]))
    best = f(res.x)
    iterations = int(res.nit)

    # One Gauss-Newton step with the analytic Jacobian; kept only if it helps.
    jac = _jacobian(lam, quotes, state)
    r = _residuals(lam, quotes, state)
    step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
    polished = Intensities(
        max(lam.home + step[0], 1e-12), max(lam.away + step[1], 1e-12)
    )
    r_pol = _residuals(polished, quotes, state)
    val_pol = float(math.sqrt(np.mean(r_pol * r_pol)))
    if val_pol <= best:
        lam, best, r = polished, val_pol, r_pol
        jac = _jacobian(lam, quotes, state)
        iterations += 1

    grad = jac.T @ r / len(quotes)
    normal = jac.T @ jac
    try:
        cov = np.linalg.inv(normal)
        stderr_home = math.sqrt(max(cov[0, 0], 0.0))
        stderr_away = math.sqrt(max(cov[1, 1], 0.0))
    except np.linalg.LinAlgError:
        stderr_home = stderr_away = math.inf

    converged = bool(res.success) or float(np.linalg.norm(grad)) < _GRAD_TOL
    return CalibrationResult(
        intensities=lam,
        residual=best,
        stderr_home=stderr_home,
        stderr_away=stderr_away,
        iterations=iterations,
        converged=converged,
    )


def calibrate_series(
    snapshots: list[QuoteSnapshot], step_s: float
) -> IntensitySeries:
    """Calibrate a timeline on a fixed grid, warm-starting each step.

    Snapshots are bucketed to floor(t/step)*step, keeping the latest one per
    bucket.  Buckets with no snapshot, or where calibration fails, become
    gap points rather than aborting the series.
    """
    if not snapshots:
        raise ValueError("empty timeline")
    if step_s <= 0.0:
        raise ValueError("step must be positive")
    ts = [s.timestamp_s for s in snapshots]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ValueError("snapshots must be ordered by timestamp")

    buckets: dict[int, QuoteSnapshot] = {}
    for snap in snapshots:
        buckets[int(snap.timestamp_s // step_s)] = snap

    points: list[SeriesPoint] = []
    warm: Intensities | None = None
    for idx in range(min(buckets), max(buckets) + 1):
        t = idx * step_s
        snap = buckets.get(idx)
        if snap is None:
            points.append(SeriesPoint(t, None))
            continue
        try:
            result = calibrate_snapshot(snap, init=warm)
        except (IdentifiabilityError, ValueError):
            points.append(SeriesPoint(t, None))
            continue
        warm = result.intensities
        points.append(SeriesPoint(t, result))
    return IntensitySeries(tuple(points))


def estimate_drift_vol(
    series: IntensitySeries, match_length_min: float = 90.0
) -> tuple[float, float]:
    """Drift and volatility of log total intensity, per match and per
    sqrt-match.

    Uses increments between consecutive valid points; pairs touching a gap
    are skipped.  Needs at least 10 valid points.
    """
    valid = [
        p
        for p in series.points
        if p.result is not None and p.result.intensities.total > 0.0
    ]
    if len(valid) < 10:
        raise ValueError("need at least 10 valid series points")
    unit = match_length_min * 60.0

    drifts = []
    scaled = []
    for a, b in zip(series.points, series.points[1:]):
        if a.result is None or b.result is None:
            continue
        tot_a, tot_b = a.result.intensities.total, b.result.intensities.total
        if tot_a <= 0.0 or tot_b <= 0.0:
            continue
        d_tau = (b.timestamp_s - a.timestamp_s) / unit
        if d_tau <= 0.0:
            continue
        d_ln = math.log(tot_b) - math.log(tot_a)
        drifts.append(d_ln / d_tau)
        scaled.append(d_ln / math.sqrt(d_tau))
    if len(drifts) < 2:
        raise ValueError("need at least 2 consecutive valid pairs")
    mu = float(np.mean(drifts))
    sigma = float(np.std(scaled, ddof=1))
    return mu, sigma
