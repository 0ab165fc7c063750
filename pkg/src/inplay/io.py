"""CSV ingestion and report emission.

File conventions: UTF-8, LF line endings, '.' decimal separator, floats at 9
significant digits.  Timestamps are integer playing-time seconds from
kickoff (half-time break off the clock).

Quotes CSV columns: ``match_id,timestamp_s,market,selection,back_decimal,
lay_decimal`` with two optional trailing columns ``home_goals,away_goals``.
An empty odds cell means that side is absent.  The bet token is
``market_selection`` joined with an underscore, or the bare selection where
that fails to parse (so parity bets can live under a TOTAL_PARITY market).

Events CSV columns: ``match_id,timestamp_s,team,event`` with team HOME or
AWAY (case-insensitive) and event GOAL.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path

from .calibration import (
    CalibrationResult,
    IntensitySeries,
    QuoteSnapshot,
    SeriesPoint,
)
from .contracts import (
    Bet,
    BetKind,
    Intensities,
    Quote,
    ScoreState,
    Team,
    format_bet,
    parse_bet,
)
from .hedging import HedgeReport
from .oracle import SimulatedPath
from .timeline import (
    DEFAULT_HALF_MINUTES,
    DEFAULT_MATCH_MINUTES,
    GoalEvent,
    MatchTimeline,
)

__all__ = [
    "QUOTES_HEADER",
    "EVENTS_HEADER",
    "SERIES_HEADER",
    "fmt_float",
    "parse_quotes_csv",
    "parse_events_csv",
    "build_timeline",
    "load_timeline",
    "write_quotes_csv",
    "write_events_csv",
    "write_intensity_series_csv",
    "parse_intensity_series_csv",
    "write_hedge_report",
    "write_terminal_scores_csv",
]

log = logging.getLogger(__name__)

QUOTES_HEADER = ["match_id", "timestamp_s", "market", "selection", "back_decimal", "lay_decimal"]
SCORE_COLUMNS = ["home_goals", "away_goals"]
EVENTS_HEADER = ["match_id", "timestamp_s", "team", "event"]
SERIES_HEADER = [
    "timestamp_s",
    "lambda_home",
    "lambda_away",
    "residual",
    "stderr_home",
    "stderr_away",
    "converged",
]
STEPS_HEADER = [
    "timestamp_s",
    "target_value",
    "portfolio_value",
    "psi_1",
    "psi_2",
    "cash",
    "z_1",
    "z_2",
    "flag",
]
GOALS_HEADER = [
    "timestamp_s",
    "team",
    "target_pre",
    "target_post",
    "portfolio_pre",
    "portfolio_post",
]
SCORES_HEADER = ["path", "home_goals", "away_goals"]


def fmt_float(x: float) -> str:
    """Fixed 9-significant-digit representation, '.' separator."""
    return format(float(x), ".9g")


def _fmt_ts(t: float) -> str:
    return str(int(t)) if float(t).is_integer() else fmt_float(t)


def _open_write(path):
    return open(path, "w", encoding="utf-8", newline="")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _bet_from_market_selection(market: str, selection: str) -> Bet:
    try:
        return parse_bet(f"{market}_{selection}")
    except ValueError:
        return parse_bet(selection)


def _market_selection(bet: Bet) -> tuple[str, str]:
    token = format_bet(bet)
    k = bet.kind
    if k in (BetKind.MATCH_ODDS_HOME, BetKind.MATCH_ODDS_AWAY, BetKind.MATCH_ODDS_DRAW):
        return "MATCH_ODDS", token[len("MATCH_ODDS_"):]
    if k is BetKind.CORRECT_SCORE:
        return "CORRECT_SCORE", token[len("CORRECT_SCORE_"):]
    if k in (BetKind.OVER, BetKind.UNDER):
        return k.value, token[len(k.value) + 1 :]
    if k in (BetKind.ODD, BetKind.EVEN):
        return "TOTAL_PARITY", token
    if k is BetKind.WINNING_MARGIN:
        return "WINNING_MARGIN", token[len("WINNING_MARGIN_"):]
    if k in (BetKind.NEXT_GOAL_HOME, BetKind.NEXT_GOAL_AWAY):
        return "NEXT_GOAL", token[len("NEXT_GOAL_"):]
    return "HT_FT", token[len("HT_FT_"):]


class QuotesParseError(ValueError):
    """Structural problem in a quotes file, with the offending line number."""


def parse_quotes_csv(
    path, match_length_min: float = DEFAULT_MATCH_MINUTES
) -> list[QuoteSnapshot]:
    """Parse a quotes CSV into timestamp-grouped snapshots.

    Rows with a decimal below 1 are rejected and logged; an unknown bet
    token is an error carrying the line number.  Snapshots only get a score
    state here if the optional score columns are present; otherwise use
    :func:`build_timeline` to reconstruct scores from events.
    """
    _, snapshots = _parse_quotes(path, match_length_min)
    return snapshots


def _parse_quotes(
    path, match_length_min: float = DEFAULT_MATCH_MINUTES
) -> tuple[str, list[QuoteSnapshot]]:
    path = Path(path)
    groups: dict[tuple, list[Quote]] = {}
    match_ids: set[str] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise QuotesParseError(f"{path}: empty file, no snapshots") from None
        has_scores = header == QUOTES_HEADER + SCORE_COLUMNS
        if not has_scores and header != QUOTES_HEADER:
            raise QuotesParseError(
                f"{path}: unexpected header {header!r}; want {QUOTES_HEADER} "
                f"optionally followed by {SCORE_COLUMNS}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise QuotesParseError(f"{path}:{lineno}: expected {len(header)} cells")
            match_id, ts_s, market, selection, back_s, lay_s = row[:6]
            match_ids.add(match_id)
            try:
                ts = float(ts_s)
            except ValueError:
                raise QuotesParseError(f"{path}:{lineno}: bad timestamp {ts_s!r}") from None
            try:
                bet = _bet_from_market_selection(market, selection)
            except ValueError:
                raise QuotesParseError(
                    f"{path}:{lineno}: unknown selection {market!r}/{selection!r}"
                ) from None

            def _decimal(cell: str, side: str) -> float | None:
                if cell == "":
                    return None
                try:
                    d = float(cell)
                except ValueError:
                    raise QuotesParseError(
                        f"{path}:{lineno}: bad {side} decimal {cell!r}"
                    ) from None
                return d

            back = _decimal(back_s, "back")
            lay = _decimal(lay_s, "lay")
            if (back is not None and back < 1.0) or (lay is not None and lay < 1.0):
                log.warning("%s:%d: decimal odds below 1, row rejected", path, lineno)
                continue
            if back is None and lay is None:
                log.warning("%s:%d: no odds on either side, row rejected", path, lineno)
                continue
            if has_scores:
                try:
                    score = (int(row[6]), int(row[7]))
                except ValueError:
                    raise QuotesParseError(f"{path}:{lineno}: bad score cells") from None
                key = (ts, score)
            else:
                key = (ts, None)
            groups.setdefault(key, []).append(Quote.from_decimals(bet, back, lay))

    if not groups:
        raise QuotesParseError(f"{path}: no snapshots")
    if len(match_ids) > 1:
        raise QuotesParseError(f"{path}: multiple match ids {sorted(match_ids)}")

    snapshots = []
    for (ts, score) in sorted(groups, key=lambda k: (k[0],)):
        state = None
        if score is not None:
            clock = min(max(ts / (match_length_min * 60.0), 0.0), 1.0)
            state = ScoreState(score[0], score[1], clock)
        snapshots.append(QuoteSnapshot(ts, state, tuple(groups[(ts, score)])))
    return match_ids.pop(), snapshots


def parse_events_csv(path) -> list[GoalEvent]:
    path = Path(path)
    events: list[GoalEvent] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        if header != EVENTS_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}; want {EVENTS_HEADER}")
        last = -math.inf
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            _, ts_s, team_s, event_s = row
            ts = float(ts_s)
            if ts < last:
                raise ValueError(f"{path}:{lineno}: timestamps must not decrease")
            last = ts
            if event_s.strip().upper() != "GOAL":
                raise ValueError(f"{path}:{lineno}: unknown event {event_s!r}")
            try:
                team = Team(team_s.strip().upper())
            except ValueError:
                raise ValueError(f"{path}:{lineno}: unknown team {team_s!r}") from None
            events.append(GoalEvent(ts, team))
    return events


def build_timeline(
    snapshots: list[QuoteSnapshot],
    events: list[GoalEvent],
    match_id: str = "match",
    match_length_min: float = DEFAULT_MATCH_MINUTES,
    half_length_min: float = DEFAULT_HALF_MINUTES,
) -> MatchTimeline:
    """Assemble a timeline, reconstructing snapshot scores from the events.

    Snapshots that already carry a score are cross-checked: the score must
    equal the running score somewhere between "no goal at this second yet"
    and "all goals at this second counted", otherwise a warning names the
    timestamp and the reconstructed score wins for downstream pricing.
    """
    filled: list[QuoteSnapshot] = []
    for snap in snapshots:
        ts = snap.timestamp_s
        before = [0, 0]
        same_ts: list[Team] = []
        for ev in events:
            if ev.timestamp_s < ts:
                before[0 if ev.team is Team.HOME else 1] += 1
            elif ev.timestamp_s == ts:
                same_ts.append(ev.team)
        acceptable = [tuple(before)]
        running = list(before)
        for team in same_ts:
            running[0 if team is Team.HOME else 1] += 1
            acceptable.append(tuple(running))
        clock = min(max(ts / (match_length_min * 60.0), 0.0), 1.0)
        if snap.state is None:
            state = ScoreState(acceptable[-1][0], acceptable[-1][1], clock)
            filled.append(QuoteSnapshot(ts, state, snap.quotes))
        else:
            score = (snap.state.home_goals, snap.state.away_goals)
            if score not in acceptable:
                log.warning(
                    "snapshot at %ss: score column %s disagrees with events %s",
                    ts,
                    score,
                    acceptable[-1],
                )
                state = ScoreState(acceptable[-1][0], acceptable[-1][1], clock)
                filled.append(QuoteSnapshot(ts, state, snap.quotes))
            else:
                filled.append(QuoteSnapshot(ts, snap.state.at_clock(clock), snap.quotes))
    return MatchTimeline(
        match_id=match_id,
        events=tuple(events),
        snapshots=tuple(filled),
        match_length_min=match_length_min,
        half_length_min=half_length_min,
    )


def load_timeline(
    quotes_path,
    events_path,
    match_length_min: float = DEFAULT_MATCH_MINUTES,
    half_length_min: float = DEFAULT_HALF_MINUTES,
) -> MatchTimeline:
    match_id, snapshots = _parse_quotes(quotes_path, match_length_min)
    events = parse_events_csv(events_path)
    return build_timeline(
        snapshots,
        events,
        match_id=match_id,
        match_length_min=match_length_min,
        half_length_min=half_length_min,
    )


def write_quotes_csv(
    timeline: MatchTimeline, path, include_scores: bool = True
) -> None:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(QUOTES_HEADER + (SCORE_COLUMNS if include_scores else []))
        for snap in timeline.snapshots:
            for q in snap.quotes:
                market, selection = _market_selection(q.bet)
                row = [
                    timeline.match_id,
                    _fmt_ts(snap.timestamp_s),
                    market,
                    selection,
                    fmt_float(q.back_decimal) if q.back_decimal is not None else "",
                    fmt_float(q.lay_decimal) if q.lay_decimal is not None else "",
                ]
                if include_scores:
                    row += [str(snap.state.home_goals), str(snap.state.away_goals)]
                w.writerow(row)


def write_events_csv(events: list[GoalEvent], path, match_id: str = "match") -> None:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(EVENTS_HEADER)
        for ev in events:
            w.writerow([match_id, _fmt_ts(ev.timestamp_s), ev.team.value, "GOAL"])


def write_intensity_series_csv(series: IntensitySeries, path) -> None:
    """One row per step; gap steps leave every field after the timestamp empty."""
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(SERIES_HEADER)
        for point in series.points:
            if point.result is None:
                w.writerow([_fmt_ts(point.timestamp_s), "", "", "", "", "", ""])
                continue
            r = point.result
            w.writerow(
                [
                    _fmt_ts(point.timestamp_s),
                    fmt_float(r.intensities.home),
                    fmt_float(r.intensities.away),
                    fmt_float(r.residual),
                    fmt_float(r.stderr_home),
                    fmt_float(r.stderr_away),
                    "true" if r.converged else "false",
                ]
            )


def parse_intensity_series_csv(path) -> IntensitySeries:
    points: list[SeriesPoint] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != SERIES_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for row in reader:
            if not row:
                continue
            ts = float(row[0])
            if row[1] == "":
                points.append(SeriesPoint(ts, None))
                continue
            result = CalibrationResult(
                intensities=Intensities(float(row[1]), float(row[2])),
                residual=float(row[3]),
                stderr_home=float(row[4]),
                stderr_away=float(row[5]),
                iterations=0,
                converged=row[6] == "true",
            )
            points.append(SeriesPoint(ts, result))
    return IntensitySeries(tuple(points))


def write_hedge_report(report: HedgeReport, out_dir) -> dict:
    """Emit steps.csv, goals.csv and summary.json; returns the summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with _open_write(out_dir / "steps.csv") as fh:
        w = _writer(fh)
        w.writerow(STEPS_HEADER)
        for s in report.steps:
            w.writerow(
                [
                    _fmt_ts(s.timestamp_s),
                    fmt_float(s.target_value),
                    fmt_float(s.portfolio_value),
                    fmt_float(s.psi1),
                    fmt_float(s.psi2),
                    fmt_float(s.cash),
                    fmt_float(s.z1),
                    fmt_float(s.z2),
                    s.flag,
                ]
            )
    with _open_write(out_dir / "goals.csv") as fh:
        w = _writer(fh)
        w.writerow(GOALS_HEADER)
        for g in report.goals:
            w.writerow(
                [
                    _fmt_ts(g.timestamp_s),
                    g.team.value,
                    fmt_float(g.target_pre),
                    fmt_float(g.target_post),
                    fmt_float(g.portfolio_pre),
                    fmt_float(g.portfolio_post),
                ]
            )
    summary = {
        "target": format_bet(report.target),
        "instruments": [format_bet(b) for b in report.instruments],
        "steps": len(report.steps),
        "goals": len(report.goals),
        "terminal_error": report.terminal_error,
        "jump_correlation": report.jump_correlation,
    }
    with _open_write(out_dir / "summary.json") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary


def write_terminal_scores_csv(paths: list[SimulatedPath], path) -> None:
    with _open_write(path) as fh:
        w = _writer(fh)
        w.writerow(SCORES_HEADER)
        for i, p in enumerate(paths):
            w.writerow([str(i), str(p.home_goals), str(p.away_goals)])
