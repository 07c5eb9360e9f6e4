"""Per-candidate future-tense totals, the winner rule, and the loser-winner t-test.

The winner rule: the candidate with the strictly smaller total of
will/shall/going-to constructions across an election's debates is predicted
to win the popular vote.  Ties are an error, not a coin flip.  The paired
t-test on loser-minus-winner counts is one-sided (the hypothesis is
directional: losers promise more).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from promises import corpus as corpus_mod
from promises._special import student_t_cdf, student_t_critical
from promises.futuretense import count_future

__all__ = [
    "DebateError",
    "ElectionRecord",
    "TTestResult",
    "candidate_totals",
    "predict_winner",
    "loser_winner_ttest",
    "student_t_cdf",
    "student_t_critical",
    "read_elections_csv",
    "load_election_records",
    "election_table",
    "election_chart_svg",
    "chart_rows",
]


class DebateError(ValueError):
    """Bad debate fixtures, transcripts, or records."""


@dataclass(frozen=True)
class ElectionRecord:
    """Future-tense totals for the two major candidates of one election."""

    year: int
    totals: dict[str, int]
    actual_winner: str | None = None

    def __post_init__(self) -> None:
        if len(self.totals) != 2:
            raise DebateError(
                f"election {self.year}: exactly 2 candidates required, got {sorted(self.totals)}"
            )
        if self.actual_winner is not None and self.actual_winner not in self.totals:
            raise DebateError(
                f"election {self.year}: actual winner {self.actual_winner!r} not among candidates"
            )


@dataclass(frozen=True)
class TTestResult:
    t: float | None  # None when sd(d) == 0
    df: int
    significant_90: bool
    mean_diff: float
    sd_diff: float
    critical_90: float
    mean_sign: int  # sign of mean(d); carries the direction when t is undefined


def candidate_totals(
    segments_per_debate: Sequence[Mapping[str, str]],
    candidates: tuple[str, str],
    year: int,
    aliases: Mapping[str, str] | None = None,
    actual_winner: str | None = None,
) -> ElectionRecord:
    """Sum marker totals over each candidate's speaker segments.

    *aliases* maps raw speaker labels to canonical candidate names (exact
    match after trimming, no heuristics).  Moderators and other speakers are
    ignored.  A candidate appearing in no transcript is an error.
    """
    aliases = aliases or {}
    totals = {name: 0 for name in candidates}
    seen = {name: False for name in candidates}
    for segments in segments_per_debate:
        for speaker, text in segments.items():
            name = aliases.get(speaker.strip(), speaker.strip())
            if name in totals:
                seen[name] = True
                totals[name] += count_future(text).total()
    missing = [name for name, ok in seen.items() if not ok]
    if missing:
        raise DebateError(
            f"candidate(s) not found in any transcript: {', '.join(missing)}"
        )
    return ElectionRecord(year=year, totals=totals, actual_winner=actual_winner)


def predict_winner(record: ElectionRecord) -> str:
    """The candidate with the strictly smaller total."""
    (a, ta), (b, tb) = sorted(record.totals.items())
    if ta == tb:
        raise DebateError(
            f"election {record.year}: tie at {ta} markers; the rule is undefined on ties"
        )
    return a if ta < tb else b


def loser_winner_ttest(records: Iterable[ElectionRecord]) -> TTestResult:
    """Paired one-sided t-test of loser-minus-winner totals across elections."""
    diffs = []
    for rec in records:
        if rec.actual_winner is None:
            raise DebateError(f"election {rec.year}: actual winner required for the t-test")
        loser = next(n for n in rec.totals if n != rec.actual_winner)
        diffs.append(rec.totals[loser] - rec.totals[rec.actual_winner])
    n = len(diffs)
    if n < 2:
        raise DebateError(f"need >=2 elections for the t-test, got {n}")
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    df = n - 1
    crit = student_t_critical(0.90, df)
    if sd == 0.0:
        sign = 0 if mean == 0 else (1 if mean > 0 else -1)
        return TTestResult(
            t=None, df=df, significant_90=False, mean_diff=mean, sd_diff=0.0,
            critical_90=crit, mean_sign=sign,
        )
    t = mean / (sd / math.sqrt(n))
    return TTestResult(
        t=t,
        df=df,
        significant_90=t > crit,
        mean_diff=mean,
        sd_diff=sd,
        critical_90=crit,
        mean_sign=0 if mean == 0 else (1 if mean > 0 else -1),
    )


# ---------------------------------------------------------------------------
# fixtures and transcript loading

def read_elections_csv(fh) -> list[ElectionRecord]:
    """Fixture rows ``year,candidate,total,actual_winner_flag``."""
    reader = csv.DictReader(fh)
    missing = [
        c for c in ("year", "candidate", "total") if c not in set(reader.fieldnames or ())
    ]
    if missing:
        raise DebateError(f"elections CSV is missing column(s): {', '.join(missing)}")
    by_year: dict[int, dict[str, int]] = {}
    winners: dict[int, str] = {}
    for rec in reader:
        year = int(rec["year"])
        cand = rec["candidate"].strip()
        by_year.setdefault(year, {})[cand] = int(rec["total"])
        flag = (rec.get("actual_winner_flag") or "").strip()
        if flag in ("1", "true", "True", "yes"):
            if year in winners:
                raise DebateError(f"election {year}: two actual-winner flags")
            winners[year] = cand
    return [
        ElectionRecord(year=year, totals=totals, actual_winner=winners.get(year))
        for year, totals in sorted(by_year.items())
    ]


def load_election_records(
    transcripts_root: str | Path, config_path: str | Path
) -> list[ElectionRecord]:
    """Count totals from a ``<root>/<year>/<debate>.txt`` transcript tree.

    The JSON config lists each election's candidates, optional speaker-label
    aliases, and optional actual winner::

        {"elections": [{"year": 2004, "candidates": ["KERRY", "BUSH"],
                        "aliases": {"MR. BUSH": "BUSH"},
                        "actual_winner": "BUSH"}]}
    """
    root = Path(transcripts_root)
    if not root.is_dir():
        raise DebateError(f"transcripts root not found: {root}")
    config = json.loads(Path(config_path).read_text(encoding="utf-8"))
    records = []
    for entry in config["elections"]:
        year = int(entry["year"])
        year_dir = root / str(year)
        if not year_dir.is_dir():
            raise DebateError(f"no transcript directory for election {year}: {year_dir}")
        segments = []
        for path in sorted(year_dir.glob("*.txt")):
            segments.append(corpus_mod.segment_by_speaker(path.read_text(encoding="utf-8")))
        if not segments:
            raise DebateError(f"no transcripts under {year_dir}")
        cands = entry["candidates"]
        if len(cands) != 2:
            raise DebateError(f"election {year}: exactly 2 candidates required")
        records.append(
            candidate_totals(
                segments,
                (cands[0], cands[1]),
                year=year,
                aliases=entry.get("aliases"),
                actual_winner=entry.get("actual_winner"),
            )
        )
    return records


# ---------------------------------------------------------------------------
# reporting

def election_table(records: Iterable[ElectionRecord]) -> list[dict]:
    """Per-election rows: totals, prediction, actual, hit/miss."""
    rows = []
    for rec in sorted(records, key=lambda r: r.year):
        predicted = predict_winner(rec)
        hit = None if rec.actual_winner is None else predicted == rec.actual_winner
        (c1, t1), (c2, t2) = sorted(rec.totals.items())
        rows.append(
            {
                "year": rec.year,
                "candidate_1": c1,
                "total_1": t1,
                "candidate_2": c2,
                "total_2": t2,
                "predicted": predicted,
                "actual": rec.actual_winner or "",
                "hit": "" if hit is None else ("hit" if hit else "miss"),
            }
        )
    return rows


def chart_rows(records: Iterable[ElectionRecord]) -> list[dict]:
    """Backing data for the grouped bar chart: winner and loser bars per election."""
    rows = []
    for rec in sorted(records, key=lambda r: r.year):
        winner = rec.actual_winner or predict_winner(rec)
        loser = next(n for n in rec.totals if n != winner)
        rows.append(
            {
                "year": rec.year,
                "winner": winner,
                "winner_total": rec.totals[winner],
                "loser": loser,
                "loser_total": rec.totals[loser],
            }
        )
    return rows


def write_chart_csv(rows: list[dict], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["year", "winner", "winner_total", "loser", "loser_total"])
    for row in rows:
        writer.writerow(
            [row["year"], row["winner"], row["winner_total"], row["loser"], row["loser_total"]]
        )


def election_chart_svg(records: Iterable[ElectionRecord]) -> str:
    """Grouped bar chart (winner vs loser totals per election) as an SVG string."""
    rows = chart_rows(records)
    if not rows:
        raise DebateError("no elections to chart")
    bar_w = 28
    gap = 26
    group_w = 2 * bar_w + gap
    left, bottom, top = 60, 46, 30
    plot_h = 240
    width = left + len(rows) * group_w + 20
    height = top + plot_h + bottom
    peak = max(max(r["winner_total"], r["loser_total"]) for r in rows) or 1
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<style>text{font-family:sans-serif;font-size:11px}</style>',
        f'<text x="{left}" y="16">Future tense usage: popular-vote winner vs loser</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{width - 10}" y2="{top + plot_h}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<text x="8" y="{top + 6}">{peak}</text>',
    ]
    for gi, row in enumerate(rows):
        x0 = left + gi * group_w + gap // 2
        for bi, (key, fill) in enumerate((("winner_total", "#4477aa"), ("loser_total", "#cc6677"))):
            h = round(plot_h * row[key] / peak, 2)
            x = x0 + bi * bar_w
            y = round(top + plot_h - h, 2)
            parts.append(
                f'<rect x="{x}" y="{y}" width="{bar_w - 4}" height="{h}" fill="{fill}"/>'
            )
            parts.append(
                f'<text x="{x}" y="{y - 4}">{row[key]}</text>'
            )
        parts.append(
            f'<text x="{x0}" y="{top + plot_h + 16}">{row["year"]}</text>'
        )
    parts.append(
        f'<text x="{left}" y="{height - 8}">blue = popular-vote winner, red = loser</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
