"""Log returns, excess returns, and the lagged count/return panel.

Returns are log returns on dividend-adjusted year-end closes,
``R[t+1] = ln S[t+1] - ln S[t]``, keyed by t+1.  The panel joins the year-t
marker count to the year-t+1 return; rows missing either side are dropped
and tallied in a drop report (panels are allowed to be unbalanced).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from promises.futuretense import CountRow


class PanelError(ValueError):
    """Inconsistent price, rate, or panel inputs."""


@dataclass(frozen=True)
class PriceSeries:
    """Year-end dividend-adjusted closes for one entity."""

    entity: str
    points: tuple[tuple[int, float], ...]  # (year, price), years strictly increasing

    def __post_init__(self) -> None:
        last_year = None
        for year, price in self.points:
            if price <= 0:
                raise PanelError(f"nonpositive price for {self.entity} in {year}: {price}")
            if last_year is not None and year <= last_year:
                raise PanelError(f"years not strictly increasing for {self.entity} at {year}")
            last_year = year


@dataclass(frozen=True)
class RiskFreeSeries:
    """Annual risk-free rates as decimals, at most one per year."""

    rates: Mapping[int, float]


@dataclass(frozen=True)
class PanelRow:
    entity: str
    year_t: int
    w_t: int
    r_next: float
    rf_next: float | None = None


@dataclass(frozen=True)
class PanelDataset:
    rows: tuple[PanelRow, ...]
    base_year: int

    def __post_init__(self) -> None:
        seen = set()
        for row in self.rows:
            key = (row.entity, row.year_t)
            if key in seen:
                raise PanelError(f"duplicate panel row for {key}")
            seen.add(key)

    @property
    def n_obs(self) -> int:
        return len(self.rows)

    @property
    def entities(self) -> list[str]:
        return sorted({row.entity for row in self.rows})


@dataclass(frozen=True)
class DropReport:
    missing_return: int = 0
    missing_count: int = 0
    rows_kept: int = 0


def annual_log_returns(prices: PriceSeries) -> dict[int, float]:
    """Log returns for consecutive-year pairs, keyed by the later year.

    Gaps of more than one year produce no entry for the missing span.
    """
    if len(prices.points) < 2:
        raise PanelError(f"price series for {prices.entity} has fewer than 2 points")
    out: dict[int, float] = {}
    for (y0, p0), (y1, p1) in zip(prices.points, prices.points[1:]):
        if y1 - y0 == 1:
            out[y1] = math.log(p1) - math.log(p0)
    return out


def excess(r: float, rf: float) -> float:
    """Excess return ``r - rf`` (rf used as an annual decimal, no conversion)."""
    return r - rf


def build_panel(
    counts: Iterable[CountRow],
    prices: Iterable[PriceSeries],
    rf: RiskFreeSeries | None,
    base_year: int,
) -> tuple[PanelDataset, DropReport]:
    """Join year-t counts to year-t+1 returns into a canonical panel.

    Listwise drop: a count row with no computable next-year return, or a
    return with no count row, is dropped and tallied.
    """
    returns_by_entity: dict[str, dict[int, float]] = {}
    for series in prices:
        if series.entity in returns_by_entity:
            raise PanelError(f"duplicate price series for {series.entity}")
        if len(series.points) >= 2:
            returns_by_entity[series.entity] = annual_log_returns(series)
        else:
            returns_by_entity[series.entity] = {}
    rates = rf.rates if rf is not None else {}

    rows = []
    missing_return = 0
    matched_returns = set()
    count_rows = sorted(counts, key=lambda r: (r.entity, r.year))
    for crow in count_rows:
        r_next = returns_by_entity.get(crow.entity, {}).get(crow.year + 1)
        if r_next is None:
            missing_return += 1
            continue
        matched_returns.add((crow.entity, crow.year + 1))
        rows.append(
            PanelRow(
                entity=crow.entity,
                year_t=crow.year,
                w_t=crow.counts.will,
                r_next=r_next,
                rf_next=rates.get(crow.year + 1),
            )
        )
    missing_count = sum(
        1
        for entity, rets in returns_by_entity.items()
        for year in rets
        if (entity, year) not in matched_returns
    )
    if not any(row.year_t == base_year for row in rows):
        raise PanelError(
            f"omitted category absent: no panel rows with year_t == {base_year}"
        )
    panel = PanelDataset(rows=tuple(rows), base_year=base_year)
    report = DropReport(
        missing_return=missing_return,
        missing_count=missing_count,
        rows_kept=len(rows),
    )
    return panel, report


# ---------------------------------------------------------------------------
# CSV interfaces: prices `entity,year,adj_close`; risk-free `year,rate`;
# panel `entity,year_t,w_t,r_next,rf_next`.

def _require_columns(reader: csv.DictReader, needed: tuple[str, ...], what: str) -> None:
    have = set(reader.fieldnames or ())
    missing = [c for c in needed if c not in have]
    if missing:
        raise PanelError(f"{what} CSV is missing column(s): {', '.join(missing)}")


def load_prices_csv(fh) -> list[PriceSeries]:
    reader = csv.DictReader(fh)
    _require_columns(reader, ("entity", "year", "adj_close"), "prices")
    by_entity: dict[str, list[tuple[int, float]]] = {}
    for rec in reader:
        by_entity.setdefault(rec["entity"], []).append(
            (int(rec["year"]), float(rec["adj_close"]))
        )
    series = []
    for entity in sorted(by_entity):
        points = sorted(by_entity[entity])
        series.append(PriceSeries(entity=entity, points=tuple(points)))
    return series


def load_riskfree_csv(fh) -> RiskFreeSeries:
    reader = csv.DictReader(fh)
    _require_columns(reader, ("year", "rate"), "risk-free")
    rates: dict[int, float] = {}
    for rec in reader:
        year = int(rec["year"])
        if year in rates:
            raise PanelError(f"duplicate risk-free rate for year {year}")
        rates[year] = float(rec["rate"])
    return RiskFreeSeries(rates=rates)


def write_panel_csv(panel: PanelDataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["entity", "year_t", "w_t", "r_next", "rf_next"])
    for row in panel.rows:
        writer.writerow(
            [
                row.entity,
                row.year_t,
                row.w_t,
                repr(row.r_next),
                "" if row.rf_next is None else repr(row.rf_next),
            ]
        )


def read_panel_csv(fh, base_year: int) -> PanelDataset:
    reader = csv.DictReader(fh)
    _require_columns(reader, ("entity", "year_t", "w_t", "r_next", "rf_next"), "panel")
    rows = []
    for rec in reader:
        rows.append(
            PanelRow(
                entity=rec["entity"],
                year_t=int(rec["year_t"]),
                w_t=int(rec["w_t"]),
                r_next=float(rec["r_next"]),
                rf_next=float(rec["rf_next"]) if rec["rf_next"] else None,
            )
        )
    rows.sort(key=lambda r: (r.entity, r.year_t))
    return PanelDataset(rows=tuple(rows), base_year=base_year)
