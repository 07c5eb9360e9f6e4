"""Synthetic data generators shared by the unit and acceptance tests."""

from __future__ import annotations

import math

import numpy as np

from promises.econometrics import DesignMatrix
from promises.futuretense import CountRow, FutureCounts
from promises.returns import PriceSeries


def panel_design(
    rng: np.random.Generator,
    n_groups: int,
    n_years: int,
    base_year: int = 1993,
    w_mean: float = 300.0,
    w_between: float = 0.0,
) -> DesignMatrix:
    """Balanced design with columns (w_t, year dummies, cons).

    *w_between* spreads entity-level count means, making w cluster-correlated
    (needed for Moulton-style robust-vs-conventional comparisons).
    """
    years = list(range(base_year, base_year + n_years))
    n = n_groups * n_years
    entities = [f"E{g:04d}" for g in range(n_groups) for _ in range(n_years)]
    base = rng.uniform(w_mean - w_between, w_mean + w_between, size=n_groups)
    w = rng.poisson(np.repeat(base, n_years)).astype(float)
    yr = np.tile(years, n_groups)
    cols = [w] + [(yr == y).astype(float) for y in years[1:]] + [np.ones(n)]
    labels = ["w_t"] + [f"dum{y}" for y in years[1:]] + ["cons"]
    return DesignMatrix.create(labels, np.column_stack(cols), entities, base_year=base_year)


def re_outcome(
    rng: np.random.Generator,
    design: DesignMatrix,
    beta: np.ndarray,
    sigma_u2: float,
    sigma_e2: float,
    exact_moments: bool = False,
) -> np.ndarray:
    """Random-effects outcome y = X beta + u_i + e_it.

    With *exact_moments* the group effects and idiosyncratic draws are
    standardized to exact sample variance, which isolates estimator error
    from draw noise in variance-component recovery runs.
    """
    n = design.n_obs
    u = rng.normal(size=design.n_groups)
    e = rng.normal(size=n)
    if exact_moments:
        if design.n_groups > 1:
            u = (u - u.mean()) / u.std(ddof=1)
        if n > 1:
            e = (e - e.mean()) / e.std(ddof=1)
    u = u * math.sqrt(sigma_u2)
    e = e * math.sqrt(sigma_e2)
    u_rows = np.empty(n)
    for gi, (start, stop) in enumerate(design.group_index.values()):
        u_rows[start:stop] = u[gi]
    return design.values @ beta + u_rows + e


def pipeline_inputs(
    rng: np.random.Generator,
    b_true: float,
    n_entities: int = 88,
    sigma_u: float = 0.10,
    sigma_e: float = 0.30,
) -> tuple[list[CountRow], list[PriceSeries]]:
    """Counts and price series whose log returns follow the panel model.

    Unbalanced: each entity files over a random contiguous span of
    1993-2003.  Prices are constructed so that ln S[t+1] - ln S[t]
    reproduces the model return exactly.
    """
    years = list(range(1993, 2004))
    year_shift = {y: rng.normal(0.08, 0.12) for y in years}
    counts: list[CountRow] = []
    series: list[PriceSeries] = []
    for i in range(n_entities):
        entity = f"E{i:03d}"
        base_w = rng.uniform(100, 1500)
        u_i = rng.normal(0.0, sigma_u)
        start = int(rng.integers(0, 4))
        stop = int(rng.integers(len(years) - 3, len(years)))
        span = years[start : stop + 1]
        prices = {span[0]: 100.0}
        for y in span:
            w = int(rng.poisson(base_w))
            counts.append(CountRow(entity, y, FutureCounts(will=w)))
            r_next = year_shift[y] + b_true * w + u_i + rng.normal(0.0, sigma_e)
            prices[y + 1] = prices[y] * math.exp(r_next)
        series.append(PriceSeries(entity, tuple(sorted(prices.items()))))
    return counts, series
