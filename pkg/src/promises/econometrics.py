"""Panel estimators: random-effects GLS and pooled OLS with cluster-robust errors.

The RE estimator quasi-demeans each variable by its group mean scaled with
theta_i = 1 - sqrt(sigma_e2 / (T_i*sigma_u2 + sigma_e2)) and runs OLS on the
transformed data; variance components come from the Swamy-Arora within /
between regressions.  All least squares goes through an orthogonal
factorization, never the normal equations.

Inference is z/normal for both estimators, with the 95% CI multiplier fixed
at 1.959964 so that table output is bit-stable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from promises._special import normal_cdf, normal_sf2
from promises.returns import PanelDataset, excess

__all__ = [
    "EstimationError",
    "DesignMatrix",
    "VarianceComponents",
    "RegressionResult",
    "build_design",
    "ols",
    "cluster_robust_vcov",
    "swamy_arora",
    "re_gls",
    "pooled_cluster",
    "r_squared_triple",
    "wald_joint",
    "simple_ols",
    "normal_cdf",
]

log = logging.getLogger(__name__)

CI_Z = 1.959964  # normal 97.5% quantile, fixed

# a column is declared dependent when its R diagonal falls below this times
# the largest diagonal entry
_RANK_RTOL = 1e-10
# threshold for "this column transformed to zero" (within-invariant columns)
_ZERO_COL_RTOL = 1e-12


class EstimationError(ValueError):
    """Infeasible or ill-posed estimation input."""


@dataclass(frozen=True)
class DesignMatrix:
    """Labeled regressor columns plus the panel's cluster structure.

    Rows are in canonical (entity, year) order, so each entity occupies one
    contiguous block; ``group_index`` maps entity -> [start, stop).
    """

    labels: tuple[str, ...]
    values: np.ndarray
    clusters: tuple[str, ...]
    group_index: dict[str, tuple[int, int]]
    base_year: int | None = None

    @classmethod
    def create(
        cls,
        labels: Sequence[str],
        values: np.ndarray,
        clusters: Sequence[str],
        base_year: int | None = None,
    ) -> "DesignMatrix":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != len(clusters):
            raise EstimationError("design values must be N x K with one cluster id per row")
        if values.shape[1] != len(labels):
            raise EstimationError("one label per design column required")
        return cls(
            labels=tuple(labels),
            values=values,
            clusters=tuple(clusters),
            group_index=_group_index(clusters),
            base_year=base_year,
        )

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_groups(self) -> int:
        return len(self.group_index)

    def group_sizes(self) -> dict[str, int]:
        return {e: stop - start for e, (start, stop) in self.group_index.items()}


@dataclass(frozen=True)
class VarianceComponents:
    """Swamy-Arora variance components and the per-group quasi-demeaning factor."""

    sigma_u2: float
    sigma_e2: float
    theta: dict[str, float]
    degenerate: bool = False  # sigma_e2 hit zero; RE collapses to the within estimator


@dataclass(frozen=True)
class RegressionResult:
    method: str  # re_gls | pooled_cluster | simple_ols
    dep: str
    labels: tuple[str, ...]
    coef: tuple[float, ...]
    se: tuple[float, ...]
    z: tuple[float, ...]
    p: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]
    n_obs: int
    n_groups: int
    obs_min: int
    obs_avg: float
    obs_max: int
    r2_within: float | None
    r2_between: float | None
    r2_overall: float | None
    wald_chi2: float
    wald_df: int
    wald_chi2_w: float | None
    base_year: int | None = None
    sigma_u2: float | None = None
    sigma_e2: float | None = None
    dropped: tuple[str, ...] = ()


def build_design(panel: PanelDataset, dep: str) -> tuple[DesignMatrix, np.ndarray]:
    """Assemble (w_t, year dummies, cons) columns and the outcome vector.

    ``dep="excess"`` subtracts rf from the next-year return and drops rows
    lacking a risk-free rate (with a warning).  The base year carries no
    dummy; a year losing all rows to drops loses its dummy too.
    """
    if dep not in ("return", "excess"):
        raise EstimationError(f"dep must be 'return' or 'excess', got {dep!r}")
    rows = sorted(panel.rows, key=lambda r: (r.entity, r.year_t))
    if not rows:
        raise EstimationError("panel is empty")
    pre_years = {r.year_t for r in rows}
    if dep == "excess":
        kept = [r for r in rows if r.rf_next is not None]
        if len(kept) < len(rows):
            log.warning(
                "dropped %d rows lacking rf_next for dep=excess", len(rows) - len(kept)
            )
        rows = kept
        if not rows:
            raise EstimationError("no rows carry rf_next; excess return undefined")
    years = sorted({r.year_t for r in rows})
    for lost in sorted(pre_years.difference(years)):
        log.warning("year %d lost all rows after drops; its dummy is omitted", lost)
    if panel.base_year not in years:
        raise EstimationError(
            f"omitted category absent: no rows with year_t == {panel.base_year}"
        )
    dummy_years = [yr for yr in years if yr != panel.base_year]
    labels = ["w_t"] + [f"dum{yr}" for yr in dummy_years] + ["cons"]
    # K < N is enforced at factorization time, not here; the design itself
    # is a valid artifact for inspection even when underdetermined
    n, k = len(rows), len(labels)
    values = np.zeros((n, k))
    values[:, 0] = [r.w_t for r in rows]
    for j, yr in enumerate(dummy_years):
        values[:, 1 + j] = [1.0 if r.year_t == yr else 0.0 for r in rows]
    values[:, -1] = 1.0
    if dep == "return":
        y = np.array([r.r_next for r in rows])
    else:
        y = np.array([excess(r.r_next, r.rf_next) for r in rows])
    design = DesignMatrix.create(
        labels, values, [r.entity for r in rows], base_year=panel.base_year
    )
    return design, y


def ols(X: DesignMatrix | np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least squares via QR; returns (beta, residuals).

    Raises EstimationError naming the dependent columns if X is rank
    deficient (R diagonal below 1e-10 of its largest entry).
    """
    values, labels = _unpack(X)
    beta, resid, _ = _qr_solve(values, np.asarray(y, dtype=float), labels)
    return beta, resid


def cluster_robust_vcov(
    X: DesignMatrix | np.ndarray,
    residuals: np.ndarray,
    clusters: Sequence[str] | None = None,
) -> np.ndarray:
    """Cluster sandwich covariance with the small-sample factor
    ``c = [G/(G-1)] * [(N-1)/(N-K)]``."""
    values, _ = _unpack(X)
    if clusters is None:
        if not isinstance(X, DesignMatrix):
            raise EstimationError("clusters required when X is a bare matrix")
        clusters = X.clusters
    residuals = np.asarray(residuals, dtype=float)
    n, k = values.shape
    groups: dict[str, list[int]] = {}
    for i, cid in enumerate(clusters):
        groups.setdefault(cid, []).append(i)
    g = len(groups)
    if g < 2:
        raise EstimationError("need >=2 clusters for the cluster-robust sandwich")
    meat = np.zeros((k, k))
    for idx in groups.values():
        score = values[idx].T @ residuals[idx]
        meat += np.outer(score, score)
    bread = _xtx_inv(values)
    c = (g / (g - 1.0)) * ((n - 1.0) / (n - k))
    v = c * (bread @ meat @ bread)
    return (v + v.T) / 2.0


def swamy_arora(design: DesignMatrix, y: np.ndarray) -> VarianceComponents:
    """Variance components from the within and between regressions.

    sigma_e2 = within RSS / (N - G - K_within); sigma_u2 = between residual
    variance minus sigma_e2 over the harmonic mean group size, truncated at 0.
    """
    x = design.values
    y = np.asarray(y, dtype=float)
    n, _ = x.shape
    sizes = design.group_sizes()
    g = len(sizes)
    if g < 2:
        raise EstimationError("need >=2 groups for variance components")
    if all(t == 1 for t in sizes.values()):
        raise EstimationError("within regression infeasible: all groups are singletons")

    xd, xbar = _demean(x, design.group_index)
    yd, ybar = _demean(y, design.group_index)
    keep = _nonzero_columns(xd, x)
    if not keep.any():
        raise EstimationError("within regression infeasible: no time-varying regressors")
    rss_w, rank_w = _lstsq_rss(xd[:, keep], yd)
    df_w = n - g - rank_w
    if df_w <= 0:
        raise EstimationError("within regression degrees of freedom exhausted")
    sigma_e2 = rss_w / df_w
    if rss_w <= 1e-24 * max(1.0, float(yd @ yd)):
        sigma_e2 = 0.0

    rss_b, rank_b = _lstsq_rss(xbar, ybar)
    df_b = g - rank_b
    if df_b <= 0:
        raise EstimationError("between regression degrees of freedom exhausted")
    s_b2 = rss_b / df_b
    t_harmonic = g / sum(1.0 / t for t in sizes.values())
    sigma_u2 = max(0.0, s_b2 - sigma_e2 / t_harmonic)

    theta: dict[str, float] = {}
    for entity, t in sizes.items():
        if sigma_u2 == 0.0:
            theta[entity] = 0.0
        elif sigma_e2 == 0.0:
            theta[entity] = 1.0
        else:
            theta[entity] = 1.0 - math.sqrt(sigma_e2 / (t * sigma_u2 + sigma_e2))
    return VarianceComponents(
        sigma_u2=sigma_u2,
        sigma_e2=sigma_e2,
        theta=theta,
        degenerate=sigma_e2 == 0.0,
    )


def re_gls(
    design: DesignMatrix,
    y: np.ndarray,
    components: VarianceComponents | None = None,
    dep: str = "r_next",
) -> RegressionResult:
    """Random-effects GLS via quasi-demeaning.

    *components* may inject known variance components (otherwise Swamy-Arora
    estimates them).  With sigma_u2 = 0 this reduces exactly to pooled OLS
    with conventional errors.
    """
    comps = components if components is not None else swamy_arora(design, y)
    x = design.values
    y = np.asarray(y, dtype=float)
    n, k = x.shape
    theta_rows = np.empty(n)
    for entity, (start, stop) in design.group_index.items():
        theta_rows[start:stop] = comps.theta[entity]
    _, xbar = _demean(x, design.group_index)
    _, ybar = _demean(y, design.group_index)
    xbar_rows = _broadcast_means(xbar, design.group_index, n)
    ybar_rows = _broadcast_means(ybar, design.group_index, n)
    xs = x - theta_rows[:, None] * xbar_rows
    ys = y - theta_rows * ybar_rows

    keep = _nonzero_columns(xs, x)
    dropped = tuple(l for l, kep in zip(design.labels, keep) if not kep)
    if dropped:
        log.warning("re_gls: columns transformed to zero were dropped: %s", ", ".join(dropped))
    kept_labels = tuple(l for l, kep in zip(design.labels, keep) if kep)
    beta_k, resid, r = _qr_solve(xs[:, keep], ys, kept_labels)
    k_kept = int(keep.sum())
    if n - k_kept <= 0:
        raise EstimationError("no residual degrees of freedom")
    s2 = float(resid @ resid) / (n - k_kept)
    rinv = np.linalg.inv(r)
    v = s2 * (rinv @ rinv.T)
    v = (v + v.T) / 2.0

    beta_fit = np.zeros(k)
    beta_fit[keep] = beta_k
    r2w, r2b, r2o = r_squared_triple(design, y, beta_fit)
    wald_chi2, wald_df, wald_w = _walds(beta_k, v, kept_labels)
    return _assemble(
        method="re_gls",
        dep=dep,
        design=design,
        beta_kept=beta_k,
        v_kept=v,
        keep=keep,
        r2=(r2w, r2b, r2o),
        wald=(wald_chi2, wald_df, wald_w),
        sigma_u2=comps.sigma_u2,
        sigma_e2=comps.sigma_e2,
        dropped=dropped,
    )


def pooled_cluster(
    design: DesignMatrix, y: np.ndarray, dep: str = "r_next"
) -> RegressionResult:
    """Pooled OLS with the cluster-robust sandwich, one R-squared reported."""
    x = design.values
    y = np.asarray(y, dtype=float)
    beta, resid, _ = _qr_solve(x, y, design.labels)
    v = cluster_robust_vcov(design, resid)
    r2o = _sq_corr(y, x @ beta)
    wald_chi2, wald_df, wald_w = _walds(beta, v, design.labels)
    keep = np.ones(x.shape[1], dtype=bool)
    return _assemble(
        method="pooled_cluster",
        dep=dep,
        design=design,
        beta_kept=beta,
        v_kept=v,
        keep=keep,
        r2=(None, None, r2o),
        wald=(wald_chi2, wald_df, wald_w),
    )


def r_squared_triple(
    design: DesignMatrix, y: np.ndarray, beta: np.ndarray
) -> tuple[float | None, float | None, float | None]:
    """(within, between, overall) squared correlations of outcome and fit.

    A zero-variance side makes that R-squared undefined (None), not 0.
    """
    y = np.asarray(y, dtype=float)
    fit = design.values @ np.asarray(beta, dtype=float)
    yd, ybar = _demean(y, design.group_index)
    fd, fbar = _demean(fit, design.group_index)
    within = _sq_corr(yd, fd)
    between = _sq_corr(ybar, fbar)
    overall = _sq_corr(y, fit)
    return within, between, overall


def wald_joint(
    beta: np.ndarray, v: np.ndarray, subset: Sequence[int]
) -> tuple[float, int]:
    """chi2 = b_s' V_s^-1 b_s over the *subset* coefficient indices."""
    subset = list(subset)
    b = np.asarray(beta, dtype=float)[subset]
    vs = np.asarray(v, dtype=float)[np.ix_(subset, subset)]
    try:
        chol = np.linalg.cholesky(vs)
    except np.linalg.LinAlgError:
        raise EstimationError("Wald: covariance not positive definite on subset") from None
    w = np.linalg.solve(chol, b)
    return float(w @ w), len(subset)


def simple_ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Bivariate least squares: (slope, intercept, squared correlation)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise EstimationError("x and y must be 1-D vectors of equal length")
    n = x.size
    if n < 3:
        raise EstimationError(f"need at least 3 observations, got {n}")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    if sxx <= _zero_ss_tol(x):
        raise EstimationError("zero-variance x in simple_ols")
    slope = float(xc @ yc) / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    syy = float(yc @ yc)
    if syy <= _zero_ss_tol(y):
        r2 = math.nan
    else:
        r2 = min(1.0, float(xc @ yc) ** 2 / (sxx * syy))
    return slope, intercept, r2


# ---------------------------------------------------------------------------
# internals


def _unpack(X) -> tuple[np.ndarray, tuple[str, ...] | None]:
    if isinstance(X, DesignMatrix):
        return X.values, X.labels
    return np.asarray(X, dtype=float), None


def _group_index(clusters: Sequence[str]) -> dict[str, tuple[int, int]]:
    index: dict[str, tuple[int, int]] = {}
    start = 0
    for i in range(1, len(clusters) + 1):
        if i == len(clusters) or clusters[i] != clusters[start]:
            cid = clusters[start]
            if cid in index:
                raise EstimationError(
                    f"cluster {cid!r} is not contiguous; rows must be in canonical order"
                )
            index[cid] = (start, i)
            start = i
    return index


def _qr_solve(
    x: np.ndarray, y: np.ndarray, labels: tuple[str, ...] | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if x.shape[0] < x.shape[1]:
        raise EstimationError(
            f"underdetermined system: {x.shape[0]} rows for {x.shape[1]} columns"
        )
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    dmax = float(diag.max()) if diag.size else 0.0
    bad = diag <= _RANK_RTOL * dmax if dmax > 0 else np.ones_like(diag, dtype=bool)
    if bad.any():
        names = (
            ", ".join(labels[j] for j in np.nonzero(bad)[0])
            if labels is not None
            else ", ".join(f"col{j}" for j in np.nonzero(bad)[0])
        )
        raise EstimationError(f"design columns linearly dependent: {names}")
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - x @ beta
    return beta, resid, r


def _xtx_inv(x: np.ndarray) -> np.ndarray:
    _, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    dmax = float(diag.max()) if diag.size else 0.0
    if dmax == 0.0 or (diag <= _RANK_RTOL * dmax).any():
        raise EstimationError("X'X is singular")
    rinv = np.linalg.inv(r)
    return rinv @ rinv.T


def _demean(
    arr: np.ndarray, group_index: dict[str, tuple[int, int]]
) -> tuple[np.ndarray, np.ndarray]:
    """Group-demeaned copy of *arr* plus the (G, ...) group means."""
    out = np.empty_like(arr, dtype=float)
    bar = np.empty((len(group_index),) + arr.shape[1:], dtype=float)
    for gi, (start, stop) in enumerate(group_index.values()):
        m = arr[start:stop].mean(axis=0)
        out[start:stop] = arr[start:stop] - m
        bar[gi] = m
    return out, bar


def _broadcast_means(
    bar: np.ndarray, group_index: dict[str, tuple[int, int]], n: int
) -> np.ndarray:
    out = np.empty((n,) + bar.shape[1:], dtype=float)
    for gi, (start, stop) in enumerate(group_index.values()):
        out[start:stop] = bar[gi]
    return out


def _nonzero_columns(transformed: np.ndarray, original: np.ndarray) -> np.ndarray:
    scale = 1.0 + np.abs(original).max(axis=0)
    return np.abs(transformed).max(axis=0) > _ZERO_COL_RTOL * scale


def _lstsq_rss(a: np.ndarray, b: np.ndarray) -> tuple[float, int]:
    """Residual sum of squares and rank of the least-squares fit of b on a.

    SVD-based, so residuals are the projection onto the orthogonal
    complement of span(a) regardless of column collinearity.
    """
    beta, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    resid = b - a @ beta
    return float(resid @ resid), int(rank)


def _zero_ss_tol(v: np.ndarray) -> float:
    scale = 1.0 + float(np.abs(v).max()) if v.size else 1.0
    return (1e-12 * scale) ** 2 * v.size


def _sq_corr(a: np.ndarray, b: np.ndarray) -> float | None:
    ac = a - a.mean()
    bc = b - b.mean()
    ssa = float(ac @ ac)
    ssb = float(bc @ bc)
    if ssa <= _zero_ss_tol(a) or ssb <= _zero_ss_tol(b):
        return None
    return min(1.0, float(ac @ bc) ** 2 / (ssa * ssb))


def _walds(
    beta: np.ndarray, v: np.ndarray, labels: tuple[str, ...]
) -> tuple[float, int, float | None]:
    """Joint Wald on all non-cons columns plus the single-coefficient w_t Wald.

    The cluster sandwich has rank at most G, so with few clusters the joint
    statistic may not exist; it degrades to NaN (reported as missing) rather
    than failing the whole regression.
    """
    non_cons = [j for j, l in enumerate(labels) if l != "cons"]
    try:
        chi2, df = wald_joint(beta, v, non_cons)
    except EstimationError:
        log.warning("joint Wald covariance not positive definite; reported as missing")
        chi2, df = math.nan, len(non_cons)
    wald_w = None
    if "w_t" in labels:
        try:
            wald_w, _ = wald_joint(beta, v, [labels.index("w_t")])
        except EstimationError:
            wald_w = math.nan
    return chi2, df, wald_w


def _assemble(
    method: str,
    dep: str,
    design: DesignMatrix,
    beta_kept: np.ndarray,
    v_kept: np.ndarray,
    keep: np.ndarray,
    r2: tuple[float | None, float | None, float | None],
    wald: tuple[float, int, float | None],
    sigma_u2: float | None = None,
    sigma_e2: float | None = None,
    dropped: tuple[str, ...] = (),
) -> RegressionResult:
    k = len(design.labels)
    coef = np.full(k, math.nan)
    se = np.full(k, math.nan)
    coef[keep] = beta_kept
    se[keep] = np.sqrt(np.diag(v_kept))
    z, p, lo, hi = [], [], [], []
    for b, s in zip(coef, se):
        if math.isfinite(b) and math.isfinite(s) and s > 0:
            zz = b / s
            z.append(zz)
            p.append(normal_sf2(zz))
            lo.append(b - CI_Z * s)
            hi.append(b + CI_Z * s)
        else:
            z.append(math.nan)
            p.append(math.nan)
            lo.append(math.nan)
            hi.append(math.nan)
    sizes = design.group_sizes()
    return RegressionResult(
        method=method,
        dep=dep,
        labels=design.labels,
        coef=tuple(float(c) for c in coef),
        se=tuple(float(s) for s in se),
        z=tuple(z),
        p=tuple(p),
        ci_low=tuple(lo),
        ci_high=tuple(hi),
        n_obs=design.n_obs,
        n_groups=design.n_groups,
        obs_min=min(sizes.values()),
        obs_avg=design.n_obs / design.n_groups,
        obs_max=max(sizes.values()),
        r2_within=r2[0],
        r2_between=r2[1],
        r2_overall=r2[2],
        wald_chi2=wald[0],
        wald_df=wald[1],
        wald_chi2_w=wald[2],
        base_year=design.base_year,
        sigma_u2=sigma_u2,
        sigma_e2=sigma_e2,
        dropped=dropped,
    )
