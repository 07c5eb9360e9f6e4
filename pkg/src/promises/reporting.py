"""Fixed-width regression tables and machine-readable JSON results.

The text layout mirrors the familiar panel-regression console output:
a header block (observations, groups, R-squared, Wald) followed by the
coefficient table with Coef., Std. Err., z, P>|z| and the 95% interval.
Output is deterministic: no timestamps, stable float formatting.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict

from promises.econometrics import RegressionResult

_WIDTH = 78
_LABEL_W = 12


def render_text(result: RegressionResult) -> str:
    if result.method == "re_gls":
        header = _re_header(result)
    elif result.method == "pooled_cluster":
        header = _pooled_header(result)
    else:
        header = [f"{result.method} regression", _pair("Number of obs", f"{result.n_obs:d}")]
    lines = header + _coef_table(result)
    return "\n".join(lines) + "\n"


def to_json(result: RegressionResult) -> str:
    doc = asdict(result)
    doc["ci_multiplier"] = 1.959964
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def result_from_json(text: str) -> RegressionResult:
    doc = json.loads(text)
    doc.pop("ci_multiplier", None)
    for key in ("labels", "coef", "se", "z", "p", "ci_low", "ci_high", "dropped"):
        doc[key] = tuple(doc[key])
    return RegressionResult(**doc)


def _re_header(r: RegressionResult) -> list[str]:
    left = [
        "Random-effects GLS regression",
        "Group variable (i): entity",
        "",
        f"R-sq:  within  = {_r2(r.r2_within)}",
        f"       between = {_r2(r.r2_between)}",
        f"       overall = {_r2(r.r2_overall)}",
        "",
        "Random effects u_i ~ Gaussian",
        "corr(u_i, X)   = 0 (assumed)",
        "",
    ]
    right = [
        _pair("Number of obs", f"{r.n_obs:d}"),
        _pair("Number of groups", f"{r.n_groups:d}"),
        "",
        _pair("Obs per group: min", f"{r.obs_min:d}"),
        _pair("               avg", f"{r.obs_avg:.1f}"),
        _pair("               max", f"{r.obs_max:d}"),
        "",
        _pair(f"Wald chi2({r.wald_df})", _opt2(r.wald_chi2)),
        _pair("Prob > chi2", _prob_chi2(r)),
        _pair("Wald chi2(1) w_t", _opt2(r.wald_chi2_w)),
    ]
    return _two_columns(left, right)


def _pooled_header(r: RegressionResult) -> list[str]:
    left = [
        "Regression with robust standard errors",
        f"Number of clusters (entity): {r.n_groups:d}",
        "",
        "",
    ]
    right = [
        _pair("Number of obs", f"{r.n_obs:d}"),
        _pair("R-squared", _r2(r.r2_overall)),
        _pair(f"Wald chi2({r.wald_df})", _opt2(r.wald_chi2)),
        _pair("Wald chi2(1) w_t", _opt2(r.wald_chi2_w)),
    ]
    return _two_columns(left, right)


def _coef_table(r: RegressionResult) -> list[str]:
    rule = "-" * _WIDTH
    mid = "-" * (_LABEL_W + 1) + "+" + "-" * (_WIDTH - _LABEL_W - 2)
    dep = r.dep[: _LABEL_W].rjust(_LABEL_W)
    lines = [rule]
    if r.method == "pooled_cluster":
        lines.append(" " * (_LABEL_W + 1) + "|" + "Robust".rjust(23))
    lines.append(
        f"{dep} |      Coef.   Std. Err.      z    P>|z|     [95% Conf. Interval]"
    )
    lines.append(mid)
    for i, label in enumerate(r.labels):
        lines.append(
            f"{label[:_LABEL_W].rjust(_LABEL_W)} | "
            f"{_coef(r.coef[i])}  {_coef(r.se[i])} {_num(r.z[i], 8, 2)}"
            f"  {_num(r.p[i], 6, 3)}   {_coef(r.ci_low[i])}  {_coef(r.ci_high[i])}"
        )
    lines.append(rule)
    if r.dropped:
        lines.append(f"dropped (transformed to zero): {', '.join(r.dropped)}")
    if r.sigma_u2 is not None and r.sigma_e2 is not None:
        lines.append(f"sigma_u = {math.sqrt(r.sigma_u2):.7g}   sigma_e = {math.sqrt(r.sigma_e2):.7g}")
    return lines


def _two_columns(left: list[str], right: list[str]) -> list[str]:
    rows = max(len(left), len(right))
    left += [""] * (rows - len(left))
    right += [""] * (rows - len(right))
    out = []
    for l, rgt in zip(left, right):
        if not l and not rgt:
            out.append("")
        else:
            out.append(f"{l:<46}{rgt}".rstrip())
    return out


def _pair(label: str, value: str) -> str:
    return f"{label:<19}= {value:>9}"


def _coef(x: float, width: int = 10) -> str:
    """Coefficient format: 7 decimals with the leading zero stripped."""
    if not math.isfinite(x):
        return str(x)[:width].rjust(width)
    if abs(x) >= 100:
        s = f"{x:.5g}"
    else:
        s = f"{x:.7f}"
        if s.startswith("0."):
            s = s[1:]
        elif s.startswith("-0."):
            s = "-" + s[2:]
    return s.rjust(width)


def _num(x: float, width: int, decimals: int) -> str:
    if not math.isfinite(x):
        return str(x)[:width].rjust(width)
    return f"{x:.{decimals}f}".rjust(width)


def _r2(x: float | None) -> str:
    return "." if x is None else f"{x:.4f}"


def _opt2(x: float | None) -> str:
    return "." if x is None or not math.isfinite(x) else f"{x:.2f}"


def _prob_chi2(r: RegressionResult) -> str:
    if not math.isfinite(r.wald_chi2):
        return "."
    return f"{_chi2_p(r.wald_chi2, r.wald_df):.4f}"


def _chi2_p(chi2: float, df: int) -> float:
    """Upper tail of the chi-squared distribution: Q(df/2, chi2/2)."""
    return _gammainc_upper(df / 2.0, chi2 / 2.0)


def _gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) (series / continued fraction)."""
    if x < 0 or a <= 0:
        return math.nan
    if x == 0:
        return 1.0
    if x < a + 1.0:
        # lower series
        term = 1.0 / a
        total = term
        k = a
        for _ in range(500):
            k += 1.0
            term *= x / k
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        p = total * math.exp(-x + a * math.log(x) - math.lgamma(a))
        return max(0.0, 1.0 - p)
    # continued fraction for Q
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))
