"""Statistical battery: OLS regression, one-way and repeated-measures ANOVA,
t-tests, and the t/F distribution functions behind their p-values.

P-values come from the regularized incomplete beta function, evaluated with a
modified-Lentz continued fraction converged to 1e-14. Survival functions are
computed directly (not as 1 - cdf) so small p-values keep full precision.
All arithmetic is float64; every p-value lies in (0, 1].
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

# Smallest positive double: the "p -> 0" convention for infinite statistics.
P_FLOOR = 5e-324

_CF_EPS = 1e-14
_CF_TINY = 1e-300
_CF_MAX_ITER = 600


class StatError(ValueError):
    pass


@dataclass(frozen=True)
class OlsResult:
    slope: float
    intercept: float
    r_squared: float
    p_value: float
    n: int


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    df_between: int
    df_within: int
    p_value: float


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    df: int
    p_value: float


# Stirling series for lgamma(z) - (z - 1/2) ln z + z - ln(2 pi)/2, z >= ~10.
_STIRLING = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0)


def _stirling_tail(z: float) -> float:
    rz2 = 1.0 / (z * z)
    acc = 0.0
    power = 1.0 / z
    for coeff in _STIRLING:
        acc += coeff * power
        power *= rz2
    return acc


def _log_beta(a: float, b: float) -> float:
    """ln B(a, b). For a large argument, lgamma(a+b) - lgamma(a) is formed via
    the Stirling series so the difference keeps absolute precision."""
    if a < b:
        a, b = b, a
    if a >= 256.0:
        ratio = (
            (a - 0.5) * math.log1p(b / a)
            + b * math.log(a + b)
            - b
            + _stirling_tail(a + b)
            - _stirling_tail(a)
        )
        return math.lgamma(b) - ratio
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise StatError(f"beta parameters must be positive, got a={a}, b={b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_sf(x: float, df: float) -> float:
    """Upper tail P(T > x) of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise StatError(f"degrees of freedom must be positive, got {df}")
    if math.isinf(x):
        return 0.0 if x > 0 else 1.0
    tail = 0.5 * betainc_reg(df / 2.0, 0.5, df / (df + x * x))
    return tail if x >= 0 else 1.0 - tail


def t_cdf(x: float, df: float) -> float:
    return 1.0 - t_sf(x, df)


def f_sf(x: float, df1: float, df2: float) -> float:
    """Upper tail P(F > x) of the F distribution."""
    if df1 <= 0 or df2 <= 0:
        raise StatError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return betainc_reg(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x))


def f_cdf(x: float, df1: float, df2: float) -> float:
    return 1.0 - f_sf(x, df1, df2)


def _clamp_p(p: float) -> float:
    return min(1.0, max(P_FLOOR, p))


def ols(x, y) -> OlsResult:
    """Simple least-squares line fit with a two-tailed slope test (df = n - 2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise StatError("x and y must be aligned 1-D sequences")
    n = len(x)
    if n < 3:
        raise StatError(f"OLS needs at least 3 points, got {n}")
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    dy = y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise StatError("degenerate regressor: x is constant")
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    residuals = y - (intercept + slope * x)
    ss_res = float(residuals @ residuals)
    ss_tot = float(dy @ dy)
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0
    se_sq = (ss_res / (n - 2)) / sxx
    if se_sq <= 0.0:
        p = 1.0 if slope == 0.0 else P_FLOOR
        t = 0.0 if slope == 0.0 else math.copysign(math.inf, slope)
    else:
        t = slope / math.sqrt(se_sq)
        p = _clamp_p(2.0 * t_sf(abs(t), n - 2))
    return OlsResult(slope=slope, intercept=float(intercept), r_squared=float(r_squared), p_value=p, n=n)


def one_way_anova(groups) -> AnovaResult:
    """Classic between/within decomposition over two or more groups."""
    data = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(data) < 2:
        raise StatError(f"ANOVA needs at least 2 groups, got {len(data)}")
    for i, g in enumerate(data):
        if len(g) < 2:
            raise StatError(f"ANOVA group {i} needs at least 2 values, got {len(g)}")
    total_n = sum(len(g) for g in data)
    grand = sum(float(g.sum()) for g in data) / total_n
    ss_between = sum(len(g) * (float(g.mean()) - grand) ** 2 for g in data)
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in data)
    df_between = len(data) - 1
    df_within = total_n - len(data)
    if ss_within == 0.0:
        if ss_between == 0.0:
            return AnovaResult(0.0, df_between, df_within, 1.0)
        return AnovaResult(math.inf, df_between, df_within, P_FLOOR)
    f = (ss_between / df_between) / (ss_within / df_within)
    return AnovaResult(float(f), df_between, df_within, _clamp_p(f_sf(f, df_between, df_within)))


def rm_anova(table) -> AnovaResult:
    """One-way within-subjects ANOVA on a complete subjects x conditions matrix.

    F = MS_condition / MS_(condition x subject), with df (k-1) and (k-1)(n-1);
    no sphericity correction is applied.
    """
    tab = np.asarray(table, dtype=np.float64)
    if tab.ndim != 2:
        raise StatError("repeated-measures table must be 2-D (subjects x conditions)")
    n, k = tab.shape
    if n < 2 or k < 2:
        raise StatError(f"need at least 2 subjects and 2 conditions, got {n} x {k}")
    if not np.all(np.isfinite(tab)):
        raise StatError("incomplete matrix: non-finite cells")
    grand = tab.mean()
    ss_cond = n * float(((tab.mean(axis=0) - grand) ** 2).sum())
    ss_subj = k * float(((tab.mean(axis=1) - grand) ** 2).sum())
    ss_total = float(((tab - grand) ** 2).sum())
    ss_error = ss_total - ss_cond - ss_subj
    df_between = k - 1
    df_within = (k - 1) * (n - 1)
    if ss_error <= 0.0:
        if ss_cond == 0.0:
            return AnovaResult(0.0, df_between, df_within, 1.0)
        return AnovaResult(math.inf, df_between, df_within, P_FLOOR)
    f = (ss_cond / df_between) / (ss_error / df_within)
    return AnovaResult(float(f), df_between, df_within, _clamp_p(f_sf(f, df_between, df_within)))


def _t_result(effect: float, se: float, df: int) -> TTestResult:
    if se == 0.0:
        if effect == 0.0:
            return TTestResult(0.0, df, 1.0)
        return TTestResult(math.copysign(math.inf, effect), df, P_FLOOR)
    t = effect / se
    return TTestResult(float(t), df, _clamp_p(2.0 * t_sf(abs(t), df)))


def t_test_one_sample(data, mu0: float) -> TTestResult:
    data = np.asarray(data, dtype=np.float64)
    n = len(data)
    if n < 2:
        raise StatError(f"one-sample t-test needs at least 2 values, got {n}")
    sd = float(data.std(ddof=1))
    return _t_result(float(data.mean()) - mu0, sd / math.sqrt(n), n - 1)


def t_test_two_sample(a, b) -> TTestResult:
    """Two-sample t-test with pooled variance, two-tailed."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise StatError("two-sample t-test needs at least 2 values per sample")
    df = len(a) + len(b) - 2
    pooled = ((len(a) - 1) * a.var(ddof=1) + (len(b) - 1) * b.var(ddof=1)) / df
    se = math.sqrt(pooled * (1.0 / len(a) + 1.0 / len(b)))
    return _t_result(float(a.mean() - b.mean()), se, df)


def digest_inputs(obj) -> str:
    """Stable hex digest of a JSON-able structure, for stats-report provenance."""
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.md5(payload.encode("utf-8")).hexdigest()


def report_entry(test: str, statistic: float, df, p_value: float, inputs) -> dict:
    """One stats-report item: {"test", "statistic", "df", "p_value", "inputs_digest"}."""
    return {
        "test": test,
        "statistic": float(statistic),
        "df": [float(d) for d in df],
        "p_value": float(p_value),
        "inputs_digest": digest_inputs(inputs),
    }
