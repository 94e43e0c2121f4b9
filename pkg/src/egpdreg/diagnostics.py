"""Model comparison and verification tools.

Criteria follow the generalized information criterion: GD + k * edf with
GD the global deviance (minus twice the fitted log-likelihood), k = 0 for
GD itself, k = 2 for AIC and k = log(n) for BIC.  Out-of-sample quality is
the validation deviance: GD recomputed with predicted parameters on held
out rows.  Calibration uses probability-integral-transform residuals
u = F(y; theta_hat(x)), which are uniform under a correct model; P-P data
pair the sorted residuals with i/(n+1), optionally restricted to the upper
tail while keeping the global ranks (a zoom, not a re-ranking).
"""

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DataError, DomainError
from .fitter import FittedModel, predict_params

SEASONS = ("winter", "spring", "summer", "autumn")
_SEASON_BY_MONTH = {
    12: "winter", 1: "winter", 2: "winter",
    3: "spring", 4: "spring", 5: "spring",
    6: "summer", 7: "summer", 8: "summer",
    9: "autumn", 10: "autumn", 11: "autumn",
}


@dataclass
class CriterionReport:
    model: str
    gd: float
    aic: float
    bic: float
    edf: float
    n_train: int
    gd_v: float | None = None


@dataclass
class PPData:
    """Sorted PIT residuals paired with their reference quantiles."""

    empirical: np.ndarray
    theoretical: np.ndarray
    n_total: int
    season: str | None = None
    tail_p0: float | None = None

    @property
    def is_empty(self):
        return self.empirical.size == 0

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "empirical": self.empirical,
                "theoretical": self.theoretical,
                "season": self.season if self.season is not None else "",
                "tail_flag": self.tail_p0 is not None,
            }
        )


def gaic(fitted: FittedModel, k: float) -> float:
    """Generalized information criterion GD + k * total edf."""
    if k < 0:
        raise DomainError("gaic requires k >= 0")
    return fitted.global_deviance + k * fitted.edf_total


def criterion_report(fitted: FittedModel, validation=None) -> CriterionReport:
    gd = gaic(fitted, 0.0)
    return CriterionReport(
        model=fitted.name,
        gd=gd,
        aic=gaic(fitted, 2.0),
        bic=gaic(fitted, math.log(fitted.n_train)),
        edf=fitted.edf_total,
        n_train=fitted.n_train,
        gd_v=None if validation is None else validation_deviance(fitted, validation),
    )


def reports_frame(reports) -> pd.DataFrame:
    rows = []
    for r in reports:
        row = {
            "model": r.model,
            "gd": r.gd,
            "aic": r.aic,
            "bic": r.bic,
            "edf": r.edf,
            "n_train": r.n_train,
        }
        if r.gd_v is not None:
            row["gd_v"] = r.gd_v
        rows.append(row)
    return pd.DataFrame(rows)


def validation_deviance(fitted: FittedModel, newdata) -> float:
    """Deviance of held-out rows under the predicted parameters."""
    table = newdata if isinstance(newdata, pd.DataFrame) else pd.DataFrame(newdata)
    if len(table) == 0:
        raise DataError("validation set is empty")
    family = fitted.spec.family_obj
    params = predict_params(fitted, table)
    family.validate({p: params[p].to_numpy() for p in params.columns})
    y = np.asarray(table[fitted.spec.response], dtype=float)
    lp = family.logpdf(y, {p: params[p].to_numpy() for p in params.columns})
    if np.any(~np.isfinite(lp)):
        row = int(np.argmax(~np.isfinite(lp)))
        raise DataError(f"non-finite log-density at validation row {row}")
    return float(-2.0 * np.sum(lp))


def pit_residuals(fitted: FittedModel, data) -> PPData:
    """Sorted u = F(y; theta_hat(x)) against i/(n+1)."""
    table = data if isinstance(data, pd.DataFrame) else pd.DataFrame(data)
    if len(table) == 0:
        raise DataError("cannot compute residuals on an empty table")
    family = fitted.spec.family_obj
    params = predict_params(fitted, table)
    y = np.asarray(table[fitted.spec.response], dtype=float)
    u = family.cdf(y, {p: params[p].to_numpy() for p in params.columns})
    order = np.argsort(u, kind="stable")
    n = len(u)
    return PPData(
        empirical=np.asarray(u)[order],
        theoretical=np.arange(1, n + 1) / (n + 1.0),
        n_total=n,
    )


def tail_pp(fitted: FittedModel, data, p0: float) -> PPData:
    """Upper-tail P-P data: pairs with reference quantile >= p0.

    Global rank positions are preserved, so the diagonal reference stays
    i/(n+1); p0 = 0 reproduces the full P-P data.
    """
    if not 0.0 <= p0 < 1.0:
        raise DomainError("tail_pp requires p0 in [0, 1)")
    pp = pit_residuals(fitted, data)
    keep = pp.theoretical >= p0
    return PPData(
        empirical=pp.empirical[keep],
        theoretical=pp.theoretical[keep],
        n_total=pp.n_total,
        tail_p0=p0 if p0 > 0 else None,
    )


def seasonal_split(data) -> dict:
    """Partition rows by meteorological season (DJF/MAM/JJA/SON)."""
    table = data if isinstance(data, pd.DataFrame) else pd.DataFrame(data)
    if "timestamp" not in table:
        raise DataError("seasonal split needs a 'timestamp' column")
    ts = pd.to_datetime(table["timestamp"])
    if ts.isna().any():
        raise DataError("seasonal split found unparseable timestamps")
    season = ts.dt.month.map(_SEASON_BY_MONTH)
    return {s: table.loc[season == s] for s in SEASONS}
