"""Response families the regression fitter can estimate.

Each family exposes its parameter names (plus the location/scale/shape/tail
aliases mu, sigma, nu, tau used in model-grid names), default links, the
vectorized log-density, analytic per-parameter scores, CDF/quantile for
diagnostics and simulation, and moment-style starting values.

The extended-Pareto families cover the carriers with at most two shape
parameters; the three-parameter power-mixture carrier stays available in
the distribution core for iid work but is not fittable here.  The Gamma
family (mean/dispersion parameterization, log links) is the classical
baseline the extended families are compared against.
"""

import numpy as np
from scipy import special, stats

from . import egpd
from .errors import ConfigError, ParameterError
from .links import LOG

ALIASES = ("mu", "sigma", "nu", "tau")


class Family:
    name = ""
    param_names: tuple = ()

    @property
    def n_params(self):
        return len(self.param_names)

    def alias_map(self):
        """gamlss-style alias -> canonical parameter name."""
        return dict(zip(ALIASES, self.param_names))

    def canonical(self, name: str) -> str:
        if name in self.param_names:
            return name
        mapped = self.alias_map().get(name)
        if mapped is None:
            raise ConfigError(f"{self.name} has no parameter {name!r}")
        return mapped

    def default_links(self) -> dict:
        return {p: LOG for p in self.param_names}

    def logpdf(self, y, params: dict) -> np.ndarray:
        raise NotImplementedError

    def score(self, y, params: dict) -> dict:
        raise NotImplementedError

    def cdf(self, y, params: dict) -> np.ndarray:
        raise NotImplementedError

    def quantile(self, p, params: dict) -> np.ndarray:
        raise NotImplementedError

    def init_values(self, y) -> dict:
        raise NotImplementedError

    def validate(self, params: dict) -> None:
        """Raise ParameterError naming the first inadmissible row."""
        for name in self.param_names:
            vals = np.asarray(params[name])
            bad = ~np.isfinite(vals)
            if name != "xi":
                bad |= vals <= 0
            if np.any(bad):
                row = int(np.argmax(bad))
                raise ParameterError(f"inadmissible {name} at row {row}: {vals[row]!r}")


class EgpdFamily(Family):
    """Extended-Pareto family over one carrier, keyed by carrier id."""

    def __init__(self, name, carrier_id, n_kappa):
        self.name = name
        self.carrier_id = carrier_id
        self.param_names = ("xi", "psi") + tuple(f"kappa{j + 1}" for j in range(n_kappa))

    def _kappas(self, params):
        return tuple(
            np.asarray(params[f"kappa{j + 1}"], dtype=float)
            for j in range(len(self.param_names) - 2)
        )

    def logpdf(self, y, params):
        return egpd.egpd_logpdf_arrays(
            y, params["xi"], params["psi"], self.carrier_id, self._kappas(params)
        )

    def score(self, y, params):
        return egpd.egpd_score_arrays(
            y, params["xi"], params["psi"], self.carrier_id, self._kappas(params)
        )

    def cdf(self, y, params):
        return egpd.egpd_cdf_arrays(
            y, params["xi"], params["psi"], self.carrier_id, self._kappas(params)
        )

    def quantile(self, p, params):
        return egpd.egpd_quantile_arrays(
            p, params["xi"], params["psi"], self.carrier_id, self._kappas(params)
        )

    def init_values(self, y):
        out = {"xi": 0.1, "psi": float(np.mean(y))}
        for j in range(len(self.param_names) - 2):
            out[f"kappa{j + 1}"] = 1.0
        return out


class GammaFamily(Family):
    """Gamma in mean/dispersion form: E[Y] = mu, Var[Y] = (sigma*mu)^2."""

    name = "gamma"
    param_names = ("mu", "sigma")

    @staticmethod
    def _shape_scale(params):
        mu = np.asarray(params["mu"], dtype=float)
        sigma = np.asarray(params["sigma"], dtype=float)
        shape = 1.0 / sigma**2
        return shape, sigma**2 * mu

    def logpdf(self, y, params):
        y = np.asarray(y, dtype=float)
        shape, scale = self._shape_scale(params)
        return (shape - 1.0) * np.log(y) - y / scale - shape * np.log(scale) - special.gammaln(shape)

    def score(self, y, params):
        y = np.asarray(y, dtype=float)
        mu = np.asarray(params["mu"], dtype=float)
        sigma = np.asarray(params["sigma"], dtype=float)
        dmu = (y - mu) / (sigma**2 * mu**2)
        dsigma = (
            2.0
            / sigma**3
            * (y / mu - np.log(y) + np.log(mu) + np.log(sigma**2) + special.digamma(1.0 / sigma**2) - 1.0)
        )
        return {"mu": dmu, "sigma": dsigma}

    def cdf(self, y, params):
        shape, scale = self._shape_scale(params)
        return stats.gamma.cdf(np.asarray(y, dtype=float), a=shape, scale=scale)

    def quantile(self, p, params):
        shape, scale = self._shape_scale(params)
        return stats.gamma.ppf(np.asarray(p, dtype=float), a=shape, scale=scale)

    def init_values(self, y):
        y = np.asarray(y, dtype=float)
        mean = float(np.mean(y))
        cv = float(np.std(y) / mean) if mean > 0 else 1.0
        return {"mu": mean, "sigma": float(np.clip(cv, 0.1, 10.0))}


FIT_FAMILIES = {
    "egpd1": EgpdFamily("egpd1", "model1", 1),
    "egpd3": EgpdFamily("egpd3", "model3", 1),
    "egpd4": EgpdFamily("egpd4", "model4", 2),
    "gamma": GammaFamily(),
}


def get_family(name: str) -> Family:
    try:
        return FIT_FAMILIES[name]
    except KeyError:
        raise ConfigError(
            f"unknown family {name!r}; choose from {sorted(FIT_FAMILIES)}"
        ) from None
