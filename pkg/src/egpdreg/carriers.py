"""Carrier distributions on the unit interval.

A carrier is a continuous CDF ``G`` on [0, 1] that gets composed with the
generalized Pareto kernel to produce a distribution on (0, inf) whose both
tails behave like Pareto tails.  Four parametric families are provided:

* ``model1`` -- power law ``u**k1``.
* ``model2`` -- mixture of two power laws (three parameters).
* ``model3`` -- beta-tail transform ``1 - Q_k1((1-u)**k1)`` with ``Q_d`` the
  Beta(1/d, 2) CDF; density vanishes at 0.
* ``model4`` -- ``model3`` raised to the power ``k2/2``, freeing the lower
  tail exponent.

Every family exposes vectorized CDF/PDF, log-density derivatives in ``u``
and in each carrier parameter, a numerically inverted quantile, and the
small-u expansion ``G(u) ~ c * u**s`` that drives the lower tail.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError, ParameterError

_INVERSE_TOL = 1e-13
_INVERSE_MAX_ITER = 200


def _check_unit(u, name="u"):
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return u


class _PowerCarrier:
    """G(u) = u**k1."""

    family_id = "model1"
    n_kappa = 1

    @staticmethod
    def check(k1):
        if np.any(np.asarray(k1) <= 0):
            raise ParameterError("model1 requires kappa1 > 0")

    @staticmethod
    def cdf(u, k1):
        return np.power(u, k1)

    @staticmethod
    def pdf(u, k1):
        return k1 * np.power(u, k1 - 1.0)

    @staticmethod
    def dlogpdf_du(u, k1):
        return (k1 - 1.0) / u

    @staticmethod
    def dlogpdf_dkappa(u, k1):
        return (1.0 / k1 + np.log(u),)

    @staticmethod
    def inverse(p, k1):
        return np.power(p, 1.0 / k1)

    @staticmethod
    def lower_tail(k1):
        return float(k1), 1.0


class _PowerMixCarrier:
    """G(u) = k3 * u**k1 + (1 - k3) * u**k2 with k2 >= k1 > 0, k3 in [0, 1]."""

    family_id = "model2"
    n_kappa = 3

    @staticmethod
    def check(k1, k2, k3):
        k1, k2, k3 = np.asarray(k1), np.asarray(k2), np.asarray(k3)
        if np.any(k1 <= 0) or np.any(k2 < k1):
            raise ParameterError("model2 requires kappa2 >= kappa1 > 0")
        if np.any((k3 < 0) | (k3 > 1)):
            raise ParameterError("model2 requires kappa3 in [0, 1]")

    @staticmethod
    def cdf(u, k1, k2, k3):
        return k3 * np.power(u, k1) + (1.0 - k3) * np.power(u, k2)

    @staticmethod
    def pdf(u, k1, k2, k3):
        return k3 * k1 * np.power(u, k1 - 1.0) + (1.0 - k3) * k2 * np.power(u, k2 - 1.0)

    @classmethod
    def dlogpdf_du(cls, u, k1, k2, k3):
        num = k3 * k1 * (k1 - 1.0) * np.power(u, k1 - 2.0) + (1.0 - k3) * k2 * (
            k2 - 1.0
        ) * np.power(u, k2 - 2.0)
        return num / cls.pdf(u, k1, k2, k3)

    @classmethod
    def dlogpdf_dkappa(cls, u, k1, k2, k3):
        g = cls.pdf(u, k1, k2, k3)
        lu = np.log(u)
        d1 = k3 * np.power(u, k1 - 1.0) * (1.0 + k1 * lu) / g
        d2 = (1.0 - k3) * np.power(u, k2 - 1.0) * (1.0 + k2 * lu) / g
        d3 = (k1 * np.power(u, k1 - 1.0) - k2 * np.power(u, k2 - 1.0)) / g
        return d1, d2, d3

    @classmethod
    def inverse(cls, p, k1, k2, k3):
        return _bisect_inverse(lambda u: cls.cdf(u, k1, k2, k3), p)

    @staticmethod
    def lower_tail(k1, k2, k3):
        if k3 > 0:
            return float(k1), float(k3)
        return float(k2), 1.0


def _beta_tail_cdf(u, k1):
    # 1 - (1+k)(1-u)/k + (1-u)^(k+1)/k, rearranged so the small-u
    # cancellation happens between O(u) terms instead of O(1) terms.
    with np.errstate(divide="ignore"):
        one_m_wk = -np.expm1(k1 * np.log1p(-u))
    return (k1 * u - (1.0 - u) * one_m_wk) / k1


def _beta_tail_pdf(u, k1):
    return (1.0 + k1) / k1 * (-np.expm1(k1 * np.log1p(-u)))


def _beta_tail_dcdf_dkappa(u, k1):
    w = 1.0 - u
    logw = np.log1p(-u)
    return w / k1**2 * (1.0 + np.exp(k1 * logw) * (k1 * logw - 1.0))


class _BetaTailCarrier:
    """G(u) = 1 - Q_k1((1-u)**k1), Q_d the Beta(1/d, 2) CDF."""

    family_id = "model3"
    n_kappa = 1

    @staticmethod
    def check(k1):
        if np.any(np.asarray(k1) <= 0):
            raise ParameterError("model3 requires kappa1 > 0")

    @staticmethod
    def cdf(u, k1):
        return _beta_tail_cdf(u, k1)

    @staticmethod
    def pdf(u, k1):
        return _beta_tail_pdf(u, k1)

    @staticmethod
    def dlogpdf_du(u, k1):
        logw = np.log1p(-u)
        one_m_wk = -np.expm1(k1 * logw)
        return k1 * np.exp((k1 - 1.0) * logw) / one_m_wk

    @staticmethod
    def dlogpdf_dkappa(u, k1):
        logw = np.log1p(-u)
        one_m_wk = -np.expm1(k1 * logw)
        return (1.0 / (1.0 + k1) - 1.0 / k1 - np.exp(k1 * logw) * logw / one_m_wk,)

    @classmethod
    def inverse(cls, p, k1):
        return _bisect_inverse(lambda u: cls.cdf(u, k1), p)

    @staticmethod
    def lower_tail(k1):
        return 2.0, (1.0 + float(k1)) / 2.0


class _PoweredBetaTailCarrier:
    """G(u) = model3(u; k1)**(k2/2)."""

    family_id = "model4"
    n_kappa = 2

    @staticmethod
    def check(k1, k2):
        if np.any(np.asarray(k1) <= 0) or np.any(np.asarray(k2) <= 0):
            raise ParameterError("model4 requires kappa1 > 0 and kappa2 > 0")

    @staticmethod
    def cdf(u, k1, k2):
        return np.power(_beta_tail_cdf(u, k1), k2 / 2.0)

    @staticmethod
    def pdf(u, k1, k2):
        base = _beta_tail_cdf(u, k1)
        return k2 / 2.0 * np.power(base, k2 / 2.0 - 1.0) * _beta_tail_pdf(u, k1)

    @staticmethod
    def dlogpdf_du(u, k1, k2):
        base = _beta_tail_cdf(u, k1)
        return (k2 / 2.0 - 1.0) * _beta_tail_pdf(u, k1) / base + _BetaTailCarrier.dlogpdf_du(u, k1)

    @staticmethod
    def dlogpdf_dkappa(u, k1, k2):
        base = _beta_tail_cdf(u, k1)
        d1 = (k2 / 2.0 - 1.0) * _beta_tail_dcdf_dkappa(u, k1) / base
        d1 = d1 + _BetaTailCarrier.dlogpdf_dkappa(u, k1)[0]
        d2 = 1.0 / k2 + 0.5 * np.log(base)
        return d1, d2

    @classmethod
    def inverse(cls, p, k1, k2):
        return _bisect_inverse(lambda u: cls.cdf(u, k1, k2), p)

    @staticmethod
    def lower_tail(k1, k2):
        return float(k2), ((1.0 + float(k1)) / 2.0) ** (float(k2) / 2.0)


FAMILIES = {
    c.family_id: c
    for c in (_PowerCarrier, _PowerMixCarrier, _BetaTailCarrier, _PoweredBetaTailCarrier)
}


def _bisect_inverse(cdf, p):
    """Invert a monotone CDF on [0, 1] by bracketed bisection.

    Runs until the bracket shrinks below ``_INVERSE_TOL`` (or the iteration
    cap) and verifies the residual in probability space afterwards.
    """
    p = np.asarray(p, dtype=float)
    lo = np.zeros(p.shape)
    hi = np.ones(p.shape)
    for _ in range(_INVERSE_MAX_ITER):
        mid = 0.5 * (lo + hi)
        below = cdf(mid) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < _INVERSE_TOL:
            break
    out = 0.5 * (lo + hi)
    out = np.where(p == 0.0, 0.0, out)
    out = np.where(p == 1.0, 1.0, out)
    resid = float(np.max(np.abs(cdf(out) - p)))
    if not np.isfinite(resid) or resid > 1e-9:
        raise NumericalError("carrier inverse did not converge", residual=resid)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CarrierFamily:
    """One carrier CDF on [0, 1]: a family id plus its kappa vector."""

    family_id: str
    kappa: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.family_id not in FAMILIES:
            raise ParameterError(f"unknown carrier family {self.family_id!r}")
        kappa = tuple(float(k) for k in np.atleast_1d(self.kappa))
        object.__setattr__(self, "kappa", kappa)
        impl = FAMILIES[self.family_id]
        if len(kappa) != impl.n_kappa:
            raise ParameterError(
                f"{self.family_id} takes {impl.n_kappa} kappa parameter(s), got {len(kappa)}"
            )
        impl.check(*kappa)

    @property
    def impl(self):
        return FAMILIES[self.family_id]


def carrier_cdf(u, carrier: CarrierFamily):
    """Evaluate G(u; kappa) with exact endpoints."""
    u = _check_unit(u)
    out = np.asarray(carrier.impl.cdf(u, *carrier.kappa), dtype=float)
    out = np.where(u == 0.0, 0.0, np.where(u == 1.0, 1.0, np.clip(out, 0.0, 1.0)))
    return out if out.ndim else float(out)


def carrier_pdf(u, carrier: CarrierFamily):
    """Evaluate the carrier density g = dG/du on (0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise DomainError("carrier_pdf requires u in (0, 1)")
    out = np.asarray(carrier.impl.pdf(u, *carrier.kappa), dtype=float)
    return out if out.ndim else float(out)


def carrier_inverse(p, carrier: CarrierFamily):
    """Invert G: closed form for model1, bracketed bisection otherwise."""
    p = _check_unit(p, "p")
    out = np.asarray(carrier.impl.inverse(p, *carrier.kappa), dtype=float)
    return out if out.ndim else float(out)
