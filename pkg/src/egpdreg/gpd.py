"""Generalized Pareto kernel on the unit-scale axis.

All functions take the standardized argument ``z = y / psi`` and the shape
``xi``, accept scalars or numpy arrays (broadcasting), and switch to the
exponential branch when ``|xi| < XI_ZERO_TOL`` so the family is continuous
in the shape parameter.  For ``xi < 0`` the support ends at ``z = -1/xi``:
the CDF clamps to 1 and the density to 0 beyond it.
"""

import numpy as np

from .errors import DomainError

# Branch switch for the xi = 0 (exponential) limit of the CDF/quantile.
XI_ZERO_TOL = 1e-8

# Wider switch for the xi-derivatives, which cancel catastrophically near 0.
_XI_SERIES_TOL = 1e-6


def _as_arrays(z, xi):
    z = np.asarray(z, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return np.broadcast_arrays(z, xi)


def gpd_cdf(z, xi):
    """CDF H_xi(z) of the generalized Pareto distribution (scale 1).

    ``1 - (1 + xi*z)^(-1/xi)`` for ``xi != 0`` and ``1 - exp(-z)`` in the
    exponential limit; exactly 1 past the upper endpoint when ``xi < 0``.
    """
    z, xi = _as_arrays(z, xi)
    if np.any(z < 0):
        raise DomainError("gpd_cdf requires z >= 0")
    exp_branch = np.abs(xi) < XI_ZERO_TOL
    xi_safe = np.where(exp_branch, 1.0, xi)
    w = xi_safe * z
    inside = w > -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.expm1(-np.log1p(np.where(inside, w, 0.0)) / xi_safe)
    out = np.where(inside, out, 1.0)
    out = np.where(exp_branch, -np.expm1(-z), out)
    return out if out.ndim else float(out)


def gpd_pdf(z, xi):
    """Density h_xi(z) matching :func:`gpd_cdf`; 0 beyond the support end."""
    z, xi = _as_arrays(z, xi)
    if np.any(z < 0):
        raise DomainError("gpd_pdf requires z >= 0")
    exp_branch = np.abs(xi) < XI_ZERO_TOL
    xi_safe = np.where(exp_branch, 1.0, xi)
    w = xi_safe * z
    inside = w > -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(-(1.0 / xi_safe + 1.0) * np.log1p(np.where(inside, w, 0.0)))
    out = np.where(inside, out, 0.0)
    out = np.where(exp_branch, np.exp(-z), out)
    return out if out.ndim else float(out)


def gpd_inverse(p, xi):
    """Quantile of H_xi: ``((1-p)^(-xi) - 1)/xi``, or ``-log(1-p)`` at xi=0.

    ``p`` must lie in [0, 1); ``p = 1`` is the finite endpoint ``-1/xi``
    only for ``xi < 0`` and overflows otherwise.
    """
    p, xi = _as_arrays(p, xi)
    if np.any((p < 0) | (p > 1)):
        raise DomainError("gpd_inverse requires p in [0, 1]")
    at_one = p == 1.0
    if np.any(at_one & (xi >= 0)):
        raise OverflowError("gpd_inverse(1, xi) is infinite for xi >= 0")
    exp_branch = np.abs(xi) < XI_ZERO_TOL
    xi_safe = np.where(exp_branch, 1.0, xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.expm1(-xi_safe * np.log1p(-np.where(at_one, 0.0, p))) / xi_safe
        out = np.where(exp_branch, -np.log1p(-p), out)
    out = np.where(at_one, -1.0 / np.where(at_one, xi, 1.0), out)
    return out if out.ndim else float(out)


def gpd_logpdf(z, xi):
    """log h_xi(z); -inf beyond the support end for xi < 0."""
    z, xi = _as_arrays(z, xi)
    exp_branch = np.abs(xi) < XI_ZERO_TOL
    xi_safe = np.where(exp_branch, 1.0, xi)
    w = xi_safe * z
    inside = w > -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(1.0 / xi_safe + 1.0) * np.log1p(np.where(inside, w, 0.0))
    out = np.where(inside, out, -np.inf)
    out = np.where(exp_branch, -z, out)
    return out if out.ndim else float(out)


def gpd_dcdf_dxi(z, xi):
    """Partial derivative of H_xi(z) with respect to xi at fixed z.

    Uses a series in xi below ``_XI_SERIES_TOL`` where the closed form
    ``-S(z) * [log1p(xi z)/xi^2 - z/(xi (1 + xi z))]`` loses all digits.
    """
    z, xi = _as_arrays(z, xi)
    series = np.abs(xi) < _XI_SERIES_TOL
    xi_safe = np.where(series, 1.0, xi)
    w = xi_safe * z
    inside = w > -1.0
    wz = np.where(inside, w, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        surv = np.exp(-np.log1p(wz) / xi_safe)
        a = np.log1p(wz) / xi_safe**2 - z / (xi_safe * (1.0 + wz))
        out = -surv * a
    out = np.where(inside, out, 0.0)
    a0 = z * z / 2.0 - (2.0 / 3.0) * xi * z**3 + 0.75 * xi**2 * z**4
    out = np.where(series, -np.exp(-z) * a0, out)
    return out if out.ndim else float(out)


def gpd_dlogpdf_dxi(z, xi):
    """Partial derivative of log h_xi(z) with respect to xi at fixed z."""
    z, xi = _as_arrays(z, xi)
    series = np.abs(xi) < _XI_SERIES_TOL
    xi_safe = np.where(series, 1.0, xi)
    w = xi_safe * z
    inside = w > -1.0
    wz = np.where(inside, w, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log1p(wz) / xi_safe**2 - (1.0 / xi_safe + 1.0) * z / (1.0 + wz)
    out = np.where(inside, out, np.nan)
    s0 = (z * z / 2.0 - z) + xi * (z**2 - (2.0 / 3.0) * z**3) + xi**2 * (0.75 * z**4 - z**3)
    out = np.where(series, s0, out)
    return out if out.ndim else float(out)


def gpd_dlogpdf_dz(z, xi):
    """Partial derivative of log h_xi(z) with respect to z."""
    z, xi = _as_arrays(z, xi)
    w = xi * z
    inside = w > -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -(1.0 + xi) / (1.0 + np.where(inside, w, 0.0))
    out = np.where(inside, out, np.nan)
    return out if out.ndim else float(out)
