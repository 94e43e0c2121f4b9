"""Extended generalized Pareto distribution: F(y) = G(H_xi(y/psi)).

The carrier ``G`` reshapes the lower tail and bulk while the Pareto kernel
``H_xi`` keeps the upper tail.  Scalar parameters travel in
:class:`EgpdParams`; the ``*_arrays`` functions take per-observation
parameter arrays and back the regression fitter.
"""

from dataclasses import dataclass

import numpy as np

from . import gpd
from .carriers import FAMILIES, CarrierFamily
from .errors import DomainError, NumericalError, ParameterError


@dataclass(frozen=True)
class EgpdParams:
    """Full parameter set (xi, psi, kappa) of one distribution.

    ``xi`` is unrestricted here; applications that forbid bounded upper
    tails (rainfall) enforce positivity through the link layer.
    """

    xi: float
    psi: float
    carrier: CarrierFamily

    def __post_init__(self):
        if not np.isfinite(self.psi) or self.psi <= 0:
            raise ParameterError("psi must be positive and finite")
        if not np.isfinite(self.xi):
            raise ParameterError("xi must be finite")

    @property
    def kappas(self):
        return self.carrier.kappa

    @property
    def support_end(self):
        """Upper endpoint of the support (inf unless xi < 0)."""
        return np.inf if self.xi >= 0 else -self.psi / self.xi


@dataclass(frozen=True)
class TailProfile:
    """Tail summary: F(y) ~ (c/psi^s) y^s near 0; Pareto shape above."""

    lower_exponent: float
    lower_constant: float
    upper_shape: float


def _check_pos(y, op):
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise DomainError(f"{op} requires y > 0")
    return y


def _shape_out(out):
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


# -- array API (per-observation parameters, used by the fitter) ------------


def egpd_cdf_arrays(y, xi, psi, family_id, kappas):
    impl = FAMILIES[family_id]
    u = gpd.gpd_cdf(np.asarray(y, dtype=float) / psi, xi)
    out = np.clip(impl.cdf(u, *kappas), 0.0, 1.0)
    return _shape_out(out)


def egpd_logpdf_arrays(y, xi, psi, family_id, kappas):
    impl = FAMILIES[family_id]
    z = np.asarray(y, dtype=float) / psi
    u = gpd.gpd_cdf(z, xi)
    interior = (u > 0.0) & (u < 1.0)
    u_safe = np.where(interior, u, 0.5)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            np.log(impl.pdf(u_safe, *kappas))
            + gpd.gpd_logpdf(z, xi)
            - np.log(psi)
        )
    out = np.where(interior, out, -np.inf)
    return _shape_out(out)


def egpd_pdf_arrays(y, xi, psi, family_id, kappas):
    out = np.exp(egpd_logpdf_arrays(y, xi, psi, family_id, kappas))
    return _shape_out(out)


def egpd_quantile_arrays(p, xi, psi, family_id, kappas):
    impl = FAMILIES[family_id]
    q = impl.inverse(np.asarray(p, dtype=float), *kappas)
    out = psi * gpd.gpd_inverse(q, xi)
    return _shape_out(out)


def egpd_score_arrays(y, xi, psi, family_id, kappas):
    """Per-observation log-density gradient for each free parameter.

    Returns a dict keyed ``xi``, ``psi``, ``kappa1`` ... with arrays the
    shape of ``y``.  All pieces are analytic; the chain rule runs through
    u = H_xi(y/psi).
    """
    impl = FAMILIES[family_id]
    y = np.asarray(y, dtype=float)
    z = y / psi
    u = gpd.gpd_cdf(z, xi)
    dlg_du = impl.dlogpdf_du(u, *kappas)
    h = gpd.gpd_pdf(z, xi)
    dlh_dz = gpd.gpd_dlogpdf_dz(z, xi)
    out = {
        "xi": dlg_du * gpd.gpd_dcdf_dxi(z, xi) + gpd.gpd_dlogpdf_dxi(z, xi),
        "psi": -(dlg_du * h + dlh_dz) * z / psi - 1.0 / psi,
    }
    for j, d in enumerate(impl.dlogpdf_dkappa(u, *kappas), start=1):
        out[f"kappa{j}"] = d
    return out


# -- scalar-parameter API ---------------------------------------------------


def egpd_cdf(y, params: EgpdParams):
    """CDF of the composed distribution; clamps to 1 past a finite endpoint."""
    y = _check_pos(y, "egpd_cdf")
    return egpd_cdf_arrays(y, params.xi, params.psi, params.carrier.family_id, params.kappas)


def egpd_pdf(y, params: EgpdParams):
    """Density g(H_xi(y/psi)) * h_xi(y/psi) / psi; 0 past a finite endpoint."""
    y = _check_pos(y, "egpd_pdf")
    return egpd_pdf_arrays(y, params.xi, params.psi, params.carrier.family_id, params.kappas)


def egpd_logpdf(y, params: EgpdParams):
    y = _check_pos(y, "egpd_logpdf")
    return egpd_logpdf_arrays(y, params.xi, params.psi, params.carrier.family_id, params.kappas)


def egpd_quantile(p, params: EgpdParams):
    """Quantile via the carrier inverse followed by the Pareto quantile."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise DomainError("egpd_quantile requires p in (0, 1)")
    return egpd_quantile_arrays(p, params.xi, params.psi, params.carrier.family_id, params.kappas)


def egpd_sample(n, params: EgpdParams, seed):
    """Inverse-transform sample of size n, deterministic under the seed."""
    if n < 1:
        raise DomainError("egpd_sample requires n >= 1")
    rng = np.random.default_rng(seed)
    p = rng.random(int(n))
    q = params.carrier.impl.inverse(p, *params.kappas)
    return params.psi * gpd.gpd_inverse(q, params.xi)


def egpd_logpdf_grad(y, params: EgpdParams):
    """Gradient of log f(y) over (xi, psi, kappa...) as one array."""
    y = _check_pos(y, "egpd_logpdf_grad")
    if np.any(np.asarray(y) >= params.support_end):
        raise NumericalError("gradient requested at or beyond the support endpoint")
    s = egpd_score_arrays(y, params.xi, params.psi, params.carrier.family_id, params.kappas)
    names = ["xi", "psi"] + [f"kappa{j + 1}" for j in range(len(params.kappas))]
    out = np.stack([np.asarray(s[k], dtype=float) for k in names], axis=-1)
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite gradient (parameter or support boundary)")
    return out


def tail_profile(params: EgpdParams) -> TailProfile:
    """Lower-tail exponent/constant from the carrier's small-u expansion.

    The upper shape is xi by construction; both limits are verified
    numerically in the test suite rather than trusted blindly.
    """
    s, c = params.carrier.impl.lower_tail(*params.kappas)
    return TailProfile(lower_exponent=s, lower_constant=c, upper_shape=params.xi)
