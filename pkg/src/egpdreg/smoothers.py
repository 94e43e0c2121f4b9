"""Basis constructors and roughness penalties for smooth regression terms.

Two smoother types plus the trivial intercept:

* cyclic cubic B-splines on equally spaced knots over [0, period], with the
  last three coefficients identified with the first three so value, slope
  and curvature wrap around; penalized by cyclic second-order coefficient
  differences (null space: constants).
* low-rank thin-plate surfaces over two covariates: the radial kernel
  ``r^2 log r`` on standardized coordinates is eigen-truncated at the
  distinct training locations, the affine part (1, x, y) stays unpenalized
  (null space dimension 3) and the penalty is diagonal in the eigenbasis.

A :class:`BasisRealization` carries the training design, the penalty and
everything needed to rebuild design rows at new covariate values.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BSpline
from scipy.spatial.distance import cdist

from .errors import ConfigError, DomainError

SPLINE_DEGREE = 3
DEFAULT_PERIOD = 366.0
DEFAULT_K_TIME = 50
DEFAULT_K_SPACE = 30
MAX_THINPLATE_KNOTS = 1000


@dataclass(frozen=True)
class TermSpec:
    """One additive term of a predictor.

    ``kind`` is "intercept", "cyclic" or "thinplate"; ``dim`` is the basis
    dimension (total, including any unpenalized null space); ``lam`` is a
    fixed nonnegative smoothing parameter or the string "select".
    """

    kind: str
    covariates: tuple = field(default_factory=tuple)
    dim: int = 0
    period: float = DEFAULT_PERIOD
    lam: object = "select"

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple(self.covariates))
        if self.kind == "intercept":
            return
        if self.kind == "cyclic":
            if len(self.covariates) != 1:
                raise ConfigError("cyclic term takes exactly one covariate")
            if self.dim < 4:
                raise ConfigError("cyclic term needs at least 4 basis functions")
            if not self.period > 0:
                raise ConfigError("cyclic term needs period > 0")
        elif self.kind == "thinplate":
            if len(self.covariates) != 2:
                raise ConfigError("thinplate term takes exactly two covariates")
            if self.dim < 3:
                raise ConfigError("thinplate term needs at least 3 basis functions")
        else:
            raise ConfigError(f"unknown term kind {self.kind!r}")
        if self.lam != "select" and (not np.isfinite(self.lam) or self.lam < 0):
            raise ConfigError("lambda must be nonnegative or 'select'")

    def label(self):
        if self.kind == "intercept":
            return "intercept"
        return f"{self.kind}({','.join(self.covariates)})"


@dataclass
class BasisRealization:
    """Materialized basis: training design, penalty, prediction constants."""

    kind: str
    design: np.ndarray
    penalty: np.ndarray
    nullspace_dim: int
    constants: dict

    def evaluate(self, values) -> np.ndarray:
        """Design rows at new covariate values (training constants reused)."""
        if self.kind == "cyclic":
            return _cyclic_design(
                np.mod(np.asarray(values, dtype=float), self.constants["period"]),
                self.constants["n_basis"],
                self.constants["period"],
            )
        if self.kind == "thinplate":
            return _thinplate_design(np.asarray(values, dtype=float), self.constants)
        raise ConfigError(f"cannot evaluate basis of kind {self.kind!r}")


def _cyclic_design(values, n_basis, period):
    h = period / n_basis
    knots = np.arange(-SPLINE_DEGREE, n_basis + SPLINE_DEGREE + 1) * h
    full = BSpline.design_matrix(values, knots, SPLINE_DEGREE).toarray()
    design = full[:, :n_basis].copy()
    design[:, :SPLINE_DEGREE] += full[:, n_basis:]
    return design


def _cyclic_penalty(n_basis):
    d = np.zeros((n_basis, n_basis))
    for i in range(n_basis):
        d[i, (i - 1) % n_basis] = 1.0
        d[i, i] = -2.0
        d[i, (i + 1) % n_basis] = 1.0
    return d.T @ d


def build_cyclic_basis(values, spec: TermSpec) -> BasisRealization:
    """Periodic cubic spline basis with a cyclic difference penalty."""
    values = np.asarray(values, dtype=float)
    if np.any((values < 0) | (values >= spec.period)):
        raise DomainError(f"cyclic covariate values must lie in [0, {spec.period})")
    design = _cyclic_design(values, spec.dim, spec.period)
    return BasisRealization(
        kind="cyclic",
        design=design,
        penalty=_cyclic_penalty(spec.dim),
        nullspace_dim=1,
        constants={"n_basis": spec.dim, "period": spec.period},
    )


def _radial_kernel(dist):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = dist * dist * np.log(dist)
    out[dist == 0.0] = 0.0
    return out


def _thinplate_design(coords, constants):
    std = (coords - constants["mean"]) / constants["sd"]
    affine = np.column_stack([np.ones(len(std)), std])
    smooth = _radial_kernel(cdist(std, constants["knots"])) @ constants["map"]
    return np.column_stack([affine, smooth])


def _thin_knots(points, cap):
    if len(points) <= cap:
        return points
    order = np.lexsort((points[:, 1], points[:, 0]))
    idx = np.linspace(0, len(points) - 1, cap).round().astype(int)
    return points[order[idx]]


def build_thinplate_basis(coords, spec: TermSpec) -> BasisRealization:
    """Eigen-truncated thin-plate surface basis over 2-D coordinates."""
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise ConfigError("thinplate coordinates must be an (n, 2) array")
    k = spec.dim
    mean = coords.mean(axis=0)
    sd = coords.std(axis=0)
    sd[sd == 0.0] = 1.0
    std = (coords - mean) / sd
    uniq = np.unique(std, axis=0)
    if len(uniq) < k:
        raise ConfigError(
            f"thinplate term with k={k} needs at least {k} distinct points, got {len(uniq)}"
        )
    knots = _thin_knots(uniq, MAX_THINPLATE_KNOTS)

    kernel = _radial_kernel(cdist(knots, knots))
    eigvals, eigvecs = np.linalg.eigh(kernel)
    top = np.argsort(np.abs(eigvals))[::-1][:k]
    d_k = eigvals[top]
    u_k = eigvecs[:, top]

    affine_knots = np.column_stack([np.ones(len(knots)), knots])
    q, _ = np.linalg.qr(u_k.T @ affine_knots, mode="complete")
    z = q[:, 3:]  # basis of coefficients orthogonal to the affine constraints
    s_c = z.T @ (d_k[:, None] * z)
    s_c = 0.5 * (s_c + s_c.T)
    lam_eig, v = np.linalg.eigh(s_c)
    lam_eig = np.maximum(lam_eig, 0.0)
    coef_map = u_k @ (z @ v)

    constants = {"mean": mean, "sd": sd, "knots": knots, "map": coef_map}
    design = _thinplate_design(coords, constants)
    penalty = np.zeros((k, k))
    penalty[3:, 3:] = np.diag(lam_eig)
    return BasisRealization(
        kind="thinplate",
        design=design,
        penalty=penalty,
        nullspace_dim=3,
        constants=constants,
    )


def build_basis(spec: TermSpec, table) -> BasisRealization:
    """Build the basis for one term from a covariate table (dict-like)."""
    values = term_values(spec, table)
    if spec.kind == "cyclic":
        return build_cyclic_basis(values, spec)
    if spec.kind == "thinplate":
        return build_thinplate_basis(values, spec)
    raise ConfigError(f"no basis to build for term kind {spec.kind!r}")


def term_values(spec: TermSpec, table) -> np.ndarray:
    """Covariate values a term consumes, pulled out of a table by name."""
    missing = [c for c in spec.covariates if c not in table]
    if missing:
        raise ConfigError(f"missing covariate column(s): {', '.join(missing)}")
    if spec.kind == "cyclic":
        return np.asarray(table[spec.covariates[0]], dtype=float)
    return np.column_stack([np.asarray(table[c], dtype=float) for c in spec.covariates])


def evaluate_term(spec: TermSpec, basis, coeffs, table) -> np.ndarray:
    """Evaluate one fitted term at new covariate rows.

    ``coeffs`` is the raw-basis coefficient vector; cyclic covariates wrap
    modulo the period so the fitted function is genuinely periodic.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if spec.kind == "intercept":
        n = len(next(iter(table.values()))) if isinstance(table, dict) else len(table)
        return np.full(n, coeffs[0] if coeffs.size else 0.0)
    values = term_values(spec, table)
    design = basis.evaluate(values)
    if design.shape[1] != coeffs.size:
        raise ConfigError(
            f"coefficient length {coeffs.size} does not match basis dimension {design.shape[1]}"
        )
    return design @ coeffs
