"""Penalized maximum-likelihood fitting of distributional regression models.

Every distribution parameter gets an additive predictor built from an
intercept plus smooth terms; predictors map to parameters through link
functions.  The fitter cycles over the distribution parameters and updates
each parameter's stacked coefficient vector with a penalized quasi-Newton
step: the gradient is the exact chain-rule score and the curvature is the
expected-information approximation built from squared per-observation
scores.  Steps that fail to lower the penalized deviance are halved
(autostep) so accepted cycles are monotone; convergence is declared when a
full cycle improves the penalized deviance by less than the tolerance.

Smooth terms enter the stacked design with a sum-to-zero constraint
absorbed (their constant component belongs to the explicit intercept), so
the penalized system stays full rank.  Coefficients are reported in each
term's raw basis, which is what the prediction path consumes.

Smoothing parameters marked "select" are chosen by a per-term
golden-section search on the log smoothing parameter, minimizing BIC.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from scipy import linalg as sla

from .errors import ConfigError, DataError, FitError, NumericalError, UnsupportedFeatureError
from .families import get_family
from .links import LinkFunction, dinvlink_deta, linkfun, linkinv
from .smoothers import (
    DEFAULT_K_SPACE,
    DEFAULT_K_TIME,
    DEFAULT_PERIOD,
    TermSpec,
    build_basis,
    evaluate_term,
)

DEFAULT_RESPONSE = "precip_mm"
DEFAULT_TIME_COVARIATE = "day_of_year"
DEFAULT_SPACE_COVARIATES = ("lon", "lat")

GRID_VARIATIONS = ("M.0", "M.t", "M.tnomu", "M.st", "M.st2mu", "M.st2nomu", "M.st3nomu")


@dataclass(frozen=True)
class ModelSpec:
    """Family plus per-parameter term lists and links.

    Predictor keys may use canonical parameter names (xi, psi, kappa1,
    kappa2 / mu, sigma) or the positional aliases mu, sigma, nu, tau.
    Parameters without an explicit entry get an intercept-only predictor;
    term lists always start with an intercept.
    """

    family: str
    predictors: dict = field(default_factory=dict)
    links: dict = field(default_factory=dict)
    response: str = DEFAULT_RESPONSE
    name: str = ""

    def __post_init__(self):
        fam = get_family(self.family)
        predictors = {}
        for key, terms in self.predictors.items():
            predictors[fam.canonical(key)] = list(terms)
        full = {}
        for pname in fam.param_names:
            terms = predictors.pop(pname, [])
            if not any(t.kind == "intercept" for t in terms):
                terms = [TermSpec("intercept")] + terms
            else:
                terms = sorted(terms, key=lambda t: t.kind != "intercept")
            full[pname] = tuple(terms)
        if predictors:
            raise ConfigError(f"unknown predictor keys: {sorted(predictors)}")
        links = {}
        for key, lk in self.links.items():
            if not isinstance(lk, LinkFunction):
                raise ConfigError("links must be LinkFunction instances")
            links[fam.canonical(key)] = lk
        resolved = dict(fam.default_links())
        resolved.update(links)
        object.__setattr__(self, "predictors", full)
        object.__setattr__(self, "links", resolved)
        if not self.name:
            object.__setattr__(self, "name", self.family)

    @property
    def family_obj(self):
        return get_family(self.family)


@dataclass
class FitControl:
    """Knobs of the outer fitting loop and smoothing-parameter selection."""

    n_cyc: int = 200
    step: object = 0.01  # float, or dict per parameter name
    autostep: bool = True
    tol: float = 1e-4
    init: dict = field(default_factory=dict)  # parameter-scale overrides
    weight_floor: float = 1e-10
    max_halvings: int = 30
    lambda_mode: str = "bic"  # "bic" (golden-section) or "fixed"
    lambda_default: float = 1.0
    lambda_log_bounds: tuple = (-8.0, 12.0)
    lambda_sweeps: int = 2
    lambda_tol: float = 0.2
    verbose: bool = False

    def step_for(self, param):
        if isinstance(self.step, dict):
            return float(self.step.get(param, 0.01))
        return float(self.step)


class _Block:
    """Stacked design, penalties and coefficient bookkeeping per parameter."""

    def __init__(self, param, terms, table, n):
        self.param = param
        self.terms = list(terms)
        self.bases = []
        self.maps = []  # raw -> reduced coefficient map per term (None = identity)
        self.slices = []
        cols = []
        start = 0
        for term in self.terms:
            if term.kind == "intercept":
                design = np.ones((n, 1))
                self.bases.append(None)
                self.maps.append(None)
            else:
                basis = build_basis(term, table)
                raw = basis.design
                csum = raw.sum(axis=0)
                q, _ = np.linalg.qr(csum.reshape(-1, 1), mode="complete")
                z = q[:, 1:]
                design = raw @ z
                self.bases.append(basis)
                self.maps.append(z)
            cols.append(design)
            self.slices.append(slice(start, start + design.shape[1]))
            start += design.shape[1]
        self.X = np.hstack(cols)
        self.n_cols = start
        self.penalties = []
        for m, basis in zip(self.maps, self.bases):
            if m is None:
                self.penalties.append(None)
            else:
                g = m.T @ basis.penalty @ m
                self.penalties.append(0.5 * (g + g.T))

    def penalty_matrix(self, lams):
        s = np.zeros((self.n_cols, self.n_cols))
        for sl, g, lam in zip(self.slices, self.penalties, lams):
            if g is not None and lam > 0:
                s[sl, sl] += lam * g
        return s

    def penalty_value(self, beta, lams):
        total = 0.0
        for sl, g, lam in zip(self.slices, self.penalties, lams):
            if g is not None and lam > 0:
                b = beta[sl]
                total += lam * float(b @ g @ b)
        return total

    def raw_coefficients(self, beta):
        out = []
        for sl, m in zip(self.slices, self.maps):
            b = beta[sl]
            out.append(b.copy() if m is None else m @ b)
        return out

    def stack_raw(self, raw_list):
        """Inverse of raw_coefficients for coefficients in the reduced span."""
        parts = []
        for raw, m in zip(raw_list, self.maps):
            raw = np.asarray(raw, dtype=float)
            parts.append(raw if m is None else m.T @ raw)
        return np.concatenate(parts)


@dataclass
class FittedModel:
    """Everything a fit produces, including what prediction needs."""

    spec: ModelSpec
    coefficients: dict  # param -> list of raw per-term coefficient vectors
    lambdas: dict  # param -> list of floats (0.0 for intercepts)
    global_deviance: float
    edf: dict  # param -> float
    edf_total: float
    edf_by_term: dict  # param -> list of floats
    converged: bool
    n_cycles: int
    n_train: int
    iteration_log: list
    bases: dict  # param -> list of BasisRealization or None
    train_data: pd.DataFrame | None = None

    @property
    def name(self):
        return self.spec.name

    @property
    def family(self):
        return self.spec.family

    def param_names(self):
        return self.spec.family_obj.param_names


def _as_table(data):
    if isinstance(data, pd.DataFrame):
        return data
    return pd.DataFrame(data)


def _predictor_eta(block, beta):
    return block.X @ beta


def _theta_from_eta(spec, etas):
    return {p: linkinv(eta, spec.links[p]) for p, eta in etas.items()}


def _loglik(family, y, theta):
    lp = family.logpdf(y, theta)
    return float(np.sum(lp)), lp


def _initial_beta(spec, family, y, blocks, init_overrides):
    init = family.init_values(y)
    init.update({family.canonical(k): v for k, v in init_overrides.items()})
    betas = {}
    for pname, block in blocks.items():
        beta = np.zeros(block.n_cols)
        beta[0] = linkfun(init[pname], spec.links[pname])
        betas[pname] = beta
    return betas


def _resolve_lambdas(spec, control, override=None):
    """Per-parameter lists of smoothing parameters, honoring fixed values."""
    lams = {}
    for pname, terms in spec.predictors.items():
        row = []
        for i, term in enumerate(terms):
            if term.kind == "intercept":
                row.append(0.0)
            elif override is not None and (pname, i) in override:
                row.append(float(override[(pname, i)]))
            elif term.lam == "select":
                row.append(float(control.lambda_default))
            else:
                row.append(float(term.lam))
        lams[pname] = row
    return lams


def penalized_loglik(data, spec: ModelSpec, coeffs: dict, lambdas: dict) -> float:
    """Penalized log-likelihood at raw per-term coefficients.

    ``coeffs[param]`` is a list of raw-basis coefficient vectors (scalars
    allowed for intercepts); ``lambdas[param]`` the matching smoothing
    parameters.  The penalty is the quadratic form in the raw basis.
    """
    table = _as_table(data)
    family = spec.family_obj
    y = np.asarray(table[spec.response], dtype=float)
    total_pen = 0.0
    etas = {}
    for pname, terms in spec.predictors.items():
        eta = np.zeros(len(table))
        for i, term in enumerate(terms):
            raw = np.atleast_1d(np.asarray(coeffs[pname][i], dtype=float))
            if term.kind == "intercept":
                eta = eta + raw[0]
            else:
                basis = build_basis(term, table)
                eta = eta + basis.design @ raw
                lam = float(lambdas[pname][i])
                if lam > 0:
                    total_pen += lam * float(raw @ basis.penalty @ raw)
        etas[pname] = eta
    theta = _theta_from_eta(spec, etas)
    family.validate(theta)
    ll, _ = _loglik(family, y, theta)
    return ll - 0.5 * total_pen


def _pen_deviance(family, y, spec, blocks, betas, lams):
    etas = {p: _predictor_eta(blocks[p], betas[p]) for p in blocks}
    theta = _theta_from_eta(spec, etas)
    with np.errstate(all="ignore"):
        ll, _ = _loglik(family, y, theta)
    pen = sum(blocks[p].penalty_value(betas[p], lams[p]) for p in blocks)
    return -2.0 * ll + pen, etas, theta


def _penalized_solve(xtwx, s_mat, rhs):
    """Solve (XtWX + S) x = rhs robustly for any smoothing magnitude.

    Splits coordinates along the penalty eigenbasis and eliminates the
    penalized block first (Schur complement), so enormous smoothing
    parameters cannot wash out the unpenalized directions.
    """
    if s_mat is None or not np.any(s_mat):
        c, low = sla.cho_factor(xtwx, check_finite=False)
        return sla.cho_solve((c, low), rhs, check_finite=False)
    w, v = np.linalg.eigh(s_mat)
    w = np.maximum(w, 0.0)
    null = w <= 1e-12 * w.max()
    m = v.T @ xtwx @ v
    r = v.T @ rhs
    if not np.any(null):
        c, low = sla.cho_factor(m + np.diag(w), check_finite=False)
        return v @ sla.cho_solve((c, low), r, check_finite=False)
    nn, rr = null, ~null
    c_fac = sla.cho_factor(m[np.ix_(rr, rr)] + np.diag(w[rr]), check_finite=False)
    b = m[np.ix_(nn, rr)]
    ci_bt = sla.cho_solve(c_fac, b.T, check_finite=False)
    ci_gr = sla.cho_solve(c_fac, r[rr], check_finite=False)
    schur = m[np.ix_(nn, nn)] - b @ ci_bt
    gam_n = sla.solve(schur, r[nn] - b @ ci_gr, assume_a="sym", check_finite=False)
    gam_r = ci_gr - ci_bt @ gam_n
    gamma = np.zeros_like(r)
    gamma[nn] = gam_n
    gamma[rr] = gam_r
    return v @ gamma


def _solve_newton(block, xtwx, s_mat, grad):
    try:
        return _penalized_solve(xtwx, s_mat, grad)
    except (np.linalg.LinAlgError, sla.LinAlgError, ValueError):
        labels = ", ".join(t.label() for t in block.terms)
        raise FitError(
            f"penalized system for parameter {block.param!r} is singular "
            f"(non-identifiable term among: {labels})"
        ) from None


def fit(data, spec: ModelSpec, control: FitControl | None = None, *, _lambda_override=None,
        _beta_init=None) -> FittedModel:
    """Fit one model by cyclic penalized quasi-Newton updates.

    Smoothing parameters marked "select" are tuned first (per
    ``control.lambda_mode``), then the final fit runs at the chosen values.
    """
    control = control or FitControl()
    table = _as_table(data)
    if len(table) == 0:
        raise DataError("cannot fit on an empty table")
    if spec.response not in table:
        raise DataError(f"response column {spec.response!r} missing from data")
    family = spec.family_obj
    y = np.asarray(table[spec.response], dtype=float)
    if np.any(~np.isfinite(y)) or np.any(y <= 0):
        raise DataError("response values must be positive and finite")

    has_select = any(
        term.lam == "select" and term.kind != "intercept"
        for terms in spec.predictors.values()
        for term in terms
    )
    if _lambda_override is None and has_select and control.lambda_mode == "bic":
        chosen = select_lambda(table, spec, control)
        return fit(table, spec, control, _lambda_override=chosen)

    n = len(table)
    blocks = {p: _Block(p, terms, table, n) for p, terms in spec.predictors.items()}
    lams = _resolve_lambdas(spec, control, _lambda_override)
    betas = (
        {p: b.copy() for p, b in _beta_init.items()}
        if _beta_init is not None
        else _initial_beta(spec, family, y, blocks, control.init)
    )

    pen_dev, etas, theta = _pen_deviance(family, y, spec, blocks, betas, lams)
    if not np.isfinite(pen_dev):
        raise FitError("penalized deviance is not finite at the initial values", state=betas)

    steps = {p: control.step_for(p) for p in blocks}
    rejected = {p: 0 for p in blocks}
    log = []
    converged = False
    cycle = 0
    for cycle in range(1, control.n_cyc + 1):
        dev_at_cycle_start = pen_dev
        for pname, block in blocks.items():
            score = family.score(y, theta)[pname]
            dmu = dinvlink_deta(etas[pname], spec.links[pname])
            u = score * dmu
            if not np.all(np.isfinite(u)):
                raise FitError(
                    f"non-finite working score for parameter {pname!r}", state=betas
                )
            w = np.maximum(u * u, control.weight_floor)
            s_mat = block.penalty_matrix(lams[pname])
            xtwx = block.X.T @ (w[:, None] * block.X)
            grad = block.X.T @ u - s_mat @ betas[pname]
            delta = _solve_newton(block, xtwx, s_mat, grad)

            step = steps[pname]
            accepted = False
            for _ in range(control.max_halvings if control.autostep else 1):
                cand = dict(betas)
                cand[pname] = betas[pname] + step * delta
                cand_dev, cand_etas, cand_theta = _pen_deviance(
                    family, y, spec, blocks, cand, lams
                )
                if np.isfinite(cand_dev) and cand_dev <= pen_dev + 1e-10:
                    betas = cand
                    pen_dev, etas, theta = cand_dev, cand_etas, cand_theta
                    accepted = True
                    break
                step *= 0.5
            if accepted:
                rejected[pname] = 0
                if control.autostep:
                    steps[pname] = min(2.0 * step, 1.0)
            else:
                rejected[pname] += 1
                if rejected[pname] == 10:
                    warnings.warn(
                        f"parameter {pname!r} frozen after 10 consecutive rejected updates",
                        RuntimeWarning,
                        stacklevel=2,
                    )
        change = dev_at_cycle_start - pen_dev
        log.append({"cycle": cycle, "pen_deviance": pen_dev, "improvement": change})
        if control.verbose:
            print(f"cycle {cycle:4d}  pen.dev {pen_dev:.6f}  impr {change:.3e}")
        if change < control.tol:
            converged = True
            break

    ll, _ = _loglik(family, y, theta)
    gd = -2.0 * ll
    edf, edf_by_term = _effective_df(family, spec, blocks, betas, etas, theta, lams, y, control)
    fitted = FittedModel(
        spec=spec,
        coefficients={p: blocks[p].raw_coefficients(betas[p]) for p in blocks},
        lambdas=lams,
        global_deviance=gd,
        edf=edf,
        edf_total=float(sum(edf.values())),
        edf_by_term=edf_by_term,
        converged=converged,
        n_cycles=cycle,
        n_train=n,
        iteration_log=log,
        bases={p: blocks[p].bases for p in blocks},
        train_data=table,
    )
    return fitted


def _effective_df(family, spec, blocks, betas, etas, theta, lams, y, control):
    """Trace of the penalized hat map, per parameter and per term."""
    edf = {}
    by_term = {}
    scores = family.score(y, theta)
    for pname, block in blocks.items():
        dmu = dinvlink_deta(etas[pname], spec.links[pname])
        u = scores[pname] * dmu
        s_mat = block.penalty_matrix(lams[pname])
        if not np.any(s_mat):
            # unpenalized block: the hat map is the identity
            edf[pname] = float(block.n_cols)
            by_term[pname] = [float(sl.stop - sl.start) for sl in block.slices]
            continue
        w = np.maximum(u * u, control.weight_floor)
        xtwx = block.X.T @ (w[:, None] * block.X)
        try:
            a = _penalized_solve(xtwx, s_mat, xtwx)
        except (np.linalg.LinAlgError, sla.LinAlgError, ValueError) as exc:
            raise NumericalError(f"singular penalized system for {pname!r}") from exc
        diag = np.diag(a)
        edf[pname] = float(np.sum(diag))
        by_term[pname] = [float(np.sum(diag[sl])) for sl in block.slices]
    return edf, by_term


def effective_df(fitted: FittedModel) -> dict:
    """Per-parameter effective degrees of freedom of a converged fit."""
    return dict(fitted.edf)


def _golden_section(fun, lo, hi, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return (a + b) / 2.0


def select_lambda(data, spec: ModelSpec, control: FitControl | None = None) -> dict:
    """Choose smoothing parameters for terms marked "select" by BIC.

    Sweeps the selectable terms, running a golden-section search on the
    natural log of each term's smoothing parameter while holding the
    others fixed; repeats for ``control.lambda_sweeps`` sweeps or until
    the choices stabilize.  Returns {(param, term_index): lambda} covering
    the selectable terms; fixed-lambda terms are untouched.
    """
    control = control or FitControl()
    table = _as_table(data)
    targets = [
        (pname, i)
        for pname, terms in spec.predictors.items()
        for i, term in enumerate(terms)
        if term.kind != "intercept" and term.lam == "select"
    ]
    if not targets:
        return {}
    n = len(table)
    logn = math.log(n)
    current = {key: float(control.lambda_default) for key in targets}
    cache = {}

    def bic_at(assign):
        key = tuple(sorted((k, round(math.log(v), 6)) for k, v in assign.items()))
        if key in cache:
            return cache[key]
        fitted = fit(
            table,
            spec,
            replace(control, lambda_mode="fixed"),
            _lambda_override=assign,
        )
        bic = fitted.global_deviance + logn * fitted.edf_total
        cache[key] = bic
        return bic

    lo, hi = control.lambda_log_bounds
    for _ in range(max(1, control.lambda_sweeps)):
        moved = 0.0
        for key in targets:
            def objective(loglam, key=key):
                assign = dict(current)
                assign[key] = math.exp(loglam)
                return bic_at(assign)

            best = _golden_section(objective, lo, hi, control.lambda_tol)
            moved = max(moved, abs(best - math.log(current[key])))
            current[key] = math.exp(best)
        if moved < control.lambda_tol:
            break
    return current


def predict_params(fitted: FittedModel, newdata) -> pd.DataFrame:
    """Distribution parameters at new covariate rows.

    Cyclic covariates wrap modulo their period, so predictors are
    genuinely periodic in time.
    """
    table = _as_table(newdata)
    spec = fitted.spec
    out = {}
    for pname, terms in spec.predictors.items():
        eta = np.zeros(len(table))
        for term, basis, coeffs in zip(terms, fitted.bases[pname], fitted.coefficients[pname]):
            eta = eta + evaluate_term(term, basis, coeffs, table)
        out[pname] = linkinv(eta, spec.links[pname])
    return pd.DataFrame(out, index=table.index)


def _covariates_used(spec: ModelSpec):
    used = []
    for terms in spec.predictors.values():
        for term in terms:
            for c in term.covariates:
                if c not in used:
                    used.append(c)
    return used


def standard_errors(fitted: FittedModel, at) -> pd.DataFrame:
    """Delta-method standard errors of the fitted parameters, in sample.

    The coefficient covariance is the inverse of the full penalized
    expected curvature across all distribution parameters (cross-parameter
    blocks included), so correlations between shape and scale show up in
    the reported uncertainty.  Rows of ``at`` must match training rows on
    the covariates the model uses; out-of-sample requests are a documented
    limitation and raise.
    """
    if fitted.train_data is None:
        raise UnsupportedFeatureError("standard errors need the in-memory training fit")
    spec = fitted.spec
    family = spec.family_obj
    table = fitted.train_data
    at = _as_table(at)
    used = _covariates_used(spec)

    if used:
        train_keys = {tuple(row): i for i, row in enumerate(np.asarray(table[used], dtype=float))}
        idx = []
        for row in np.asarray(at[used], dtype=float):
            key = tuple(row)
            if key not in train_keys:
                raise UnsupportedFeatureError(
                    "standard errors at new covariate values are not supported"
                )
            idx.append(train_keys[key])
        idx = np.asarray(idx, dtype=int)
    else:
        idx = np.zeros(len(at), dtype=int)

    n = len(table)
    blocks = {p: _Block(p, terms, table, n) for p, terms in spec.predictors.items()}
    betas = {p: blocks[p].stack_raw(fitted.coefficients[p]) for p in blocks}
    etas = {p: _predictor_eta(blocks[p], betas[p]) for p in blocks}
    theta = _theta_from_eta(spec, etas)
    scores = family.score(np.asarray(table[spec.response], dtype=float), theta)

    jac_cols = []
    s_blocks = []
    col_ranges = {}
    start = 0
    for pname, block in blocks.items():
        u = scores[pname] * dinvlink_deta(etas[pname], spec.links[pname])
        jac_cols.append(u[:, None] * block.X)
        s_blocks.append(block.penalty_matrix(fitted.lambdas[pname]))
        col_ranges[pname] = slice(start, start + block.n_cols)
        start += block.n_cols
    jac = np.hstack(jac_cols)
    s_full = sla.block_diag(*s_blocks)
    curv = jac.T @ jac + s_full
    try:
        cov = sla.inv(curv)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise NumericalError("singular curvature in standard-error computation") from exc

    out = {}
    for pname, block in blocks.items():
        v = cov[col_ranges[pname], col_ranges[pname]]
        x_rows = block.X[idx]
        var_eta = np.einsum("ij,jk,ik->i", x_rows, v, x_rows)
        dmu = dinvlink_deta(etas[pname][idx], spec.links[pname])
        out[pname] = dmu * np.sqrt(np.maximum(var_eta, 0.0))
    return pd.DataFrame(out, index=at.index)


def constant_model(family: str, params: dict, name: str = "", response: str = DEFAULT_RESPONSE) -> FittedModel:
    """Intercept-only model pinned at given parameter values (no fitting).

    Handy for simulating from a chosen distribution through the same
    prediction/serialization machinery, and for misspecification studies.
    """
    fam = get_family(family)
    spec = ModelSpec(family=family, response=response, name=name or f"{family}.const")
    values = {fam.canonical(k): float(v) for k, v in params.items()}
    missing = [p for p in fam.param_names if p not in values]
    if missing:
        raise ConfigError(f"constant_model missing values for: {', '.join(missing)}")
    coefficients = {
        p: [np.array([linkfun(values[p], spec.links[p])])] for p in fam.param_names
    }
    return FittedModel(
        spec=spec,
        coefficients=coefficients,
        lambdas={p: [0.0] for p in fam.param_names},
        global_deviance=float("nan"),
        edf={p: 1.0 for p in fam.param_names},
        edf_total=float(fam.n_params),
        edf_by_term={p: [1.0] for p in fam.param_names},
        converged=True,
        n_cycles=0,
        n_train=0,
        iteration_log=[],
        bases={p: [None] for p in fam.param_names},
        train_data=None,
    )


# -- the model grid ---------------------------------------------------------


def _alias_set(family_obj, aliases):
    amap = family_obj.alias_map()
    return tuple(amap[a] for a in aliases if a in amap)


def model_grid_spec(
    family: str,
    variation: str,
    *,
    time_covariate: str = DEFAULT_TIME_COVARIATE,
    space_covariates: tuple = DEFAULT_SPACE_COVARIATES,
    k_time: int = DEFAULT_K_TIME,
    k_space: int = DEFAULT_K_SPACE,
    period: float = DEFAULT_PERIOD,
    lam="select",
    response: str = DEFAULT_RESPONSE,
) -> ModelSpec:
    """Build one entry of the standard model grid.

    Variations: M.0 (constants), M.t / M.tnomu (cyclic time smooths on all
    parameters / on all but the shape), M.st (space and time smooths on
    all parameters), M.st2mu (smooths on shape and scale only), M.st2nomu
    (scale and first carrier parameter), M.st3nomu (all but the shape;
    four-parameter family only).
    """
    if variation not in GRID_VARIATIONS:
        raise ConfigError(f"unknown model variation {variation!r}; choose from {GRID_VARIATIONS}")
    fam = get_family(family)
    if variation == "M.st3nomu" and fam.n_params != 4:
        raise ConfigError("M.st3nomu needs a four-parameter family (egpd4)")

    smooth_sets = {
        "M.0": (),
        "M.t": ("mu", "sigma", "nu", "tau"),
        "M.tnomu": ("sigma", "nu", "tau"),
        "M.st": ("mu", "sigma", "nu", "tau"),
        "M.st2mu": ("mu", "sigma"),
        "M.st2nomu": ("sigma", "nu"),
        "M.st3nomu": ("sigma", "nu", "tau"),
    }
    with_space = variation.startswith("M.st")
    smoothed = _alias_set(fam, smooth_sets[variation])

    predictors = {}
    for pname in fam.param_names:
        terms = [TermSpec("intercept")]
        if pname in smoothed:
            if with_space:
                terms.append(
                    TermSpec("thinplate", covariates=tuple(space_covariates), dim=k_space, lam=lam)
                )
            terms.append(
                TermSpec("cyclic", covariates=(time_covariate,), dim=k_time, period=period, lam=lam)
            )
        predictors[pname] = terms
    name = f"{family}.{variation[2:]}"
    return ModelSpec(family=family, predictors=predictors, response=response, name=name)
