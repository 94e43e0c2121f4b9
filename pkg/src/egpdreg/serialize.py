"""Versioned JSON persistence for fitted models.

The payload carries the family, links, term specifications with the
constants prediction needs (cyclic knot layout, thin-plate standardization
plus kernel knots and eigenbasis map), raw per-term coefficients,
smoothing parameters, effective degrees of freedom and fit metadata.
Reloaded models predict and simulate exactly; they do not retain the
training data, so in-sample standard errors are unavailable on a reload.
"""

import json

import numpy as np

from .errors import ConfigError
from .fitter import FittedModel, ModelSpec
from .links import parse_link
from .smoothers import BasisRealization, TermSpec

SCHEMA = "egpdreg-model/1"


def _term_to_dict(term: TermSpec, basis, coeffs, lam):
    d = {
        "kind": term.kind,
        "covariates": list(term.covariates),
        "dim": term.dim,
        "lambda": lam,
        "coefficients": np.asarray(coeffs, dtype=float).tolist(),
    }
    if term.kind == "cyclic":
        d["period"] = term.period
    if basis is not None and basis.kind == "thinplate":
        c = basis.constants
        d["constants"] = {
            "mean": c["mean"].tolist(),
            "sd": c["sd"].tolist(),
            "knots": c["knots"].tolist(),
            "map": c["map"].tolist(),
        }
    return d


def _term_from_dict(d):
    kind = d["kind"]
    term = TermSpec(
        kind=kind,
        covariates=tuple(d.get("covariates", ())),
        dim=int(d.get("dim", 0)),
        period=float(d.get("period", 366.0)),
        lam=float(d["lambda"]) if d.get("lambda") is not None else 0.0,
    )
    coeffs = np.asarray(d["coefficients"], dtype=float)
    basis = None
    if kind == "cyclic":
        basis = BasisRealization(
            kind="cyclic",
            design=np.zeros((0, term.dim)),
            penalty=np.zeros((term.dim, term.dim)),
            nullspace_dim=1,
            constants={"n_basis": term.dim, "period": term.period},
        )
    elif kind == "thinplate":
        c = d["constants"]
        constants = {
            "mean": np.asarray(c["mean"], dtype=float),
            "sd": np.asarray(c["sd"], dtype=float),
            "knots": np.asarray(c["knots"], dtype=float),
            "map": np.asarray(c["map"], dtype=float),
        }
        basis = BasisRealization(
            kind="thinplate",
            design=np.zeros((0, term.dim)),
            penalty=np.zeros((term.dim, term.dim)),
            nullspace_dim=3,
            constants=constants,
        )
    return term, basis, coeffs, float(d.get("lambda") or 0.0)


def model_to_dict(fitted: FittedModel) -> dict:
    spec = fitted.spec
    params = {}
    for pname, terms in spec.predictors.items():
        params[pname] = {
            "link": spec.links[pname].name,
            "terms": [
                _term_to_dict(term, basis, coeffs, lam)
                for term, basis, coeffs, lam in zip(
                    terms,
                    fitted.bases[pname],
                    fitted.coefficients[pname],
                    fitted.lambdas[pname],
                )
            ],
            "edf": fitted.edf[pname],
            "edf_by_term": fitted.edf_by_term[pname],
        }
    return {
        "schema": SCHEMA,
        "name": fitted.name,
        "family": spec.family,
        "response": spec.response,
        "parameters": params,
        "global_deviance": fitted.global_deviance,
        "edf_total": fitted.edf_total,
        "converged": fitted.converged,
        "n_cycles": fitted.n_cycles,
        "n_train": fitted.n_train,
    }


def model_from_dict(d: dict) -> FittedModel:
    if d.get("schema") != SCHEMA:
        raise ConfigError(f"unsupported model schema {d.get('schema')!r}")
    predictors = {}
    links = {}
    coefficients = {}
    lambdas = {}
    bases = {}
    edf = {}
    edf_by_term = {}
    for pname, pd_ in d["parameters"].items():
        links[pname] = parse_link(pd_["link"])
        terms, t_bases, t_coeffs, t_lams = [], [], [], []
        for td in pd_["terms"]:
            term, basis, coeffs, lam = _term_from_dict(td)
            terms.append(term)
            t_bases.append(basis)
            t_coeffs.append(coeffs)
            t_lams.append(lam)
        predictors[pname] = terms
        bases[pname] = t_bases
        coefficients[pname] = t_coeffs
        lambdas[pname] = t_lams
        edf[pname] = float(pd_.get("edf", 0.0))
        edf_by_term[pname] = [float(v) for v in pd_.get("edf_by_term", [])]
    spec = ModelSpec(
        family=d["family"],
        predictors=predictors,
        links=links,
        response=d.get("response", "precip_mm"),
        name=d.get("name", d["family"]),
    )
    return FittedModel(
        spec=spec,
        coefficients=coefficients,
        lambdas=lambdas,
        global_deviance=float(d.get("global_deviance", float("nan"))),
        edf=edf,
        edf_total=float(d.get("edf_total", sum(edf.values()))),
        edf_by_term=edf_by_term,
        converged=bool(d.get("converged", False)),
        n_cycles=int(d.get("n_cycles", 0)),
        n_train=int(d.get("n_train", 0)),
        iteration_log=[],
        bases=bases,
        train_data=None,
    )


def save_model(fitted: FittedModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(fitted), fh, indent=1)
        fh.write("\n")


def load_model(path) -> FittedModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
