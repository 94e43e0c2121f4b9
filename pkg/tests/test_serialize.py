import numpy as np
import pandas as pd
import pytest

from conftest import seasonal_table
from egpdreg.errors import ConfigError, UnsupportedFeatureError
from egpdreg.fitter import (
    FitControl,
    ModelSpec,
    constant_model,
    fit,
    model_grid_spec,
    predict_params,
    standard_errors,
)
from egpdreg.serialize import load_model, model_from_dict, model_to_dict, save_model


@pytest.fixture(scope="module")
def spatial_fit():
    rng = np.random.default_rng(81)
    ns, nper = 40, 120
    lon = rng.uniform(-4.5, 2.0, ns)
    lat = rng.uniform(46.0, 49.5, ns)
    sid = np.repeat(np.arange(ns), nper)
    df, _ = seasonal_table(ns * nper, seed=82)
    df["lon"] = lon[sid]
    df["lat"] = lat[sid]
    spec = model_grid_spec("egpd1", "M.st", k_time=8, k_space=12, lam=1.0)
    return df, fit(df, spec, FitControl(tol=1e-4, n_cyc=200))


def test_roundtrip_predictions_identical(spatial_fit, tmp_path):
    df, fitted = spatial_fit
    path = tmp_path / "model.json"
    save_model(fitted, path)
    loaded = load_model(path)
    assert loaded.name == fitted.name
    assert loaded.family == fitted.family
    assert loaded.global_deviance == pytest.approx(fitted.global_deviance)
    assert loaded.edf_total == pytest.approx(fitted.edf_total)
    got = predict_params(loaded, df.head(200))
    want = predict_params(fitted, df.head(200))
    np.testing.assert_allclose(got.to_numpy(), want.to_numpy(), rtol=1e-12, atol=1e-12)


def test_roundtrip_dict_schema(spatial_fit):
    _, fitted = spatial_fit
    d = model_to_dict(fitted)
    assert d["schema"] == "egpdreg-model/1"
    assert set(d["parameters"]) == {"xi", "psi", "kappa1"}
    term_kinds = [t["kind"] for t in d["parameters"]["psi"]["terms"]]
    assert term_kinds == ["intercept", "thinplate", "cyclic"]
    again = model_to_dict(model_from_dict(d))
    assert again == d


def test_rejects_unknown_schema():
    with pytest.raises(ConfigError):
        model_from_dict({"schema": "something/9"})


def test_loaded_model_cannot_do_insample_se(spatial_fit, tmp_path):
    df, fitted = spatial_fit
    path = tmp_path / "m.json"
    save_model(fitted, path)
    loaded = load_model(path)
    with pytest.raises(UnsupportedFeatureError):
        standard_errors(loaded, df.head(2))


def test_constant_model_roundtrip(tmp_path):
    model = constant_model("egpd4", {"xi": 0.15, "psi": 2.0, "kappa1": 1.2, "kappa2": 2.5})
    path = tmp_path / "c.json"
    save_model(model, path)
    loaded = load_model(path)
    newdata = pd.DataFrame({"anything": np.arange(3.0)})
    got = predict_params(loaded, newdata)
    assert got["kappa2"].iloc[0] == pytest.approx(2.5, rel=1e-12)
    assert loaded.edf_total == 4.0


def test_links_preserved(tmp_path):
    df, _ = seasonal_table(500, seed=83)
    from egpdreg.links import LinkFunction

    spec = ModelSpec(
        family="egpd1",
        links={"xi": LinkFunction("shifted-log", 0.0001)},
        name="custom-links",
    )
    fitted = fit(df, spec, FitControl(tol=1e-4))
    path = tmp_path / "l.json"
    save_model(fitted, path)
    loaded = load_model(path)
    assert loaded.spec.links["xi"].name == "shifted-log:0.0001"
    np.testing.assert_allclose(
        predict_params(loaded, df.head(5)).to_numpy(),
        predict_params(fitted, df.head(5)).to_numpy(),
        rtol=1e-12,
    )
