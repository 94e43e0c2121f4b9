import numpy as np
import pytest

from egpdreg.errors import ConfigError, DomainError
from egpdreg.smoothers import (
    TermSpec,
    build_cyclic_basis,
    build_thinplate_basis,
    evaluate_term,
)


def cyclic_spec(dim=12, period=366.0, cov="day_of_year"):
    return TermSpec("cyclic", covariates=(cov,), dim=dim, period=period, lam=1.0)


def tp_spec(dim=20):
    return TermSpec("thinplate", covariates=("lon", "lat"), dim=dim, lam=1.0)


def test_termspec_validation():
    with pytest.raises(ConfigError):
        TermSpec("cyclic", covariates=("t",), dim=3)  # too small
    with pytest.raises(ConfigError):
        TermSpec("cyclic", covariates=("t",), dim=10, period=0.0)
    with pytest.raises(ConfigError):
        TermSpec("thinplate", covariates=("x",), dim=10)  # needs two covariates
    with pytest.raises(ConfigError):
        TermSpec("wiggle", covariates=("t",), dim=10)
    with pytest.raises(ConfigError):
        TermSpec("cyclic", covariates=("t",), dim=10, lam=-1.0)


# -- cyclic ------------------------------------------------------------------


def test_cyclic_domain_check():
    spec = cyclic_spec()
    with pytest.raises(DomainError):
        build_cyclic_basis(np.array([0.0, 366.0]), spec)
    with pytest.raises(DomainError):
        build_cyclic_basis(np.array([-0.1]), spec)


def test_cyclic_constant_reproduction():
    spec = cyclic_spec(dim=15)
    x = np.linspace(0.0, 366.0, 200, endpoint=False)
    basis = build_cyclic_basis(x, spec)
    ones = np.ones(spec.dim)
    np.testing.assert_allclose(basis.design @ ones, np.ones(len(x)), atol=1e-10)
    assert ones @ basis.penalty @ ones == pytest.approx(0.0, abs=1e-12)
    assert basis.nullspace_dim == 1


def test_cyclic_periodicity_of_rows():
    spec = cyclic_spec(dim=11)
    basis = build_cyclic_basis(np.array([0.0]), spec)
    row0 = basis.evaluate(np.array([0.0]))
    row_end = basis.evaluate(np.array([366.0 - 1e-12]))
    np.testing.assert_allclose(row0, row_end, atol=1e-9)
    # evaluate() wraps: the period itself maps onto 0
    np.testing.assert_allclose(row0, basis.evaluate(np.array([366.0])), atol=1e-12)


def test_cyclic_penalty_psd_and_nullspace():
    spec = cyclic_spec(dim=13)
    basis = build_cyclic_basis(np.linspace(0, 360, 50), spec)
    eig = np.linalg.eigvalsh(basis.penalty)
    assert eig.min() >= -1e-10 * eig.max()
    rng = np.random.default_rng(3)
    for _ in range(1000):
        b = rng.normal(size=spec.dim)
        assert b @ basis.penalty @ b >= -1e-12
    # directions orthogonal to the constant are strictly penalized
    b = rng.normal(size=spec.dim)
    b -= b.mean()
    assert b @ basis.penalty @ b > 1e-8


def test_cyclic_projection_recovers_sine():
    period = 366.0
    spec = cyclic_spec(dim=20, period=period)
    x = np.linspace(0.0, period, 400, endpoint=False)
    f = np.sin(2 * np.pi * x / period)
    basis = build_cyclic_basis(x, spec)
    beta, *_ = np.linalg.lstsq(basis.design, f, rcond=None)
    dense = np.linspace(0.0, period, 2000, endpoint=False)
    approx = basis.evaluate(dense) @ beta
    assert np.max(np.abs(approx - np.sin(2 * np.pi * dense / period))) < 1e-3


def test_cyclic_lambda_limit_is_nullspace_projection():
    # penalized LS at huge lambda collapses onto the constant
    from egpdreg.fitter import _penalized_solve

    spec = cyclic_spec(dim=12)
    rng = np.random.default_rng(4)
    x = rng.uniform(0, 366, 500)
    y = 2.0 + np.sin(2 * np.pi * x / 366.0)
    basis = build_cyclic_basis(x, spec)
    lam = 1e12
    beta = _penalized_solve(
        basis.design.T @ basis.design, lam * basis.penalty, basis.design.T @ y
    )
    fitted = basis.design @ beta
    np.testing.assert_allclose(fitted, np.full_like(fitted, y.mean()), atol=1e-6)


def test_thinplate_lambda_limit_is_affine_projection():
    from egpdreg.fitter import _penalized_solve

    coords = scattered(150, seed=7)
    spec = tp_spec(dim=18)
    basis = build_thinplate_basis(coords, spec)
    rng = np.random.default_rng(8)
    y = 1.0 + 0.5 * coords[:, 0] - 0.2 * coords[:, 1] + np.exp(
        -np.sum((coords - coords.mean(axis=0)) ** 2, axis=1)
    ) + rng.normal(0, 0.05, len(coords))
    beta = _penalized_solve(
        basis.design.T @ basis.design, 1e12 * basis.penalty, basis.design.T @ y
    )
    fitted = basis.design @ beta
    # affine projection of y
    t = basis.design[:, :3]
    proj = t @ np.linalg.lstsq(t, y, rcond=None)[0]
    np.testing.assert_allclose(fitted, proj, atol=1e-6)


# -- thin plate ----------------------------------------------------------------


def scattered(n=200, seed=1):
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(-4, 2, n), rng.uniform(46, 50, n)])


def test_thinplate_needs_distinct_points():
    coords = np.tile([[0.0, 0.0]], (50, 1))
    with pytest.raises(ConfigError):
        build_thinplate_basis(coords, tp_spec(dim=10))


def test_thinplate_affine_reproduction():
    coords = scattered(150)
    spec = tp_spec(dim=25)
    basis = build_thinplate_basis(coords, spec)
    y = 2.0 + coords[:, 0] - 3.0 * coords[:, 1]
    lam = 1.0
    beta = np.linalg.solve(
        basis.design.T @ basis.design + lam * basis.penalty, basis.design.T @ y
    )
    np.testing.assert_allclose(basis.design @ beta, y, atol=1e-8)
    assert beta @ basis.penalty @ beta == pytest.approx(0.0, abs=1e-10)
    assert basis.nullspace_dim == 3


def test_thinplate_penalty_psd():
    basis = build_thinplate_basis(scattered(120), tp_spec(dim=18))
    eig = np.linalg.eigvalsh(basis.penalty)
    assert eig.min() >= 0.0
    rng = np.random.default_rng(9)
    for _ in range(1000):
        b = rng.normal(size=18)
        assert b @ basis.penalty @ b >= -1e-12


def test_thinplate_projection_recovers_bump():
    coords = scattered(200, seed=2)
    spec = tp_spec(dim=30)
    basis = build_thinplate_basis(coords, spec)
    center = np.array([-1.0, 48.0])
    scale = np.array([1.5, 1.0])
    f = np.exp(-np.sum(((coords - center) / scale) ** 2, axis=1))
    beta, *_ = np.linalg.lstsq(basis.design, f, rcond=None)
    assert np.max(np.abs(basis.design @ beta - f)) < 0.05


def test_thinplate_evaluate_matches_training_rows():
    coords = scattered(80, seed=3)
    basis = build_thinplate_basis(coords, tp_spec(dim=15))
    np.testing.assert_allclose(basis.evaluate(coords), basis.design, atol=1e-10)


# -- evaluate_term ---------------------------------------------------------------


def test_evaluate_intercept_term():
    term = TermSpec("intercept")
    out = evaluate_term(term, None, np.array([3.5]), {"day_of_year": np.arange(4.0)})
    np.testing.assert_allclose(out, 3.5)


def test_evaluate_cyclic_training_reconstruction():
    spec = cyclic_spec(dim=14)
    x = np.linspace(0, 360, 100)
    basis = build_cyclic_basis(x, spec)
    rng = np.random.default_rng(5)
    beta = rng.normal(size=spec.dim)
    out = evaluate_term(spec, basis, beta, {"day_of_year": x})
    np.testing.assert_allclose(out, basis.design @ beta, atol=1e-10)
    # periodic wrap in evaluation
    shifted = evaluate_term(spec, basis, beta, {"day_of_year": x[:10] + 366.0})
    np.testing.assert_allclose(shifted, out[:10], atol=1e-9)


def test_evaluate_missing_covariate():
    spec = cyclic_spec(dim=14, cov="day_of_year")
    basis = build_cyclic_basis(np.linspace(0, 300, 50), spec)
    with pytest.raises(ConfigError):
        evaluate_term(spec, basis, np.zeros(14), {"lon": np.zeros(5)})


def test_evaluate_wrong_coefficient_length():
    spec = cyclic_spec(dim=14)
    basis = build_cyclic_basis(np.linspace(0, 300, 50), spec)
    with pytest.raises(ConfigError):
        evaluate_term(spec, basis, np.zeros(9), {"day_of_year": np.zeros(5)})
