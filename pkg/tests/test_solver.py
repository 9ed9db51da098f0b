import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_values import LAMBDA_F_ALPHA2_M3
from regression_values import (GAMMA_ALPHA2_M3, GAMMA_ALPHA3_M3, GAMMA_DEGREGORIO_ALPHA2, LAMBDA_ALPHA2_M3,
                               LAMBDA_ALPHA3_M3, LAMBDA_DEGREGORIO_ALPHA2)
from steadysqg.errors import (DegenerateInputError, DomainError, HolderFitError, InvalidConfigError,
                              NonConvergenceError)
from steadysqg.kernel import KernelConfig, apply_kernel
from steadysqg.operators import apply
from steadysqg.sine_series import (GridFunction, SineSeries, grid_nodes, pointwise_power, to_coefficients, to_grid,
                                   weighted_sine_integral)
from steadysqg.solver import SolverConfig, holder_exponent, map_F, operator_A, solve

CFG2 = SolverConfig(alpha=2.0)
X = grid_nodes(1024)


def test_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(alpha=0.5)
    with pytest.raises(InvalidConfigError):
        SolverConfig(family="sqg", m=2)
    with pytest.raises(InvalidConfigError):
        SolverConfig(family="degregorio", m=3)
    with pytest.raises(InvalidConfigError):
        SolverConfig(modes=600, grid=1024)
    with pytest.raises(InvalidConfigError):
        SolverConfig(damping=0.0)


def test_operator_A_examples():
    sin = GridFunction(np.sin(X))
    np.testing.assert_allclose(operator_A(sin, SolverConfig(alpha=1.0)).values, 1.6 * np.sin(X), atol=1e-14)
    assert np.all(operator_A(GridFunction(np.zeros(1025)), CFG2).values == 0.0)
    # Both paths act on the same K-mode projection of sin^(1/2).
    proj = to_grid(to_coefficients(pointwise_power(GridFunction(np.r_[0.0, np.sin(X[1:-1]), 0.0]), 0.5),
                                   CFG2.modes), 1024)
    ker = apply_kernel(proj, KernelConfig(3)).values
    A = operator_A(sin, CFG2).values
    assert np.max(np.abs(A - ker)) / np.max(np.abs(ker)) <= 1e-6


def test_operator_A_nonnegative_on_nonnegative_input(rng):
    for _ in range(5):
        s = SineSeries(rng.standard_normal(6) / np.arange(1, 7))
        v = GridFunction(to_grid(s, 1024).values ** 2)
        assert operator_A(v, CFG2).values.min() >= -1e-6 * operator_A(v, CFG2).sup_norm()


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 100.0), st.sampled_from([1.5, 2.0, 3.0]))
def test_scale_covariance(c, alpha):
    cfg = SolverConfig(alpha=alpha, modes=64, grid=256)
    v = GridFunction(np.sin(grid_nodes(256)) + 0.3 * np.sin(3 * grid_nodes(256)))
    A1 = operator_A(v * c, cfg).values
    A0 = operator_A(v, cfg).values
    np.testing.assert_allclose(A1, c ** (1 / alpha) * A0, rtol=1e-12, atol=1e-13 * np.abs(A1).max())
    F1, _ = map_F(v * c, cfg)
    F0, _ = map_F(v, cfg)
    np.testing.assert_allclose(F1.values, F0.values, atol=1e-12)


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
def test_map_F_linear_case(c):
    cfg = SolverConfig(alpha=1.0)
    Fv, lam = map_F(GridFunction(c * np.sin(X)), cfg)
    np.testing.assert_allclose(Fv.values, 2 / np.pi * np.sin(X), atol=1e-14)
    assert lam == pytest.approx(c * 1.6 * np.pi / 2, rel=1e-13)
    assert weighted_sine_integral(Fv) == pytest.approx(1.0, abs=1e-14)


def test_map_F_alpha2_oracle():
    _, lam = map_F(GridFunction(2 / np.pi * np.sin(X)), CFG2)
    # Trapezoid projection of sin^(1/2) carries an O(h^(5/2)) endpoint error.
    assert lam == pytest.approx(LAMBDA_F_ALPHA2_M3, abs=1e-7)


def test_operator_A_rejects_nonzero_endpoints():
    from steadysqg.errors import PreconditionError

    with pytest.raises(PreconditionError):
        operator_A(GridFunction(np.sin(X) + 0.1), CFG2)


def test_map_F_degenerate():
    with pytest.raises(DegenerateInputError):
        map_F(GridFunction(np.zeros(1025)), CFG2)


def test_alpha1_closed_form(bundle_alpha1):
    b = bundle_alpha1
    assert b.lam == pytest.approx(8 / 5, abs=1e-12)
    assert b.gamma == 1.0 and b.converged
    np.testing.assert_allclose(b.v.coeffs[0], 2 / np.pi)
    assert np.all(b.v.coeffs[1:] == 0)
    fc = b.f.coeffs
    assert abs(fc[2]) > 0 and np.max(np.abs(np.delete(fc, 2))) <= 1e-12 * abs(fc[2])


def test_alpha2_solve(bundle_alpha2):
    b = bundle_alpha2
    assert b.converged and b.iterations <= 500
    assert b.residual <= 1e-8
    assert weighted_sine_integral(b.v) == pytest.approx(1.0, abs=1e-12)
    assert b.diagnostics["min_v"] > 0
    assert b.lam ** (b.alpha / (b.alpha - 1)) == pytest.approx(b.gamma, rel=1e-14)
    assert b.lam == pytest.approx(LAMBDA_ALPHA2_M3, rel=1e-7)
    assert b.gamma == pytest.approx(GAMMA_ALPHA2_M3, rel=1e-7)
    assert b.diagnostics["power_moment_bound_holds"]
    assert b.diagnostics["spectral_g_gap"] <= 1e-10


def test_alpha2_g_solves_linear_relation(bundle_alpha2):
    b = bundle_alpha2
    np.testing.assert_allclose(to_grid(apply(b.config.operator, b.g), 1024).values,
                               to_grid(b.u_series, 1024).values, atol=1e-8 * b.u_star.sup_norm())
    assert np.all(b.g_grid.values[1:-1] < 0)


def test_alpha3_and_degregorio_regression(bundle_alpha3, bundle_degregorio):
    # The y^(1/3) endpoint behaviour slows the projection error to about 1e-7.
    assert bundle_alpha3.lam == pytest.approx(LAMBDA_ALPHA3_M3, rel=3e-7)
    assert bundle_alpha3.gamma == pytest.approx(GAMMA_ALPHA3_M3, rel=3e-7)
    d = bundle_degregorio
    assert d.converged and d.residual <= 1e-8 and d.diagnostics["min_v"] > 0
    assert d.lam == pytest.approx(LAMBDA_DEGREGORIO_ALPHA2, rel=1e-7)
    assert d.gamma == pytest.approx(GAMMA_DEGREGORIO_ALPHA2, rel=1e-7)


def test_V_M_cap_flag():
    b = solve(SolverConfig(alpha=2.0, M_cap=1.0))
    assert b.diagnostics["within_M_cap"] is True
    b = solve(SolverConfig(alpha=2.0, M_cap=0.1))
    assert b.diagnostics["within_M_cap"] is False


def test_nonconvergence_carries_partial():
    with pytest.raises(NonConvergenceError) as exc:
        solve(SolverConfig(alpha=2.0, max_iter=3))
    e = exc.value
    assert len(e.history) == 3
    assert e.partial is not None and not e.partial.converged
    assert e.last_iterate.modes == 256


def test_symmetry_flag_removes_even_modes():
    b = solve(SolverConfig(alpha=2.0, symmetry=True))
    assert np.all(b.v.coeffs[1::2] == 0.0)
    plain = solve(SolverConfig(alpha=2.0))
    assert b.lam == pytest.approx(plain.lam, rel=1e-10)


def test_holder_exponents(bundle_alpha2, bundle_alpha3):
    assert holder_exponent(bundle_alpha2) == pytest.approx(0.5, abs=0.05)
    assert holder_exponent(bundle_alpha3) == pytest.approx(1 / 3, abs=0.05)
    assert holder_exponent(SineSeries([1.0])) == pytest.approx(1.0, abs=0.05)


def test_holder_errors():
    with pytest.raises(HolderFitError):
        holder_exponent(SineSeries([1.0]), fit_window=(0.1, 1.0))
    with pytest.raises(HolderFitError):
        holder_exponent(SineSeries([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]), fit_window=(1e-3, 0.5))
