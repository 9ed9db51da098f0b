import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracle_values import INT_SIN_3_2
from steadysqg.errors import AliasingError, DomainError, PreconditionError, ResolutionError
from steadysqg.sine_series import (
    GridFunction,
    SineSeries,
    evaluate,
    grid_nodes,
    negative_mass,
    pointwise_power,
    to_coefficients,
    to_grid,
    weighted_sine_integral,
)

coeffs = arrays(np.float64, st.integers(1, 32), elements=st.floats(-10, 10, allow_nan=False))


def test_to_grid_quarter_nodes():
    np.testing.assert_allclose(to_grid(SineSeries([1.0]), 4).values,
                               [0, np.sqrt(2) / 2, 1, np.sqrt(2) / 2, 0], atol=1e-15)
    np.testing.assert_allclose(to_grid(SineSeries([0.0, 1.0]), 4).values, [0, 1, 0, -1, 0], atol=1e-15)


@pytest.mark.parametrize("N", [4, 10, 64, 1000])
def test_normalised_sine_mid_node(N):
    w = to_grid(SineSeries([2 / np.pi]), N)
    assert w.values[0] == 0.0 and w.values[-1] == 0.0
    assert w.values[N // 2] == pytest.approx(2 / np.pi * np.sin(N // 2 * np.pi / N), abs=1e-15)


def test_to_grid_resolution_error():
    with pytest.raises(ResolutionError):
        to_grid(SineSeries(np.ones(8)), 8)


def test_to_coefficients_examples():
    a = to_coefficients(to_grid(SineSeries.from_modes(8, a3=5.0), 64), 8).coeffs
    assert a[2] == pytest.approx(5.0, abs=1e-12)
    assert np.max(np.abs(np.delete(a, 2))) <= 1e-12
    assert np.all(to_coefficients(GridFunction(np.zeros(17)), 8).coeffs == 0)
    x = grid_nodes(4096)
    a = to_coefficients(GridFunction(np.sin(x) + np.sin(2 * x)), 2).coeffs
    np.testing.assert_allclose(a, [1.0, 1.0], atol=1e-12)


def test_to_coefficients_errors():
    w = to_grid(SineSeries([1.0]), 8)
    with pytest.raises(AliasingError):
        to_coefficients(w, 8)
    bad = GridFunction(np.r_[0.3, w.values[1:]])
    with pytest.raises(PreconditionError):
        to_coefficients(bad, 4)


def test_weighted_sine_integral_examples():
    x = grid_nodes(256)
    assert weighted_sine_integral(GridFunction(np.sin(x))) == pytest.approx(np.pi / 2, abs=1e-13)
    assert weighted_sine_integral(GridFunction(np.sin(2 * x))) == pytest.approx(0.0, abs=1e-13)
    assert weighted_sine_integral(SineSeries([2 / np.pi, 7.0])) == pytest.approx(1.0, abs=1e-15)
    assert weighted_sine_integral(to_grid(SineSeries([2 / np.pi]), 32)) == pytest.approx(1.0, abs=1e-14)


def test_pointwise_power():
    w = GridFunction([0.0, 4.0, -1e-14, 0.0])
    p = pointwise_power(w, 0.5)
    np.testing.assert_array_equal(p.values, [0.0, 2.0, 0.0, 0.0])
    assert negative_mass(w) > 0
    with pytest.raises(DomainError):
        pointwise_power(w, 0.0)
    with pytest.raises(DomainError):
        pointwise_power(w, -1.0)


def test_power_of_sine_against_quadrature_oracle():
    s = pointwise_power(GridFunction(np.sin(grid_nodes(1024))), 0.5)
    # Trapezoid error is O(h^(5/2)) from the y^(3/2) endpoint behaviour.
    assert weighted_sine_integral(s) == pytest.approx(INT_SIN_3_2, abs=1e-7)


def test_values_are_read_only():
    s = SineSeries([1.0, 2.0])
    with pytest.raises(ValueError):
        s.coeffs[0] = 3.0
    w = to_grid(s, 8)
    with pytest.raises(ValueError):
        w.values[1] = 0.0


@settings(max_examples=50, deadline=None)
@given(coeffs, st.integers(0, 3))
def test_round_trip(a, extra):
    s = SineSeries(a)
    N = 2 * s.modes + extra
    back = to_coefficients(to_grid(s, N), s.modes)
    assert np.max(np.abs(back.coeffs - a)) <= 1e-12 * max(1.0, np.abs(a).max())


@pytest.mark.parametrize("k", range(1, 17))
def test_orthogonality(k):
    w = to_grid(SineSeries.from_modes(k, **{f"a{k}": 1.0}), 64)
    assert weighted_sine_integral(w) == pytest.approx(np.pi / 2 if k == 1 else 0.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(coeffs, coeffs)
def test_parseval_product(a, b):
    K = max(a.size, b.size)
    s, t = SineSeries(a).resized(K), SineSeries(b).resized(K)
    N = 2 * K
    prod = to_grid(s, N).values * to_grid(t, N).values
    h = np.pi / N
    quad = h * prod.sum()
    exact = np.pi / 2 * np.dot(s.coeffs, t.coeffs)
    assert quad == pytest.approx(exact, abs=1e-10 * max(1.0, np.abs(a).max() * np.abs(b).max() * K))


@settings(max_examples=25, deadline=None)
@given(coeffs, st.floats(0, np.pi))
def test_evaluate_matches_direct_sum(a, x):
    s = SineSeries(a)
    direct = sum(c * np.sin((k + 1) * x) for k, c in enumerate(a))
    assert evaluate(s, x) == pytest.approx(direct, abs=1e-12 * max(1.0, np.abs(a).sum()))
