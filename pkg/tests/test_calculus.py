import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topospec.calculus import (Chart, PFormField, QuadratureSpec, constant_form, d, exact_form,
                               exterior_derivative, gradient, integrate, integrate_function, multi_indices,
                               partial_derivative, permutation_sign, wedge, wedge_components)
from topospec.errors import (DegreeOverflow, EmptyDomain, InvalidParameter, NoConvergence,
                             NonFiniteEvaluation)

coef = st.floats(-2.0, 2.0, allow_nan=False)


def test_multi_indices_lexicographic():
    assert multi_indices(3, 2) == ((0, 1), (0, 2), (1, 2))
    assert multi_indices(4, 0) == ((),)
    assert len(multi_indices(4, 2)) == 6


@pytest.mark.parametrize("seq,sign", [((0, 1, 2), 1), ((1, 0, 2), -1), ((2, 0, 1), 1), ((0, 0, 1), 0)])
def test_permutation_sign(seq, sign):
    assert permutation_sign(seq) == sign


def test_chart_rejects_empty_interval():
    with pytest.raises(InvalidParameter):
        Chart([(1.0, 1.0)])


def test_chart_axis_lookup_and_region():
    c = Chart([(0, 1), (0, 1)], region=lambda p: p[:, 0] < 0.5, names=("x", "y"))
    assert c.axis("y") == 1
    assert c.accepts(np.array([[0.2, 0.2], [0.7, 0.2]])).tolist() == [True, False]


def test_form_shape_checked():
    bad = PFormField(2, 1, lambda p: np.zeros((len(p), 3)))
    with pytest.raises(InvalidParameter):
        bad(np.zeros((4, 2)))


def test_gradient_of_polynomial():
    x = np.array([[0.3, -1.2], [2.0, 0.5]])
    f = lambda p: p[:, 0] ** 3 * p[:, 1]  # noqa: E731
    g = gradient(f, x, order=4)
    exact = np.stack([3 * x[:, 0] ** 2 * x[:, 1], x[:, 0] ** 3], axis=1)
    np.testing.assert_allclose(g, exact, rtol=1e-9, atol=1e-10)


def test_partial_derivative_scalar_point():
    f = lambda p: np.sin(p[:, 0]) * p[:, 1]  # noqa: E731
    val = partial_derivative(f, [0.4, 2.0], 0)
    assert val == pytest.approx(math.cos(0.4) * 2.0, rel=1e-8)


def test_gradient_nonfinite_raises():
    with pytest.raises(NonFiniteEvaluation), np.errstate(all="ignore"):
        gradient(lambda p: np.log(p[:, 0]), np.array([[0.0]]))


def test_exterior_derivative_of_exact_1form():
    # w = x dy - y dx, dw = 2 dx^dy
    w = PFormField(2, 1, lambda p: np.stack([-p[:, 1], p[:, 0]], axis=1))
    x = np.random.default_rng(0).uniform(-1, 1, (10, 2))
    np.testing.assert_allclose(exterior_derivative(w, x), 2.0, rtol=1e-9)


def _trig_form(dim, deg, a):
    a = np.asarray(a)

    def comps(p):
        cols = []
        for i, _ in enumerate(multi_indices(dim, deg)):
            cols.append(np.sin(a[i % len(a)] * p[:, 0] + p[:, -1]) * np.cos((1 + i) * p[:, 1]))
        return np.stack(cols, axis=1)

    return PFormField(dim, deg, comps)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 0), (3, 0), (3, 1), (4, 1), (4, 2)]), st.lists(coef, min_size=1, max_size=4),
       st.integers(0, 1000))
def test_d_squared_vanishes(shape, a, seed):
    dim, deg = shape
    w = _trig_form(dim, deg, a)
    x = np.random.default_rng(seed).uniform(-1, 1, (5, dim))
    dd = d(d(w, order=4), order=4)
    assert np.max(np.abs(dd(x))) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 3), st.integers(0, 3), st.integers(0, 10_000))
def test_wedge_graded_antisymmetry(dim, p, q, seed):
    if p + q > dim:
        with pytest.raises(DegreeOverflow):
            wedge_components(np.zeros((1, len(multi_indices(dim, p)))), p,
                             np.zeros((1, len(multi_indices(dim, q)))), q, dim)
        return
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(3, len(multi_indices(dim, p))))
    v = rng.normal(size=(3, len(multi_indices(dim, q))))
    uv = wedge_components(u, p, v, q, dim)
    vu = wedge_components(v, q, u, p, dim)
    np.testing.assert_allclose(uv, (-1) ** (p * q) * vu, atol=1e-13)


def test_wedge_of_forms():
    dx = constant_form(2, 1, [1.0, 0.0])
    dy = constant_form(2, 1, [0.0, 1.0])
    assert wedge(dx, dy)(np.zeros((1, 2)))[0, 0] == 1.0
    assert wedge(dy, dx)(np.zeros((1, 2)))[0, 0] == -1.0
    with pytest.raises(DegreeOverflow):
        wedge(wedge(dx, dy), dx)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=2, max_size=2), st.floats(0.1, 3.0))
def test_quadrature_exact_for_polynomials(powers, b):
    i, j = powers
    chart = Chart([(0.0, b), (-1.0, 1.0)])
    res = integrate_function(lambda p: p[:, 0] ** i * p[:, 1] ** j, chart, QuadratureSpec(points_per_axis=8, refinement_levels=2))
    exact = b ** (i + 1) / (i + 1) * ((1 - (-1) ** (j + 1)) / (j + 1))
    assert res.value == pytest.approx(exact, rel=1e-12, abs=1e-12)
    assert res.converged


def test_integrate_density_orientation():
    vol = constant_form(2, 2, [1.0])
    assert integrate(vol, Chart([(0, 2), (0, 3)])).value == pytest.approx(6.0, rel=1e-14)
    assert integrate(vol, Chart([(0, 2), (0, 3)], orientation=(1, 0))).value == pytest.approx(-6.0, rel=1e-14)


def test_integrate_requires_top_degree():
    with pytest.raises(InvalidParameter):
        integrate(constant_form(2, 1, [1.0, 0.0]), Chart([(0, 1), (0, 1)]))


def test_region_predicate_restricts_domain():
    disc = Chart([(-1, 1), (-1, 1)], region=lambda p: p[:, 0] ** 2 + p[:, 1] ** 2 <= 1)
    res = integrate_function(lambda p: np.ones(len(p)), disc, QuadratureSpec(points_per_axis=64, refinement_levels=3, convergence_tol=1e-2))
    assert res.value == pytest.approx(math.pi, rel=1e-2)


def test_empty_region_raises():
    with pytest.raises(EmptyDomain):
        integrate_function(lambda p: np.ones(len(p)), Chart([(0, 1)], region=lambda p: p[:, 0] > 2))


def test_unconverged_is_flagged_not_raised():
    chart = Chart([(0.0, 1.0)])
    res = integrate_function(lambda p: np.sin(200 * p[:, 0]), chart, QuadratureSpec(points_per_axis=4, refinement_levels=2))
    assert not res.converged and "no_convergence" in res.flags
    with pytest.raises(NoConvergence):
        res.raise_if_unconverged()


def test_integration_bitwise_deterministic(monkeypatch):
    f = lambda p: np.exp(np.sin(3 * p[:, 0]) * p[:, 1])  # noqa: E731
    chart = Chart([(0, 2), (-1, 1)])
    a = integrate_function(f, chart)
    b = integrate_function(f, chart)
    monkeypatch.setenv("TOPOSPEC_WORKERS", "4")
    c = integrate_function(f, chart)
    assert a.value == b.value == c.value
    assert a.levels == c.levels


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFiniteEvaluation), np.errstate(all="ignore"):
        integrate_function(lambda p: 1 / (p[:, 0] - p[:, 0]), Chart([(0, 1)]), QuadratureSpec(points_per_axis=4, refinement_levels=1))


def test_exact_form_is_gradient():
    df = exact_form(lambda p: p[:, 0] * p[:, 1] ** 2, 2)
    np.testing.assert_allclose(df(np.array([[2.0, 3.0]])), [[9.0, 12.0]], rtol=1e-9)
