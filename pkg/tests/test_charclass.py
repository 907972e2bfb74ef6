import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topospec.calculus import Chart, QuadratureSpec
from topospec.charclass import (CycleSpec, euler_density_2d, integrate_class, pontrjagin1_density)
from topospec.configurations import minkowski_config, monopole_config
from topospec.errors import DimensionTooLow, InvalidParameter
from topospec.frame import MetricSpec, curvature_of

FAST = QuadratureSpec(points_per_axis=32, refinement_levels=2, convergence_tol=1e-6)


def sphere(R=1.0):
    return MetricSpec(2, "diagonal", lambda p: np.stack([np.full(len(p), R * R), (R * np.sin(p[:, 0])) ** 2], 1),
                      domain=Chart([(0.0, math.pi), (-math.inf, math.inf)]))


def test_euler_density_equals_sin_over_2pi():
    dens = euler_density_2d(sphere(2.0))
    x = np.array([[0.5, 1.0], [2.0, 0.1]])
    np.testing.assert_allclose(dens.form(x)[:, 0], np.sin(x[:, 0]) / (2 * math.pi), atol=1e-7)


@settings(max_examples=6, deadline=None)
@given(st.floats(0.3, 2.8))
def test_additivity_over_split_cycle(cut):
    dens = euler_density_2d(sphere())
    whole = integrate_class(dens, Chart([(0.2, 2.9), (0, 2 * math.pi)]), FAST)
    parts = integrate_class(dens, [Chart([(0.2, cut), (0, 2 * math.pi)]), Chart([(cut, 2.9), (0, 2 * math.pi)])],
                            FAST) if 0.2 < cut < 2.9 else whole
    assert parts.value == pytest.approx(whole.value, abs=1e-7)


def test_cycle_orientation_flips_sign():
    dens = euler_density_2d(sphere())
    a = integrate_class(dens, CycleSpec(axes=(0, 1), bounds=((0.3, 1.0), (0.0, 1.0))), FAST)
    b = integrate_class(dens, CycleSpec(axes=(1, 0), bounds=((0.0, 1.0), (0.3, 1.0))), FAST)
    assert a.value == pytest.approx(-b.value, abs=1e-12)
    assert a.value == pytest.approx((math.cos(0.3) - math.cos(1.0)) / (2 * math.pi), rel=1e-7)


def test_monopole_two_chart_cycle():
    cfg = monopole_config(1.0)
    assert cfg.integrate().value == pytest.approx(2.0, abs=1e-10)
    # the same total with the north chart stretched to 2 pi / 3
    pieces = [CycleSpec(("theta", "phi"), ((0, 2 * math.pi / 3), (0, 2 * math.pi)), chart_index=0),
              CycleSpec(("theta", "phi"), ((2 * math.pi / 3, math.pi), (0, 2 * math.pi)), chart_index=1)]
    assert cfg.integrate(where=pieces).value == pytest.approx(2.0, abs=1e-10)


def test_cycle_validation():
    dens = monopole_config(1.0).density("chern1")
    with pytest.raises(InvalidParameter):
        integrate_class(dens, CycleSpec(("theta", "phi"), ((0, 3), (0, 1)), chart_index=0))  # leaves chart
    with pytest.raises(InvalidParameter):
        CycleSpec(("theta", "theta"), ((0, 1), (0, 1)))
    with pytest.raises(InvalidParameter):
        integrate_class(dens, CycleSpec(("psi", "phi"), ((0, 1), (0, 1))))


def test_pontrjagin_needs_four_dimensions():
    with pytest.raises(DimensionTooLow):
        pontrjagin1_density(curvature_of(sphere()))


def test_pontrjagin_flat_is_zero():
    cfg = minkowski_config()
    res = cfg.integrate(quad=QuadratureSpec(points_per_axis=4, refinement_levels=2))
    assert res.value == 0.0 and res.converged


@settings(max_examples=5, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.integers(0, 1000))
def test_pontrjagin_vanishes_for_conformally_flat(a, b, seed):
    m = MetricSpec(4, "conformally-flat",
                   lambda p: np.exp(a * np.sin(p[:, 0] + p[:, 2]) + b * p[:, 1] * p[:, 3]))
    dens = pontrjagin1_density(curvature_of(m))
    x = np.random.default_rng(seed).uniform(-1, 1, (4, 4))
    assert np.max(np.abs(dens.form(x))) < 1e-5


def test_pontrjagin_of_product_metric_vanishes():
    # S^2 x S^2 has block-diagonal curvature, so each Omega_ab ^ Omega_ab is zero
    def comps(p):
        return np.stack([np.ones(len(p)), np.sin(p[:, 0]) ** 2, np.ones(len(p)), np.sin(p[:, 2]) ** 2], 1)

    dens = pontrjagin1_density(curvature_of(MetricSpec(4, "diagonal", comps)))
    x = np.array([[0.5, 1.0, 1.2, 3.0], [2.0, 0.0, 0.7, 1.0]])
    assert np.max(np.abs(dens.form(x))) < 1e-6
