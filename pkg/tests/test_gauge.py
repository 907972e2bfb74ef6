import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topospec.calculus import Chart, PFormField
from topospec.charclass import chern1_density, integrate_class
from topospec.configurations import monopole_config
from topospec.errors import InvalidParameter, MissingTransition
from topospec.gauge import GaugeConnection, field_strength, overlap_discrepancy, verify_transition


def test_monopole_field_strength_is_chart_independent():
    cfg = monopole_config(1.5)
    F = field_strength(cfg.gauge)
    x = cfg.gauge.overlap.sample(50, seed=4)
    np.testing.assert_allclose(F.forms[0](x)[:, 0], 1.5 * np.sin(x[:, 0]), atol=1e-10)
    assert overlap_discrepancy(F, cfg.gauge.overlap) < 1e-10


def test_transition_check_passes_and_fails():
    cfg = monopole_config(0.5)
    assert verify_transition(cfg.gauge).passed
    broken = GaugeConnection(cfg.gauge.charts, cfg.gauge.potentials, cfg.gauge.overlap,
                             transition=lambda p: 0.5 * p[:, 1])
    rep = verify_transition(broken)
    assert not rep.passed and rep.max_residual > 0.1
    assert "FAIL" in str(rep)


def test_missing_transition():
    chart = Chart([(0, 1), (0, 1)])
    A = PFormField(2, 1, lambda p: np.zeros((len(p), 2)))
    with pytest.raises(MissingTransition):
        verify_transition(GaugeConnection([chart], [A]))


def test_potential_must_be_one_form():
    chart = Chart([(0, 1), (0, 1)])
    with pytest.raises(InvalidParameter):
        GaugeConnection([chart], [PFormField(2, 2, lambda p: np.zeros((len(p), 1)))])


def test_bianchi_identity_in_3d():
    A = PFormField(3, 1, lambda p: np.stack([np.sin(p[:, 1] * p[:, 2]), p[:, 0] ** 2 * p[:, 2],
                                             np.cos(p[:, 0] + p[:, 1])], 1))
    F = field_strength(GaugeConnection([Chart([(-1, 1)] * 3)], [A]))
    x = np.random.default_rng(1).uniform(-1, 1, (10, 3))
    assert np.max(np.abs(F.closure_residual(x))) < 1e-6


@settings(max_examples=8, deadline=None)
@given(st.floats(-2, 2), st.integers(1, 3), st.floats(-1, 1))
def test_chern_number_gauge_invariant(a, k, b):
    cfg = monopole_config(1.0)
    chi = lambda p: a * np.sin(k * p[:, 1]) * np.cos(p[:, 0]) + b * p[:, 0] ** 2  # noqa: E731
    base = integrate_class(chern1_density(field_strength(cfg.gauge)), cfg.default_cycle)
    moved = integrate_class(chern1_density(field_strength(cfg.gauge.gauge_transformed(chi))), cfg.default_cycle)
    assert abs(moved.value - base.value) < 1e-7


def test_field_strength_pointwise_gauge_invariant():
    cfg = monopole_config(2.0)
    chi = lambda p: np.exp(np.sin(p[:, 0])) * np.cos(3 * p[:, 1])  # noqa: E731
    x = cfg.gauge.charts[0].sample(40, seed=2)
    F0 = field_strength(cfg.gauge).forms[0](x)
    F1 = field_strength(cfg.gauge.gauge_transformed(chi)).forms[0](x)
    np.testing.assert_allclose(F0, F1, atol=1e-7)
    assert F0.shape == (40, 1) and math.isfinite(F0.sum())
