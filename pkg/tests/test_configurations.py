import math

import numpy as np
import pytest

from topospec.configurations import (BlackHoleParams, CATALOG, build_configuration, bundle_dimension,
                                     catalog_listing, group_dimension, kerr_newman_config, oscillator_config,
                                     reissner_nordstrom_config, sphere_config)
from topospec.errors import InvalidParameter, UnknownGroup
from topospec.gauge import field_strength


@pytest.mark.parametrize("group,dim", [("SO(2)", 1), ("SO(3)", 3), ("SO(1,3)", 6), ("U(1)", 1), ("U(2)", 4),
                                       ("SU(2)", 3), ("SU(3)", 8), ("U(1)xSU(2)xSU(3)", 12)])
def test_group_dimension(group, dim):
    assert group_dimension(group) == dim


@pytest.mark.parametrize("group", ["G2", "SU(1)", "Sp(4)", "U(1)xE8"])
def test_unknown_group(group):
    with pytest.raises(UnknownGroup):
        group_dimension(group)


@pytest.mark.parametrize("name,params,dim", [("minkowski", {}, 10), ("standard_model", {}, 16),
                                             ("yang_mills", {"k": 3}, 12), ("monopole", {"g": 1}, 3),
                                             ("reissner_nordstrom", {"m": 1, "e": 0.5, "r0": 1}, 5)])
def test_bundle_dimension(name, params, dim):
    assert bundle_dimension(build_configuration(name, params)) == dim


def test_build_configuration_is_strict():
    with pytest.raises(InvalidParameter):
        build_configuration("sphere", {"R": 1, "r": 2})
    with pytest.raises(InvalidParameter):
        build_configuration("sphere", {})
    with pytest.raises(InvalidParameter):
        build_configuration("torus", {})
    cfg = build_configuration("oscillator", {"m": 1, "k1": 1, "E": 1, "q0": 0.5})
    assert cfg.params["k2"] == 0.0 and cfg.params["L"] == 1.0


def test_catalog_listing_covers_catalog():
    listing = catalog_listing()
    assert set(listing) == set(CATALOG)
    assert "R" in listing["sphere"]["params"]


@pytest.mark.parametrize("bad", [dict(R=0), dict(R=-1), dict(R=float("nan"))])
def test_sphere_rejects_bad_radius(bad):
    with pytest.raises(InvalidParameter):
        sphere_config(**bad)


def test_black_hole_params():
    with pytest.raises(InvalidParameter):
        BlackHoleParams(1.0, 0.8, 0.7, 1.0)  # naked singularity
    with pytest.raises(InvalidParameter):
        BlackHoleParams(1.0, 0.0)
    p = BlackHoleParams(1.0, 0.6)
    assert p.a == 0.0 and p.r0 == 1.0


def test_rn_horizons_and_extremal():
    cfg = reissner_nordstrom_config(1.0, 0.6, 1.0)
    assert cfg.extras["r_plus"] == pytest.approx(1.8)
    assert cfg.extras["r_minus"] == pytest.approx(0.2)
    ext = reissner_nordstrom_config(1.0, 1.0, 1.0)
    res = ext.invariant()
    assert res.value == 0.0 and "zero_width_cycle" in res.flags


def test_oscillator_rejects_q0_beyond_turning_point():
    with pytest.raises(InvalidParameter):
        oscillator_config(1.0, 1.0, 0.0, 1.0, 1.5)


def test_kn_reduces_to_rn_field():
    rn = field_strength(reissner_nordstrom_config(1.0, 0.5, 1.0).gauge).forms[0]
    kn = field_strength(kerr_newman_config(1.0, 0.5, 0.0, 1.0).gauge).forms[0]
    x = np.array([[0.3, 1.5, 1.0, 2.0], [1.0, 0.9, 2.5, 0.1]])
    np.testing.assert_allclose(kn(x)[:, 0], rn(x[:, :2])[:, 0], rtol=1e-9)
    np.testing.assert_allclose(kn(x)[:, 1:], 0.0, atol=1e-12)


def test_kn_equatorial_cycle_value():
    # A_t = -e/r on the equator for every a, so the (r, t) cycle integral is
    # e (1/r- - 1/r+) / r0 with the Kerr-Newman horizons
    m, e, a, r0 = 1.0, 0.6, 0.3, 1.0
    rp, rm = m + math.sqrt(m * m - e * e - a * a), m - math.sqrt(m * m - e * e - a * a)
    val = kerr_newman_config(m, e, a, r0).invariant().value
    assert val == pytest.approx(e * (1 / rm - 1 / rp) / r0, rel=1e-9)
