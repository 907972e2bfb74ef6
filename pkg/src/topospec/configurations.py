"""Catalog of classical configurations ready for integration.

Each factory validates its parameters and returns an immutable
:class:`ConfigurationDescriptor` bundling the chart, the metric and/or
U(1) connection, the default integration cycle and the structure group.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .calculus import Chart, IntegrationResult, PFormField, QuadratureSpec
from .charclass import CycleSpec, chern1_density, euler_density_2d, integrate_class, pontrjagin1_density
from .errors import InvalidParameter, NoTurningPoint, UnknownGroup
from .frame import MetricSpec, curvature, coframe_from_metric, spin_connection
from .gauge import GaugeConnection, field_strength
from .jacobi import allowed_region, jacobi_metric, oscillator_system, turning_value

SPHERE_POLE_MARGIN = 1e-4
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ParamSpec:
    name: str
    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = True
    default: Optional[float] = None
    doc: str = ""
    nonzero: bool = False

    def check(self, value: float) -> float:
        v = float(value)
        if not math.isfinite(v):
            raise InvalidParameter(f"{self.name} must be finite, got {value}")
        if v < self.lo or (self.lo_open and v == self.lo) or v > self.hi or (self.hi_open and v == self.hi):
            lb = "(" if self.lo_open else "["
            rb = ")" if self.hi_open else "]"
            raise InvalidParameter(f"{self.name}={v} outside {lb}{self.lo}, {self.hi}{rb}")
        if self.nonzero and v == 0:
            raise InvalidParameter(f"{self.name} must be nonzero")
        return v

    def describe(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_open": self.lo_open, "hi_open": self.hi_open,
                "default": self.default, "doc": self.doc}


@dataclass(frozen=True)
class ConfigurationDescriptor:
    """A classical configuration: base chart, connection data and group."""

    name: str
    base_dim: int
    group: str
    params: dict
    chart: Optional[Chart] = None
    metric: Optional[MetricSpec] = None
    gauge: Optional[GaugeConnection] = None
    default_class: Optional[str] = None
    default_cycle: object = None
    # analytic contribution added to default-cycle integrals (sphere pole caps)
    cap_correction: float = 0.0
    # canonical invariant = normalization * (integral + cap_correction)
    normalization: float = 1.0
    extras: dict = field(default_factory=dict)

    @property
    def coordinates(self):
        return self.chart.names if self.chart is not None else ()

    def density(self, kind: str):
        if kind == "euler2":
            if self.metric is None:
                raise InvalidParameter(f"{self.name} has no metric for euler2")
            return euler_density_2d(self.metric)
        if kind == "chern1":
            if self.gauge is None:
                raise InvalidParameter(f"{self.name} has no U(1) connection for chern1")
            return chern1_density(field_strength(self.gauge))
        if kind == "pontrjagin1":
            if self.metric is None:
                raise InvalidParameter(f"{self.name} has no metric for pontrjagin1")
            return pontrjagin1_density(curvature(spin_connection(coframe_from_metric(self.metric))))
        raise InvalidParameter(f"unknown characteristic class '{kind}'")

    def integrate(self, kind: Optional[str] = None, where=None,
                  quad: Optional[QuadratureSpec] = None) -> IntegrationResult:
        """Raw integral of a class density (default class and cycle when omitted)."""
        kind = kind or self.default_class
        if kind is None:
            raise InvalidParameter(f"{self.name} has no default characteristic class")
        use_default = where is None
        if self.extras.get("zero_width_cycle") and use_default:
            return IntegrationResult(0.0, 0.0, True, (0.0,), ("zero_width_cycle",))
        where = self.default_cycle if use_default else where
        if where is None:
            raise InvalidParameter(f"{self.name} has no default cycle")
        res = integrate_class(self.density(kind), where, quad)
        if use_default and self.cap_correction:
            res = IntegrationResult(res.value + self.cap_correction, res.error, res.converged,
                                    tuple(v + self.cap_correction for v in res.levels), res.flags)
        return res

    def invariant(self, quad: Optional[QuadratureSpec] = None) -> IntegrationResult:
        """Canonical normalised invariant over the default cycle."""
        res = self.integrate(quad=quad)
        c = self.normalization
        if c == 1.0:
            return res
        return IntegrationResult(c * res.value, abs(c) * res.error, res.converged,
                                 tuple(c * v for v in res.levels), res.flags)


# ---------------------------------------------------------------------------
# groups and bundle dimension

_GROUP_RE = re.compile(r"^(SO|SU|U|O)\((\d+)(?:,(\d+))?\)$")


def group_dimension(group: str) -> int:
    """Dimension of a structure group; products written ``U(1)xSU(2)xSU(3)``.

    Raises
    ------
    UnknownGroup
        For anything outside SO(k), O(k), SO(p,q), U(k), SU(k) and products.
    """
    total = 0
    for part in re.split(r"\s*[x×*]\s*", group.replace(" ", "")):
        m = _GROUP_RE.match(part)
        if not m:
            raise UnknownGroup(f"unknown structure group '{part}'")
        fam, a, b = m.group(1), int(m.group(2)), m.group(3)
        if b is not None:
            if fam != "SO":
                raise UnknownGroup(f"unknown structure group '{part}'")
            k = a + int(b)
            total += k * (k - 1) // 2
        elif fam in ("SO", "O"):
            total += a * (a - 1) // 2
        elif fam == "U":
            total += a * a
        else:
            if a < 2:
                raise UnknownGroup(f"SU({a}) is trivial")
            total += a * a - 1
    return total


def bundle_dimension(cfg: ConfigurationDescriptor) -> int:
    """``dim P = dim(base) + dim(group)``."""
    if not cfg.group:
        raise UnknownGroup("configuration declares no structure group")
    return cfg.base_dim + group_dimension(cfg.group)


# ---------------------------------------------------------------------------
# catalog entries


def sphere_config(R: float) -> ConfigurationDescriptor:
    """Round sphere of radius ``R`` with a pole margin and analytic cap correction."""
    R = ParamSpec("R", lo=0.0).check(R)
    delta = SPHERE_POLE_MARGIN
    names = ("theta", "phi")
    smooth = Chart([(0.0, math.pi), (-math.inf, math.inf)], names=names)
    metric = MetricSpec(2, "diagonal",
                        lambda p: np.stack([np.full(len(p), R * R), (R * np.sin(p[:, 0])) ** 2], axis=1),
                        domain=smooth, name=f"sphere(R={R})")
    chart = Chart([(delta, math.pi - delta), (0.0, TWO_PI)], names=names)
    # each cap of angular radius delta carries (1 - cos delta) of the Euler number
    caps = 2.0 * (1.0 - math.cos(delta))
    return ConfigurationDescriptor(name="sphere", base_dim=2, group="SO(2)", params={"R": R}, chart=chart,
                                   metric=metric, default_class="euler2", default_cycle=chart,
                                   cap_correction=caps)


def monopole_config(g: float) -> ConfigurationDescriptor:
    """Dirac monopole of strength ``g`` on S^2 covered by two charts.

    ``A_N = g (1 - cos theta) d phi``, ``A_S = -g (1 + cos theta) d phi`` and
    ``A_N - A_S = d(2 g phi)``.
    """
    g = ParamSpec("g", nonzero=True).check(g)
    names = ("theta", "phi")
    north = Chart([(0.0, 2 * math.pi / 3), (0.0, TWO_PI)], names=names)
    south = Chart([(math.pi / 3, math.pi), (0.0, TWO_PI)], names=names)
    overlap = Chart([(math.pi / 3, 2 * math.pi / 3), (0.0, TWO_PI)], names=names)
    A_N = PFormField(2, 1, lambda p: np.stack([np.zeros(len(p)), g * (1 - np.cos(p[:, 0]))], axis=1), "A_N")
    A_S = PFormField(2, 1, lambda p: np.stack([np.zeros(len(p)), -g * (1 + np.cos(p[:, 0]))], axis=1), "A_S")
    conn = GaugeConnection([north, south], [A_N, A_S], overlap=overlap,
                           transition=lambda p: 2 * g * p[:, 1], chart_names=("north", "south"))
    cycle = [
        CycleSpec(axes=("theta", "phi"), bounds=((0.0, math.pi / 2), (0.0, TWO_PI)), chart_index=0),
        CycleSpec(axes=("theta", "phi"), bounds=((math.pi / 2, math.pi), (0.0, TWO_PI)), chart_index=1),
    ]
    return ConfigurationDescriptor(name="monopole", base_dim=2, group="U(1)", params={"g": g},
                                   chart=Chart([(0.0, math.pi), (0.0, TWO_PI)], names=names),
                                   gauge=conn, default_class="chern1", default_cycle=cycle)


def oscillator_config(m: float, k1: float, k2: float, E: float, q0: float, L: float = 1.0) -> ConfigurationDescriptor:
    """Jacobi-metric configuration of two oscillators, integrated over ``[0,q0] x [0,L]``.

    The canonical invariant is ``(2 pi / L) * integral of euler2``.
    """
    sys = oscillator_system(m, k1, k2, E)
    L = ParamSpec("L", lo=0.0).check(L)
    q0 = ParamSpec("q0", lo=0.0).check(q0)
    try:
        tv = turning_value(sys, 0)
    except NoTurningPoint:
        tv = math.inf
    if not q0 < tv:
        raise InvalidParameter(f"q0={q0} must lie inside the turning point {tv}")
    names = ("q1", "q2")
    metric = jacobi_metric(sys)
    region = allowed_region(sys, [(0.0, q0), (0.0, L)], names=names)
    return ConfigurationDescriptor(name="oscillator", base_dim=2, group="SO(2)",
                                   params={"m": m, "k1": k1, "k2": k2, "E": E, "q0": q0, "L": L},
                                   chart=region, metric=metric, default_class="euler2", default_cycle=region,
                                   normalization=TWO_PI / L, extras={"turning_value": tv, "system": sys})


def _horizons(m, e, a=0.0):
    disc = m * m - e * e - a * a
    root = math.sqrt(max(disc, 0.0))
    return m + root, m - root


@dataclass(frozen=True)
class BlackHoleParams:
    """Mass, charge, specific angular momentum and integration constant r0."""

    m: float
    e: float
    a: float = 0.0
    r0: float = 1.0

    def __post_init__(self):
        m = ParamSpec("m", lo=0.0).check(self.m)
        e = ParamSpec("e", nonzero=True).check(self.e)
        a = ParamSpec("a").check(self.a)
        r0 = ParamSpec("r0", lo=0.0).check(self.r0)
        if m * m < e * e + a * a:
            raise InvalidParameter(f"naked singularity: m^2={m * m} < e^2 + a^2={e * e + a * a}")
        for k, v in (("m", m), ("e", e), ("a", a), ("r0", r0)):
            object.__setattr__(self, k, v)


def _check_black_hole(m, e, a, r0):
    p = BlackHoleParams(m, e, a, r0)
    return p.m, p.e, p.a, p.r0


def reissner_nordstrom_config(m: float, e: float, r0: float) -> ConfigurationDescriptor:
    """Reissner-Nordstrom U(1) connection ``A = -(e/r) dt`` on the (t, r) chart.

    Default cycle: ``r in [r-, r+]`` (oriented dr ^ dt), ``t in [0, 2 pi / r0]``.
    """
    m, e, _, r0 = _check_black_hole(m, e, 0.0, r0)
    rp, rm = _horizons(m, e)
    T = TWO_PI / r0
    names = ("t", "r")
    chart = Chart([(0.0, T), (0.5 * rm, 2.0 * rp)], names=names)
    A = PFormField(2, 1, lambda p: np.stack([-e / p[:, 1], np.zeros(len(p))], axis=1), "A_RN")
    conn = GaugeConnection([chart], [A])
    zero = rp == rm
    cycle = CycleSpec(axes=("r", "t"), bounds=((rm, rp), (0.0, T))) if not zero else None
    return ConfigurationDescriptor(name="reissner_nordstrom", base_dim=4, group="U(1)",
                                   params={"m": m, "e": e, "r0": r0}, chart=chart, gauge=conn,
                                   default_class="chern1", default_cycle=cycle,
                                   extras={"r_plus": rp, "r_minus": rm, "period": T, "zero_width_cycle": zero})


def kerr_newman_config(m: float, e: float, a: float, r0: float) -> ConfigurationDescriptor:
    """Kerr-Newman U(1) connection on (t, r, theta, phi).

    ``A = -(e r / Sigma)(dt - a sin^2 theta d phi)`` with
    ``Sigma = r^2 + a^2 cos^2 theta``. Default cycle: (r, t) at theta = pi/2.
    """
    m, e, a, r0 = _check_black_hole(m, e, a, r0)
    rp, rm = _horizons(m, e, a)
    T = TWO_PI / r0
    names = ("t", "r", "theta", "phi")
    r_lo = 0.5 * rm if rm > 0 else 0.5 * rp
    chart = Chart([(0.0, T), (r_lo, 2.0 * rp), (0.0, math.pi), (0.0, TWO_PI)], names=names)

    def A(p):
        r, th = p[:, 1], p[:, 2]
        sigma = r * r + (a * np.cos(th)) ** 2
        coef = e * r / sigma
        z = np.zeros(len(p))
        return np.stack([-coef, z, z, coef * a * np.sin(th) ** 2], axis=1)

    conn = GaugeConnection([chart], [PFormField(4, 1, A, "A_KN")])
    zero = rp == rm
    cycle = None if zero else CycleSpec(axes=("r", "t"), bounds=((rm, rp), (0.0, T)),
                                        fixed_coords={"theta": math.pi / 2, "phi": 0.0})
    return ConfigurationDescriptor(name="kerr_newman", base_dim=4, group="U(1)",
                                   params={"m": m, "e": e, "a": a, "r0": r0}, chart=chart, gauge=conn,
                                   default_class="chern1", default_cycle=cycle,
                                   extras={"r_plus": rp, "r_minus": rm, "period": T, "zero_width_cycle": zero})


def minkowski_config() -> ConfigurationDescriptor:
    """Flat spacetime with its Lorentz frame bundle (vanishing invariants)."""
    names = ("t", "x", "y", "z")
    chart = Chart([(-1.0, 1.0)] * 4, names=names)
    metric = MetricSpec(4, "diagonal", lambda p: np.tile([-1.0, 1.0, 1.0, 1.0], (len(p), 1)),
                        signature=(-1, 1, 1, 1), name="minkowski")
    return ConfigurationDescriptor(name="minkowski", base_dim=4, group="SO(1,3)", params={}, chart=chart,
                                   metric=metric, default_class="pontrjagin1", default_cycle=chart)


def yang_mills_config(k: float) -> ConfigurationDescriptor:
    """SU(k) gauge theory on Minkowski space (bundle bookkeeping only)."""
    k = ParamSpec("k", lo=2.0, lo_open=False).check(k)
    if k != int(k):
        raise InvalidParameter("k must be an integer")
    return ConfigurationDescriptor(name="yang_mills", base_dim=4, group=f"SU({int(k)})", params={"k": k})


def standard_model_config() -> ConfigurationDescriptor:
    """U(1) x SU(2) x SU(3) on Minkowski space (bundle bookkeeping only)."""
    return ConfigurationDescriptor(name="standard_model", base_dim=4, group="U(1)xSU(2)xSU(3)", params={})


@dataclass(frozen=True)
class CatalogEntry:
    factory: Callable
    params: tuple
    description: str


CATALOG = {
    "sphere": CatalogEntry(sphere_config, (ParamSpec("R", lo=0.0, doc="radius"),),
                           "round 2-sphere, Euler class (Gauss-Bonnet oracle)"),
    "monopole": CatalogEntry(monopole_config, (ParamSpec("g", nonzero=True, doc="monopole strength"),),
                             "Dirac monopole, two-chart U(1) bundle over S^2, first Chern class"),
    "oscillator": CatalogEntry(
        oscillator_config,
        (ParamSpec("m", lo=0.0, doc="mass"),
         ParamSpec("k1", lo=0.0, lo_open=False, doc="spring constant, axis 1"),
         ParamSpec("k2", lo=0.0, lo_open=False, default=0.0, doc="spring constant, axis 2"),
         ParamSpec("E", lo=0.0, doc="energy"),
         ParamSpec("q0", lo=0.0, doc="integration boundary, inside the turning point"),
         ParamSpec("L", lo=0.0, default=1.0, doc="extent of the second coordinate")),
        "two harmonic oscillators via the Jacobi metric, normalised Euler invariant"),
    "reissner_nordstrom": CatalogEntry(
        reissner_nordstrom_config,
        (ParamSpec("m", lo=0.0, doc="mass"), ParamSpec("e", nonzero=True, doc="charge"),
         ParamSpec("r0", lo=0.0, doc="integration constant; time period is 2 pi / r0")),
        "Reissner-Nordstrom U(1) field, Chern invariant between the horizons"),
    "kerr_newman": CatalogEntry(
        kerr_newman_config,
        (ParamSpec("m", lo=0.0, doc="mass"), ParamSpec("e", nonzero=True, doc="charge"),
         ParamSpec("a", doc="specific angular momentum"),
         ParamSpec("r0", lo=0.0, doc="integration constant; time period is 2 pi / r0")),
        "Kerr-Newman U(1) field, Chern invariant on the equatorial (r, t) cycle"),
    "minkowski": CatalogEntry(minkowski_config, (), "flat spacetime, Lorentz frame bundle"),
    "yang_mills": CatalogEntry(yang_mills_config, (ParamSpec("k", lo=2.0, lo_open=False, doc="SU(k)"),),
                               "SU(k) gauge theory on Minkowski space (dimension counting)"),
    "standard_model": CatalogEntry(standard_model_config, (),
                                   "U(1) x SU(2) x SU(3) on Minkowski space (dimension counting)"),
}


def build_configuration(name: str, params: dict) -> ConfigurationDescriptor:
    """Build a catalog configuration from a name and a parameter map.

    Unknown names or parameters raise InvalidParameter; parameters with a
    documented default may be omitted.
    """
    if name not in CATALOG:
        raise InvalidParameter(f"unknown configuration '{name}'; known: {sorted(CATALOG)}")
    entry = CATALOG[name]
    known = {p.name: p for p in entry.params}
    unknown = set(params) - set(known)
    if unknown:
        raise InvalidParameter(f"unknown parameter(s) {sorted(unknown)} for '{name}'")
    kwargs = {}
    for p in entry.params:
        if p.name in params:
            kwargs[p.name] = float(params[p.name])
        elif p.default is not None:
            kwargs[p.name] = p.default
        else:
            raise InvalidParameter(f"missing parameter '{p.name}' for '{name}'")
    return entry.factory(**kwargs)


def catalog_listing() -> dict:
    return {name: {"description": e.description, "params": {p.name: p.describe() for p in e.params}}
            for name, e in CATALOG.items()}
