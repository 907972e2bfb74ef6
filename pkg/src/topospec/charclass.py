"""Characteristic-class densities and their integrals.

Normalisations: ``e = Omega_12 / 2 pi`` (2D Euler), ``c1 = F / 2 pi``,
``p1 = -tr(Omega ^ Omega) / 8 pi^2``. With these the round sphere has
Euler number 2 and a monopole of strength g has Chern number 2g.
Integrality is never asserted here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .calculus import (Chart, IntegrationResult, PFormField, QuadratureSpec, integrate, multi_indices,
                       permutation_sign, wedge_components)
from .errors import DimensionTooLow, InvalidParameter
from .frame import Curvature, MetricSpec, curvature, coframe_from_metric, spin_connection
from .gauge import FieldStrength

TWO_PI = 2.0 * math.pi


@dataclass
class ClassDensity:
    """Top-degree (on its cycle) density of a characteristic class.

    ``forms`` holds one form per chart; single-chart densities have one.
    """

    kind: str
    forms: list
    cycle_dim: int
    charts: Optional[list] = None

    @property
    def form(self) -> PFormField:
        return self.forms[0]


@dataclass(frozen=True)
class CycleSpec:
    """Coordinate-aligned cycle inside a chart.

    ``axes`` (names or indices) are ordered: their order fixes the
    orientation. ``fixed_coords`` maps every remaining axis to a value.
    ``chart_index`` selects which chart's form to integrate.
    """

    axes: tuple
    bounds: tuple
    fixed_coords: dict = field(default_factory=dict)
    chart_index: int = 0

    def __post_init__(self):
        axes = tuple(self.axes)
        if len(set(axes)) != len(axes):
            raise InvalidParameter(f"cycle axes must be distinct, got {axes}")
        if len(self.bounds) != len(axes):
            raise InvalidParameter("one interval per cycle axis is required")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "bounds", tuple((float(a), float(b)) for a, b in self.bounds))


def euler_density_2d(m: MetricSpec) -> ClassDensity:
    """``Omega_12 / 2 pi`` as a coordinate 2-form, ``= K sqrt(det g) / 2 pi``."""
    if m.dim != 2:
        raise InvalidParameter("euler2 is defined for 2D metrics only")
    if any(s < 0 for s in m.signature):
        raise InvalidParameter("euler2 needs a Riemannian metric")
    Om = curvature(spin_connection(coframe_from_metric(m)))
    form = PFormField(2, 2, lambda p: Om.compact(p)[:, 0, :] / TWO_PI, name="euler2")
    return ClassDensity(kind="euler2", forms=[form], cycle_dim=2)


def chern1_density(F: FieldStrength) -> ClassDensity:
    """First Chern form ``F / 2 pi`` on each chart."""
    forms = [f.scaled(1.0 / TWO_PI) for f in F.forms]
    for f in forms:
        f.name = "chern1"
    return ClassDensity(kind="chern1", forms=forms, cycle_dim=2, charts=list(F.charts))


def pontrjagin1_density(Om: Curvature) -> ClassDensity:
    """``-(1/8 pi^2) sum_ab Omega^a_b ^ Omega^b_a`` as a coordinate 4-form.

    Raises
    ------
    DimensionTooLow
        On charts of dimension below 4.
    """
    n = Om.dim
    if n < 4:
        raise DimensionTooLow(f"pontrjagin1 needs a chart of dimension >= 4, got {n}")
    eta = Om.eta
    pair_signs = np.array([eta[a] * eta[b] for a, b in multi_indices(n, 2)])

    def density(p):
        C = Om.compact(p)  # (N, pairs, planes)
        # sum_{a,b} Omega^a_b ^ Omega^b_a = -2 sum_{a<b} eta_a eta_b Omega_ab ^ Omega_ab
        acc = np.zeros((len(p), math.comb(n, 4)))
        for k, s in enumerate(pair_signs):
            acc += s * wedge_components(C[:, k], 2, C[:, k], 2, n)
        return acc / (4.0 * math.pi ** 2)

    return ClassDensity(kind="pontrjagin1", forms=[PFormField(n, 4, density, name="pontrjagin1")], cycle_dim=4)


def _resolve_axis(axis, names, dim):
    if isinstance(axis, str):
        if names is None or axis not in names:
            raise InvalidParameter(f"unknown coordinate '{axis}'")
        return names.index(axis)
    axis = int(axis)
    if not 0 <= axis < dim:
        raise InvalidParameter(f"axis {axis} out of range")
    return axis


def _pullback(form: PFormField, cycle: CycleSpec, names, chart: Optional[Chart]):
    """Scalar integrand on the cycle box and the cycle chart."""
    n = form.dim
    axes = [_resolve_axis(a, names, n) for a in cycle.axes]
    if len(axes) != form.degree:
        raise InvalidParameter(f"cycle of dimension {len(axes)} cannot integrate a {form.degree}-form")
    fixed = {}
    for key, val in cycle.fixed_coords.items():
        fixed[_resolve_axis(key, names, n)] = float(val)
    missing = set(range(n)) - set(axes) - set(fixed)
    if missing:
        raise InvalidParameter(f"cycle leaves coordinates {sorted(missing)} unfixed")
    if chart is not None:
        for ax, (lo, hi) in zip(axes, cycle.bounds):
            clo, chi = chart.bounds[ax]
            if lo < clo - 1e-12 or hi > chi + 1e-12:
                raise InvalidParameter(f"cycle interval [{lo}, {hi}] leaves the chart on axis {ax}")
    key = tuple(sorted(axes))
    sign = permutation_sign(axes)
    comp = multi_indices(n, form.degree).index(key)

    def integrand(q):
        pts = np.empty((len(q), n))
        for j, ax in enumerate(axes):
            pts[:, ax] = q[:, j]
        for ax, val in fixed.items():
            pts[:, ax] = val
        return sign * form(pts)[:, comp]

    return integrand


def integrate_class(d: ClassDensity, where: Union[Chart, CycleSpec, Sequence],
                    quad: Optional[QuadratureSpec] = None) -> IntegrationResult:
    """Integrate a class density over a chart, a cycle, or a list of pieces.

    Pieces are summed; error estimates add and the result is converged
    only if every piece is.
    """
    from .calculus import integrate_function

    pieces = list(where) if isinstance(where, (list, tuple)) else [where]
    if not pieces:
        raise InvalidParameter("nothing to integrate over")
    results = []
    for piece in pieces:
        if isinstance(piece, Chart):
            form = d.forms[0]
            if piece.dim != d.cycle_dim or form.dim != piece.dim:
                raise InvalidParameter(
                    f"{d.kind} has cycle dimension {d.cycle_dim}, chart has dimension {piece.dim}")
            results.append(integrate(form, piece, quad))
        elif isinstance(piece, CycleSpec):
            if len(piece.axes) != d.cycle_dim:
                raise InvalidParameter(f"{d.kind} needs a {d.cycle_dim}-dimensional cycle")
            if not 0 <= piece.chart_index < len(d.forms):
                raise InvalidParameter(f"chart index {piece.chart_index} out of range")
            chart = d.charts[piece.chart_index] if d.charts else None
            names = chart.names if chart is not None else None
            f = _pullback(d.forms[piece.chart_index], piece, names, chart)
            results.append(integrate_function(f, Chart(piece.bounds), quad))
        else:
            raise InvalidParameter(f"cannot integrate over {type(piece).__name__}")
    if len(results) == 1:
        return results[0]
    value = math.fsum(r.value for r in results)
    err = sum(r.error for r in results)
    conv = all(r.converged for r in results)
    flags = tuple(sorted({f for r in results for f in r.flags}))
    return IntegrationResult(value=value, error=err, converged=conv,
                             levels=tuple(math.fsum(lv) for lv in zip(*(r.levels for r in results))),
                             flags=flags)
