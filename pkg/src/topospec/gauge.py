"""U(1) connections and field strengths, possibly over two charts.

Connections are real 1-forms (the ``iA`` convention is absorbed) in units
with hbar = c = 4 pi eps0 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .calculus import Chart, PFormField, as_points, d, exact_form, gradient
from .errors import InvalidParameter, MissingTransition

# dA is a single differentiation; order 4 with a 1e-4 step keeps F at ~1e-12
GAUGE_ORDER = 4
TRANSITION_TOL = 1e-8


class GaugeConnection:
    """U(1) potential given per chart.

    Parameters
    ----------
    charts : sequence of Chart
        One or two coordinate patches sharing the same coordinates.
    potentials : sequence of PFormField
        A 1-form per chart.
    overlap : Chart, optional
        Region where both charts are valid.
    transition : callable, optional
        Scalar ``lambda`` with ``A_0 - A_1 = d lambda`` on the overlap.
    """

    def __init__(self, charts: Sequence[Chart], potentials: Sequence[PFormField],
                 overlap: Optional[Chart] = None, transition: Optional[Callable] = None,
                 chart_names: Optional[Sequence[str]] = None):
        charts = list(charts)
        potentials = list(potentials)
        if not 1 <= len(charts) <= 2 or len(charts) != len(potentials):
            raise InvalidParameter("need one or two charts, each with a potential")
        for c, A in zip(charts, potentials):
            if A.degree != 1 or A.dim != c.dim:
                raise InvalidParameter("each potential must be a 1-form on its chart")
        self.charts = charts
        self.potentials = potentials
        self.overlap = overlap
        self.transition = transition
        self.chart_names = tuple(chart_names) if chart_names else tuple(f"U{i}" for i in range(len(charts)))

    @property
    def dim(self) -> int:
        return self.charts[0].dim

    def gauge_transformed(self, chi: Callable) -> "GaugeConnection":
        """``A -> A + d chi`` on every chart (transition unchanged)."""
        dchi = exact_form(chi, self.dim, order=GAUGE_ORDER)
        return GaugeConnection(self.charts, [A + dchi for A in self.potentials], self.overlap,
                               self.transition, self.chart_names)


@dataclass
class FieldStrength:
    """``F = dA`` per chart."""

    forms: list
    charts: list

    @property
    def dim(self) -> int:
        return self.charts[0].dim

    def closure_residual(self, x, chart_index: int = 0) -> np.ndarray:
        """Components of ``dF`` (should vanish); empty on 2D charts."""
        F = self.forms[chart_index]
        if F.dim < 3:
            pts, _ = as_points(x, F.dim)
            return np.zeros((len(pts), 0))
        return d(F, order=GAUGE_ORDER)(x)


def field_strength(A: GaugeConnection, order: int = GAUGE_ORDER, rel_step: Optional[float] = None) -> FieldStrength:
    """Curvature of a U(1) connection, computed chart by chart."""
    forms = [d(pot, order=order, rel_step=rel_step) for pot in A.potentials]
    return FieldStrength(forms=forms, charts=list(A.charts))


@dataclass(frozen=True)
class TransitionReport:
    max_residual: float
    passed: bool
    samples: int

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'} transition residual {self.max_residual:.3e} ({self.samples} samples)"


def verify_transition(A: GaugeConnection, samples: int = 256, seed: int = 0,
                      tol: float = TRANSITION_TOL) -> TransitionReport:
    """Check ``(A_0 - A_1) - d lambda`` on deterministic overlap samples.

    Raises
    ------
    MissingTransition
        If the connection has a single chart or no declared transition.
    """
    if len(A.charts) < 2 or A.transition is None or A.overlap is None:
        raise MissingTransition("transition check needs two charts, an overlap and a transition function")
    pts = A.overlap.sample(samples, seed=seed)
    dlam = gradient(lambda p: np.asarray(A.transition(p), dtype=np.float64).reshape(len(p)), pts,
                    order=GAUGE_ORDER)
    diff = A.potentials[0](pts) - A.potentials[1](pts)
    res = float(np.max(np.abs(diff - dlam)))
    return TransitionReport(max_residual=res, passed=res < tol, samples=len(pts))


def overlap_discrepancy(F: FieldStrength, overlap: Chart, samples: int = 256, seed: int = 0) -> float:
    """Max difference between the charts' field strengths on the overlap."""
    if len(F.forms) < 2:
        return 0.0
    pts = overlap.sample(samples, seed=seed)
    return float(np.max(np.abs(F.forms[0](pts) - F.forms[1](pts))))
