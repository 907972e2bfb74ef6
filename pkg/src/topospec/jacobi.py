"""Mechanical systems as Riemannian configurations via the Jacobi metric.

For ``L = 1/2 g_ab qdot^a qdot^b - V(q)`` at energy ``E`` the Jacobi metric
is ``h = 2 (E - V) g``. It degenerates on the turning surface ``E = V``;
evaluation is refused closer than ``epsilon * E`` to that wall.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from .calculus import Chart, as_points
from .errors import DegenerateMetric, InvalidParameter, NoTurningPoint
from .frame import MetricSpec

DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class MechanicalSystem:
    """Conservative system with constant mass matrix.

    ``potential`` is vectorised: ``q`` of shape ``(N, dof)`` to ``(N,)``.
    ``clearance(points, axis)``, when given, returns the distance along
    ``axis`` to the turning surface; it keeps finite-difference stencils
    off the wall.
    """

    mass_matrix: np.ndarray
    potential: Callable
    energy: float
    clearance: Optional[Callable] = None
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.mass_matrix, dtype=np.float64))
        if M.shape[0] != M.shape[1]:
            raise InvalidParameter("mass matrix must be square")
        if not np.allclose(M, M.T):
            raise InvalidParameter("mass matrix must be symmetric")
        for k in range(1, M.shape[0] + 1):
            if np.linalg.det(M[:k, :k]) <= 0:
                raise InvalidParameter("mass matrix must be positive definite")
        M.setflags(write=False)
        object.__setattr__(self, "mass_matrix", M)

    @property
    def dof(self) -> int:
        return self.mass_matrix.shape[0]

    def V(self, q) -> np.ndarray:
        pts, single = as_points(q, self.dof)
        v = np.asarray(self.potential(pts), dtype=np.float64).reshape(len(pts))
        return float(v[0]) if single else v

    @property
    def scalar_mass(self) -> Optional[float]:
        """``m`` when the mass matrix is ``m * identity``, else None."""
        M = self.mass_matrix
        m = M[0, 0]
        return float(m) if np.array_equal(M, m * np.eye(self.dof)) else None


class _TurningWall:
    """Adapter exposing a system's clearance function as a stencil domain."""

    def __init__(self, clearance):
        self.clearance = clearance


def jacobi_metric(sys: MechanicalSystem, epsilon: float = DEFAULT_EPSILON) -> MetricSpec:
    """Jacobi metric ``h = 2 (E - V) g``.

    Conformally flat with factor ``2 m (E - V)`` when ``g = m * identity``,
    general symmetric otherwise.

    Raises
    ------
    DegenerateMetric
        When evaluated where ``E - V < epsilon * E``.
    """
    E = float(sys.energy)
    floor = epsilon * abs(E)

    def gap(pts):
        g = E - sys.V(pts)
        if np.any(g < floor):
            raise DegenerateMetric("Jacobi metric evaluated outside the allowed region (E - V < eps*E)")
        return g

    domain = _TurningWall(sys.clearance) if sys.clearance is not None else None
    m = sys.scalar_mass
    if m is not None:
        return MetricSpec(sys.dof, "conformally-flat", lambda p: 2.0 * m * gap(p), domain=domain,
                          name=f"jacobi({sys.name})")
    M = sys.mass_matrix
    return MetricSpec(sys.dof, "general-symmetric", lambda p: 2.0 * gap(p)[:, None, None] * M[None],
                      domain=domain, name=f"jacobi({sys.name})")


def conformal_factor(sys: MechanicalSystem, q) -> np.ndarray:
    """``2 m (E - V)`` without the degeneracy check (scalar-mass systems)."""
    m = sys.scalar_mass
    if m is None:
        raise InvalidParameter("conformal factor needs a scalar mass matrix")
    return 2.0 * m * (sys.energy - sys.V(q))


def allowed_region(sys: MechanicalSystem, bounds: Sequence, epsilon: float = DEFAULT_EPSILON,
                   names=None) -> Chart:
    """Chart over ``bounds`` restricted to ``E - V >= epsilon * E``."""
    E = float(sys.energy)
    return Chart(bounds, region=lambda p: (E - sys.V(p)) >= epsilon * abs(E), names=names)


def oscillator_system(m: float, k1: float, k2: float, E: float) -> MechanicalSystem:
    """Two uncoupled oscillators of equal mass, ``V = (k1 q1^2 + k2 q2^2)/2``.

    ``k2 = 0`` is the single-oscillator limit; ``k1 = k2 = 0`` is a free
    particle.
    """
    if not m > 0:
        raise InvalidParameter(f"mass must be positive, got {m}")
    if not E > 0:
        raise InvalidParameter(f"energy must be positive, got {E}")
    if k1 < 0 or k2 < 0:
        raise InvalidParameter("spring constants must be non-negative")
    k = np.array([k1, k2], dtype=np.float64)

    def V(q):
        return 0.5 * (k[0] * q[:, 0] ** 2 + k[1] * q[:, 1] ** 2)

    def clearance(q, axis):
        if k[axis] == 0:
            return np.full(len(q), np.inf)
        other = 1 - axis
        room = np.maximum(2.0 * E - k[other] * q[:, other] ** 2, 0.0) / k[axis]
        return np.sqrt(room) - np.abs(q[:, axis])

    return MechanicalSystem(mass_matrix=m * np.eye(2), potential=V, energy=float(E), clearance=clearance,
                            name="oscillator", params={"m": m, "k1": k1, "k2": k2, "E": E})


def turning_value(sys: MechanicalSystem, axis_ray, extent: float = 1e6, xtol: float = 1e-12) -> float:
    """Distance along a ray from the origin where ``V`` first reaches ``E``.

    ``axis_ray`` is an axis index or a direction vector. The ray is
    bracketed by doubling from a unit step and refined by bisection.

    Raises
    ------
    NoTurningPoint
        If ``V < E`` all the way out to ``extent``.
    """
    if np.isscalar(axis_ray):
        direction = np.zeros(sys.dof)
        direction[int(axis_ray)] = 1.0
    else:
        direction = np.asarray(axis_ray, dtype=np.float64)
        direction = direction / np.linalg.norm(direction)
    E = sys.energy

    def excess(s):
        return sys.V(s * direction) - E

    if excess(0.0) >= 0:
        raise NoTurningPoint("origin is not inside the allowed region")
    lo, hi = 0.0, 1.0
    while excess(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > extent:
            if excess(extent) < 0:
                raise NoTurningPoint(f"V < E along the whole ray up to {extent}")
            hi = extent
            break
    return float(bisect(excess, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))
