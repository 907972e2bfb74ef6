"""Orthonormal coframes, spin connections and curvature 2-forms.

Index conventions
-----------------
* ``e[a, mu]`` is the coframe: ``theta^a = e^a_mu dx^mu`` and
  ``g_{mu nu} = eta_ab e^a_mu e^b_nu``.
* Connection and curvature carry both frame indices lowered with eta:
  ``omega_{ab,mu}`` and ``Omega_{ab,mu nu}``; only ``a < b`` is stored.
* Torsion-free condition: ``d theta^a = -omega^a_b ^ theta^b``.
* Curvature: ``Omega_ab = d omega_ab + eta^{cc} omega_ac ^ omega_cb``.

With these conventions the unit sphere in the frame ``(d theta, sin theta
d phi)`` has ``omega_12 = -cos theta d phi`` and ``Omega_12 = sin theta
d theta ^ d phi``, i.e. a positive Euler integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .calculus import as_points, gradient, multi_indices
from .errors import DegenerateMetric, InvalidParameter

# nested differentiation (metric -> omega -> Omega) amplifies roundoff by 1/h^2
FRAME_ORDER = 4
FRAME_REL_STEP = 1e-3
# near a singular wall the length scale is the distance to it
FRAME_CLEARANCE_FRACTION = 1e-3
DEGENERACY_TOL = 1e-12

KINDS = ("diagonal", "conformally-flat", "general-symmetric")


@lru_cache(maxsize=None)
def _pairs(n: int):
    return multi_indices(n, 2)


def expand_pairs(compact: np.ndarray, n: int, axis: int = 1) -> np.ndarray:
    """Expand ``a<b`` storage along ``axis`` into a full antisymmetric (a, b) pair of axes."""
    compact = np.moveaxis(compact, axis, -1)
    full = np.zeros(compact.shape[:-1] + (n, n))
    for k, (a, b) in enumerate(_pairs(n)):
        full[..., a, b] = compact[..., k]
        full[..., b, a] = -compact[..., k]
    return np.moveaxis(np.moveaxis(full, -2, axis), -1, axis + 1)


@dataclass(frozen=True)
class MetricSpec:
    """A metric given pointwise.

    ``components`` returns, for points ``(N, dim)``:

    * ``diagonal``: the diagonal entries ``(N, dim)``;
    * ``conformally-flat``: the conformal factor ``phi`` with
      ``g = phi * diag(signature)``, shape ``(N,)``;
    * ``general-symmetric``: full matrices ``(N, dim, dim)``.

    ``domain`` (anything with a ``clearance(points, axis)`` method, usually a
    :class:`~topospec.calculus.Chart`) marks where the metric is smooth and
    nondegenerate; derivative stencils are kept inside it.
    """

    dim: int
    kind: str
    components: Callable
    signature: Optional[tuple] = None
    domain: Optional[object] = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"metric kind must be one of {KINDS}, got '{self.kind}'")
        sig = (1.0,) * self.dim if self.signature is None else tuple(float(s) for s in self.signature)
        if len(sig) != self.dim or any(s not in (1.0, -1.0) for s in sig):
            raise InvalidParameter(f"signature must be {self.dim} entries of +-1")
        object.__setattr__(self, "signature", sig)

    @property
    def eta(self) -> np.ndarray:
        return np.array(self.signature)

    def matrix(self, x) -> np.ndarray:
        """Full metric matrices; raises DegenerateMetric where singular."""
        pts, single = as_points(x, self.dim)
        raw = np.asarray(self.components(pts), dtype=np.float64)
        if self.kind == "diagonal":
            raw = raw.reshape(len(pts), self.dim)
            g = np.zeros((len(pts), self.dim, self.dim))
            idx = np.arange(self.dim)
            g[:, idx, idx] = raw
        elif self.kind == "conformally-flat":
            g = raw.reshape(len(pts), 1, 1) * np.diag(self.signature)[None]
        else:
            g = raw.reshape(len(pts), self.dim, self.dim)
        if not np.all(np.isfinite(g)):
            raise DegenerateMetric(f"metric {self.name} is non-finite at an evaluation point")
        return g[0] if single else g


class CoFrame:
    """Orthonormal coframe ``theta^a = e^a_mu dx^mu`` as a pointwise field."""

    def __init__(self, e: Callable, dim: int, signature: Sequence[float], domain=None, name: str = ""):
        self._e = e
        self.dim = dim
        self.signature = tuple(float(s) for s in signature)
        self.domain = domain
        self.name = name

    @property
    def eta(self) -> np.ndarray:
        return np.array(self.signature)

    def __call__(self, x) -> np.ndarray:
        pts, single = as_points(x, self.dim)
        e = np.asarray(self._e(pts), dtype=np.float64).reshape(len(pts), self.dim, self.dim)
        return e[0] if single else e

    def metric(self, x) -> np.ndarray:
        """Reconstructed ``eta_ab e^a_mu e^b_nu``."""
        e = self(x)
        return np.einsum("...am,a,...an->...mn", e, self.eta, e)

    def rotated(self, R: np.ndarray) -> "CoFrame":
        """Apply a constant frame rotation ``theta'^a = R^a_b theta^b``."""
        R = np.asarray(R, dtype=np.float64)
        return CoFrame(lambda p: np.einsum("ab,nbm->nam", R, self(p)), self.dim, self.signature,
                       domain=self.domain, name=f"R*{self.name}")


def coframe_from_metric(m: MetricSpec) -> CoFrame:
    """Orthonormal coframe of a metric.

    Diagonal and conformal kinds use closed-form positive square roots;
    general symmetric metrics use a pointwise signed LDL^T decomposition in
    the declared axis order (``e = sqrt|D| L^T``).

    Raises
    ------
    DegenerateMetric
        At points where a pivot or diagonal entry has magnitude below 1e-12
        or its sign disagrees with the declared signature.
    """
    sig = np.array(m.signature)

    if m.kind == "diagonal":
        def e(pts):
            diag = np.asarray(m.components(pts), dtype=np.float64).reshape(len(pts), m.dim)
            if not np.all(np.isfinite(diag)):
                raise DegenerateMetric(f"metric {m.name} is non-finite")
            if np.any(np.abs(diag) < DEGENERACY_TOL):
                raise DegenerateMetric(f"metric {m.name} has a vanishing diagonal entry")
            if np.any(np.sign(diag) != sig):
                raise DegenerateMetric(f"metric {m.name} violates the declared signature")
            out = np.zeros((len(pts), m.dim, m.dim))
            idx = np.arange(m.dim)
            out[:, idx, idx] = np.sqrt(np.abs(diag))
            return out
    elif m.kind == "conformally-flat":
        def e(pts):
            phi = np.asarray(m.components(pts), dtype=np.float64).reshape(len(pts))
            if not np.all(np.isfinite(phi)):
                raise DegenerateMetric(f"metric {m.name} is non-finite")
            if np.any(phi < DEGENERACY_TOL):
                raise DegenerateMetric(f"conformal factor of {m.name} is not positive")
            return np.sqrt(phi)[:, None, None] * np.eye(m.dim)[None]
    else:
        def e(pts):
            g = m.matrix(pts)
            scale = np.max(np.abs(g), axis=(1, 2), keepdims=True)
            if np.any(np.abs(g - np.swapaxes(g, 1, 2)) > 1e-12 * np.maximum(scale, 1.0)):
                raise DegenerateMetric(f"metric {m.name} is not symmetric")
            frame, status = kernels.ldl_coframe(np.ascontiguousarray(g), sig, DEGENERACY_TOL)
            if np.any(status == 1):
                raise DegenerateMetric(f"metric {m.name} is singular at an evaluation point")
            if np.any(status == 2):
                raise DegenerateMetric(f"metric {m.name} violates the declared signature")
            return frame

    return CoFrame(e, m.dim, m.signature, domain=m.domain, name=m.name)


class SpinConnection:
    """Torsion-free metric-compatible connection ``omega_{ab,mu}`` (a<b stored)."""

    def __init__(self, coframe: CoFrame, order: int = FRAME_ORDER, rel_step: float = FRAME_REL_STEP):
        self.coframe = coframe
        self.dim = coframe.dim
        self.order = order
        self.rel_step = rel_step

    @property
    def eta(self):
        return self.coframe.eta

    def compact(self, x) -> np.ndarray:
        """Array ``(N, n_pairs, dim)`` of ``omega_{ab,mu}`` for ``a<b``."""
        pts, single = as_points(x, self.dim)
        out = self._compute(pts)[0]
        return out[0] if single else out

    def __call__(self, x) -> np.ndarray:
        """Full antisymmetric array ``(N, dim, dim, dim)`` indexed ``[a, b, mu]``."""
        pts, single = as_points(x, self.dim)
        full = expand_pairs(self._compute(pts)[0], self.dim, axis=1)
        return full[0] if single else full

    def _gradient(self, pts):
        n = self.dim
        cf = self.coframe
        de = gradient(lambda p: cf(p).reshape(len(p), n * n), pts, order=self.order,
                      rel_step=self.rel_step, domain=cf.domain, clearance_fraction=FRAME_CLEARANCE_FRACTION)
        return np.ascontiguousarray(de.reshape(len(pts), n, n, n))  # [p, mu, a, nu] = d_mu e^a_nu

    def _compute(self, pts):
        e = np.ascontiguousarray(self.coframe(pts))
        de = self._gradient(pts)
        compact = kernels.spin_connection(e, de, np.ascontiguousarray(self.eta))
        return compact, e, de

    def torsion_residual(self, x) -> np.ndarray:
        """``d theta^a + omega^a_b ^ theta^b`` components ``(N, a, mu, nu)``."""
        pts, _ = as_points(x, self.dim)
        compact, e, de = self._compute(pts)
        curl = np.transpose(de, (0, 2, 1, 3)) - np.transpose(de, (0, 2, 3, 1))  # [p, a, mu, nu]
        w = expand_pairs(compact, self.dim, axis=1)  # [p, a, b, mu]
        w_up = w * self.eta[None, :, None, None]
        wedge = np.swapaxes(w_up, 2, 3) @ e[:, None]  # [p, a, mu, nu]
        return curl + wedge - np.swapaxes(wedge, 2, 3)


class Curvature:
    """Curvature 2-form ``Omega_{ab,mu nu}``; (a<b, mu<nu) stored."""

    def __init__(self, omega: Optional[Callable] = None, dim: Optional[int] = None, signature=None,
                 connection: Optional[SpinConnection] = None, order: int = FRAME_ORDER,
                 rel_step: float = FRAME_REL_STEP):
        if connection is None and (omega is None or dim is None):
            raise InvalidParameter("Curvature needs a connection or an explicit Omega field")
        self.connection = connection
        self.dim = connection.dim if connection is not None else dim
        if signature is None:
            signature = connection.coframe.signature if connection is not None else (1.0,) * self.dim
        self.signature = tuple(float(s) for s in signature)
        self._omega = omega
        self.order = order
        self.rel_step = rel_step

    @property
    def eta(self):
        return np.array(self.signature)

    def compact(self, x) -> np.ndarray:
        pts, single = as_points(x, self.dim)
        out = self._omega(pts) if self._omega is not None else self._compute(pts)
        out = np.asarray(out, dtype=np.float64).reshape(len(pts), len(_pairs(self.dim)), len(_pairs(self.dim)))
        return out[0] if single else out

    def __call__(self, x) -> np.ndarray:
        """Full array ``(N, dim, dim, dim, dim)`` indexed ``[a, b, mu, nu]``."""
        pts, single = as_points(x, self.dim)
        c = self.compact(pts)
        full = expand_pairs(expand_pairs(c, self.dim, axis=2), self.dim, axis=1)
        return full[0] if single else full

    def _compute(self, pts):
        n = self.dim
        sc = self.connection
        domain = sc.coframe.domain
        dw = gradient(lambda p: sc.compact(p), pts, order=self.order, rel_step=self.rel_step,
                      domain=domain, clearance_fraction=FRAME_CLEARANCE_FRACTION)  # [p, mu, pair, nu]
        w = sc(pts)  # [p, a, b, mu]
        # quad[p,a,b,m,n] = sum_c w[p,a,c,m] eta_c w[p,c,b,n]
        N = len(pts)
        wa = np.transpose(w * sc.eta[None, None, :, None], (0, 1, 3, 2)).reshape(N, n * n, n)  # [p, am, c]
        quad = (wa @ w.reshape(N, n, n * n)).reshape(N, n, n, n, n)  # [p, a, m, b, n]
        quad = np.transpose(quad, (0, 1, 3, 2, 4))
        out = np.empty((len(pts), len(_pairs(n)), len(_pairs(n))))
        for k, (a, b) in enumerate(_pairs(n)):
            for j, (mu, nu) in enumerate(_pairs(n)):
                out[:, k, j] = (dw[:, mu, k, nu] - dw[:, nu, k, mu]
                                + quad[:, a, b, mu, nu] - quad[:, a, b, nu, mu])
        return out


def spin_connection(cf: CoFrame, order: int = FRAME_ORDER, rel_step: float = FRAME_REL_STEP) -> SpinConnection:
    """Solve ``d theta^a = -omega^a_b ^ theta^b`` pointwise from frame commutators."""
    return SpinConnection(cf, order=order, rel_step=rel_step)


def curvature(sc: SpinConnection) -> Curvature:
    """``Omega = d omega + omega ^ omega`` by differentiating the connection."""
    return Curvature(connection=sc, order=sc.order, rel_step=sc.rel_step)


def curvature_of(m) -> Curvature:
    """Shortcut: metric (or coframe) straight to its curvature."""
    cf = m if isinstance(m, CoFrame) else coframe_from_metric(m)
    return curvature(spin_connection(cf))


def gaussian_curvature_2d(m, x):
    """Gaussian curvature of a 2D Riemannian metric (or coframe).

    ``Omega_12 = K theta^1 ^ theta^2``, so ``K = Omega_{12,01} / det e``.
    """
    cf = m if isinstance(m, CoFrame) else coframe_from_metric(m)
    if cf.dim != 2:
        raise InvalidParameter("gaussian_curvature_2d needs a 2D metric")
    if any(s < 0 for s in cf.signature):
        raise InvalidParameter("gaussian_curvature_2d needs a Riemannian metric")
    pts, single = as_points(x, 2)
    Om = curvature(spin_connection(cf)).compact(pts)[:, 0, 0]
    K = Om / np.linalg.det(cf(pts))
    return float(K[0]) if single else K
