"""Charts, differential forms as evaluable fields, and deterministic quadrature.

Every field in topospec is a *vectorised* callable: it takes an array of
points with shape ``(N, dim)`` and returns an array whose leading axis is
``N``. Components of a p-form are stored against strictly increasing
coordinate multi-indices in lexicographic order (``itertools.combinations``
order), so a p-form on a ``dim``-chart has ``binomial(dim, p)`` components.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import DegreeOverflow, EmptyDomain, InvalidParameter, NoConvergence, NonFiniteEvaluation

# relative finite-difference steps, h = REL * max(1, |x|)
DEFAULT_REL_STEP = {2: 1e-5, 4: 1e-4}

_STENCILS = {
    2: ((1.0, -1.0), (0.5, -0.5)),
    4: ((2.0, 1.0, -1.0, -2.0), (-1.0 / 12.0, 8.0 / 12.0, -8.0 / 12.0, 1.0 / 12.0)),
}

# max nodes evaluated per quadrature chunk
CHUNK_NODES = 1 << 11


@lru_cache(maxsize=None)
def multi_indices(dim: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Strictly increasing index tuples labelling p-form components."""
    return tuple(itertools.combinations(range(dim), degree))


@lru_cache(maxsize=None)
def _index_lookup(dim: int, degree: int) -> dict:
    return {I: k for k, I in enumerate(multi_indices(dim, degree))}


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def as_points(x, dim: Optional[int] = None) -> tuple[np.ndarray, bool]:
    """Return ``(points, was_single)`` with points shaped ``(N, dim)``."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InvalidParameter(f"points must have shape (dim,) or (N, dim), got {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise InvalidParameter(f"expected points of dimension {dim}, got {arr.shape[1]}")
    return arr, single


@dataclass(frozen=True)
class Chart:
    """Coordinate box with an optional region predicate.

    Parameters
    ----------
    bounds : sequence of (lo, hi)
        Closed interval per axis; ``lo < hi`` is enforced.
    region : callable, optional
        Vectorised predicate ``points -> bool array`` restricting the box.
    orientation : sequence of int, optional
        Axis ordering defining the positive volume element. Defaults to
        the identity ordering.
    names : sequence of str, optional
        Coordinate names, used by the CLI and cycle specifications.
    """

    bounds: tuple
    region: Optional[Callable] = None
    orientation: Optional[tuple] = None
    names: Optional[tuple] = None

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise InvalidParameter("chart needs at least one axis")
        for lo, hi in bounds:
            if not lo < hi:
                raise InvalidParameter(f"chart interval [{lo}, {hi}] must have lower < upper")
        object.__setattr__(self, "bounds", bounds)
        dim = len(bounds)
        if self.orientation is None:
            object.__setattr__(self, "orientation", tuple(range(dim)))
        elif sorted(self.orientation) != list(range(dim)):
            raise InvalidParameter(f"orientation {self.orientation} is not a permutation of the axes")
        else:
            object.__setattr__(self, "orientation", tuple(int(a) for a in self.orientation))
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(dim)))
        elif len(self.names) != dim:
            raise InvalidParameter("one coordinate name per axis is required")
        else:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def orientation_sign(self) -> int:
        return permutation_sign(self.orientation)

    def axis(self, name_or_index) -> int:
        if isinstance(name_or_index, str):
            try:
                return self.names.index(name_or_index)
            except ValueError:
                raise InvalidParameter(f"unknown coordinate '{name_or_index}', chart has {self.names}") from None
        idx = int(name_or_index)
        if not 0 <= idx < self.dim:
            raise InvalidParameter(f"axis {idx} out of range for a {self.dim}-chart")
        return idx

    def accepts(self, points: np.ndarray) -> np.ndarray:
        pts, _ = as_points(points, self.dim)
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        inside = np.all((pts >= lo) & (pts <= hi), axis=1)
        if self.region is not None:
            inside &= np.asarray(self.region(pts), dtype=bool)
        return inside

    def clearance(self, points: np.ndarray, axis: int) -> np.ndarray:
        """Distance from each point to the box wall along ``axis``."""
        lo, hi = self.bounds[axis]
        x = points[:, axis]
        return np.minimum(x - lo, hi - x)

    def sub(self, bounds, region=None) -> "Chart":
        """Same coordinates and orientation, new box."""
        return Chart(bounds, region=region if region is not None else self.region,
                     orientation=self.orientation, names=self.names)

    def sample(self, n: int, seed: int = 0, margin: float = 0.02) -> np.ndarray:
        """Deterministic uniform interior samples passing the region predicate.

        ``margin`` is the fraction of each interval kept clear of the walls.
        """
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        pad = margin * (hi - lo)
        out = []
        got = 0
        for _ in range(200):
            pts = rng.uniform(lo + pad, hi - pad, size=(max(4 * n, 64), self.dim))
            if self.region is not None:
                pts = pts[np.asarray(self.region(pts), dtype=bool)]
            out.append(pts)
            got += len(pts)
            if got >= n:
                break
        pts = np.concatenate(out)[:n]
        if len(pts) < n:
            raise EmptyDomain("region predicate rejects (almost) every sample point")
        return pts


class PFormField:
    """A p-form whose component array is computed pointwise.

    ``components`` maps points ``(N, dim)`` to an array ``(N, binomial(dim, p))``.
    """

    def __init__(self, dim: int, degree: int, components: Callable, name: str = ""):
        if dim < 1:
            raise InvalidParameter("dim must be >= 1")
        if not 0 <= degree <= dim:
            raise DegreeOverflow(f"degree {degree} outside [0, {dim}]")
        self.dim = dim
        self.degree = degree
        self.ncomp = math.comb(dim, degree)
        self._components = components
        self.name = name

    @property
    def indices(self):
        return multi_indices(self.dim, self.degree)

    def __call__(self, x) -> np.ndarray:
        pts, single = as_points(x, self.dim)
        vals = np.asarray(self._components(pts), dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape != (len(pts), self.ncomp):
            raise InvalidParameter(
                f"{self.name or 'form'} returned shape {vals.shape}, expected {(len(pts), self.ncomp)}"
            )
        return vals[0] if single else vals

    def component(self, multi_index) -> Callable:
        """Scalar field for one component, with antisymmetric sign handling."""
        sign = permutation_sign(multi_index)
        key = tuple(sorted(multi_index))
        if sign == 0:
            return lambda pts: np.zeros(len(as_points(pts, self.dim)[0]))
        k = _index_lookup(self.dim, self.degree)[key]
        return lambda pts: sign * self(as_points(pts, self.dim)[0])[:, k]

    def __add__(self, other: "PFormField") -> "PFormField":
        _check_same(self, other)
        return PFormField(self.dim, self.degree, lambda p: self(p) + other(p))

    def __sub__(self, other: "PFormField") -> "PFormField":
        _check_same(self, other)
        return PFormField(self.dim, self.degree, lambda p: self(p) - other(p))

    def scaled(self, c: float) -> "PFormField":
        return PFormField(self.dim, self.degree, lambda p: c * self(p), name=self.name)

    def __repr__(self):
        return f"PFormField(dim={self.dim}, degree={self.degree}{', ' + self.name if self.name else ''})"


def _check_same(a: PFormField, b: PFormField):
    if a.dim != b.dim or a.degree != b.degree:
        raise InvalidParameter("forms must share dimension and degree")


def constant_form(dim: int, degree: int, coefficients) -> PFormField:
    coeffs = np.asarray(coefficients, dtype=np.float64).reshape(-1)
    return PFormField(dim, degree, lambda p: np.broadcast_to(coeffs, (len(p), coeffs.size)).copy())


# ---------------------------------------------------------------------------
# finite differences


def _steps(points: np.ndarray, axis: int, order: int, rel_step: Optional[float], domain,
           clearance_fraction: Optional[float]) -> np.ndarray:
    rel = DEFAULT_REL_STEP[order] if rel_step is None else rel_step
    h = rel * np.maximum(1.0, np.abs(points[:, axis]))
    if domain is not None:
        # default keeps the whole stencil within half the distance to the wall
        frac = 1.0 / order if clearance_fraction is None else clearance_fraction
        h = np.minimum(h, frac * domain.clearance(points, axis))
    # representable step
    h = (points[:, axis] + h) - points[:, axis]
    if np.any(h <= 0):
        raise NonFiniteEvaluation("finite-difference stencil has no room (point on a domain wall)")
    return h


def gradient(func: Callable, x, order: int = 2, rel_step: Optional[float] = None, domain=None,
             axes: Optional[Sequence[int]] = None, clearance_fraction: Optional[float] = None) -> np.ndarray:
    """Central-difference derivatives of a vectorised field along each axis.

    Returns an array shaped ``(N, len(axes), *value_shape)``. All stencil
    points are evaluated in a single call to ``func``. With a ``domain``,
    the step is capped at ``clearance_fraction`` times the distance to its
    wall (default ``1/order``, just enough to stay inside).
    """
    if order not in _STENCILS:
        raise InvalidParameter(f"stencil order must be 2 or 4, got {order}")
    pts, _ = as_points(x)
    N, dim = pts.shape
    axes = tuple(range(dim)) if axes is None else tuple(axes)
    offsets, coeffs = _STENCILS[order]
    hs = [_steps(pts, ax, order, rel_step, domain, clearance_fraction) for ax in axes]
    stacked = np.empty((len(axes), len(offsets), N, dim))
    for i, ax in enumerate(axes):
        for j, off in enumerate(offsets):
            p = pts.copy()
            p[:, ax] += off * hs[i]
            stacked[i, j] = p
    vals = np.asarray(func(stacked.reshape(-1, dim)), dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteEvaluation("field returned a non-finite value at a stencil point")
    vals = vals.reshape((len(axes), len(offsets), N) + vals.shape[1:])
    out = np.zeros((len(axes), N) + vals.shape[3:])
    for j, c in enumerate(coeffs):
        out += c * vals[:, j]
    h = np.stack(hs).reshape((len(axes), N) + (1,) * (out.ndim - 2))
    out = out / h
    return np.moveaxis(out, 0, 1)


def partial_derivative(f: Callable, x, axis: int, order: int = 2, rel_step: Optional[float] = None,
                       domain=None):
    """Central finite-difference derivative of a scalar field along ``axis``.

    ``h = rel_step * max(1, |x_axis|)`` with ``rel_step`` defaulting to 1e-5
    (order 2) or 1e-4 (order 4). When ``domain`` is given the step shrinks
    so the stencil stays inside it.

    Raises
    ------
    NonFiniteEvaluation
        If ``f`` is non-finite at any stencil point.
    """
    pts, single = as_points(x)
    if not 0 <= axis < pts.shape[1]:
        raise InvalidParameter(f"axis {axis} out of range")
    g = gradient(lambda p: np.asarray(f(p), dtype=np.float64).reshape(len(p)), pts,
                 order=order, rel_step=rel_step, domain=domain, axes=(axis,))
    g = g[:, 0]
    return float(g[0]) if single else g


@lru_cache(maxsize=None)
def _d_table(dim: int, degree: int):
    """For each (p+1)-index: list of (sign, axis, p-component index)."""
    lookup = _index_lookup(dim, degree)
    table = []
    for J in multi_indices(dim, degree + 1):
        terms = []
        for k, ax in enumerate(J):
            rest = J[:k] + J[k + 1:]
            terms.append(((-1) ** k, ax, lookup[rest]))
        table.append(terms)
    return table


def exterior_derivative(w: PFormField, x, order: int = 2, rel_step: Optional[float] = None,
                        domain=None) -> np.ndarray:
    """Components of ``dw`` at the given point(s).

    ``(dw)_{i0<..<ip} = sum_k (-1)^k d_{i_k} w_{i0..^i_k..ip}``, so the
    result is antisymmetric by construction.
    """
    if w.degree >= w.dim:
        raise DegreeOverflow(f"d of a {w.degree}-form on a {w.dim}-chart")
    pts, single = as_points(x, w.dim)
    grad = gradient(w, pts, order=order, rel_step=rel_step, domain=domain)  # (N, dim, ncomp)
    table = _d_table(w.dim, w.degree)
    out = np.zeros((len(pts), len(table)))
    for col, terms in enumerate(table):
        for sign, ax, comp in terms:
            out[:, col] += sign * grad[:, ax, comp]
    return out[0] if single else out


def d(w: PFormField, order: int = 2, rel_step: Optional[float] = None, domain=None) -> PFormField:
    """Exterior derivative as a new (lazily evaluated) field."""
    return PFormField(w.dim, w.degree + 1,
                      lambda p: exterior_derivative(w, p, order=order, rel_step=rel_step, domain=domain),
                      name=f"d({w.name})" if w.name else "")


def exact_form(f: Callable, dim: int, order: int = 4, rel_step: Optional[float] = None) -> PFormField:
    """The 1-form ``df`` of a scalar field."""
    scalar = PFormField(dim, 0, lambda p: np.asarray(f(p), dtype=np.float64).reshape(len(p), 1))
    return d(scalar, order=order, rel_step=rel_step)


@lru_cache(maxsize=None)
def _wedge_table(dim: int, p: int, q: int):
    lookup = _index_lookup(dim, p + q)
    table = []
    for i, I in enumerate(multi_indices(dim, p)):
        for j, J in enumerate(multi_indices(dim, q)):
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            table.append((lookup[K], i, j, permutation_sign(I + J)))
    return table


def wedge_components(u: np.ndarray, p: int, v: np.ndarray, q: int, dim: int) -> np.ndarray:
    """Wedge product of component arrays (leading batch axes allowed)."""
    if p + q > dim:
        raise DegreeOverflow(f"{p}-form ^ {q}-form exceeds dimension {dim}")
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros(u.shape[:-1] + (math.comb(dim, p + q),))
    for k, i, j, s in _wedge_table(dim, p, q):
        if s > 0:
            out[..., k] += u[..., i] * v[..., j]
        else:
            out[..., k] -= u[..., i] * v[..., j]
    return out


def wedge(u: PFormField, v: PFormField) -> PFormField:
    """Antisymmetrised product of two form fields on the same chart."""
    if u.dim != v.dim:
        raise InvalidParameter("forms live on charts of different dimension")
    if u.degree + v.degree > u.dim:
        raise DegreeOverflow(f"{u.degree}-form ^ {v.degree}-form exceeds dimension {u.dim}")
    return PFormField(u.dim, u.degree + v.degree,
                      lambda pts: wedge_components(u(pts), u.degree, v(pts), v.degree, u.dim))


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Legendre rule with doubling refinement.

    Level ``k`` (0-based) uses ``points_per_axis * 2**k`` nodes per axis;
    the reported value comes from the finest level and the error estimate
    is the difference between the two finest levels.
    """

    scheme: str = "gauss-legendre-tensor"
    points_per_axis: int = 64
    refinement_levels: int = 3
    convergence_tol: float = 1e-8

    def __post_init__(self):
        if self.scheme != "gauss-legendre-tensor":
            raise InvalidParameter(f"unsupported quadrature scheme '{self.scheme}'")
        if int(self.points_per_axis) != self.points_per_axis or self.points_per_axis < 2:
            raise InvalidParameter("points_per_axis must be an integer >= 2")
        if int(self.refinement_levels) != self.refinement_levels or self.refinement_levels < 1:
            raise InvalidParameter("refinement_levels must be an integer >= 1")
        if not self.convergence_tol > 0:
            raise InvalidParameter("convergence_tol must be positive")

    @property
    def level_points(self) -> list[int]:
        return [int(self.points_per_axis) * 2 ** k for k in range(int(self.refinement_levels))]

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "points_per_axis": int(self.points_per_axis),
            "refinement_levels": int(self.refinement_levels),
            "convergence_tol": float(self.convergence_tol),
        }


@dataclass(frozen=True)
class IntegrationResult:
    """Quadrature outcome; unpacks as ``value, error``."""

    value: float
    error: float
    converged: bool = True
    levels: tuple = field(default=())
    flags: tuple = field(default=())

    def __iter__(self):
        yield self.value
        yield self.error

    def raise_if_unconverged(self):
        if not self.converged:
            raise NoConvergence(f"quadrature error estimate {self.error:.3g} above tolerance", result=self)
        return self


@lru_cache(maxsize=64)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def worker_count() -> int:
    """Worker cap from ``TOPOSPEC_WORKERS``; unset means single-threaded."""
    raw = os.environ.get("TOPOSPEC_WORKERS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _level_sum(func: Callable, chart: Chart, n: int, sign: float, workers: int) -> tuple[float, int]:
    dim = chart.dim
    x, w = _gauss_legendre(n)
    nodes, weights = [], []
    for lo, hi in chart.bounds:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
    total = n ** dim
    shape = (n,) * dim
    bounds = list(range(0, total, CHUNK_NODES)) + [total]
    spans = list(zip(bounds[:-1], bounds[1:]))

    def chunk_terms(span):
        idx = np.unravel_index(np.arange(span[0], span[1]), shape)
        pts = np.stack([nodes[a][idx[a]] for a in range(dim)], axis=1)
        wt = weights[0][idx[0]].copy()
        for a in range(1, dim):
            wt = wt * weights[a][idx[a]]
        keep = chart.accepts(pts) if chart.region is not None else np.ones(len(pts), dtype=bool)
        terms = np.zeros(len(pts))
        if keep.any():
            vals = np.asarray(func(pts[keep]), dtype=np.float64).reshape(-1)
            if not np.all(np.isfinite(vals)):
                raise NonFiniteEvaluation("integrand is non-finite at a quadrature node")
            terms[keep] = wt[keep] * (sign * vals)
        return terms, int(keep.sum())

    # evaluation may be parallel; the reduction is always in axis-major node order
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk_terms, spans))
    else:
        parts = [chunk_terms(s) for s in spans]
    s = c = 0.0
    passed = 0
    for terms, cnt in parts:
        s, c = kernels.neumaier_sum(np.ascontiguousarray(terms), s, c)
        passed += cnt
    if passed == 0:
        raise EmptyDomain(f"no quadrature node of the {n}-per-axis grid passes the region predicate")
    return s + c, passed


def integrate_function(func: Callable, chart: Chart, quad: Optional[QuadratureSpec] = None,
                       workers: Optional[int] = None) -> IntegrationResult:
    """Integrate a vectorised scalar ``func`` over ``chart`` (coordinate measure).

    Nodes are visited in axis-major order (last axis fastest) and summed
    with Neumaier compensation, so a fixed ``QuadratureSpec`` gives
    bit-identical values on every run. The chart orientation sign is
    applied to the integrand.
    """
    quad = quad or QuadratureSpec()
    workers = worker_count() if workers is None else workers
    sign = float(chart.orientation_sign)
    levels = tuple(_level_sum(func, chart, n, sign, workers)[0] for n in quad.level_points)
    value = levels[-1]
    if len(levels) > 1:
        err = abs(levels[-1] - levels[-2])
        converged = err <= quad.convergence_tol
    else:
        err = float("nan")
        converged = True
    return IntegrationResult(value=value, error=err, converged=converged, levels=levels,
                             flags=() if converged else ("no_convergence",))


def integrate(density: PFormField, chart: Chart, quad: Optional[QuadratureSpec] = None,
              workers: Optional[int] = None) -> IntegrationResult:
    """Integrate a top-degree form over a chart.

    The value is reported even when refinement has not converged; in that
    case ``converged`` is False and ``flags`` contains ``"no_convergence"``.

    Raises
    ------
    EmptyDomain
        If no node of some refinement level passes the region predicate.
    """
    if density.degree != chart.dim or density.dim != chart.dim:
        raise InvalidParameter(
            f"need a top-degree form: got degree {density.degree} on dim {density.dim}, chart dim {chart.dim}"
        )
    return integrate_function(lambda p: density(p)[:, 0], chart, quad, workers)
