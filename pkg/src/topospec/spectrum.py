"""Topological spectra: solving ``f(p) = n`` for one free parameter.

A :class:`SpectrumProblem` wraps an invariant ``f`` (a characteristic-class
integral as a function of one configuration parameter). Roots are located
by scanning for sign changes of ``f - n`` (and ``-f - n`` with
``use_abs``) and refined with Brent's bracketing method.

Closed forms used as oracles live here too: the oscillator spectrum, the
a = 0 black-hole spectrum, and the horizon-area spectrum.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .calculus import IntegrationResult, QuadratureSpec, worker_count
from .configurations import BlackHoleParams, build_configuration, oscillator_config, reissner_nordstrom_config
from .errors import BracketAmbiguity, InvalidParameter, TopoSpecError

MAX_ROOTS_PER_LEVEL = 10


def _as_result(out) -> IntegrationResult:
    if isinstance(out, IntegrationResult):
        return out
    if isinstance(out, tuple):
        return IntegrationResult(float(out[0]), float(out[1]))
    return IntegrationResult(float(out), 0.0)


@dataclass
class SpectrumProblem:
    """``f(free_param) = n`` for ``n`` in ``[n_min, n_max]``.

    ``invariant`` returns an IntegrationResult, a ``(value, err)`` pair or a
    float. ``scan_invariant``, if given, is a cheaper approximation used only
    to find sign-change brackets; roots are always refined and checked
    against ``invariant``.
    """

    invariant: Callable
    free_param: str
    interval: tuple
    n_min: int
    n_max: int
    use_abs: bool = True
    scan_points: int = 512
    root_tol: float = 1e-12
    residual_tol: float = 1e-9
    scan_invariant: Optional[Callable] = None
    quadrature: Optional[QuadratureSpec] = None

    def __post_init__(self):
        lo, hi = (float(v) for v in self.interval)
        if not lo < hi:
            raise InvalidParameter(f"search interval [{lo}, {hi}] is empty")
        self.interval = (lo, hi)
        if int(self.n_min) != self.n_min or int(self.n_max) != self.n_max or self.n_min > self.n_max:
            raise InvalidParameter("n_min <= n_max must be integers")
        if self.scan_points < 2:
            raise InvalidParameter("scan_points must be >= 2")


@dataclass(frozen=True)
class SpectrumRow:
    n: int
    param_value: float
    invariant_value: float
    residual: float
    quadrature_err: float


@dataclass
class SpectrumTable:
    free_param: str
    rows: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.rows), default=float("nan"))

    def params_for(self, n: int) -> list:
        return [r.param_value for r in self.rows if r.n == n]


@dataclass(frozen=True)
class CurvePoint:
    param: float
    value: float
    error: float
    flag: str = ""


@dataclass
class CurveTable:
    free_param: str
    points: list
    segments: list  # (start index, end index, "increasing" | "decreasing" | "constant")


def _evaluate_many(func: Callable, xs) -> list:
    def one(x):
        try:
            return _as_result(func(float(x))), ""
        except TopoSpecError as exc:
            return None, type(exc).__name__

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, xs))
    return [one(x) for x in xs]


def _segments(values) -> list:
    segs = []
    start = None
    direction = None
    for i in range(len(values) - 1):
        a, b = values[i], values[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            if start is not None:
                segs.append((start, i, direction))
            start, direction = None, None
            continue
        step = "increasing" if b > a else "decreasing" if b < a else "constant"
        if start is None:
            start, direction = i, step
        elif step != direction:
            segs.append((start, i, direction))
            start, direction = i, step
    if start is not None:
        segs.append((start, len(values) - 1, direction))
    return segs


def invariant_curve(problem: SpectrumProblem, grid: int) -> CurveTable:
    """Invariant on a uniform grid over the search interval.

    Failing points are flagged with the error name and carry NaN values.
    """
    if grid < 2:
        raise InvalidParameter("grid must be >= 2")
    xs = np.linspace(problem.interval[0], problem.interval[1], int(grid))
    pts = []
    for x, (res, flag) in zip(xs, _evaluate_many(problem.invariant, xs)):
        if res is None:
            pts.append(CurvePoint(float(x), float("nan"), float("nan"), flag))
        else:
            pts.append(CurvePoint(float(x), res.value, res.error, ",".join(res.flags)))
    return CurveTable(problem.free_param, pts, _segments([p.value for p in pts]))


def solve_spectrum(problem: SpectrumProblem) -> SpectrumTable:
    """Solve ``f = n`` (and ``f = -n`` with ``use_abs``) for each level n.

    An empty table carries the ``"no_roots"`` flag; a level with more than
    ten roots triggers a :class:`BracketAmbiguity` warning.
    """
    lo, hi = problem.interval
    xs = np.linspace(lo, hi, int(problem.scan_points))
    scan = problem.scan_invariant or problem.invariant
    fs = np.array([r.value if r is not None else np.nan for r, _ in _evaluate_many(scan, xs)])
    table = SpectrumTable(problem.free_param)
    if np.any(~np.isfinite(fs)):
        table.flags.append("scan_errors")

    cache: dict = {}

    def full(x: float) -> IntegrationResult:
        if x not in cache:
            cache[x] = _as_result(problem.invariant(x))
        return cache[x]

    for n in range(int(problem.n_min), int(problem.n_max) + 1):
        targets = [float(n)]
        if problem.use_abs and n != 0:
            targets.append(-float(n))
        roots = []
        for t in targets:
            g = fs - t
            for i in range(len(xs)):
                if not math.isfinite(g[i]):
                    continue
                if g[i] == 0.0:
                    roots.append(float(xs[i]))
                    continue
                if i + 1 < len(xs) and math.isfinite(g[i + 1]) and g[i] * g[i + 1] < 0:
                    a, b = float(xs[i]), float(xs[i + 1])
                    ga, gb = full(a).value - t, full(b).value - t
                    if ga == 0.0:
                        roots.append(a)
                        continue
                    if gb == 0.0:
                        roots.append(b)
                        continue
                    if ga * gb > 0:
                        if "bracket_lost" not in table.flags:
                            table.flags.append("bracket_lost")
                        continue
                    roots.append(brentq(lambda x: full(x).value - t, a, b, xtol=problem.root_tol,
                                        maxiter=200))
        found = []
        for x in sorted(set(roots)):
            res = full(x)
            f = res.value
            resid = abs(abs(f) - n) if problem.use_abs else abs(f - n)
            if resid <= problem.residual_tol:
                found.append(SpectrumRow(n, x, f, resid, res.error))
        if len(found) > MAX_ROOTS_PER_LEVEL:
            warnings.warn(f"{len(found)} roots for n={n}", BracketAmbiguity, stacklevel=2)
            if "bracket_ambiguity" not in table.flags:
                table.flags.append("bracket_ambiguity")
        table.rows.extend(found)
    table.rows.sort(key=lambda r: (r.n, r.param_value))
    if not table.rows:
        table.flags.append("no_roots")
    return table


# ---------------------------------------------------------------------------
# problems built from catalog configurations


def configuration_invariant(name: str, params: dict, free_param: str,
                            quad: Optional[QuadratureSpec] = None) -> Callable:
    """``x -> canonical invariant`` with ``params[free_param] = x``."""
    def f(x: float) -> IntegrationResult:
        p = dict(params)
        p[free_param] = x
        return build_configuration(name, p).invariant(quad)

    return f


def configuration_problem(name: str, params: dict, free_param: str, interval, n_min: int, n_max: int,
                          quad: Optional[QuadratureSpec] = None, **kwargs) -> SpectrumProblem:
    """Spectrum problem over a catalog configuration.

    Both interval endpoints must give admissible configurations. The scan
    surrogate uses the coarsest level of ``quad`` only.
    """
    quad = quad or QuadratureSpec()
    for x in interval:
        p = dict(params)
        p[free_param] = float(x)
        try:
            build_configuration(name, p)
        except InvalidParameter as exc:
            raise InvalidParameter(f"search interval endpoint {free_param}={x} is not admissible: {exc}") from None
    coarse = QuadratureSpec(quad.scheme, quad.points_per_axis, 1, quad.convergence_tol)
    return SpectrumProblem(invariant=configuration_invariant(name, params, free_param, quad),
                           scan_invariant=configuration_invariant(name, params, free_param, coarse),
                           free_param=free_param, interval=tuple(interval), n_min=n_min, n_max=n_max,
                           quadrature=quad, **kwargs)


def oscillator_problem(m: float, k: float, E: float, n_min: int, n_max: int, L: float = 1.0,
                       interval=None, quad: Optional[QuadratureSpec] = None, **kwargs) -> SpectrumProblem:
    """Single-oscillator spectrum in ``q0`` (default interval inside the turning point)."""
    tv = math.sqrt(2.0 * E / k)
    interval = interval or (1e-3 * tv, (1.0 - 1e-3) * tv)
    return configuration_problem("oscillator", {"m": m, "k1": k, "k2": 0.0, "E": E, "L": L}, "q0",
                                 interval, n_min, n_max, quad, **kwargs)


# ---------------------------------------------------------------------------
# closed forms and normalised invariants


def oscillator_closed_form(k: float, E: float, q0: float) -> float:
    """``k q0 / (2E - k q0^2)``, the normalised Euler invariant in this package's orientation."""
    return k * q0 / (2.0 * E - k * q0 * q0)


def oscillator_reversed_form(k: float, E: float, q0: float) -> float:
    """``k q0 / (k q0^2 - 2E)``: opposite orientation, negative inside the turning point."""
    return k * q0 / (k * q0 * q0 - 2.0 * E)


def oscillator_invariant_normalized(m: float, k: float, E: float, L: float, q0: float,
                                    quad: Optional[QuadratureSpec] = None) -> float:
    """``(2 pi / L)`` times the Euler integral over ``[0, q0] x [0, L]``.

    Single-oscillator Jacobi metric (``k2 = 0``). Equals
    :func:`oscillator_closed_form` up to quadrature error.

    Raises
    ------
    InvalidParameter
        Unless ``0 < q0 < sqrt(2E/k)``.
    """
    if not (k > 0 and E > 0):
        raise InvalidParameter("need k > 0 and E > 0")
    tv = math.sqrt(2.0 * E / k)
    if not 0.0 < q0 < tv:
        raise InvalidParameter(f"q0={q0} must lie in (0, {tv})")
    return oscillator_config(m, k, 0.0, E, q0, L).invariant(quad).value


def rn_closed_form(m: float, e: float, r0: float) -> float:
    """``2 sqrt(m^2 - e^2) / (e r0)``: the a = 0 black-hole spectrum function."""
    return 2.0 * math.sqrt(m * m - e * e) / (e * r0)


def kn_reference_form(m: float, e: float, a: float, r0: float) -> float:
    """``2 e^3 sqrt(m^2 - e^2 - a^2) / (r0 (e^4 + 4 m^2 a^2))``: reference closed form, unverified for a != 0."""
    return 2.0 * e ** 3 * math.sqrt(m * m - e * e - a * a) / (r0 * (e ** 4 + 4.0 * m * m * a * a))


def rn_chern_invariant(p: BlackHoleParams, quad: Optional[QuadratureSpec] = None) -> float:
    """Numerical Chern invariant of the Reissner-Nordstrom field between the horizons.

    Zero for extremal holes (zero-width cycle).
    """
    if p.a != 0:
        raise InvalidParameter("rn_chern_invariant needs a = 0")
    return reissner_nordstrom_config(p.m, p.e, p.r0).invariant(quad).value


def horizon_area(m: float, e: float) -> float:
    """``4 pi r+^2`` for a Reissner-Nordstrom hole."""
    rp = m + math.sqrt(max(m * m - e * e, 0.0))
    return 4.0 * math.pi * rp * rp


def area_spectrum(e: float, n: int, A0: float) -> float:
    """``4 pi e^2 A0 [n/2 + sqrt(1 + n^2/4)]^2``."""
    if not A0 > 0:
        raise InvalidParameter("A0 must be positive")
    if e == 0:
        raise InvalidParameter("e must be nonzero")
    if n < 0 or int(n) != n:
        raise InvalidParameter("n must be a non-negative integer")
    bracket = n / 2.0 + math.sqrt(1.0 + n * n / 4.0)
    return 4.0 * math.pi * e * e * A0 * bracket * bracket
