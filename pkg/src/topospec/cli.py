"""Command-line front end: ``topospec run|sweep|verify|list|dim``.

Run files are YAML documents::

    configuration:
      name: monopole
      params: {g: 0.5}
    task: integrate            # integrate | spectrum | curve | verify | dim
    integrate:
      class: chern1            # optional, defaults to the configuration's class
      cycle:                   # optional, defaults to the configuration's cycle
        axes: [theta, phi]
        bounds: [[0.0, 3.14159], [0.0, 6.28318]]
        fixed_coords: {}
        chart_index: 0
    spectrum:                  # spectrum and curve tasks
      free_param: q0
      interval: [0.01, 1.4]
      n_min: 1
      n_max: 5
      use_abs: true
      scan_points: 512
      root_tol: 1.0e-12
      residual_tol: 1.0e-9
      grid: 64                 # curve task only
    sweep:                     # ``topospec sweep`` only
      e: {min: 0.2, max: 0.8, steps: 4}
    quadrature: {points_per_axis: 64, refinement_levels: 3, convergence_tol: 1.0e-8}
    output: {path: out.csv, format: csv}

Unknown keys are rejected with the offending key and line. Exit codes:
0 success, 1 parse or I/O error, 2 results flagged (no convergence, no
roots, failed verification), 3 invalid parameter, 4 degenerate metric,
5 empty domain, 6 any other library error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import itertools
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .calculus import IntegrationResult, QuadratureSpec
from .charclass import CycleSpec
from .configurations import (BlackHoleParams, build_configuration, bundle_dimension, catalog_listing,
                             group_dimension, kerr_newman_config, minkowski_config, monopole_config,
                             reissner_nordstrom_config, sphere_config)
from .errors import DegenerateMetric, EmptyDomain, InvalidParameter, ParseError, TopoSpecError

log = logging.getLogger("topospec")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FLAGGED = 2
EXIT_CODES = ((InvalidParameter, 3), (DegenerateMetric, 4), (EmptyDomain, 5), (TopoSpecError, 6))

# flags that describe a result without making it suspect
INFO_FLAGS = {"zero_width_cycle"}

TASKS = ("integrate", "spectrum", "curve", "verify", "dim")
CLASSES = ("euler2", "chern1", "pontrjagin1")


# ---------------------------------------------------------------------------
# strict YAML parsing

_NUM, _INT, _BOOL, _STR, _PAIR, _PAIRS, _PARAMS, _ANY = "num", "int", "bool", "str", "pair", "pairs", "params", "any"

_CYCLE = {"axes": (_ANY, True), "bounds": (_PAIRS, True), "fixed_coords": (_PARAMS, False),
          "chart_index": (_INT, False)}
_GRID_AXIS = {"min": (_NUM, True), "max": (_NUM, True), "steps": (_INT, True)}

SCHEMA = {
    "configuration": ({"name": (_STR, True), "params": (_PARAMS, False)}, False),
    "task": (_STR, False),
    "integrate": ({"class": (_STR, False), "cycle": (_CYCLE, False)}, False),
    "spectrum": ({"free_param": (_STR, True), "interval": (_PAIR, True), "n_min": (_INT, False),
                  "n_max": (_INT, False), "use_abs": (_BOOL, False), "scan_points": (_INT, False),
                  "root_tol": (_NUM, False), "residual_tol": (_NUM, False), "grid": (_INT, False)}, False),
    "sweep": ("sweep", False),
    "quadrature": ({"scheme": (_STR, False), "points_per_axis": (_INT, False),
                    "refinement_levels": (_INT, False), "convergence_tol": (_NUM, False)}, False),
    "output": ({"path": (_STR, True), "format": (_STR, False)}, False),
}


def _key_lines(node, path=(), lines=None) -> dict:
    """Map key paths to source lines; reject duplicate keys."""
    lines = {} if lines is None else lines
    if isinstance(node, yaml.MappingNode):
        seen = set()
        for k, v in node.value:
            key = k.value
            if key in seen:
                raise ParseError("duplicate key", key=".".join(map(str, path + (key,))), line=k.start_mark.line + 1)
            seen.add(key)
            lines[path + (key,)] = k.start_mark.line + 1
            _key_lines(v, path + (key,), lines)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            lines[path + (i,)] = v.start_mark.line + 1
            _key_lines(v, path + (i,), lines)
    return lines


class _Checker:
    def __init__(self, lines: dict):
        self.lines = lines

    def fail(self, msg, path):
        line = None
        for cut in range(len(path), -1, -1):
            if path[:cut] in self.lines:
                line = self.lines[path[:cut]]
                break
        raise ParseError(msg, key=".".join(map(str, path)) or None, line=line)

    def num(self, v, path) -> float:
        if isinstance(v, bool):
            self.fail("expected a number", path)
        try:
            out = float(v)  # PyYAML reads 1e-8 (no dot) as a string
        except (TypeError, ValueError):
            self.fail(f"expected a number, got {v!r}", path)
        return out

    def check(self, v, kind, path):
        if isinstance(kind, dict):
            if not isinstance(v, dict):
                self.fail("expected a mapping", path)
            out = {}
            for k in v:
                if k not in kind:
                    self.fail(f"unknown key (allowed: {', '.join(kind)})", path + (k,))
            for k, (sub, required) in kind.items():
                if k in v:
                    out[k] = self.check(v[k], sub, path + (k,))
                elif required:
                    self.fail("required key missing", path + (k,))
            return out
        if kind == _NUM:
            return self.num(v, path)
        if kind == _INT:
            if isinstance(v, bool) or not isinstance(v, int):
                self.fail(f"expected an integer, got {v!r}", path)
            return int(v)
        if kind == _BOOL:
            if not isinstance(v, bool):
                self.fail(f"expected true/false, got {v!r}", path)
            return v
        if kind == _STR:
            if not isinstance(v, str):
                self.fail(f"expected a string, got {v!r}", path)
            return v
        if kind == _PAIR:
            if not isinstance(v, list) or len(v) != 2:
                self.fail("expected a two-element list", path)
            return (self.num(v[0], path + (0,)), self.num(v[1], path + (1,)))
        if kind == _PAIRS:
            if not isinstance(v, list):
                self.fail("expected a list of intervals", path)
            return tuple(self.check(x, _PAIR, path + (i,)) for i, x in enumerate(v))
        if kind == _PARAMS:
            if v is None:
                return {}
            if not isinstance(v, dict):
                self.fail("expected a name: value mapping", path)
            return {str(k): self.num(x, path + (k,)) for k, x in v.items()}
        if kind == "sweep":
            if not isinstance(v, dict) or not v:
                self.fail("expected a mapping of parameter grids", path)
            return {str(k): self.check(x, _GRID_AXIS, path + (k,)) for k, x in v.items()}
        return v


@dataclass
class RunConfig:
    """Validated run file."""

    task: Optional[str] = None
    name: Optional[str] = None
    params: dict = field(default_factory=dict)
    integrate: dict = field(default_factory=dict)
    spectrum: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    output_path: Optional[str] = None
    output_format: str = "csv"
    lines: dict = field(default_factory=dict)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run file.

    Raises
    ------
    ParseError
        On malformed YAML, unknown or duplicate keys, wrong types, or a
        missing key required by the chosen task.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                         line=mark.line + 1 if mark else None) from None
    if data is None:
        raise ParseError("empty configuration file")
    lines = _key_lines(node)
    chk = _Checker(lines)
    top = chk.check(data, SCHEMA, ())
    cfg = RunConfig(lines=lines)
    cfg.task = top.get("task")
    if cfg.task is not None and cfg.task not in TASKS:
        chk.fail(f"unknown task '{cfg.task}' (allowed: {', '.join(TASKS)})", ("task",))
    if "configuration" in top:
        cfg.name = top["configuration"]["name"]
        cfg.params = top["configuration"].get("params", {})
    cfg.integrate = top.get("integrate", {})
    if "class" in cfg.integrate and cfg.integrate["class"] not in CLASSES:
        chk.fail(f"unknown class (allowed: {', '.join(CLASSES)})", ("integrate", "class"))
    cfg.spectrum = top.get("spectrum", {})
    cfg.sweep = top.get("sweep", {})
    try:
        cfg.quadrature = QuadratureSpec(**top.get("quadrature", {}))
    except InvalidParameter as exc:
        chk.fail(str(exc), ("quadrature",))
    if "output" in top:
        cfg.output_path = top["output"]["path"]
        cfg.output_format = top["output"].get("format", "csv")
        if cfg.output_format not in ("csv", "json"):
            chk.fail("format must be csv or json", ("output", "format"))
    # task-dependent requirements
    if cfg.task in ("integrate", "spectrum", "curve", "dim") and cfg.name is None:
        chk.fail(f"task '{cfg.task}' needs a configuration section", ("configuration",))
    if cfg.task in ("spectrum", "curve"):
        if not cfg.spectrum:
            chk.fail(f"task '{cfg.task}' needs a spectrum section", ("spectrum",))
        need = ("n_min", "n_max") if cfg.task == "spectrum" else ("grid",)
        for k in need:
            if k not in cfg.spectrum:
                chk.fail(f"required for task '{cfg.task}'", ("spectrum", k))
        if cfg.spectrum["free_param"] in cfg.params:
            chk.fail("free parameter must not also be fixed", ("configuration", "params", cfg.spectrum["free_param"]))
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# output


def format_float(v) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def render(task: str, columns: list, rows: list, meta: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"task": task, "rows": [dict(zip(columns, r)) for r in rows], "meta": meta}
        return json.dumps(_json_value(doc), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_float(v) for v in r])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory plus rename."""
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".topospec-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta(cfg: RunConfig, **extra) -> dict:
    meta = {"quadrature": cfg.quadrature.as_dict(), "version": __version__,
            "configuration": {"name": cfg.name, "params": dict(sorted(cfg.params.items()))}}
    meta.update(extra)
    return meta


def _emit(cfg: RunConfig, task: str, columns, rows, meta) -> None:
    if cfg.output_path:
        write_atomic(cfg.output_path, render(task, list(columns), rows, meta, cfg.output_format))


# ---------------------------------------------------------------------------
# tasks


def _cycle(cfg: RunConfig):
    c = cfg.integrate.get("cycle")
    if c is None:
        return None
    return CycleSpec(axes=tuple(c["axes"]), bounds=c["bounds"], fixed_coords=c.get("fixed_coords", {}),
                     chart_index=c.get("chart_index", 0))


def _integrate_one(name: str, params: dict, cfg: RunConfig) -> tuple:
    conf = build_configuration(name, params)
    kind = cfg.integrate.get("class") or conf.default_class
    cycle = _cycle(cfg)
    if cycle is None and kind == conf.default_class:
        return kind, conf.invariant(cfg.quadrature)
    return kind, conf.integrate(kind, cycle, cfg.quadrature)


def _suspect(flags) -> bool:
    return any(f not in INFO_FLAGS for f in flags)


def task_integrate(cfg: RunConfig) -> int:
    kind, res = _integrate_one(cfg.name, cfg.params, cfg)
    _emit(cfg, "integrate", ("class", "value", "quad_err", "converged", "flags"),
          [(kind, res.value, res.error, res.converged, ";".join(res.flags))],
          _meta(cfg, residuals={"quad_err": res.error}, levels=list(res.levels)))
    print(f"{kind} = {res.value:.6f} (err {res.error:.0e})" + (f" [{', '.join(res.flags)}]" if res.flags else ""))
    return EXIT_FLAGGED if not res.converged else EXIT_OK


def _problem(cfg: RunConfig, n_min=0, n_max=0):
    from .spectrum import configuration_problem

    s = cfg.spectrum
    kw = {k: s[k] for k in ("use_abs", "scan_points", "root_tol", "residual_tol") if k in s}
    return configuration_problem(cfg.name, cfg.params, s["free_param"], s["interval"],
                                 s.get("n_min", n_min), s.get("n_max", n_max), cfg.quadrature, **kw)


def task_spectrum(cfg: RunConfig) -> int:
    from .spectrum import solve_spectrum

    table = solve_spectrum(_problem(cfg))
    rows = [(r.n, r.param_value, r.invariant_value, r.residual, r.quadrature_err) for r in table.rows]
    _emit(cfg, "spectrum", ("n", "param_value", "invariant_value", "residual", "quadrature_err"), rows,
          _meta(cfg, free_param=table.free_param, flags=table.flags,
                residuals={"max_residual": table.max_residual}))
    flags = f" [{', '.join(table.flags)}]" if table.flags else ""
    print(f"spectrum {table.free_param}: {len(rows)} rows, max residual {table.max_residual:.1e}{flags}")
    return EXIT_FLAGGED if "no_roots" in table.flags else EXIT_OK


def task_curve(cfg: RunConfig) -> int:
    from .spectrum import invariant_curve

    curve = invariant_curve(_problem(cfg), cfg.spectrum["grid"])
    rows = [(p.param, p.value, p.error, p.flag) for p in curve.points]
    _emit(cfg, "curve", (curve.free_param, "invariant", "quad_err", "flag"), rows,
          _meta(cfg, segments=[list(s) for s in curve.segments],
                residuals={"max_quad_err": max((p.error for p in curve.points), default=float("nan"))}))
    flagged = sum(1 for p in curve.points if p.flag and _suspect(p.flag.split(",")))
    print(f"curve {curve.free_param}: {len(rows)} points, {len(curve.segments)} monotone segments, {flagged} flagged")
    return EXIT_FLAGGED if flagged else EXIT_OK


def task_dim(cfg: RunConfig) -> int:
    conf = build_configuration(cfg.name, cfg.params)
    total = bundle_dimension(conf)
    _emit(cfg, "dim", ("configuration", "base_dim", "group", "group_dim", "bundle_dim"),
          [(conf.name, conf.base_dim, conf.group, group_dimension(conf.group), total)], _meta(cfg))
    print(f"dim P = {total} (base {conf.base_dim} + {conf.group} {group_dimension(conf.group)})")
    return EXIT_OK


def _grid(sweep: dict):
    axes = []
    for name, g in sweep.items():
        if g["steps"] < 1:
            raise InvalidParameter(f"sweep steps for {name} must be >= 1")
        vals = [g["min"]] if g["steps"] == 1 else list(np.linspace(g["min"], g["max"], g["steps"]))
        axes.append((name, [float(v) for v in vals]))
    return axes


def sweep(cfg: RunConfig) -> int:
    """Full factorial sweep; errors are recorded per row."""
    if cfg.name is None:
        raise ParseError("sweep needs a configuration section", key="configuration")
    if not cfg.sweep:
        raise ParseError("sweep needs a sweep section", key="sweep")
    if cfg.task not in (None, "integrate"):
        raise ParseError("sweep evaluates integrals; task must be 'integrate' or absent", key="task",
                         line=cfg.lines.get(("task",)))
    axes = _grid(cfg.sweep)
    names = [a[0] for a in axes]
    rows = []
    suspect = 0
    for combo in itertools.product(*(a[1] for a in axes)):
        params = dict(cfg.params)
        params.update(zip(names, combo))
        try:
            _, res = _integrate_one(cfg.name, params, cfg)
            flags = ";".join(res.flags)
            value, err = res.value, res.error
            suspect += _suspect(res.flags)
        except TopoSpecError as exc:
            value, err, flags = float("nan"), float("nan"), type(exc).__name__
            suspect += 1
            log.info("sweep row %s failed: %s", dict(zip(names, combo)), exc)
        rows.append((*combo, value, err, flags))
    _emit(cfg, "sweep", (*names, "invariant", "quad_err", "flag"), rows, _meta(cfg, grid=dict(axes)))
    print(f"sweep: {len(rows)} rows, {suspect} flagged")
    return EXIT_FLAGGED if suspect else EXIT_OK


# ---------------------------------------------------------------------------
# verification suite


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    converged: bool = True


def _result_check(name, res: IntegrationResult, expected: float, tol: float, rel=False) -> Check:
    resid = abs(res.value - expected)
    if rel:
        resid /= abs(expected)
    return Check(name, bool(resid <= tol) and res.converged,
                 f"value={res.value:.10g} expected={expected:.10g} residual={resid:.1e} tol={tol:.0e}"
                 + ("" if res.converged else " [no_convergence]"), res.converged)


def _verify_checks(quad: QuadratureSpec):
    from .frame import SpinConnection, coframe_from_metric
    from .gauge import field_strength, verify_transition
    from .spectrum import (area_spectrum, configuration_problem, horizon_area, oscillator_closed_form,
                           rn_closed_form, solve_spectrum)
    from .configurations import oscillator_config
    from .calculus import Chart

    for R in (0.5, 1.0, 2.0):
        yield _result_check(f"sphere euler2 R={R}", sphere_config(R).invariant(quad), 2.0, 1e-5)

    for g in (0.5, 1.0, 1.5, 2.0):
        cfg = monopole_config(g)
        rep = verify_transition(cfg.gauge)
        yield Check(f"monopole transition g={g}", rep.passed, f"max residual={rep.max_residual:.1e}")
        yield _result_check(f"monopole chern1 g={g}", cfg.invariant(quad), 2 * g, 1e-7)

    chi = lambda p: np.sin(p[:, 0]) * np.cos(3 * p[:, 1]) + 0.3 * p[:, 0] ** 2  # noqa: E731
    cfg = monopole_config(1.0)
    base = cfg.invariant(quad)
    moved = dataclasses.replace(cfg, gauge=cfg.gauge.gauge_transformed(chi)).invariant(quad)
    yield _result_check("chern1 gauge invariance", moved, base.value, 1e-7)

    mk = minkowski_config()
    pts = mk.chart.sample(64, seed=1)
    p1 = mk.density("pontrjagin1").forms[0](pts)
    yield Check("flat pontrjagin1 = 0", bool(np.max(np.abs(p1)) < 1e-10), f"max |density|={np.max(np.abs(p1)):.1e}")
    flat = build_configuration("oscillator", {"m": 1, "k1": 0, "k2": 0, "E": 1, "q0": 1})
    yield _result_check("flat euler2 = 0 (free particle)", flat.invariant(quad), 0.0, 1e-10)

    worst = 0.0
    for name, conf in (("sphere", sphere_config(1.0)),
                       ("oscillator", oscillator_config(1.0, 1.0, 0.5, 1.0, 1.0))):
        x = conf.chart.sample(64, seed=2)
        x = x[conf.chart.accepts(x)]
        worst = max(worst, float(np.max(np.abs(SpinConnection(coframe_from_metric(conf.metric)).torsion_residual(x)))))
    yield Check("torsion residual", worst < 1e-5, f"max={worst:.1e} tol=1e-05")

    for m, k, E in ((1.0, 1.0, 1.0), (2.0, 3.0, 1.5)):
        q0 = 0.5 * math.sqrt(2 * E / k)
        res = build_configuration("oscillator", {"m": m, "k1": k, "E": E, "q0": q0}).invariant(quad)
        yield _result_check(f"oscillator closed form (m,k,E)=({m},{k},{E}) q0={q0:.4g}", res,
                            oscillator_closed_form(k, E, q0), 1e-4, rel=True)

    for e in (0.3, 0.6, 0.9):
        for r0 in (0.5, 1.0, 2.0):
            res = reissner_nordstrom_config(1.0, e, r0).invariant(quad)
            yield _result_check(f"RN closed form e={e} r0={r0}", res, rn_closed_form(1.0, e, r0), 1e-6)

    table = solve_spectrum(configuration_problem("reissner_nordstrom", {"e": 1.0, "r0": 1.0}, "m", (1.0, 8.0),
                                                 0, 10, quad))
    by_n = {r.n: r for r in table.rows}
    worst, missing = 0.0, [n for n in range(11) if n not in by_n]
    for n, r in by_n.items():
        worst = max(worst, abs(horizon_area(r.param_value, 1.0) / area_spectrum(1.0, n, 1.0) - 1.0))
    yield Check("area spectrum from solved mass, n=0..10", not missing and worst < 1e-9,
                f"max rel residual={worst:.1e} tol=1e-09" + (f" missing n={missing}" if missing else ""))

    rn = field_strength(reissner_nordstrom_config(1.0, 0.6, 1.0).gauge).forms[0]
    kn = field_strength(kerr_newman_config(1.0, 0.6, 1e-6, 1.0).gauge).forms[0]
    chart = Chart([(0.0, 2 * math.pi), (0.3, 3.0), (0.1, math.pi - 0.1), (0.0, 2 * math.pi)])
    x = chart.sample(100, seed=3)
    ref = np.zeros((100, 6))
    ref[:, 0] = rn(x[:, :2])[:, 0]  # (t, r) component
    sup = float(np.max(np.abs(kn(x) - ref)))
    yield Check("KN(a=1e-6) field strength reduces to RN", sup < 1e-4, f"sup-norm={sup:.1e} tol=1e-04")


def _kn_info(quad: QuadratureSpec) -> str:
    from .spectrum import kn_reference_form

    p = BlackHoleParams(1.0, 0.6, 0.3, 1.0)
    res = kerr_newman_config(p.m, p.e, p.a, p.r0).invariant(quad)
    return (f"INFO  KN a!=0 closed form UNVERIFIED: m={p.m} e={p.e} a={p.a} r0={p.r0} "
            f"numeric equatorial (r,t) cycle={res.value:.10g} reference form={kn_reference_form(p.m, p.e, p.a, p.r0):.10g}")


def verify(points: Optional[int] = None, out=None) -> int:
    """Run the oracle suite, print one PASS/FAIL line per check.

    Returns 0 if all pass, 2 if any check failed to converge, 1 otherwise.
    """
    out = out or sys.stdout
    quad = QuadratureSpec(points_per_axis=points) if points else QuadratureSpec()
    t0 = time.perf_counter()
    checks = []
    for c in _verify_checks(quad):
        checks.append(c)
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}", file=out, flush=True)
    print(_kn_info(quad), file=out)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed in {time.perf_counter() - t0:.1f} s", file=out)
    if not failed:
        return EXIT_OK
    return EXIT_FLAGGED if any(not c.converged for c in checks) else EXIT_ERROR


# ---------------------------------------------------------------------------
# entry points


def run(path: str) -> int:
    """Execute the task of a run file."""
    cfg = load_config(path)
    if cfg.sweep:
        raise ParseError("sweep section found; use 'topospec sweep'", key="sweep", line=cfg.lines.get(("sweep",)))
    if cfg.task is None:
        raise ParseError("required key missing", key="task")
    if cfg.task == "verify":
        return verify(cfg.quadrature.points_per_axis)
    return {"integrate": task_integrate, "spectrum": task_spectrum, "curve": task_curve,
            "dim": task_dim}[cfg.task](cfg)


def _parse_params(items) -> dict:
    out = {}
    for it in items or ():
        k, sep, v = it.partition("=")
        if not sep:
            raise ParseError(f"expected name=value, got '{it}'")
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise ParseError(f"parameter {k} is not a number: '{v}'", key=k) from None
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="topospec", description="Topological invariants and spectra of classical configurations.")
    ap.add_argument("--version", action="version", version=f"topospec {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run the task in a YAML file")
    p.add_argument("config")
    p = sub.add_parser("sweep", help="factorial parameter sweep from a YAML file")
    p.add_argument("config")
    p = sub.add_parser("verify", help="run the built-in oracle suite")
    p.add_argument("--points", type=int, default=None, help="override quadrature points per axis")
    p = sub.add_parser("list", help="list catalog configurations and parameters")
    p.add_argument("--json", action="store_true")
    p = sub.add_parser("dim", help="bundle dimension of a configuration")
    p.add_argument("config", help="catalog name or YAML file")
    p.add_argument("--param", "-p", action="append", metavar="NAME=VALUE")
    return ap


def _list(as_json: bool) -> int:
    listing = catalog_listing()
    if as_json:
        print(json.dumps(_json_value(listing), indent=2, sort_keys=True))
        return EXIT_OK
    for name, entry in listing.items():
        print(f"{name}: {entry['description']}")
        for pname, s in entry["params"].items():
            lb = "(" if s["lo_open"] else "["
            rb = ")" if s["hi_open"] else "]"
            default = "" if s["default"] is None else f", default {s['default']}"
            print(f"    {pname} in {lb}{s['lo']}, {s['hi']}{rb}{default}  {s['doc']}")
    return EXIT_OK


def _dim(target: str, params) -> int:
    if os.path.isfile(target):
        cfg = load_config(target)
        if cfg.name is None:
            raise ParseError("dim needs a configuration section", key="configuration")
        cfg.output_path = None
    else:
        cfg = RunConfig(name=target, params=_parse_params(params))
    return task_dim(cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return run(args.config)
        if args.command == "sweep":
            return sweep(load_config(args.config))
        if args.command == "verify":
            return verify(args.points)
        if args.command == "list":
            return _list(args.json)
        return _dim(args.config, args.param)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except TopoSpecError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        for cls, code in EXIT_CODES:
            if isinstance(exc, cls):
                return code
        return EXIT_CODES[-1][1]
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
