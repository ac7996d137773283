"""Batch operations behind the command line: maps, traces, checks, tables.

Every CSV written here starts with ``#``-prefixed metadata lines followed by
a header row; floats are written with ``repr`` so payloads are bitwise
reproducible and independent of the worker count.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import cmax_scan, concurrence_x, thermal_state
from .config import GEOMETRY_KEYS, Point, RunConfig, initial_state
from .correlators import PAIRS, alpha_pair, free_shift, gamma_rates, lambda_shift
from .dynamics import DegenerateGenerator, evolve, steady_state
from .quadrature import QuadratureError
from .states import XState

ALPHA_M_NOTE = ("alpha_M term list: slab emission bracket on upgoing modes only, "
                "evanescent part 2 Im r_p; fixed by hermiticity, the vacuum sum rule "
                "and the Im G equilibrium identity")

MAP_STATE_COLUMNS = ("C", "K1", "rho11", "rho22", "rho33", "rho44",
                     "Re_rho23", "Im_rho23", "Re_rho14", "Im_rho14", "lambda12", "status")


class EquilibriumViolation(AssertionError):
    """Steady states at equal temperatures are not the universal thermal state."""


def metadata_lines(cfg: RunConfig, **extra):
    b, n = cfg.base, cfg.numerics
    lines = [
        f"artifact otqe {__version__}",
        f"config_digest {cfg.digest()}",
        ALPHA_M_NOTE,
        f"eps_inf {b.eps_inf!r} gamma_d {b.gamma!r} rad/s",
        f"tol {n.tol!r} lambda_method {n.lambda_method} lambda_doublings {n.lambda_doublings} "
        f"lambda_rtol {n.lambda_rtol!r}",
    ]
    lines += [f"{k} {v}" for k, v in extra.items()]
    return lines


def write_csv(path, header_lines, columns, rows):
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


# -- per-geometry work ------------------------------------------------------------------

@dataclass
class GeometryResult:
    alphas: object = None
    lambda12: float = float("nan")
    status: str = "ok"
    message: str = ""


def geometry_response(point: Point, numerics) -> GeometryResult:
    """Alphas and coherent coupling for one geometry (temperature independent)."""
    slab, qubits = point.slab(), point.qubits()
    try:
        alphas = alpha_pair(slab, qubits, tol=numerics.tol)
    except QuadratureError as exc:
        return GeometryResult(status="non-converged", message=str(exc))
    status = "ok"
    method = numerics.lambda_method
    if method == "none":
        lam = None
    elif method == "free":
        lam = free_shift(qubits)
    else:
        res = lambda_shift(slab, qubits, method=method, max_doublings=numerics.lambda_doublings,
                           rtol=numerics.lambda_rtol, tol=numerics.tol)
        lam = res.value
        if not res.converged:
            status = "non-converged"
    return GeometryResult(alphas, lam, status)


def _steady_row(point: Point, geo: GeometryResult):
    nan = [float("nan")] * 10
    if geo.alphas is None:
        return nan + [float("nan"), geo.status]
    rates = gamma_rates(geo.alphas, point.temperatures(), point.qubits(), geo.lambda12)
    try:
        st = steady_state(rates)
    except DegenerateGenerator:
        return nan + [rates.lambda12, "degenerate"]
    c = concurrence_x(st)
    return [c.C, c.K1, *st.vector().tolist(), rates.lambda12, geo.status]


def _map_task(args):
    geometry, members, numerics = args
    geo = geometry_response(geometry, numerics)
    return [(idx, _steady_row(pt, geo)) for idx, pt in members]


def _group_by_geometry(points):
    groups = {}
    for idx, (_, pt) in enumerate(points):
        groups.setdefault(pt.geometry_key(), []).append((idx, pt))
    return list(groups.items())


def _run_tasks(fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# -- operations ----------------------------------------------------------------------------

@dataclass
class MapResult:
    axes: tuple
    rows: list
    text: str
    path: Path | None = None

    def column(self, name):
        cols = [a.name for a in self.axes] + list(MAP_STATE_COLUMNS)
        j = cols.index(name)
        return np.array([r[j] for r in self.rows])


def run_map(cfg: RunConfig, write=True) -> MapResult:
    """Steady states over a two-axis sweep (outer axis major)."""
    if len(cfg.axes) != 2:
        raise ValueError("map needs exactly two sweep axes")
    cfg.validate()
    points = cfg.grid()
    tasks = [(g, members, cfg.numerics) for g, members in _group_by_geometry(points)]
    results = dict(itertools.chain.from_iterable(_run_tasks(_map_task, tasks, cfg.workers)))
    rows = [[*points[i][0], *results[i]] for i in range(len(points))]
    columns = [a.name for a in cfg.axes] + list(MAP_STATE_COLUMNS)
    axes_desc = "; ".join(f"{a.name} {a.lo!r}..{a.hi!r} x{a.count} {a.scale}" for a in cfg.axes)
    path = Path(cfg.out) / "map.csv" if write else None
    text = write_csv(path, metadata_lines(cfg, axes=axes_desc), columns, rows)
    return MapResult(cfg.axes, rows, text, path)


def _label_slug(label):
    return "".join(ch if ch.isalnum() else "_" for ch in label).strip("_")


def run_trace(cfg: RunConfig, write=True):
    """One trajectory per configured initial state, on a common time grid."""
    if not cfg.initial_states:
        raise ValueError("trace needs at least one initial state")
    cfg.validate()
    geo = geometry_response(cfg.base, cfg.numerics)
    if geo.alphas is None:
        raise RuntimeError(geo.message)
    rates = gamma_rates(geo.alphas, cfg.base.temperatures(), cfg.base.qubits(), geo.lambda12)
    n = cfg.numerics
    out = {}
    for label in cfg.initial_states:
        rho0 = initial_state(label, cfg.base)
        traj = evolve(rho0, rates, n.horizon, n_points=n.n_points, method=n.method)
        header = metadata_lines(cfg, initial_state=label, rates_digest=rates.digest(),
                                lambda12=repr(rates.lambda12), status=geo.status)
        path = Path(cfg.out) / f"trace_{_label_slug(label)}.csv" if write else None
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
        traj.to_csv(path, header)
        out[label] = traj
    return out


DEFAULT_VARIANTS = (
    {},
    {"z2": 1.28},
    {"z1": 0.5, "z2": 2.0, "r12": 1.0},
    {"thickness": 0.1, "r12": 0.1},
    {"dipole1": (1.0, 0.0, 0.0), "dipole2": (1.0, 0.0, 0.0), "z2": 0.7},
)


@dataclass
class EquilibriumReport:
    temperature: float
    max_pairwise: float
    max_vs_thermal: float
    concurrences: list = field(default_factory=list)
    variants: list = field(default_factory=list)
    statuses: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c == 0.0 for c in self.concurrences)

    def lines(self):
        out = [f"T = {self.temperature!r} K",
               f"variants = {len(self.variants)}",
               f"max pairwise deviation = {self.max_pairwise!r}",
               f"max deviation from thermal state = {self.max_vs_thermal!r}",
               f"concurrences = {self.concurrences!r}",
               f"statuses = {self.statuses!r}"]
        return out


def _eq_task(args):
    point, numerics = args
    geo = geometry_response(point, numerics)
    if geo.alphas is None:
        return None, geo.status
    rates = gamma_rates(geo.alphas, point.temperatures(), point.qubits(), geo.lambda12)
    return steady_state(rates).vector(), geo.status


def equilibrium_variants(cfg: RunConfig):
    base = cfg.base.with_values(T_M=cfg.base.T_W)
    variants = list(cfg.variants) or [base.with_values(**v) for v in DEFAULT_VARIANTS]
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.random_variants):
        z1, z2 = rng.uniform(0.3, 3.0, size=2)
        variants.append(base.with_values(z1=float(z1), z2=float(z2),
                                         r12=float(rng.uniform(0.05, 2.0)),
                                         thickness=float(rng.uniform(0.005, 0.5))))
    return [v.with_values(T_W=base.T_W, T_M=base.T_W) for v in variants]


def run_equilibrium_check(cfg: RunConfig, write=True) -> EquilibriumReport:
    """Equal-temperature steady states across geometry variants.

    Raises :class:`EquilibriumViolation` when the maximum deviation exceeds
    the configured threshold or any steady state carries concurrence.
    """
    if cfg.base.T_W != cfg.base.T_M:
        raise ValueError("equilibrium check needs T_W = T_M")
    cfg.validate()
    variants = equilibrium_variants(cfg)
    omegas = {v.omega_rad for v in variants}
    if len(omegas) != 1:
        raise ValueError("variants must share the transition frequency")
    results = _run_tasks(_eq_task, [(v, cfg.numerics) for v in variants], cfg.workers)
    vecs = [r[0] for r in results]
    statuses = [r[1] for r in results]
    if any(v is None for v in vecs):
        raise EquilibriumViolation(f"variant evaluation failed: {statuses}")
    T = cfg.base.T_W
    ref = thermal_state(omegas.pop(), T).vector()
    pair = max((float(np.max(np.abs(a - b))) for a, b in itertools.combinations(vecs, 2)),
               default=0.0)
    vs = max(float(np.max(np.abs(v - ref))) for v in vecs)
    conc = [concurrence_x(XState.from_vector(v)).C for v in vecs]
    report = EquilibriumReport(T, pair, vs, conc, variants, statuses)
    if write:
        path = Path(cfg.out) / "eqcheck.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(f"# {l}\n" for l in metadata_lines(cfg))
                        + "\n".join(report.lines()) + "\n", encoding="utf-8")
    threshold = cfg.numerics.eq_threshold
    if max(pair, vs) > threshold or not report.passed:
        raise EquilibriumViolation("\n".join(report.lines()))
    return report


def _cmax_task(ratio):
    return cmax_scan(ratio)


def run_cmax(cfg: RunConfig, write=True):
    lo, hi, count = cfg.ratios
    ratios = np.logspace(math.log10(lo), math.log10(hi), int(count)) if count > 1 else [lo]
    results = _run_tasks(_cmax_task, [float(r) for r in ratios], cfg.workers)
    rows = [[r.ratio, r.c_max, r.n_a, r.n_s, "ok" if r.converged else "non-converged"]
            for r in results]
    path = Path(cfg.out) / "cmax.csv" if write else None
    write_csv(path, metadata_lines(cfg), ("ratio", "C_max", "n_A", "n_S", "status"), rows)
    return results


def _alpha_task(args):
    point, numerics = args
    try:
        return alpha_pair(point.slab(), point.qubits(), tol=numerics.tol), "ok"
    except QuadratureError:
        return None, "non-converged"


def run_alphas(cfg: RunConfig, write=True):
    """Tabulate alpha_W and alpha_M for every distinct geometry of the sweep."""
    cfg.validate()
    geo_axes = [a for a in cfg.axes if a.name in GEOMETRY_KEYS]
    sub = RunConfig(base=cfg.base, numerics=cfg.numerics, axes=tuple(geo_axes))
    points = sub.grid()
    results = _run_tasks(_alpha_task, [(p, cfg.numerics) for _, p in points], cfg.workers)
    rows = []
    for (vals, _), (alphas, status) in zip(points, results):
        for src in ("W", "M"):
            for q, qq in PAIRS:
                v = (complex("nan") if alphas is None
                     else complex((alphas.wall if src == "W" else alphas.slab)[q, qq]))
                rows.append([*vals, q + 1, qq + 1, src, v.real, v.imag, status])
    columns = [a.name for a in geo_axes] + ["q", "qp", "source", "re", "im", "status"]
    path = Path(cfg.out) / "alphas.csv" if write else None
    write_csv(path, metadata_lines(cfg), columns, rows)
    return rows
