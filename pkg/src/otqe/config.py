"""Run configuration: INI-style text files parsed with :mod:`configparser`.

Example::

    [slab]
    thickness = 0.01        ; um
    eps_inf = 6.7

    [qubits]
    z1 = 1.0
    z2 = 1.28
    r12 = 0.25
    dipole1 = 0 0 1
    omega = 0.3             ; in units of omega_r unless omega_unit = rad/s

    [environment]
    T_W = 30
    T_M = 1300

    [sweep]
    axis1 = z2 1.0 1.6 40 linear
    axis2 = T_M 300 2000 40 linear
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .analytics import thermal_state
from .correlators import EnvTemperatures, QubitPair
from .slab_optics import SlabModel
from .states import XState

SWEEPABLE = ("z1", "z2", "r12", "T_W", "T_M", "thickness", "omega", "eps_inf", "gamma")
GEOMETRY_KEYS = ("z1", "z2", "r12", "thickness", "omega", "eps_inf", "gamma")
LAMBDA_METHODS = ("pv", "green", "free", "none")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {self.name!r}; choose from {SWEEPABLE}")
        if self.count < 1:
            raise ConfigError("sweep counts must be >= 1")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"unknown axis scale {self.scale!r}")
        if self.scale == "log" and min(self.lo, self.hi) <= 0:
            raise ConfigError("log axes need positive bounds")

    def values(self):
        if self.count == 1:
            return np.array([self.lo])
        if self.scale == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class Point:
    """One fully specified parameter point."""

    z1: float = 1.0
    z2: float = 1.0
    r12: float = 0.25
    T_W: float = 30.0
    T_M: float = 1200.0
    thickness: float = 0.01
    omega: float = 0.3
    eps_inf: float = 6.7
    gamma: float = 0.9e12
    omega_r: float = 1.495e14
    omega_p: float = 1.787e14
    omega_absolute: bool = False
    dipole1: tuple = (0.0, 0.0, 1.0)
    dipole2: tuple = (0.0, 0.0, 1.0)
    slab_absent: bool = False

    def slab(self):
        if self.slab_absent:
            return SlabModel.vacuum()
        return SlabModel(self.thickness, self.omega_r, self.omega_p, self.eps_inf, self.gamma)

    @property
    def omega_rad(self):
        return self.omega if self.omega_absolute else self.omega * self.omega_r

    def qubits(self):
        return QubitPair.planar(self.omega_rad, self.z1, self.z2, self.r12,
                                self.dipole1, self.dipole2)

    def temperatures(self):
        return EnvTemperatures(self.T_W, self.T_M)

    def geometry_key(self):
        return dataclasses.replace(self, T_W=0.0, T_M=0.0)

    def with_values(self, **kw):
        return dataclasses.replace(self, **kw)

    def validate(self):
        self.slab()
        self.qubits()
        self.temperatures()
        return self


@dataclass(frozen=True)
class Numerics:
    tol: float = 1e-8
    lambda_method: str = "pv"
    lambda_doublings: int = 1
    lambda_rtol: float = 1e-4
    horizon: float = 1e4
    n_points: int = 401
    method: str = "expm"
    eq_threshold: float = 1e-6

    def __post_init__(self):
        if self.lambda_method not in LAMBDA_METHODS:
            raise ConfigError(f"lambda method must be one of {LAMBDA_METHODS}")
        if self.method not in ("expm", "rk"):
            raise ConfigError("evolution method must be expm or rk")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")


@dataclass(frozen=True)
class RunConfig:
    base: Point = Point()
    numerics: Numerics = Numerics()
    axes: tuple = ()
    initial_states: tuple = ("antisymmetric", "symmetric", "thermal(30)")
    variants: tuple = ()
    random_variants: int = 0
    ratios: tuple = (1e-6, 1e6, 20)
    workers: int = 1
    out: str = "results"
    seed: int = 0
    source: str = field(default="", compare=False)

    def digest(self):
        """Hash of everything that affects results (not workers, paths or comments)."""
        key = dataclasses.replace(self, source="", workers=1, out="")
        return hashlib.sha256(repr(key).encode()).hexdigest()[:16]

    def with_overrides(self, *, workers=None, out=None, tol=None, seed=None):
        kw = {}
        if workers is not None:
            kw["workers"] = int(workers)
        if out is not None:
            kw["out"] = str(out)
        if seed is not None:
            kw["seed"] = int(seed)
        if tol is not None:
            kw["numerics"] = dataclasses.replace(self.numerics, tol=float(tol))
        return dataclasses.replace(self, **kw)

    def grid(self):
        """Points of the sweep, outer axis major, with their axis values."""
        if not self.axes:
            return [((), self.base)]
        mesh = np.meshgrid(*[a.values() for a in self.axes], indexing="ij")
        flat = [m.ravel() for m in mesh]
        names = [a.name for a in self.axes]
        return [(tuple(float(v[i]) for v in flat),
                 self.base.with_values(**{n: float(v[i]) for n, v in zip(names, flat)}))
                for i in range(flat[0].size)]

    def validate(self):
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate sweep axis")
        for corner in _corners(self):
            try:
                corner.validate()
            except ValueError as exc:
                raise ConfigError(f"invalid parameters {corner}: {exc}") from exc
        for label in self.initial_states:
            initial_state(label, self.base)
        return self


def _corners(cfg):
    pts = [cfg.base]
    for a in cfg.axes:
        pts = [p.with_values(**{a.name: v}) for p in pts for v in (a.lo, a.hi)]
    return pts


_XSTATE = re.compile(r"xstate\(([^)]*)\)$")
_THERMAL = re.compile(r"thermal\(([^)]*)\)$")


def initial_state(label, point: Point) -> XState:
    """Resolve ``antisymmetric | symmetric | ground | thermal(T) | xstate(...)``."""
    label = label.strip().lower()
    if label == "antisymmetric":
        return XState.antisymmetric()
    if label == "symmetric":
        return XState.symmetric()
    if label == "ground":
        return XState.ground()
    m = _THERMAL.match(label)
    if m:
        return thermal_state(point.omega_rad, float(m.group(1)))
    m = _XSTATE.match(label)
    if m:
        vals = [float(v) for v in m.group(1).replace(",", " ").split()]
        if len(vals) != 8:
            raise ConfigError("xstate(...) needs 8 numbers")
        try:
            return XState.from_vector(vals).validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown initial state {label!r}")


# -- parsing --------------------------------------------------------------------------

def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _point_from(section, base: Point) -> Point:
    kw = {}
    for key in ("z1", "z2", "r12", "T_W", "T_M", "thickness", "omega", "eps_inf",
                "gamma", "omega_r", "omega_p"):
        if key in section:
            kw[key] = section.getfloat(key)
    if "omega_unit" in section:
        unit = section["omega_unit"].strip()
        if unit not in ("omega_r", "rad/s"):
            raise ConfigError("omega_unit must be omega_r or rad/s")
        kw["omega_absolute"] = unit == "rad/s"
    for key in ("dipole1", "dipole2"):
        if key in section:
            d = np.array(_floats(section[key]))
            if d.size != 3 or not np.linalg.norm(d) > 0:
                raise ConfigError(f"{key} must be a non-zero 3-vector")
            kw[key] = tuple((d / np.linalg.norm(d)).tolist())
    if "absent" in section:
        kw["slab_absent"] = section.getboolean("absent")
    return base.with_values(**kw)


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    merged = configparser.ConfigParser()
    merged.optionxform = str
    merged.read_dict({"all": {}})
    flat = merged["all"]
    for name in ("slab", "qubits", "environment"):
        if cp.has_section(name):
            for k, v in cp[name].items():
                flat[k] = v
    try:
        base = _point_from(flat, Point())
        kw = {}
        if cp.has_section("numerics"):
            sec = cp["numerics"]
            num = {}
            for key, conv in (("tol", float), ("lambda_method", str), ("lambda_doublings", int),
                              ("lambda_rtol", float), ("horizon", float), ("n_points", int),
                              ("method", str), ("eq_threshold", float)):
                if key in sec:
                    num[key] = conv(sec[key].strip())
            kw["numerics"] = Numerics(**num)
        if cp.has_section("sweep"):
            axes = []
            for key in sorted(cp["sweep"]):
                parts = cp["sweep"][key].split()
                if len(parts) not in (4, 5):
                    raise ConfigError(f"axis {key!r}: expected 'name min max count [scale]'")
                axes.append(SweepAxis(parts[0], float(parts[1]), float(parts[2]),
                                      int(parts[3]), *parts[4:]))
            kw["axes"] = tuple(axes)
        if cp.has_section("initial"):
            kw["initial_states"] = tuple(
                s.strip() for s in re.split(r",\s*(?![^()]*\))", cp["initial"]["states"]) if s.strip())
        variants = []
        for name in cp.sections():
            if name.startswith("variant"):
                variants.append(_point_from(cp[name], base))
        kw["variants"] = tuple(variants)
        if cp.has_section("eqcheck"):
            kw["random_variants"] = cp["eqcheck"].getint("random_variants", 0)
        if cp.has_section("cmax"):
            lo, hi, count = _floats(cp["cmax"]["ratios"])
            kw["ratios"] = (lo, hi, int(count))
        if cp.has_section("run"):
            sec = cp["run"]
            if "workers" in sec:
                kw["workers"] = sec.getint("workers")
            if "out" in sec:
                kw["out"] = sec["out"].strip()
            if "seed" in sec:
                kw["seed"] = sec.getint("seed")
        cfg = RunConfig(base=base, source=text, **kw)
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
