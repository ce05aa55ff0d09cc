"""Run configuration: a sectioned key-value file with unit-suffixed values.

Precedence: built-in defaults < config file < ``--set section.key=value``
overrides < dedicated flags (``--seed``, ``--threads`` ...).

Example::

    [phy]
    P_U = 20 dBm
    lambda = 1000 /km2
    mu = auto

    [sweep]
    P_U = 0:30:5 dBm
    schemes = orthogonal, reuse, gbs-only
"""

from __future__ import annotations

import configparser
import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .analytic import Scheme
from .energy import EnergyParams
from .microcell import DEFAULT_R_GRID, DEFAULT_RHO_GRID
from .optimizer import SolverSettings
from .phy import PARAM_KINDS, ConfigError, SystemParams, db_to_linear, dbm_to_watt, parse_quantity

log = logging.getLogger(__name__)

_SCALAR_LIST = re.compile(r"^\s*(?P<a>[^:,]+):(?P<b>[^:,]+):(?P<c>[^:,]+?)\s*(?P<unit>[A-Za-z/^0-9]*)\s*$")


@dataclass
class SimSettings:
    realizations: int = 100
    ticks: int = 720
    V: float = 30.0
    mu_fields: int = 100


@dataclass
class MicroSettings:
    M: tuple = (1, 4, 8, 12, 16)
    realizations: int = 20
    H_micro: float = 10.0
    G_micro: float = float(db_to_linear(8.0))
    P_micro: float = float(dbm_to_watt(40.0))
    P_G: float = float(dbm_to_watt(46.0))
    d_grid: tuple | None = None   # fractions of r_G
    r_grid: tuple = DEFAULT_R_GRID
    rho_grid: tuple = DEFAULT_RHO_GRID


@dataclass
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    mu_auto: bool = True
    scheme: Scheme = Scheme.ORTHOGONAL
    design_rho: float | None = None
    design_r_I: float | None = None
    settings: SolverSettings = field(default_factory=SolverSettings)
    sim: SimSettings = field(default_factory=SimSettings)
    energy: EnergyParams = field(default_factory=EnergyParams)
    energy_rho: float = 0.5
    energy_r_I_frac: float = 0.5
    energy_P_U: float = 1.0
    micro: MicroSettings = field(default_factory=MicroSettings)
    sweep_P_U: list = field(default_factory=list)
    sweep_lambda: list = field(default_factory=list)
    sweep_schemes: tuple = (Scheme.ORTHOGONAL, Scheme.REUSE, Scheme.GBS_ONLY)
    sweep_P_G: list = field(default_factory=list)
    sweep_simulate: bool = False
    sweep_lambda_max: bool = False
    nu_min: float = 1e5
    seed: int = 0
    threads: int | None = None
    warnings: list = field(default_factory=list)


def _lines(text):
    """Map ``(section, key)`` to 1-based line numbers for error messages."""
    where, section = {}, None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
        elif "=" in line and section and not line.startswith(("#", ";")):
            where[(section, line.split("=", 1)[0].strip())] = i
    return where


def parse_list(text, kind, key):
    """Parse ``"0, 10, 20 dBm"`` or ``"0:30:5 dBm"`` into floats (SI units).

    A unit written once at the end applies to every item.
    Returns ``[(value, label), ...]`` keeping each item's text label.
    """
    text = text.strip()
    m = _SCALAR_LIST.match(text)
    if m:
        unit = m["unit"]
        try:
            a, b, c = float(m["a"]), float(m["b"]), float(m["c"])
        except ValueError as exc:
            raise ConfigError(key, f"bad range {text!r}") from exc
        if c <= 0 or b < a:
            raise ConfigError(key, f"bad range {text!r}")
        nums = np.round(np.arange(a, b + c / 2, c), 12)
        items = [f"{float(x):g} {unit}".strip() for x in nums]
    else:
        items = [t.strip() for t in text.split(",") if t.strip()]
        if items:
            tail = _QUANTITY_TAIL.match(items[-1])
            unit = tail["unit"] if tail else ""
            items = [it if not _is_bare_number(it) else f"{it} {unit}".strip() for it in items]
    if not items:
        raise ConfigError(key, "empty list")
    return [(parse_quantity(it, kind, key), it) for it in items]


_QUANTITY_TAIL = re.compile(r"^\s*[-+0-9.eE]+\s*(?P<unit>.*?)\s*$")


def _is_bare_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def _bool(text, key):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {text!r}")


def _int(text, key, minimum=None):
    try:
        v = int(text)
    except ValueError as exc:
        raise ConfigError(key, f"expected an integer, got {text!r}") from exc
    if minimum is not None and v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")
    return v


def _float(text, key):
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(key, f"expected a number, got {text!r}") from exc


SECTIONS = {
    "phy": set(PARAM_KINDS) | {"lambda"},
    "run": {"scheme", "rho", "r_I", "nu_min"},
    "optimizer": {"nu_tol", "rho_tol", "r_I_grid", "r_I_refine"},
    "montecarlo": {"realizations", "ticks", "V", "mu_fields", "seed"},
    "energy": {"c1", "c2", "g", "rho", "r_I", "P_U"},
    "microcell": {"M", "realizations", "H_micro", "G_micro", "P_micro", "P_G", "d_grid", "r_grid", "rho_grid"},
    "sweep": {"P_U", "lambda", "P_G", "schemes", "simulate", "lambda_max"},
    "output": {"threads"},
}

# keys that only matter for some schemes; reported when set but unused
_UAV_ONLY = {("phy", "psi"), ("phy", "Phi_G"), ("phy", "H_U"), ("phy", "P_U"), ("run", "rho")}


def load_config(text: str | None = None, overrides=(), source="<config>") -> RunConfig:
    """Build a :class:`RunConfig` from file text plus ``section.key=value`` overrides."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    lines = {}
    if text:
        try:
            cp.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(source, str(exc).splitlines()[0]) from exc
        lines = _lines(text)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(item, "override must look like section.key=value")
        lhs, value = item.split("=", 1)
        section, key = lhs.strip().split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key.strip(), value.strip())

    def name(section, key):
        line = lines.get((section, key))
        return f"{source}:{line}: [{section}] {key}" if line else f"[{section}] {key}"

    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(f"[{section}]", "unknown section")
        for key in cp[section]:
            if key not in SECTIONS[section]:
                raise ConfigError(name(section, key), "unknown key")

    cfg = RunConfig()
    get = lambda s, k: cp.get(s, k) if cp.has_option(s, k) else None  # noqa: E731

    phy_values = {}
    for key in SECTIONS["phy"]:
        v = get("phy", key)
        if v is None:
            continue
        if key == "mu":
            if v.strip().lower() == "auto":
                continue
            cfg.mu_auto = False
        pname = "lam" if key == "lambda" else key
        phy_values[pname] = parse_quantity(v, PARAM_KINDS[pname], name("phy", key))
    try:
        cfg.params = SystemParams().replace(**phy_values)
    except ConfigError as exc:
        raise ConfigError(name("phy", "lambda" if exc.key == "lam" else exc.key), str(exc).split(": ", 1)[1]) from exc

    if (v := get("run", "scheme")) is not None:
        try:
            cfg.scheme = Scheme(v.strip())
        except ValueError as exc:
            raise ConfigError(name("run", "scheme"), f"unknown scheme {v!r}") from exc
    if (v := get("run", "rho")) is not None:
        cfg.design_rho = parse_quantity(v, "scalar", name("run", "rho"))
    if (v := get("run", "r_I")) is not None:
        cfg.design_r_I = parse_quantity(v, "length", name("run", "r_I"))
    if (v := get("run", "nu_min")) is not None:
        cfg.nu_min = _bitrate(v, name("run", "nu_min"))

    opt = {}
    for key in ("nu_tol", "rho_tol"):
        if (v := get("optimizer", key)) is not None:
            opt[key] = _float(v, name("optimizer", key))
    if (v := get("optimizer", "r_I_grid")) is not None:
        opt["r_I_grid"] = _int(v, name("optimizer", "r_I_grid"), 3)
    if (v := get("optimizer", "r_I_refine")) is not None:
        opt["r_I_refine"] = _bool(v, name("optimizer", "r_I_refine"))
    try:
        cfg.settings = SolverSettings(**opt)
    except ValueError as exc:
        raise ConfigError("[optimizer]", str(exc)) from exc

    if (v := get("montecarlo", "realizations")) is not None:
        cfg.sim.realizations = _int(v, name("montecarlo", "realizations"), 1)
    if (v := get("montecarlo", "ticks")) is not None:
        cfg.sim.ticks = _int(v, name("montecarlo", "ticks"), 1)
    if (v := get("montecarlo", "mu_fields")) is not None:
        cfg.sim.mu_fields = _int(v, name("montecarlo", "mu_fields"), 1)
    if (v := get("montecarlo", "V")) is not None:
        cfg.sim.V = _speed(v, name("montecarlo", "V"))
    if (v := get("montecarlo", "seed")) is not None:
        cfg.seed = _int(v, name("montecarlo", "seed"), 0)

    ep = {}
    for key in ("c1", "c2", "g"):
        if (v := get("energy", key)) is not None:
            ep[key] = _float(v, name("energy", key))
    cfg.energy = EnergyParams(**ep)
    if (v := get("energy", "rho")) is not None:
        cfg.energy_rho = _float(v, name("energy", "rho"))
    if (v := get("energy", "r_I")) is not None:
        cfg.energy_r_I_frac = _float(v, name("energy", "r_I"))
    if (v := get("energy", "P_U")) is not None:
        cfg.energy_P_U = parse_quantity(v, "power", name("energy", "P_U"))

    mc = cfg.micro
    if (v := get("microcell", "M")) is not None:
        mc.M = tuple(int(x) for x, _ in parse_list(v, "scalar", name("microcell", "M")))
    if (v := get("microcell", "realizations")) is not None:
        mc.realizations = _int(v, name("microcell", "realizations"), 1)
    for key, kind in (("H_micro", "length"), ("G_micro", "gain"), ("P_micro", "power"), ("P_G", "power")):
        if (v := get("microcell", key)) is not None:
            setattr(mc, key, parse_quantity(v, kind, name("microcell", key)))
    if (v := get("microcell", "d_grid")) is not None:
        mc.d_grid = tuple(x for x, _ in parse_list(v, "scalar", name("microcell", "d_grid")))
    if (v := get("microcell", "r_grid")) is not None:
        mc.r_grid = tuple(x for x, _ in parse_list(v, "length", name("microcell", "r_grid")))
    if (v := get("microcell", "rho_grid")) is not None:
        mc.rho_grid = tuple(x for x, _ in parse_list(v, "scalar", name("microcell", "rho_grid")))

    if (v := get("sweep", "P_U")) is not None:
        cfg.sweep_P_U = parse_list(v, "power", name("sweep", "P_U"))
    if (v := get("sweep", "lambda")) is not None:
        cfg.sweep_lambda = parse_list(v, "density", name("sweep", "lambda"))
    if (v := get("sweep", "P_G")) is not None:
        cfg.sweep_P_G = parse_list(v, "power", name("sweep", "P_G"))
    if (v := get("sweep", "lambda_max")) is not None:
        cfg.sweep_lambda_max = _bool(v, name("sweep", "lambda_max"))
    if (v := get("sweep", "schemes")) is not None:
        try:
            cfg.sweep_schemes = tuple(Scheme(s.strip()) for s in v.split(",") if s.strip())
        except ValueError as exc:
            raise ConfigError(name("sweep", "schemes"), str(exc)) from exc
        if not cfg.sweep_schemes:
            raise ConfigError(name("sweep", "schemes"), "empty list")
    if (v := get("sweep", "simulate")) is not None:
        cfg.sweep_simulate = _bool(v, name("sweep", "simulate"))

    if (v := get("output", "threads")) is not None:
        cfg.threads = _int(v, name("output", "threads"), 1)

    if cfg.scheme is Scheme.GBS_ONLY:
        for s, k in _UAV_ONLY:
            if cp.has_option(s, k):
                cfg.warnings.append(f"{name(s, k)} is unused by scheme gbs-only")
    if cfg.params.Phi_G + cfg.params.psi > 2 * math.pi:
        raise ConfigError(name("phy", "Phi_G"), "Phi_G + psi must not exceed 2 pi (GBS sector would overlap the UAV segment)")
    return cfg


_RATE_UNITS = {"": 1.0, "bps": 1.0, "kbps": 1e3, "mbps": 1e6}
_SPEED_UNITS = {"": 1.0, "m/s": 1.0, "km/h": 1 / 3.6}


def _bitrate(text, key):
    return _with_units(text, _RATE_UNITS, key, "bit rate")


def _speed(text, key):
    return _with_units(text, _SPEED_UNITS, key, "speed")


def _with_units(text, table, key, what):
    m = re.match(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?\d+)?)\s*(.*?)\s*$", text)
    if not m or m[2].lower() not in table:
        raise ConfigError(key, f"cannot parse {text!r} as a {what}")
    return float(m[1]) * table[m[2].lower()]
