"""Physical constants, unit handling and link-budget primitives.

Everything inside the package works in linear SI units (m, Hz, W, rad).
Decibel quantities are only accepted at the configuration boundary through
:func:`parse_quantity`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, replace

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# flat-top UAV antenna: main-lobe gain G0 / Phi_U**2, sidelobe gain g0
ANTENNA_G0 = 30000.0 / 2**2 * (math.pi / 180.0) ** 2
ANTENNA_SIDELOBE = 0.0


class ConfigError(ValueError):
    """Raised for malformed or out-of-range configuration values."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def dbm_to_watt(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


@dataclass(frozen=True)
class AntennaPattern:
    G0: float = ANTENNA_G0
    g0: float = field(default=ANTENNA_SIDELOBE, init=False)

    def main_lobe_gain(self, half_beamwidth):
        half_beamwidth = np.asarray(half_beamwidth, dtype=float)
        if np.any(half_beamwidth <= 0) or np.any(half_beamwidth >= math.pi / 2):
            raise ValueError("half beamwidth must lie in (0, pi/2)")
        return self.G0 / half_beamwidth**2

    def gain(self, azimuth, elevation, half_beamwidth):
        inside = (np.abs(azimuth) <= half_beamwidth) & (np.abs(elevation) <= half_beamwidth)
        return np.where(inside, self.G0 / half_beamwidth**2, self.g0)


@dataclass(frozen=True)
class SystemParams:
    """Immutable system constants, linear SI units.

    Defaults reproduce the numerical setup used for the throughput figures
    (2 GHz carrier, 10 MHz band, 1000 users/km^2, 40 dBm GBS, 20 dBm UAV).
    Derived quantities (noise power, reference gain, eta0, kappa0) are
    properties, so they always follow the stored fields.
    """

    f_c: float = 2e9
    W: float = 10e6
    N0: float = float(dbm_to_watt(-174.0))
    H_U: float = 100.0
    H_G: float = 20.0
    r_G: float = 1000.0
    G_G: float = float(db_to_linear(16.0))
    n: float = 3.0
    psi: float = math.pi / 6
    Phi_G: float = 4 * math.pi / 3
    P_U: float = float(dbm_to_watt(20.0))
    P_G: float = float(dbm_to_watt(40.0))
    lam: float = 1000e-6
    P_out_max: float = 0.01
    mu: float = 1.0

    def __post_init__(self):
        for name in ("f_c", "W", "N0", "H_U", "H_G", "r_G", "G_G", "P_U", "P_G", "lam"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be positive and finite, got {value!r}")
        if not self.n >= 2:
            raise ConfigError("n", f"path-loss exponent must be >= 2, got {self.n!r}")
        if not 0 < self.psi < math.pi:
            raise ConfigError("psi", f"must lie in (0, pi), got {self.psi!r}")
        if not 0 < self.Phi_G <= 2 * math.pi:
            raise ConfigError("Phi_G", f"must lie in (0, 2pi], got {self.Phi_G!r}")
        if not 0 < self.P_out_max < 1:
            raise ConfigError("P_out_max", f"must lie in (0, 1), got {self.P_out_max!r}")
        if not self.mu >= 1:
            raise ConfigError("mu", f"must be >= 1, got {self.mu!r}")

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def sigma2(self):
        return noise_power(self)

    @property
    def beta0(self):
        return ref_gain(self)

    # the GBS reference gain is defined identically to the UAV one
    alpha0 = beta0

    @property
    def eta0(self):
        return self.beta0 / self.sigma2

    @property
    def kappa0(self):
        return self.alpha0 * self.G_G / self.sigma2

    @property
    def outage_exponent_cap(self):
        """Largest admissible value of the outage exponent, -ln(1 - P_out_max)."""
        return -math.log1p(-self.P_out_max)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


def noise_power(params: SystemParams) -> float:
    return params.N0 * params.W


def ref_gain(params: SystemParams) -> float:
    """Free-space channel power gain at 1 m, (4 pi f_c / c)^-2."""
    return (4 * math.pi * params.f_c / SPEED_OF_LIGHT) ** -2


def uav_beam_gain(d_max, H_U):
    """Main-lobe gain when the beam just covers a ground disk of radius d_max."""
    d_max = np.asarray(d_max, dtype=float)
    if np.any(d_max <= 0):
        raise ValueError("coverage radius d_max must be positive")
    out = ANTENNA_G0 / np.arctan(d_max / H_U) ** 2
    return float(out) if out.ndim == 0 else out


def uav_channel_gain(d, params: SystemParams):
    d = np.asarray(d, dtype=float)
    out = params.beta0 / (d**2 + params.H_U**2)
    return float(out) if out.ndim == 0 else out


def gbs_avg_channel_gain(r, params: SystemParams):
    r = np.asarray(r, dtype=float)
    out = params.alpha0 * (params.H_G**2 + r**2) ** (-params.n / 2)
    return float(out) if out.ndim == 0 else out


# --- config-boundary unit parsing -----------------------------------------

_NUMBER = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"
_QUANTITY_RE = re.compile(rf"^\s*(?P<num>{_NUMBER})\s*(?P<unit>.*?)\s*$")
_PI_RE = re.compile(rf"^\s*(?P<coef>{_NUMBER})?\s*\*?\s*pi\s*(?:/\s*(?P<den>{_NUMBER}))?\s*$")

_UNITS = {
    "frequency": {"": 1.0, "hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9},
    "length": {"": 1.0, "m": 1.0, "km": 1e3},
    "power": {"": "w", "w": "w", "mw": "mw", "dbm": "dbm", "dbw": "dbw"},
    "psd": {"": "w", "w/hz": "w", "dbm/hz": "dbm", "dbw/hz": "dbw"},
    "gain": {"": "lin", "dbi": "db", "db": "db"},
    "angle": {"": 1.0, "rad": 1.0, "deg": math.pi / 180},
    "density": {"": 1.0, "/m2": 1.0, "/m^2": 1.0, "/km2": 1e-6, "/km^2": 1e-6,
                "mts/km2": 1e-6, "mts/km^2": 1e-6, "users/km2": 1e-6},
    "scalar": {"": 1.0},
}


def parse_quantity(text, kind, key="value") -> float:
    """Parse ``"20 dBm"``, ``"10 MHz"``, ``"pi/6"`` ... into a linear SI float.

    ``kind`` selects the admissible unit suffixes; an unknown suffix raises
    :class:`ConfigError` naming ``key``.
    """
    if isinstance(text, (int, float)):
        return float(text)
    text = str(text).strip()
    if kind == "angle":
        m = _PI_RE.match(text.replace(" ", ""))
        if m:
            coef = float(m["coef"]) if m["coef"] else 1.0
            den = float(m["den"]) if m["den"] else 1.0
            return coef * math.pi / den
    m = _QUANTITY_RE.match(text)
    if not m:
        raise ConfigError(key, f"cannot parse {text!r} as a number with unit")
    value = float(m["num"])
    unit = m["unit"].lower().replace(" ", "")
    table = _UNITS[kind]
    if unit not in table:
        allowed = ", ".join(repr(u) for u in table if u)
        raise ConfigError(key, f"unknown unit {m['unit']!r} for a {kind} (expected one of {allowed})")
    conv = table[unit]
    if isinstance(conv, float):
        return value * conv
    if conv == "w":
        return value
    if conv == "mw":
        return value * 1e-3
    if conv == "dbm":
        return float(dbm_to_watt(value))
    if conv == "dbw":
        return float(db_to_linear(value))
    if conv == "db":
        return float(db_to_linear(value))
    return value


PARAM_KINDS = {
    "f_c": "frequency", "W": "frequency", "N0": "psd", "H_U": "length",
    "H_G": "length", "r_G": "length", "G_G": "gain", "n": "scalar",
    "psi": "angle", "Phi_G": "angle", "P_U": "power", "P_G": "power",
    "lam": "density", "P_out_max": "scalar", "mu": "scalar",
}


def params_from_strings(values: dict, base: SystemParams | None = None) -> SystemParams:
    """Build SystemParams from ``{name: "text with unit"}``, starting at ``base``."""
    base = base or SystemParams()
    parsed = {}
    for key, text in values.items():
        name = "lam" if key == "lambda" else key
        if name not in PARAM_KINDS:
            raise ConfigError(key, "unknown system parameter")
        parsed[name] = parse_quantity(text, PARAM_KINDS[name], key)
    return base.replace(**parsed)
