"""Physical configuration of the rotating-ion flow and its derived scales.

Everything downstream consumes a validated :class:`PhysicalConfig`.  The unit
system is natural (hbar = k_B = 1 by default) but both constants are carried
explicitly so expressions with literal hbar**2 or k_B**2 factors evaluate
as written.

Configuration documents are flat key-value text, one ``key = value`` pair per
line, ``#`` comments allowed.  Numbers may be decimal or scientific.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

TWO_PI = 2.0 * math.pi

# Keys owned by this module.
_PHYSICAL_KEYS = {
    "n_ions", "period", "radius", "ion_mass", "ion_charge",
    "v_min", "v_max", "gamma1", "gamma2", "theta_h", "hbar", "k_boltzmann",
}
# Keys owned by other loaders (environment, line profile) that may share a document.
_FOREIGN_KEYS = {
    "gamma", "coupling_eff", "cutoff", "cutoff_shape", "bath_temperature",
    "line_a", "line_kappa", "line_tau",
}
_OPTIONAL_DEFAULTS = {"hbar": 1.0, "k_boltzmann": 1.0}


@dataclass(frozen=True)
class PhysicalConfig:
    """Ring-trap flow parameters.

    v_min/v_max are the post-collapse profile extrema; at t = 0 the flow is
    uniform at 2*pi/period and relaxes onto these over the collapse time.
    """

    n_ions: int
    period: float
    radius: float
    ion_mass: float
    ion_charge: float
    v_min: float
    v_max: float
    gamma1: float
    gamma2: float
    theta_h: float
    hbar: float = 1.0
    k_boltzmann: float = 1.0

    def __post_init__(self):
        _validate(self)

    @property
    def mean_velocity(self) -> float:
        """Uniform pre-collapse velocity 2*pi/T (one revolution per period)."""
        return TWO_PI / self.period


@dataclass(frozen=True)
class DerivedParams:
    """Scales derived from a PhysicalConfig at a reference velocity."""

    delta: float        # mean ion separation 2*pi/N
    rho: float          # conformal factor m R^2 N / (v_ref T)
    tau: float          # collapse time 0.05 T
    omega_max: float    # frequency ceiling N/T
    delta_v: float      # v_max - v_min
    sigma_v: float      # v_max + v_min
    kappa: float        # line-profile gradient delta_v / (2 a)


def _positive(name, value):
    if not (value > 0):
        raise ConfigError(f"{name} must be positive, got {value!r}")


def _validate(cfg: PhysicalConfig):
    if cfg.n_ions < 2:
        raise ConfigError(f"n_ions must be at least 2, got {cfg.n_ions}")
    for name in ("period", "radius", "ion_mass", "gamma1", "gamma2",
                 "hbar", "k_boltzmann"):
        _positive(name, getattr(cfg, name))
    if cfg.ion_charge == 0:
        raise ConfigError("ion_charge must be nonzero")
    if cfg.v_min > cfg.v_max:
        raise ConfigError("profile extrema inverted: "
                          f"v_min={cfg.v_min!r} > v_max={cfg.v_max!r}")
    v_bar = TWO_PI / cfg.period
    if not (cfg.v_min < v_bar < cfg.v_max):
        raise ConfigError(
            "v_min/v_max must straddle the revolution speed 2*pi/period: "
            f"need v_min < {v_bar:.6g} < v_max, got ({cfg.v_min:.6g}, {cfg.v_max:.6g})")
    if not (0 < cfg.theta_h < TWO_PI):
        raise ConfigError(f"theta_h must lie in (0, 2*pi), got {cfg.theta_h!r}")
    # The five profile segments must tile [0, 2*pi) in order without overlap.
    if cfg.theta_h - cfg.gamma1 < 0:
        raise ConfigError("segment overlap: theta_h - gamma1 < 0")
    if cfg.theta_h + cfg.gamma1 > TWO_PI - cfg.theta_h - cfg.gamma2:
        raise ConfigError(
            "segment overlap: ramps collide (theta_h + gamma1 > 2*pi - theta_h - gamma2)")
    if cfg.gamma2 > cfg.theta_h:
        raise ConfigError("segment overlap: gamma2 > theta_h wraps past 2*pi")


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse a flat ``key = value`` document into a string map."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _as_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number: {raw!r}") from exc


def load_config(text: str) -> PhysicalConfig:
    """Parse and validate a configuration document.

    Unknown keys are rejected (typo safety); keys consumed by the
    environment/line-profile loaders are tolerated.  Omitted hbar and
    k_boltzmann default to 1.
    """
    kv = parse_kv_text(text)
    unknown = set(kv) - _PHYSICAL_KEYS - _FOREIGN_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    missing = _PHYSICAL_KEYS - set(kv) - set(_OPTIONAL_DEFAULTS)
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    values = {}
    for key in _PHYSICAL_KEYS:
        if key not in kv:
            values[key] = _OPTIONAL_DEFAULTS[key]
            continue
        values[key] = _as_float(key, kv[key])
    n_raw = values["n_ions"]
    if n_raw != int(n_raw):
        raise ConfigError(f"n_ions must be an integer, got {kv['n_ions']!r}")
    values["n_ions"] = int(n_raw)
    return PhysicalConfig(**values)


def derive(config: PhysicalConfig, reference_velocity: float | None = None,
           transition_halfwidth: float = 1.0) -> DerivedParams:
    """Compute derived scales.

    reference_velocity defaults to the pre-collapse uniform speed 2*pi/T
    (the conformal factor is position dependent; a single canonical value is
    needed by the decoherence-time estimate).  transition_halfwidth is the
    line-profile half-width `a` entering kappa = (v_max - v_min)/(2 a).
    """
    if reference_velocity is None:
        reference_velocity = config.mean_velocity
    if not (reference_velocity > 0):
        raise ConfigError(f"reference_velocity must be positive, got {reference_velocity!r}")
    _positive("transition_halfwidth", transition_halfwidth)
    delta = TWO_PI / config.n_ions
    rho = (config.ion_mass * config.radius ** 2 * config.n_ions
           / (reference_velocity * config.period))
    return DerivedParams(
        delta=delta,
        rho=rho,
        tau=0.05 * config.period,
        omega_max=config.n_ions / config.period,
        delta_v=config.v_max - config.v_min,
        sigma_v=config.v_max + config.v_min,
        kappa=(config.v_max - config.v_min) / (2.0 * transition_halfwidth),
    )


# Bench defaults.  The trap constants (ion_mass, ion_charge) are assumptions:
# ion_mass is tuned so the gamma = 5e-6 noise level decoheres the worst
# allowed mode in one collapse time, ion_charge puts the sonic point at the
# revolution speed 2*pi/period.
DEFAULT_CONFIG_TEXT = """\
# --- ring flow ---
n_ions = 1000
period = 1.0
radius = 1.0
ion_mass = 11414.0
ion_charge = 37.6246
v_min = 5.654866776461628    # 0.9 * 2*pi/period
v_max = 6.911503837897546    # 1.1 * 2*pi/period
gamma1 = 0.3
gamma2 = 0.3
theta_h = 1.0
hbar = 1.0
k_boltzmann = 1.0
# --- environment ---
gamma = 5.0e-6
cutoff = 20.0                # ~ 1/collapse time
cutoff_shape = lorentzian
bath_temperature = 0.0
# --- straight-channel profile ---
line_a = 1.0
line_kappa = 0.1
line_tau = 1.0
"""


def default_config() -> PhysicalConfig:
    return load_config(DEFAULT_CONFIG_TEXT)
