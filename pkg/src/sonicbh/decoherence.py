"""Diffusion coefficients and the decoherence-time estimate.

The normal coefficient D(t) is the double integral

    D(t) = (g^2/2) int_0^inf dnu int_0^t ds  nu f(nu) cos(nu s) cos(omega s)

(g = effective coupling).  For the Lorentzian cutoff it has a closed form in
trigonometric/hyperbolic integrals, evaluated here through the
cancellation-safe combination; an independent nested-quadrature oracle backs
it.  Spatial mode weights V1/V2 are quadratures of cos^2 / cos*sin of the
null coordinate over the ring, and the decoherence time follows from the
accumulated diffusion reaching order unity on the smallest trajectory
separation rho*delta^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .environment import EnvironmentSpec
from .errors import QuadratureError, RegimeError, RegimeWarning
from .params import TWO_PI, DerivedParams, PhysicalConfig
from .profiles import RingProfile, hawking_temperature_ring, null_coordinate_map
from .specfun import (fourier_integral, integrate_adaptive, si,
                      stable_shi_chi_combo)

# Criterion constant in (rho delta^2 / hbar) * accumulated diffusion == const.
# Kept explicit so sensitivity to the order-unity convention can be probed.
DECOHERENCE_CRITERION = 1.0


@dataclass(frozen=True)
class DiffusionResult:
    normal: float
    anomalous: float
    normal_integral: float
    anomalous_integral: float
    method: str  # exact | asymptotic | thermal_expansion | quadrature_oracle


@dataclass(frozen=True)
class VCoefficients:
    v1_u: float
    v2_u: float
    v1_v: float
    v2_v: float
    omega: float
    epsilon: float


@dataclass(frozen=True)
class DecoherenceEstimate:
    t_d: float
    omega: float
    gamma: float
    temperature: float
    zero_t_term: float
    thermal_term: float  # <= 0


# --------------------------------------------------------------------------
# normal diffusion coefficient
# --------------------------------------------------------------------------

def diffusion_exact(t: float, omega: float, spec: EnvironmentSpec) -> float:
    """Closed-form D(t) for the Lorentzian cutoff at zero temperature.

    D = (g^2/2) * omega/(1+(omega/L)^2) * [ A*(Shi cosh - Chi sinh)(Lt)
        + B*(Shi sinh - Chi cosh)(Lt) + Si(omega t) ],
    A = (L/omega) cos(omega t), B = sin(omega t).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if spec.cutoff_shape != "lorentzian":
        raise RegimeError(
            "the closed form is specific to the Lorentzian cutoff; "
            "use diffusion_quadrature_oracle for other shapes")
    if spec.bath_temperature != 0.0:
        raise RegimeError("closed form derived at zero bath temperature")
    if t == 0.0:
        return 0.0
    lam, g2 = spec.cutoff, spec.coupling_eff ** 2
    a = (lam / omega) * math.cos(omega * t)
    b = math.sin(omega * t)
    bracket = stable_shi_chi_combo(a, b, lam * t) + si(omega * t)
    return 0.5 * g2 * omega / (1.0 + (omega / lam) ** 2) * bracket


def _inner_antiderivative(nu: float, omega: float, t: float) -> float:
    half_sum = math.sin((nu + omega) * t) / (nu + omega)
    if abs(nu - omega) < 1e-13 * max(nu, omega):
        return 0.5 * (half_sum + t)
    return 0.5 * (half_sum + math.sin((nu - omega) * t) / (nu - omega))


def _inner_cos_cos(nu: float, omega: float, t: float, exact_threshold: float = 40.0) -> float:
    """int_0^t cos(nu s) cos(omega s) ds.

    Adaptive quadrature while the integrand carries few oscillations, the
    elementary antiderivative beyond (both agree to machine precision on the
    overlap; see the oracle tests).
    """
    if (nu + omega) * t <= exact_threshold:
        try:
            return integrate_adaptive(lambda s: math.cos(nu * s) * math.cos(omega * s),
                                      0.0, t, tol=1e-12).value
        except QuadratureError:
            pass
    return _inner_antiderivative(nu, omega, t)


def _osc_quad_finite(f, a: float, b: float, freq: float, kind: str,
                     tol: float = 1e-12) -> float:
    """int_a^b f(nu) cos/sin(freq*nu) dnu, robust to many oscillations."""
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        from scipy import integrate as _si
        warnings.simplefilter("ignore", _si.IntegrationWarning)
        val, _ = _si.quad(f, a, b, weight=kind, wvar=freq, epsabs=tol,
                          epsrel=0.0, limit=800, maxp1=200)
    return val


def diffusion_quadrature_oracle(t: float, omega: float, spec: EnvironmentSpec,
                                tol: float = 1e-10) -> float:
    """Brute-force D(t): nested quadrature of the defining double integral.

    The outer nu integral is taken plainly where the inner factor carries few
    oscillations; otherwise it is split around the sin((nu-omega)t)/(nu-omega)
    ridge at nu = omega and evaluated with oscillatory-weight quadrature on
    the sides, plus an exact Fourier-tail treatment beyond nu_b.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0.0:
        return 0.0
    lam, g2 = spec.cutoff, spec.coupling_eff ** 2

    if spec.cutoff_shape == "lorentzian":
        weight = lambda nu: nu / (1.0 + (nu / lam) ** 2)
    else:
        weight = lambda nu: nu * math.exp(-nu / lam)

    nu_b = 2.0 * omega + 6.0 * lam + 10.0 / t
    if nu_b * t < 300.0:
        pts = sorted({omega, max(omega - math.pi / t, 0.0), omega + math.pi / t,
                      min(lam, nu_b * 0.9)})
        finite = integrate_adaptive(lambda nu: weight(nu) * _inner_cos_cos(nu, omega, t),
                                    0.0, nu_b, tol=tol, points=pts, limit=800).value
    else:
        half = 0.5 * math.sin(omega * t)
        ridge = min(20.0 * math.pi / t, 0.45 * omega)
        finite = integrate_adaptive(
            lambda nu: weight(nu) * _inner_cos_cos(nu, omega, t),
            omega - ridge, omega + ridge, tol=tol, limit=400).value
        for lo, hi in ((0.0, omega - ridge), (omega + ridge, nu_b)):
            # sin((nu+-omega)t) expanded about the nu-oscillation e^{i nu t}
            f_sin = lambda nu: weight(nu) * 0.5 * math.cos(omega * t) * (
                1.0 / (nu + omega) + 1.0 / (nu - omega))
            f_cos = lambda nu: weight(nu) * half * (
                1.0 / (nu + omega) - 1.0 / (nu - omega))
            finite += _osc_quad_finite(f_sin, lo, hi, t, "sin", tol)
            finite += _osc_quad_finite(f_cos, lo, hi, t, "cos", tol)
    # tail: substitute mu = nu -+ omega so each piece is a pure Fourier integral
    tail_plus = fourier_integral(lambda mu: weight(mu - omega) / (2.0 * mu),
                                 nu_b + omega, t, kind="sin").value
    tail_minus = fourier_integral(lambda mu: weight(mu + omega) / (2.0 * mu),
                                  nu_b - omega, t, kind="sin").value
    return 0.5 * g2 * (finite + tail_plus + tail_minus)


def diffusion_thermal(t: float, omega: float, beta: float, spec: EnvironmentSpec,
                      hbar: float = 1.0) -> float:
    """Low-temperature two-term expansion of the cutoff-free D(t, beta):

        2 g^-2 D = omega Si(omega t) + 2 sin(omega t)/(omega beta^2 hbar^2).

    Valid for beta*hbar*omega >> 1 and omega*t >> 1; warns outside the
    thermal regime.  The display drops a beta-independent cos(omega t)/t
    boundary term that the honest cutoff-free quadrature (and the Lorentzian
    closed form at large cutoff) retains; compare thermal parts against the
    oracle, not absolute values, at moderate omega*t.  Vanishes at t = 0 for
    every beta, so the coupling calibration is temperature-independent.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if math.isfinite(beta) and beta * hbar * omega < 10.0:
        warnings.warn("thermal expansion outside its low-temperature regime "
                      f"(beta*hbar*omega = {beta * hbar * omega:.3g} < 10)", RegimeWarning)
    g2 = spec.coupling_eff ** 2
    correction = 0.0 if math.isinf(beta) else (
        2.0 * math.sin(omega * t) / (omega * beta ** 2 * hbar ** 2))
    return 0.5 * g2 * (omega * si(omega * t) + correction)


def diffusion_thermal_oracle(t: float, omega: float, beta: float,
                             spec: EnvironmentSpec, hbar: float = 1.0,
                             tol: float = 1e-10) -> float:
    """Full-coth cutoff-free D(t, beta) by quadrature with the sharp split
    at nu = 2/(beta*hbar).

    The nu -> inf part carries no cutoff; its non-decaying tail piece is
    Abel-summed in closed form (the same distributional sense the Si closed
    form carries), the decaying remainder by Fourier quadrature.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    g2 = spec.coupling_eff ** 2
    nu_split = 0.0 if math.isinf(beta) else 2.0 / (beta * hbar)

    def coth_weight(nu):
        if math.isinf(beta):
            return nu
        x = beta * hbar * nu
        return 2.0 / (beta * hbar) if x < 1e-8 else nu / math.tanh(0.5 * x)

    nu_b = 2.0 * omega + max(10.0 * nu_split, 4.0 * omega) + 10.0 / t
    pts = sorted({p for p in (nu_split, omega, omega - math.pi / t, omega + math.pi / t)
                  if 0.0 < p < nu_b})
    finite = integrate_adaptive(
        lambda nu: coth_weight(nu) * _inner_cos_cos(nu, omega, t),
        0.0, nu_b, tol=tol, points=pts, limit=800).value
    # beyond nu_b: coth == 1 to < 1e-10; inner integral decomposed as
    # (1/2)[sin((nu+om)t)/(nu+om) + sin((nu-om)t)/(nu-om)], mu = nu -+ omega:
    # integrand (mu -+ omega)/(2 mu) sin(mu t) = [1/2 -+ omega/(2 mu)] sin(mu t)
    tail = 0.0
    for mu0, sign in ((nu_b + omega, -1.0), (nu_b - omega, +1.0)):
        tail += math.cos(mu0 * t) / (2.0 * t)          # Abel value of int 1/2 sin(mu t)
        tail += sign * fourier_integral(lambda mu: omega / (2.0 * mu),
                                        mu0, t, kind="sin").value
    return 0.5 * g2 * (finite + tail)


# --------------------------------------------------------------------------
# anomalous diffusion coefficient
# --------------------------------------------------------------------------

def anomalous_diffusion_asymptotic(omega: float, tau: float,
                                   spec: EnvironmentSpec) -> float:
    """Long-time anomalous plateau (g^2/2) pi omega log(cutoff/omega).

    Contract value used in the decoherence bookkeeping; the honest
    time-domain quadrature differs in prefactor (see the oracle and the
    notes) but the anomalous branch is negligible in the regime of interest.
    Warns when omega*tau >= 1 (non-positive logarithm).
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if omega * tau >= 1.0:
        warnings.warn(f"omega*tau = {omega * tau:.3g} >= 1: anomalous log "
                      "asymptote is non-positive here", RegimeWarning)
    g2 = spec.coupling_eff ** 2
    return 0.5 * g2 * math.pi * omega * math.log(spec.cutoff / omega)


def anomalous_time_domain_oracle(t: float, omega: float, spec: EnvironmentSpec,
                                 tol: float = 1e-11) -> float:
    """f(t) = int_0^t N(t, t-s) sin(omega s) ds by nested quadrature.

    inner(nu) = (1/2)[1/(omega+nu) + 1/(omega-nu)]
              - (1/2)[cos((nu+omega)t)/(nu+omega) - cos((nu-omega)t)/(nu-omega)];
    the smooth part is kept jointly with the oscillation near nu = omega
    (where the full inner is regular) and split outside the ridge.
    """
    lam, g2 = spec.cutoff, spec.coupling_eff ** 2
    if spec.cutoff_shape == "lorentzian":
        weight = lambda nu: nu / (1.0 + (nu / lam) ** 2)
    else:
        weight = lambda nu: nu * math.exp(-nu / lam)

    def inner(nu):
        plus = (1.0 - math.cos((omega + nu) * t)) / (omega + nu)
        if abs(nu - omega) < 1e-13 * max(nu, omega):
            return 0.5 * plus
        return 0.5 * (plus + (1.0 - math.cos((omega - nu) * t)) / (omega - nu))

    nu_b = 2.0 * omega + 6.0 * lam + 10.0 / t
    ridge = min(20.0 * math.pi / t, 0.45 * omega)
    total = integrate_adaptive(lambda nu: weight(nu) * inner(nu),
                               omega - ridge, omega + ridge, tol=tol, limit=400).value
    cw, sw = math.cos(omega * t), math.sin(omega * t)
    for lo, hi in ((0.0, omega - ridge), (omega + ridge, nu_b)):
        total += integrate_adaptive(
            lambda nu: 0.5 * weight(nu) * (1.0 / (omega + nu) + 1.0 / (omega - nu)),
            lo, hi, tol=tol, limit=400).value
        # cos((nu +- omega)t) = cos(nu t) cos(omega t) -+ sin(nu t) sin(omega t)
        f_cos = lambda nu: -0.5 * weight(nu) * cw * (
            1.0 / (nu + omega) - 1.0 / (nu - omega))
        f_sin = lambda nu: 0.5 * weight(nu) * sw * (
            1.0 / (nu + omega) + 1.0 / (nu - omega))
        total += _osc_quad_finite(f_cos, lo, hi, t, "cos", tol)
        total += _osc_quad_finite(f_sin, lo, hi, t, "sin", tol)
    # beyond nu_b the smooth part decays like lam^2 omega / nu^3
    total += integrate_adaptive(
        lambda nu: 0.5 * weight(nu) * (1.0 / (omega + nu) + 1.0 / (omega - nu)),
        nu_b, np.inf, tol=tol).value
    total -= fourier_integral(lambda mu: weight(mu - omega) / (2.0 * mu),
                              nu_b + omega, t, kind="cos").value
    total += fourier_integral(lambda mu: weight(mu + omega) / (2.0 * mu),
                              nu_b - omega, t, kind="cos").value
    return 0.5 * g2 * total


def diffusion_result(t: float, omega: float, spec: EnvironmentSpec,
                     tau: float, method: str = "exact", n_grid: int = 200) -> DiffusionResult:
    """Bundle D, f and their accumulated integrals for one (t, omega)."""
    if method == "exact":
        d_val = diffusion_exact(t, omega, spec)
        ts = np.linspace(0.0, t, n_grid)
        dv = np.array([diffusion_exact(s, omega, spec) for s in ts])
        d_int = float(np.trapezoid(dv, ts))
    elif method == "asymptotic":
        d_val = 0.25 * spec.coupling_eff ** 2 * omega * math.pi
        d_int = d_val * t
    elif method == "quadrature_oracle":
        d_val = diffusion_quadrature_oracle(t, omega, spec)
        d_int = float("nan")
    else:
        raise ValueError(f"unknown method {method!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        f_val = anomalous_diffusion_asymptotic(omega, tau, spec)
    return DiffusionResult(normal=d_val, anomalous=f_val, normal_integral=d_int,
                           anomalous_integral=f_val * t, method=method)


# --------------------------------------------------------------------------
# spatial mode weights
# --------------------------------------------------------------------------

def allowed_frequencies(profile: RingProfile, branch: str, epsilon: float | None = None,
                        omega_max: float | None = None) -> np.ndarray:
    """Periodicity-allowed mode frequencies 2*pi*n / |null circumference|."""
    cfg = profile.config
    if epsilon is None:
        epsilon = TWO_PI / cfg.n_ions
    if omega_max is None:
        omega_max = cfg.n_ions / cfg.period
    nmap = null_coordinate_map(profile, branch, epsilon if branch == "v" else 0.0)
    base = TWO_PI / abs(nmap.total)
    n_max = int(omega_max / base)
    return base * np.arange(1, n_max + 1)


_V_GRID = 1 << 15


def _branch_v1_v2(nmap, omega: float) -> tuple[float, float]:
    if omega == 0.0:
        return TWO_PI, 0.0
    v1 = v2 = 0.0
    for lo, hi, spline, _base in nmap._segments:
        th = np.linspace(lo, hi, _V_GRID)
        phase = omega * spline(th)
        c, s = np.cos(phase), np.sin(phase)
        v1 += float(np.trapezoid(c * c, th))
        v2 += float(np.trapezoid(c * s, th))
    return v1, v2


def v_coefficients(profile: RingProfile, omega: float,
                   epsilon: float | None = None) -> VCoefficients:
    """V1 = int cos^2(omega x_b), V2 = int cos sin over the ring, b = u, v.

    The v branch uses the epsilon-excluded null coordinate (default: one ion
    spacing).  At omega = 0 the values are exact by inspection.
    """
    if epsilon is None:
        epsilon = TWO_PI / profile.config.n_ions
    map_u = null_coordinate_map(profile, "u", 0.0)
    map_v = null_coordinate_map(profile, "v", epsilon)
    if omega == 0.0:
        return VCoefficients(TWO_PI, 0.0, TWO_PI, 0.0, 0.0, epsilon)
    v1u, v2u = _branch_v1_v2(map_u, omega)
    v1v, v2v = _branch_v1_v2(map_v, omega)
    return VCoefficients(v1u, v2u, v1v, v2v, omega, epsilon)


# --------------------------------------------------------------------------
# decoherence time
# --------------------------------------------------------------------------

def decoherence_time(config: PhysicalConfig, derived: DerivedParams, gamma: float,
                     omega: float, temperature: float, vcoef: VCoefficients,
                     branch: str = "u", use_full_v: bool = False,
                     criterion_constant: float = DECOHERENCE_CRITERION) -> DecoherenceEstimate:
    """Decoherence time of the mode at frequency omega.

        t_D(0)  = C * 2 hbar^2 / (gamma^2 dv delta^2 omega pi rho^2 V)
        t_D(T0) = t_D(0) - 8 k_B^2 T0^2 / (omega^3 pi hbar^2)

    V defaults to V1 of the requested branch; the full form
    V1 + 2 log(1/(omega tau)) V2 is selected by use_full_v.  The thermal
    correction is quadratic and independent of the mode weight.
    """
    if gamma <= 0 or omega <= 0:
        raise ValueError("gamma and omega must be positive")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    v1 = vcoef.v1_u if branch == "u" else vcoef.v1_v
    v2 = vcoef.v2_u if branch == "u" else vcoef.v2_v
    v_eff = v1
    if use_full_v:
        v_eff = v1 + 2.0 * math.log(1.0 / (omega * derived.tau)) * v2
    if v_eff <= 0:
        raise RegimeError(f"non-positive mode weight V = {v_eff:.3g}")
    hbar, k_b = config.hbar, config.k_boltzmann
    zero_t = (criterion_constant * 2.0 * hbar ** 2
              / (gamma ** 2 * derived.delta_v * derived.delta ** 2
                 * omega * math.pi * derived.rho ** 2 * v_eff))
    thermal = -8.0 * (k_b * temperature) ** 2 / (omega ** 3 * math.pi * hbar ** 2)
    t_d = zero_t + thermal
    if t_d <= 0:
        raise RegimeError(
            f"thermal correction dominates (t_D = {t_d:.3g} <= 0): outside "
            "the low-temperature expansion's validity")
    return DecoherenceEstimate(t_d=t_d, omega=omega, gamma=gamma,
                               temperature=temperature, zero_t_term=zero_t,
                               thermal_term=thermal)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    t_d_min: float
    t_d_max: float
    omega_min: float
    omega_max: float


def _band(config, derived, gamma, temperature, profile, epsilon, use_full_v):
    """(t_d_min, t_d_max, omega_of_min, omega_of_max) over allowed u and v modes."""
    best = (math.inf, None)
    worst = (-math.inf, None)
    for branch in ("u", "v"):
        omegas = allowed_frequencies(profile, branch, epsilon)
        for om in omegas:
            vc = v_coefficients(profile, om, epsilon)
            est = decoherence_time(config, derived, gamma, om, temperature, vc,
                                   branch=branch, use_full_v=use_full_v)
            if est.t_d < best[0]:
                best = (est.t_d, om)
            if est.t_d > worst[0]:
                worst = (est.t_d, om)
    return best[0], worst[0], best[1], worst[1]


def sweep_decoherence(axis: str, values, config: PhysicalConfig, gamma: float,
                      temperature: float = 0.0, epsilon: float | None = None,
                      use_full_v: bool = False):
    """Sweep t_D along gamma, v_min, or temperature.

    Returns (rows, errors): per-point failures are collected, not fatal.
    For each point the band (min, max) of t_D over the allowed mode
    frequencies of both branches is reported.
    """
    from dataclasses import replace as _replace

    from .params import derive as _derive

    if axis not in ("gamma", "v_min", "temperature"):
        raise ValueError(f"unknown sweep axis {axis!r}")
    rows, errors = [], []
    base_profile = RingProfile.from_config(config)
    base_derived = _derive(config)
    if axis == "temperature":
        t_h = hawking_temperature_ring(base_profile)
        too_hot = [v for v in values if v > 100.0 * t_h]
        if too_hot:
            raise RegimeError(
                f"temperature sweep beyond 100 T_H = {100 * t_h:.4g} refused "
                "(low-temperature expansion invalid); offending values "
                f"start at {min(too_hot):.4g}")

    if axis == "gamma":
        # t_D scales exactly as gamma^-2 at T0 = 0; reuse one band.
        lo, hi, om_lo, om_hi = _band(config, base_derived, 1.0, 0.0,
                                     base_profile, epsilon, use_full_v)
        for g in values:
            try:
                if g <= 0:
                    raise ValueError("gamma must be positive")
                if temperature == 0.0:
                    rows.append(SweepRow(g, lo / g ** 2, hi / g ** 2, om_lo, om_hi))
                else:
                    b = _band(config, base_derived, g, temperature, base_profile,
                              epsilon, use_full_v)
                    rows.append(SweepRow(g, *b))
            except Exception as exc:  # collected per point
                errors.append((g, repr(exc)))
        return rows, errors

    for val in values:
        try:
            if axis == "v_min":
                if not val < config.mean_velocity:
                    raise RegimeError("v_min must stay below the revolution speed")
                cfg = _replace(config, v_min=float(val))
                prof = RingProfile.from_config(cfg)
                der = _derive(cfg)
                b = _band(cfg, der, gamma, temperature, prof, epsilon, use_full_v)
            else:
                b = _band(config, base_derived, gamma, float(val), base_profile,
                          epsilon, use_full_v)
            rows.append(SweepRow(float(val), *b))
        except Exception as exc:
            errors.append((float(val), repr(exc)))
    return rows, errors
