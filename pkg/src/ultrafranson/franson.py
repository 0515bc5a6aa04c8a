"""Closed-form response of a Gaussian biphoton to two unbalanced interferometers.

Phase convention: each arm multiplies the spectral amplitude by
``(1 + exp(i(omega*tau + phi))) / 2``, so every fringe below is written in
terms of the total arm phase ``theta = omega0*tau + phi``. Temporal
amplitudes use ``exp(+i omega t)``, which puts the long path of an arm at
``t = -tau``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .biphoton import GaussianBiphoton, jsa_value, jta_prefactor, temporal_envelope

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class InterferometerArm:
    """One unbalanced interferometer: long-short delay ``tau`` (ps) and
    applied phase ``phi`` (rad, stored in [0, 2pi))."""

    tau: float
    phi: float = 0.0

    def __post_init__(self):
        tau = float(self.tau)
        if not math.isfinite(tau) or tau < 0:
            raise ValueError(f"arm delay must be finite and >= 0, got {self.tau}")
        phi = float(self.phi)
        if not math.isfinite(phi):
            raise ValueError("arm phase must be finite")
        phi = phi % TWO_PI
        if phi >= TWO_PI:  # -tiny % 2pi rounds up to 2pi
            phi = 0.0
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "phi", phi)

    def total_phase(self, omega0: float) -> float:
        """Fringe phase ``omega0*tau + phi`` seen by light centred at omega0."""
        return omega0 * self.tau + self.phi


@dataclass(frozen=True)
class FransonSettings:
    arm_s: InterferometerArm
    arm_i: InterferometerArm

    @classmethod
    def identity(cls) -> "FransonSettings":
        return cls(InterferometerArm(0.0), InterferometerArm(0.0))

    @classmethod
    def referenced(cls, state: GaussianBiphoton, tau_s, tau_i, phi_s=0.0, phi_i=0.0):
        """Settings whose *total* phases at the state's centre frequencies are
        ``phi_s`` and ``phi_i``.

        Laboratory phase settings are calibrated against the observed fringe,
        so scans and Bell settings are specified this way.
        """
        return cls(
            InterferometerArm(tau_s, phi_s - state.omega_s0 * tau_s),
            InterferometerArm(tau_i, phi_i - state.omega_i0 * tau_i),
        )

    def total_phases(self, state: GaussianBiphoton):
        return (self.arm_s.total_phase(state.omega_s0),
                self.arm_i.total_phase(state.omega_i0))


class PathTerm(enum.Enum):
    SHORT_SHORT = "ss"
    LONG_SHORT = "ls"
    SHORT_LONG = "sl"
    LONG_LONG = "ll"

    def shift(self, settings: FransonSettings):
        """Temporal offset added to (t_s, t_i) for this path combination."""
        long_s = self in (PathTerm.LONG_SHORT, PathTerm.LONG_LONG)
        long_i = self in (PathTerm.SHORT_LONG, PathTerm.LONG_LONG)
        return (settings.arm_s.tau if long_s else 0.0,
                settings.arm_i.tau if long_i else 0.0)

    def phase(self, theta_s: float, theta_i: float) -> float:
        long_s = self in (PathTerm.LONG_SHORT, PathTerm.LONG_LONG)
        long_i = self in (PathTerm.SHORT_LONG, PathTerm.LONG_LONG)
        return (theta_s if long_s else 0.0) + (theta_i if long_i else 0.0)


def arm_transfer(omega, arm: InterferometerArm):
    """Spectral transfer function ``(1 + exp(i(omega*tau + phi)))/2`` of one arm."""
    omega = np.asarray(omega, dtype=float)
    return 0.5 * (1 + np.exp(1j * (omega * arm.tau + arm.phi)))


def jsa_after(settings: FransonSettings, state: GaussianBiphoton, omega_s, omega_i):
    """Joint spectral amplitude after both interferometers."""
    return (jsa_value(state, omega_s, omega_i)
            * arm_transfer(omega_s, settings.arm_s)
            * arm_transfer(omega_i, settings.arm_i))


def jsi_after(settings: FransonSettings, state: GaussianBiphoton, omega_s, omega_i):
    """Joint spectral intensity after both interferometers.

    The source spectrum is modulated by cos^2((omega*tau + phi)/2) on each
    axis, with the running frequencies in the cosines.
    """
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    a_s, a_i = settings.arm_s, settings.arm_i
    return (jsa_value(state, omega_s, omega_i) ** 2
            * np.cos((omega_s * a_s.tau + a_s.phi) / 2) ** 2
            * np.cos((omega_i * a_i.tau + a_i.phi) / 2) ** 2)


def path_term(term: PathTerm, state: GaussianBiphoton, settings: FransonSettings, t_s, t_i):
    """Unit-peak Gaussian envelope of one path combination.

    ``exp[-(s_s u_s - s_i u_i)^2 - 2(1+rho) s_s s_i u_s u_i]`` with
    ``u = t + shift``; the long-long term peaks at ``(-tau_s, -tau_i)``.
    """
    dx, dy = term.shift(settings)
    return temporal_envelope(state, np.asarray(t_s, dtype=float) + dx,
                             np.asarray(t_i, dtype=float) + dy)


def jti_after(settings: FransonSettings, state: GaussianBiphoton, t_s, t_i):
    """Joint temporal intensity after the interferometers.

    Written as the expansion into non-interfering path terms, single-photon
    cross terms, and the phase-difference and phase-sum two-photon terms.
    Normalised consistently with :func:`ultrafranson.biphoton.jta_value`, so
    it is exactly ``|FT[jsa_after]|^2`` under the unitary transform.
    """
    th_s, th_i = settings.total_phases(state)
    f_ss = path_term(PathTerm.SHORT_SHORT, state, settings, t_s, t_i)
    f_ls = path_term(PathTerm.LONG_SHORT, state, settings, t_s, t_i)
    f_sl = path_term(PathTerm.SHORT_LONG, state, settings, t_s, t_i)
    f_ll = path_term(PathTerm.LONG_LONG, state, settings, t_s, t_i)
    total = (f_ss**2 + f_ls**2 + f_sl**2 + f_ll**2
             + 2 * (f_ss * f_ls + f_sl * f_ll) * math.cos(th_s)
             + 2 * (f_ss * f_sl + f_ls * f_ll) * math.cos(th_i)
             + 2 * f_sl * f_ls * math.cos(th_s - th_i)
             + 2 * f_ss * f_ll * math.cos(th_s + th_i))
    return jta_prefactor(state) ** 2 / 16 * total


def jta_after(settings: FransonSettings, state: GaussianBiphoton, t_s, t_i):
    """Joint temporal amplitude after the interferometers (coherent path sum)."""
    t_s = np.asarray(t_s, dtype=float)
    t_i = np.asarray(t_i, dtype=float)
    th_s, th_i = settings.total_phases(state)
    total = sum(np.exp(1j * term.phase(th_s, th_i))
                * path_term(term, state, settings, t_s, t_i) for term in PathTerm)
    carrier = np.exp(1j * (state.omega_s0 * t_s + state.omega_i0 * t_i))
    return jta_prefactor(state) / 4 * carrier * total


def _damping(state: GaussianBiphoton, settings: FransonSettings):
    s, i, r = state.sigma_s, state.sigma_i, state.rho
    ts, ti = settings.arm_s.tau, settings.arm_i.tau
    mismatch = 0.5 * (s * ts - i * ti) ** 2
    return (math.exp(-0.5 * (s * ts) ** 2),
            math.exp(-0.5 * (i * ti) ** 2),
            math.exp(-mismatch - (1 + r) * s * i * ts * ti),
            math.exp(-mismatch - (1 - r) * s * i * ts * ti))


def coincidence_rate(settings: FransonSettings, state: GaussianBiphoton) -> float:
    """Probability that both photons leave through the detected ports.

    Equals the integral of |jsa_after|^2 over the plane, i.e. one quarter of
    ``1 + e_s cos th_s + e_i cos th_i + (e_+ cos(th_s+th_i) + e_- cos(th_s-th_i))/2``.
    """
    th_s, th_i = settings.total_phases(state)
    e_s, e_i, e_plus, e_minus = _damping(state, settings)
    return 0.25 * (1 + e_s * math.cos(th_s) + e_i * math.cos(th_i)
                   + 0.5 * e_plus * math.cos(th_s + th_i)
                   + 0.5 * e_minus * math.cos(th_s - th_i))


def coincidence_rate_anticorrelated(sigma, tau, rho, omega_s0, omega_i0, phi_s, phi_i):
    """Three-term form of :func:`coincidence_rate` for equal bandwidths and
    delays in the strongly anti-correlated limit (phase-difference term
    dropped)."""
    th_s = omega_s0 * tau + phi_s
    th_i = omega_i0 * tau + phi_i
    single = math.exp(-0.5 * (sigma * tau) ** 2)
    return 0.25 * (1 + single * math.cos(th_s) + single * math.cos(th_i)
                   + 0.5 * math.exp(-(1 + rho) * sigma**2 * tau**2) * math.cos(th_s + th_i))


def singles_rate(arm: InterferometerArm, sigma: float, omega0: float) -> float:
    """Relative single-photon rate behind one arm, ``1 + exp(-s^2 tau^2/2) cos(theta)``."""
    return 1 + math.exp(-0.5 * (sigma * arm.tau) ** 2) * math.cos(arm.total_phase(omega0))


# -- temporally resolved rates ------------------------------------------------

_PAIRS = [(p, q) for k, p in enumerate(PathTerm) for q in list(PathTerm)[k:]]


class RateComponents(NamedTuple):
    """Coefficients of a two-photon rate as a function of the arm phases:
    ``dc + single_s cos th_s + single_i cos th_i + diff cos(th_s-th_i) + sum cos(th_s+th_i)``."""

    dc: float
    single_s: float
    single_i: float
    diff: float
    sum: float

    def value(self, theta_s, theta_i):
        return (self.dc + self.single_s * np.cos(theta_s) + self.single_i * np.cos(theta_i)
                + self.diff * np.cos(theta_s - theta_i) + self.sum * np.cos(theta_s + theta_i))

    @property
    def visibility(self) -> float:
        """Phase-sum fringe amplitude relative to the phase-independent level
        (zero when the gate sees no light at all)."""
        if self.dc == 0:
            return 0.0
        return float(self.sum / self.dc)


def _gaussian_average(amat, mean, cov):
    """E[exp(-y^T A y / 2)] for y ~ N(mean, cov); mean has shape (..., 2)."""
    m = np.eye(2) + cov @ amat
    quad = amat @ np.linalg.inv(m)
    mean = np.asarray(mean, dtype=float)
    expo = -0.5 * np.einsum("...i,ij,...j->...", mean, quad, mean)
    return np.exp(expo) / math.sqrt(np.linalg.det(m))


def coincidence_components(settings: FransonSettings, state: GaussianBiphoton,
                           t_s=None, t_i=None, gate_sigma=(0.0, 0.0)) -> RateComponents:
    """Phase decomposition of the joint temporal intensity at a gate position.

    The gate is Gaussian with per-axis standard deviation ``gate_sigma`` (ps),
    centred at ``(t_s, t_i)`` (default: halfway between the short and long
    arrival times, ``(-tau_s/2, -tau_i/2)``). With zero gate width this is a
    point evaluation of :func:`jti_after`.
    """
    tau_s, tau_i = settings.arm_s.tau, settings.arm_i.tau
    t_s = -tau_s / 2 if t_s is None else t_s
    t_i = -tau_i / 2 if t_i is None else t_i
    cmat = state.spectral_covariance
    cov = np.diag(np.square(np.asarray(gate_sigma, dtype=float)))
    gate = np.stack(np.broadcast_arrays(np.asarray(t_s, float), np.asarray(t_i, float)), axis=-1)

    prods = {}
    for p, q in _PAIRS:
        dp = np.array(p.shift(settings))
        dq = np.array(q.shift(settings))
        mid, diff = (dp + dq) / 2, dp - dq
        # f_p f_q = exp(-2 (t+mid)^T C (t+mid) - diff^T C diff / 2)
        const = math.exp(-0.5 * diff @ cmat @ diff)
        prods[p.value + q.value] = const * _gaussian_average(4 * cmat, gate + mid, cov)

    k = jta_prefactor(state) ** 2 / 16
    return RateComponents(
        dc=k * (prods["ssss"] + prods["lsls"] + prods["slsl"] + prods["llll"]),
        single_s=k * 2 * (prods["ssls"] + prods["slll"]),
        single_i=k * 2 * (prods["sssl"] + prods["lsll"]),
        diff=k * 2 * prods["lssl"],
        sum=k * 2 * prods["ssll"],
    )


def singles_components(tau, sigma, rho, t, gate_sigma=0.0):
    """Phase-independent level and fringe amplitude of one photon's
    arrival-time density behind its arm, at gate position ``t``."""
    a = 2 * (1 - rho**2) * sigma**2
    norm = 0.25 * math.sqrt(2 * a) / math.sqrt(2 * math.pi)
    t = np.asarray(t, dtype=float)
    stretch = 1 + 2 * a * gate_sigma**2

    def term(shift):
        return np.exp(-a * (t + shift) ** 2 / stretch) / math.sqrt(stretch)

    dc = norm * (term(0.0) + term(tau))
    cross = norm * 2 * math.exp(-0.5 * (sigma * tau) ** 2) * term(tau / 2)
    return dc, cross


def temporal_marginal_after(arm: InterferometerArm, sigma: float, rho: float, omega0: float,
                            t, gate_sigma: float = 0.0):
    """Arrival-time density of one photon behind its own interferometer.

    The partner photon is traced out, so the other arm plays no role. Terms:
    short path, long path, and their interference
    ``2 exp(-2(1-rho^2) s^2 (t + tau/2)^2 - s^2 tau^2 / 2) cos(theta)``.
    A non-zero ``gate_sigma`` averages the density over a Gaussian gate.
    """
    dc, cross = singles_components(arm.tau, sigma, rho, t, gate_sigma)
    return dc + cross * math.cos(arm.total_phase(omega0))


def selected_rates(settings: FransonSettings, state: GaussianBiphoton, phases=None):
    """Coincidence and singles densities with the gates halfway between the
    short and long arrival times.

    Returns ``(coincidence, singles_s, singles_i)`` evaluated at the settings'
    own phases, or at the total phases given as ``phases=(theta_s, theta_i)``
    (arrays broadcast).
    """
    if phases is None:
        th_s, th_i = settings.total_phases(state)
    else:
        th_s, th_i = (np.asarray(p, dtype=float) for p in phases)
    return gated_rates(settings, state, th_s, th_i)


def gated_rates(settings: FransonSettings, state: GaussianBiphoton, theta_s, theta_i,
                gate=None, gate_sigma=(0.0, 0.0)):
    """Coincidence and singles rates seen through Gaussian time gates.

    ``theta_s``/``theta_i`` are total arm phases; the delays come from
    ``settings``. ``gate`` defaults to ``(-tau_s/2, -tau_i/2)``.
    """
    tau_s, tau_i = settings.arm_s.tau, settings.arm_i.tau
    g_s, g_i = (-tau_s / 2, -tau_i / 2) if gate is None else gate
    comp = coincidence_components(settings, state, g_s, g_i, gate_sigma)
    cc = comp.value(theta_s, theta_i)
    singles = []
    for tau, sigma, theta, g, gs in (
            (tau_s, state.sigma_s, theta_s, g_s, gate_sigma[0]),
            (tau_i, state.sigma_i, theta_i, g_i, gate_sigma[1])):
        dc, cross = singles_components(tau, sigma, state.rho, g, gs)
        singles.append(dc + cross * np.cos(theta))
    return cc, singles[0], singles[1]


def predicted_visibility(settings: FransonSettings, state: GaussianBiphoton,
                         selected: bool = False, gate_sigma=(0.0, 0.0)) -> float:
    """Visibility of the phase-sum coincidence fringe.

    Without temporal selection this is ``exp(-Var(w_s tau_s + w_i tau_i)/2)/2``,
    never above one half. With selection it is the ratio of the phase-sum
    amplitude to the phase-independent level at the halfway gate position,
    optionally smeared by Gaussian gates of width ``gate_sigma``.
    """
    if not selected:
        return 0.5 * _damping(state, settings)[2]
    return coincidence_components(settings, state, gate_sigma=gate_sigma).visibility
