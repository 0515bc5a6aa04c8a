"""Gaussian two-photon state and the analytic quantities derived from it.

Units are fixed throughout the package: time in ps, angular frequency in
rad/ps, wavelength in nm. Every width is a standard deviation of an
intensity distribution, never a FWHM.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Speed of light in nm/ps.
SPEED_OF_LIGHT = 299792.458

#: Largest accepted |rho|; the amplitude normalisation diverges at |rho| = 1.
RHO_LIMIT = 0.999999


def wavelength_to_angfreq(wavelength):
    """Convert a vacuum wavelength in nm to angular frequency in rad/ps."""
    wavelength = np.asarray(wavelength, dtype=float)
    if np.any(wavelength <= 0) or not np.all(np.isfinite(wavelength)):
        raise ValueError("wavelength must be positive and finite")
    out = 2 * np.pi * SPEED_OF_LIGHT / wavelength
    return float(out) if out.ndim == 0 else out


def angfreq_to_wavelength(omega):
    """Convert angular frequency in rad/ps to vacuum wavelength in nm."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0) or not np.all(np.isfinite(omega)):
        raise ValueError("angular frequency must be positive and finite")
    out = 2 * np.pi * SPEED_OF_LIGHT / omega
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GaussianBiphoton:
    """Pure two-photon state with a real Gaussian joint spectral amplitude.

    Parameters
    ----------
    omega_s0, omega_i0 : float
        Centre angular frequencies of signal and idler (rad/ps).
    sigma_s, sigma_i : float
        Marginal standard deviations of the joint spectral intensity (rad/ps).
    rho : float
        Statistical correlation between the signal and idler frequencies.
    """

    omega_s0: float
    omega_i0: float
    sigma_s: float
    sigma_i: float
    rho: float

    def __post_init__(self):
        for name in ("omega_s0", "omega_i0", "sigma_s", "sigma_i", "rho"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.sigma_s <= 0 or self.sigma_i <= 0:
            raise ValueError("marginal bandwidths must be positive")
        if abs(self.rho) > RHO_LIMIT:
            raise ValueError(f"|rho| must not exceed {RHO_LIMIT}, got {self.rho}")

    @classmethod
    def from_wavelengths(cls, lambda_s, lambda_i, sigma_s, sigma_i, rho):
        """Build a state from centre wavelengths in nm."""
        return cls(wavelength_to_angfreq(lambda_s), wavelength_to_angfreq(lambda_i),
                   sigma_s, sigma_i, rho)

    @classmethod
    def from_temporal_widths(cls, dt_s, dt_i, rho_t, omega_s0, omega_i0):
        """Transform-limited state whose joint temporal intensity has the given
        marginal widths (ps) and correlation."""
        if dt_s <= 0 or dt_i <= 0:
            raise ValueError("temporal widths must be positive")
        cov_t = np.array([[dt_s**2, rho_t * dt_s * dt_i],
                          [rho_t * dt_s * dt_i, dt_i**2]])
        cov_w = np.linalg.inv(cov_t) / 4
        sig = np.sqrt(np.diag(cov_w))
        return cls(omega_s0, omega_i0, sig[0], sig[1], cov_w[0, 1] / (sig[0] * sig[1]))

    @property
    def spectral_covariance(self) -> np.ndarray:
        """Covariance matrix of the joint spectral intensity."""
        c = self.rho * self.sigma_s * self.sigma_i
        return np.array([[self.sigma_s**2, c], [c, self.sigma_i**2]])

    @property
    def temporal_covariance(self) -> np.ndarray:
        """Covariance matrix of the joint temporal intensity, inv(spectral)/4."""
        return np.linalg.inv(self.spectral_covariance) / 4

    @property
    def purity(self) -> float:
        return math.sqrt(1 - self.rho**2)


@dataclass(frozen=True)
class WidthSummary:
    marginal_s: float
    marginal_i: float
    heralded_s: float
    heralded_i: float
    diag_plus: float
    diag_minus: float
    correlation: float


def _summary_from_covariance(cov) -> WidthSummary:
    sx, sy = math.sqrt(cov[0][0]), math.sqrt(cov[1][1])
    r = cov[0][1] / (sx * sy)
    h = math.sqrt(1 - r**2)
    return WidthSummary(
        marginal_s=sx,
        marginal_i=sy,
        heralded_s=sx * h,
        heralded_i=sy * h,
        diag_plus=math.sqrt(sx**2 + sy**2 + 2 * r * sx * sy),
        diag_minus=math.sqrt(sx**2 + sy**2 - 2 * r * sx * sy),
        correlation=r,
    )


def spectral_widths(state: GaussianBiphoton) -> WidthSummary:
    """Marginal, heralded and diagonal widths of the joint spectral intensity."""
    return _summary_from_covariance(state.spectral_covariance)


def temporal_widths(state: GaussianBiphoton) -> WidthSummary:
    """Same as :func:`spectral_widths` for the joint temporal intensity (ps)."""
    return _summary_from_covariance(state.temporal_covariance)


def coherence_times(state: GaussianBiphoton):
    """Single-photon coherence times ``1/sigma`` and the two-photon coherence
    time ``1/Delta(omega_s + omega_i)``, all in ps."""
    w = spectral_widths(state)
    return 1 / state.sigma_s, 1 / state.sigma_i, 1 / w.diag_plus


def jsa_value(state: GaussianBiphoton, omega_s, omega_i):
    """Joint spectral amplitude F(omega_s, omega_i), real and non-negative.

    Normalised so that |F|^2 integrates to one over the frequency plane.
    """
    s, i, r = state.sigma_s, state.sigma_i, state.rho
    ds = np.asarray(omega_s, dtype=float) - state.omega_s0
    di = np.asarray(omega_i, dtype=float) - state.omega_i0
    norm = 1 / (math.sqrt(2 * math.pi * s * i) * (1 - r**2) ** 0.25)
    q = ds**2 / (2 * s**2) + di**2 / (2 * i**2) - r * ds * di / (s * i)
    return norm * np.exp(-q / (2 * (1 - r**2)))


def jsi_value(state: GaussianBiphoton, omega_s, omega_i):
    return jsa_value(state, omega_s, omega_i) ** 2


def jta_prefactor(state: GaussianBiphoton) -> float:
    """Peak modulus of the joint temporal amplitude."""
    return math.sqrt(2 * state.sigma_s * state.sigma_i / math.pi) * (1 - state.rho**2) ** 0.25


def temporal_envelope(state: GaussianBiphoton, t_s, t_i):
    """exp(-t^T C t) with C the spectral covariance; unit peak at the origin."""
    s, i, r = state.sigma_s, state.sigma_i, state.rho
    t_s = np.asarray(t_s, dtype=float)
    t_i = np.asarray(t_i, dtype=float)
    return np.exp(-(s**2 * t_s**2 + i**2 * t_i**2 + 2 * r * s * i * t_s * t_i))


def jta_value(state: GaussianBiphoton, t_s, t_i):
    """Joint temporal amplitude.

    Defined with the unitary two-dimensional transform
    ``f(t) = (1/2pi) iint F(w) exp(i(w_s t_s + w_i t_i)) dw_s dw_i`` so that
    |f|^2 also integrates to one.
    """
    t_s = np.asarray(t_s, dtype=float)
    t_i = np.asarray(t_i, dtype=float)
    carrier = np.exp(1j * (state.omega_s0 * t_s + state.omega_i0 * t_i))
    return jta_prefactor(state) * carrier * temporal_envelope(state, t_s, t_i)


def jti_value(state: GaussianBiphoton, t_s, t_i):
    return jta_prefactor(state) ** 2 * temporal_envelope(state, t_s, t_i) ** 2
