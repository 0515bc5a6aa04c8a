"""Jones-calculus model of the birefringent unbalanced interferometer.

A vertically polarised photon is split by a birefringent crystal into an
early diagonal and a late anti-diagonal component, a quarter-wave plate maps
D -> L and A -> R, a half-wave plate at angle theta adds opposite phases to
the two circular components, and a polarising beam splitter keeps H. The
surviving time-bin state carries a late-early phase of 4*theta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .biphoton import GaussianBiphoton
from .franson import InterferometerArm, arm_transfer

H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)
D = (H + V) / math.sqrt(2)
A = (H - V) / math.sqrt(2)
L = (H - 1j * V) / math.sqrt(2)
R = (H + 1j * V) / math.sqrt(2)

# Fast axis horizontal. Any QWP orientation realising D -> L, A -> R would do;
# only that mapping is relied upon.
QWP = np.array([[1, 0], [0, -1j]], dtype=complex)

# Fixed retardance of the crystal, chosen so that |V> -> (|D,e> + |A,l>)/sqrt2.
# It only offsets the arm phase, which is calibrated away in practice.
CRYSTAL_LATE_PHASE = math.pi

PBS_H = np.outer(H, H.conj())


@dataclass(frozen=True)
class JonesVector:
    h: complex
    v: complex

    @classmethod
    def from_array(cls, arr) -> "JonesVector":
        return cls(complex(arr[0]), complex(arr[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.h, self.v], dtype=complex)

    @property
    def norm2(self) -> float:
        return abs(self.h) ** 2 + abs(self.v) ** 2


@dataclass(frozen=True)
class TimeBinPolState:
    """Amplitudes indexed ``[polarisation (H, V), bin (early, late)]``."""

    amplitudes: np.ndarray
    bin_delay: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2, 2) or not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be a finite 2x2 array")
        if not self.bin_delay > 0:
            raise ValueError("bin_delay must be positive")
        if np.sum(np.abs(amps) ** 2) > 1 + 1e-12:
            raise ValueError("time-bin state norm exceeds one")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def transmission(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def bin(self, which: int) -> JonesVector:
        return JonesVector.from_array(self.amplitudes[:, which])

    def apply(self, matrix) -> "TimeBinPolState":
        """Apply the same polarisation operator to both time bins."""
        return TimeBinPolState(np.asarray(matrix) @ self.amplitudes, self.bin_delay)


def hwp_unitary(theta: float) -> np.ndarray:
    """Half-wave plate at angle ``theta``: ``i [[cos2t, sin2t], [sin2t, -cos2t]]``."""
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    return 1j * np.array([[c, s], [s, -c]], dtype=complex)


def birefringent_split(pol, bin_delay: float) -> TimeBinPolState:
    """Split a polarisation state into an early D bin and a late A bin."""
    pol = np.asarray(pol, dtype=complex)
    early = D * (D.conj() @ pol)
    late = A * (A.conj() @ pol) * np.exp(1j * CRYSTAL_LATE_PHASE)
    return TimeBinPolState(np.column_stack([early, late]), bin_delay)


def simulate_arm(theta_hwp: float, bin_delay: float) -> TimeBinPolState:
    """Propagate a vertically polarised photon through crystal, QWP, HWP, PBS.

    The result equals ``(i/2) |H> (exp(-2i theta)|e> + exp(2i theta)|l>)``.
    """
    state = birefringent_split(V, bin_delay)
    state = state.apply(QWP).apply(hwp_unitary(theta_hwp)).apply(PBS_H)
    return state


def bin_phase(state: TimeBinPolState) -> float:
    """Late-minus-early phase of the H component, in [0, 2pi)."""
    e, l = state.amplitudes[0]
    return float(np.angle(l / e) % (2 * math.pi))


def arm_fringe(state: TimeBinPolState, omega):
    """Spectral transmission of a time-bin state normalised to unit mean:
    ``|c_e + c_l exp(i omega tau)|^2 / (|c_e|^2 + |c_l|^2)``."""
    c_e, c_l = state.amplitudes[0]
    omega = np.asarray(omega, dtype=float)
    amp = c_e + c_l * np.exp(1j * omega * state.bin_delay)
    return np.abs(amp) ** 2 / (abs(c_e) ** 2 + abs(c_l) ** 2)


def arm_equivalence_check(theta: float, state: GaussianBiphoton, side: str, tau: float,
                          n_points: int = 2001) -> float:
    """Max deviation between the waveplate model and the abstract arm with phi = 4 theta.

    Both fringe patterns are normalised to unit mean and compared over +-5
    marginal widths around the chosen photon's centre frequency.
    """
    if side not in ("s", "i"):
        raise ValueError("side must be 's' or 'i'")
    omega0, sigma = ((state.omega_s0, state.sigma_s) if side == "s"
                     else (state.omega_i0, state.sigma_i))
    omega = omega0 + sigma * np.linspace(-5, 5, n_points)
    pol_model = arm_fringe(simulate_arm(theta, tau), omega)
    abstract = 2 * np.abs(arm_transfer(omega, InterferometerArm(tau, 4 * theta))) ** 2
    return float(np.max(np.abs(pol_model - abstract)))
