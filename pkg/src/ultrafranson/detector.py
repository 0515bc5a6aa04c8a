"""Turn ideal model intensities into simulated measurements.

Covers the Gaussian instrument response (time gate, spectrometer), absolute
rate calibration, the flat second-harmonic background, Poisson sampling and
the scan drivers for joint maps, phase fringes and the CHSH count table.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .biphoton import GaussianBiphoton, jsi_value, jti_value
from .franson import (FransonSettings, coincidence_components, jsi_after, jti_after,
                      singles_components)

TWO_PI = 2 * math.pi


class FormatError(ValueError):
    """Malformed CSV input; ``line`` is the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class ResponseModel:
    """Gaussian detector response, standard deviations per axis.

    Zero means an ideal detector on that axis.
    """

    gate_sigma_s: float = 0.0
    gate_sigma_i: float = 0.0
    spec_sigma_s: float = 0.0
    spec_sigma_i: float = 0.0

    def __post_init__(self):
        for name in ("gate_sigma_s", "gate_sigma_i", "spec_sigma_s", "spec_sigma_i"):
            value = float(getattr(self, name))
            if not value >= 0 or not math.isfinite(value):
                raise ValueError(f"{name} must be finite and >= 0")
            object.__setattr__(self, name, value)

    @property
    def gate(self):
        return (self.gate_sigma_s, self.gate_sigma_i)

    @property
    def spectral(self):
        return (self.spec_sigma_s, self.spec_sigma_i)


@dataclass(frozen=True)
class CountModel:
    """Absolute rates (Hz) and counting parameters.

    ``pair_rate_peak`` is the noiseless pair rate at the brightest point of
    the scan it calibrates; singles rates are the phase-averaged levels.
    Backgrounds are flat and added on top.
    """

    pair_rate_peak: float
    background_rate: float = 0.0
    singles_rates: tuple = (0.0, 0.0)
    singles_background: tuple = (0.0, 0.0)
    dwell: float = 1.0
    seed: int = 0

    def __post_init__(self):
        rates = [self.pair_rate_peak, self.background_rate, *self.singles_rates,
                 *self.singles_background]
        if any(not (r >= 0 and math.isfinite(r)) for r in rates):
            raise ValueError("rates must be finite and >= 0")
        if not (self.dwell > 0 and math.isfinite(self.dwell)):
            raise ValueError("dwell must be positive")
        object.__setattr__(self, "singles_rates", tuple(float(r) for r in self.singles_rates))
        object.__setattr__(self, "singles_background",
                           tuple(float(r) for r in self.singles_background))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    step: float
    count: int
    unit: str = ""

    def __post_init__(self):
        if self.count < 1 or not self.step > 0:
            raise ValueError("axis needs count >= 1 and step > 0")
        if "," in self.name or "," in self.unit:
            raise ValueError("axis name and unit may not contain commas")

    @classmethod
    def centered(cls, name, center, half_width, count, unit=""):
        step = 2 * half_width / (count - 1)
        return cls(name, center - half_width, step, count, unit)

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


@dataclass
class Histogram2D:
    """Values on a rectangular grid, indexed ``values[ix, iy]``."""

    x: Axis
    y: Axis
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.x.count, self.y.count):
            raise ValueError(f"values shape {values.shape} does not match axes "
                             f"({self.x.count}, {self.y.count})")
        if values.size and values.min() < 0:
            # round-off from the closed forms is tolerated and clipped
            if values.min() < -1e-12 * max(values.max(), 0.0):
                raise ValueError("histogram values must be non-negative")
            values = np.clip(values, 0, None)
        self.values = values

    def mesh(self):
        return np.meshgrid(self.x.points, self.y.points, indexing="ij")

    def total(self) -> float:
        return float(self.values.sum() * self.x.step * self.y.step)

    def to_csv(self, path):
        integer = np.issubdtype(self.values.dtype, np.integer)
        with open(path, "w", newline="") as fh:
            for tag, ax in (("axis_x", self.x), ("axis_y", self.y)):
                fh.write(f"# {tag}: {ax.name},{ax.start!r},{ax.step!r},{ax.count},{ax.unit}\n")
            for ix in range(self.x.count):
                for iy in range(self.y.count):
                    v = self.values[ix, iy]
                    fh.write(f"{ix},{iy},{int(v) if integer else repr(float(v))}\n")

    @classmethod
    def from_csv(cls, path) -> "Histogram2D":
        axes = {}
        rows = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    tag, _, rest = line[1:].partition(":")
                    tag = tag.strip()
                    if tag not in ("axis_x", "axis_y"):
                        continue
                    parts = rest.strip().split(",")
                    if len(parts) != 5:
                        raise FormatError("axis header needs name,start,step,count,unit", lineno)
                    try:
                        axes[tag] = Axis(parts[0], float(parts[1]), float(parts[2]),
                                         int(parts[3]), parts[4])
                    except ValueError as exc:
                        raise FormatError(f"bad axis header: {exc}", lineno) from None
                    continue
                parts = line.split(",")
                if len(parts) != 3:
                    raise FormatError("expected ix,iy,value", lineno)
                try:
                    rows.append((int(parts[0]), int(parts[1]), parts[2], lineno))
                except ValueError:
                    raise FormatError("indices must be integers", lineno) from None
        if set(axes) != {"axis_x", "axis_y"}:
            raise FormatError("missing axis_x/axis_y header")
        ax, ay = axes["axis_x"], axes["axis_y"]
        integer = all(_is_int(r[2]) for r in rows)
        values = np.zeros((ax.count, ay.count), dtype=np.int64 if integer else float)
        seen = np.zeros(values.shape, dtype=bool)
        for ix, iy, raw, lineno in rows:
            if not (0 <= ix < ax.count and 0 <= iy < ay.count):
                raise FormatError(f"index ({ix}, {iy}) outside grid", lineno)
            try:
                v = int(raw) if integer else float(raw)
            except ValueError:
                raise FormatError(f"bad value {raw!r}", lineno) from None
            if not np.isfinite(v) or v < 0:
                raise FormatError(f"value must be finite and >= 0, got {raw}", lineno)
            values[ix, iy] = v
            seen[ix, iy] = True
        if not seen.all():
            raise FormatError(f"{int((~seen).sum())} grid cells missing")
        return cls(ax, ay, values)


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True


@dataclass(frozen=True)
class CountRecord:
    """One setting of a phase scan. ``expected_*`` are mean counts in the dwell."""

    phi_s: float
    phi_i: float
    gate_s: float
    gate_i: float
    expected_cc: float
    counts_cc: int
    expected_ss: float
    counts_ss: int
    expected_si: float
    counts_si: int
    dwell_s: float

    def __post_init__(self):
        for name in ("counts_cc", "counts_ss", "counts_si"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer")


RECORD_FIELDS = ["phi_s", "phi_i", "gate_s", "gate_i", "expected_cc", "counts_cc",
                 "expected_ss", "counts_ss", "expected_si", "counts_si", "dwell_s"]
_INT_FIELDS = {"counts_cc", "counts_ss", "counts_si"}


def write_records(records: Sequence[CountRecord], path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        for rec in records:
            writer.writerow([getattr(rec, f) if f in _INT_FIELDS else repr(float(getattr(rec, f)))
                             for f in RECORD_FIELDS])


def read_records(path) -> List[CountRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RECORD_FIELDS:
            raise FormatError(f"header must be {','.join(RECORD_FIELDS)}", 1)
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(RECORD_FIELDS):
                raise FormatError(f"expected {len(RECORD_FIELDS)} columns", lineno)
            try:
                kw = {f: int(v) if f in _INT_FIELDS else float(v)
                      for f, v in zip(RECORD_FIELDS, row)}
                out.append(CountRecord(**kw))
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
    return out


# -- instrument response -------------------------------------------------------

def convolve_map(hmap: Histogram2D, sigma_x: float, sigma_y: float) -> Histogram2D:
    """Separable Gaussian blur with per-axis standard deviations in axis units.

    The discrete kernel is normalised, so the integral is preserved as long
    as the map's mass stays inside the grid.
    """
    values = np.asarray(hmap.values, dtype=float)
    for axis, (sigma, ax) in enumerate(((sigma_x, hmap.x), (sigma_y, hmap.y))):
        if sigma < 0:
            raise ValueError("response width must be >= 0")
        if sigma == 0:
            continue
        if ax.step >= sigma / 2:
            raise ValueError(f"grid step {ax.step:g} on axis {ax.name!r} is too coarse "
                             f"for a response of {sigma:g} (needs step < sigma/2)")
        values = gaussian_filter1d(values, sigma / ax.step, axis=axis, mode="constant",
                                   truncate=8.0)
    return Histogram2D(hmap.x, hmap.y, values)


def model_map(kind: str, state: GaussianBiphoton, settings: Optional[FransonSettings],
              x: Axis, y: Axis) -> Histogram2D:
    """Ideal joint intensity on a grid; ``settings=None`` means no interferometer."""
    xs, ys = np.meshgrid(x.points, y.points, indexing="ij")
    if kind == "jsi":
        vals = jsi_value(state, xs, ys) if settings is None else jsi_after(settings, state, xs, ys)
    elif kind == "jti":
        vals = jti_value(state, xs, ys) if settings is None else jti_after(settings, state, xs, ys)
    else:
        raise ValueError(f"unknown map kind {kind!r}; expected 'jsi' or 'jti'")
    return Histogram2D(x, y, vals)


def expected_scan(kind: str, state: GaussianBiphoton, settings: Optional[FransonSettings],
                  response: ResponseModel, x: Axis, y: Axis,
                  count_model: Optional[CountModel] = None) -> Histogram2D:
    """Expected joint spectral or temporal map as the instrument records it.

    Without a count model the blurred model intensity is returned. With one,
    the map is converted to Hz such that the source map (no interferometer,
    same response and grid) peaks at ``pair_rate_peak``, and the flat
    background is added.
    """
    sig = response.spectral if kind == "jsi" else response.gate
    out = convolve_map(model_map(kind, state, settings, x, y), *sig)
    if count_model is None:
        return out
    source = out if settings is None else convolve_map(model_map(kind, state, None, x, y), *sig)
    scale = count_model.pair_rate_peak / source.values.max()
    return Histogram2D(x, y, out.values * scale + count_model.background_rate)


def background_visibility(v_ideal: float, mean_rate_c0: float, background_b: float) -> float:
    """Fringe visibility after adding a flat background B to a fringe of mean C0."""
    if not mean_rate_c0 > 0:
        raise ValueError("mean coincidence rate must be positive")
    if background_b < 0:
        raise ValueError("background must be >= 0")
    return v_ideal / (1 + background_b / mean_rate_c0)


def peak_snr(v_ideal: float, mean_rate_c0: float, background_b: float) -> float:
    """Signal-to-noise ratio at the fringe maximum, C0(1+V)/B."""
    return mean_rate_c0 * (1 + v_ideal) / background_b


# -- counting ------------------------------------------------------------------

def rng_for(seed: int, stream_index: int) -> np.random.Generator:
    """Independent generator for one (seed, stream) pair."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream_index),)))


def sample_counts(expected: float, dwell: float, seed: int, stream_index: int) -> int:
    """Poisson count with mean ``expected * dwell`` from stream ``stream_index``."""
    if expected < 0:
        raise ValueError("expected rate must be >= 0")
    if expected == 0:
        return 0
    return int(rng_for(seed, stream_index).poisson(expected * dwell))


def sample_map(hmap: Histogram2D, dwell: float, seed: int, stream_index: int = 0) -> Histogram2D:
    """Poisson-sample a rate map (Hz) into integer counts."""
    counts = rng_for(seed, stream_index).poisson(np.asarray(hmap.values, float) * dwell)
    return Histogram2D(hmap.x, hmap.y, counts.astype(np.int64))


@dataclass
class _PhaseModel:
    """Calibrated coincidence/singles rates (Hz) versus total arm phases."""

    state: GaussianBiphoton
    settings: FransonSettings
    count_model: CountModel
    response: ResponseModel
    gate: tuple = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        s, cm = self.settings, self.count_model
        if self.gate is None:
            self.gate = (-s.arm_s.tau / 2, -s.arm_i.tau / 2)
        g_s, g_i = self.gate
        comp = coincidence_components(s, self.state, g_s, g_i, self.response.gate)
        peak = comp.dc + abs(comp.sum) + abs(comp.diff) + abs(comp.single_s) + abs(comp.single_i)
        self.comp = comp
        self.cc_scale = cm.pair_rate_peak / peak if peak > 0 else 0.0
        self.singles = []
        for tau, sigma, g, gs, rate in (
                (s.arm_s.tau, self.state.sigma_s, g_s, self.response.gate_sigma_s,
                 cm.singles_rates[0]),
                (s.arm_i.tau, self.state.sigma_i, g_i, self.response.gate_sigma_i,
                 cm.singles_rates[1])):
            dc, cross = singles_components(tau, sigma, self.state.rho, g, gs)
            self.singles.append((rate, float(cross / dc)))

    def rates(self, theta_s, theta_i):
        cm = self.count_model
        # the closed form can dip a few ulp below zero at a perfect null
        cc = max(self.cc_scale * self.comp.value(theta_s, theta_i), 0.0) + cm.background_rate
        (r_s, m_s), (r_i, m_i) = self.singles
        ss = r_s * (1 + m_s * math.cos(theta_s)) + cm.singles_background[0]
        si = r_i * (1 + m_i * math.cos(theta_i)) + cm.singles_background[1]
        return float(cc), ss, si

    def record(self, theta_s, theta_i, dwell, seed, index) -> CountRecord:
        cc, ss, si = self.rates(theta_s, theta_i)
        return CountRecord(
            phi_s=float(theta_s), phi_i=float(theta_i),
            gate_s=float(self.gate[0]), gate_i=float(self.gate[1]),
            expected_cc=cc * dwell, counts_cc=sample_counts(cc, dwell, seed, 3 * index),
            expected_ss=ss * dwell, counts_ss=sample_counts(ss, dwell, seed, 3 * index + 1),
            expected_si=si * dwell, counts_si=sample_counts(si, dwell, seed, 3 * index + 2),
            dwell_s=float(dwell),
        )


def phase_fringe_scan(state: GaussianBiphoton, settings_base: FransonSettings,
                      phi_s_values, phi_i_values, count_model: CountModel,
                      response: Optional[ResponseModel] = None, gate=None) -> List[CountRecord]:
    """Coincidence and singles records over a grid of signal and idler phases.

    Phases are total arm phases (referenced to the fringe); only the delays
    of ``settings_base`` are used. The gates sit halfway between the short
    and long arrival times unless ``gate`` is given. Records are ordered
    signal-phase-major and each draws from its own random streams.
    """
    model = _PhaseModel(state, settings_base, count_model, response or ResponseModel(), gate)
    records = []
    n_i = len(phi_i_values)
    for a, th_s in enumerate(phi_s_values):
        for b, th_i in enumerate(phi_i_values):
            records.append(model.record(th_s, th_i, count_model.dwell, count_model.seed,
                                        a * n_i + b))
    return records


#: Table layout: signal columns a(+1), a(-1), a'(+1), a'(-1); idler rows b(+1),
#: b(-1), b'(+1), b'(-1). The -1 outcome is the same setting shifted by pi.
BELL_LAYOUT = ("+", "-", "+", "-")


@dataclass
class BellTable:
    signal_phases: list
    idler_phases: list
    records: list          # records[row][col]
    counts: np.ndarray     # counts[row, col], row = idler setting
    expected: np.ndarray   # mean counts

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["idler_phase \\ signal_phase"] + [repr(p) for p in self.signal_phases])
            for phase, row in zip(self.idler_phases, self.counts):
                w.writerow([repr(phase)] + [int(c) for c in row])


def bell_phases(a, a_prime, b, b_prime):
    """Column (signal) and row (idler) phases for the outcome mapping
    (+1) -> phi, (-1) -> phi + pi."""
    cols = [a, a + math.pi, a_prime, a_prime + math.pi]
    rows = [b, b + math.pi, b_prime, b_prime + math.pi]
    return [c % TWO_PI for c in cols], [r % TWO_PI for r in rows]


def bell_experiment(state: GaussianBiphoton, tau_s: float, tau_i: float,
                    a: float, a_prime: float, b: float, b_prime: float,
                    count_model: CountModel, response: Optional[ResponseModel] = None,
                    dwell: float = 200.0, seed: Optional[int] = None) -> BellTable:
    """Simulate the 16 phase combinations of a CHSH measurement.

    Returns a 4x4 table laid out with idler settings as rows and signal
    settings as columns, each an independent Poisson draw over ``dwell`` s.
    """
    seed = count_model.seed if seed is None else seed
    settings = FransonSettings.referenced(state, tau_s, tau_i)
    model = _PhaseModel(state, settings, count_model, response or ResponseModel())
    cols, rows = bell_phases(a, a_prime, b, b_prime)
    records = [[model.record(cs, ri, dwell, seed, 4 * r + c) for c, cs in enumerate(cols)]
               for r, ri in enumerate(rows)]
    counts = np.array([[rec.counts_cc for rec in row] for row in records], dtype=np.int64)
    expected = np.array([[rec.expected_cc for rec in row] for row in records])
    return BellTable(cols, rows, records, counts, expected)


@dataclass(frozen=True)
class FringeExpectation:
    """Noiseless fringe parameters of a calibrated phase scan (rates in Hz)."""

    c0_signal: float
    background: float
    visibility_ideal: float
    visibility: float
    singles_modulation: tuple


def expected_fringe(state: GaussianBiphoton, settings_base: FransonSettings,
                    count_model: CountModel, response: Optional[ResponseModel] = None,
                    gate=None) -> FringeExpectation:
    """Mean level and visibility the phase scan should show, background included."""
    model = _PhaseModel(state, settings_base, count_model, response or ResponseModel(), gate)
    c0 = model.cc_scale * float(model.comp.dc)
    v_ideal = float(model.comp.visibility)
    vis = background_visibility(v_ideal, c0, count_model.background_rate) if c0 > 0 else 0.0
    return FringeExpectation(c0, count_model.background_rate, v_ideal, vis,
                             tuple(m for _, m in model.singles))
