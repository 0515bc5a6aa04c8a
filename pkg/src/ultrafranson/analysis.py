"""Parameter recovery from joint maps and count tables.

Two-stage Gaussian fits (1D marginals, then the correlation with the
marginals held fixed), conditional and diagonal widths, removal of a
Gaussian instrument response, sinusoidal fringe fits and CHSH analysis with
Poisson error propagation.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .biphoton import RHO_LIMIT
from .detector import CountRecord, Histogram2D

TWO_PI = 2 * math.pi


class FitError(RuntimeError):
    """A fit could not be carried out on the given data."""


# -- Gaussian fits ---------------------------------------------------------------

@dataclass(frozen=True)
class GaussianFit1D:
    amplitude: float
    center: float
    sigma: float
    offset: float
    amplitude_err: float = 0.0
    center_err: float = 0.0
    sigma_err: float = 0.0
    offset_err: float = 0.0


def gaussian_1d(x, amplitude, center, sigma, offset):
    return amplitude * np.exp(-0.5 * ((x - center) / sigma) ** 2) + offset


def _moments(x, y):
    w = np.clip(y - np.min(y), 0, None)
    if w.sum() <= 0:
        w = np.clip(y, 0, None)
    if w.sum() <= 0:
        raise FitError("no positive mass to fit")
    mean = np.sum(w * x) / w.sum()
    var = np.sum(w * (x - mean) ** 2) / w.sum()
    return mean, math.sqrt(max(var, 1e-300))


def fit_gaussian_1d(x, y, sigma=None, offset: bool = True,
                    poisson: bool = False) -> GaussianFit1D:
    """Least-squares Gaussian fit seeded by weighted moments.

    ``sigma`` are per-point standard errors; when given they are treated as
    absolute, otherwise the parameter errors are scaled by the residuals.
    With ``poisson`` the variances are taken from the fitted model itself
    (refitted twice), which avoids the bias of count-derived weights.
    """
    if poisson:
        y = np.asarray(y, dtype=float)
        fit = fit_gaussian_1d(x, y, _poisson_sigma(y), offset)
        for _ in range(2):
            pred = gaussian_1d(np.asarray(x, float), fit.amplitude, fit.center, fit.sigma,
                               fit.offset)
            fit = fit_gaussian_1d(x, y, _poisson_sigma(pred), offset)
        return fit
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise FitError("need at least 4 points for a Gaussian fit")
    mean, sd = _moments(x, y)
    span = x.max() - x.min()
    p0 = [y.max() - (y.min() if offset else 0), mean, sd]
    lower = [0.0, x.min() - span, 1e-9 * span]
    upper = [np.inf, x.max() + span, 10 * span]
    if offset:
        p0.append(max(y.min(), 0.0))
        lower.append(-np.inf)
        upper.append(np.inf)
        func = gaussian_1d
    else:
        def func(xx, a, c, s):
            return gaussian_1d(xx, a, c, s, 0.0)
    p0[0] = max(p0[0], 1e-300)
    p0[2] = min(max(p0[2], lower[2] * 10), upper[2] / 2)
    try:
        popt, pcov = curve_fit(func, x, y, p0=p0, sigma=sigma, absolute_sigma=sigma is not None,
                               bounds=(lower, upper), maxfev=20000, xtol=1e-14, ftol=1e-14)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"Gaussian fit did not converge: {exc}") from None
    perr = np.sqrt(np.clip(np.diag(pcov), 0, None))
    perr = np.where(np.isfinite(perr), perr, np.nan)
    if not offset:
        popt = np.append(popt, 0.0)
        perr = np.append(perr, 0.0)
    return GaussianFit1D(*map(float, popt), *map(float, perr))


@dataclass(frozen=True)
class GaussianFit2D:
    center_x: float
    center_y: float
    sigma_x: float
    sigma_y: float
    rho: float
    amplitude: float
    offset: float
    center_x_err: float = 0.0
    center_y_err: float = 0.0
    sigma_x_err: float = 0.0
    sigma_y_err: float = 0.0
    rho_err: float = 0.0
    amplitude_err: float = 0.0
    offset_err: float = 0.0
    rho_unclamped: Optional[float] = None


def gaussian_2d(x, y, amplitude, cx, cy, sx, sy, rho, offset):
    u = (x - cx) / sx
    v = (y - cy) / sy
    q = (u**2 + v**2 - 2 * rho * u * v) / (2 * (1 - rho**2))
    return amplitude * np.exp(-q) + offset


def _poisson_sigma(values):
    return np.sqrt(np.clip(values, 1, None))


def _is_counts(hmap: Histogram2D) -> bool:
    return np.issubdtype(np.asarray(hmap.values).dtype, np.integer)


def _check_map(hmap: Histogram2D):
    if hmap.x.count < 5 or hmap.y.count < 5:
        raise FitError("map needs at least 5x5 bins")
    if not np.any(np.asarray(hmap.values) > 0):
        raise FitError("map has no positive mass")


def fit_gaussian_2d(hmap: Histogram2D, poisson: Optional[bool] = None) -> GaussianFit2D:
    """Fit a correlated 2D Gaussian in two stages.

    The centres and widths come from 1D Gaussian fits to the two marginals;
    the correlation, amplitude and offset are then fitted on the full map
    with those held fixed. Integer maps get Poisson weights by default.
    """
    _check_map(hmap)
    poisson = _is_counts(hmap) if poisson is None else poisson
    vals = np.asarray(hmap.values, dtype=float)
    xs, ys = hmap.x.points, hmap.y.points

    marg_x = vals.sum(axis=1)
    marg_y = vals.sum(axis=0)
    fx = fit_gaussian_1d(xs, marg_x, poisson=poisson)
    fy = fit_gaussian_1d(ys, marg_y, poisson=poisson)

    X, Y = hmap.mesh()
    w = np.clip(vals - vals.min(), 0, None)
    cov = np.sum(w * (X - fx.center) * (Y - fy.center)) / w.sum()
    rho0 = float(np.clip(cov / (fx.sigma * fy.sigma), -0.99, 0.99))

    fixed = [fx.center, fy.center, fx.sigma, fy.sigma]
    seeds = [[vals.max(), r, max(vals.min(), 0.0)]
             for r in sorted({rho0, math.copysign(0.999, rho0 or 1.0), 0.0})]
    best = _fit_correlation(X, Y, vals, poisson, fixed, seeds)
    if best is None:
        raise FitError("correlation fit did not converge")
    popt, pcov = best
    perr = np.sqrt(np.clip(np.diag(pcov), 0, None))

    # rho is conditional on the fixed marginals; add their uncertainty by
    # refitting with each one shifted by its standard error
    rho_var = perr[1] ** 2
    for k, err in enumerate([fx.center_err, fy.center_err, fx.sigma_err, fy.sigma_err]):
        if not (err > 0 and math.isfinite(err)):
            continue
        shifted = list(fixed)
        shifted[k] += err
        alt = _fit_correlation(X, Y, vals, poisson, shifted, [list(popt)])
        if alt is not None:
            rho_var += (alt[0][1] - popt[1]) ** 2

    return GaussianFit2D(
        center_x=fx.center, center_y=fy.center, sigma_x=fx.sigma, sigma_y=fy.sigma,
        rho=float(popt[1]), amplitude=float(popt[0]), offset=float(popt[2]),
        center_x_err=fx.center_err, center_y_err=fy.center_err,
        sigma_x_err=fx.sigma_err, sigma_y_err=fy.sigma_err,
        rho_err=float(math.sqrt(rho_var)), amplitude_err=float(perr[0]),
        offset_err=float(perr[2]),
    )


def _fit_correlation(X, Y, vals, poisson, fixed, seeds):
    """Least-squares (amplitude, rho, offset) with centres and widths fixed.

    Several starting points are tried since the cost surface in rho can be
    very sharp; returns ``(popt, pcov)`` of the lowest cost or None.
    """
    cx, cy, sx, sy = fixed

    def model(_, amp, rho, off):
        return gaussian_2d(X, Y, amp, cx, cy, sx, sy, rho, off).ravel()

    if poisson:
        first = _fit_correlation(X, Y, vals, False, fixed, seeds)
        if first is None:
            return None
        popt = first[0]
        for _ in range(2):
            weights = _poisson_sigma(model(None, *popt))
            found = _weighted_correlation_fit(model, vals, weights, [list(popt)])
            if found is None:
                return None
            popt, pcov = found
        return popt, pcov
    return _weighted_correlation_fit(model, vals, None, seeds)


def _weighted_correlation_fit(model, vals, weights, seeds):
    best = None
    for p0 in seeds:
        p0 = [p0[0], float(np.clip(p0[1], -RHO_LIMIT, RHO_LIMIT)), p0[2]]
        try:
            popt, pcov = curve_fit(
                model, None, vals.ravel(), p0=p0, sigma=weights,
                absolute_sigma=weights is not None,
                bounds=([0, -RHO_LIMIT, -np.inf], [np.inf, RHO_LIMIT, np.inf]),
                maxfev=20000, xtol=1e-15, ftol=1e-15)
        except (RuntimeError, ValueError):
            continue
        resid = model(None, *popt) - vals.ravel()
        if weights is not None:
            resid = resid / weights
        cost = float(resid @ resid)
        if best is None or cost < best[0]:
            best = (cost, popt, pcov)
    return None if best is None else best[1:]


@dataclass(frozen=True)
class WidthEstimate:
    value: float
    err: float


def heralded_widths(hmap: Histogram2D, fit: Optional[GaussianFit2D] = None,
                    n_slices: int = 5, poisson: Optional[bool] = None):
    """Conditional widths, averaged over slices within +-1 sd of the centre.

    Returns ``(heralded_x, heralded_y)`` as :class:`WidthEstimate`; the error
    is the slice-to-slice spread divided by sqrt(n) combined with the mean
    single-slice fit error.
    """
    _check_map(hmap)
    fit = fit or fit_gaussian_2d(hmap, poisson)
    poisson = _is_counts(hmap) if poisson is None else poisson
    vals = np.asarray(hmap.values, dtype=float)
    out = []
    for axis, (along, across, c_across, s_across) in enumerate((
            (hmap.x, hmap.y, fit.center_y, fit.sigma_y),
            (hmap.y, hmap.x, fit.center_x, fit.sigma_x))):
        positions = c_across + s_across * np.linspace(-1, 1, n_slices)
        idx = np.unique(np.clip(np.rint((positions - across.start) / across.step), 0,
                                across.count - 1).astype(int))
        widths, errs = [], []
        for k in idx:
            cut = vals[:, k] if axis == 0 else vals[k, :]
            if not np.any(cut > 0):
                continue
            f = fit_gaussian_1d(along.points, cut, poisson=poisson)
            widths.append(f.sigma)
            errs.append(f.sigma_err)
        if not widths:
            raise FitError("no usable conditional slices")
        widths = np.array(widths)
        spread = widths.std(ddof=1) / math.sqrt(len(widths)) if len(widths) > 1 else 0.0
        out.append(WidthEstimate(float(widths.mean()),
                                 float(math.hypot(spread, np.nanmean(errs)))))
    return out[0], out[1]


def _projection(hmap: Histogram2D, sign: int):
    X, Y = hmap.mesh()
    u = X + sign * Y
    dx, dy = hmap.x.step, hmap.y.step
    if math.isclose(dx, dy, rel_tol=1e-9):
        width, correction = dx, 0.0
        origin = hmap.x.start + sign * hmap.y.start
        k = np.rint((u - origin) / width).astype(int)
        k -= k.min()
        sums = np.bincount(k.ravel(), weights=np.asarray(hmap.values, float).ravel())
        centers = origin + width * (np.arange(sums.size) + (u - origin).min() / width)
        centers = u.min() + width * np.arange(sums.size)
    else:
        width = max(dx, dy)
        correction = width**2 / 12
        edges = np.arange(u.min() - width / 2, u.max() + width, width)
        sums, _ = np.histogram(u.ravel(), bins=edges,
                               weights=np.asarray(hmap.values, float).ravel())
        centers = 0.5 * (edges[1:] + edges[:-1])
    return centers, sums, correction


def diagonal_widths(hmap: Histogram2D, poisson: Optional[bool] = None):
    """Widths of the x+y and x-y projections from 1D Gaussian fits.

    Returns ``(diag_plus, diag_minus)`` as :class:`WidthEstimate`.
    """
    _check_map(hmap)
    poisson = _is_counts(hmap) if poisson is None else poisson
    out = []
    for sign in (+1, -1):
        centers, sums, correction = _projection(hmap, sign)
        f = fit_gaussian_1d(centers, sums, poisson=poisson)
        var = max(f.sigma**2 - correction, 0.0)
        out.append(WidthEstimate(math.sqrt(var), f.sigma_err))
    return out[0], out[1]


# -- deconvolution ---------------------------------------------------------------

def deconvolve_width(sigma_meas: float, sigma_resp: float) -> float:
    """Remove a Gaussian response from a measured standard deviation."""
    if sigma_resp < 0:
        raise ValueError("response width must be >= 0")
    if sigma_resp >= sigma_meas:
        raise ValueError(f"response width {sigma_resp} is not smaller than the "
                         f"measured width {sigma_meas}")
    return math.sqrt(sigma_meas**2 - sigma_resp**2)


def deconvolve_covariance(fit: GaussianFit2D, resp_x: float, resp_y: float) -> GaussianFit2D:
    """Subtract the response variance from each axis, keeping the covariance.

    A correlation pushed to |rho| >= 1 is clamped with a warning; the
    unclamped value is kept in ``rho_unclamped``.
    """
    tx = deconvolve_width(fit.sigma_x, resp_x)
    ty = deconvolve_width(fit.sigma_y, resp_y)
    gain = fit.sigma_x * fit.sigma_y / (tx * ty)
    rho = fit.rho * gain
    raw = None
    if abs(rho) >= 1:
        warnings.warn(f"deconvolved correlation {rho:.6f} clamped to +-{RHO_LIMIT}",
                      RuntimeWarning, stacklevel=2)
        raw, rho = rho, math.copysign(RHO_LIMIT, rho)
    # keep the integral of the Gaussian unchanged
    amp = fit.amplitude * gain * math.sqrt((1 - fit.rho**2) / (1 - rho**2))
    return replace(
        fit, sigma_x=tx, sigma_y=ty, rho=rho, amplitude=amp,
        sigma_x_err=fit.sigma_x_err * fit.sigma_x / tx,
        sigma_y_err=fit.sigma_y_err * fit.sigma_y / ty,
        rho_err=fit.rho_err * gain, rho_unclamped=raw,
    )


# -- fringes ---------------------------------------------------------------------

@dataclass(frozen=True)
class FringeFit:
    c0: float
    visibility: float
    phase: float
    c0_err: float
    visibility_err: float
    phase_err: float


@dataclass(frozen=True)
class PhaseBins:
    """Records grouped by total phase sum; sums of counts and bin occupancy."""

    phase: np.ndarray
    n: np.ndarray
    cc: np.ndarray
    ss: np.ndarray
    si: np.ndarray

    def mean(self, channel: str = "cc"):
        return getattr(self, channel) / self.n

    def sigma(self, channel: str = "cc"):
        return np.sqrt(np.clip(getattr(self, channel), 1, None)) / self.n


def bin_by_phase_sum(records: Sequence[CountRecord], n_bins: Optional[int] = None) -> PhaseBins:
    """Group scan records by (phi_s + phi_i) mod 2pi.

    Without ``n_bins`` records are grouped by exactly coinciding phase sums,
    which is what a regular phase grid produces; otherwise equal-width bins
    are used and each bin is placed at its mean phase.
    """
    if not records:
        raise FitError("no records to bin")
    total = np.array([(r.phi_s + r.phi_i) % TWO_PI for r in records])
    if n_bins is None:
        key = np.rint(total / 1e-9).astype(np.int64) % int(round(TWO_PI / 1e-9))
        _, idx = np.unique(key, return_inverse=True)
    else:
        idx = np.minimum((total / TWO_PI * n_bins).astype(int), n_bins - 1)
        _, idx = np.unique(idx, return_inverse=True)
    n = np.bincount(idx).astype(float)

    def summed(attr):
        return np.bincount(idx, weights=[getattr(r, attr) for r in records])

    # circular mean of the member phases
    phase = np.angle(np.bincount(idx, weights=np.cos(total))
                     + 1j * np.bincount(idx, weights=np.sin(total))) % TWO_PI
    return PhaseBins(phase, n, summed("counts_cc"), summed("counts_ss"), summed("counts_si"))


def fit_fringe(phase, counts, sigma=None) -> FringeFit:
    """Weighted least-squares fit of ``C0 (1 + V cos(phase - phase0))``.

    Weights are inverse variances; without ``sigma`` the counts themselves
    are the variances (Poisson). The background is not subtracted.
    """
    phase = np.asarray(phase, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if phase.size < 5:
        raise FitError("need at least 5 phase points")
    order = np.sort(phase)
    step = np.median(np.diff(order)) if phase.size > 1 else 0.0
    if order[-1] - order[0] + step < TWO_PI - 1e-9:
        raise FitError("phase points must span at least one period")
    if not np.any(counts > 0):
        raise FitError("all counts are zero")
    sigma = _poisson_sigma(counts) if sigma is None else np.asarray(sigma, dtype=float)
    design = np.column_stack([np.ones_like(phase), np.cos(phase), np.sin(phase)])
    w = 1 / sigma**2
    normal = design.T @ (design * w[:, None])
    cov = np.linalg.inv(normal)
    a, b, c = cov @ (design.T @ (w * counts))
    amp = math.hypot(b, c)
    vis = amp / a
    phi0 = math.atan2(c, b) % TWO_PI
    # propagate (a, b, c) -> (C0, V, phi0)
    jac = np.zeros((3, 3))
    jac[0] = [1, 0, 0]
    if amp > 0:
        jac[1] = [-amp / a**2, b / (amp * a), c / (amp * a)]
        jac[2] = [0, -c / amp**2, b / amp**2]
    pc = jac @ cov @ jac.T
    err = np.sqrt(np.clip(np.diag(pc), 0, None))
    if vis > 1 + 1e-9:
        warnings.warn(f"fitted visibility {vis:.4f} exceeds 1", RuntimeWarning, stacklevel=2)
    return FringeFit(float(a), float(vis), float(phi0), float(err[0]), float(err[1]),
                     float(err[2]) if amp > 0 else math.nan)


# -- CHSH ------------------------------------------------------------------------

def chsh_correlation(r_pp, r_pm, r_mp, r_mm):
    """Correlation coefficient of one joint measurement and its Poisson error.

    ``E = (R++ + R-- - R+- - R-+)/N``; with concordant sum P and discordant
    sum M, ``sigma_E = 2 sqrt(P M / N^3)``.
    """
    concordant = float(r_pp + r_mm)
    discordant = float(r_pm + r_mp)
    total = concordant + discordant
    if total <= 0:
        raise ValueError("correlation needs a positive total count")
    e = (concordant - discordant) / total
    return e, 2 * math.sqrt(concordant * discordant / total**3)


def chsh_parameter(e_ab, e_ab_prime, e_a_prime_b, e_a_prime_b_prime):
    """``S = |E(a,b) + E(a,b') + E(a',b) - E(a',b')|`` from (E, sigma_E) pairs."""
    terms = [e_ab, e_ab_prime, e_a_prime_b, e_a_prime_b_prime]
    s = abs(e_ab[0] + e_ab_prime[0] + e_a_prime_b[0] - e_a_prime_b_prime[0])
    return s, math.sqrt(sum(t[1] ** 2 for t in terms))


@dataclass(frozen=True)
class BellResult:
    E_ab: float
    E_ab_prime: float
    E_a_prime_b: float
    E_a_prime_b_prime: float
    sigma_ab: float
    sigma_ab_prime: float
    sigma_a_prime_b: float
    sigma_a_prime_b_prime: float
    S: float
    sigma_S: float

    @property
    def correlators(self):
        return (self.E_ab, self.E_ab_prime, self.E_a_prime_b, self.E_a_prime_b_prime)

    @property
    def violation_sigmas(self) -> float:
        """Distance of S above the local bound 2, in standard errors."""
        return (self.S - 2) / self.sigma_S if self.sigma_S > 0 else math.inf


def bell_from_table(counts) -> BellResult:
    """CHSH analysis of a 4x4 count table.

    Rows are idler settings b(+1), b(-1), b'(+1), b'(-1); columns are signal
    settings a(+1), a(-1), a'(+1), a'(-1).
    """
    t = np.asarray(counts, dtype=float)
    if t.shape != (4, 4):
        raise ValueError("count table must be 4x4")
    if np.any(t < 0):
        raise ValueError("counts must be non-negative")

    def block(rows, cols):
        (r_p, r_m), (c_p, c_m) = rows, cols
        # R_{signal outcome, idler outcome}
        return chsh_correlation(t[r_p, c_p], t[r_m, c_p], t[r_p, c_m], t[r_m, c_m])

    b, b_prime = (0, 1), (2, 3)
    a, a_prime = (0, 1), (2, 3)
    e_ab = block(b, a)
    e_abp = block(b_prime, a)
    e_apb = block(b, a_prime)
    e_apbp = block(b_prime, a_prime)
    s, sigma_s = chsh_parameter(e_ab, e_abp, e_apb, e_apbp)
    return BellResult(e_ab[0], e_abp[0], e_apb[0], e_apbp[0],
                      e_ab[1], e_abp[1], e_apb[1], e_apbp[1], s, sigma_s)


# -- reports ---------------------------------------------------------------------

def format_report(items) -> str:
    """Flat ``key = value`` text, one entry per line, floats at full precision."""
    lines = []
    for key, value in dict(items).items():
        if isinstance(value, (float, np.floating)):
            value = repr(float(value))
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def fit_report(fit: GaussianFit2D, prefix: str = "") -> dict:
    out = {}
    for name in ("center_x", "center_y", "sigma_x", "sigma_y", "rho", "amplitude", "offset"):
        out[prefix + name] = getattr(fit, name)
        out[prefix + name + "_err"] = getattr(fit, name + "_err")
    if fit.rho_unclamped is not None:
        out[prefix + "rho_unclamped"] = fit.rho_unclamped
    return out


def _widths_from_cov(sx, sy, rho):
    h = math.sqrt(max(1 - rho**2, 0.0))
    return {
        "heralded_x": sx * h,
        "heralded_y": sy * h,
        "diag_plus": math.sqrt(sx**2 + sy**2 + 2 * rho * sx * sy),
        "diag_minus": math.sqrt(max(sx**2 + sy**2 - 2 * rho * sx * sy, 0.0)),
    }


def characterize(hmap: Histogram2D, response_x: float = 0.0, response_y: float = 0.0,
                 n_slices: int = 5, poisson: Optional[bool] = None) -> dict:
    """Full source characterisation of one joint map.

    Fits the map, measures heralded and diagonal widths directly on it and,
    when a response is given, adds the deconvolved marginals, correlation and
    the heralded/diagonal widths implied by the deconvolved covariance.
    """
    fit = fit_gaussian_2d(hmap, poisson)
    herald_x, herald_y = heralded_widths(hmap, fit, n_slices, poisson)
    d_plus, d_minus = diagonal_widths(hmap, poisson)
    out = fit_report(fit)
    out.update({
        "heralded_x": herald_x.value, "heralded_x_err": herald_x.err,
        "heralded_y": herald_y.value, "heralded_y_err": herald_y.err,
        "diag_plus": d_plus.value, "diag_plus_err": d_plus.err,
        "diag_minus": d_minus.value, "diag_minus_err": d_minus.err,
    })
    if response_x > 0 or response_y > 0:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            dec = deconvolve_covariance(fit, response_x, response_y)
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
        out.update({
            "response_x": float(response_x), "response_y": float(response_y),
            "deconvolved_sigma_x": dec.sigma_x, "deconvolved_sigma_x_err": dec.sigma_x_err,
            "deconvolved_sigma_y": dec.sigma_y, "deconvolved_sigma_y_err": dec.sigma_y_err,
            "deconvolved_rho": dec.rho, "deconvolved_rho_err": dec.rho_err,
        })
        if dec.rho_unclamped is not None:
            out["deconvolved_rho_unclamped"] = dec.rho_unclamped
        out.update({"deconvolved_" + k: v
                    for k, v in _widths_from_cov(dec.sigma_x, dec.sigma_y, dec.rho).items()})
    return out


def write_report_csv(items, path):
    """Two-column ``quantity,value`` CSV of a report mapping."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quantity", "value"])
        for key, value in dict(items).items():
            if isinstance(value, (float, np.floating)):
                value = repr(float(value))
            w.writerow([key, value])
