"""Simulation and analysis of Franson interference with ultrafast time bins."""

from .biphoton import (GaussianBiphoton, WidthSummary, angfreq_to_wavelength, coherence_times,
                       jsa_value, jsi_value, jta_value, jti_value, spectral_widths,
                       temporal_widths, wavelength_to_angfreq)
from .franson import (FransonSettings, InterferometerArm, PathTerm, arm_transfer,
                      coincidence_components, coincidence_rate, coincidence_rate_anticorrelated,
                      jsa_after, jsi_after, jta_after, jti_after, predicted_visibility,
                      selected_rates, singles_rate)
from .polarization import arm_equivalence_check, bin_phase, hwp_unitary, simulate_arm
from .detector import (Axis, CountModel, CountRecord, Histogram2D, ResponseModel,
                       background_visibility, bell_experiment, convolve_map, expected_scan,
                       phase_fringe_scan, sample_counts)
from .analysis import (BellResult, FringeFit, GaussianFit2D, bell_from_table, chsh_correlation,
                       chsh_parameter, deconvolve_covariance, deconvolve_width, diagonal_widths,
                       fit_fringe, fit_gaussian_2d, heralded_widths)

__version__ = "0.1.0"
