#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "collrf/analytic.hpp"

namespace collrf {

struct Peak {
  double location = 0.0;
  double height = 0.0;
  double prominence = 0.0;
  double half_width = 0.0;  // local estimate from the half-height crossing
};

/// Local maxima whose topographic prominence is at least
/// `min_prominence_fraction` of the global maximum and at least
/// `min_relative_prominence` of the peak's own height. Sorted by location.
std::vector<Peak> detect_peaks(const SampledSpectrum& spectrum, double min_prominence_fraction,
                               double min_relative_prominence = 0.0);

struct LineUncertainty {
  double center = 0.0;
  double half_width = 0.0;
  double weight = 0.0;
};

struct FitResult {
  std::vector<SpectralLine> lines;
  std::vector<LineUncertainty> std_errors;
  double residual_norm = 0.0;  // ||model - data|| / ||data||
  int iterations = 0;
  bool converged = false;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) least squares of a Lorentzian sum. Widths and
/// weights are fitted in log space so they stay positive. Returns the best point reached;
/// `converged` is false when max_iter runs out first.
FitResult fit_lorentzians(const SampledSpectrum& spectrum, std::span<const SpectralLine> initial,
                          int max_iter = 200, double tol = 1e-10);

std::vector<SpectralLine> lines_from_peaks(std::span<const Peak> peaks);

struct InferenceResult {
  int n_hat = 0;
  double delta_hat = 0.0;          // span of the positive sideband cluster
  double delta_hat_spacing = 0.0;  // (N - 1) x median adjacent spacing
  double omega_hat = 0.0;
  std::optional<double> distinguishability;  // delta_hat / ((N_hat - 1) gamma)
  std::vector<std::string> warnings;
};

/// Recovers N, delta and Omega from a mirror-symmetric set of 2k+1 lines.
/// Throws InferenceError on an even count, asymmetry beyond `symmetry_tol`, or k = 0,
/// and MergedRegimeError when a triplet has sidebands broader than a single emitter's.
InferenceResult infer_parameters(std::span<const SpectralLine> lines, double symmetry_tol = 0.5);

/// r = (C / delta)^(1/3), from delta ~ d^2 / r^3; C carries the dimensionful prefactor.
double estimate_mean_distance(double delta_hat, double dipole_scale_constant);

struct AnalysisOptions {
  double min_prominence_fraction = 0.001;
  double min_relative_prominence = 0.1;
  double smoothing = 0.0;  // Gaussian sigma (units of gamma) applied before peak detection only
  int max_iter = 200;
  double tol = 1e-10;
};

struct Analysis {
  std::vector<Peak> peaks;
  FitResult fit;
};

/// detect_peaks -> fit_lorentzians seeded from the peaks. Throws InferenceError if no peak is found.
Analysis analyze_spectrum(const SampledSpectrum& spectrum, const AnalysisOptions& options = {});

SampledSpectrum smooth_spectrum(const SampledSpectrum& spectrum, double sigma);

/// values * (1 + sigma * xi), xi ~ N(0, 1) from a seeded mt19937_64.
SampledSpectrum add_multiplicative_noise(const SampledSpectrum& spectrum, double sigma,
                                         std::uint64_t seed);

}  // namespace collrf
