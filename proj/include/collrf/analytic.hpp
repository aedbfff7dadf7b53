#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "collrf/core.hpp"

namespace collrf {

/// One Lorentzian: weight * half_width / (half_width^2 + (x - center)^2), x in units of gamma
/// measured from the laser frequency. Integrates to pi * weight.
struct SpectralLine {
  double center = 0.0;
  double half_width = 0.5;
  double weight = 0.0;

  double operator()(double x) const {
    const double u = x - center;
    return weight * half_width / (half_width * half_width + u * u);
  }
  friend bool operator==(const SpectralLine&, const SpectralLine&) = default;
};

enum class LineModel { general, mollow, two_atom, three_atom };

std::string_view to_string(LineModel model);
LineModel line_model_from_string(std::string_view name);

struct LineSpectrum {
  SystemParams params;
  std::vector<SpectralLine> lines;
  LineModel model = LineModel::general;
};

/// Spectrum sampled on a strictly increasing grid of offsets.
struct SampledSpectrum {
  std::vector<double> grid;
  std::vector<double> values;

  std::size_t size() const { return grid.size(); }
  bool empty() const { return grid.empty(); }
};

/// Central line plus N lines on each side of +-2 Omega, spaced by delta~; requires Delta = 0.
LineSpectrum general_lines(const SystemParams& params);
/// The delta -> 0 collective Mollow triplet; dd_coupling is ignored.
LineSpectrum mollow_limit_lines(const SystemParams& params);
/// Closed-form two-emitter spectrum; requires N = 2 and Delta = 0.
LineSpectrum two_atom_lines(const SystemParams& params);
/// Closed-form three-emitter spectrum; requires N = 3 and Delta = 0.
LineSpectrum three_atom_lines(const SystemParams& params);
LineSpectrum model_lines(LineModel model, const SystemParams& params);

SampledSpectrum evaluate_spectrum(std::span<const SpectralLine> lines, std::span<const double> grid);
double integrated_weight(std::span<const SpectralLine> lines);

/// `points` equally spaced offsets in [lo, hi]; points >= 2, lo < hi.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// +-(2 Omega + delta + 20 gamma) with 4001 points.
std::vector<double> default_grid(const SystemParams& params);

}  // namespace collrf
