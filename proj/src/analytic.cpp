#include "collrf/analytic.hpp"

#include <cmath>
#include <string>

#include "collrf/errors.hpp"

namespace collrf {

namespace {

void require_resonance(const SystemParams& p) {
  if (p.detuning != 0.0)
    throw InvalidInput("closed-form spectra are only available at resonance (detuning = 0)");
}

void require_emitters(const SystemParams& p, int n, const char* model) {
  if (p.n_emitters != n)
    throw InvalidInput(std::string(model) + " model needs n_emitters = " + std::to_string(n) +
                       ", got " + std::to_string(p.n_emitters));
}

SpectralLine central_line(int n) {
  return {0.0, 0.5, static_cast<double>(n * (n + 2)) / 12.0};
}

}  // namespace

std::string_view to_string(LineModel model) {
  switch (model) {
    case LineModel::general: return "general";
    case LineModel::mollow: return "mollow";
    case LineModel::two_atom: return "n2";
    case LineModel::three_atom: return "n3";
  }
  return "general";
}

LineModel line_model_from_string(std::string_view name) {
  if (name == "general") return LineModel::general;
  if (name == "mollow") return LineModel::mollow;
  if (name == "n2") return LineModel::two_atom;
  if (name == "n3") return LineModel::three_atom;
  throw InvalidInput("unknown line model '" + std::string(name) + "'");
}

LineSpectrum general_lines(const SystemParams& p) {
  require_resonance(p);
  const int n = p.n_emitters;
  const double dt = scaled_coupling(p.dd_coupling, n);
  const double two_omega = 2.0 * p.rabi;
  const double norm = 4.0 * (n + 1);

  LineSpectrum out{p, {central_line(n)}, LineModel::general};
  for (int k = 0; k <= n; ++k) {
    // "+" branch: R- lowers |k> -> |k-1>, population weight k(N-k+1)
    const int up = k * (n - k + 1);
    if (up > 0) {
      out.lines.push_back({two_omega - dt * (2 * k - n - 1) / 2.0, (1.0 + 2.0 * up) / 4.0,
                           up / norm});
    }
    // "-" branch: R+ raises |k> -> |k+1>, weight (k+1)(N-k)
    const int down = (k + 1) * (n - k);
    if (down > 0) {
      out.lines.push_back({-two_omega + dt * (2 * k - n + 1) / 2.0, (1.0 + 2.0 * down) / 4.0,
                           down / norm});
    }
  }
  return out;
}

LineSpectrum mollow_limit_lines(const SystemParams& p) {
  require_resonance(p);
  const int n = p.n_emitters;
  const double side = static_cast<double>(n * (n + 2)) / 24.0;
  return {p,
          {central_line(n), {2.0 * p.rabi, 0.75, side}, {-2.0 * p.rabi, 0.75, side}},
          LineModel::mollow};
}

LineSpectrum two_atom_lines(const SystemParams& p) {
  require_resonance(p);
  require_emitters(p, 2, "two-atom");
  const double w = 2.0 * p.rabi;
  const double h = p.dd_coupling / 2.0;
  const double side = 1.0 / 6.0;
  return {p,
          {{0.0, 0.5, 4.0 / 6.0},
           {w + h, 1.25, side},
           {w - h, 1.25, side},
           {-w - h, 1.25, side},
           {-w + h, 1.25, side}},
          LineModel::two_atom};
}

LineSpectrum three_atom_lines(const SystemParams& p) {
  require_resonance(p);
  require_emitters(p, 3, "three-atom");
  const double w = 2.0 * p.rabi;
  const double h = p.dd_coupling / 2.0;
  const double outer = 3.0 / 16.0;
  return {p,
          {{0.0, 0.5, 5.0 / 4.0},
           {w, 2.25, 0.25},
           {-w, 2.25, 0.25},
           {w + h, 1.75, outer},
           {w - h, 1.75, outer},
           {-w + h, 1.75, outer},
           {-w - h, 1.75, outer}},
          LineModel::three_atom};
}

LineSpectrum model_lines(LineModel model, const SystemParams& p) {
  switch (model) {
    case LineModel::general: return general_lines(p);
    case LineModel::mollow: return mollow_limit_lines(p);
    case LineModel::two_atom: return two_atom_lines(p);
    case LineModel::three_atom: return three_atom_lines(p);
  }
  return general_lines(p);
}

SampledSpectrum evaluate_spectrum(std::span<const SpectralLine> lines,
                                  std::span<const double> grid) {
  SampledSpectrum out{{grid.begin(), grid.end()}, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double acc = 0.0;
    for (const auto& line : lines) acc += line(grid[i]);
    out.values[i] = acc;
  }
  return out;
}

double integrated_weight(std::span<const SpectralLine> lines) {
  double total = 0.0;
  for (const auto& line : lines) total += line.weight;
  return total;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw InvalidInput("grid needs at least 2 points");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw InvalidInput("grid bounds must be finite with min < max");
  std::vector<double> grid(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

std::vector<double> default_grid(const SystemParams& p) {
  const double half = 2.0 * p.rabi + p.dd_coupling + 20.0 * p.gamma;
  return linear_grid(-half, half, 4001);
}

}  // namespace collrf
