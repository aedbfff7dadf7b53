#include "collrf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "collrf/errors.hpp"

namespace collrf {

namespace {

constexpr double kSingleEmitterSideband = 0.75;
constexpr double kMergedWidthTolerance = 0.15;
constexpr double kEstimatorAgreement = 0.05;
constexpr double kDistinguishable = 10.0;
constexpr double kContinuationStart = 8.0;

/// Vertex of the parabola through three points; falls back to the middle point.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature < 0.0)) return x1;
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
  return std::clamp(vertex, x0, x2);
}

/// Distance from the peak at index `i` to where the profile first falls to `level`
/// moving in direction `dir`, stopping at a local minimum.
std::optional<double> half_crossing(const SampledSpectrum& s, std::size_t i, int dir,
                                    double level) {
  const auto& x = s.grid;
  const auto& y = s.values;
  std::size_t j = i;
  while (true) {
    if ((dir < 0 && j == 0) || (dir > 0 && j + 1 >= y.size())) return std::nullopt;
    const std::size_t k = dir < 0 ? j - 1 : j + 1;
    if (y[k] <= level) {
      const double t = (y[j] - level) / (y[j] - y[k]);
      return std::abs(x[j] + t * (x[k] - x[j]) - x[i]);
    }
    if (y[k] > y[j]) return std::nullopt;  // climbed into the next line first
    j = k;
  }
}

// Lorentzian sum whose widths are offset by `broadening`, which is what convolving the data
// with a Lorentzian of that half-width does to every line.
struct LorentzModel {
  const std::vector<double>& x;
  std::size_t lines;
  double broadening = 0.0;

  // parameter layout per line: center, log half-width, log weight
  Eigen::VectorXd evaluate(const Eigen::VectorXd& p) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.size()));
    for (std::size_t k = 0; k < lines; ++k) {
      const double c = p[3 * k];
      const double g = std::exp(p[3 * k + 1]) + broadening;
      const double w = std::exp(p[3 * k + 2]);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] - c;
        out[static_cast<Eigen::Index>(i)] += w * g / (g * g + u * u);
      }
    }
    return out;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& p) const {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(3 * lines));
    for (std::size_t k = 0; k < lines; ++k) {
      const double c = p[3 * k];
      const double g = std::exp(p[3 * k + 1]);
      const double width = g + broadening;
      const double w = std::exp(p[3 * k + 2]);
      const auto col = static_cast<Eigen::Index>(3 * k);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] - c;
        const double den = width * width + u * u;
        const double val = w * width / den;
        const auto row = static_cast<Eigen::Index>(i);
        jac(row, col) = 2.0 * val * u / den;
        jac(row, col + 1) = g * w * (u * u - width * width) / (den * den);
        jac(row, col + 2) = val;
      }
    }
    return jac;
  }
};

/// Data convolved with a unit-area Lorentzian of half-width b (trapezoid weights, same grid).
Eigen::VectorXd lorentz_broadened(const SampledSpectrum& s, double b) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double left = j > 0 ? s.grid[j] - s.grid[j - 1] : 0.0;
      const double right = j + 1 < n ? s.grid[j + 1] - s.grid[j] : 0.0;
      const double u = s.grid[i] - s.grid[j];
      acc += 0.5 * (left + right) * s.values[j] * b / (b * b + u * u);
    }
    out[i] = acc / std::numbers::pi;
  }
  return out;
}

struct LmOutcome {
  Eigen::VectorXd p;
  Eigen::VectorXd residual;
  int iterations = 0;
  bool converged = false;
};

LmOutcome levenberg_marquardt(const LorentzModel& model, const Eigen::VectorXd& data, Eigen::VectorXd p,
                              int max_iter, double tol) {
  const double data_norm = std::max(data.norm(), std::numeric_limits<double>::min());
  Eigen::VectorXd r = model.evaluate(p) - data;
  double cost = 0.5 * r.squaredNorm();
  double lambda = 1e-3;

  LmOutcome out;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    const Eigen::MatrixXd jac = model.jacobian(p);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (!jtj.allFinite() || !(jtj.diagonal().maxCoeff() > 0.0))
      throw InferenceError("degenerate Jacobian in Lorentzian fit");
    const double diag_floor = 1e-12 * jtj.diagonal().maxCoeff();

    bool accepted = false;
    bool done = false;
    while (!accepted) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index k = 0; k < damped.rows(); ++k)
        damped(k, k) += lambda * std::max(jtj(k, k), diag_floor);
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);
      Eigen::VectorXd trial = p + step;
      double cost_trial = std::numeric_limits<double>::infinity();
      Eigen::VectorXd r_trial;
      if (step.allFinite()) {
        r_trial = model.evaluate(trial) - data;
        cost_trial = 0.5 * r_trial.squaredNorm();
      }
      if (std::isfinite(cost_trial) && cost_trial < cost) {
        const double rel_step = step.norm() / (p.norm() + 1e-12);
        const double rel_drop = (cost - cost_trial) / cost;
        p = std::move(trial);
        r = std::move(r_trial);
        cost = cost_trial;
        lambda = std::max(lambda * 0.3, 1e-15);
        accepted = true;
        done = rel_step < tol || rel_drop < tol || std::sqrt(2.0 * cost) < 1e-14 * data_norm;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          // no descent direction left: we are at a (numerically) stationary point
          done = grad.norm() <= 1e-8 * std::max(1.0, data_norm);
          break;
        }
      }
    }
    if (done) {
      out.converged = true;
      break;
    }
    if (!accepted) break;
  }
  out.p = std::move(p);
  out.residual = std::move(r);
  return out;
}

Eigen::VectorXd pack(std::span<const SpectralLine> lines) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(3 * lines.size()));
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (!(lines[k].half_width > 0.0) || !(lines[k].weight > 0.0) || !std::isfinite(lines[k].center))
      throw InvalidInput("initial lines need finite centers and positive widths and weights");
    p[3 * k] = lines[k].center;
    p[3 * k + 1] = std::log(lines[k].half_width);
    p[3 * k + 2] = std::log(lines[k].weight);
  }
  return p;
}

std::vector<SpectralLine> unpack(const Eigen::VectorXd& p) {
  std::vector<SpectralLine> out(static_cast<std::size_t>(p.size() / 3));
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = {p[3 * k], std::exp(p[3 * k + 1]), std::exp(p[3 * k + 2])};
  return out;
}

}  // namespace

std::vector<Peak> detect_peaks(const SampledSpectrum& s, double min_prominence_fraction,
                               double min_relative_prominence) {
  if (s.empty()) throw InvalidInput("empty spectrum");
  if (s.size() < 16) throw InvalidInput("peak detection needs at least 16 samples");
  if (s.values.size() != s.grid.size()) throw InvalidInput("grid and values differ in length");
  if (!(min_prominence_fraction > 0.0 && min_prominence_fraction < 1.0))
    throw InvalidInput("min_prominence_fraction must lie in (0, 1)");

  const auto& y = s.values;
  const std::size_t n = y.size();
  const double global_max = *std::max_element(y.begin(), y.end());
  if (!(global_max > 0.0)) return {};
  const double threshold = min_prominence_fraction * global_max;

  std::vector<Peak> peaks;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y[i] > y[i - 1])) {
      ++i;
      continue;
    }
    // walk across a plateau of equal samples
    std::size_t right = i;
    while (right + 1 < n && y[right + 1] == y[i]) ++right;
    if (right + 1 >= n || !(y[right + 1] < y[i])) {
      i = right + 1;
      continue;
    }
    const std::size_t top = (i + right) / 2;
    const double height = y[top];

    double left_min = height;
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > height) break;
      left_min = std::min(left_min, y[j]);
    }
    double right_min = height;
    for (std::size_t j = right + 1; j < n; ++j) {
      if (y[j] > height) break;
      right_min = std::min(right_min, y[j]);
    }
    const double prominence = height - std::max(left_min, right_min);

    if (height > 0.0 && prominence >= threshold &&
        prominence >= min_relative_prominence * height) {
      Peak pk;
      pk.height = height;
      pk.prominence = prominence;
      pk.location = (i == right)
                        ? parabola_vertex(s.grid[i - 1], y[i - 1], s.grid[i], y[i], s.grid[i + 1], y[i + 1])
                        : 0.5 * (s.grid[i] + s.grid[right]);
      const auto lw = half_crossing(s, top, -1, 0.5 * height);
      const auto rw = half_crossing(s, top, +1, 0.5 * height);
      if (lw && rw) {
        pk.half_width = std::min(*lw, *rw);
      } else if (lw || rw) {
        pk.half_width = lw ? *lw : *rw;
      } else {
        // overlapping neighbours on both sides: use the prominence-level width instead
        const auto lp = half_crossing(s, top, -1, height - 0.5 * prominence);
        const auto rp = half_crossing(s, top, +1, height - 0.5 * prominence);
        pk.half_width = std::min(lp.value_or(1.0), rp.value_or(1.0));
      }
      peaks.push_back(pk);
    }
    i = right + 1;
  }
  return peaks;
}

std::vector<SpectralLine> lines_from_peaks(std::span<const Peak> peaks) {
  std::vector<SpectralLine> out;
  out.reserve(peaks.size());
  for (const auto& pk : peaks) {
    const double width = std::clamp(pk.half_width, 0.1, 50.0);
    out.push_back({pk.location, width, pk.height * width});
  }
  return out;
}

FitResult fit_lorentzians(const SampledSpectrum& s, std::span<const SpectralLine> initial,
                          int max_iter, double tol) {
  if (initial.empty()) throw InvalidInput("fit needs at least one initial line");
  if (s.size() < 3 * initial.size()) throw InvalidInput("more parameters than samples");
  if (max_iter < 1) throw InvalidInput("max_iter must be >= 1");

  const Eigen::Map<const Eigen::VectorXd> data(s.values.data(), static_cast<Eigen::Index>(s.size()));
  const double data_norm = std::max(data.norm(), std::numeric_limits<double>::min());
  Eigen::VectorXd p = pack(initial);

  const LorentzModel model{s.grid, initial.size()};
  std::optional<LmOutcome> best;
  try {
    best = levenberg_marquardt(model, data, p, max_iter, tol);
  } catch (const InferenceError&) {
  }

  if (!best || !best->converged) {
    // Coarse-to-fine fallback: fit Lorentzian-broadened copies of the data first, so that
    // lines started several widths away still overlap their targets.
    double narrowest = std::numeric_limits<double>::infinity();
    for (const auto& l : initial) narrowest = std::min(narrowest, l.half_width);
    const double step = s.grid[1] - s.grid[0];
    for (double b = kContinuationStart; b >= 2.0 * std::max(narrowest, step); b *= 0.5) {
      const LorentzModel coarse{s.grid, initial.size(), b};
      try {
        p = levenberg_marquardt(coarse, lorentz_broadened(s, b), p, max_iter, std::max(tol, 1e-6)).p;
      } catch (const InferenceError&) {
        break;  // keep the last good start and let the exact fit decide
      }
    }
    try {
      auto retry = levenberg_marquardt(model, data, p, max_iter, tol);
      if (!best || (retry.converged && !best->converged) ||
          (retry.converged == best->converged && retry.residual.norm() < best->residual.norm()))
        best = std::move(retry);
    } catch (const InferenceError&) {
      if (!best) throw;
    }
  }
  p = best->p;
  const Eigen::VectorXd& r = best->residual;

  FitResult out;
  out.iterations = best->iterations;
  out.converged = best->converged;
  out.lines = unpack(p);
  out.residual_norm = r.norm() / data_norm;

  // covariance s^2 (J^T J)^-1 in the fitted parameterization, mapped back to linear widths/weights
  const Eigen::MatrixXd jac = model.jacobian(p);
  const auto dof = static_cast<double>(std::max<Eigen::Index>(1, jac.rows() - jac.cols()));
  const double s2 = r.squaredNorm() / dof;
  const Eigen::MatrixXd cov = (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() * s2;
  out.std_errors.resize(out.lines.size());
  for (std::size_t k = 0; k < out.lines.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(3 * k);
    out.std_errors[k] = {std::sqrt(std::max(0.0, cov(c, c))),
                         out.lines[k].half_width * std::sqrt(std::max(0.0, cov(c + 1, c + 1))),
                         out.lines[k].weight * std::sqrt(std::max(0.0, cov(c + 2, c + 2)))};
  }
  return out;
}

InferenceResult infer_parameters(std::span<const SpectralLine> lines, double symmetry_tol) {
  if (lines.size() % 2 == 0)
    throw InferenceError("even number of lines (" + std::to_string(lines.size()) +
                         "): cannot assign a central line");
  if (lines.size() < 3) throw InferenceError("need at least one sideband pair (k = 0)");

  std::vector<SpectralLine> sorted(lines.begin(), lines.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const SpectralLine& a, const SpectralLine& b) { return a.center < b.center; });
  const std::size_t k = sorted.size() / 2;
  const SpectralLine& central = sorted[k];
  if (std::abs(central.center) > symmetry_tol)
    throw InferenceError("no line at the laser frequency (middle line at " +
                         std::to_string(central.center) + ")");

  // pair the i-th line above zero with the i-th line below zero
  std::vector<double> positive(k);
  std::vector<double> widths(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& up = sorted[k + 1 + i];
    const auto& down = sorted[k - 1 - i];
    if (!(up.center > 0.0) || !(down.center < 0.0))
      throw InferenceError("lines are not split evenly around zero");
    if (std::abs(up.center + down.center) > symmetry_tol)
      throw InferenceError("asymmetric line set: +" + std::to_string(up.center) + " vs " +
                           std::to_string(down.center));
    positive[i] = 0.5 * (up.center - down.center);
    widths[i] = 0.5 * (up.half_width + down.half_width);
  }

  if (k == 1 && widths[0] > kSingleEmitterSideband * (1.0 + kMergedWidthTolerance)) {
    const double excess = widths[0] - kSingleEmitterSideband;
    throw MergedRegimeError("merged regime: sideband half-width " + std::to_string(widths[0]) +
                                " exceeds the single-emitter 3/4; N cannot be counted",
                            excess);
  }

  InferenceResult out;
  out.n_hat = static_cast<int>(k);
  double sum = 0.0;
  for (double v : positive) sum += v;
  out.omega_hat = 0.5 * sum / static_cast<double>(k);

  if (k >= 2) {
    out.delta_hat = positive.back() - positive.front();
    std::vector<double> gaps(k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i) gaps[i] = positive[i + 1] - positive[i];
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
    double median = gaps[gaps.size() / 2];
    if (gaps.size() % 2 == 0) {
      const double lower = *std::max_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2));
      median = 0.5 * (median + lower);
    }
    out.delta_hat_spacing = static_cast<double>(k - 1) * median;
    if (std::abs(out.delta_hat - out.delta_hat_spacing) > kEstimatorAgreement * out.delta_hat)
      out.warnings.emplace_back("span and spacing estimates of delta disagree by more than 5%");
    out.distinguishability = out.delta_hat / static_cast<double>(k - 1);
    if (*out.distinguishability < kDistinguishable)
      out.warnings.emplace_back("sideband spacing below 10 gamma: lines are barely distinguishable");
  }
  return out;
}

double estimate_mean_distance(double delta_hat, double dipole_scale_constant) {
  if (!(delta_hat > 0.0)) throw InvalidInput("delta_hat must be positive");
  if (!(dipole_scale_constant > 0.0)) throw InvalidInput("scale constant must be positive");
  return std::cbrt(dipole_scale_constant / delta_hat);
}

SampledSpectrum smooth_spectrum(const SampledSpectrum& s, double sigma) {
  if (!(sigma > 0.0) || s.size() < 2) return s;
  const double step = (s.grid.back() - s.grid.front()) / static_cast<double>(s.size() - 1);
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma / step));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t j = -radius; j <= radius; ++j) {
    const double u = static_cast<double>(j) * step / sigma;
    kernel[static_cast<std::size_t>(j + radius)] = std::exp(-0.5 * u * u);
  }
  SampledSpectrum out = s;
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double norm = 0.0;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - radius); j <= std::min(n - 1, i + radius); ++j) {
      const double w = kernel[static_cast<std::size_t>(j - i + radius)];
      acc += w * s.values[static_cast<std::size_t>(j)];
      norm += w;
    }
    out.values[static_cast<std::size_t>(i)] = acc / norm;
  }
  return out;
}

SampledSpectrum add_multiplicative_noise(const SampledSpectrum& s, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidInput("noise level must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SampledSpectrum out = s;
  for (double& v : out.values) v *= 1.0 + sigma * gauss(rng);
  return out;
}

Analysis analyze_spectrum(const SampledSpectrum& s, const AnalysisOptions& opt) {
  Analysis out;
  const SampledSpectrum probe = opt.smoothing > 0.0 ? smooth_spectrum(s, opt.smoothing) : s;
  out.peaks = detect_peaks(probe, opt.min_prominence_fraction, opt.min_relative_prominence);
  if (out.peaks.empty()) throw InferenceError("no spectral peaks found");
  const auto init = lines_from_peaks(out.peaks);
  out.fit = fit_lorentzians(s, init, opt.max_iter, opt.tol);
  return out;
}

}  // namespace collrf
