#include "collrf/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "collrf/analytic.hpp"
#include "collrf/errors.hpp"
#include "collrf/figures.hpp"
#include "collrf/inference.hpp"
#include "collrf/io.hpp"
#include "collrf/liouville.hpp"

namespace collrf::validation {

namespace {

std::string fmt(double v) { return io::format_decimal(io::round_decimal(v)); }

std::string short_fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

CheckResult timed(std::string name, const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r{std::move(name), false, {}, 0.0};
  try {
    auto [ok, detail] = body();
    r.passed = ok;
    r.detail = std::move(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

std::vector<double> absolute_difference(const SampledSpectrum& a, const SampledSpectrum& b) {
  std::vector<double> out(a.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(a.values[i] - b.values[i]);
  return out;
}

std::vector<double> step_grid(double lo, double hi, double step) {
  const auto points = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  return linear_grid(lo, hi, points);
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

std::vector<SpectralLine> sorted_lines(std::vector<SpectralLine> lines) {
  std::sort(lines.begin(), lines.end(), [](const SpectralLine& a, const SpectralLine& b) {
    if (a.center != b.center) return a.center < b.center;
    if (a.half_width != b.half_width) return a.half_width < b.half_width;
    return a.weight < b.weight;
  });
  return lines;
}

bool same_lines(const std::vector<SpectralLine>& a, const std::vector<SpectralLine>& b, double tol) {
  if (a.size() != b.size()) return false;
  const auto sa = sorted_lines(a);
  const auto sb = sorted_lines(b);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (!close_rel(sa[i].center, sb[i].center, tol) ||
        !close_rel(sa[i].half_width, sb[i].half_width, tol) ||
        !close_rel(sa[i].weight, sb[i].weight, tol))
      return false;
  }
  return true;
}

double max_entry(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Suite suite_from_string(std::string_view name) {
  if (name == "algebra") return Suite::algebra;
  if (name == "appendix") return Suite::appendix;
  if (name == "oracle") return Suite::oracle;
  if (name == "inference") return Suite::inference;
  if (name == "all") return Suite::all;
  throw InvalidInput("unknown suite '" + std::string(name) + "'");
}

CheckResult check_operator_algebra() {
  return timed("operator_algebra", [] {
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
      const auto ops = collective_operators(n);
      const auto& rp = ops.raise;
      const auto& rm = ops.lower;
      const auto& rz = ops.inversion;
      const double j = n / 2.0;
      const auto id = Eigen::MatrixXcd::Identity(n + 1, n + 1);
      worst = std::max(worst, max_entry(rp * rm - rm * rp - rz));
      worst = std::max(worst, max_entry(rz * rp - rp * rz - 2.0 * rp));
      worst = std::max(worst, max_entry(rz * rm - rm * rz + 2.0 * rm));
      worst = std::max(worst, max_entry(rz * rz / 4.0 + (rp * rm + rm * rp) / 2.0 - j * (j + 1) * id));
    }
    return std::pair{worst < 1e-12, "max commutator/Casimir residual over N<=20 = " + short_fmt(worst)};
  });
}

CheckResult check_weight_trace_identity() {
  return timed("weight_trace_identity", [] {
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
      const auto ops = collective_operators(n);
      const auto m = ops.inversion * ops.inversion + ops.raise * ops.lower + ops.lower * ops.raise;
      const double trace_route = m.trace().real() / (4.0 * (n + 1));
      const double sum_route = integrated_weight(general_lines(make_params(n, 100.0, 40.0)).lines);
      worst = std::max(worst, std::abs(trace_route - sum_route) / sum_route);
    }
    return std::pair{worst < 1e-12, "max relative mismatch over N<=20 = " + short_fmt(worst)};
  });
}

CheckResult check_closed_form_equality() {
  return timed("c1_closed_form_equality", [] {
    const std::vector<std::pair<double, double>> settings{{50, 20}, {100, 40}, {37.5, 22}, {250, 120}};
    for (const auto& [omega, delta] : settings) {
      const auto p2 = make_params(2, omega, delta);
      const auto p3 = make_params(3, omega, delta);
      if (!same_lines(general_lines(p2).lines, two_atom_lines(p2).lines, 1e-12))
        return std::pair{false, "N=2 mismatch at Omega=" + fmt(omega) + " delta=" + fmt(delta)};
      if (!same_lines(general_lines(p3).lines, three_atom_lines(p3).lines, 1e-12))
        return std::pair{false, "N=3 mismatch at Omega=" + fmt(omega) + " delta=" + fmt(delta)};
    }
    // literal coefficients at Omega=50, delta=20
    const auto p2 = make_params(2, 50, 20);
    const std::vector<SpectralLine> two_exact{{0, 0.5, 2.0 / 3.0},
                                              {110, 1.25, 1.0 / 6.0},
                                              {90, 1.25, 1.0 / 6.0},
                                              {-110, 1.25, 1.0 / 6.0},
                                              {-90, 1.25, 1.0 / 6.0}};
    const auto p3 = make_params(3, 50, 20);
    const std::vector<SpectralLine> three_exact{{0, 0.5, 1.25},          {100, 2.25, 0.25},
                                                {-100, 2.25, 0.25},      {110, 1.75, 3.0 / 16.0},
                                                {90, 1.75, 3.0 / 16.0},  {-110, 1.75, 3.0 / 16.0},
                                                {-90, 1.75, 3.0 / 16.0}};
    const bool ok = same_lines(general_lines(p2).lines, two_exact, 1e-12) &&
                    same_lines(general_lines(p3).lines, three_exact, 1e-12);
    return std::pair{ok, std::string(ok ? "general lines equal the closed N=2 and N=3 sets to 1e-12 at 4 settings"
                                        : "literal N=2/N=3 coefficients differ")};
  });
}

CheckResult check_width_adjudication() {
  return timed("c2_width_adjudication", [] {
    double worst_rate = 0.0;
    double worst_freq = 0.0;
    for (int n = 2; n <= 6; ++n) {
      const double dt = 100.0;
      const double delta = dt * (n - 1);
      const auto p = make_params(n, delta / 0.4, delta);
      const auto L = build_secular_liouvillian(p);
      for (int k = 0; k < n; ++k) {
        const auto mode = coherence_decay_rates(L, k);
        const double rate = (1.0 + 2.0 * (n - k) * (k + 1)) / 4.0;
        const double freq = 2.0 * p.rabi - dt * (1.0 + 2.0 * k - n) / 2.0;
        worst_rate = std::max(worst_rate, std::abs(mode.rate - rate) / rate);
        worst_freq = std::max(worst_freq, std::abs(mode.frequency - freq) / freq);
      }
    }
    const bool ok = worst_rate <= 0.02 && worst_freq <= 0.02;
    return std::pair{ok, "max relative error: rate " + short_fmt(worst_rate) + ", frequency " +
                             short_fmt(worst_freq) + " (tol 0.02)"};
  });
}

CheckResult check_steady_state() {
  return timed("c3_steady_state", [] {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> omega(1.0, 500.0);
    std::uniform_real_distribution<double> ratio(0.0, 0.9);
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
      for (int draw = 0; draw < 5; ++draw) {
        const double om = omega(rng);
        const auto p = make_params(n, om, ratio(rng) * 2.0 * om);
        const auto rho = steady_state(build_secular_liouvillian(p));
        const auto target = Eigen::MatrixXcd::Identity(n + 1, n + 1) / static_cast<double>(n + 1);
        worst = std::max(worst, max_entry(rho - target));
      }
    }
    return std::pair{worst <= 1e-10, "max |rho_s - I/(N+1)| over N<=10 = " + short_fmt(worst)};
  });
}

CheckResult check_mollow_limits() {
  return timed("c4_mollow_limits", [] {
    const auto p1 = make_params(1, 10.0, 0.0);
    const auto single = general_lines(p1).lines;
    const std::vector<SpectralLine> triplet{{0, 0.5, 0.25}, {20, 0.75, 0.125}, {-20, 0.75, 0.125}};
    if (!same_lines(single, triplet, 1e-12) || !same_lines(single, mollow_limit_lines(p1).lines, 1e-12))
      return std::pair{false, std::string("general_lines(N=1) is not the Mollow triplet")};
    double worst = 0.0;
    for (int n : {1, 2, 3, 5}) {
      const auto p = make_params(n, 25.0, 0.0);
      const auto grid = default_grid(p);
      const auto oracle = dressed_spectrum_oracle(p, grid);
      const auto exact = evaluate_spectrum(mollow_limit_lines(p).lines, grid);
      const double peak = *std::max_element(exact.values.begin(), exact.values.end());
      const auto diff = absolute_difference(oracle, exact);
      worst = std::max(worst, *std::max_element(diff.begin(), diff.end()) / peak);
    }
    return std::pair{worst <= 1e-6, "(a) N=1 triplet exact; (b) max relative deviation at delta=0, N in {1,2,3,5} = " +
                                        short_fmt(worst)};
  });
}

CheckResult check_oracle_convergence() {
  return timed("c5_oracle_convergence", [] {
    bool ok = true;
    std::string detail;
    for (int n : {2, 3, 5}) {
      std::vector<double> ladder;
      for (double rung : {10.0, 20.0, 40.0, 80.0}) {
        const double delta = rung * (n - 1);
        const auto p = make_params(n, delta / 0.4, delta);
        const double half = 2.0 * p.rabi + p.dd_coupling + 20.0;
        const auto grid = step_grid(-half, half, 0.1);
        const auto analytic = evaluate_spectrum(general_lines(p).lines, grid);
        const auto oracle = dressed_spectrum_oracle(p, grid);
        ladder.push_back(trapezoid(grid, absolute_difference(oracle, analytic)) /
                         trapezoid(grid, analytic.values));
      }
      bool monotone = true;
      for (std::size_t i = 1; i < ladder.size(); ++i) monotone = monotone && ladder[i] < ladder[i - 1];
      const bool last_ok = ladder.back() < 0.02;
      ok = ok && monotone && last_ok;
      detail += "N=" + std::to_string(n) + " L1/I = [";
      for (std::size_t i = 0; i < ladder.size(); ++i) detail += (i ? ", " : "") + short_fmt(ladder[i]);
      detail += std::string("]") + (monotone ? "" : " NOT monotone") + (last_ok ? "" : " last>=0.02") + "; ";
    }
    return std::pair{ok, detail};
  });
}

CheckResult check_secular_scaling() {
  return timed("c6_secular_scaling", [] {
    const double delta = 40.0;
    auto discrepancy = [&](double ratio, bool compensate) {
      const auto p = make_params(2, delta / (2.0 * ratio), delta);
      const auto bare_p = compensate ? compensated_bare_params(p) : p;
      const double half = delta / 2.0 + 10.0;
      double diff = 0.0;
      double norm = 0.0;
      for (double sign : {-1.0, 1.0}) {
        const double mid = sign * 2.0 * p.rabi;
        const auto grid = step_grid(mid - half, mid + half, 0.05);
        const auto dressed = dressed_spectrum_oracle(p, grid);
        const auto bare = bare_spectrum_oracle(bare_p, grid);
        diff += trapezoid(grid, absolute_difference(bare, dressed));
        norm += trapezoid(grid, dressed.values);
      }
      return diff / norm;
    };
    std::vector<double> raw;
    std::vector<double> comp;
    for (double ratio : {0.4, 0.2, 0.1}) {
      raw.push_back(discrepancy(ratio, false));
      comp.push_back(discrepancy(ratio, true));
    }
    bool ok = true;
    std::string detail = "raw L1 = [";
    for (std::size_t i = 0; i < raw.size(); ++i) detail += (i ? ", " : "") + short_fmt(raw[i]);
    detail += "], successive ratios = [";
    for (std::size_t i = 1; i < raw.size(); ++i) {
      const double r = raw[i - 1] / raw[i];
      ok = ok && raw[i] < raw[i - 1] && r >= 2.0 && r <= 8.0;
      detail += (i > 1 ? ", " : "") + short_fmt(r);
    }
    detail += "] (need [2,8]); with Delta=delta~ compensation L1 = [";
    for (std::size_t i = 0; i < comp.size(); ++i) detail += (i ? ", " : "") + short_fmt(comp[i]);
    detail += "]";
    return std::pair{ok, detail};
  });
}

CheckResult check_figure_peaks() {
  return timed("c7_figure_peaks", [] {
    const std::vector<std::vector<double>> expected{
        {-110, -90, 0, 90, 110},
        {-110, -100, -90, 0, 90, 100, 110},
        {-230, -215, -200, -185, -170, 0, 170, 185, 200, 215, 230}};
    bool ok = true;
    std::string detail;
    for (int which = 1; which <= 3; ++which) {
      // round trip through the on-disk format, as the CLI emits it
      const auto fig = figure_data(which);
      std::stringstream file;
      io::write_spectrum(file, fig.scaled, io::params_provenance(fig.lines.params));
      const auto data = io::read_spectrum(file).spectrum;
      const auto peaks = detect_peaks(data, 0.001, 0.1);
      const auto& want = expected[static_cast<std::size_t>(which - 1)];
      double worst = 0.0;
      bool count_ok = peaks.size() == want.size();
      if (count_ok) {
        for (std::size_t i = 0; i < want.size(); ++i)
          worst = std::max(worst, std::abs(peaks[i].location - want[i]));
      }
      const bool fig_ok = count_ok && worst <= 0.5;
      ok = ok && fig_ok;
      detail += "fig" + std::to_string(which) + ": " + std::to_string(peaks.size()) + " peaks, max offset " +
                short_fmt(worst) + "; ";
    }
    return std::pair{ok, detail};
  });
}

CheckResult check_sum_rule() {
  return timed("c8_sum_rule", [] {
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
      const auto p = make_params(n, 50.0, n == 1 ? 0.0 : 20.0);
      const double half = 2.0 * p.rabi + p.dd_coupling + 2000.0;
      const auto grid = step_grid(-half, half, 0.01);
      const auto s = evaluate_spectrum(general_lines(p).lines, grid);
      const double target = std::numbers::pi * n * (n + 2) / 6.0;
      worst = std::max(worst, std::abs(trapezoid(grid, s.values) - target) / target);
    }
    return std::pair{worst <= 0.01, "max relative deviation from pi N(N+2)/6, N<=8 = " + short_fmt(worst)};
  });
}

CheckResult check_inference_round_trip() {
  return timed("c9_inference_round_trip", [] {
    bool ok = true;
    std::string detail;
    for (int n = 1; n <= 6; ++n) {
      const double omega = 100.0;
      const double delta = n == 1 ? 0.0 : 60.0;
      const auto p = make_params(n, omega, delta);
      const auto clean = evaluate_spectrum(general_lines(p).lines, default_grid(p));

      const auto a = analyze_spectrum(clean);
      const auto r = infer_parameters(a.fit.lines);
      const double d_err = n == 1 ? std::abs(r.delta_hat) : std::abs(r.delta_hat - delta) / delta;
      const double o_err = std::abs(r.omega_hat - omega) / omega;
      const bool clean_ok = a.fit.converged && r.n_hat == n && d_err <= 0.01 && o_err <= 0.005;

      AnalysisOptions noisy_opt;
      noisy_opt.smoothing = 0.25;
      const auto noisy = add_multiplicative_noise(clean, 0.01, 9000 + static_cast<std::uint64_t>(n));
      const auto b = analyze_spectrum(noisy, noisy_opt);
      const auto rn = infer_parameters(b.fit.lines);
      const double dn_err = n == 1 ? std::abs(rn.delta_hat) : std::abs(rn.delta_hat - delta) / delta;
      const bool noisy_ok = rn.n_hat == n && (n == 1 ? dn_err <= 0.03 * 60.0 : dn_err <= 0.03);

      ok = ok && clean_ok && noisy_ok;
      detail += "N=" + std::to_string(n) + " clean(N^=" + std::to_string(r.n_hat) + " dErr=" +
                short_fmt(d_err) + " OErr=" + short_fmt(o_err) + ") noisy(N^=" + std::to_string(rn.n_hat) +
                " dErr=" + short_fmt(dn_err) + "); ";
    }
    return std::pair{ok, detail};
  });
}

CheckResult check_peak_height_scaling() {
  return timed("c10_peak_height_scaling", [] {
    std::vector<double> scaled;
    const double omega = 100.0;
    for (int n = 2; n <= 10; ++n) {
      const auto p = make_params(n, omega, 0.2 * 2.0 * omega);
      const std::vector<double> origin{0.0};
      const double s0 = evaluate_spectrum(general_lines(p).lines, origin).values[0];
      scaled.push_back(s0 / (n * n));
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    const double spread = (*hi - *lo) / *hi;
    std::string detail = "S(0)/N^2 for N=2..10 = [";
    for (std::size_t i = 0; i < scaled.size(); ++i) detail += (i ? ", " : "") + short_fmt(scaled[i]);
    detail += "], spread (max-min)/max = " + short_fmt(spread) + " (need < 0.15)";
    return std::pair{spread < 0.15, detail};
  });
}

CheckResult run_criterion(int number) {
  switch (number) {
    case 1: return check_closed_form_equality();
    case 2: return check_width_adjudication();
    case 3: return check_steady_state();
    case 4: return check_mollow_limits();
    case 5: return check_oracle_convergence();
    case 6: return check_secular_scaling();
    case 7: return check_figure_peaks();
    case 8: return check_sum_rule();
    case 9: return check_inference_round_trip();
    case 10: return check_peak_height_scaling();
    default: throw InvalidInput("acceptance criteria are numbered 1..10");
  }
}

std::vector<CheckResult> run_suite(Suite suite) {
  std::vector<CheckResult> out;
  const bool all = suite == Suite::all;
  if (all || suite == Suite::algebra) {
    out.push_back(check_operator_algebra());
    out.push_back(check_weight_trace_identity());
  }
  if (all || suite == Suite::appendix) {
    out.push_back(check_closed_form_equality());
    out.push_back(check_sum_rule());
    out.push_back(check_peak_height_scaling());
  }
  if (all || suite == Suite::oracle) {
    out.push_back(check_width_adjudication());
    out.push_back(check_steady_state());
    out.push_back(check_mollow_limits());
    out.push_back(check_oracle_convergence());
    out.push_back(check_secular_scaling());
  }
  if (all || suite == Suite::inference) {
    out.push_back(check_figure_peaks());
    out.push_back(check_inference_round_trip());
  }
  return out;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::string out;
  for (const auto& r : results)
    out += r.name + ": " + (r.passed ? "pass" : "fail") + ": " + r.detail + "\n";
  return out;
}

}  // namespace collrf::validation
