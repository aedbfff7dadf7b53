// collrf: spectrum generation, oracle runs, validation, figure data and inference.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "collrf/analytic.hpp"
#include "collrf/errors.hpp"
#include "collrf/figures.hpp"
#include "collrf/inference.hpp"
#include "collrf/io.hpp"
#include "collrf/liouville.hpp"
#include "collrf/validation.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum Exit : int { kOk = 0, kValidation = 1, kInvalid = 2, kFitFailure = 3, kNumerical = 4 };

struct ParamFlags {
  int n = 1;
  double rabi = 0.0;
  double dd = 0.0;
  double detuning = 0.0;
  std::string params_file;
  std::vector<double> grid;  // min,max,points
};

struct OutputFlags {
  std::string out = "collrf";
  double noise = 0.0;
  std::uint64_t seed = 0;
};

struct AnalysisFlags {
  std::string in;
  int max_iter = 200;
  double tol = 1e-10;
  double prominence = collrf::AnalysisOptions{}.min_prominence_fraction;
  double relative_prominence = collrf::AnalysisOptions{}.min_relative_prominence;
  double smoothing = 0.0;
  double symmetry_tol = 0.5;
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
  cmd->add_option("--n", f.n, "number of emitters N")->check(CLI::PositiveNumber);
  cmd->add_option("--rabi", f.rabi, "Rabi frequency Omega (units of gamma)");
  cmd->add_option("--dd", f.dd, "dipole-dipole coupling delta (units of gamma)");
  cmd->add_option("--detuning", f.detuning, "laser detuning Delta (units of gamma)");
  cmd->add_option("--params", f.params_file, "params JSON file; explicit flags are ignored when given")
      ->check(CLI::ExistingFile);
  cmd->add_option("--grid", f.grid, "offset grid as min,max,points")->delimiter(',')->expected(3);
}

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
  cmd->add_option("--out", f.out, "output path prefix");
  cmd->add_option("--noise", f.noise, "multiplicative Gaussian noise level (0 = none)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.seed, "noise seed");
}

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& f) {
  cmd->add_option("--in", f.in, "spectrum file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--max-iter", f.max_iter, "fit iteration limit")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "relative step tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--prominence", f.prominence, "peak prominence threshold, fraction of the global maximum");
  cmd->add_option("--relative-prominence", f.relative_prominence,
                  "peak prominence threshold, fraction of the peak height");
  cmd->add_option("--smoothing", f.smoothing, "Gaussian smoothing sigma before peak detection")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--symmetry-tol", f.symmetry_tol, "mirror pairing tolerance (infer only)")
      ->check(CLI::PositiveNumber);
}

struct Resolved {
  collrf::SystemParams params;
  std::vector<double> grid;
  std::optional<collrf::io::GridSpec> grid_spec;
};

Resolved resolve(const ParamFlags& f) {
  Resolved r;
  if (!f.params_file.empty()) {
    const auto file = collrf::io::read_params(fs::path(f.params_file));
    r.params = file.params;
    r.grid_spec = file.grid;
  } else {
    r.params = collrf::make_params(f.n, f.rabi, f.dd, f.detuning);
  }
  if (!f.grid.empty()) {
    if (f.grid[2] < 2 || f.grid[2] != static_cast<double>(static_cast<std::size_t>(f.grid[2])))
      throw collrf::InvalidInput("--grid points must be an integer >= 2");
    r.grid_spec = collrf::io::GridSpec{f.grid[0], f.grid[1], static_cast<std::size_t>(f.grid[2])};
  }
  r.grid = r.grid_spec ? collrf::linear_grid(r.grid_spec->min, r.grid_spec->max, r.grid_spec->points)
                       : collrf::default_grid(r.params);
  for (const auto& w : r.params.warnings()) std::cerr << "warning: " << w << '\n';
  return r;
}

collrf::io::Provenance provenance(const Resolved& r, const std::string& command) {
  using collrf::io::format_decimal;
  auto p = collrf::io::params_provenance(r.params);
  p.emplace_back("grid_min", format_decimal(r.grid.front()));
  p.emplace_back("grid_max", format_decimal(r.grid.back()));
  p.emplace_back("grid_points", std::to_string(r.grid.size()));
  p.emplace_back("command", command);
  return p;
}

collrf::SampledSpectrum maybe_noisy(collrf::SampledSpectrum s, const OutputFlags& o) {
  if (o.noise > 0.0) return collrf::add_multiplicative_noise(s, o.noise, o.seed);
  return s;
}

json lines_json(const std::vector<collrf::SpectralLine>& lines) {
  json out = json::array();
  for (const auto& l : lines) out.push_back({{"center", l.center}, {"half_width", l.half_width}, {"weight", l.weight}});
  return out;
}

json fit_json(const collrf::FitResult& fit) {
  json out;
  out["converged"] = fit.converged;
  out["iterations"] = fit.iterations;
  out["residual_norm"] = fit.residual_norm;
  out["lines"] = lines_json(fit.lines);
  json errs = json::array();
  for (const auto& e : fit.std_errors)
    errs.push_back({{"center", e.center}, {"half_width", e.half_width}, {"weight", e.weight}});
  out["std_errors"] = errs;
  return out;
}

collrf::Analysis analyze(const AnalysisFlags& f) {
  const auto doc = collrf::io::read_spectrum(fs::path(f.in));
  collrf::AnalysisOptions opt;
  opt.min_prominence_fraction = f.prominence;
  opt.min_relative_prominence = f.relative_prominence;
  opt.smoothing = f.smoothing;
  opt.max_iter = f.max_iter;
  opt.tol = f.tol;
  return collrf::analyze_spectrum(doc.spectrum, opt);
}

std::string joined_command(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += i == 0 ? fs::path(argv[0]).filename().string() : argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective resonance fluorescence spectra of dipole-coupled two-level emitters"};
  app.require_subcommand(1);
  const std::string command = joined_command(argc, argv);

  ParamFlags sp_params;
  OutputFlags sp_out;
  std::string model_name = "general";
  auto* spectrum = app.add_subcommand("spectrum", "closed-form line spectrum");
  add_param_flags(spectrum, sp_params);
  add_output_flags(spectrum, sp_out);
  spectrum->add_option("--model", model_name, "general|mollow|n2|n3");

  ParamFlags or_params;
  OutputFlags or_out;
  std::string frame = "secular";
  bool compensate = false;
  auto* oracle = app.add_subcommand("oracle", "master-equation spectrum");
  add_param_flags(oracle, or_params);
  add_output_flags(oracle, or_out);
  oracle->add_option("--frame", frame, "secular|bare")->check(CLI::IsMember({"secular", "bare"}));
  oracle->add_flag("--compensate", compensate, "bare frame: set Delta = delta~ to cancel the linear shift");

  std::string suite_name = "all";
  std::string report_path;
  auto* validate = app.add_subcommand("validate", "run validation checks");
  validate->add_option("--suite", suite_name, "algebra|appendix|oracle|inference|all");
  validate->add_option("--report", report_path, "also write the report to this file");

  std::vector<int> which;
  std::string out_dir = ".";
  auto* figures = app.add_subcommand("figures", "plot-ready S/N^2 data for the published figures");
  figures->add_option("--which", which, "1, 2 and/or 3 (default: all)")->check(CLI::Range(1, 3));
  figures->add_option("--out-dir", out_dir, "output directory");

  AnalysisFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "detect peaks and fit a Lorentzian sum");
  add_analysis_flags(fit, fit_flags);

  AnalysisFlags infer_flags;
  auto* infer = app.add_subcommand("infer", "estimate N, delta and Omega from a spectrum");
  add_analysis_flags(infer, infer_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (spectrum->parsed()) {
      const auto r = resolve(sp_params);
      const auto lines = collrf::model_lines(collrf::line_model_from_string(model_name), r.params);
      auto prov = provenance(r, command);
      prov.emplace_back("model", std::string(collrf::to_string(lines.model)));
      if (sp_out.noise > 0.0) {
        prov.emplace_back("noise", collrf::io::format_decimal(sp_out.noise));
        prov.emplace_back("seed", std::to_string(sp_out.seed));
      }
      const auto sampled = maybe_noisy(collrf::evaluate_spectrum(lines.lines, r.grid), sp_out);
      collrf::io::write_lines(fs::path(sp_out.out + ".lines.json"), lines, prov);
      collrf::io::write_spectrum(fs::path(sp_out.out + ".spectrum.csv"), sampled, prov);
      std::cout << sp_out.out << ".lines.json: " << lines.lines.size() << " lines\n";
      return kOk;
    }

    if (oracle->parsed()) {
      const auto r = resolve(or_params);
      auto prov = provenance(r, command);
      prov.emplace_back("frame", frame);
      collrf::SampledSpectrum s;
      if (frame == "secular") {
        s = collrf::dressed_spectrum_oracle(r.params, r.grid);
      } else {
        const auto p = compensate ? collrf::compensated_bare_params(r.params) : r.params;
        if (compensate) prov.emplace_back("applied_detuning", collrf::io::format_decimal(p.detuning));
        s = collrf::bare_spectrum_oracle(p, r.grid);
      }
      if (or_out.noise > 0.0) {
        prov.emplace_back("noise", collrf::io::format_decimal(or_out.noise));
        prov.emplace_back("seed", std::to_string(or_out.seed));
      }
      collrf::io::write_spectrum(fs::path(or_out.out + ".spectrum.csv"), maybe_noisy(s, or_out), prov);
      std::cout << or_out.out << ".spectrum.csv: " << s.size() << " points\n";
      return kOk;
    }

    if (validate->parsed()) {
      const auto results = collrf::validation::run_suite(collrf::validation::suite_from_string(suite_name));
      const auto report = collrf::validation::format_report(results);
      std::cout << report;
      if (!report_path.empty()) {
        std::ofstream f(report_path);
        if (!f) throw collrf::InvalidInput("cannot write report to " + report_path);
        f << report;
      }
      for (const auto& r : results)
        if (!r.passed) return kValidation;
      return kOk;
    }

    if (figures->parsed()) {
      if (which.empty()) which = {1, 2, 3};
      fs::create_directories(out_dir);
      for (int w : which) {
        const auto data = collrf::figure_data(w);
        auto prov = collrf::io::params_provenance(data.lines.params);
        prov.emplace_back("figure", std::to_string(w));
        prov.emplace_back("normalization", "S/N^2");
        prov.emplace_back("command", command);
        const auto stem = fs::path(out_dir) / ("fig" + std::to_string(w));
        collrf::io::write_spectrum(fs::path(stem.string() + ".spectrum.csv"), data.scaled, prov);
        collrf::io::write_lines(fs::path(stem.string() + ".lines.json"), data.lines, prov);
        std::cout << stem.string() << ".spectrum.csv\n";
      }
      return kOk;
    }

    if (fit->parsed()) {
      const auto a = analyze(fit_flags);
      json out;
      out["peaks"] = a.peaks.size();
      out["fit"] = fit_json(a.fit);
      std::cout << out.dump(2) << '\n';
      return a.fit.converged ? kOk : kFitFailure;
    }

    if (infer->parsed()) {
      const auto a = analyze(infer_flags);
      json out;
      out["peaks"] = a.peaks.size();
      out["fit"] = fit_json(a.fit);
      try {
        const auto r = collrf::infer_parameters(a.fit.lines, infer_flags.symmetry_tol);
        json inf;
        inf["n_hat"] = r.n_hat;
        inf["delta_hat"] = r.delta_hat;
        inf["delta_hat_spacing"] = r.delta_hat_spacing;
        inf["omega_hat"] = r.omega_hat;
        inf["distinguishability"] = r.distinguishability ? json(*r.distinguishability) : json(nullptr);
        inf["warnings"] = r.warnings;
        out["inference"] = inf;
      } catch (const collrf::MergedRegimeError& e) {
        out["inference"] = {{"merged_regime", true},
                            {"excess_half_width", e.excess_half_width()},
                            {"delta_proxy", e.delta_proxy()},
                            {"error", e.what()}};
        std::cout << out.dump(2) << '\n';
        return kFitFailure;
      }
      std::cout << out.dump(2) << '\n';
      return a.fit.converged ? kOk : kFitFailure;
    }
  } catch (const collrf::InferenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFitFailure;
  } catch (const collrf::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const collrf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
