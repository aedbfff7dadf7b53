#include "collrf/core.hpp"

#include <cmath>
#include <numbers>

#include "collrf/errors.hpp"

namespace collrf {

namespace {
constexpr double kSecularMargin = 10.0;

void require_rate(double value, const char* name) {
  if (!std::isfinite(value)) throw InvalidInput(std::string(name) + " must be finite");
  if (value < 0.0) throw InvalidInput(std::string(name) + " must be non-negative");
}
}  // namespace

bool SystemParams::secular_ok() const {
  if (!(2.0 * rabi > dd_coupling)) return false;
  if (n_emitters == 1) return true;
  return dd_coupling >= kSecularMargin * n_emitters * gamma;
}

std::vector<std::string> SystemParams::warnings() const {
  std::vector<std::string> out;
  if (!(2.0 * rabi > dd_coupling))
    out.emplace_back("secular regime violated: need 2*rabi > dd_coupling");
  if (n_emitters > 1 && dd_coupling < kSecularMargin * n_emitters * gamma)
    out.emplace_back("secular regime violated: need dd_coupling >= 10*N*gamma");
  return out;
}

SystemParams make_params(int n, double rabi, double dd_coupling, double detuning) {
  if (n < 1) throw InvalidInput("n_emitters must be >= 1");
  require_rate(rabi, "rabi");
  require_rate(dd_coupling, "dd_coupling");
  if (!std::isfinite(detuning)) throw InvalidInput("detuning must be finite");
  return SystemParams{n, 1.0, rabi, dd_coupling, detuning};
}

double scaled_coupling(double delta, int n) {
  return n >= 2 ? delta / static_cast<double>(n - 1) : 0.0;
}

DressedFrame dressed_frame(const SystemParams& p) {
  DressedFrame f;
  // cot 2theta = Delta / (2 Omega); resonance is pinned to pi/4 exactly
  f.theta = p.detuning == 0.0 ? std::numbers::pi / 4 : 0.5 * std::atan2(2.0 * p.rabi, p.detuning);
  f.g_big = std::hypot(p.rabi, 0.5 * p.detuning);
  f.delta_tilde = scaled_coupling(p.dd_coupling, p.n_emitters);

  const double s = std::sin(f.theta);
  const double c = std::cos(f.theta);
  const double s2 = std::sin(2.0 * f.theta);
  const double s4 = s * s * s * s;
  const double c4 = c * c * c * c;
  f.g_bar = f.g_big + f.delta_tilde * (s4 - 0.5 * s2 * s2);
  f.delta_bar = f.delta_tilde * (c4 + s4 - s2 * s2);
  if (p.detuning == 0.0) {
    // exact values at theta = pi/4, free of rounding in sin/cos
    f.g_bar = f.g_big - 0.25 * f.delta_tilde;
    f.delta_bar = -0.5 * f.delta_tilde;
  }
  return f;
}

CollectiveOperators collective_operators(int n) {
  if (n < 1) throw InvalidInput("n_emitters must be >= 1");
  const int dim = n + 1;
  CollectiveOperators ops;
  ops.raise = OperatorMatrix::Zero(dim, dim);
  ops.inversion = OperatorMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    ops.inversion(k, k) = static_cast<double>(2 * k - n);
    if (k < n) ops.raise(k + 1, k) = std::sqrt(static_cast<double>((n - k) * (k + 1)));
  }
  ops.lower = ops.raise.adjoint();
  return ops;
}

}  // namespace collrf
