#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace collrf {

/// Physical inputs. All rates and frequencies are in units of gamma, which is fixed to 1.
struct SystemParams {
  int n_emitters = 1;
  double gamma = 1.0;
  double rabi = 0.0;         // Omega
  double dd_coupling = 0.0;  // delta, pairwise dipole-dipole strength
  double detuning = 0.0;     // Delta = w0 - wL + delta~

  /// 2 Omega > delta and delta >= 10 N gamma (the delta bound is waived for N = 1).
  bool secular_ok() const;
  std::vector<std::string> warnings() const;
};

/// Validates and normalizes. Throws InvalidInput on N < 1, negative or non-finite rates.
SystemParams make_params(int n, double rabi, double dd_coupling, double detuning = 0.0);

/// delta / (N - 1); zero for a single emitter.
double scaled_coupling(double delta, int n);

struct DressedFrame {
  double theta = 0.0;        // mixing angle, cot 2theta = Delta / (2 Omega)
  double g_big = 0.0;        // G = sqrt(Omega^2 + (Delta/2)^2)
  double g_bar = 0.0;        // G + delta~ (sin^4 theta - sin^2 2theta / 2)
  double delta_bar = 0.0;    // delta~ (cos^4 theta + sin^4 theta - sin^2 2theta)
  double delta_tilde = 0.0;
};

DressedFrame dressed_frame(const SystemParams& params);

/// Complex matrix on the symmetric Dicke subspace, basis |n>, n = number of excitations.
using OperatorMatrix = Eigen::MatrixXcd;

struct CollectiveOperators {
  OperatorMatrix raise;      // R+ : <n+1|R+|n> = sqrt((N-n)(n+1))
  OperatorMatrix lower;      // R- = (R+)^dagger
  OperatorMatrix inversion;  // R_z = diag(2n - N)
};

CollectiveOperators collective_operators(int n);

}  // namespace collrf
