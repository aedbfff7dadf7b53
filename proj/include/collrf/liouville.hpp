#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "collrf/analytic.hpp"
#include "collrf/core.hpp"

namespace collrf {

using DensityOperator = Eigen::MatrixXcd;
using SuperOperator = Eigen::MatrixXcd;

enum class Frame { secular_dressed, bare_nonsecular };

/// Generator of d rho/dt acting on column-major vec(rho), dimension (N+1)^2.
struct Liouvillian {
  SuperOperator matrix;
  Frame frame = Frame::secular_dressed;
  SystemParams params;

  int hilbert_dim() const { return params.n_emitters + 1; }
};

// Superoperator building blocks (column-major vectorization: vec(A X B) = (B^T kron A) vec X).
SuperOperator left_multiply(const OperatorMatrix& a);
SuperOperator right_multiply(const OperatorMatrix& a);
/// rate * (c rho c^dagger - {c^dagger c, rho} / 2)
SuperOperator lindblad_dissipator(const OperatorMatrix& c, double rate);
/// -i [h, rho]
SuperOperator hamiltonian_generator(const OperatorMatrix& h);

Eigen::VectorXcd vectorize(const OperatorMatrix& m);
OperatorMatrix unvectorize(const Eigen::VectorXcd& v, int dim);

/// Dressed-frame secular master equation with the flat reservoir Gamma(+-) = gamma.
Liouvillian build_secular_liouvillian(const SystemParams& params);

/// Bare frame: H = Delta S_z + Omega (S+ + S-) - delta~ S+ S-, collective decay of S- at gamma.
Liouvillian build_bare_liouvillian(const SystemParams& params);

/// Bare-frame parameters with Delta = delta~, which cancels the linear S_z piece of -delta~ S+S-.
SystemParams compensated_bare_params(const SystemParams& params);

/// Unique normalized null vector of L. Throws NumericalError if the kernel is not one-dimensional.
DensityOperator steady_state(const Liouvillian& L);

/// Two-time correlator <A B(tau)>; `incoherent` removes the tau -> infinity plateau.
struct CorrelatorSpec {
  OperatorMatrix left;   // A
  OperatorMatrix right;  // B
  bool incoherent = true;
};

/// Re int_0^inf e^{i x tau} (<A B(tau)>_s - plateau) d tau at each grid offset, via the
/// quantum regression theorem and one linear solve per grid point.
SampledSpectrum resolvent_correlator(const Liouvillian& L, const DensityOperator& rho_s,
                                     const CorrelatorSpec& spec, std::span<const double> grid);

/// Same as above for several correlators sharing each factorization.
std::vector<SampledSpectrum> resolvent_correlators(const Liouvillian& L,
                                                   const DensityOperator& rho_s,
                                                   std::span<const CorrelatorSpec> specs,
                                                   std::span<const double> grid);

/// (1/4)[<Rz Rz(tau)> + <R+ R-(tau)> + <R- R+(tau)>] on the secular Liouvillian; Delta = 0.
SampledSpectrum dressed_spectrum_oracle(const SystemParams& params, std::span<const double> grid);

/// Incoherent <S+ S-(tau)> on the bare Liouvillian.
SampledSpectrum bare_spectrum_oracle(const SystemParams& params, std::span<const double> grid);

struct CoherenceMode {
  double rate = 0.0;       // -Re(lambda)
  double frequency = 0.0;  // |Im(lambda)|
};

/// Eigenvalue of the first off-diagonal coherence sector that pairs with rho_{n,n+1},
/// matched by nearest expected frequency 2 Omega - delta~ (1 + 2n - N) / 2.
CoherenceMode coherence_decay_rates(const Liouvillian& L, int n);

}  // namespace collrf
