#include "collrf/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "collrf/errors.hpp"

namespace collrf {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

SuperOperator kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  SuperOperator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void require_valid(const SystemParams& p) {
  // re-run the constructor checks; params may have been assembled by hand
  (void)make_params(p.n_emitters, p.rabi, p.dd_coupling, p.detuning);
}

/// Runs body(begin, end) over [0, count) on a few threads; each index is handled exactly once.
template <typename Body>
void parallel_chunks(std::size_t count, Body&& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, std::max<std::size_t>(1, count / 64));
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace

SuperOperator left_multiply(const OperatorMatrix& a) {
  return kron(Eigen::MatrixXcd::Identity(a.rows(), a.cols()), a);
}

SuperOperator right_multiply(const OperatorMatrix& a) {
  return kron(a.transpose(), Eigen::MatrixXcd::Identity(a.rows(), a.cols()));
}

SuperOperator lindblad_dissipator(const OperatorMatrix& c, double rate) {
  const OperatorMatrix cdc = c.adjoint() * c;
  return rate * (kron(c.conjugate(), c) - 0.5 * left_multiply(cdc) - 0.5 * right_multiply(cdc));
}

SuperOperator hamiltonian_generator(const OperatorMatrix& h) {
  return -kI * (left_multiply(h) - right_multiply(h));
}

Eigen::VectorXcd vectorize(const OperatorMatrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

OperatorMatrix unvectorize(const Eigen::VectorXcd& v, int dim) {
  return Eigen::Map<const OperatorMatrix>(v.data(), dim, dim);
}

Liouvillian build_secular_liouvillian(const SystemParams& p) {
  require_valid(p);
  const auto ops = collective_operators(p.n_emitters);
  const auto frame = dressed_frame(p);
  const double s = std::sin(frame.theta);
  const double c = std::cos(frame.theta);
  const double s2 = std::sin(2.0 * frame.theta);

  const OperatorMatrix h = frame.g_bar * ops.inversion - frame.delta_bar * ops.raise * ops.lower;

  // -(G0/8) sin^2 2th [Rz, Rz rho] - (1/2) cos^4 th [R+, g R- rho] - (1/2) sin^4 th [R-, g R+ rho]
  // + H.c., written as Lindblad terms with rates g sin^2 2th / 4, g cos^4 th, g sin^4 th.
  SuperOperator m = hamiltonian_generator(h);
  m += lindblad_dissipator(ops.inversion, p.gamma * s2 * s2 / 4.0);
  m += lindblad_dissipator(ops.lower, p.gamma * c * c * c * c);
  m += lindblad_dissipator(ops.raise, p.gamma * s * s * s * s);
  return {std::move(m), Frame::secular_dressed, p};
}

Liouvillian build_bare_liouvillian(const SystemParams& p) {
  require_valid(p);
  const auto ops = collective_operators(p.n_emitters);
  const double dt = scaled_coupling(p.dd_coupling, p.n_emitters);
  const OperatorMatrix sz = 0.5 * ops.inversion;
  const OperatorMatrix h =
      p.detuning * sz + p.rabi * (ops.raise + ops.lower) - dt * ops.raise * ops.lower;
  SuperOperator m = hamiltonian_generator(h) + lindblad_dissipator(ops.lower, p.gamma);
  return {std::move(m), Frame::bare_nonsecular, p};
}

SystemParams compensated_bare_params(const SystemParams& p) {
  SystemParams out = p;
  out.detuning = scaled_coupling(p.dd_coupling, p.n_emitters);
  return out;
}

DensityOperator steady_state(const Liouvillian& L) {
  const int dim = L.hilbert_dim();
  Eigen::FullPivLU<SuperOperator> lu(L.matrix);
  lu.setThreshold(1e-10);
  const auto kernel_dim = lu.dimensionOfKernel();
  if (kernel_dim != 1) {
    throw NumericalError("steady state is not unique: null space has dimension " +
                         std::to_string(kernel_dim));
  }
  Eigen::VectorXcd v = lu.kernel().col(0);
  OperatorMatrix rho = unvectorize(v, dim);
  const cd tr = rho.trace();
  if (std::abs(tr) < 1e-14) throw NumericalError("steady-state null vector is traceless");
  rho /= tr;
  rho = 0.5 * (rho + rho.adjoint()).eval();

  const double residual = (L.matrix * vectorize(rho)).norm();
  const double scale = std::max(1.0, L.matrix.cwiseAbs().maxCoeff());
  if (residual > 1e-9 * scale) {
    throw NumericalError("steady-state residual too large: " + std::to_string(residual));
  }
  return rho;
}

std::vector<SampledSpectrum> resolvent_correlators(const Liouvillian& L,
                                                   const DensityOperator& rho_s,
                                                   std::span<const CorrelatorSpec> specs,
                                                   std::span<const double> grid) {
  const int dim = L.hilbert_dim();
  const Eigen::Index big = L.matrix.rows();
  for (const auto& spec : specs) {
    if (spec.left.rows() != dim || spec.right.rows() != dim || spec.left.cols() != dim ||
        spec.right.cols() != dim) {
      throw InvalidInput("correlator operators do not match the Liouvillian dimension");
    }
  }

  // QRT: <A B(tau)> = Tr[B e^{L tau} (rho_s A)]
  const Eigen::VectorXcd rho_vec = vectorize(rho_s);
  const Eigen::VectorXcd identity_vec = vectorize(OperatorMatrix::Identity(dim, dim));
  std::vector<Eigen::VectorXcd> sources;
  std::vector<Eigen::RowVectorXcd> probes;
  bool any_coherent = false;
  for (const auto& spec : specs) {
    Eigen::VectorXcd v = vectorize(rho_s * spec.left);
    if (spec.incoherent) {
      v -= (identity_vec.dot(v)) * rho_vec;  // drop the stationary component
    } else {
      any_coherent = true;
    }
    sources.push_back(std::move(v));
    // Tr[B Y] = sum_ij B_ji Y_ij = vec(B^T) . vec(Y)
    probes.push_back(vectorize(spec.right.transpose()).transpose());
  }

  // Adding -|rho_s><<I| keeps trace-free sources trace-free and lifts the zero eigenvalue.
  const SuperOperator deflated = L.matrix - rho_vec * identity_vec.adjoint();

  std::vector<SampledSpectrum> out(specs.size());
  for (auto& s : out) s = {{grid.begin(), grid.end()}, std::vector<double>(grid.size(), 0.0)};

  if (any_coherent) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i]) < 1e-12) {
        throw NumericalError("singular resolvent: coherent correlator evaluated at x = 0");
      }
    }
  }

  parallel_chunks(grid.size(), [&](std::size_t begin, std::size_t end) {
    const SuperOperator shift = kI * SuperOperator::Identity(big, big);
    for (std::size_t i = begin; i < end; ++i) {
      const double x = grid[i];
      Eigen::PartialPivLU<SuperOperator> lu_def(deflated + x * shift);
      std::optional<Eigen::PartialPivLU<SuperOperator>> lu_raw;
      for (std::size_t k = 0; k < specs.size(); ++k) {
        Eigen::VectorXcd y;
        if (specs[k].incoherent) {
          y = lu_def.solve(-sources[k]);
        } else {
          if (!lu_raw) lu_raw.emplace(L.matrix + x * shift);
          y = lu_raw->solve(-sources[k]);
        }
        out[k].values[i] = (probes[k] * y)(0).real();
      }
    }
  });
  return out;
}

SampledSpectrum resolvent_correlator(const Liouvillian& L, const DensityOperator& rho_s,
                                     const CorrelatorSpec& spec, std::span<const double> grid) {
  return resolvent_correlators(L, rho_s, std::span(&spec, 1), grid).front();
}

SampledSpectrum dressed_spectrum_oracle(const SystemParams& p, std::span<const double> grid) {
  if (p.detuning != 0.0) throw InvalidInput("dressed oracle is defined at resonance only");
  const auto L = build_secular_liouvillian(p);
  const auto rho = steady_state(L);
  const auto ops = collective_operators(p.n_emitters);
  const std::vector<CorrelatorSpec> specs{{ops.inversion, ops.inversion, true},
                                          {ops.raise, ops.lower, true},
                                          {ops.lower, ops.raise, true}};
  const auto parts = resolvent_correlators(L, rho, specs, grid);
  SampledSpectrum out = parts[0];
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = 0.25 * (parts[0].values[i] + parts[1].values[i] + parts[2].values[i]);
  return out;
}

SampledSpectrum bare_spectrum_oracle(const SystemParams& p, std::span<const double> grid) {
  const auto L = build_bare_liouvillian(p);
  const auto rho = steady_state(L);
  const auto ops = collective_operators(p.n_emitters);
  return resolvent_correlator(L, rho, {ops.raise, ops.lower, true}, grid);
}

CoherenceMode coherence_decay_rates(const Liouvillian& L, int n) {
  const auto& p = L.params;
  if (L.frame != Frame::secular_dressed)
    throw InvalidInput("coherence decay rates need the secular Liouvillian");
  if (p.detuning != 0.0) throw InvalidInput("coherence decay rates are defined at resonance");
  const int big_n = p.n_emitters;
  if (n < 0 || n >= big_n) throw InvalidInput("coherence index must satisfy 0 <= n < N");

  const int dim = big_n + 1;
  // rho_{m,m+1} sits at column-major index m + (m+1) dim; the sector is invariant under L
  std::vector<Eigen::Index> idx;
  for (int m = 0; m < big_n; ++m) idx.push_back(m + (m + 1) * dim);
  SuperOperator block(big_n, big_n);
  for (int r = 0; r < big_n; ++r)
    for (int c = 0; c < big_n; ++c) block(r, c) = L.matrix(idx[r], idx[c]);

  Eigen::ComplexEigenSolver<SuperOperator> solver(block, false);
  if (solver.info() != Eigen::Success) throw NumericalError("coherence sector eigensolve failed");
  const auto& ev = solver.eigenvalues();

  const double dt = scaled_coupling(p.dd_coupling, big_n);
  const double expected = 2.0 * p.rabi - dt * (1.0 + 2.0 * n - big_n) / 2.0;
  Eigen::Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const double dist = std::abs(std::abs(ev[k].imag()) - expected);
    if (dist < best_dist) {
      second = best_dist;
      best_dist = dist;
      best = k;
    } else if (dist < second) {
      second = dist;
    }
  }
  if (second - best_dist < 1e-6) {
    throw NumericalError("ambiguous coherence pairing: sector eigenvalues are degenerate in frequency");
  }
  return {-ev[best].real(), std::abs(ev[best].imag())};
}

}  // namespace collrf
