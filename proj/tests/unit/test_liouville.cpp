#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "../oracles/time_domain.hpp"
#include "collrf/analytic.hpp"
#include "collrf/errors.hpp"
#include "collrf/inference.hpp"
#include "collrf/liouville.hpp"

using namespace collrf;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::VectorXcd eigenvalues(const Liouvillian& L) {
  return Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(L.matrix, false).eigenvalues();
}

bool has_eigenvalue(const Eigen::VectorXcd& ev, std::complex<double> z, double tol) {
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i] - z) < tol) return true;
  return false;
}

void check_generator_invariants(const Liouvillian& L) {
  const int dim = L.hilbert_dim();
  const Eigen::RowVectorXcd id = vectorize(Eigen::MatrixXcd::Identity(dim, dim)).transpose();
  CHECK((id * L.matrix).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, L.matrix.cwiseAbs().maxCoeff()));
  const auto ev = eigenvalues(L);
  int zeros = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    CHECK(ev[i].real() <= 1e-9);
    zeros += std::abs(ev[i]) < 1e-9;
  }
  CHECK(zeros == 1);
}

}  // namespace

TEST_CASE("vectorization is column-major and matches the superoperator products") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(3, 3);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(3, 3);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Random(3, 3);
  CHECK(vectorize(x)(1) == x(1, 0));
  CHECK(max_abs(unvectorize(vectorize(x), 3) - x) == 0.0);
  CHECK((left_multiply(a) * vectorize(x) - vectorize(a * x)).norm() < 1e-12);
  CHECK((right_multiply(b) * vectorize(x) - vectorize(x * b)).norm() < 1e-12);
}

TEST_CASE("single emitter secular spectrum of the generator") {
  const double omega = 10;
  const auto L = build_secular_liouvillian(make_params(1, omega, 0));
  const auto ev = eigenvalues(L);
  CHECK(has_eigenvalue(ev, 0.0, 1e-10));
  CHECK(has_eigenvalue(ev, -0.5, 1e-10));
  CHECK(has_eigenvalue(ev, {-0.75, 2 * omega}, 1e-10));
  CHECK(has_eigenvalue(ev, {-0.75, -2 * omega}, 1e-10));
}

TEST_CASE("two emitter coherence eigenvalues") {
  const auto L = build_secular_liouvillian(make_params(2, 50, 20));
  const auto ev = eigenvalues(L);
  for (double f : {110.0, 90.0, -110.0, -90.0}) CHECK(has_eigenvalue(ev, {-1.25, f}, 0.05));
}

TEST_CASE("generator invariants over random draws, both frames") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> omega(0.5, 60.0), frac(0.0, 0.9), det(-20.0, 20.0);
  for (int draw = 0; draw < 100; ++draw) {
    const int n = 1 + draw % 10;
    const double om = omega(rng);
    const double dd = frac(rng) * 2 * om;
    CAPTURE(n);
    CAPTURE(om);
    const auto sec = build_secular_liouvillian(make_params(n, om, dd, draw % 3 == 0 ? det(rng) : 0.0));
    check_generator_invariants(sec);
    const auto bare = build_bare_liouvillian(make_params(n, om, dd, det(rng)));
    check_generator_invariants(bare);
  }
}

TEST_CASE("secular steady state is maximally mixed at resonance") {
  for (int n = 1; n <= 10; ++n) {
    for (double dd : {0.0, 5.0, 60.0}) {
      const auto rho = steady_state(build_secular_liouvillian(make_params(n, 40, dd)));
      CHECK(max_abs(rho - Eigen::MatrixXcd::Identity(n + 1, n + 1) / double(n + 1)) <= 1e-10);
    }
  }
}

TEST_CASE("bare steady states") {
  for (int n : {1, 3, 6}) {
    const auto rho = steady_state(build_bare_liouvillian(make_params(n, 0, 0)));
    Eigen::MatrixXcd ground = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    ground(0, 0) = 1.0;
    CHECK(max_abs(rho - ground) < 1e-10);
  }
  std::vector<double> gap;
  for (double omega : {2.0, 10.0, 100.0}) {
    const auto rho = steady_state(build_bare_liouvillian(make_params(1, omega, 0)));
    CHECK(max_abs(rho - rho.adjoint()) < 1e-12);
    CHECK(rho.trace().real() == doctest::Approx(1.0));
    gap.push_back(std::abs(rho(1, 1).real() - 0.5));
  }
  CHECK(gap[1] < gap[0]);
  CHECK(gap[2] < gap[1]);
  CHECK(gap[2] < 1e-4);
}

TEST_CASE("steady state is Hermitian, unit trace and positive") {
  for (int n : {2, 4, 7}) {
    const auto rho = steady_state(build_bare_liouvillian(make_params(n, 3.0, 6.0, 1.5)));
    CHECK(max_abs(rho - rho.adjoint()) < 1e-12);
    CHECK(rho.trace().real() == doctest::Approx(1.0));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("steady_state rejects a degenerate kernel") {
  Liouvillian L = build_secular_liouvillian(make_params(2, 10, 0));
  L.matrix.setZero();
  CHECK_THROWS_AS(steady_state(L), NumericalError);
}

TEST_CASE("inversion correlator is a single central Lorentzian") {
  for (int n : {1, 3, 5}) {
    const auto p = make_params(n, 30, n == 1 ? 0 : 10.0 * (n - 1));
    const auto L = build_secular_liouvillian(p);
    const auto rho = steady_state(L);
    const auto ops = collective_operators(n);
    const auto grid = linear_grid(-20, 20, 81);
    const auto s = resolvent_correlator(L, rho, {ops.inversion, ops.inversion, true}, grid);
    const double amp = n * (n + 2) / 3.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(s.values[i] == doctest::Approx(amp * 0.5 / (0.25 + grid[i] * grid[i])).epsilon(1e-10));
  }
}

TEST_CASE("raising-lowering correlator for one emitter sits at +2 Omega") {
  const double omega = 10;
  const auto L = build_secular_liouvillian(make_params(1, omega, 0));
  const auto rho = steady_state(L);
  const auto ops = collective_operators(1);
  const auto grid = linear_grid(-40, 40, 801);
  const auto s = resolvent_correlator(L, rho, {ops.raise, ops.lower, true}, grid);
  // <R+ R-> = 1/2 in the mixed state, one line of half-width 3/4
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid[i] - 2 * omega;
    CHECK(s.values[i] == doctest::Approx(0.5 * 0.75 / (0.75 * 0.75 + u * u)).epsilon(1e-9));
  }
}

TEST_CASE("coherent correlator at zero offset is singular") {
  const auto L = build_secular_liouvillian(make_params(2, 10, 0));
  const auto rho = steady_state(L);
  const auto ops = collective_operators(2);
  const std::vector<double> grid{-1.0, 0.0, 1.0};
  CHECK_THROWS_AS(resolvent_correlator(L, rho, {ops.inversion, ops.inversion, false}, grid), NumericalError);
  CHECK_THROWS_AS(resolvent_correlator(L, rho, {ops.inversion, Eigen::MatrixXcd::Identity(2, 2), true}, grid),
                  InvalidInput);
}

TEST_CASE("resolvent agrees with time-domain quadrature") {
  struct Case {
    SystemParams p;
    bool bare;
  };
  const std::vector<Case> cases{{make_params(1, 3.0, 0.0), false},
                                {make_params(2, 4.0, 3.0), false},
                                {make_params(3, 2.5, 2.0), false},
                                {make_params(1, 2.0, 0.0, 0.7), true},
                                {make_params(2, 1.5, 1.0, -0.4), true},
                                {make_params(3, 1.0, 2.0, 0.3), true}};
  const std::vector<double> xs{-7.3, -2.0, -0.4, 0.0, 0.9, 3.1, 8.0};
  for (const auto& c : cases) {
    CAPTURE(c.p.n_emitters);
    CAPTURE(c.bare);
    const auto L = c.bare ? build_bare_liouvillian(c.p) : build_secular_liouvillian(c.p);
    const auto gen = c.bare ? oracle::bare_generator(c.p) : oracle::secular_generator(c.p);
    const auto rho = steady_state(L);
    const int dim = c.p.n_emitters + 1;

    // the generators agree on the steady state before any correlator is compared
    CHECK(max_abs(oracle::relaxed_state(gen, dim) - rho) < 1e-8);

    const auto ops = collective_operators(c.p.n_emitters);
    const std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> pairs{
        {ops.raise, ops.lower}, {ops.lower, ops.raise}, {ops.inversion, ops.inversion}, {ops.raise, ops.inversion}};
    for (const auto& [a, b] : pairs) {
      const auto fast = resolvent_correlator(L, rho, {a, b, true}, xs);
      const auto slow = oracle::correlator_spectrum(gen, rho, a, b, true, xs);
      for (std::size_t k = 0; k < xs.size(); ++k) CHECK(std::abs(fast.values[k] - slow[k]) <= 1e-6);
    }
  }
}

TEST_CASE("time evolution preserves hermiticity") {
  const auto p = make_params(2, 2.0, 1.0, 0.5);
  const auto gen = oracle::bare_generator(p);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
  rho(0, 0) = 0.6;
  rho(2, 2) = 0.4;
  rho(0, 2) = rho(2, 0) = 0.2;
  for (double t : {0.3, 1.7, 6.0}) {
    const auto r = oracle::evolve(gen, rho, t);
    CHECK(max_abs(r - r.adjoint()) < 1e-10);
    CHECK(r.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("dressed oracle reproduces Mollow lines at zero coupling") {
  for (int n : {1, 3}) {
    const auto p = make_params(n, n == 1 ? 10 : 50, 0);
    const auto grid = default_grid(p);
    const auto oracle_s = dressed_spectrum_oracle(p, grid);
    const auto exact = evaluate_spectrum(mollow_limit_lines(p).lines, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(oracle_s.values[i] - exact.values[i]) < 1e-6);
  }
  CHECK_THROWS_AS(dressed_spectrum_oracle(make_params(2, 10, 5, 1.0), std::vector<double>{0.0}), InvalidInput);
}

TEST_CASE("dressed oracle for figure 1 parameters has five peaks") {
  const auto p = make_params(2, 50, 20);
  const auto s = dressed_spectrum_oracle(p, default_grid(p));
  CHECK(*std::min_element(s.values.begin(), s.values.end()) >= -1e-8);
  const auto peaks = detect_peaks(s, 0.001);
  REQUIRE(peaks.size() == 5);
  const double want[] = {-110, -90, 0, 90, 110};
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(peaks[i].location - want[i]) < 0.5);
}

TEST_CASE("bare oracle") {
  SUBCASE("single emitter Mollow triplet") {
    const auto p = make_params(1, 10, 0);
    const auto s = bare_spectrum_oracle(p, default_grid(p));
    const auto peaks = detect_peaks(s, 0.01);
    REQUIRE(peaks.size() == 3);
    CHECK(std::abs(peaks[0].location + 20) < 0.2);
    CHECK(std::abs(peaks[1].location) < 0.1);
    CHECK(std::abs(peaks[2].location - 20) < 0.2);
  }
  SUBCASE("no drive, no light") {
    const auto p = make_params(3, 0, 6);
    const auto s = bare_spectrum_oracle(p, linear_grid(-30, 30, 121));
    CHECK(std::all_of(s.values.begin(), s.values.end(), [](double v) { return std::abs(v) < 1e-12; }));
  }
  SUBCASE("large N stays within the desk budget") {
    const auto p = make_params(12, 50, 20);
    const auto s = bare_spectrum_oracle(p, linear_grid(-140, 140, 201));
    CHECK(s.size() == 201);
  }
  SUBCASE("compensated bare model approaches the dressed one near the sidebands") {
    const auto p = make_params(2, 500, 200);
    const auto bp = compensated_bare_params(p);
    CHECK(bp.detuning == doctest::Approx(200.0));
    const auto grid = linear_grid(880, 1120, 4801);
    const auto bare = detect_peaks(bare_spectrum_oracle(bp, grid), 0.01);
    const auto dressed = detect_peaks(dressed_spectrum_oracle(p, grid), 0.01);
    REQUIRE(bare.size() == 2);
    REQUIRE(dressed.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      // residual second-order shift delta~^2 / (16 Omega) = 5 gamma
      CHECK(bare[i].location - dressed[i].location == doctest::Approx(5.0).epsilon(0.05));
      CHECK(std::abs(bare[i].location / dressed[i].location - 1) < 0.01);
    }
  }
}

TEST_CASE("coherence decay rates") {
  const auto one = build_secular_liouvillian(make_params(1, 10, 0));
  const auto m = coherence_decay_rates(one, 0);
  CHECK(m.rate == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(m.frequency == doctest::Approx(20.0).epsilon(1e-12));

  const auto two = build_secular_liouvillian(make_params(2, 5000, 2000));
  for (int k : {0, 1}) CHECK(coherence_decay_rates(two, k).rate == doctest::Approx(1.25).epsilon(1e-3));

  const auto three = build_secular_liouvillian(make_params(3, 5000, 4000));
  CHECK(coherence_decay_rates(three, 1).rate == doctest::Approx(2.25).epsilon(1e-3));

  const auto degenerate = build_secular_liouvillian(make_params(3, 10, 0));
  CHECK_THROWS_AS(coherence_decay_rates(degenerate, 1), NumericalError);
  CHECK_THROWS_AS(coherence_decay_rates(three, 3), InvalidInput);
}
