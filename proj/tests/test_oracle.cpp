#include <cmath>
#include <numbers>

#include "doctest.h"
#include "entangle/bath.hpp"
#include "entangle/errors.hpp"
#include "entangle/numerics.hpp"
#include "entangle/oracle.hpp"
#include "test_support.hpp"

using namespace entangle;
using namespace entangle::oracle;
using oscillator::GaussianMoments;
using oscillator::OscillatorParams;

namespace {

GaussianMoments moments_from_xy(const OscillatorParams& p, double x, double y) {
  return oscillator::shape_to_moments(p, oscillator::shape_from_xy(x, y, p.quantum()));
}

}  // namespace

TEST_CASE("oscillator_eigenfunction is orthonormal") {
  const OscillatorParams p(1.3, 0.8);
  const auto rule = numerics::QuadratureRule::gauss_legendre(256);
  for (int n : {0, 1, 5, 12}) {
    for (int m : {0, 1, 5, 12}) {
      const double overlap = numerics::integrate(
          rule,
          [&](double q) { return oscillator_eigenfunction(p, n, q) * oscillator_eigenfunction(p, m, q); },
          -12, 12);
      CHECK(std::abs(overlap - (n == m ? 1.0 : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("z_via_quadrature examples") {
  const OscillatorParams p;
  CHECK(std::abs(z_via_quadrature(p, {0.5, 0.5}, 1.0) - std::exp(-0.5)) < 1e-10);
  const auto g33 = moments_from_xy(p, 3, 3);
  CHECK(std::abs(z_via_quadrature(p, g33, 1.0) -
                 oscillator::generating_function(oscillator::shape_from_xy(3, 3), 1.0)) < 1e-6);
  CHECK(std::abs(z_via_quadrature(p, g33, 1e-3) - 1.0) < 2e-3);
  CHECK_THROWS_AS(z_via_quadrature(p, g33, 0.0), DomainError);
}

TEST_CASE("rho_nn_via_quadrature examples") {
  const OscillatorParams p;
  CHECK(std::abs(rho_nn_via_quadrature(p, {0.5, 0.5}, 0) - 1.0) < 1e-10);
  CHECK(std::abs(rho_nn_via_quadrature(p, {0.5, 0.5}, 2)) < 1e-10);
  CHECK(std::abs(rho_nn_via_quadrature(p, {1.5, 0.5}, 1) - std::sqrt(0.5) * 0.25) < 1e-8);
  CHECK_THROWS_AS(rho_nn_via_quadrature(p, {0.5, 0.5}, 31), DomainError);
}

TEST_CASE("purity_via_quadrature examples") {
  const OscillatorParams p;
  CHECK(std::abs(purity_via_quadrature(p, {0.5, 0.5}) - 1.0) < 1e-10);
  CHECK(std::abs(purity_via_quadrature(p, {1.0, 1.0}) - 0.5) < 1e-10);
  CHECK(std::abs(purity_via_quadrature(p, moments_from_xy(p, 3, 3)) - 1.0 / 3.0) < 1e-6);
}

TEST_CASE("quadrature oracles agree with the closed forms on random states") {
  const OscillatorParams p(0.7, 1.4);
  for (auto [x, y] : testing::random_xy(20, 31, 0.3, 5.0)) {
    const auto s = oscillator::shape_from_xy(x, y, p.quantum());
    const auto g = oscillator::shape_to_moments(p, s);
    CHECK(std::abs(purity_via_quadrature(p, g) - oscillator::purity(g, p.hbar())) < 1e-6);
    CHECK(std::abs(z_via_quadrature(p, g, 0.6) - oscillator::generating_function(s, 0.6)) < 1e-6);
    const auto f = oscillator::fock_probabilities(s, 4);
    for (int n = 0; n <= 4; ++n) {
      CHECK(std::abs(rho_nn_via_quadrature(p, g, n) - f.probs[n]) < 1e-8);
    }
  }
}

TEST_CASE("qubit Fourier inversion recovers the two-level weights") {
  const qubit::QubitParams p(0.6, 1.2);
  for (const auto& b : testing::random_bloch(10, 32)) {
    const auto w = qubit_weights_via_fourier(p, b);
    const auto d = qubit::energy_distribution(p, qubit::mean_energy(p, b));
    CHECK(std::abs(w.at_minus - d.p_down) < 1e-6);
    CHECK(std::abs(w.at_plus - d.p_up) < 1e-6);
    CHECK(std::abs(w.at_zero) < 1e-6);
  }
}

TEST_CASE("TruncatedModel validation") {
  const qubit::QubitParams spin(0.5, 1.0);
  TruncatedModel m{spin, {1.0, 2.0}, {0.1, 0.1}, 8};
  CHECK(m.kind() == SystemKind::spin);
  CHECK(m.system_dimension() == 2);
  CHECK(m.dimension() == 128);
  CHECK_NOTHROW(validate(m));
  m.fock_cutoff = 2;
  CHECK_THROWS_AS(validate(m), DomainError);
  m.fock_cutoff = 8;
  m.couplings.pop_back();
  CHECK_THROWS_AS(validate(m), DomainError);
  TruncatedModel big{spin, std::vector<double>(17, 1.0), std::vector<double>(17, 0.1), 3};
  CHECK_THROWS_AS(ground_state(big), DomainError);
  TruncatedModel osc{OscillatorParams(1, 2), {1.0}, {0.1}, 6};
  CHECK(osc.kind() == SystemKind::oscillator);
  CHECK(osc.dimension() == 36);
}

TEST_CASE("zero coupling reproduces the separable limits") {
  const qubit::QubitParams spin(0.5, 1.0);
  TruncatedModel m{spin, {0.7, 1.9}, {0.0, 0.0}, 6};
  auto gs = ground_state(m);
  const double separable = -0.5 * spin.splitting() + 0.5 * (0.7 + 1.9);
  CHECK(std::abs(gs.energy - separable) < 1e-12);
  auto rho = reduced_density(gs.vector, m);
  CHECK(std::abs(rho.purity() - 1.0) < 1e-12);
  const auto pops = spin_populations(rho, spin);
  CHECK(std::abs(pops.p_up) < 1e-12);

  TruncatedModel o{OscillatorParams(1.0, 1.3), {0.9}, {0.0}, 6};
  gs = ground_state(o);
  CHECK(std::abs(gs.energy - (0.65 + 0.45)) < 1e-12);
  rho = reduced_density(gs.vector, o);
  const auto g = oscillator_moments(rho, OscillatorParams(1.0, 1.3));
  CHECK(std::abs(g.q2 - 0.5 / 1.3) < 1e-12);
  CHECK(std::abs(g.p2 - 0.5 * 1.3) < 1e-12);
}

TEST_CASE("spin plus one mode: second-order energy shift") {
  const qubit::QubitParams spin(0.4, 1.0);
  const double w = 1.7;
  const double omega = spin.splitting();
  const double nz = spin.epsilon() / omega, nx = spin.delta() / omega;
  for (double g : {0.005, 0.01, 0.02}) {
    TruncatedModel m{spin, {w}, {g}, 8};
    const double shift = ground_state(m).energy - (-0.5 * omega + 0.5 * w);
    const double second = -g * g * (nz * nz / w + nx * nx / (omega + w));
    CHECK(shift < 0.0);
    CHECK(std::abs(shift / second - 1.0) < 10 * g * g);
  }
}

TEST_CASE("reduced density populations are the two-level weights of the measured energy") {
  const qubit::QubitParams spin(0.3, 1.0);
  const auto m = spin_boson_surrogate(spin, 0.05, 10.0, 2, 8);
  const auto rho = reduced_density(ground_state(m).vector, m);
  const auto pops = spin_populations(rho, spin);
  const double energy = qubit::mean_energy(spin, pops.bloch);
  const auto d = qubit::energy_distribution(spin, energy);
  CHECK(std::abs(d.p_up - pops.p_up) < 1e-12);
  CHECK(rho.purity() < 1.0);
  CHECK(std::abs(rho.purity() - qubit::bloch_purity(pops.bloch)) < 1e-12);
}

TEST_CASE("spin-boson surrogate: p_up grows and purity falls with coupling") {
  const qubit::QubitParams spin(0.5, 1.0);
  double prev_p = -1.0, prev_purity = 2.0;
  for (double alpha : {0.0, 0.01, 0.02, 0.04, 0.08, 0.16}) {
    const auto conv = reduced_density_converged(spin_boson_surrogate(spin, alpha, 10.0, 2, 8));
    CHECK(conv.cutoff_change < 1e-6);
    const auto pops = spin_populations(conv.rho, spin);
    CHECK(pops.p_up > prev_p);
    CHECK(conv.rho.purity() < prev_purity);
    prev_p = pops.p_up;
    prev_purity = conv.rho.purity();
  }
}

TEST_CASE("first-order structure of the reduced density matrix") {
  const qubit::QubitParams spin(0.5, 1.0);
  const auto report = first_order_structure_check(
      [&](double a) { return spin_boson_surrogate(spin, a, 10.0, 2, 8); },
      {0.0, 0.005, 0.01, 0.02, 0.04, 0.08});
  REQUIRE(report.fit_ok);
  CHECK(std::abs(report.points.front().p_up) < 1e-15);
  CHECK(report.points.front().lambda_min == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(report.difference_loglog - 2.0) < 0.2);
  CHECK(std::abs(report.p_up_slope - report.eigenvalue_slope) < 0.02 * report.p_up_slope);
  CHECK(std::abs(report.purity_slope - 2.0 * report.p_up_slope) < 0.05 * report.p_up_slope);

  const auto short_report = first_order_structure_check(
      [&](double a) { return spin_boson_surrogate(spin, a, 10.0, 2, 8); }, {0.01, 0.02});
  CHECK_FALSE(short_report.fit_ok);
  CHECK_FALSE(short_report.message.empty());
}

TEST_CASE("oscillator ED matches the equivalent bilinear network") {
  // g X_s (b + b^dagger) with unit masses is a stiffness entry 2 g sqrt(w w_k).
  const OscillatorParams sys(1.0, 1.2);
  const std::vector<double> freqs{0.8, 1.9};
  const std::vector<double> couplings{0.08, 0.12};
  TruncatedModel m{sys, freqs, couplings, 12};
  const auto gs = ground_state(m);
  CHECK(gs.dense);
  const auto ed = oscillator_moments(reduced_density(gs.vector, m), sys);

  NormalModeNetwork net;
  net.mass_matrix = Eigen::MatrixXd::Identity(3, 3);
  net.stiffness_matrix = Eigen::MatrixXd::Zero(3, 3);
  net.stiffness_matrix(0, 0) = sys.omega() * sys.omega();
  for (int k = 0; k < 2; ++k) {
    net.stiffness_matrix(k + 1, k + 1) = freqs[k] * freqs[k];
    net.stiffness_matrix(0, k + 1) = net.stiffness_matrix(k + 1, 0) =
        2.0 * couplings[k] * std::sqrt(sys.omega() * freqs[k]);
  }
  const auto exact = network_ground_covariances(net);
  CHECK(std::abs(ed.q2 - exact.q2) < 1e-6);
  CHECK(std::abs(ed.p2 - exact.p2) < 1e-6);
}

TEST_CASE("Lanczos path agrees with the exact network") {
  const OscillatorParams sys(1.0, 1.0);
  TruncatedModel m{sys, {1.5, 2.5}, {0.1, 0.1}, 14};
  REQUIRE(m.dimension() > kDenseDimension);
  const auto gs = ground_state(m);
  CHECK_FALSE(gs.dense);
  CHECK(gs.residual < 1e-8);

  NormalModeNetwork net;
  net.mass_matrix = Eigen::MatrixXd::Identity(3, 3);
  net.stiffness_matrix = Eigen::Matrix3d{{1.0, 2 * 0.1 * std::sqrt(1.5), 2 * 0.1 * std::sqrt(2.5)},
                                         {2 * 0.1 * std::sqrt(1.5), 2.25, 0.0},
                                         {2 * 0.1 * std::sqrt(2.5), 0.0, 6.25}};
  const auto exact = network_ground_covariances(net);
  const auto ed = oscillator_moments(reduced_density(gs.vector, m), sys);
  CHECK(std::abs(ed.q2 - exact.q2) < 1e-6);
  CHECK(std::abs(ed.p2 - exact.p2) < 1e-6);

  // Zero coupling above the dense threshold: the separable energy.
  TruncatedModel free{qubit::QubitParams(0.0, 1.0), {1.0, 2.0, 3.0, 4.0}, {0, 0, 0, 0}, 7};
  REQUIRE(free.dimension() > kDenseDimension);
  CHECK(std::abs(ground_state(free).energy - (-0.5 + 5.0)) < 1e-9);
}

TEST_CASE("network examples") {
  NormalModeNetwork single{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1), 0, 1.0};
  auto g = network_ground_covariances(single);
  CHECK(g.q2 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.p2 == doctest::Approx(0.5).epsilon(1e-14));

  // Two identical oscillators with spring c between them: modes sqrt(k) and sqrt(k + 2c).
  const double k = 1.0, c = 0.6;
  NormalModeNetwork pair{Eigen::MatrixXd::Identity(2, 2),
                         Eigen::Matrix2d{{k + c, -c}, {-c, k + c}}, 0, 1.0};
  const double w1 = std::sqrt(k), w2 = std::sqrt(k + 2 * c);
  g = network_ground_covariances(pair);
  CHECK(std::abs(g.q2 - 0.25 * (1 / w1 + 1 / w2)) < 1e-14);
  CHECK(std::abs(g.p2 - 0.25 * (w1 + w2)) < 1e-14);
  CHECK(oscillator::purity(g) < 1.0);

  NormalModeNetwork uncoupled{Eigen::MatrixXd::Identity(2, 2), Eigen::Matrix2d{{2.0, 0}, {0, 3.0}},
                              1, 1.0};
  CHECK(std::abs(oscillator::purity(network_ground_covariances(uncoupled)) - 1.0) < 1e-14);

  NormalModeNetwork zero_mode{Eigen::MatrixXd::Identity(2, 2),
                              Eigen::Matrix2d{{1.0, -1.0}, {-1.0, 1.0}}, 0, 1.0};
  CHECK_THROWS_AS(network_ground_covariances(zero_mode), DomainError);
  NormalModeNetwork asym{Eigen::MatrixXd::Identity(2, 2), Eigen::Matrix2d{{1.0, 0.2}, {0.0, 1.0}},
                         0, 1.0};
  CHECK_THROWS_AS(network_ground_covariances(asym), DomainError);
}

TEST_CASE("ohmic network: purity and convergence toward the continuum shape") {
  for (double alpha : {0.0, 0.1, 0.3}) {
    const auto g = network_ground_covariances(ohmic_star_network(alpha, 10.0, 50));
    const double pur = oscillator::purity(g);
    CHECK(pur <= 1.0 + 1e-12);
    if (alpha == 0.0) {
      CHECK(std::abs(pur - 1.0) < 1e-12);
    } else {
      CHECK(pur < 1.0);
    }
  }

  const double alpha = 0.3;
  auto shape = [&](double cutoff, int modes) {
    const auto g = network_ground_covariances(ohmic_star_network(alpha, cutoff, modes));
    return std::pair{2 * g.q2, 2 * g.p2};
  };
  // Converged in the number of modes.
  const auto [x200, y200] = shape(10.0, 200);
  const auto [x400, y400] = shape(10.0, 400);
  CHECK(std::abs(x400 - x200) < 1e-3);
  CHECK(std::abs(y400 - y200) < 1e-3);
  // A wider band moves both coordinates toward the continuum formulas.
  const auto [x_wide, y_wide] = shape(100.0, 400);
  const double x_ref = bath::ohmic_x(alpha);
  CHECK(std::abs(x_wide - x_ref) < std::abs(x400 - x_ref));
  CHECK(std::abs(y_wide - bath::ohmic_y({alpha, 100.0})) <
        std::abs(y400 - bath::ohmic_y({alpha, 10.0})));
}
