#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "entangle/errors.hpp"
#include "entangle/numerics.hpp"
#include "entangle/oscillator.hpp"
#include "test_support.hpp"

using namespace entangle;
using namespace entangle::oscillator;

namespace {

// rho_nn / rho_00 for n = 0..7 as polynomials in (a, b).
double table_ratio(int n, double a, double b) {
  const double a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  switch (n) {
    case 0: return 1.0;
    case 1: return b;
    case 2: return a2 / 2 + b * b;
    case 3: return 3 * a2 * b / 2 + std::pow(b, 3);
    case 4: return 3 * a4 / 8 + 3 * a2 * b * b + std::pow(b, 4);
    case 5: return 15 * a4 * b / 8 + 5 * a2 * std::pow(b, 3) + std::pow(b, 5);
    case 6:
      return 5 * a6 / 16 + 45 * a4 * b * b / 8 + 15 * a2 * std::pow(b, 4) / 2 + std::pow(b, 6);
    case 7:
      return 35 * a6 * b / 16 + 105 * a4 * std::pow(b, 3) / 8 + 21 * a2 * std::pow(b, 5) / 2 +
             std::pow(b, 7);
  }
  return 0.0;
}

}  // namespace

TEST_CASE("OscillatorParams") {
  OscillatorParams p(2.0, 3.0, 0.5);
  CHECK(p.gamma() * p.gamma() == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(p.quantum() == 1.5);
  CHECK(p.level(2) == doctest::Approx(3.75));
  CHECK_NOTHROW(OscillatorParams(1.0, 0.0));
  CHECK_THROWS_AS(OscillatorParams(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(OscillatorParams(1.0, -1.0), DomainError);
}

TEST_CASE("moments_to_shape examples") {
  const OscillatorParams unit;
  auto s = moments_to_shape(unit, {0.5, 0.5});
  CHECK(s.x == 1.0);
  CHECK(s.y == 1.0);
  CHECK(s.d == 4.0);
  CHECK(s.a == 0.0);
  CHECK(s.b == 0.0);
  CHECK(s.energy == 0.5);
  CHECK(s.area == 0.25);

  s = moments_to_shape(unit, {1.5, 0.5});
  CHECK(s.x == doctest::Approx(3.0));
  CHECK(s.y == doctest::Approx(1.0));
  CHECK(s.d == doctest::Approx(8.0));
  CHECK(s.a == doctest::Approx(-0.25));
  CHECK(s.b == doctest::Approx(0.25));
  CHECK(s.energy == doctest::Approx(1.0));
  CHECK(s.area == doctest::Approx(0.75));

  s = moments_to_shape(unit, {1.5, 1.5});
  CHECK(s.d == doctest::Approx(16.0));
  CHECK(s.a == 0.0);
  CHECK(s.b == doctest::Approx(0.5));
  CHECK(s.energy == doctest::Approx(1.5));
  CHECK(s.area == doctest::Approx(2.25));

  CHECK_THROWS_AS(moments_to_shape(unit, {0.4, 0.5}), UncertaintyViolation);
  CHECK_THROWS_AS(moments_to_shape(OscillatorParams(1.0, 0.0), {1.0, 1.0}), DomainError);
}

TEST_CASE("shape invariants and round trip") {
  const OscillatorParams p(1.7, 0.6, 1.3);
  for (auto [x, y] : testing::random_xy(200, 21, 0.2, 10.0)) {
    const auto s = shape_from_xy(x, y, p.quantum());
    CHECK(s.a >= -1.0);
    CHECK(s.a <= 1.0);
    CHECK(s.b >= 0.0);
    CHECK(s.b < 1.0);
    const double identity = (x * x - 1) * (y * y - 1) / (s.d * s.d);
    CHECK(std::abs(s.b * s.b - s.a * s.a - identity) < 1e-14);

    const auto g = shape_to_moments(p, s);
    const double two_e = p.mass() * p.omega() * p.omega() * g.q2 + g.p2 / p.mass();
    CHECK(std::abs(two_e - 2.0 * s.energy) < 1e-12 * two_e);

    const auto back = moments_to_shape(p, g);
    CHECK(std::abs(back.x - x) < 1e-12 * x);
    CHECK(std::abs(back.y - y) < 1e-12 * y);
  }
  CHECK_THROWS_AS(shape_from_xy(0.5, 1.5), UncertaintyViolation);
}

TEST_CASE("purity") {
  CHECK(purity(GaussianMoments{0.5, 0.5}) == 1.0);
  CHECK(purity(GaussianMoments{1.0, 1.0}) == 0.5);
  CHECK(purity(GaussianMoments{2.0, 0.5}) == 0.5);
  CHECK(purity(shape_from_xy(3, 3)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(purity(GaussianMoments{0.1, 0.1}), UncertaintyViolation);

  const OscillatorParams p(1.0, 2.0, 1.0);
  for (auto [x, y] : testing::random_xy(100, 22)) {
    const auto s = shape_from_xy(x, y, p.quantum());
    const double from_moments = purity(shape_to_moments(p, s), p.hbar());
    CHECK(std::abs(from_moments - purity(s)) < 1e-12);
    CHECK(std::abs(purity(s) - 0.5 / std::sqrt(s.area)) < 1e-12);
    CHECK(purity(s) <= 1.0 + 1e-15);
  }
}

TEST_CASE("position_density_matrix") {
  const OscillatorParams p;
  const GaussianMoments g{1.3, 0.7};
  CHECK(position_density_matrix(p, g, 0, 0) ==
        doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi * g.q2)).epsilon(1e-15));
  CHECK(position_density_matrix(p, g, 0.3, -1.1) == position_density_matrix(p, g, -1.1, 0.3));

  const auto rule = numerics::QuadratureRule::gauss_legendre(200);
  const double w = 12.0 * std::sqrt(g.q2);
  const double trace = numerics::integrate(
      rule, [&](double q) { return position_density_matrix(p, g, q, q); }, -w, w);
  const double second = numerics::integrate(
      rule, [&](double q) { return q * q * position_density_matrix(p, g, q, q); }, -w, w);
  CHECK(std::abs(trace - 1.0) < 1e-13);
  CHECK(std::abs(second - g.q2) < 1e-12);
}

TEST_CASE("imaginary_time_propagator") {
  const OscillatorParams p;
  CHECK(imaginary_time_propagator(p, 0.4, -0.2, 0.8) ==
        doctest::Approx(imaginary_time_propagator(p, -0.2, 0.4, 0.8)).epsilon(1e-15));
  CHECK(imaginary_time_propagator(p, 0, 0, 1.0) ==
        doctest::Approx(std::sqrt(1.0 / (2 * std::numbers::pi * std::sinh(1.0)))).epsilon(1e-14));

  const auto rule = numerics::QuadratureRule::gauss_legendre(200);
  const double trace = numerics::integrate(
      rule, [&](double q) { return imaginary_time_propagator(p, q, q, 1.0); }, -15, 15);
  CHECK(std::abs(trace - std::exp(-0.5) / (1 - std::exp(-1.0))) < 1e-12);

  // Small omega approaches the free heat kernel.
  const OscillatorParams slow(1.0, 1e-5);
  const double chi = 0.7, q = 0.3, qp = -0.5;
  const double free =
      std::sqrt(1.0 / (2 * std::numbers::pi * chi)) * std::exp(-(q - qp) * (q - qp) / (2 * chi));
  CHECK(std::abs(imaginary_time_propagator(slow, q, qp, chi) - free) < 1e-9);

  CHECK_THROWS_AS(imaginary_time_propagator(p, 0, 0, 0.0), DomainError);
  CHECK_THROWS_AS(imaginary_time_propagator(OscillatorParams(1, 0), 0, 0, 1.0), DomainError);
}

TEST_CASE("generating_function examples") {
  const auto s = shape_from_xy(3, 1);
  CHECK(generating_function(s, 0.0) == 1.0);
  const auto iso = shape_from_xy(1, 1, 2.0);
  for (double chi : {0.1, 1.0, 3.0}) {
    CHECK(std::abs(generating_function(iso, chi) - std::exp(-chi)) < 1e-15);
  }
  // Strictly decreasing.
  double prev = 1.0;
  for (int k = 1; k <= 50; ++k) {
    const double z = generating_function(s, 0.1 * k);
    CHECK(z < prev);
    CHECK(z > 0.0);
    prev = z;
  }
  const auto f = fock_probabilities(s, 120);
  CHECK(std::abs(generating_function(s, std::log(2.0)) -
                 spectral_generating_function(f, OscillatorParams(), std::log(2.0))) < 1e-10);
}

TEST_CASE("generating_function_free") {
  CHECK(generating_function_free(2.0, 1.0, 0.0) == 1.0);
  CHECK(generating_function_free(1.0, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  // <(p^2/2m)^n> = (2n-1)!! (p2/2m)^n from (-1)^n d^n Z.
  numerics::FiniteDifferenceScheme scheme;
  scheme.step = 0.02;
  auto z = [](double chi) { return generating_function_free(1.0, 1.0, chi); };
  for (int n = 1; n <= 3; ++n) {
    const double moment = (n % 2 ? -1.0 : 1.0) * numerics::nth_derivative(z, n, scheme).value;
    const double wick = static_cast<double>(numerics::double_factorial(2 * n - 1)) / std::pow(2.0, n);
    CHECK(std::abs(moment - wick) < 1e-6);
  }
}

TEST_CASE("free-particle limit of the oscillator generating function") {
  const double p2 = 0.8, q2 = 1.1;
  const OscillatorParams p(1.0, 1e-4);
  const auto s = moments_to_shape(p, {q2, p2});
  for (double chi : {0.1, 0.5, 1.0, 2.0}) {
    CHECK(std::abs(generating_function(s, chi) - generating_function_free(p2, 1.0, chi)) < 1e-6);
  }
}

TEST_CASE("closed-form cumulants") {
  const auto iso = cumulants_closed_form(shape_from_xy(1, 1, 1.7));
  CHECK(iso[0] == doctest::Approx(0.85));
  for (int n = 1; n < 4; ++n) CHECK(std::abs(iso[n]) < 1e-12);

  const auto k = cumulants_closed_form(shape_from_xy(3, 1));
  CHECK(k[0] == doctest::Approx(1.0));
  CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(k[2] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(k[3] == doctest::Approx(13.0).epsilon(1e-14));
}

TEST_CASE("finite-difference cumulants match the closed forms") {
  const auto fd = cumulants_finite_difference(shape_from_xy(3, 1), 4);
  CHECK(std::abs(fd[1] - 1.0) < 1e-7);
  CHECK(std::abs(fd[2] - 3.0) < 3e-7);
  CHECK(std::abs(fd[3] - 13.0) < 1.3e-6);
  for (auto [x, y] : testing::random_xy(20, 23)) {
    const auto s = shape_from_xy(x, y, 1.0);
    const auto closed = cumulants_closed_form(s);
    const auto f = cumulants_finite_difference(s, 4);
    for (int n = 1; n < 4; ++n) CHECK(testing::relative_error(f[n], closed[n]) < 1e-6);
  }
}

TEST_CASE("fock_probabilities examples") {
  auto f = fock_probabilities(shape_from_xy(1, 1), 5);
  CHECK(f.probs[0] == 1.0);
  for (int n = 1; n <= 5; ++n) CHECK(f.probs[n] == 0.0);

  f = fock_probabilities(shape_from_xy(3, 3), 20);
  for (int n = 0; n <= 20; ++n) {
    CHECK(std::abs(f.probs[n] - 0.5 * std::pow(0.5, n)) < 1e-15);
  }
  CHECK(std::abs(f.tail_bound - std::pow(0.5, 21)) < 1e-14);

  const auto q = scaled_legendre_sequence(0.3, 0.4, 7);
  CHECK(q[2] == doctest::Approx(0.205).epsilon(1e-14));
  CHECK_THROWS_AS(fock_probabilities(shape_from_xy(1, 1), -1), DomainError);
}

TEST_CASE("scaled Legendre sequence reproduces the probability table") {
  std::mt19937 rng(24);
  std::uniform_real_distribution<double> ua(-1.0, 1.0), ub(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ua(rng), b = ub(rng);
    const auto q = scaled_legendre_sequence(a, b, 7);
    for (int n = 0; n <= 7; ++n) CHECK(std::abs(q[n] - table_ratio(n, a, b)) < 1e-12);
  }
}

TEST_CASE("scaled Legendre sequence agrees with the literal Legendre form where real") {
  for (auto [a, b] : {std::pair{0.1, 0.6}, {0.3, 0.4}, {-0.2, 0.9}}) {
    const double c = std::sqrt(b * b - a * a);
    const auto q = scaled_legendre_sequence(a, b, 12);
    for (int n = 0; n <= 12; ++n) {
      CHECK(std::abs(q[n] - std::pow(c, n) * numerics::legendre_poly(n, b / c)) < 1e-13);
    }
  }
}

TEST_CASE("Fock normalization on an (x, y) grid") {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double x = 1.0 + i, y = 1.0 + j;
      const auto s = shape_from_xy(x, y);
      const int n = fock_truncation_for(s, 1e-11);
      const auto f = fock_probabilities(s, n);
      CHECK(f.tail_bound < 1e-10);
      CHECK(f.tail_bound > -1e-12);
      CHECK(f.tail_bound <= f.envelope_tail(0) + 1e-15);
      for (double prob : f.probs) CHECK(prob >= 0.0);
    }
  }
}

TEST_CASE("Fock envelope bound holds") {
  for (auto [x, y] : testing::random_xy(50, 25, 0.1, 12.0)) {
    const auto s = shape_from_xy(x, y);
    const auto f = fock_probabilities(s, 150);
    double rn = 1.0;
    for (int n = 0; n <= 150; ++n) {
      CHECK(f.probs[n] <= f.prefactor * rn * (1 + 1e-12) + 1e-300);
      rn *= f.envelope_ratio;
    }
  }
}

TEST_CASE("fock_truncation_for hits the cap") {
  CHECK_THROWS_AS(fock_truncation_for(shape_from_xy(1000, 1000), 1e-10), ToleranceError);
}

TEST_CASE("spectral paths") {
  const OscillatorParams p;
  const auto iso = fock_probabilities(shape_from_xy(1, 1), 0);
  CHECK(spectral_generating_function(iso, p, 2.0) == doctest::Approx(std::exp(-1.0)));
  const auto mv0 = mean_and_variance_from_fock(iso, p);
  CHECK(mv0.mean == 0.5);
  CHECK(mv0.variance == 0.0);

  const auto s33 = shape_from_xy(3, 3);
  const auto f = fock_probabilities(s33, 60);
  CHECK(std::abs(spectral_generating_function(f, p, 1.0) - generating_function(s33, 1.0)) < 1e-10);
  CHECK(std::abs(spectral_generating_function(f, p, 0.0) - 1.0) <= f.tail_bound + 1e-15);
  CHECK(std::abs(mean_and_variance_from_fock(fock_probabilities(s33, 80), p).mean - 1.5) < 1e-10);

  const auto s31 = shape_from_xy(3, 1);
  const auto mv = mean_and_variance_from_fock(fock_probabilities(s31, 80), p);
  CHECK(std::abs(mv.variance - cumulants_closed_form(s31)[1]) < 1e-10);

  CHECK_THROWS_AS(spectral_generating_function(fock_probabilities(s33, 5), p, 0.0), ToleranceError);
  CHECK_THROWS_AS(spectral_cumulants(fock_probabilities(s33, 10), p, 4), ToleranceError);
}

TEST_CASE("spectral cumulants match the closed forms") {
  const OscillatorParams p;
  for (auto [x, y] : testing::random_xy(20, 26)) {
    const auto s = shape_from_xy(x, y);
    const int n = fock_truncation_for(s, 1e-12, 4);
    const auto k = spectral_cumulants(fock_probabilities(s, n), p, 4, 1e-12);
    const auto closed = cumulants_closed_form(s);
    for (int i = 1; i < 4; ++i) CHECK(testing::relative_error(k[i], closed[i]) < 1e-8);
  }
}

TEST_CASE("generating function equals its spectral sum") {
  const OscillatorParams p;
  for (auto [x, y] : testing::random_xy(20, 27)) {
    const auto s = shape_from_xy(x, y);
    const auto f = fock_probabilities(s, fock_truncation_for(s, 1e-12));
    for (double chi : {0.0, 0.3, 1.0, 2.5}) {
      CHECK(std::abs(spectral_generating_function(f, p, chi) - generating_function(s, chi)) <
            1e-10);
    }
  }
}

TEST_CASE("uncertainty-violating shapes give unphysical probabilities") {
  const auto s = shape_from_xy_unchecked(0.5, 0.5);
  const auto f = fock_probabilities(s, 4);
  CHECK(f.probs[0] > 1.0);
  CHECK(f.probs[1] < 0.0);
}

TEST_CASE("first density-matrix eigenvalue at weak coupling") {
  for (double dx : {1e-4, 5e-4, 1e-3}) {
    for (double dy : {2e-4, 1e-3}) {
      const auto f = fock_probabilities(shape_from_xy(1 + dx, 1 + dy), 2);
      const double expected = (dx + dy) / 4;
      CHECK(std::abs(f.probs[1] - expected) < 2.0 * (dx + dy) * (dx + dy));
    }
  }
}
