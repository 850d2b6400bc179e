#include "entangle/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "entangle/errors.hpp"
#include "entangle/numerics.hpp"

namespace entangle::oscillator {

namespace {

constexpr double kUncertaintySlack = 1e-12;

void require_oscillating(const OscillatorParams& p, const char* what) {
  if (!(p.omega() > 0.0)) {
    throw DomainError(std::string(what) + ": requires omega > 0 (free particle has no Fock basis)");
  }
}

// sinh(u)/u, exact at u = 0.
double sinhc(double u) { return u == 0.0 ? 1.0 : std::sinh(u) / u; }

}  // namespace

OscillatorParams::OscillatorParams(double mass, double omega, double hbar)
    : mass_(mass), omega_(omega), hbar_(hbar), gamma_(0.0) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("oscillator: mass must be positive");
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw DomainError("oscillator: omega must be non-negative");
  }
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("oscillator: hbar must be positive");
  gamma_ = std::sqrt(mass * omega / hbar);
}

void validate(const GaussianMoments& g, double hbar) {
  if (!(g.q2 > 0.0) || !(g.p2 > 0.0) || !std::isfinite(g.q2) || !std::isfinite(g.p2)) {
    throw DomainError("Gaussian moments must be positive and finite");
  }
  const double floor = 0.25 * hbar * hbar;
  if (g.q2 * g.p2 < floor * (1.0 - kUncertaintySlack)) {
    throw UncertaintyViolation("uncertainty relation violated: <q^2><p^2> = " +
                               std::to_string(g.q2 * g.p2) + " < hbar^2/4 = " +
                               std::to_string(floor));
  }
}

ShapeParams shape_from_xy_unchecked(double x, double y, double quantum) {
  ShapeParams s;
  s.x = x;
  s.y = y;
  s.d = (1.0 + x) * (1.0 + y);
  s.a = (y - x) / s.d;
  s.b = (x * y - 1.0) / s.d;
  s.energy = 0.25 * (x + y) * quantum;
  s.area = 0.25 * x * y;
  s.quantum = quantum;
  return s;
}

ShapeParams shape_from_xy(double x, double y, double quantum) {
  if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    throw DomainError("shape: x and y must be positive and finite");
  }
  if (!(quantum >= 0.0)) throw DomainError("shape: hbar*omega must be non-negative");
  if (x * y < 1.0 - kUncertaintySlack) {
    throw UncertaintyViolation("uncertainty relation violated: xy = " + std::to_string(x * y) +
                               " < 1");
  }
  auto s = shape_from_xy_unchecked(x, y, quantum);
  // xy may sit a rounding error below 1.
  s.b = std::max(s.b, 0.0);
  return s;
}

ShapeParams moments_to_shape(const OscillatorParams& p, const GaussianMoments& g) {
  require_oscillating(p, "moments_to_shape");
  validate(g, p.hbar());
  const double gamma2 = p.gamma() * p.gamma();
  const double x = 2.0 * gamma2 * g.q2;
  const double y = 2.0 * g.p2 / (gamma2 * p.hbar() * p.hbar());
  auto s = shape_from_xy(x, y, p.quantum());
  // Exact physical forms; equal to the (x, y) expressions up to rounding.
  s.energy = 0.5 * (p.mass() * p.omega() * p.omega() * g.q2 + g.p2 / p.mass());
  s.area = g.q2 * g.p2 / (p.hbar() * p.hbar());
  return s;
}

GaussianMoments shape_to_moments(const OscillatorParams& p, const ShapeParams& s) {
  require_oscillating(p, "shape_to_moments");
  const double gamma2 = p.gamma() * p.gamma();
  return {s.x / (2.0 * gamma2), 0.5 * s.y * gamma2 * p.hbar() * p.hbar()};
}

double purity(const GaussianMoments& g, double hbar) {
  validate(g, hbar);
  return std::min(1.0, 0.5 * hbar / std::sqrt(g.q2 * g.p2));
}

double purity(const ShapeParams& s) {
  if (s.x * s.y < 1.0 - kUncertaintySlack) {
    throw UncertaintyViolation("purity: xy < 1 violates the uncertainty relation");
  }
  return std::min(1.0, 1.0 / std::sqrt(s.x * s.y));
}

double position_density_matrix(const OscillatorParams& p, const GaussianMoments& g, double q,
                               double q_prime) {
  validate(g, p.hbar());
  const double sum = q + q_prime;
  const double diff = q - q_prime;
  const double exponent =
      -sum * sum / (8.0 * g.q2) - g.p2 * diff * diff / (2.0 * p.hbar() * p.hbar());
  return std::exp(exponent) / std::sqrt(2.0 * std::numbers::pi * g.q2);
}

double imaginary_time_propagator(const OscillatorParams& p, double q, double q_prime,
                                 double chi) {
  require_oscillating(p, "imaginary_time_propagator");
  if (!(chi > 0.0)) throw DomainError("imaginary_time_propagator: chi must be positive");
  const double u = p.quantum() * chi;
  const double sh = std::sinh(u);
  const double ch = std::cosh(u);
  const double scale = p.mass() * p.omega() / (p.hbar() * sh);
  const double prefactor = std::sqrt(scale / (2.0 * std::numbers::pi));
  return prefactor * std::exp(-0.5 * scale * ((q * q + q_prime * q_prime) * ch - 2.0 * q * q_prime));
}

double generating_function(const ShapeParams& s, double chi) {
  const double u = s.quantum * chi;
  const double half_sh = std::sinh(0.5 * u);
  const double cosh_minus_one = 2.0 * half_sh * half_sh;
  const double bracket = 2.0 * s.energy * chi * sinhc(u) + 2.0 * s.area * cosh_minus_one +
                         1.0 + 0.5 * cosh_minus_one;
  if (!(bracket > 0.0)) {
    throw DomainError("generating_function: bracket not positive at chi = " + std::to_string(chi));
  }
  return 1.0 / std::sqrt(bracket);
}

double generating_function_free(double p2, double mass, double chi) {
  if (!(mass > 0.0)) throw DomainError("generating_function_free: mass must be positive");
  if (!(p2 > 0.0)) throw DomainError("generating_function_free: <p^2> must be positive");
  const double bracket = 1.0 + chi * p2 / mass;
  if (!(bracket > 0.0)) {
    throw DomainError("generating_function_free: bracket not positive at chi = " +
                      std::to_string(chi));
  }
  return 1.0 / std::sqrt(bracket);
}

EnergyCumulants cumulants_closed_form(const ShapeParams& s) {
  const double e = s.energy;
  const double a = s.area;
  const double eps2 = s.quantum * s.quantum;
  const double e2 = e * e;
  return {
      e,
      0.5 * (-0.5 * eps2 + 4.0 * e2 - 2.0 * eps2 * a),
      -0.5 * e * (-16.0 * e2 + eps2 * (1.0 + 12.0 * a)),
      48.0 * e2 * e2 - 4.0 * eps2 * e2 * (1.0 + 12.0 * a) +
          eps2 * eps2 * (0.125 + 2.0 * a + 6.0 * a * a),
  };
}

std::vector<double> cumulants_finite_difference(const ShapeParams& s, int n_max) {
  // ln Z is analytic out to roughly 1/(2E); keep the widest stencil point well inside.
  const double scale = std::max(s.energy, s.quantum);
  numerics::FiniteDifferenceScheme scheme;
  scheme.step = 0.04 / scale;
  std::vector<double> out;
  out.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    out.push_back(numerics::nth_log_derivative(
                      [&s](double chi) { return generating_function(s, chi); }, n, scheme)
                      .value);
  }
  return out;
}

std::vector<double> scaled_legendre_sequence(double a, double b, int n_max) {
  if (n_max < 0) throw DomainError("scaled_legendre_sequence: n_max must be non-negative");
  std::vector<double> q(n_max + 1);
  q[0] = 1.0;
  if (n_max >= 1) q[1] = b;
  const double c = b * b - a * a;
  for (int n = 1; n < n_max; ++n) {
    q[n + 1] = ((2.0 * n + 1.0) * b * q[n] - n * c * q[n - 1]) / (n + 1.0);
  }
  return q;
}

double FockDistribution::envelope_tail(int power) const {
  if (envelope_ratio <= 0.0) return 0.0;
  double sum = 0.0;
  double rn = std::pow(envelope_ratio, truncation + 1);
  for (int n = truncation + 1; n < truncation + 100000; ++n) {
    const double term = prefactor * rn * std::pow(n + 0.5, power);
    sum += term;
    // Terms decrease geometrically once n exceeds power / |ln r|.
    if (term < 1e-20 * sum && n > power / -std::log(envelope_ratio)) break;
    if (term == 0.0) break;
    rn *= envelope_ratio;
  }
  return sum;
}

FockDistribution fock_probabilities(const ShapeParams& s, int n_max) {
  if (n_max < 0) throw DomainError("fock_probabilities: n_max must be non-negative");
  FockDistribution f;
  f.truncation = n_max;
  f.prefactor = std::sqrt(4.0 / s.d);
  f.envelope_ratio = s.b + std::abs(s.a);
  const auto q = scaled_legendre_sequence(s.a, s.b, n_max);
  f.probs.resize(q.size());
  const bool physical = s.x * s.y >= 1.0 - kUncertaintySlack;
  double total = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    double prob = f.prefactor * q[n];
    if (physical) {
      if (prob < -1e-14) {
        throw DomainError("fock_probabilities: rho_" + std::to_string(n) + std::to_string(n) +
                          " = " + std::to_string(prob) + " is negative");
      }
      prob = std::max(prob, 0.0);
    }
    f.probs[n] = prob;
    total += prob;
  }
  f.tail_bound = 1.0 - total;
  return f;
}

int fock_truncation_for(const ShapeParams& s, double tolerance, int power) {
  FockDistribution probe;
  probe.prefactor = std::sqrt(4.0 / s.d);
  probe.envelope_ratio = s.b + std::abs(s.a);
  for (int n = 0; n <= kMaxFockTruncation; ++n) {
    probe.truncation = n;
    if (probe.envelope_tail(power) < tolerance) return n;
  }
  probe.truncation = kMaxFockTruncation;
  throw ToleranceError("Fock truncation (cap " + std::to_string(kMaxFockTruncation) + ")",
                       probe.envelope_tail(power), tolerance);
}

double spectral_generating_function(const FockDistribution& f, const OscillatorParams& p,
                                    double chi, double tolerance) {
  require_oscillating(p, "spectral_generating_function");
  if (!(chi >= 0.0)) throw DomainError("spectral_generating_function: chi must be non-negative");
  const double tail = f.envelope_tail(0) * std::exp(-chi * p.level(f.truncation + 1));
  if (tail > tolerance) throw ToleranceError("spectral generating function tail", tail, tolerance);
  double sum = 0.0;
  for (int n = 0; n <= f.truncation; ++n) sum += std::exp(-chi * p.level(n)) * f.probs[n];
  return sum;
}

std::vector<double> spectral_cumulants(const FockDistribution& f, const OscillatorParams& p,
                                       int n_max, double tolerance) {
  require_oscillating(p, "spectral_cumulants");
  if (n_max < 1 || n_max > 6) throw DomainError("spectral_cumulants: n_max must be in [1, 6]");
  const double tail = f.envelope_tail(n_max) * std::pow(p.quantum(), n_max);
  if (tail > tolerance) {
    throw ToleranceError("spectral moment " + std::to_string(n_max) + " tail", tail, tolerance);
  }
  double mean = 0.0;
  for (int n = 0; n <= f.truncation; ++n) mean += p.level(n) * f.probs[n];
  // Central moments keep the higher cumulants free of cancellation.
  std::vector<double> central(n_max, 0.0);
  for (int n = 0; n <= f.truncation; ++n) {
    const double dev = p.level(n) - mean;
    double power = 1.0;
    for (int k = 0; k < n_max; ++k) {
      power *= dev;
      central[k] += power * f.probs[n];
    }
  }
  auto kappa = numerics::cumulants_from_moments(central);
  kappa[0] += mean;
  return kappa;
}

MeanVariance mean_and_variance_from_fock(const FockDistribution& f, const OscillatorParams& p,
                                         double tolerance) {
  const auto kappa = spectral_cumulants(f, p, 2, tolerance);
  return {kappa[0], kappa[1]};
}

}  // namespace entangle::oscillator
