#include "entangle/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "entangle/errors.hpp"
#include "entangle/numerics.hpp"

namespace entangle::qubit {

namespace {
constexpr double kBlochSlack = 1e-12;
constexpr double kPerturbativeLimit = 0.1;
}  // namespace

QubitParams::QubitParams(double epsilon, double delta, double hbar)
    : epsilon_(epsilon), delta_(delta), hbar_(hbar), omega_(0.0) {
  if (!std::isfinite(epsilon) || !std::isfinite(delta)) {
    throw DomainError("qubit: epsilon and delta must be finite");
  }
  if (!(hbar > 0.0)) throw DomainError("qubit: hbar must be positive");
  omega_ = std::hypot(epsilon, delta) / hbar;
  if (!(omega_ > 0.0)) throw DomainError("qubit: epsilon and delta both zero (Omega = 0)");
}

void validate(const BlochVector& b) {
  const double r2 = b.norm_squared();
  if (!std::isfinite(r2) || r2 > 1.0 + kBlochSlack) {
    throw DomainError("Bloch vector outside the unit ball: |b|^2 = " + std::to_string(r2));
  }
}

double bloch_purity(const BlochVector& b) {
  validate(b);
  return 0.5 * (1.0 + b.norm_squared());
}

double mean_energy(const QubitParams& p, const BlochVector& b) {
  validate(b);
  return 0.5 * (p.epsilon() * b.z + p.delta() * b.x);
}

std::complex<double> characteristic_function(const QubitParams& p, const BlochVector& b,
                                             double chi) {
  validate(b);
  const double half_phase = 0.5 * p.splitting() * chi;
  const double projection = (p.epsilon() * b.z + p.delta() * b.x) / p.splitting();
  return {std::cos(half_phase), -std::sin(half_phase) * projection};
}

TwoLevelEnergyDistribution energy_distribution(const QubitParams& p, double mean_e) {
  const double half = 0.5 * p.splitting();
  if (!std::isfinite(mean_e) || std::abs(mean_e) > half + kBlochSlack) {
    throw DomainError("qubit: |<H_s>| = " + std::to_string(std::abs(mean_e)) +
                      " exceeds hbar*Omega/2 = " + std::to_string(half) +
                      " (unphysical density matrix)");
  }
  TwoLevelEnergyDistribution d;
  d.energy_minus = -half;
  d.energy_plus = half;
  d.p_up = std::clamp(0.5 * (1.0 + mean_e / half), 0.0, 1.0);
  d.p_down = 1.0 - d.p_up;
  if (d.p_down + d.p_up != 1.0) throw DomainError("qubit: weights failed to normalize");
  return d;
}

std::vector<double> cumulants_from_two_levels(const TwoLevelEnergyDistribution& d, int n_max) {
  if (n_max < 1 || n_max > 6) throw DomainError("cumulants_from_two_levels: n_max must be in [1, 6]");
  // Shift to the distribution centre so the higher moments do not cancel.
  const double centre = 0.5 * (d.energy_minus + d.energy_plus);
  const double lo = d.energy_minus - centre;
  const double hi = d.energy_plus - centre;
  std::vector<double> moments(n_max);
  for (int k = 1; k <= n_max; ++k) {
    moments[k - 1] = d.p_down * std::pow(lo, k) + d.p_up * std::pow(hi, k);
  }
  auto kappa = numerics::cumulants_from_moments(moments);
  kappa[0] += centre;
  return kappa;
}

double laplace_generating_function(const TwoLevelEnergyDistribution& d, double chi) {
  return d.p_down * std::exp(-chi * d.energy_minus) + d.p_up * std::exp(-chi * d.energy_plus);
}

ProbabilityReport p_up_from_persistent_current(const PersistentCurrentReading& r) {
  if (r.current_uncoupled == 0.0 || !std::isfinite(r.current_uncoupled)) {
    throw DomainError("persistent current: uncoupled current I0 must be non-zero");
  }
  ProbabilityReport report;
  report.raw = 0.5 * (1.0 - r.current / r.current_uncoupled);
  report.value = std::clamp(report.raw, 0.0, 1.0);
  if (report.raw < 0.0 || report.raw > 1.0) {
    report.out_of_range = true;
    report.warning = "|I/I0| > 1: p_up = " + std::to_string(report.raw) +
                     " lies outside [0, 1]; reported value clamped";
  }
  return report;
}

ProbabilityReport weak_coupling_p_up(double alpha, double delta, double omega_c) {
  if (!(alpha >= 0.0)) throw DomainError("weak_coupling_p_up: alpha must be non-negative");
  if (!(delta > 0.0)) throw DomainError("weak_coupling_p_up: Delta must be positive");
  if (!(omega_c > delta)) {
    throw DomainError("weak_coupling_p_up: omega_c must exceed Delta (negative probability)");
  }
  ProbabilityReport report;
  report.raw = alpha * std::log(omega_c / delta);
  report.value = std::min(report.raw, 1.0);
  report.out_of_range = report.raw > 1.0;
  if (report.raw > kPerturbativeLimit) {
    report.warning = "p_up = " + std::to_string(report.raw) +
                     " exceeds 0.1; weak-coupling formula outside its perturbative regime";
  }
  return report;
}

double thermal_occupation(double gap, double temperature, double boltzmann_k) {
  if (!(gap > 0.0)) throw DomainError("thermal_occupation: gap must be positive");
  if (!(temperature > 0.0)) throw DomainError("thermal_occupation: temperature must be positive");
  if (!(boltzmann_k > 0.0)) throw DomainError("thermal_occupation: k must be positive");
  return std::exp(-gap / (boltzmann_k * temperature));
}

double crossover_temperature(const ThermalCrossoverQuery& q) {
  if (!(q.gap > 0.0)) throw DomainError("crossover_temperature: gap must be positive");
  if (!(q.alpha >= 0.0)) throw DomainError("crossover_temperature: alpha must be non-negative");
  if (!(q.cutoff_ratio > 1.0)) {
    throw DomainError("crossover_temperature: cutoff ratio omega_c/Delta must exceed 1");
  }
  if (!(q.boltzmann_k > 0.0)) throw DomainError("crossover_temperature: k must be positive");
  const double p_up = q.alpha * std::log(q.cutoff_ratio);
  if (p_up <= 0.0) {
    throw DomainError("crossover_temperature: alpha ln(omega_c/Delta) = 0, no zero-temperature "
                      "excitation to compare against (T* = 0)");
  }
  if (p_up >= 1.0) {
    throw DomainError("crossover_temperature: alpha ln(omega_c/Delta) = " + std::to_string(p_up) +
                      " >= 1; the thermal occupation never reaches it at positive temperature");
  }
  return -q.gap / (q.boltzmann_k * std::log(p_up));
}

}  // namespace entangle::qubit
