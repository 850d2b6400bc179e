#pragma once

// Two-level sub-system energetics for H_s = (eps/2) sigma_z + (Delta/2) sigma_x.
//
// The natural logarithm is used in every "log" that appears in the
// weak-coupling occupation and crossover-temperature formulas.

#include <complex>
#include <string>
#include <vector>

namespace entangle::qubit {

class QubitParams {
 public:
  /// Throws DomainError when both energies vanish or hbar is not positive.
  QubitParams(double epsilon, double delta, double hbar = 1.0);

  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }
  double hbar() const noexcept { return hbar_; }
  /// Omega = sqrt(eps^2 + Delta^2) / hbar.
  double omega() const noexcept { return omega_; }
  /// Level splitting hbar * Omega.
  double splitting() const noexcept { return hbar_ * omega_; }

 private:
  double epsilon_;
  double delta_;
  double hbar_;
  double omega_;
};

/// (<sigma_x>, <sigma_y>, <sigma_z>).
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm_squared() const noexcept { return x * x + y * y + z * z; }
};

/// Throws DomainError when the vector lies outside the Bloch ball (with 1e-12 slack).
void validate(const BlochVector& b);

/// Tr rho^2 = (1 + |b|^2) / 2.
double bloch_purity(const BlochVector& b);

/// <H_s> = eps <sigma_z>/2 + Delta <sigma_x>/2.
double mean_energy(const QubitParams& p, const BlochVector& b);

/// <exp(-i chi H_s)>.
std::complex<double> characteristic_function(const QubitParams& p, const BlochVector& b,
                                             double chi);

struct TwoLevelEnergyDistribution {
  double energy_minus = 0.0;
  double energy_plus = 0.0;
  double p_down = 1.0;
  double p_up = 0.0;

  double mean() const noexcept { return p_down * energy_minus + p_up * energy_plus; }
};

/// Weights of delta(E + hbar Omega/2) and delta(E - hbar Omega/2) given <H_s>.
TwoLevelEnergyDistribution energy_distribution(const QubitParams& p, double mean_energy);

/// Cumulants k_1..k_n of the two-point distribution, n <= 6.
std::vector<double> cumulants_from_two_levels(const TwoLevelEnergyDistribution& d, int n_max);

/// Real-chi generating function <exp(-chi H_s)> of the two-point distribution.
double laplace_generating_function(const TwoLevelEnergyDistribution& d, double chi);

/// A probability together with its unclamped value and any validity warning.
struct ProbabilityReport {
  double value = 0.0;  ///< clamped into [0, 1]
  double raw = 0.0;
  bool out_of_range = false;
  std::string warning;
};

struct PersistentCurrentReading {
  double current = 0.0;
  double current_uncoupled = 1.0;
  double flux = 0.0;  ///< carried as metadata only
};

/// p_up = (1 - I/I0)/2. Values outside [0, 1] are reported, not silently clamped.
ProbabilityReport p_up_from_persistent_current(const PersistentCurrentReading& r);

/// p_up = alpha ln(omega_c/Delta); flagged when above 0.1 (outside the perturbative regime).
ProbabilityReport weak_coupling_p_up(double alpha, double delta, double omega_c);

/// exp(-gap / (k T)).
double thermal_occupation(double gap, double temperature, double boltzmann_k = 1.0);

struct ThermalCrossoverQuery {
  double gap = 1.0;
  double alpha = 0.0;
  double cutoff_ratio = 10.0;  ///< omega_c / Delta
  double boltzmann_k = 1.0;
};

/// Temperature at which thermal occupation equals the weak-coupling p_up:
/// k T* = -gap / ln(alpha ln(omega_c/Delta)).
double crossover_temperature(const ThermalCrossoverQuery& q);

}  // namespace entangle::qubit
