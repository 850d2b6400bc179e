#pragma once

// Ohmic environment in the under-damped range: maps the dimensionless
// coupling alpha (in units of the oscillator frequency) and the cutoff ratio
// omega_c/omega onto the oscillator shape variables (x, y).

#include <vector>

namespace entangle::bath {

struct OhmicBathParams {
  double alpha = 0.0;
  double cutoff_ratio = 10.0;  ///< omega_c / omega
};

/// Throws DomainError outside 0 <= alpha < 1, cutoff_ratio > 1.
void validate(const OhmicBathParams& p);

/// x(alpha) = (1 - (2/pi) arctan(alpha / sqrt(1 - alpha^2))) / sqrt(1 - alpha^2).
double ohmic_x(double alpha);

/// y(alpha) = (1 - 2 alpha^2) x(alpha) + (4 alpha / pi) ln(omega_c / omega).
double ohmic_y(const OhmicBathParams& p);

struct TrajectoryRow {
  double alpha = 0.0;
  double x = 1.0;
  double y = 1.0;
  double purity = 1.0;
  std::vector<double> probs;  ///< rho_00 .. rho_{n_max n_max}
  double tail_bound = 0.0;
};

/// One row per grid point. The grid must be sorted in alpha and share a
/// cutoff ratio; a row with x*y < 1 aborts with UncertaintyViolation naming alpha.
std::vector<TrajectoryRow> ohmic_trajectory(const std::vector<OhmicBathParams>& grid, int n_max);

/// `steps` evenly spaced couplings from 0 to alpha_max inclusive.
std::vector<OhmicBathParams> uniform_alpha_grid(double alpha_max, int steps, double cutoff_ratio);

}  // namespace entangle::bath
