#include "entangle/bath.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "entangle/errors.hpp"
#include "entangle/oscillator.hpp"

namespace entangle::bath {

void validate(const OhmicBathParams& p) {
  if (!(p.alpha >= 0.0 && p.alpha < 1.0)) {
    throw DomainError("ohmic bath: alpha = " + std::to_string(p.alpha) +
                      " outside the under-damped range [0, 1)");
  }
  if (!(p.cutoff_ratio > 1.0) || !std::isfinite(p.cutoff_ratio)) {
    throw DomainError("ohmic bath: cutoff ratio omega_c/omega must exceed 1");
  }
}

double ohmic_x(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("ohmic_x: alpha = " + std::to_string(alpha) +
                      " outside [0, 1) (over-damped regime unsupported)");
  }
  if (alpha == 0.0) return 1.0;
  // 1 - (2/pi) arctan(alpha/s) = (2/pi) arctan(s/alpha); no cancellation as alpha -> 1.
  const double s = std::sqrt((1.0 - alpha) * (1.0 + alpha));
  return 2.0 / std::numbers::pi * std::atan2(s, alpha) / s;
}

double ohmic_y(const OhmicBathParams& p) {
  validate(p);
  if (p.alpha == 0.0) return 1.0;
  return (1.0 - 2.0 * p.alpha * p.alpha) * ohmic_x(p.alpha) +
         4.0 * p.alpha / std::numbers::pi * std::log(p.cutoff_ratio);
}

std::vector<TrajectoryRow> ohmic_trajectory(const std::vector<OhmicBathParams>& grid, int n_max) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = grid[i];
    validate(p);
    if (i > 0 && (p.alpha < grid[i - 1].alpha || p.cutoff_ratio != grid[0].cutoff_ratio)) {
      throw DomainError("ohmic_trajectory: grid must be sorted in alpha with a shared cutoff");
    }
    TrajectoryRow row;
    row.alpha = p.alpha;
    row.x = ohmic_x(p.alpha);
    row.y = ohmic_y(p);
    if (row.x * row.y < 1.0) {
      throw UncertaintyViolation("ohmic_trajectory: x*y = " + std::to_string(row.x * row.y) +
                                 " < 1 at alpha = " + std::to_string(p.alpha) +
                                 " (cutoff ratio " + std::to_string(p.cutoff_ratio) + ")");
    }
    const auto shape = oscillator::shape_from_xy(row.x, row.y);
    row.purity = oscillator::purity(shape);
    auto fock = oscillator::fock_probabilities(shape, n_max);
    row.probs = std::move(fock.probs);
    row.tail_bound = fock.tail_bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<OhmicBathParams> uniform_alpha_grid(double alpha_max, int steps, double cutoff_ratio) {
  if (steps < 1) throw DomainError("alpha grid: steps must be positive");
  if (!(alpha_max >= 0.0 && alpha_max < 1.0)) throw DomainError("alpha grid: alpha_max outside [0, 1)");
  std::vector<OhmicBathParams> grid;
  grid.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    grid.push_back({steps == 1 ? 0.0 : alpha_max * k / (steps - 1), cutoff_ratio});
  }
  return grid;
}

}  // namespace entangle::bath
