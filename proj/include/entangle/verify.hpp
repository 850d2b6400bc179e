#pragma once

// Named invariant suites. Each suite cross-checks a closed form against an
// independent path and reports one record per check with the measured error
// and the tolerance it was held to.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace entangle::verify {

struct CheckRecord {
  std::string suite;
  std::string check;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  std::vector<CheckRecord> checks;

  bool pass() const noexcept;
};

/// Tolerances keyed by name; unknown keys are rejected.
class ToleranceSet {
 public:
  ToleranceSet();

  double get(std::string_view key) const;
  /// Throws DomainError for an unknown key or a negative value.
  void set(std::string_view key, double value);

  const std::map<std::string, double, std::less<>>& values() const noexcept { return values_; }
  static std::vector<std::string> keys();

 private:
  std::map<std::string, double, std::less<>> values_;
};

/// cumulant-triple, gf-equivalence, fock-table, purity, qubit-dist, ohmic,
/// crossover, ed-oracle, free-particle.
const std::vector<std::string>& suite_names();

/// Throws DomainError for an unknown suite name.
SuiteReport run_suite(std::string_view name, const ToleranceSet& tolerances);

/// Runs the listed suites in order, or all of them when `only` is empty.
std::vector<SuiteReport> run_suites(const std::vector<std::string>& only,
                                    const ToleranceSet& tolerances);

}  // namespace entangle::verify
