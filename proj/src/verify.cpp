#include "entangle/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "entangle/bath.hpp"
#include "entangle/errors.hpp"
#include "entangle/numerics.hpp"
#include "entangle/oracle.hpp"
#include "entangle/oscillator.hpp"
#include "entangle/qubit.hpp"

namespace entangle::verify {

namespace {

using oscillator::OscillatorParams;
using oscillator::ShapeParams;

const std::map<std::string, double, std::less<>>& default_tolerances() {
  static const std::map<std::string, double, std::less<>> defaults = {
      {"finite-difference", 1e-6},  // relative, FD cumulants vs closed form
      {"spectral", 1e-8},           // relative, spectral cumulants vs closed form
      {"isolated", 1e-12},          // isolated-state cumulants
      {"gf-spectral", 1e-10},       // closed-form Z vs spectral sum
      {"quadrature", 1e-6},         // Z and purity quadrature vs closed form
      {"rho-quadrature", 1e-8},     // rho_nn quadrature vs recurrence
      {"table", 1e-12},             // printed ratio polynomials vs recurrence
      {"normalization", 1e-10},     // Fock tail after truncation
      {"purity", 1e-12},            // purity identities
      {"qubit", 1e-12},             // two-level mean reproduction
      {"fourier", 1e-6},            // Fourier-inverted qubit weights
      {"ohmic", 1e-12},             // x(0.5)
      {"ohmic-y", 1e-5},            // y(0.5) at cutoff 10
      {"crossover", 1e-9},          // crossover round trip
      {"ed-separable", 1e-10},      // ED zero-coupling energies
      {"ed-cutoff", 1e-6},          // reduced-density change on cutoff doubling
      {"ed-loglog", 0.2},           // |slope - 2| of the eigenvalue/diagonal gap
      {"ed-linear", 0.02},          // relative, eigenvalue vs diagonal linear coefficient
      {"ed-purity", 0.05},          // relative, 1 - Tr rho^2 vs 2 p alpha
      {"free-particle", 1e-6},      // Z at hbar*omega = 1e-4 vs free limit
      {"wick", 1e-6},               // (2n-1)!! moment rule
  };
  return defaults;
}

CheckRecord record(std::string_view suite, std::string check, double error, double tolerance,
                   std::string detail = {}) {
  return {std::string(suite), std::move(check), error, tolerance,
          std::isfinite(error) && error <= tolerance, std::move(detail)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double rel(double value, double ref) { return std::abs(value - ref) / std::abs(ref); }

// Shapes with x, y in [0.3, 6] and xy >= 1; the upper bound keeps the
// spectral sums inside the Fock truncation cap.
std::vector<ShapeParams> random_shapes(std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coord(0.3, 6.0);
  std::vector<ShapeParams> out;
  while (out.size() < count) {
    const double x = coord(rng), y = coord(rng);
    if (x * y >= 1.0) out.push_back(oscillator::shape_from_xy(x, y));
  }
  return out;
}

SuiteReport cumulant_triple(const ToleranceSet& tol) {
  SuiteReport r{"cumulant-triple", {}};
  const OscillatorParams unit;
  double fd_err = 0.0, sp_err = 0.0;
  const auto shapes = random_shapes(24, 1001);
  for (const auto& s : shapes) {
    const auto closed = oscillator::cumulants_closed_form(s);
    const auto fd = oscillator::cumulants_finite_difference(s, 4);
    const int n = oscillator::fock_truncation_for(s, 1e-12, 4);
    const auto sp = oscillator::spectral_cumulants(oscillator::fock_probabilities(s, n), unit, 4, 1e-12);
    for (int k = 1; k < 4; ++k) {
      fd_err = std::max(fd_err, rel(fd[k], closed[k]));
      sp_err = std::max(sp_err, rel(sp[k], closed[k]));
    }
  }
  const std::string over = std::to_string(shapes.size()) + " random shapes, k2..k4";
  r.checks.push_back(record(r.name, "finite-difference-vs-closed", fd_err,
                            tol.get("finite-difference"), over));
  r.checks.push_back(record(r.name, "spectral-vs-closed", sp_err, tol.get("spectral"), over));

  double iso = 0.0;
  for (double quantum : {0.5, 1.0, 3.0}) {
    const auto k = oscillator::cumulants_closed_form(oscillator::shape_from_xy(1, 1, quantum));
    for (int i = 1; i < 4; ++i) iso = std::max(iso, std::abs(k[i]));
  }
  r.checks.push_back(record(r.name, "isolated-zero-fluctuation", iso, tol.get("isolated")));
  return r;
}

SuiteReport gf_equivalence(const ToleranceSet& tol) {
  SuiteReport r{"gf-equivalence", {}};
  const OscillatorParams unit;
  const auto shapes = random_shapes(20, 1002);
  double spectral = 0.0, quad = 0.0;
  for (const auto& s : shapes) {
    const auto f = oscillator::fock_probabilities(s, oscillator::fock_truncation_for(s, 1e-12));
    for (double chi : {0.0, 0.25, 1.0, 2.5}) {
      spectral = std::max(spectral, std::abs(oscillator::spectral_generating_function(f, unit, chi) -
                                             oscillator::generating_function(s, chi)));
    }
    const auto g = oscillator::shape_to_moments(unit, s);
    for (double chi : {0.5, 1.5}) {
      quad = std::max(quad, std::abs(oracle::z_via_quadrature(unit, g, chi) -
                                     oscillator::generating_function(s, chi)));
    }
  }
  r.checks.push_back(record(r.name, "closed-vs-spectral-sum", spectral, tol.get("gf-spectral"),
                            "20 shapes, chi in {0, 0.25, 1, 2.5}"));
  r.checks.push_back(record(r.name, "closed-vs-position-quadrature", quad, tol.get("quadrature"),
                            "20 shapes, chi in {0.5, 1.5}"));
  return r;
}

double table_ratio(int n, double a, double b) {
  const double a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  switch (n) {
    case 0: return 1.0;
    case 1: return b;
    case 2: return a2 / 2 + b * b;
    case 3: return 3 * a2 * b / 2 + std::pow(b, 3);
    case 4: return 3 * a4 / 8 + 3 * a2 * b * b + std::pow(b, 4);
    case 5: return 15 * a4 * b / 8 + 5 * a2 * std::pow(b, 3) + std::pow(b, 5);
    case 6: return 5 * a6 / 16 + 45 * a4 * b * b / 8 + 15 * a2 * std::pow(b, 4) / 2 + std::pow(b, 6);
    default:
      return 35 * a6 * b / 16 + 105 * a4 * std::pow(b, 3) / 8 + 21 * a2 * std::pow(b, 5) / 2 +
             std::pow(b, 7);
  }
}

SuiteReport fock_table(const ToleranceSet& tol) {
  SuiteReport r{"fock-table", {}};
  std::mt19937 rng(1003);
  std::uniform_real_distribution<double> ua(-1.0, 1.0), ub(0.0, 1.0);
  double table = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ua(rng), b = ub(rng);
    const auto q = oscillator::scaled_legendre_sequence(a, b, 7);
    for (int n = 0; n <= 7; ++n) table = std::max(table, std::abs(q[n] - table_ratio(n, a, b)));
  }
  r.checks.push_back(record(r.name, "ratio-table-vs-recurrence", table, tol.get("table"),
                            "100 random (a, b), n = 0..7"));

  double tail = 0.0;
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      const auto s = oscillator::shape_from_xy(i, j);
      const auto f = oscillator::fock_probabilities(s, oscillator::fock_truncation_for(s, 1e-11));
      tail = std::max(tail, std::abs(f.tail_bound));
    }
  }
  r.checks.push_back(record(r.name, "normalization-grid", tail, tol.get("normalization"),
                            "x, y in {1..10}"));

  const OscillatorParams unit;
  double quad = 0.0;
  std::vector<ShapeParams> states = {oscillator::shape_from_xy(1, 1), oscillator::shape_from_xy(3, 1),
                                     oscillator::shape_from_xy(0.5, 4)};
  for (const auto& s : random_shapes(17, 1004)) states.push_back(s);
  for (const auto& s : states) {
    const auto g = oscillator::shape_to_moments(unit, s);
    const auto f = oscillator::fock_probabilities(s, 10);
    for (int n = 0; n <= 10; ++n) {
      quad = std::max(quad, std::abs(oracle::rho_nn_via_quadrature(unit, g, n) - f.probs[n]));
    }
  }
  r.checks.push_back(record(r.name, "rho-nn-quadrature-vs-recurrence", quad,
                            tol.get("rho-quadrature"), "20 states, n = 0..10"));
  return r;
}

SuiteReport purity_suite(const ToleranceSet& tol) {
  SuiteReport r{"purity", {}};
  const OscillatorParams p(0.8, 1.25);
  double quad = 0.0, area = 0.0;
  for (const auto& s0 : random_shapes(20, 1005)) {
    const auto s = oscillator::shape_from_xy(s0.x, s0.y, p.quantum());
    const auto g = oscillator::shape_to_moments(p, s);
    quad = std::max(quad, std::abs(oracle::purity_via_quadrature(p, g) - oscillator::purity(g, p.hbar())));
    area = std::max(area, std::abs(oscillator::purity(g, p.hbar()) - 0.5 / std::sqrt(s.area)));
  }
  r.checks.push_back(record(r.name, "oscillator-quadrature-vs-closed", quad, tol.get("quadrature"),
                            "20 states"));
  r.checks.push_back(record(r.name, "oscillator-area-identity", area, tol.get("purity"),
                            "Tr rho^2 = 1/(2 sqrt A)"));

  std::mt19937 rng(1006);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  double bloch = 0.0;
  int samples = 0;
  while (samples < 500) {
    const qubit::BlochVector b{coord(rng), coord(rng), coord(rng)};
    if (b.norm_squared() > 1.0) continue;
    ++samples;
    using C = std::complex<double>;
    const C r00 = 0.5 * (1.0 + b.z), r11 = 0.5 * (1.0 - b.z), r01 = 0.5 * C(b.x, -b.y);
    const double tr = std::norm(r00) + std::norm(r11) + 2.0 * std::norm(r01);
    bloch = std::max(bloch, std::abs(qubit::bloch_purity(b) - tr));
  }
  r.checks.push_back(record(r.name, "qubit-bloch-vs-matrix", bloch, tol.get("purity"),
                            "500 Bloch-ball samples"));
  return r;
}

SuiteReport qubit_dist(const ToleranceSet& tol) {
  SuiteReport r{"qubit-dist", {}};
  const qubit::QubitParams p(0.7, 1.1);
  std::mt19937 rng(1007);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  double sum_err = 0.0, mean_err = 0.0, fourier = 0.0;
  int samples = 0;
  while (samples < 200) {
    const qubit::BlochVector b{coord(rng), coord(rng), coord(rng)};
    if (b.norm_squared() > 1.0) continue;
    const double e = qubit::mean_energy(p, b);
    const auto d = qubit::energy_distribution(p, e);
    sum_err = std::max(sum_err, std::abs(d.p_down + d.p_up - 1.0));
    mean_err = std::max(mean_err, std::abs(d.mean() - e));
    if (samples < 10) {
      const auto w = oracle::qubit_weights_via_fourier(p, b);
      fourier = std::max({fourier, std::abs(w.at_minus - d.p_down), std::abs(w.at_plus - d.p_up),
                          std::abs(w.at_zero)});
    }
    ++samples;
  }
  r.checks.push_back(record(r.name, "weights-sum-to-one", sum_err, 0.0, "exact"));
  r.checks.push_back(record(r.name, "first-moment", mean_err, tol.get("qubit")));
  const qubit::BlochVector ground{-p.delta() / p.splitting(), 0.0, -p.epsilon() / p.splitting()};
  const auto d0 = qubit::energy_distribution(p, qubit::mean_energy(p, ground));
  r.checks.push_back(record(r.name, "isolated-ground-state", std::abs(d0.p_up), 0.0, "p_up exact"));
  r.checks.push_back(record(r.name, "fourier-inversion", fourier, tol.get("fourier"),
                            "10 states, weights at -hbar Omega/2, +hbar Omega/2 and leakage at 0"));
  return r;
}

SuiteReport ohmic(const ToleranceSet& tol) {
  SuiteReport r{"ohmic", {}};
  const double boundary = std::max(std::abs(bath::ohmic_x(0.0) - 1.0),
                                   std::abs(bath::ohmic_y({0.0, 10.0}) - 1.0));
  r.checks.push_back(record(r.name, "boundary-x0-y0", boundary, 0.0, "exact"));
  r.checks.push_back(record(r.name, "x(0.5)", std::abs(bath::ohmic_x(0.5) - 4.0 / (3.0 * std::sqrt(3.0))),
                            tol.get("ohmic"), "4/(3 sqrt 3)"));
  // Independent evaluation: 0.5 * 4/(3 sqrt 3) + (2/pi) ln 10.
  const double y_ref = 1.8507714;
  const double y = bath::ohmic_y({0.5, 10.0});
  r.checks.push_back(record(r.name, "y(0.5)", std::abs(y - y_ref), tol.get("ohmic-y"),
                            "value " + fmt(y) + " vs 1.8507714; differs from 1.85073 by " +
                                fmt(std::abs(y - 1.85073))));

  const auto rows = bath::ohmic_trajectory(bath::uniform_alpha_grid(0.9, 901, 10.0), 0);
  double rise = 0.0, at = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double step = rows[i].purity - rows[i - 1].purity;
    if (step > rise) {
      rise = step;
      at = rows[i].alpha;
    }
  }
  double lowest = rows.front().purity, lowest_at = 0.0;
  for (const auto& row : rows) {
    if (row.purity < lowest) {
      lowest = row.purity;
      lowest_at = row.alpha;
    }
  }
  r.checks.push_back(record(
      r.name, "purity-non-increasing-0-0.9", rise, 0.0,
      "largest single-step increase at alpha = " + fmt(at) + "; minimum purity " + fmt(lowest) +
          " at alpha = " + fmt(lowest_at) + ", purity(0.9) = " + fmt(rows.back().purity)));
  return r;
}

SuiteReport crossover(const ToleranceSet& tol) {
  SuiteReport r{"crossover", {}};
  double err = 0.0;
  int count = 0;
  for (double gap : {0.1, 1.0, 7.5}) {
    for (double alpha : {1e-4, 1e-3, 0.01, 0.05, 0.1}) {
      for (double cutoff : {2.0, 10.0, 100.0}) {
        for (double k : {1.0, 8.617333262e-5}) {
          const qubit::ThermalCrossoverQuery q{gap, alpha, cutoff, k};
          const double p_up = alpha * std::log(cutoff);
          if (!(p_up > 0.0 && p_up < 1.0)) continue;
          const double t = qubit::crossover_temperature(q);
          err = std::max(err, std::abs(qubit::thermal_occupation(gap, t, k) -
                                       qubit::weak_coupling_p_up(alpha, 1.0, cutoff).raw));
          ++count;
        }
      }
    }
  }
  r.checks.push_back(record(r.name, "round-trip", err, tol.get("crossover"),
                            std::to_string(count) + " queries"));
  return r;
}

SuiteReport ed_oracle(const ToleranceSet& tol) {
  SuiteReport r{"ed-oracle", {}};
  const qubit::QubitParams spin(0.5, 1.0);

  oracle::TruncatedModel free_spin{spin, {0.7, 1.9}, {0.0, 0.0}, 8};
  auto gs = oracle::ground_state(free_spin);
  double sep = std::abs(gs.energy - (-0.5 * spin.splitting() + 0.5 * (0.7 + 1.9)));
  const auto rho0 = oracle::reduced_density(gs.vector, free_spin);
  sep = std::max({sep, std::abs(rho0.purity() - 1.0),
                  std::abs(oracle::spin_populations(rho0, spin).p_up)});
  oracle::TruncatedModel free_osc{OscillatorParams(1.0, 1.3), {0.9, 2.1}, {0.0, 0.0}, 8};
  gs = oracle::ground_state(free_osc);
  sep = std::max(sep, std::abs(gs.energy - 0.5 * (1.3 + 0.9 + 2.1)));
  r.checks.push_back(record(r.name, "zero-coupling-separable", sep, tol.get("ed-separable"),
                            "spin and oscillator, energy, purity, p_up"));

  const std::vector<double> alphas{0.0, 0.01, 0.02, 0.04, 0.08, 0.16};
  double worst_change = 0.0;
  int non_increasing = 0;
  double prev = -1.0;
  std::ostringstream trend;
  for (double alpha : alphas) {
    const auto conv = oracle::reduced_density_converged(
        oracle::spin_boson_surrogate(spin, alpha, 10.0, 2, 8));
    worst_change = std::max(worst_change, conv.cutoff_change);
    const double p_up = oracle::spin_populations(conv.rho, spin).p_up;
    if (prev >= 0.0 && p_up <= prev) ++non_increasing;
    prev = p_up;
    trend << (alpha == 0.0 ? "" : ", ") << fmt(p_up);
  }
  r.checks.push_back(record(r.name, "fock-cutoff-convergence", worst_change, tol.get("ed-cutoff"),
                            "cutoff 8 -> 16"));
  r.checks.push_back(record(r.name, "p-up-increasing", non_increasing, 0.0,
                            "p_up at alpha = 0..0.16: " + trend.str()));

  const auto report = oracle::first_order_structure_check(
      [&](double a) { return oracle::spin_boson_surrogate(spin, a, 10.0, 2, 8); },
      {0.005, 0.01, 0.02, 0.04, 0.08});
  const double slope_err =
      report.fit_ok ? std::abs(report.difference_loglog - 2.0) : std::numeric_limits<double>::infinity();
  r.checks.push_back(record(r.name, "first-order-loglog-slope", slope_err, tol.get("ed-loglog"),
                            report.fit_ok ? "slope " + fmt(report.difference_loglog) +
                                                ", p slope " + fmt(report.p_up_slope) +
                                                ", eigenvalue slope " + fmt(report.eigenvalue_slope)
                                          : report.message));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.checks.push_back(record(
      r.name, "first-order-linear-coefficients",
      report.fit_ok ? std::abs(report.eigenvalue_slope / report.p_up_slope - 1.0) : nan,
      tol.get("ed-linear"), "relative gap between eigenvalue and diagonal slopes"));
  r.checks.push_back(record(
      r.name, "first-order-purity",
      report.fit_ok ? std::abs(report.purity_slope / (2.0 * report.p_up_slope) - 1.0) : nan,
      tol.get("ed-purity"),
      "1 - Tr rho^2 slope " + fmt(report.purity_slope) + " vs 2p = " + fmt(2.0 * report.p_up_slope)));
  return r;
}

SuiteReport free_particle(const ToleranceSet& tol) {
  SuiteReport r{"free-particle", {}};
  double err = 0.0;
  for (auto [q2, p2] : {std::pair{1.1, 0.8}, {0.5, 2.0}, {3.0, 0.3}}) {
    const OscillatorParams slow(1.0, 1e-4);
    const auto s = oscillator::moments_to_shape(slow, {q2, p2});
    for (double chi : {0.1, 0.5, 1.0, 2.0}) {
      err = std::max(err, std::abs(oscillator::generating_function(s, chi) -
                                   oscillator::generating_function_free(p2, 1.0, chi)));
    }
  }
  r.checks.push_back(record(r.name, "oscillator-limit", err, tol.get("free-particle"),
                            "hbar omega = 1e-4"));

  // <(p^2/2m)^n> = (-1)^n Z^(n)(0) = (2n-1)!! (<p^2>/2m)^n.
  numerics::FiniteDifferenceScheme scheme;
  scheme.step = 0.02;
  double wick = 0.0;
  for (double p2 : {0.5, 1.0, 1.5}) {
    auto z = [p2](double chi) { return oscillator::generating_function_free(p2, 1.0, chi); };
    for (int n = 1; n <= 3; ++n) {
      const double moment = (n % 2 ? -1.0 : 1.0) * numerics::nth_derivative(z, n, scheme).value;
      const double expected =
          static_cast<double>(numerics::double_factorial(2 * n - 1)) * std::pow(0.5 * p2, n);
      wick = std::max(wick, std::abs(moment - expected));
    }
  }
  r.checks.push_back(record(r.name, "wick-double-factorial", wick, tol.get("wick"), "n = 1..3"));
  return r;
}

using SuiteFn = SuiteReport (*)(const ToleranceSet&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites = {
      {"cumulant-triple", cumulant_triple}, {"gf-equivalence", gf_equivalence},
      {"fock-table", fock_table},           {"purity", purity_suite},
      {"qubit-dist", qubit_dist},           {"ohmic", ohmic},
      {"crossover", crossover},             {"ed-oracle", ed_oracle},
      {"free-particle", free_particle},
  };
  return suites;
}

}  // namespace

bool SuiteReport::pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

ToleranceSet::ToleranceSet() : values_(default_tolerances()) {}

double ToleranceSet::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw DomainError("unknown tolerance key '" + std::string(key) + "'");
  return it->second;
}

void ToleranceSet::set(std::string_view key, double value) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    std::string valid;
    for (const auto& k : keys()) valid += (valid.empty() ? "" : ", ") + k;
    throw DomainError("unknown tolerance key '" + std::string(key) + "'; valid keys: " + valid);
  }
  if (!(value >= 0.0)) throw DomainError("tolerance '" + std::string(key) + "' must be non-negative");
  it->second = value;
}

std::vector<std::string> ToleranceSet::keys() {
  std::vector<std::string> out;
  for (const auto& [k, v] : default_tolerances()) out.push_back(k);
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

SuiteReport run_suite(std::string_view name, const ToleranceSet& tolerances) {
  for (const auto& [suite, fn] : registry()) {
    if (suite == name) return fn(tolerances);
  }
  std::string valid;
  for (const auto& n : suite_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw DomainError("unknown suite '" + std::string(name) + "'; valid suites: " + valid);
}

std::vector<SuiteReport> run_suites(const std::vector<std::string>& only,
                                    const ToleranceSet& tolerances) {
  std::vector<SuiteReport> out;
  if (only.empty()) {
    for (const auto& name : suite_names()) out.push_back(run_suite(name, tolerances));
  } else {
    for (const auto& name : only) out.push_back(run_suite(name, tolerances));
  }
  return out;
}

}  // namespace entangle::verify
