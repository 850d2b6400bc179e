#include "entangle/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "entangle/errors.hpp"
#include "entangle/numerics.hpp"

namespace entangle::oracle {

using oscillator::GaussianMoments;
using oscillator::OscillatorParams;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

constexpr double kBoxSigmas = 8.0;

// Log of the eigenfunction normalisation sqrt(gamma / (2^n n! sqrt(pi))).
double log_eigen_norm(double gamma, int n) {
  return 0.5 * (std::log(gamma) - n * std::numbers::ln2 - std::lgamma(n + 1.0) -
                0.5 * std::log(std::numbers::pi));
}

}  // namespace

double oscillator_eigenfunction(const OscillatorParams& p, int n, double q) {
  const double u = p.gamma() * q;
  return std::exp(log_eigen_norm(p.gamma(), n) - 0.5 * u * u) * numerics::hermite_poly(n, u);
}

double z_via_quadrature(const OscillatorParams& p, const GaussianMoments& g, double chi) {
  if (!(p.omega() > 0.0)) throw DomainError("z_via_quadrature: omega must be positive");
  if (!(chi > 0.0)) throw DomainError("z_via_quadrature: chi must be positive");
  oscillator::validate(g, p.hbar());
  // Centre-of-mass Q = (q+q')/2 and separation r = q - q' (unit Jacobian).
  const double u = p.quantum() * chi;
  const double scale = p.mass() * p.omega() / (p.hbar() * std::sinh(u));
  const double cosh_minus_one = 2.0 * std::pow(std::sinh(0.5 * u), 2);
  const double precision_q = 1.0 / g.q2 + 2.0 * scale * cosh_minus_one;
  const double precision_r = g.p2 / (p.hbar() * p.hbar()) + 0.5 * scale * (cosh_minus_one + 2.0);
  const double half_q = kBoxSigmas / std::sqrt(precision_q);
  const double half_r = kBoxSigmas / std::sqrt(precision_r);
  auto integrand = [&](double centre, double sep) {
    const double q = centre + 0.5 * sep;
    const double qp = centre - 0.5 * sep;
    return oscillator::position_density_matrix(p, g, q, qp) *
           oscillator::imaginary_time_propagator(p, qp, q, chi);
  };
  return numerics::integrate_2d_adaptive(integrand, -half_q, half_q, -half_r, half_r,
                                         kQuadratureTolerance, "Z(chi) quadrature")
      .value;
}

double rho_nn_via_quadrature(const OscillatorParams& p, const GaussianMoments& g, int n) {
  if (n < 0) throw DomainError("rho_nn_via_quadrature: n must be non-negative");
  if (n > 30) {
    throw DomainError("rho_nn_via_quadrature: n = " + std::to_string(n) +
                      " exceeds the Hermite-quadrature accuracy bound (30)");
  }
  if (!(p.omega() > 0.0)) throw DomainError("rho_nn_via_quadrature: omega must be positive");
  oscillator::validate(g, p.hbar());
  const double half = std::max((std::sqrt(2.0 * n + 1.0) + 7.0) / p.gamma(),
                               kBoxSigmas * std::sqrt(g.q2));
  auto integrand = [&](double q, double qp) {
    return oscillator_eigenfunction(p, n, q) * oscillator::position_density_matrix(p, g, q, qp) *
           oscillator_eigenfunction(p, n, qp);
  };
  return numerics::integrate_2d_adaptive(integrand, -half, half, -half, half,
                                         kQuadratureTolerance, "rho_nn quadrature")
      .value;
}

double purity_via_quadrature(const OscillatorParams& p, const GaussianMoments& g) {
  oscillator::validate(g, p.hbar());
  const double half_q = kBoxSigmas * std::sqrt(0.5 * g.q2);
  const double half_r = kBoxSigmas * p.hbar() / std::sqrt(2.0 * g.p2);
  auto integrand = [&](double centre, double sep) {
    const double q = centre + 0.5 * sep;
    const double qp = centre - 0.5 * sep;
    return oscillator::position_density_matrix(p, g, q, qp) *
           oscillator::position_density_matrix(p, g, qp, q);
  };
  return numerics::integrate_2d_adaptive(integrand, -half_q, half_q, -half_r, half_r,
                                         kQuadratureTolerance, "purity quadrature")
      .value;
}

FourierWeights qubit_weights_via_fourier(const qubit::QubitParams& p, const qubit::BlochVector& b,
                                         int periods) {
  if (periods < 1) throw DomainError("qubit_weights_via_fourier: periods must be positive");
  const double window = periods * 2.0 * std::numbers::pi / p.splitting();
  auto weight_at = [&](double energy) {
    auto integrand = [&](double chi) {
      const auto z = qubit::characteristic_function(p, b, chi);
      return (z * std::polar(1.0, chi * energy)).real();
    };
    int order = 64 + 32 * periods;
    double previous = numerics::integrate(numerics::QuadratureRule::gauss_legendre(order),
                                          integrand, -window, window);
    for (;;) {
      order *= 2;
      const double current = numerics::integrate(numerics::QuadratureRule::gauss_legendre(order),
                                                 integrand, -window, window);
      const double diff = std::abs(current - previous) / (2.0 * window);
      if (diff <= 1e-13) return current / (2.0 * window);
      if (order >= numerics::kMaxQuadratureOrder) {
        throw ToleranceError("qubit Fourier inversion", diff, 1e-13);
      }
      previous = current;
    }
  };
  const double half = 0.5 * p.splitting();
  return {weight_at(-half), weight_at(half), weight_at(0.0)};
}

// ---------------------------------------------------------------------------
// Truncated models
// ---------------------------------------------------------------------------

SystemKind TruncatedModel::kind() const noexcept {
  return std::holds_alternative<qubit::QubitParams>(system) ? SystemKind::spin
                                                            : SystemKind::oscillator;
}

int TruncatedModel::system_dimension() const noexcept {
  return kind() == SystemKind::spin ? 2 : fock_cutoff;
}

long long TruncatedModel::dimension() const noexcept {
  long long dim = system_dimension();
  for (std::size_t k = 0; k < bath_frequencies.size(); ++k) {
    dim *= fock_cutoff;
    if (dim > kMaxDimension) return dim;
  }
  return dim;
}

double TruncatedModel::hbar() const noexcept {
  return std::visit([](const auto& s) { return s.hbar(); }, system);
}

void validate(const TruncatedModel& model) {
  if (model.fock_cutoff < 3) throw DomainError("truncated model: fock_cutoff must be at least 3");
  if (model.bath_frequencies.size() != model.couplings.size()) {
    throw DomainError("truncated model: one coupling per bath frequency required");
  }
  for (double w : model.bath_frequencies) {
    if (!(w > 0.0)) throw DomainError("truncated model: bath frequencies must be positive");
  }
  if (model.kind() == SystemKind::oscillator &&
      !(std::get<OscillatorParams>(model.system).omega() > 0.0)) {
    throw DomainError("truncated model: system oscillator needs omega > 0");
  }
  if (model.dimension() > kMaxDimension) {
    throw DomainError("truncated model: Hilbert dimension exceeds the guard of " +
                      std::to_string(kMaxDimension));
  }
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SystemOperators {
  Eigen::MatrixXd hamiltonian;
  Eigen::MatrixXd coordinate;  // X_s
};

SystemOperators system_operators(const TruncatedModel& model) {
  SystemOperators ops;
  if (model.kind() == SystemKind::spin) {
    const auto& s = std::get<qubit::QubitParams>(model.system);
    ops.hamiltonian.resize(2, 2);
    ops.hamiltonian << 0.5 * s.epsilon(), 0.5 * s.delta(), 0.5 * s.delta(), -0.5 * s.epsilon();
    ops.coordinate.resize(2, 2);
    ops.coordinate << 1.0, 0.0, 0.0, -1.0;
  } else {
    const auto& o = std::get<OscillatorParams>(model.system);
    const int n = model.fock_cutoff;
    ops.hamiltonian = Eigen::MatrixXd::Zero(n, n);
    ops.coordinate = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      ops.hamiltonian(i, i) = o.level(i);
      if (i + 1 < n) ops.coordinate(i, i + 1) = ops.coordinate(i + 1, i) = std::sqrt(i + 1.0);
    }
  }
  return ops;
}

SparseMatrix assemble(const TruncatedModel& model) {
  const auto ops = system_operators(model);
  const int ds = model.system_dimension();
  const int modes = static_cast<int>(model.bath_frequencies.size());
  const int cut = model.fock_cutoff;
  long long bath_dim = 1;
  for (int k = 0; k < modes; ++k) bath_dim *= cut;
  const long long dim = ds * bath_dim;
  // Stride of mode k in the bath index (mode 0 slowest).
  std::vector<long long> stride(modes, 1);
  for (int k = modes - 2; k >= 0; --k) stride[k] = stride[k + 1] * cut;
  const double hbar = model.hbar();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * (2 + 2 * modes));
  std::vector<int> occ(modes, 0);
  for (long long bidx = 0; bidx < bath_dim; ++bidx) {
    long long rem = bidx;
    double bath_energy = 0.0;
    for (int k = 0; k < modes; ++k) {
      occ[k] = static_cast<int>(rem / stride[k]);
      rem %= stride[k];
      bath_energy += hbar * model.bath_frequencies[k] * (occ[k] + 0.5);
    }
    for (int s = 0; s < ds; ++s) {
      const long long row = s * bath_dim + bidx;
      for (int t = 0; t < ds; ++t) {
        double value = ops.hamiltonian(s, t);
        if (s == t) value += bath_energy;
        if (value != 0.0) triplets.emplace_back(row, t * bath_dim + bidx, value);
      }
      for (int k = 0; k < modes; ++k) {
        const double g = model.couplings[k];
        if (g == 0.0) continue;
        for (int t = 0; t < ds; ++t) {
          const double x = ops.coordinate(s, t);
          if (x == 0.0) continue;
          if (occ[k] + 1 < cut) {
            triplets.emplace_back(row, t * bath_dim + bidx + stride[k],
                                  g * x * std::sqrt(occ[k] + 1.0));
          }
          if (occ[k] > 0) {
            triplets.emplace_back(row, t * bath_dim + bidx - stride[k],
                                  g * x * std::sqrt(static_cast<double>(occ[k])));
          }
        }
      }
    }
  }
  SparseMatrix h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

double operator_scale(const SparseMatrix& h) {
  double scale = 0.0;
  for (int k = 0; k < h.outerSize(); ++k) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(h, k); it; ++it) row += std::abs(it.value());
    scale = std::max(scale, row);
  }
  return scale;
}

// Restarted Lanczos with full reorthogonalisation for the lowest eigenpair.
GroundState lanczos_lowest(const SparseMatrix& h, double tolerance) {
  const Eigen::Index dim = h.rows();
  const int krylov = static_cast<int>(std::min<Eigen::Index>(dim, 120));
  std::mt19937_64 rng(20040214);
  std::normal_distribution<double> normal;
  Eigen::VectorXd start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = normal(rng);
  start.normalize();

  GroundState best;
  best.dense = false;
  for (int cycle = 0; cycle < 50; ++cycle) {
    Eigen::MatrixXd basis(dim, krylov);
    Eigen::VectorXd alpha(krylov), beta(krylov);
    basis.col(0) = start;
    int used = krylov;
    for (int j = 0; j < krylov; ++j) {
      Eigen::VectorXd w = h * basis.col(j);
      alpha[j] = basis.col(j).dot(w);
      // Two passes of Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
      }
      beta[j] = w.norm();
      if (j + 1 == krylov) break;
      if (beta[j] < 1e-14) {
        used = j + 1;
        break;
      }
      basis.col(j + 1) = w / beta[j];
    }
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(used, used);
    for (int j = 0; j < used; ++j) {
      tri(j, j) = alpha[j];
      if (j + 1 < used) tri(j, j + 1) = tri(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
    Eigen::VectorXd ritz = basis.leftCols(used) * small.eigenvectors().col(0);
    ritz.normalize();
    const double energy = ritz.dot(h * ritz);
    const double residual = (h * ritz - energy * ritz).norm();
    best.vector = ritz;
    best.energy = energy;
    best.residual = residual;
    if (residual <= tolerance) return best;
    start = ritz;
  }
  throw ToleranceError("Lanczos ground state residual", best.residual, tolerance);
}

}  // namespace

GroundState ground_state(const TruncatedModel& model) {
  validate(model);
  const SparseMatrix h = assemble(model);
  const double tolerance = 1e-8 * std::max(1.0, operator_scale(h));
  GroundState gs;
  if (h.rows() <= kDenseDimension) {
    const Eigen::MatrixXd dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    if (solver.info() != Eigen::Success) {
      throw ToleranceError("dense eigensolver", std::numeric_limits<double>::infinity(), tolerance);
    }
    gs.vector = solver.eigenvectors().col(0);
    gs.energy = solver.eigenvalues()[0];
    gs.residual = (dense * gs.vector - gs.energy * gs.vector).norm();
    gs.dense = true;
    if (gs.residual > tolerance) throw ToleranceError("dense ground state residual", gs.residual, tolerance);
  } else {
    gs = lanczos_lowest(h, tolerance);
  }
  // Fix the arbitrary global sign so results are reproducible.
  Eigen::Index pivot = 0;
  gs.vector.cwiseAbs().maxCoeff(&pivot);
  if (gs.vector[pivot] < 0.0) gs.vector = -gs.vector;
  return gs;
}

Eigen::VectorXd ReducedDensityMatrix::eigenvalues() const {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(entries, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

ReducedDensityMatrix reduced_density(const Eigen::VectorXd& state, const TruncatedModel& model) {
  const int ds = model.system_dimension();
  if (state.size() != model.dimension()) {
    throw DomainError("reduced_density: state size does not match the model dimension");
  }
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > 1e-10) throw DomainError("reduced_density: state is not normalised");
  const Eigen::Index bath_dim = state.size() / ds;
  // Row-major reshape: psi(s, b) = state[s * bath_dim + b].
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      psi(state.data(), ds, bath_dim);
  ReducedDensityMatrix rho;
  rho.entries = psi * psi.transpose();
  if ((rho.entries - rho.entries.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("reduced_density: result is not Hermitian");
  }
  if (std::abs(rho.entries.trace() - 1.0) > 1e-10) {
    throw DomainError("reduced_density: trace deviates from 1");
  }
  if (rho.eigenvalues().minCoeff() < -1e-10) {
    throw DomainError("reduced_density: negative eigenvalue");
  }
  return rho;
}

SpinPopulations spin_populations(const ReducedDensityMatrix& rho, const qubit::QubitParams& p) {
  if (rho.dimension() != 2) throw DomainError("spin_populations: expected a 2x2 density matrix");
  Eigen::Matrix2d hs;
  hs << 0.5 * p.epsilon(), 0.5 * p.delta(), 0.5 * p.delta(), -0.5 * p.epsilon();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(hs);
  const Eigen::Vector2d down = eig.eigenvectors().col(0);
  const Eigen::Vector2d up = eig.eigenvectors().col(1);
  const Eigen::Matrix2d r = rho.entries;
  SpinPopulations out;
  out.p_down = down.dot(r * down);
  out.p_up = up.dot(r * up);
  out.off_diagonal = down.dot(r * up);
  out.bloch = {2.0 * r(0, 1), 0.0, r(0, 0) - r(1, 1)};
  return out;
}

GaussianMoments oscillator_moments(const ReducedDensityMatrix& rho, const OscillatorParams& p) {
  const int n = rho.dimension();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) x(i, i + 1) = x(i + 1, i) = std::sqrt(i + 1.0);
  // q = sqrt(hbar/2 m w)(a + a^+); p = i sqrt(hbar m w/2)(a^+ - a).
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);  // a^+ - a
  for (int i = 0; i + 1 < n; ++i) {
    y(i + 1, i) = std::sqrt(i + 1.0);
    y(i, i + 1) = -std::sqrt(i + 1.0);
  }
  const double q_scale = p.hbar() / (2.0 * p.mass() * p.omega());
  const double p_scale = 0.5 * p.hbar() * p.mass() * p.omega();
  return {q_scale * (rho.entries * x * x).trace(), -p_scale * (rho.entries * y * y).trace()};
}

ConvergedReduced reduced_density_converged(const TruncatedModel& model) {
  ConvergedReduced out;
  const auto coarse_gs = ground_state(model);
  const auto coarse = reduced_density(coarse_gs.vector, model);
  TruncatedModel fine_model = model;
  fine_model.fock_cutoff = 2 * model.fock_cutoff;
  out.ground = ground_state(fine_model);
  out.rho = reduced_density(out.ground.vector, fine_model);
  const int shared = std::min(coarse.dimension(), out.rho.dimension());
  double change = 0.0;
  for (int i = 0; i < shared; ++i) {
    change = std::max(change, std::abs(coarse.entries(i, i) - out.rho.entries(i, i)));
  }
  for (int i = shared; i < out.rho.dimension(); ++i) {
    change = std::max(change, std::abs(out.rho.entries(i, i)));
  }
  out.cutoff_change = change;
  return out;
}

TruncatedModel spin_boson_surrogate(const qubit::QubitParams& spin, double alpha, double omega_c,
                                    int modes, int fock_cutoff) {
  if (modes < 1) throw DomainError("spin_boson_surrogate: need at least one mode");
  if (!(alpha >= 0.0)) throw DomainError("spin_boson_surrogate: alpha must be non-negative");
  if (!(omega_c > 0.0)) throw DomainError("spin_boson_surrogate: omega_c must be positive");
  TruncatedModel model{spin, {}, {}, fock_cutoff};
  const double dw = omega_c / modes;
  for (int k = 0; k < modes; ++k) {
    const double w = (k + 0.5) * dw;
    model.bath_frequencies.push_back(w);
    model.couplings.push_back(0.5 * std::sqrt(2.0 * alpha * w * dw));
  }
  return model;
}

namespace {

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

FirstOrderReport first_order_structure_check(
    const std::function<TruncatedModel(double)>& model_at, const std::vector<double>& alphas) {
  FirstOrderReport report;
  if (alphas.size() < 4) {
    report.message = "need at least four coupling points";
    return report;
  }
  for (double alpha : alphas) {
    const auto model = model_at(alpha);
    if (model.kind() != SystemKind::spin) {
      report.message = "first-order check expects a spin system";
      return report;
    }
    const auto gs = ground_state(model);
    const auto rho = reduced_density(gs.vector, model);
    const auto pops = spin_populations(rho, std::get<qubit::QubitParams>(model.system));
    FirstOrderPoint pt;
    pt.alpha = alpha;
    pt.p_up = pops.p_up;
    pt.lambda_min = rho.eigenvalues()[0];
    pt.purity = rho.purity();
    pt.difference = std::abs(pt.p_up - pt.lambda_min);
    report.points.push_back(pt);
  }
  std::vector<double> a, pu, lm, mixed, log_a, log_d;
  for (const auto& pt : report.points) {
    if (pt.alpha <= 0.0) continue;
    a.push_back(pt.alpha);
    pu.push_back(pt.p_up / pt.alpha);
    lm.push_back(pt.lambda_min / pt.alpha);
    mixed.push_back((1.0 - pt.purity) / pt.alpha);
    if (pt.difference > 0.0) {
      log_a.push_back(std::log(pt.alpha));
      log_d.push_back(std::log(pt.difference));
    }
  }
  if (a.size() < 3 || log_a.size() < 3) {
    report.message = "too few positive couplings with a non-zero eigenvalue/diagonal difference";
    return report;
  }
  // Linear coefficients: intercepts of the quotients extrapolated to alpha -> 0.
  auto intercept = [&](const std::vector<double>& q) {
    const double m = slope(a, q);
    double mean_a = 0, mean_q = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      mean_a += a[i];
      mean_q += q[i];
    }
    return (mean_q - m * mean_a) / static_cast<double>(a.size());
  };
  report.p_up_slope = intercept(pu);
  report.eigenvalue_slope = intercept(lm);
  report.purity_slope = intercept(mixed);
  report.difference_loglog = slope(log_a, log_d);
  report.fit_ok = std::isfinite(report.p_up_slope) && std::isfinite(report.difference_loglog);
  if (!report.fit_ok) report.message = "fit produced non-finite coefficients";
  return report;
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

void validate(const NormalModeNetwork& net) {
  const auto n = net.mass_matrix.rows();
  if (n == 0 || net.mass_matrix.cols() != n || net.stiffness_matrix.rows() != n ||
      net.stiffness_matrix.cols() != n) {
    throw DomainError("network: mass and stiffness must be square matrices of equal size");
  }
  if (net.subsystem_index < 0 || net.subsystem_index >= n) {
    throw DomainError("network: subsystem index out of range");
  }
  if (!(net.hbar > 0.0)) throw DomainError("network: hbar must be positive");
  auto asymmetry = [](const Eigen::MatrixXd& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
  };
  if (asymmetry(net.mass_matrix) > 1e-12 || asymmetry(net.stiffness_matrix) > 1e-12) {
    throw DomainError("network: mass and stiffness matrices must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(net.mass_matrix);
  if (llt.info() != Eigen::Success) throw DomainError("network: mass matrix not positive definite");
}

oscillator::GaussianMoments network_ground_covariances(const NormalModeNetwork& net) {
  validate(net);
  // Mass-weighted coordinates: M = L L^T, q~ = L^T q, p~ = L^-1 p.
  Eigen::LLT<Eigen::MatrixXd> llt(net.mass_matrix);
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd l_inv = l.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(l.rows(), l.cols()));
  const Eigen::MatrixXd dynamical = l_inv * net.stiffness_matrix * l_inv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (dynamical + dynamical.transpose()));
  const Eigen::VectorXd w2 = eig.eigenvalues();
  const double floor = 1e-12 * std::max(1.0, w2.cwiseAbs().maxCoeff());
  if (w2.minCoeff() <= floor) {
    throw DomainError("network: zero-frequency normal mode (free mode has no ground state)");
  }
  const Eigen::VectorXd w = w2.cwiseSqrt();
  const Eigen::MatrixXd& u = eig.eigenvectors();
  const double half_hbar = 0.5 * net.hbar;
  const Eigen::MatrixXd qq_mw = half_hbar * u * w.cwiseInverse().asDiagonal() * u.transpose();
  const Eigen::MatrixXd pp_mw = half_hbar * u * w.asDiagonal() * u.transpose();
  const Eigen::MatrixXd qq = l_inv.transpose() * qq_mw * l_inv;
  const Eigen::MatrixXd pp = l * pp_mw * l.transpose();
  const int i = net.subsystem_index;
  return {qq(i, i), pp(i, i)};
}

NormalModeNetwork ohmic_star_network(double alpha, double cutoff_ratio, int n_modes, double mass,
                                     double omega0, double hbar) {
  if (n_modes < 1) throw DomainError("ohmic_star_network: need at least one bath mode");
  if (!(alpha >= 0.0)) throw DomainError("ohmic_star_network: alpha must be non-negative");
  if (!(cutoff_ratio > 0.0)) throw DomainError("ohmic_star_network: cutoff ratio must be positive");
  const int n = n_modes + 1;
  NormalModeNetwork net;
  net.mass_matrix = mass * Eigen::MatrixXd::Identity(n, n);
  net.stiffness_matrix = Eigen::MatrixXd::Zero(n, n);
  net.hbar = hbar;
  const double omega_c = cutoff_ratio * omega0;
  const double dw = omega_c / n_modes;
  const double eta = 2.0 * mass * alpha * omega0;  // J(w) = eta w
  double counter_term = 0.0;
  for (int k = 1; k <= n_modes; ++k) {
    const double w = (k - 0.5) * dw;
    const double c = std::sqrt(2.0 / std::numbers::pi * mass * w * eta * w * dw);
    net.stiffness_matrix(k, k) = mass * w * w;
    net.stiffness_matrix(0, k) = net.stiffness_matrix(k, 0) = -c;
    counter_term += c * c / (mass * w * w);
  }
  net.stiffness_matrix(0, 0) = mass * omega0 * omega0 + counter_term;
  return net;
}

}  // namespace entangle::oracle
