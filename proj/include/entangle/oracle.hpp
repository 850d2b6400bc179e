#pragma once

// Brute-force verification paths that share no code with the closed forms:
// tensor-product quadrature of the position-space integrals, exact
// diagonalization of truncated spin/oscillator + boson Hamiltonians, and
// normal-mode ground-state covariances of bilinear oscillator networks.
//
// Coupling convention for the truncated models (the closed forms never
// depend on it): every bath mode k couples through a bilinear term
//   g_k * X_s * (b_k + b_k^dagger),
// with X_s = sigma_z for the spin and X_s = a + a^dagger for the oscillator.
// No counter-term is added. Bath modes carry their zero-point energy.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "entangle/oscillator.hpp"
#include "entangle/qubit.hpp"

namespace entangle::oracle {

// ---------------------------------------------------------------------------
// Quadrature oracles
// ---------------------------------------------------------------------------

/// Absolute agreement demanded between successive quadrature orders.
inline constexpr double kQuadratureTolerance = 1e-11;

/// Z(chi) = int dq dq' <q|rho|q'> <q'|exp(-chi H_s)|q>.
double z_via_quadrature(const oscillator::OscillatorParams& p, const oscillator::GaussianMoments& g,
                        double chi);

/// rho_nn = int dq dq' psi_n(q) <q|rho|q'> psi_n(q'), for n <= 30.
double rho_nn_via_quadrature(const oscillator::OscillatorParams& p,
                             const oscillator::GaussianMoments& g, int n);

/// Tr rho^2 = int dq dq' <q|rho|q'> <q'|rho|q>.
double purity_via_quadrature(const oscillator::OscillatorParams& p,
                             const oscillator::GaussianMoments& g);

/// Normalised oscillator eigenfunction psi_n(q).
double oscillator_eigenfunction(const oscillator::OscillatorParams& p, int n, double q);

/// Weights recovered by Fourier-inverting <exp(-i chi H_s)> over a window of
/// `periods` full periods of hbar*Omega.
struct FourierWeights {
  double at_minus = 0.0;  ///< weight at E = -hbar Omega / 2
  double at_plus = 0.0;   ///< weight at E = +hbar Omega / 2
  double at_zero = 0.0;   ///< leakage at E = 0 (no level there)
};

FourierWeights qubit_weights_via_fourier(const qubit::QubitParams& p, const qubit::BlochVector& b,
                                         int periods = 10);

// ---------------------------------------------------------------------------
// Exact diagonalization
// ---------------------------------------------------------------------------

enum class SystemKind { spin, oscillator };

struct TruncatedModel {
  std::variant<qubit::QubitParams, oscillator::OscillatorParams> system;
  std::vector<double> bath_frequencies;
  std::vector<double> couplings;
  int fock_cutoff = 8;  ///< levels per bath mode (and for the system oscillator)

  SystemKind kind() const noexcept;
  int system_dimension() const noexcept;
  long long dimension() const noexcept;
  double hbar() const noexcept;
};

inline constexpr long long kMaxDimension = 200000;
inline constexpr long long kDenseDimension = 2000;

/// Throws DomainError if the model breaks its invariants or the dimension guard.
void validate(const TruncatedModel& model);

struct GroundState {
  Eigen::VectorXd vector;
  double energy = 0.0;
  double residual = 0.0;  ///< ||H v - E v||
  bool dense = true;      ///< which eigensolver produced it
};

/// Lowest eigenpair of the assembled Hamiltonian. Dense below kDenseDimension,
/// restarted Lanczos above. Throws ToleranceError when the residual stays
/// above 1e-8 times the Hamiltonian scale.
GroundState ground_state(const TruncatedModel& model);

/// Reduced density matrix over the system basis.
struct ReducedDensityMatrix {
  Eigen::MatrixXd entries;

  int dimension() const noexcept { return static_cast<int>(entries.rows()); }
  double purity() const { return (entries * entries).trace(); }
  Eigen::VectorXd eigenvalues() const;
};

/// rho = Tr_E |psi><psi|. Throws DomainError if the result breaks the
/// Hermiticity, trace or positivity invariants.
ReducedDensityMatrix reduced_density(const Eigen::VectorXd& state, const TruncatedModel& model);

/// Populations of the H_s eigenstates for a spin reduced density matrix.
struct SpinPopulations {
  double p_down = 1.0;
  double p_up = 0.0;
  double off_diagonal = 0.0;  ///< <down|rho|up>
  qubit::BlochVector bloch;
};

SpinPopulations spin_populations(const ReducedDensityMatrix& rho, const qubit::QubitParams& p);

/// <q^2>, <p^2> of the system oscillator in a reduced density matrix.
oscillator::GaussianMoments oscillator_moments(const ReducedDensityMatrix& rho,
                                               const oscillator::OscillatorParams& p);

/// Ground state and reduced density matrix at cutoff N and 2N, with the
/// largest change of any reduced-density diagonal.
struct ConvergedReduced {
  ReducedDensityMatrix rho;
  GroundState ground;
  double cutoff_change = 0.0;
};

ConvergedReduced reduced_density_converged(const TruncatedModel& model);

/// Spin-boson surrogate: modes at (k - 1/2) omega_c / M with couplings from
/// an ohmic spectral density J(w) = 2 pi alpha w, i.e.
/// g_k = sqrt(2 alpha w_k dw) / 2.
TruncatedModel spin_boson_surrogate(const qubit::QubitParams& spin, double alpha, double omega_c,
                                    int modes, int fock_cutoff);

struct FirstOrderPoint {
  double alpha = 0.0;
  double p_up = 0.0;          ///< diagonal element in the H_s eigenbasis
  double lambda_min = 0.0;    ///< smaller eigenvalue of rho
  double purity = 1.0;
  double difference = 0.0;    ///< |lambda_min - p_up|
};

struct FirstOrderReport {
  std::vector<FirstOrderPoint> points;
  bool fit_ok = false;
  double p_up_slope = 0.0;         ///< linear coefficient of p_up in alpha
  double eigenvalue_slope = 0.0;   ///< linear coefficient of lambda_min in alpha
  double purity_slope = 0.0;       ///< coefficient of alpha in 1 - Tr rho^2
  double difference_loglog = 0.0;  ///< d ln|lambda_min - p_up| / d ln alpha
  std::string message;
};

/// Builds the model at each coupling and fits the first-order structure of rho.
FirstOrderReport first_order_structure_check(
    const std::function<TruncatedModel(double)>& model_at, const std::vector<double>& alphas);

// ---------------------------------------------------------------------------
// Oscillator networks
// ---------------------------------------------------------------------------

/// H = p^T M^-1 p / 2 + q^T K q / 2.
struct NormalModeNetwork {
  Eigen::MatrixXd mass_matrix;
  Eigen::MatrixXd stiffness_matrix;
  int subsystem_index = 0;
  double hbar = 1.0;
};

void validate(const NormalModeNetwork& net);

/// Exact ground-state <q_i^2>, <p_i^2> of the subsystem coordinate.
oscillator::GaussianMoments network_ground_covariances(const NormalModeNetwork& net);

/// Oscillator (mass m, frequency omega0) linearly coupled to n_modes bath
/// oscillators discretising an ohmic density J(w) = 2 m alpha omega0 w up to
/// omega_c, counter-term included, so that alpha is the damping in units of
/// the oscillator frequency.
NormalModeNetwork ohmic_star_network(double alpha, double cutoff_ratio, int n_modes,
                                     double mass = 1.0, double omega0 = 1.0, double hbar = 1.0);

}  // namespace entangle::oracle
