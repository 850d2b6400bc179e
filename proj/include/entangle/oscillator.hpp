#pragma once

// Gaussian-state energetics of a harmonic oscillator H_s = p^2/2m + m w^2 q^2/2
// entangled with its environment. All environmental information sits in the
// second moments <q^2>, <p^2> (no q-p correlation), summarised by the
// dimensionless shape variables x = 2 gamma^2 <q^2>, y = 2 <p^2>/(gamma^2 hbar^2).

#include <array>
#include <vector>

namespace entangle::oscillator {

class OscillatorParams {
 public:
  /// omega = 0 is admitted for the free-particle limit only; every Fock-basis
  /// operation rejects it.
  OscillatorParams(double mass = 1.0, double omega = 1.0, double hbar = 1.0);

  double mass() const noexcept { return mass_; }
  double omega() const noexcept { return omega_; }
  double hbar() const noexcept { return hbar_; }
  /// gamma = sqrt(m omega / hbar), the inverse oscillator length.
  double gamma() const noexcept { return gamma_; }
  /// Energy quantum hbar * omega.
  double quantum() const noexcept { return hbar_ * omega_; }
  /// E_n = (n + 1/2) hbar omega.
  double level(int n) const noexcept { return (n + 0.5) * quantum(); }

 private:
  double mass_;
  double omega_;
  double hbar_;
  double gamma_;
};

struct GaussianMoments {
  double q2 = 0.5;  ///< <q^2>
  double p2 = 0.5;  ///< <p^2>
};

/// Throws UncertaintyViolation when q2 * p2 < hbar^2 / 4.
void validate(const GaussianMoments& g, double hbar = 1.0);

struct ShapeParams {
  double x = 1.0;
  double y = 1.0;
  double d = 4.0;        ///< D = (1 + x)(1 + y)
  double a = 0.0;        ///< (y - x)/D, deviation from equipartition
  double b = 0.0;        ///< (xy - 1)/D, deviation from minimum uncertainty
  double energy = 0.5;   ///< E = (x + y) hbar omega / 4
  double area = 0.25;    ///< A = <q^2><p^2>/hbar^2 = xy/4
  double quantum = 1.0;  ///< hbar omega
};

ShapeParams moments_to_shape(const OscillatorParams& p, const GaussianMoments& g);
GaussianMoments shape_to_moments(const OscillatorParams& p, const ShapeParams& s);

/// Shape variables straight from (x, y). Throws UncertaintyViolation for xy < 1.
ShapeParams shape_from_xy(double x, double y, double quantum = 1.0);

/// As shape_from_xy but without the uncertainty check; used to demonstrate
/// the unphysical probabilities produced by violating inputs.
ShapeParams shape_from_xy_unchecked(double x, double y, double quantum = 1.0);

/// Tr rho^2 = (hbar/2) / sqrt(<q^2><p^2>).
double purity(const GaussianMoments& g, double hbar = 1.0);
/// Tr rho^2 = 1/sqrt(xy).
double purity(const ShapeParams& s);

/// <q|rho|q'> for the Gaussian state,
///   exp{-(q+q')^2/(8<q^2>) - <p^2>(q-q')^2/(2 hbar^2)} / sqrt(2 pi <q^2>).
/// The quarter in the first exponent is what makes Tr rho = 1 and gives the
/// diagonal the variance <q^2>.
double position_density_matrix(const OscillatorParams& p, const GaussianMoments& g, double q,
                               double q_prime);

/// Euclidean (Mehler) kernel <q'|exp(-chi H_s)|q>; requires omega > 0 and chi > 0.
double imaginary_time_propagator(const OscillatorParams& p, double q, double q_prime, double chi);

/// Z(chi) = {2E sinh(eps chi)/eps + 2A (cosh eps chi - 1) + (1 + cosh eps chi)/2}^(-1/2).
/// Defined wherever the bracket is positive, which includes a neighbourhood
/// of negative chi; throws DomainError elsewhere.
double generating_function(const ShapeParams& s, double chi);

/// Free-particle limit {1 + chi <p^2>/m}^(-1/2).
double generating_function_free(double p2, double mass, double chi);

/// k_1..k_4 of the sub-system energy distribution.
using EnergyCumulants = std::array<double, 4>;

EnergyCumulants cumulants_closed_form(const ShapeParams& s);

/// Cumulants k_1..k_n_max by finite differences of ln Z (n_max <= 6).
std::vector<double> cumulants_finite_difference(const ShapeParams& s, int n_max);

/// Diagonal Fock-basis probabilities rho_00..rho_NN.
struct FockDistribution {
  std::vector<double> probs;
  int truncation = 0;
  double tail_bound = 0.0;      ///< 1 - sum(probs)
  double prefactor = 1.0;       ///< sqrt(4/D)
  double envelope_ratio = 0.0;  ///< r = b + |a|; rho_nn <= prefactor * r^n

  /// Rigorous bound on sum_{n > N} w(n) rho_nn for the weight
  /// w(n) = (n + 1/2)^power.
  double envelope_tail(int power = 0) const;
};

/// Scaled Legendre sequence Q_n = (b^2 - a^2)^(n/2) P_n(b/sqrt(b^2 - a^2)),
/// generated by (n+1) Q_{n+1} = (2n+1) b Q_n - n (b^2 - a^2) Q_{n-1}; real
/// for every shape, including b^2 < a^2.
std::vector<double> scaled_legendre_sequence(double a, double b, int n_max);

FockDistribution fock_probabilities(const ShapeParams& s, int n_max);

inline constexpr int kMaxFockTruncation = 200;

/// Smallest N whose envelope tail for the weight (n + 1/2)^power lies below
/// `tolerance`. Throws ToleranceError when N would exceed kMaxFockTruncation.
int fock_truncation_for(const ShapeParams& s, double tolerance, int power = 0);

/// sum_n exp(-chi E_n) rho_nn. Throws ToleranceError when the envelope tail
/// of the truncated sum exceeds `tolerance`.
double spectral_generating_function(const FockDistribution& f, const OscillatorParams& p,
                                    double chi, double tolerance = 1e-10);

/// Cumulants k_1..k_n_max from the truncated Fock distribution, with the
/// envelope tail of the n_max-th moment checked against `tolerance`.
std::vector<double> spectral_cumulants(const FockDistribution& f, const OscillatorParams& p,
                                       int n_max, double tolerance = 1e-10);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

MeanVariance mean_and_variance_from_fock(const FockDistribution& f, const OscillatorParams& p,
                                         double tolerance = 1e-10);

}  // namespace entangle::oscillator
