#pragma once

// Special functions, quadrature rules and finite-difference kernels shared by
// the qubit, oscillator and oracle modules. Everything here is pure.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "entangle/errors.hpp"

namespace entangle::numerics {

/// Physicists' Hermite polynomial H_n(u) from the three-term recurrence.
double hermite_poly(int n, double u);

/// Legendre polynomial P_n(z) from Bonnet's recurrence.
double legendre_poly(int n, double z);

/// n!! with the conventions 0!! = (-1)!! = 1. Throws std::overflow_error past 33!!.
std::uint64_t double_factorial(int n);

enum class QuadratureKind { gauss_hermite, gauss_legendre };

/// Gaussian quadrature nodes and weights.
///
/// Legendre rules live on [-1, 1] with unit weight function; Hermite rules
/// carry the weight exp(-u^2) on the real line.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureKind kind = QuadratureKind::gauss_legendre;
  int order = 0;

  static QuadratureRule gauss_legendre(int order);
  static QuadratureRule gauss_hermite(int order);
};

inline constexpr int kDefaultQuadratureOrder = 64;
inline constexpr int kMaxQuadratureOrder = 1024;

/// Integral of f over [lo, hi] with a Gauss-Legendre rule.
template <class F>
double integrate(const QuadratureRule& rule, F&& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

/// Tensor-product integral of f(u, v) over [u_lo, u_hi] x [v_lo, v_hi].
template <class F>
double integrate_2d(const QuadratureRule& rule, F&& f, double u_lo, double u_hi, double v_lo,
                    double v_hi) {
  const double hu = 0.5 * (u_hi - u_lo), mu = 0.5 * (u_hi + u_lo);
  const double hv = 0.5 * (v_hi - v_lo), mv = 0.5 * (v_hi + v_lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = mu + hu * rule.nodes[i];
    double row = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      row += rule.weights[j] * f(u, mv + hv * rule.nodes[j]);
    }
    sum += rule.weights[i] * row;
  }
  return hu * hv * sum;
}

struct AdaptiveIntegral {
  double value = 0.0;
  double error = 0.0;  ///< |I(2n) - I(n)| at the accepted order
  int order = 0;
};

/// Integrates a box with Gauss-Legendre order doubling, starting at the
/// default order, until two consecutive orders agree to `tolerance`
/// (absolute). Throws ToleranceError once kMaxQuadratureOrder is exhausted.
template <class F>
AdaptiveIntegral integrate_2d_adaptive(F&& f, double u_lo, double u_hi, double v_lo, double v_hi,
                                       double tolerance, const char* quantity = "2d quadrature") {
  int order = kDefaultQuadratureOrder;
  double previous = integrate_2d(QuadratureRule::gauss_legendre(order), f, u_lo, u_hi, v_lo, v_hi);
  double diff = 0.0;
  while (order < kMaxQuadratureOrder) {
    order *= 2;
    const double current =
        integrate_2d(QuadratureRule::gauss_legendre(order), f, u_lo, u_hi, v_lo, v_hi);
    diff = std::abs(current - previous);
    if (diff <= tolerance) return {current, diff, order};
    previous = current;
  }
  throw ToleranceError(quantity, diff, tolerance);
}

enum class StencilKind { central };

struct FiniteDifferenceScheme {
  double step = 1e-2;
  int max_order = 6;
  StencilKind stencil_kind = StencilKind::central;
};

/// A derivative value with its step-halving error estimate.
struct DerivativeEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Fornberg weights for the n-th derivative at 0 on the integer grid
/// -half_width..half_width (unit spacing).
std::vector<double> central_weights(int derivative, int half_width);

/// n-th derivative of f at `at` with a wide central stencil, refined once by
/// Richardson extrapolation between `scheme.step` and `scheme.step / 2`.
DerivativeEstimate nth_derivative(const std::function<double(double)>& f, int n,
                                  const FiniteDifferenceScheme& scheme, double at = 0.0);

/// (-1)^n d^n/dchi^n ln f(chi) at chi = 0: the n-th cumulant of the
/// distribution whose Laplace transform is f. Throws DomainError when f is
/// not positive somewhere on the stencil.
DerivativeEstimate nth_log_derivative(const std::function<double(double)>& f, int n,
                                      const FiniteDifferenceScheme& scheme);

/// Cumulants k_1..k_n from raw moments m_1..m_n.
std::vector<double> cumulants_from_moments(std::span<const double> raw_moments);

}  // namespace entangle::numerics
