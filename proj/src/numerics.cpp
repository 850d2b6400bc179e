#include "entangle/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace entangle::numerics {

double hermite_poly(int n, double u) {
  if (n < 0) throw DomainError("hermite_poly: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * u;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * u * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double legendre_poly(int n, double z) {
  if (n < 0) throw DomainError("legendre_poly: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = z;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * z * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::uint64_t double_factorial(int n) {
  if (n < -1) throw DomainError("double_factorial: argument below -1");
  std::uint64_t result = 1;
  for (int k = n; k > 1; k -= 2) {
    const auto factor = static_cast<std::uint64_t>(k);
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw std::overflow_error("double_factorial: " + std::to_string(n) +
                                "!! does not fit in 64 bits");
    }
    result *= factor;
  }
  return result;
}

QuadratureRule QuadratureRule::gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  QuadratureRule rule;
  rule.kind = QuadratureKind::gauss_legendre;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Newton iteration on orthonormal Hermite functions, with the classic
// asymptotic starting guesses for the largest roots.
QuadratureRule QuadratureRule::gauss_hermite(int order) {
  if (order < 1) throw DomainError("gauss_hermite: order must be positive");
  QuadratureRule rule;
  rule.kind = QuadratureKind::gauss_hermite;
  rule.order = order;
  const int n = order;
  std::vector<double> roots(n), weights(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * roots[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * roots[1];
    } else {
      z = 2.0 * z - roots[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    double p1 = pim4, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
    }
    pp = std::sqrt(2.0 * n) * p2;
    roots[i] = z;
    roots[n - 1 - i] = -z;
    weights[i] = weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) roots[n / 2] = 0.0;
  // Roots were produced largest first.
  rule.nodes.assign(roots.rbegin(), roots.rend());
  rule.weights.assign(weights.rbegin(), weights.rend());
  return rule;
}

std::vector<double> central_weights(int derivative, int half_width) {
  if (derivative < 0 || half_width < 0 || 2 * half_width < derivative) {
    throw DomainError("central_weights: stencil too narrow for derivative order");
  }
  const int count = 2 * half_width + 1;
  std::vector<double> x(count);
  for (int i = 0; i < count; ++i) x[i] = i - half_width;
  // Fornberg's recursion; c[i][k] is the weight of node i for derivative k.
  std::vector<std::vector<double>> c(count, std::vector<double>(derivative + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < count; ++i) {
    const int mn = std::min(i, derivative);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(count);
  for (int i = 0; i < count; ++i) w[i] = c[i][derivative];
  return w;
}

namespace {

int stencil_half_width(int n) { return (n + 1) / 2 + 3; }

int accuracy_order(int n, int half_width) { return 2 * ((2 * half_width + 2 - n) / 2); }

double apply_stencil(const std::function<double(double)>& f, std::span<const double> w, int n,
                     double h, double at) {
  const int half = static_cast<int>(w.size() / 2);
  double sum = 0.0;
  for (int j = -half; j <= half; ++j) {
    const double wj = w[j + half];
    if (wj != 0.0) sum += wj * f(at + j * h);
  }
  return sum / std::pow(h, n);
}

void check_scheme(int n, const FiniteDifferenceScheme& scheme) {
  if (!(scheme.step > 0.0)) throw DomainError("finite difference step must be positive");
  if (scheme.max_order < 1 || scheme.max_order > 6) {
    throw DomainError("finite difference max_order must lie in [1, 6]");
  }
  if (n < 1 || n > scheme.max_order) {
    throw DomainError("derivative order " + std::to_string(n) + " outside [1, " +
                      std::to_string(scheme.max_order) + "]");
  }
}

}  // namespace

DerivativeEstimate nth_derivative(const std::function<double(double)>& f, int n,
                                  const FiniteDifferenceScheme& scheme, double at) {
  check_scheme(n, scheme);
  const int half = stencil_half_width(n);
  const auto w = central_weights(n, half);
  const double coarse = apply_stencil(f, w, n, scheme.step, at);
  const double fine = apply_stencil(f, w, n, 0.5 * scheme.step, at);
  const double denom = std::ldexp(1.0, accuracy_order(n, half)) - 1.0;
  const double correction = (fine - coarse) / denom;
  return {fine + correction, std::abs(correction)};
}

DerivativeEstimate nth_log_derivative(const std::function<double(double)>& f, int n,
                                      const FiniteDifferenceScheme& scheme) {
  auto log_f = [&f](double chi) {
    const double value = f(chi);
    if (!(value > 0.0)) {
      throw DomainError("nth_log_derivative: function not positive at chi = " +
                        std::to_string(chi));
    }
    return std::log(value);
  };
  auto estimate = nth_derivative(log_f, n, scheme);
  if (n % 2 == 1) estimate.value = -estimate.value;
  return estimate;
}

std::vector<double> cumulants_from_moments(std::span<const double> raw_moments) {
  const std::size_t n = raw_moments.size();
  std::vector<double> kappa(n, 0.0);
  // Pascal row C(m-1, k-1) built incrementally.
  for (std::size_t m = 1; m <= n; ++m) {
    double value = raw_moments[m - 1];
    double binom = 1.0;  // C(m-1, 0)
    for (std::size_t k = 1; k < m; ++k) {
      value -= binom * kappa[k - 1] * raw_moments[m - k - 1];
      binom = binom * static_cast<double>(m - k) / static_cast<double>(k);
    }
    kappa[m - 1] = value;
  }
  return kappa;
}

}  // namespace entangle::numerics
