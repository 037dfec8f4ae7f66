#ifndef EBC_TESTS_SUPPORT_HPP
#define EBC_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

// Test-side numerics kept independent of the library implementation paths
// they are used to check.

namespace ebc_test {

// Tanh-sinh quadrature on (0,1); handles integrable endpoint singularities.
// Evaluates f(x, 1-x) so integrands can use whichever endpoint distance is
// accurate.
inline double tanh_sinh_01(const std::function<double(double, double)>& f,
                           double tol = 1e-13) {
  const double pi_half = 1.5707963267948966;
  const auto node_sum = [&](double h, bool odd_only) {
    double sum = 0.0;
    const int j_max = static_cast<int>(std::ceil(6.5 / h));
    for (int j = -j_max; j <= j_max; ++j) {
      if (odd_only && j % 2 == 0) {
        continue;
      }
      const double t = h * j;
      const double u = pi_half * std::sinh(t);
      const double w = 0.5 * pi_half * std::cosh(t) / std::pow(std::cosh(u), 2);
      if (w < 1e-300) {
        continue;
      }
      // x and 1-x computed without cancellation.
      const double e = std::exp(-2.0 * std::abs(u));
      const double small = e / (1.0 + e);
      const double big = 1.0 / (1.0 + e);
      const double x = (u >= 0.0) ? big : small;
      const double one_minus_x = (u >= 0.0) ? small : big;
      sum += w * f(x, one_minus_x);
    }
    return sum;
  };

  double h = 1.0;
  double result = h * node_sum(h, false);
  for (int level = 1; level < 12; ++level) {
    h *= 0.5;
    const double refined = 0.5 * result + h * node_sum(h, true);
    if (level > 2 && std::abs(refined - result) <= tol * std::abs(refined)) {
      return refined;
    }
    result = refined;
  }
  return result;
}

// Oracle for the merger-rate integral: both the defining integral and the
// Beta normalizer are evaluated by quadrature, so no log-gamma identity from
// the implementation is reused.
inline double merger_rate_oracle(double alpha, std::int64_t b, std::int64_t k) {
  const double num = tanh_sinh_01(
      [&](double p, double q) {
        return std::pow(p, static_cast<double>(k) - alpha - 1.0) *
               std::pow(q, static_cast<double>(b - k) + alpha - 1.0);
      });
  const double den = tanh_sinh_01(
      [&](double p, double q) { return std::pow(p, 1.0 - alpha) * std::pow(q, alpha - 1.0); });
  return num / den;
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) {
    s += (x - m) * (x - m);
  }
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace ebc_test

#endif  // EBC_TESTS_SUPPORT_HPP
